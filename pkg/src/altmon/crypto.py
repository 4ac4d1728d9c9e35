"""Syntactic matching and checksum validation of cryptocurrency addresses.

Base58check coins (BTC, LTC, DOGE, DASH, NEO) use the bitcoin alphabet; XRP
uses the ripple alphabet. Both carry a 4-byte double-SHA256 checksum over a
one-byte version plus a 20-byte hash. ETH addresses are ``0x`` + 40 hex
digits, with the Keccak-based capitalisation checksum checked only for
mixed-case input.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from hashlib import sha256

from Crypto.Hash import keccak

BITCOIN_ALPHABET = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz"
RIPPLE_ALPHABET = "rpshnaf39wBUDNEGHJKLM4PQRST7VWXYZ2bcdeCg65jkm8oFqi1tuvAxyz"

COINS = ("BTC", "ETH", "LTC", "DASH", "XRP", "DOGE", "NEO")


def _index(alphabet):
    return {c: i for i, c in enumerate(alphabet)}


_BTC_INDEX = _index(BITCOIN_ALPHABET)
_XRP_INDEX = _index(RIPPLE_ALPHABET)


def b58decode(text: str, alphabet: str = BITCOIN_ALPHABET) -> bytes:
    index = _BTC_INDEX if alphabet == BITCOIN_ALPHABET else (
        _XRP_INDEX if alphabet == RIPPLE_ALPHABET else _index(alphabet))
    acc = 0
    for ch in text:
        acc = acc * 58 + index[ch]
    zeros = len(text) - len(text.lstrip(alphabet[0]))
    body = acc.to_bytes((acc.bit_length() + 7) // 8, "big") if acc else b""
    return b"\x00" * zeros + body


def b58encode(data: bytes, alphabet: str = BITCOIN_ALPHABET) -> str:
    acc = int.from_bytes(data, "big")
    out = []
    while acc:
        acc, r = divmod(acc, 58)
        out.append(alphabet[r])
    zeros = len(data) - len(data.lstrip(b"\x00"))
    return alphabet[0] * zeros + "".join(reversed(out))


def checksum(payload: bytes) -> bytes:
    return sha256(sha256(payload).digest()).digest()[:4]


def b58check_encode(payload: bytes, alphabet: str = BITCOIN_ALPHABET) -> str:
    return b58encode(payload + checksum(payload), alphabet)


def b58check_payload(text: str, alphabet: str = BITCOIN_ALPHABET) -> bytes | None:
    """Decoded payload (version + hash) if the trailing checksum verifies, else None."""
    raw = b58decode(text, alphabet)
    if len(raw) < 5:
        return None
    payload, check = raw[:-4], raw[-4:]
    return payload if checksum(payload) == check else None


@dataclass(frozen=True)
class Base58Coin:
    coin: str
    pattern: re.Pattern
    versions: frozenset
    alphabet: str = BITCOIN_ALPHABET

    def validate(self, address: str) -> bool:
        payload = b58check_payload(address, self.alphabet)
        return payload is not None and len(payload) == 21 and payload[0] in self.versions


_B58 = "1-9A-HJ-NP-Za-km-z"

# Checked in order; the first coin whose checksum verifies claims the address.
BASE58_COINS = (
    Base58Coin("BTC", re.compile(rf"[13][{_B58}]{{25,34}}"), frozenset({0x00, 0x05})),
    Base58Coin("LTC", re.compile(rf"[LM3][{_B58}]{{26,33}}"), frozenset({0x30, 0x32, 0x05})),
    Base58Coin("DOGE", re.compile(rf"[D9A][{_B58}]{{33}}"), frozenset({0x1E, 0x16})),
    Base58Coin("DASH", re.compile(rf"[X7][{_B58}]{{33}}"), frozenset({0x4C, 0x10})),
    Base58Coin("NEO", re.compile(rf"A[{_B58}]{{33}}"), frozenset({0x17})),
    Base58Coin("XRP", re.compile(rf"r[{_B58}]{{24,34}}"), frozenset({0x00}), RIPPLE_ALPHABET),
)

_CANDIDATE = re.compile(
    rf"(?<![0-9A-Za-z])(?:(0x[0-9a-fA-F]{{40}})|((?:bc|ltc|BC|LTC)1[0-9A-Za-z]{{6,87}})|([{_B58}]{{25,35}}))(?![0-9A-Za-z])"
)


def keccak256(data: bytes) -> bytes:
    return keccak.new(digest_bits=256, data=data).digest()


def eth_checksum_address(hex40: str) -> str:
    """Mixed-case checksummed form of a 40-hex-digit address (without ``0x``)."""
    lower = hex40.lower()
    digest = keccak256(lower.encode("ascii")).hex()
    return "".join(c.upper() if c.isalpha() and int(h, 16) >= 8 else c for c, h in zip(lower, digest))


def validate_eth(address: str) -> bool:
    body = address[2:]
    if len(body) != 40 or not address.startswith("0x"):
        return False
    if body == body.lower() or body == body.upper():
        return True
    return eth_checksum_address(body) == body


# --- bech32 (segwit v0, BIP-173), opt-in --------------------------------------

_BECH32 = "qpzry9x8gf2tvdw0s3jn54khce6mua7l"
_BECH32_HRP = {"bc": "BTC", "ltc": "LTC"}


def _polymod(values):
    gen = (0x3B6A57B2, 0x26508E6D, 0x1EA119FA, 0x3D4233DD, 0x2A1462B3)
    chk = 1
    for v in values:
        top = chk >> 25
        chk = (chk & 0x1FFFFFF) << 5 ^ v
        for i in range(5):
            chk ^= gen[i] if (top >> i) & 1 else 0
    return chk


def validate_bech32(address: str) -> str | None:
    """Coin for a valid bech32 segwit address, else None."""
    if address.lower() != address and address.upper() != address:
        return None
    addr = address.lower()
    pos = addr.rfind("1")
    hrp, data = addr[:pos], addr[pos + 1:]
    if hrp not in _BECH32_HRP or len(data) < 6 or any(c not in _BECH32 for c in data):
        return None
    values = [_BECH32.index(c) for c in data]
    expanded = [ord(c) >> 5 for c in hrp] + [0] + [ord(c) & 31 for c in hrp]
    if _polymod(expanded + values) != 1:
        return None
    return _BECH32_HRP[hrp]


@dataclass(frozen=True, slots=True)
class CryptoMatch:
    coin: str
    address: str
    line_index: int
    char_offset: int
    checksum_valid: bool


def classify_base58(token: str) -> tuple[str, bool] | None:
    """(coin, checksum_valid) for a base58-looking token, or None if no coin pattern fits."""
    first = None
    for spec in BASE58_COINS:
        if spec.pattern.fullmatch(token):
            if spec.validate(token):
                return spec.coin, True
            if first is None:
                first = spec.coin
    return (first, False) if first else None


def detect_crypto(description: str, bech32: bool = False) -> list[CryptoMatch]:
    """Candidate addresses for the seven supported coins, in text order.

    Only matches with ``checksum_valid`` count as cryptocurrency usage.
    """
    if not description:
        return []
    out = []
    for line_index, line in enumerate(description.split("\n")):
        for m in _CANDIDATE.finditer(line):
            eth, seg, b58 = m.groups()
            if eth:
                out.append(CryptoMatch("ETH", eth, line_index, m.start(), validate_eth(eth)))
            elif b58:
                hit = classify_base58(b58)
                if hit:
                    out.append(CryptoMatch(hit[0], b58, line_index, m.start(), hit[1]))
            elif bech32:
                coin = validate_bech32(seg)
                if coin:
                    out.append(CryptoMatch(coin, seg, line_index, m.start(), True))
    return out
