"""Scan one video description for links, context words and crypto addresses.

    python demos/scan_description.py
"""

from altmon.crypto import detect_crypto
from altmon.textscan import extract_urls, url_contexts

DESCRIPTION = """New video every Friday!
Support the channel: https://www.patreon.com/someone
buy merch: www.teespring.com/YouTuberX
Tips welcome, BTC 1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa
ETH (typo below, fails the checksum) 0x5aAeb6053F3E94C9b9A09f33669435E7Ef1BeAeD
Music by https://soundcloud.com/artist"""


def main():
    print("links")
    for m in extract_urls(DESCRIPTION):
        print(f"  line {m.line_index} col {m.char_offset:>3}  {m.domain_key:<16} {m.raw_url}")

    print("\ncontext words per link")
    for m, words in url_contexts(DESCRIPTION):
        print(f"  {m.domain_key:<16} {', '.join(words) or '-'}")

    print("\ncrypto addresses")
    for c in detect_crypto(DESCRIPTION):
        print(f"  {c.coin:<4} {'valid' if c.checksum_valid else 'BAD CHECKSUM':<12} {c.address}")


if __name__ == "__main__":
    main()
