"""Public suffix list parsing and eTLD+1 lookup."""

from __future__ import annotations

import os
from functools import lru_cache

_BUNDLED = os.path.join(os.path.dirname(__file__), "data", "public_suffix_list.dat")


class PublicSuffixList:
    """Suffix rules read from the plain-text public suffix list format.

    Lines starting with ``//`` are comments. Rules may be plain (``co.uk``),
    wildcard (``*.ck``) or exceptions (``!www.ck``). By default only the ICANN
    section is used; ``include_private=True`` adds the private section.
    """

    def __init__(self, lines, include_private: bool = False):
        self.rules: set[str] = set()
        self.wildcards: set[str] = set()
        self.exceptions: set[str] = set()
        private = False
        for raw in lines:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("//"):
                if "===BEGIN PRIVATE DOMAINS===" in line:
                    private = True
                elif "===END PRIVATE DOMAINS===" in line:
                    private = False
                continue
            if private and not include_private:
                continue
            rule = line.split()[0].lower()
            if rule.startswith("!"):
                self.exceptions.add(rule[1:])
            elif rule.startswith("*."):
                self.wildcards.add(rule[2:])
            else:
                self.rules.add(rule)
        self._cache = lru_cache(maxsize=1 << 18)(self._registrable)

    @classmethod
    def from_file(cls, path, include_private: bool = False) -> "PublicSuffixList":
        with open(path, encoding="utf-8") as fh:
            return cls(fh, include_private=include_private)

    def suffix_length(self, labels: list[str]) -> int:
        """Number of trailing labels forming the public suffix of ``labels``."""
        n = len(labels)
        for i in range(n):
            cand = ".".join(labels[i:])
            if cand in self.exceptions:
                return n - i - 1
            if cand in self.rules:
                return n - i
            if i + 1 < n and ".".join(labels[i + 1:]) in self.wildcards:
                return n - i
        return 1  # implicit "*" rule

    def _registrable(self, host: str) -> str:
        labels = host.split(".")
        k = self.suffix_length(labels)
        if k >= len(labels):
            return host
        return ".".join(labels[-(k + 1):])

    def registrable(self, host: str) -> str:
        """eTLD+1 of a lowercase host; a host that is itself a suffix is returned as-is."""
        return self._cache(host)


@lru_cache(maxsize=None)
def default_suffix_list() -> PublicSuffixList:
    return PublicSuffixList.from_file(_BUNDLED)


@lru_cache(maxsize=8)
def suffix_list_for(path=None) -> PublicSuffixList:
    """The bundled list when ``path`` is None, else the list read from ``path`` (cached)."""
    return default_suffix_list() if path is None else PublicSuffixList.from_file(path)
