"""Atomic file writes, digests and CSV report emission."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile

from . import __version__


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file in the same directory, then rename over ``path``."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _fmt(value):
    if isinstance(value, float):
        return repr(float(value))
    if value is None:
        return ""
    return value


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_report(path, header, rows, params: dict | None = None, seed: int | None = None) -> None:
    """CSV with a one-line header plus a ``.json`` sidecar of parameters."""
    atomic_write_text(path, csv_text(header, rows))
    sidecar = {"params": params or {}, "seed": seed, "tool": "altmon", "version": __version__}
    atomic_write_text(os.fspath(path) + ".json", json.dumps(sidecar, indent=2, sort_keys=True, default=str) + "\n")
