"""On-disk trace cache, one text file per curve.

Format (LF line endings, decimal integers):

    NAGAOLAB-CACHE v1
    <degree> <coefficient-hash>
    p,a
    p,a
    ...

records strictly ascending in p, append-only.  A file whose header or
fingerprint does not match the requesting curve, or whose records are out of
order or malformed, is quarantined (renamed with a .corrupt suffix) and a
CacheCorruptError is raised.
"""

from __future__ import annotations

import hashlib
import os
from pathlib import Path

from .polynomials import IntPolynomial

HEADER = "NAGAOLAB-CACHE v1"


class CacheCorruptError(Exception):
    def __init__(self, path: Path, reason: str):
        super().__init__(f"corrupt cache file {path}: {reason}")
        self.path = path


def fingerprint(f: IntPolynomial) -> str:
    """Degree plus a decimal coefficient hash, stable across runs."""
    payload = ",".join(str(c) for c in f.coeffs).encode()
    digest = int.from_bytes(hashlib.sha256(payload).digest()[:16], "big")
    return f"{f.degree} {digest}"


def cache_path(cache_dir: str | os.PathLike, f: IntPolynomial) -> Path:
    deg, digest = fingerprint(f).split()
    return Path(cache_dir) / f"trace_{deg}_{digest}.txt"


def _quarantine(path: Path) -> None:
    target = path.with_suffix(path.suffix + ".corrupt")
    try:
        path.rename(target)
    except OSError:
        pass


class TraceCache:
    """Cached a_p values for one curve.  Single-writer: only the coordinator
    thread may call append()."""

    def __init__(self, cache_dir: str | os.PathLike, f: IntPolynomial):
        self.path = cache_path(cache_dir, f)
        self.poly = f
        self.records: dict[int, int] = {}
        self._max_p = 0
        if self.path.exists():
            self._load()

    def _fail(self, reason: str):
        _quarantine(self.path)
        raise CacheCorruptError(self.path, reason)

    def _load(self) -> None:
        lines = self.path.read_text().splitlines()
        if not lines or lines[0] != HEADER:
            self._fail("bad header")
        if len(lines) < 2 or lines[1] != fingerprint(self.poly):
            self._fail("fingerprint mismatch")
        last = 0
        for line in lines[2:]:
            try:
                p_s, a_s = line.split(",")
                p, a = int(p_s), int(a_s)
            except ValueError:
                self._fail(f"malformed record {line!r}")
            if p <= last:
                self._fail("records not strictly ascending in p")
            last = p
            self.records[p] = a
        self._max_p = last

    def get(self, p: int) -> int | None:
        return self.records.get(p)

    def append(self, new_records: list[tuple[int, int]]) -> None:
        """Extend the file with records beyond the current maximum p.

        Records at or below the cached maximum are assumed already present
        (same curve, same good-prime set) and are skipped.  The write is a
        single buffered append so an interrupt never leaves a partial block.
        """
        fresh = sorted((p, a) for p, a in new_records if p > self._max_p)
        seen = set(self.records)
        fresh = [(p, a) for p, a in fresh if p not in seen]
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if not self.path.exists():
            self.path.write_text(HEADER + "\n" + fingerprint(self.poly) + "\n")
        if not fresh:
            return
        with open(self.path, "a", newline="\n") as fh:
            fh.write("".join(f"{p},{a}\n" for p, a in fresh))
        for p, a in fresh:
            self.records[p] = a
        self._max_p = fresh[-1][0]
