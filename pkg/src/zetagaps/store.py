"""CSV archives of zeros, zeta' zeros and pairings.

Layout::

    format,1,<kind>,<t_lo>,<t_hi>
    <record rows>
    checksum,<16 hex digits>

The checksum is 64-bit FNV-1a over the record rows exactly as written
(each row followed by a newline).  Values are stored with 12 decimals,
and archives built in memory are canonicalized the same way, so a
save/load round trip returns an equal archive.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    ArchiveParseError,
    CoverageError,
    DomainError,
    IntegrityError,
    InvariantViolation,
    NearZeroError,
    NonMonotoneError,
)
from .zeros import ZetaZero, count_zeros, ordinates
from .zprime import PairingRecord, ZPrimeZero

FORMAT_VERSION = 1
KINDS = ("zeta", "zeta_prime", "pairing")


class ZetaRow(NamedTuple):
    index: int
    gamma: float


class ZPrimeRow(NamedTuple):
    beta_prime: float
    gamma_prime: float
    newton_residual: float


class PairingRow(NamedTuple):
    beta_prime: float
    gamma_prime: float
    gamma_c: float
    dist: float
    gap_down: float
    gap_up: float
    log_T: float


_ROW = {"zeta": ZetaRow, "zeta_prime": ZPrimeRow, "pairing": PairingRow}


def _fmt_field(name: str, v) -> str:
    if name == "index":
        return str(int(v))
    if name == "newton_residual":
        return f"{v:.12e}"
    return f"{v:.12f}"


def _format_row(row) -> str:
    return ",".join(_fmt_field(n, v) for n, v in zip(row._fields, row))


def _parse_row(kind: str, text: str, line: int):
    cls = _ROW[kind]
    parts = text.split(",")
    if len(parts) != len(cls._fields):
        raise ArchiveParseError(f"expected {len(cls._fields)} fields for {kind}, got {len(parts)}", line)
    try:
        vals = [int(p) if n == "index" else float(p) for n, p in zip(cls._fields, parts)]
    except ValueError as e:
        raise ArchiveParseError(f"bad number in row {text!r}", line) from e
    if not all(math.isfinite(v) for v in vals):
        raise ArchiveParseError(f"non-finite value in row {text!r}", line)
    return cls(*vals)


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def _block(records) -> bytes:
    return "".join(_format_row(r) + "\n" for r in records).encode("ascii")


def _ordinate(row) -> float:
    return row.gamma if isinstance(row, ZetaRow) else row.gamma_prime


@dataclass(frozen=True)
class ZeroArchive:
    kind: str
    window: tuple[float, float]
    records: tuple
    checksum: int
    format_version: int = FORMAT_VERSION

    def __len__(self):
        return len(self.records)


def validate(archive: ZeroArchive) -> None:
    """Raise InvariantViolation unless the archive is well formed."""
    if archive.kind not in KINDS:
        raise InvariantViolation(f"unknown kind {archive.kind!r}")
    if archive.format_version != FORMAT_VERSION:
        raise InvariantViolation(f"unsupported format version {archive.format_version}")
    lo, hi = archive.window
    if not lo <= hi:
        raise InvariantViolation(f"window ({lo}, {hi}] is reversed")
    cls = _ROW[archive.kind]
    if any(not isinstance(r, cls) for r in archive.records):
        raise InvariantViolation(f"records of a {archive.kind} archive must be {cls.__name__}")
    o = np.array([_ordinate(r) for r in archive.records])
    if o.size:
        if np.any(np.diff(o) < 0):
            k = int(np.flatnonzero(np.diff(o) < 0)[0])
            raise InvariantViolation(f"records not sorted by ordinate at position {k + 1}")
        if o[0] <= lo or o[-1] > hi:
            raise InvariantViolation(f"ordinates [{o[0]}, {o[-1]}] outside the window ({lo}, {hi}]")
    if archive.kind == "zeta" and len(archive.records) > 1:
        idx = np.array([r.index for r in archive.records])
        if np.any(np.diff(idx) != 1):
            raise InvariantViolation("zeta indices must increase by one")
        if np.any(np.diff(o) <= 0):
            raise InvariantViolation("zeta ordinates must be strictly increasing")
    if fnv1a64(_block(archive.records)) != archive.checksum:
        raise IntegrityError("checksum does not match records")


def make_archive(kind: str, window, records) -> ZeroArchive:
    """Archive with records canonicalized to their stored precision and a fresh checksum."""
    if kind not in KINDS:
        raise InvariantViolation(f"unknown kind {kind!r}")
    cls = _ROW[kind]
    rows = tuple(_parse_row(kind, _format_row(cls(*r)), 0) for r in records)
    lo, hi = (float(f"{window[0]:.12f}"), float(f"{window[1]:.12f}"))
    arc = ZeroArchive(kind, (lo, hi), rows, fnv1a64(_block(rows)))
    validate(arc)
    return arc


def save_archive(archive: ZeroArchive, path) -> None:
    """Write atomically (temporary file in the same directory, then rename)."""
    validate(archive)
    path = os.fspath(path)
    lo, hi = archive.window
    text = f"format,{archive.format_version},{archive.kind},{lo:.12f},{hi:.12f}\n"
    text += _block(archive.records).decode("ascii")
    text += f"checksum,{archive.checksum:016x}\n"
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_archive(path) -> ZeroArchive:
    with open(path, encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ArchiveParseError("empty file (missing header)", 1)
    head = lines[0].split(",")
    if len(head) != 5 or head[0] != "format":
        raise ArchiveParseError("header must be format,<version>,<kind>,<t_lo>,<t_hi>", 1)
    try:
        version = int(head[1])
        lo, hi = float(head[3]), float(head[4])
    except ValueError as e:
        raise ArchiveParseError("bad number in header", 1) from e
    kind = head[2]
    if kind not in KINDS:
        raise ArchiveParseError(f"unknown kind {kind!r}", 1)
    if version != FORMAT_VERSION:
        raise ArchiveParseError(f"unsupported format version {version}", 1)
    body = lines[1:]
    checksum = None
    if body and body[-1].startswith("checksum,"):
        try:
            checksum = int(body[-1].split(",", 1)[1], 16)
        except ValueError as e:
            raise ArchiveParseError("bad checksum line", len(lines)) from e
        body = body[:-1]
    rows = []
    for k, text in enumerate(body, start=2):
        if text.startswith("checksum,"):
            raise ArchiveParseError("checksum line before end of records", k)
        rows.append(_parse_row(kind, text, k))
    rows = tuple(rows)
    actual = fnv1a64(_block(rows))
    if checksum is None:
        if rows:
            raise IntegrityError("checksum line missing")
        checksum = actual
    if actual != checksum:
        raise IntegrityError(f"checksum {checksum:016x} does not match content ({actual:016x})")
    arc = ZeroArchive(kind, (lo, hi), rows, checksum, version)
    validate(arc)
    return arc


# conversions between archives and domain objects


def zeta_archive(zeros, window) -> ZeroArchive:
    return make_archive("zeta", window, [(z.index, z.gamma) for z in zeros])


def zprime_archive(zprimes, window) -> ZeroArchive:
    return make_archive("zeta_prime", window, [(z.beta_prime, z.gamma_prime, z.newton_residual) for z in zprimes])


def pairing_archive(pairings, window) -> ZeroArchive:
    rows = [
        (p.zprime.beta_prime, p.zprime.gamma_prime, p.rho_c_gamma, p.dist, p.gap_down, p.gap_up, p.log_T)
        for p in pairings
    ]
    return make_archive("pairing", window, rows)


def to_zeta_zeros(archive: ZeroArchive) -> list[ZetaZero]:
    """ZetaZero list; the refinement residual is not archived and comes back as nan."""
    return [ZetaZero(r.gamma, r.index, math.nan) for r in archive.records]


def to_zprime_zeros(archive: ZeroArchive) -> list[ZPrimeZero]:
    return [ZPrimeZero(r.beta_prime, r.gamma_prime, r.newton_residual, -1) for r in archive.records]


def to_pairings(archive: ZeroArchive) -> list[PairingRecord]:
    out = []
    for r in archive.records:
        zp = ZPrimeZero(r.beta_prime, r.gamma_prime, math.nan, -1)
        out.append(PairingRecord(zp, r.gamma_c, r.dist, r.gap_up, r.gap_down, min(r.gap_up, r.gap_down), r.log_T))
    return out


def merge_archives(a: ZeroArchive, b: ZeroArchive) -> ZeroArchive:
    """Concatenate archives over adjacent windows (a_lo, m] and (m, b_hi]."""
    if a.kind != b.kind:
        raise InvariantViolation(f"cannot merge {a.kind} with {b.kind}")
    if a.window[1] != b.window[0]:
        raise InvariantViolation(f"windows {a.window} and {b.window} are not adjacent")
    return make_archive(a.kind, (a.window[0], b.window[1]), a.records + b.records)


def _first_index(g0: float) -> int:
    """Index of the first external ordinate, from N just below it."""
    if g0 < 14.0:
        return 1
    for off in (1e-4, 3e-4, 1e-3, 3e-3):
        try:
            return count_zeros(g0 - off) + 1
        except NearZeroError:
            continue
    raise NearZeroError(f"cannot count zeros just below {g0}")


def ingest_external(path, format: str = "plain_gamma_lines", infer_index: bool = True) -> ZeroArchive:
    """Read one decimal ordinate per line (blank lines and # comments ignored) into a zeta archive."""
    if format != "plain_gamma_lines":
        raise DomainError(f"unsupported external format {format!r}")
    vals, prev = [], None
    with open(path, encoding="utf-8") as fh:
        for k, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                v = float(text)
            except ValueError as e:
                raise ArchiveParseError(f"not a number: {text!r}", k) from e
            if not math.isfinite(v):
                raise ArchiveParseError(f"non-finite ordinate {text!r}", k)
            if prev is not None and v <= prev:
                raise NonMonotoneError(f"ordinate {v} does not exceed the previous {prev}", k)
            vals.append(v)
            prev = v
    if not vals:
        return make_archive("zeta", (0.0, 0.0), [])
    i0 = _first_index(vals[0]) if infer_index else 1
    lo = math.floor(vals[0])
    lo = lo if lo < vals[0] else lo - 1.0
    return make_archive("zeta", (lo, vals[-1]), [(i0 + k, v) for k, v in enumerate(vals)])


def crosscheck(external: ZeroArchive, local_zeros) -> dict:
    """Compare external ordinates with locally computed ones over their common range."""
    ext = np.array([r.gamma for r in external.records])
    loc = ordinates(local_zeros)
    if ext.size == 0 or loc.size == 0:
        return {"overlap": None, "compared": 0, "max_deviation": 0.0, "count_external": int(ext.size), "count_local": int(loc.size)}
    lo, hi = max(ext[0], loc[0]), min(ext[-1], loc[-1])
    # external tables carry fewer digits, so widen the overlap by far less than a gap
    tol = 1e-3
    e = ext[(ext >= lo - tol) & (ext <= hi + tol)]
    l_ = loc[(loc >= lo - tol) & (loc <= hi + tol)]
    if e.size != l_.size:
        raise CoverageError(f"overlap [{lo}, {hi}] holds {e.size} external but {l_.size} local ordinates")
    dev = float(np.max(np.abs(e - l_))) if e.size else 0.0
    idx = [r.index for r in external.records if lo - tol <= r.gamma <= hi + tol]
    index_ok = True
    if isinstance(local_zeros, list) and local_zeros and isinstance(local_zeros[0], ZetaZero):
        li = [z.index for z in local_zeros if lo - tol <= z.gamma <= hi + tol]
        index_ok = li == idx
    return {
        "overlap": [float(lo), float(hi)],
        "compared": int(e.size),
        "max_deviation": dev,
        "indices_agree": bool(index_ok),
        "count_external": int(ext.size),
        "count_local": int(loc.size),
    }
