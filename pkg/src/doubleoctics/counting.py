"""Point counts on double octics u^2 = f(x:y:z:t) over F_p.

Two routes: :func:`count_points_naive` evaluates f at every point of
P^3(F_p); :func:`count_points_fast` walks an :class:`AggregateTable`, where
points sharing a letter-value key (under a scheme's equivalence) are merged
and weighted by multiplicity.

A point contributes the number of u in F_p with u^2 = f(P): 1 if f(P) = 0,
2 for a nonzero square, 0 otherwise.  In characteristic 2 squaring is a
bijection, so every point contributes exactly 1 and #X_2 = 15.
"""
from __future__ import annotations

import logging
import os
import struct
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .fieldcore import PRIMES, PrimeCtx, prime_ctx, projective_points, projective_size
from .octic import (
    NUM_LETTERS,
    DegenerateOcticError,
    check_nonzero,
    elem_sym_array,
    keys_from_elem_sym,
    monomial_keys,
)

log = logging.getLogger(__name__)

SCHEMES = ("exact", "mod8", "modsq")
_SCHEME_BYTE = {name: i for i, name in enumerate(SCHEMES)}
DEFAULT_SCHEME = "exact"

MAGIC = b"OCT1"
_HEADER = struct.Struct("<4sHBI")
_ENTRY = np.dtype([("key", "<u2", (NUM_LETTERS,)), ("mult", "<u4")])


@dataclass(frozen=True, eq=False)
class AggregateTable:
    p: int
    scheme: str
    keys: np.ndarray   # (M, 15) uint8
    mults: np.ndarray  # (M,) int64

    def __len__(self) -> int:
        return self.keys.shape[0]

    @property
    def total(self) -> int:
        return int(self.mults.sum())


def solution_weights(p: int) -> np.ndarray:
    """Number of u with u^2 = r, for each residue r."""
    if p == 2:
        return np.ones(2, dtype=np.int64)
    return 1 + prime_ctx(p).square_flags.astype(np.int64)


def _scale_table(p: int, scheme: str) -> np.ndarray:
    """For each nonzero residue r, the multiplier h in the scheme's scalar
    group minimizing h*r mod p (canonical scaling of a key led by r)."""
    if scheme == "mod8":
        group = sorted({pow(c, 8, p) for c in range(1, p)})
    elif scheme == "modsq":
        group = sorted({pow(c, 2, p) for c in range(1, p)})
    else:
        raise ValueError(scheme)
    best = np.zeros(p, dtype=np.int64)
    for r in range(1, p):
        best[r] = min(group, key=lambda h: h * r % p)
    return best


def canonical_keys(keys: np.ndarray, p: int, scheme: str) -> np.ndarray:
    if scheme == "exact":
        return keys
    best = _scale_table(p, scheme)
    lead = (keys != 0).argmax(axis=1)
    first = keys[np.arange(keys.shape[0]), lead].astype(np.int64)
    return (keys.astype(np.int64) * best[first][:, None] % p).astype(np.uint8)


def build_table(ctx: PrimeCtx, scheme: str = DEFAULT_SCHEME) -> AggregateTable:
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
    p = ctx.p
    e = elem_sym_array(projective_points(p), p)
    # equal elementary symmetric values give equal keys, so collapse those first
    code = ((e[:, 3] * p + e[:, 2]) * p + e[:, 1]) * p + e[:, 0]
    ucode, ecount = np.unique(code, return_counts=True)
    ue = np.stack([ucode % p, ucode // p % p, ucode // p**2 % p, ucode // p**3], axis=1)
    keys = canonical_keys(keys_from_elem_sym(ue, p), p, scheme)
    ukeys, inverse = np.unique(keys, axis=0, return_inverse=True)
    mults = np.bincount(inverse.ravel(), weights=ecount, minlength=ukeys.shape[0]).astype(np.int64)
    return AggregateTable(p, scheme, np.ascontiguousarray(ukeys), mults)


def build_all_tables(scheme: str = DEFAULT_SCHEME) -> list[AggregateTable]:
    return [build_table(prime_ctx(p), scheme) for p in PRIMES]


@lru_cache(maxsize=4)
def _all_point_keys(p: int) -> tuple[np.ndarray, np.ndarray]:
    pts = projective_points(p)
    torus = np.all(pts != 0, axis=1)
    return monomial_keys(pts, p), torus


def count_points_naive(v: Sequence[int], ctx: PrimeCtx, torus_only: bool = False) -> int:
    check_nonzero(v)
    p = ctx.p
    keys, torus = _all_point_keys(p)
    if torus_only:
        keys = keys[torus]
    coeffs = np.asarray(v, dtype=np.int64) % p
    vals = keys.astype(np.int64) @ coeffs % p
    return int(solution_weights(p)[vals].sum())


def count_points_fast(v: Sequence[int], table: AggregateTable) -> int:
    check_nonzero(v)
    p = table.p
    coeffs = np.asarray(v, dtype=np.int64) % p
    vals = table.keys.astype(np.int64) @ coeffs % p
    return int(table.mults @ solution_weights(p)[vals])


class TableStack:
    """All 25 tables packed into flat arrays for the kernels."""

    def __init__(self, tables: Sequence[AggregateTable]):
        ps = tuple(t.p for t in tables)
        if ps != PRIMES:
            raise ValueError("tables must cover exactly the first 25 primes, in order")
        schemes = {t.scheme for t in tables}
        if len(schemes) != 1:
            raise ValueError(f"mixed aggregation schemes {sorted(schemes)}")
        self.scheme = schemes.pop()
        self.tables = list(tables)
        self.keys = np.ascontiguousarray(np.concatenate([t.keys for t in tables]))
        self.mults = np.concatenate([t.mults for t in tables]).astype(np.int64)
        self.offsets = np.cumsum([0] + [len(t) for t in tables]).astype(np.int64)
        self.primes = np.array(PRIMES, dtype=np.int64)
        self.wtab = np.zeros((len(PRIMES), max(PRIMES)), dtype=np.int64)
        for i, p in enumerate(PRIMES):
            self.wtab[i, :p] = solution_weights(p)

    def arrays(self):
        return self.keys, self.mults, self.offsets, self.primes, self.wtab

    @property
    def entries(self) -> int:
        return int(self.offsets[-1])


def count_vector(v: Sequence[int], tables) -> tuple[int, ...]:
    """#X_p for all 25 primes via the aggregated tables."""
    check_nonzero(v)
    stack = tables if isinstance(tables, TableStack) else TableStack(tables)
    return tuple(int(c) for c in kernels.counts(np.asarray([v]), stack)[0])


def count_vectors(vs: Iterable[Sequence[int]], stack: TableStack) -> np.ndarray:
    arr = np.asarray(list(vs), dtype=np.int64).reshape(-1, NUM_LETTERS)
    if arr.size and not arr.any(axis=1).all():
        raise DegenerateOcticError("degenerate octic: all coefficients are zero")
    return kernels.counts(arr, stack)


# --- table cache ---------------------------------------------------------

def default_cache_dir() -> Path:
    env = os.environ.get("DOUBLEOCTICS_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "doubleoctics"


def table_path(cache_dir: Path, p: int, scheme: str) -> Path:
    return Path(cache_dir) / f"p{p:02d}_{scheme}.oct"


def save_table(table: AggregateTable, path: Path) -> None:
    path = Path(path)
    entries = np.empty(len(table), dtype=_ENTRY)
    entries["key"] = table.keys
    entries["mult"] = table.mults
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, table.p, _SCHEME_BYTE[table.scheme], len(table)))
        fh.write(entries.tobytes())
    os.replace(tmp, path)


def load_table(path: Path) -> AggregateTable:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, p, scheme_byte, count = _HEADER.unpack(head)
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        if scheme_byte >= len(SCHEMES):
            raise ValueError(f"{path}: unknown scheme byte {scheme_byte}")
        entries = np.fromfile(fh, dtype=_ENTRY, count=count)
    if entries.shape[0] != count:
        raise ValueError(f"{path}: expected {count} entries, found {entries.shape[0]}")
    return AggregateTable(
        int(p), SCHEMES[scheme_byte],
        np.ascontiguousarray(entries["key"].astype(np.uint8)),
        entries["mult"].astype(np.int64),
    )


def load_tables(cache_dir: Path, scheme: str = DEFAULT_SCHEME) -> list[AggregateTable]:
    """Load all 25 cached tables; FileNotFoundError if any is missing."""
    out = []
    for p in PRIMES:
        path = table_path(cache_dir, p, scheme)
        if not path.exists():
            raise FileNotFoundError(path)
        out.append(load_table(path))
    return out


def ensure_tables(cache_dir: Path, scheme: str = DEFAULT_SCHEME) -> tuple[list[AggregateTable], int]:
    """Load cached tables, building and saving any that are missing.

    Returns the tables and how many were newly built."""
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    out, built = [], 0
    for p in PRIMES:
        path = table_path(cache_dir, p, scheme)
        if path.exists():
            out.append(load_table(path))
            continue
        table = build_table(prime_ctx(p), scheme)
        save_table(table, path)
        log.info("built table p=%d scheme=%s entries=%d", p, scheme, len(table))
        out.append(table)
        built += 1
    return out, built


def total_points() -> int:
    return sum(projective_size(p) for p in PRIMES)
