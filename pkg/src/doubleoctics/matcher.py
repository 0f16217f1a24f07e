"""Compare point counts against newform coefficients: a_p = 1 - #X_p (mod p)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fieldcore import NUM_PRIMES, PRIMES
from .newforms import NewformRecord, twist

DEFAULT_THRESHOLD = 21


@dataclass(frozen=True)
class MatchResult:
    octic: tuple[int, ...]
    label: str
    level: int
    twist: int
    agree_count: int
    disagreeing: tuple[int, ...]


def agrees_at(a_p: int, count: int, p: int) -> bool:
    return (a_p - 1 + count) % p == 0


def agreements(counts: Sequence[int], record: NewformRecord) -> tuple[int, list[int]]:
    bad = [p for p, a, c in zip(PRIMES, record.coeffs, counts) if not agrees_at(a, c, p)]
    return NUM_PRIMES - len(bad), bad


def check_threshold(threshold: int) -> int:
    if not 1 <= threshold <= NUM_PRIMES:
        raise ValueError(f"threshold must lie in 1..{NUM_PRIMES}, got {threshold}")
    return threshold


def best_matches(
    counts: Sequence[int],
    table: Sequence[NewformRecord],
    twists: Sequence[int] = (1,),
    threshold: int = DEFAULT_THRESHOLD,
    octic: Sequence[int] = (),
) -> list[MatchResult]:
    """All (record, twist) pairs agreeing at >= threshold primes, sorted by
    agreement (desc), level, |d|, then label and d for a total order."""
    check_threshold(threshold)
    out = []
    for rec in table:
        for d in twists:
            n, bad = agreements(counts, twist(rec, d))
            if n >= threshold:
                out.append(MatchResult(tuple(octic), rec.label, rec.level, d, n, tuple(bad)))
    out.sort(key=lambda r: (-r.agree_count, r.level, abs(r.twist), r.label, r.twist))
    return out


def target_residues(table: Sequence[NewformRecord], twists: Sequence[int]) -> np.ndarray:
    """Row per (record, twist) pair in table-major order: the residue
    (1 - chi_d(p) a_p) mod p that #X_p must hit at each prime."""
    rows = []
    for rec in table:
        for d in twists:
            tw = twist(rec, d)
            rows.append([(1 - a) % p for p, a in zip(PRIMES, tw.coeffs)])
    return np.array(rows, dtype=np.int64).reshape(-1, NUM_PRIMES)


def synthetic_record(counts: Sequence[int], label: str = "1/synthetic") -> NewformRecord:
    """A record matching the given counts at every prime, with a_p the
    least absolute residue of 1 - #X_p."""
    coeffs = []
    for p, c in zip(PRIMES, counts):
        r = (1 - c) % p
        coeffs.append(r - p if r > p // 2 else r)
    level = int(label.split("/", 1)[0])
    return NewformRecord(level, label, tuple(coeffs))
