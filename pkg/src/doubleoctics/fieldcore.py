"""Arithmetic over the 25 small prime fields F_2 ... F_97.

Square classification is table driven: every prime gets a ``PrimeCtx``
holding a flag per residue (0 = zero, 1 = nonzero square, -1 = non-square),
built once and shared read-only.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

import numpy as np

PRIMES: tuple[int, ...] = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41,
    43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
)
NUM_PRIMES = len(PRIMES)


def first_25_primes() -> list[int]:
    return list(PRIMES)


def projective_size(p: int) -> int:
    return p**3 + p**2 + p + 1


@dataclass(frozen=True)
class PrimeCtx:
    p: int
    square_flags: np.ndarray = field(repr=False, compare=False)

    @property
    def index(self) -> int:
        return PRIMES.index(self.p)


@lru_cache(maxsize=None)
def prime_ctx(p: int) -> PrimeCtx:
    """Shared context for one of the 25 supported primes."""
    if p not in PRIMES:
        raise ValueError(f"unsupported prime {p}; only the first 25 primes are handled")
    flags = np.full(p, -1, dtype=np.int8)
    for a in range(1, p):
        flags[a * a % p] = 1
    flags[0] = 0
    flags.setflags(write=False)
    return PrimeCtx(p, flags)


def legendre(a: int, ctx: PrimeCtx) -> int:
    if ctx.p == 2:
        raise ValueError("legendre symbol undefined for p = 2; count solutions directly")
    return int(ctx.square_flags[a % ctx.p])


def kronecker(d: int, p: int) -> int:
    """Kronecker symbol (d/p) for a prime p."""
    if p == 2:
        if d % 2 == 0:
            return 0
        return 1 if d % 8 in (1, 7) else -1
    r = d % p
    if r == 0:
        return 0
    return 1 if pow(r, (p - 1) // 2, p) == 1 else -1


def enum_projective(ctx: PrimeCtx) -> Iterator[tuple[int, int, int, int]]:
    """Yield every point of P^3(F_p) once, in lexicographic order of the
    canonical representative (first nonzero coordinate equal to 1)."""
    p = ctx.p
    for lead in (3, 2, 1, 0):
        head = (0,) * lead + (1,)
        for tail in itertools.product(range(p), repeat=3 - lead):
            yield head + tail


@lru_cache(maxsize=None)
def projective_points(p: int) -> np.ndarray:
    """All canonical points of P^3(F_p) as an (N, 4) int64 array, same order
    as :func:`enum_projective`."""
    blocks = []
    for lead in (3, 2, 1, 0):
        free = 3 - lead
        block = np.zeros((p**free, 4), dtype=np.int64)
        block[:, lead] = 1
        if free:
            block[:, lead + 1:] = np.indices((p,) * free).reshape(free, -1).T
        blocks.append(block)
    pts = np.concatenate(blocks)
    pts.setflags(write=False)
    return pts
