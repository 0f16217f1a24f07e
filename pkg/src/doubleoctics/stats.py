"""Back-of-the-envelope odds of a chance match, in exact integers."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .fieldcore import PRIMES
from .matcher import DEFAULT_THRESHOLD

P_TILDE: tuple[int, ...] = tuple(p - 1 for p in PRIMES)


def power_sums(values: Sequence[int], k: int) -> list[int]:
    return [sum(v**i for v in values) for i in range(k + 1)]


def elem_sym_exact(values: Sequence[int], k: int) -> int:
    """e_k(values) from power sums via Newton's identities."""
    if not 0 <= k <= len(values):
        raise ValueError(f"k must lie in 0..{len(values)}")
    ps = power_sums(values, k)
    e = [1]
    for n in range(1, k + 1):
        acc = sum((-1) ** (i - 1) * e[n - i] * ps[i] for i in range(1, n + 1))
        q, r = divmod(acc, n)
        assert r == 0
        e.append(q)
    return e[k]


def elem_sym_product(values: Sequence[int]) -> list[int]:
    """All e_0..e_n as coefficients of prod (1 + v t)."""
    coeffs = [1]
    for v in values:
        coeffs = [a + v * b for a, b in zip(coeffs + [0], [0] + coeffs)]
    return coeffs


def chance_possibilities(max_misses: int = 25 - DEFAULT_THRESHOLD) -> int:
    """Residue tuples in F_2 x ... x F_97 agreeing with a fixed one in all but
    at most ``max_misses`` positions."""
    return sum(elem_sym_exact(P_TILDE, j) for j in range(max_misses + 1))


def sample_space_size() -> int:
    return math.prod(PRIMES)


def chance_probability() -> Fraction:
    return Fraction(chance_possibilities(), sample_space_size())


def expected_false_positives(n_octics: int, n_forms: int) -> Fraction:
    return n_octics * n_forms * chance_probability()
