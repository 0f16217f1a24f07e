"""Exact integer polynomials in four variables, stored as {exponents: coeff}."""
from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Mapping, Sequence

Exp = tuple[int, int, int, int]

# generators of S4 acting on variable positions
_TRANSPOSITION = (1, 0, 2, 3)
_FOUR_CYCLE = (1, 2, 3, 0)


class SymPoly:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Exp, int] | None = None):
        self.terms: dict[Exp, int] = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def var(cls, i: int) -> "SymPoly":
        e = [0, 0, 0, 0]
        e[i] = 1
        return cls({tuple(e): 1})

    @classmethod
    def const(cls, c: int) -> "SymPoly":
        return cls({(0, 0, 0, 0): c})

    @classmethod
    def linear(cls, row: Sequence[int]) -> "SymPoly":
        return cls({tuple(int(i == j) for j in range(4)): int(c) for i, c in enumerate(row)})

    def __repr__(self) -> str:
        return f"SymPoly({len(self.terms)} terms, degree {self.degree})"

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = SymPoly.const(other)
        return isinstance(other, SymPoly) and self.terms == other.terms

    __hash__ = None

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def __add__(self, other: "SymPoly") -> "SymPoly":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return SymPoly(out)

    def __neg__(self) -> "SymPoly":
        return SymPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "SymPoly") -> "SymPoly":
        return self + (-other)

    def scale(self, c: int) -> "SymPoly":
        return SymPoly({k: c * v for k, v in self.terms.items()})

    def __mul__(self, other) -> "SymPoly":
        if isinstance(other, int):
            return self.scale(other)
        out: dict[Exp, int] = {}
        for (a0, a1, a2, a3), u in self.terms.items():
            for (b0, b1, b2, b3), w in other.terms.items():
                k = (a0 + b0, a1 + b1, a2 + b2, a3 + b3)
                out[k] = out.get(k, 0) + u * w
        return SymPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "SymPoly":
        result = SymPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def permuted(self, perm: Sequence[int]) -> "SymPoly":
        """Rename variable i to variable perm[i]."""
        out = {}
        for e, c in self.terms.items():
            k = [0, 0, 0, 0]
            for i, a in enumerate(e):
                k[perm[i]] = a
            out[tuple(k)] = c
        return SymPoly(out)

    def is_symmetric(self) -> bool:
        return self == self.permuted(_TRANSPOSITION) and self == self.permuted(_FOUR_CYCLE)

    def substitute(self, images: Sequence["SymPoly"]) -> "SymPoly":
        """Replace variable i by images[i]."""
        cache: list[dict[int, SymPoly]] = [{0: SymPoly.const(1)} for _ in range(4)]

        def power(i: int, n: int) -> SymPoly:
            if n not in cache[i]:
                cache[i][n] = power(i, n - 1) * images[i]
            return cache[i][n]

        out = SymPoly()
        for e, c in self.terms.items():
            term = SymPoly.const(c)
            for i, a in enumerate(e):
                if a:
                    term = term * power(i, a)
            out = out + term
        return out

    def monomial_map(self, images: Sequence[Exp]) -> "SymPoly":
        """Substitute variable i by the monomial with exponent vector images[i]."""
        out: dict[Exp, int] = {}
        for e, c in self.terms.items():
            k = tuple(sum(a * img[j] for a, img in zip(e, images)) for j in range(4))
            out[k] = out.get(k, 0) + c
        return SymPoly(out)

    def evaluate(self, point: Sequence):
        total = 0
        for e, c in self.terms.items():
            term = c
            for x, a in zip(point, e):
                term *= x**a
            total += term
        return total


def elementary(vars_: Sequence[SymPoly]) -> tuple[SymPoly, SymPoly, SymPoly, SymPoly]:
    """e1..e4 of four polynomials."""
    out = []
    for k in range(1, 5):
        acc = SymPoly()
        for combo in itertools.combinations(vars_, k):
            term = SymPoly.const(1)
            for f in combo:
                term = term * f
            acc = acc + term
        out.append(acc)
    return tuple(out)


@lru_cache(maxsize=None)
def elementary_xyzt() -> tuple[SymPoly, SymPoly, SymPoly, SymPoly]:
    return elementary([SymPoly.var(i) for i in range(4)])


def monomials(degree: int) -> list[Exp]:
    """Exponent vectors of total degree ``degree`` in lexicographic order (descending)."""
    out = []
    for a in range(degree, -1, -1):
        for b in range(degree - a, -1, -1):
            for c in range(degree - a - b, -1, -1):
                out.append((a, b, c, degree - a - b - c))
    return out

