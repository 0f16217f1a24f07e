"""Correspondence machines between S4-symmetric double octics.

Closed-form machines act linearly on coefficient vectors:

* :func:`segre`        (x:y:z:t) -> (x^2:y^2:z^2:t^2), on BRUCH vectors
* :func:`inversion`    (x:y:z:t) -> (yzt:xzt:xyt:xyz), on BRUCWEGA vectors
* :func:`sign_change`  (x:y:z:t) -> (x:y:z:-t), on the three-parameter BRUCH family

Substitution machines go through exact polynomial arithmetic:

* :func:`coordinate_change`    x_i -> e1 + lam * x_i, via the images of e1..e4
* :func:`linear_substitution`  any invertible integer 4x4 matrix, expanded in
  x, y, z, t and decomposed back onto the letter basis

Substitution results are rescaled by a rational *square* only, so that
``f(Mx) = scale * f_out(x)`` with ``scale`` a perfect square and the double
covers u^2 = f(Mx) and u^2 = f_out(x) have equal point counts wherever M is
invertible mod p.  ``normalize="primitive"`` instead returns the primitive
vector with positive leading coefficient.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .octic import BRUCH, BRUCWEGA, LETTER_EXPONENTS, LETTER_INDEX, LETTERS, NUM_LETTERS, Coeffs
from .sympoly import SymPoly, elementary, elementary_xyzt, monomials

# marker L1 uses lam = -2; L2 and L3 use lam = -1
MARKER_LAMBDAS = {"L1": -2, "L2": -1, "L3": -1}

X_MATRIX = ((1, 1, 0, 0), (1, -1, 0, 0), (0, 0, 1, 1), (0, 0, 1, -1))

_E_INDEX = {ex: i for i, ex in enumerate(LETTER_EXPONENTS)}


class DomainError(ValueError):
    """Coefficient vector outside the domain of a correspondence."""


class NotSymmetricError(ValueError):
    pass


def _vec(**kw: int) -> Coeffs:
    out = [0] * NUM_LETTERS
    for k, v in kw.items():
        out[LETTER_INDEX[k.upper()]] = v
    return tuple(out)


SEGRE_ROWS: dict[str, Coeffs] = {
    "B": _vec(b=1),
    "R": _vec(u=4, c=-2, w=-2, e=1),
    "U": _vec(b=4, r=-8, u=4, e=4, g=-4, a=1),
    "C": _vec(u=8, c=-8, h=2, g=-8, s=8, t=-2, a=4, d=-4, i=1),
    "H": _vec(a=16, d=-32, i=24, o=-8, n=1),
}


def _require_support(v: Sequence[int], allowed: str, name: str) -> None:
    extra = [LETTERS[i] for i, c in enumerate(v) if c and LETTERS[i] not in allowed]
    if extra:
        raise DomainError(f"{name} needs support in {allowed}; got nonzero {''.join(extra)}")


# --- dense polynomial side -------------------------------------------------

@lru_cache(maxsize=None)
def letter_poly(letter: str) -> SymPoly:
    e = elementary_xyzt()
    out = SymPoly.const(1)
    for base, k in zip(e, LETTER_EXPONENTS[LETTER_INDEX[letter.upper()]]):
        if k:
            out = out * base**k
    return out


def octic_poly(v: Sequence[int]) -> SymPoly:
    out = SymPoly()
    for letter, c in zip(LETTERS, v):
        if c:
            out = out + letter_poly(letter).scale(int(c))
    return out


def _partition_monomials() -> list[tuple[int, int, int, int]]:
    return [m for m in monomials(8) if list(m) == sorted(m, reverse=True)]


@lru_cache(maxsize=None)
def basis_matrix() -> tuple[tuple[int, ...], ...]:
    """165 x 15 matrix: coefficient of each degree-8 monomial in each letter."""
    rows = monomials(8)
    polys = [letter_poly(ch) for ch in LETTERS]
    return tuple(tuple(f.terms.get(m, 0) for f in polys) for m in rows)


@lru_cache(maxsize=None)
def _solver() -> tuple[tuple[Fraction, ...], ...]:
    """Inverse of the letter basis restricted to the 15 partition monomials,
    after confirming the full 165 x 15 matrix has rank 15."""
    import sympy

    full = sympy.Matrix(basis_matrix())
    if full.rank() != NUM_LETTERS:
        raise RuntimeError("letter polynomials are not linearly independent")
    polys = [letter_poly(ch) for ch in LETTERS]
    square = sympy.Matrix([[f.terms.get(m, 0) for f in polys] for m in _partition_monomials()])
    inv = square.inv()
    return tuple(
        tuple(Fraction(int(inv[i, j].p), int(inv[i, j].q)) for j in range(NUM_LETTERS))
        for i in range(NUM_LETTERS)
    )


def decompose(poly: SymPoly) -> tuple[Fraction, ...]:
    """Coefficients of a symmetric octic in the letter basis (exact)."""
    if poly.terms and (not poly.is_homogeneous() or poly.degree != 8):
        raise NotSymmetricError("input is not a homogeneous octic")
    if not poly.is_symmetric():
        raise NotSymmetricError("input is not S4-symmetric")
    rhs = [poly.terms.get(m, 0) for m in _partition_monomials()]
    coeffs = tuple(sum(a * b for a, b in zip(row, rhs)) for row in _solver())
    denom = math.lcm(*(c.denominator for c in coeffs))
    check = octic_poly([int(c * denom) for c in coeffs])
    if check != poly.scale(denom):
        raise NotSymmetricError("input lies outside the span of the letter basis")
    return coeffs


def substitute_octic(v: Sequence[int], matrix: Sequence[Sequence[int]]) -> SymPoly:
    """f_v(M x): coordinate i is replaced by sum_j M[i][j] x_j."""
    images = [SymPoly.linear(row) for row in matrix]
    e = elementary(images)
    out = SymPoly()
    for letter, c in zip(LETTERS, v):
        if not c:
            continue
        term = SymPoly.const(int(c))
        for base, k in zip(e, LETTER_EXPONENTS[LETTER_INDEX[letter]]):
            if k:
                term = term * base**k
        out = out + term
    return out


# --- normalization ---------------------------------------------------------

def _squarefree_part(n: int) -> int:
    from sympy import factorint

    out = 1
    for prime, k in factorint(n).items():
        if k % 2:
            out *= prime
    return out


def normalize_coeffs(coeffs: Sequence[Fraction], mode: str = "square") -> tuple[Coeffs, Fraction]:
    """Return (w, scale) with coeffs = scale * w and w integral.

    ``square``: scale is a positive rational square (w keeps the sign pattern
    and carries the squarefree part of the content).
    ``primitive``: w is primitive with first nonzero entry positive."""
    coeffs = [Fraction(c) for c in coeffs]
    if not any(coeffs):
        raise ValueError("cannot normalize the zero vector")
    denom = math.lcm(*(c.denominator for c in coeffs))
    ints = [int(c * denom) for c in coeffs]
    g = math.gcd(*ints)
    prim = [c // g for c in ints]
    content = Fraction(g, denom)
    if mode == "primitive":
        sign = 1 if next(c for c in prim if c) > 0 else -1
        return tuple(sign * c for c in prim), content * sign
    if mode != "square":
        raise ValueError(f"unknown normalization {mode!r}")
    sf = _squarefree_part(content.numerator) * _squarefree_part(content.denominator)
    return tuple(sf * c for c in prim), content / sf


# --- machines --------------------------------------------------------------

def _check_lambda(lam: int) -> None:
    if lam in (0, -4):
        raise ValueError(f"degenerate coordinate change: lambda = {lam}")


@lru_cache(maxsize=None)
def _e_images(lam: int) -> tuple[SymPoly, SymPoly, SymPoly, SymPoly]:
    # variables 0..3 stand for e1..e4 here
    e1, e2, e3, e4 = (SymPoly.var(i) for i in range(4))
    return (
        e1.scale(4 + lam),
        e2.scale(lam**2) + (e1 * e1).scale(3 * (2 + lam)),
        e3.scale(lam**3) + (e2 * e1).scale(2 * lam**2) + (e1**3).scale(4 + 3 * lam),
        e4.scale(lam**4) + (e3 * e1).scale(lam**3) + (e2 * e1**2).scale(lam**2)
        + (e1**4).scale(1 + lam),
    )


def coordinate_change_raw(v: Sequence[int], lam: int) -> Coeffs:
    """Exact letter coefficients of f(e1 + lam*x, ..., e1 + lam*t)."""
    _check_lambda(lam)
    f = SymPoly({LETTER_EXPONENTS[i]: int(c) for i, c in enumerate(v) if c})
    image = f.substitute(_e_images(lam))
    out = [0] * NUM_LETTERS
    for ex, c in image.terms.items():
        out[_E_INDEX[ex]] = c
    return tuple(out)


def coordinate_change(v: Sequence[int], lam: int, normalize: str = "square") -> Coeffs:
    return normalize_coeffs(coordinate_change_raw(v, lam), normalize)[0]


def coordinate_change_matrix(lam: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(1 + lam * (i == j) for j in range(4)) for i in range(4))


def segre(v: Sequence[int]) -> Coeffs:
    _require_support(v, BRUCH, "segre")
    out = [0] * NUM_LETTERS
    for letter, row in SEGRE_ROWS.items():
        c = v[LETTER_INDEX[letter]]
        if c:
            for j, r in enumerate(row):
                out[j] += c * r
    return tuple(out)


def inversion(v: Sequence[int]) -> Coeffs:
    _require_support(v, BRUCWEGA, "inversion")
    out = list(v)
    ic, iw = LETTER_INDEX["C"], LETTER_INDEX["W"]
    out[ic], out[iw] = v[iw], v[ic]
    return tuple(out)


def in_sign_change_family(v: Sequence[int]) -> bool:
    try:
        _check_sign_family(v)
    except DomainError:
        return False
    return True


def _check_sign_family(v: Sequence[int]) -> None:
    _require_support(v, BRUCH, "sign_change")
    _, r, u, c, h = v[:5]
    if 2 * c != -r - 2 * u:
        raise DomainError("sign_change needs c = -r/2 - u")
    if 8 * h != r + 2 * u:
        raise DomainError("sign_change needs h = r/8 + u/4")


def sign_change(v: Sequence[int]) -> Coeffs:
    """Coefficient map b -> -(b + 2r) on the family
    alpha*B + 2beta*R + (4gamma - beta)*U - 4gamma*C + gamma*H."""
    _check_sign_family(v)
    out = list(v)
    out[0] = -(v[0] + 2 * v[1])
    return tuple(out)


def _det(m: Sequence[Sequence[int]]) -> int:
    import sympy

    return int(sympy.Matrix(m).det())


def linear_substitution_raw(v: Sequence[int], matrix: Sequence[Sequence[int]]) -> tuple[Fraction, ...] | None:
    if _det(matrix) == 0:
        raise ValueError("singular substitution matrix")
    try:
        return decompose(substitute_octic(v, matrix))
    except NotSymmetricError:
        return None


def linear_substitution(v: Sequence[int], matrix: Sequence[Sequence[int]],
                        normalize: str = "square") -> Coeffs | None:
    """Pull back by an integer matrix; None when the image is not S4-symmetric."""
    raw = linear_substitution_raw(v, matrix)
    if raw is None:
        return None
    return normalize_coeffs(raw, normalize)[0]


def segre_dense_check(v: Sequence[int]) -> bool:
    """f_v(x^2, y^2, z^2, t^2) == e4^2 * f_segre(v)."""
    squares = [tuple(2 * (i == j) for j in range(4)) for i in range(4)]
    lhs = octic_poly(v).monomial_map(squares)
    e4 = elementary_xyzt()[3]
    return lhs == e4 * e4 * octic_poly(segre(v))


def inversion_dense_check(v: Sequence[int]) -> bool:
    """f_v(yzt, xzt, xyt, xyz) == e4^4 * f_inversion(v)."""
    cofactors = [tuple(int(i != j) for j in range(4)) for i in range(4)]
    lhs = octic_poly(v).monomial_map(cofactors)
    return lhs == elementary_xyzt()[3] ** 4 * octic_poly(inversion(v))


TRANSFORMS = ("segre", "invert", "signchange", "coordchange", "linear")
