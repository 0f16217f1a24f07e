"""The 15-letter basis of S4-symmetric octics.

Each letter is a degree-8 product of elementary symmetric polynomials
e1..e4 in x, y, z, t.  Coefficient vectors are plain tuples of 15 ints in
the fixed order ``BRUCHWEGSTADION``.
"""
from __future__ import annotations

from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .fieldcore import PrimeCtx

LETTERS = "BRUCHWEGSTADION"
NUM_LETTERS = 15
LETTER_INDEX = {ch: i for i, ch in enumerate(LETTERS)}

# exponents of (e1, e2, e3, e4) per letter
LETTER_EXPONENTS: tuple[tuple[int, int, int, int], ...] = (
    (0, 0, 0, 2),  # B  e4^2
    (1, 0, 1, 1),  # R  e4 e3 e1
    (0, 2, 0, 1),  # U  e4 e2^2
    (2, 1, 0, 1),  # C  e4 e2 e1^2
    (4, 0, 0, 1),  # H  e4 e1^4
    (0, 1, 2, 0),  # W  e3^2 e2
    (2, 0, 2, 0),  # E  e3^2 e1^2
    (1, 2, 1, 0),  # G  e3 e2^2 e1
    (3, 1, 1, 0),  # S  e3 e2 e1^3
    (5, 0, 1, 0),  # T  e3 e1^5
    (0, 4, 0, 0),  # A  e2^4
    (2, 3, 0, 0),  # D  e2^3 e1^2
    (4, 2, 0, 0),  # I  e2^2 e1^4
    (6, 1, 0, 0),  # O  e2 e1^6
    (8, 0, 0, 0),  # N  e1^8
)

BRUCH = "BRUCH"
BRUCWEGA = "BRUCWEGA"

# keeps 15 * 2000 * 96 well inside int64 in the kernels
MAX_ABS_COEFF = 2000

Coeffs = tuple[int, ...]
CoeffsLike = Union[Sequence[int], Mapping[str, int], str]


class DegenerateOcticError(ValueError):
    """Raised when the zero vector is used as an octic."""


def parse_coeffs(text: str) -> Coeffs:
    """Parse ``"b=1,r=-2"`` style text; omitted letters are zero."""
    out = [0] * NUM_LETTERS
    text = text.strip()
    if not text:
        return tuple(out)
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        name, sep, value = item.partition("=")
        name = name.strip().upper()
        if not sep or len(name) != 1 or name not in LETTER_INDEX:
            raise ValueError(f"bad coefficient entry {item!r}")
        try:
            out[LETTER_INDEX[name]] += int(value)
        except ValueError:
            raise ValueError(f"bad coefficient value in {item!r}") from None
    return tuple(out)


def format_coeffs(v: Sequence[int]) -> str:
    parts = [f"{LETTERS[i].lower()}={c}" for i, c in enumerate(v) if c]
    return ",".join(parts) if parts else "0"


def as_coeffs(v: CoeffsLike) -> Coeffs:
    """Normalize text, a letter mapping or a 15-sequence into a coefficient tuple."""
    if isinstance(v, str):
        return parse_coeffs(v)
    if isinstance(v, Mapping):
        out = [0] * NUM_LETTERS
        for k, c in v.items():
            out[LETTER_INDEX[k.upper()]] = int(c)
        return tuple(out)
    out = tuple(int(c) for c in v)
    if len(out) != NUM_LETTERS:
        raise ValueError(f"expected {NUM_LETTERS} coefficients, got {len(out)}")
    return out


def unit(letter: str, value: int = 1) -> Coeffs:
    out = [0] * NUM_LETTERS
    out[LETTER_INDEX[letter.upper()]] = value
    return tuple(out)


def support(v: Sequence[int]) -> str:
    return "".join(LETTERS[i] for i, c in enumerate(v) if c)


def psi(v: Sequence[int]) -> int:
    return sum(abs(c) for c in v)


def phi(v: Sequence[int]) -> int:
    return sum(1 for c in v if c)


def check_nonzero(v: Sequence[int]) -> None:
    if not any(v):
        raise DegenerateOcticError("degenerate octic: all coefficients are zero")


def elem_sym(point: Sequence[int], ctx: PrimeCtx) -> tuple[int, int, int, int]:
    x, y, z, t = (int(c) for c in point)
    p = ctx.p
    return (
        (x + y + z + t) % p,
        (x * y + x * z + x * t + y * z + y * t + z * t) % p,
        (x * y * z + x * y * t + x * z * t + y * z * t) % p,
        (x * y * z * t) % p,
    )


def monomial_key(point: Sequence[int], ctx: PrimeCtx) -> tuple[int, ...]:
    e = elem_sym(point, ctx)
    p = ctx.p
    key = []
    for ex in LETTER_EXPONENTS:
        val = 1
        for base, k in zip(e, ex):
            val = val * pow(base, k, p) % p
        key.append(val)
    return tuple(key)


def evaluate_octic(v: Sequence[int], key: Sequence[int], ctx: PrimeCtx) -> int:
    check_nonzero(v)
    return sum(c * k for c, k in zip(v, key)) % ctx.p


def elem_sym_array(points: np.ndarray, p: int) -> np.ndarray:
    """Vectorized elementary symmetric values, shape (N, 4), reduced mod p."""
    x, y, z, t = (points[:, i].astype(np.int64) for i in range(4))
    return np.stack(
        [
            (x + y + z + t) % p,
            (x * y + x * z + x * t + y * z + y * t + z * t) % p,
            (x * y * z + x * y * t + x * z * t + y * z * t) % p,
            (x * y * z * t) % p,
        ],
        axis=1,
    )


def keys_from_elem_sym(e: np.ndarray, p: int) -> np.ndarray:
    """15 letter values per row of elementary symmetric values, as uint8."""
    # power tables: powers[k][r] = r**k mod p
    powers = np.array([[pow(r, k, p) for r in range(p)] for k in range(9)], dtype=np.int64)
    keys = np.ones((e.shape[0], NUM_LETTERS), dtype=np.int64)
    for j, ex in enumerate(LETTER_EXPONENTS):
        col = keys[:, j]
        for i, k in enumerate(ex):
            if k:
                col = col * powers[k][e[:, i]] % p
        keys[:, j] = col
    return keys.astype(np.uint8)


def monomial_keys(points: np.ndarray, p: int) -> np.ndarray:
    return keys_from_elem_sym(elem_sym_array(points, p), p)


def coeff_array(vs: Iterable[Sequence[int]]) -> np.ndarray:
    arr = np.asarray(list(vs), dtype=np.int64)
    return arr.reshape(-1, NUM_LETTERS)
