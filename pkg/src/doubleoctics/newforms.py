"""Weight-4 newform records: text tables, quadratic twists, eta products.

Table format, one record per line::

    # comment
    6/1  -2 -3 6 -16 12 38 -126 20 168 ...   (label, then a_2 ... a_97)
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .fieldcore import NUM_PRIMES, PRIMES, kronecker


class NewformTableError(ValueError):
    pass


@dataclass(frozen=True)
class NewformRecord:
    level: int
    label: str
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != NUM_PRIMES:
            raise NewformTableError(
                f"{self.label}: expected {NUM_PRIMES} coefficients, got {len(self.coeffs)}")

    def hasse_violations(self) -> list[int]:
        return [p for p, a in zip(PRIMES, self.coeffs) if a * a > 4 * p**3]


def level_from_label(label: str) -> int:
    head = label.split("/", 1)[0]
    try:
        level = int(head)
    except ValueError:
        raise NewformTableError(f"label {label!r} does not start with a level") from None
    if level <= 0:
        raise NewformTableError(f"label {label!r}: level must be positive")
    return level


def parse_table(text: str, source: str = "<string>") -> list[NewformRecord]:
    records: list[NewformRecord] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        label, rest = fields[0], fields[1:]
        if len(rest) != NUM_PRIMES:
            raise NewformTableError(
                f"{source}:{lineno}: expected {NUM_PRIMES} coefficients after label, got {len(rest)}")
        try:
            coeffs = tuple(int(x) for x in rest)
        except ValueError:
            raise NewformTableError(f"{source}:{lineno}: non-integer coefficient") from None
        try:
            rec = NewformRecord(level_from_label(label), label, coeffs)
        except NewformTableError as exc:
            raise NewformTableError(f"{source}:{lineno}: {exc}") from None
        bad = rec.hasse_violations()
        if bad:
            raise NewformTableError(
                f"{source}:{lineno}: record {label} violates the Hasse bound at p={bad}")
        if label in seen:
            raise NewformTableError(f"{source}:{lineno}: duplicate label {label}")
        seen.add(label)
        records.append(rec)
    return records


def load_table(path) -> list[NewformRecord]:
    path = Path(path)
    return parse_table(path.read_text(encoding="utf-8"), str(path))


def format_table(records: Iterable[NewformRecord]) -> str:
    return "".join(f"{r.label} {' '.join(str(a) for a in r.coeffs)}\n" for r in records)


def save_table(records: Iterable[NewformRecord], path) -> None:
    Path(path).write_text(format_table(records), encoding="utf-8")


def twist(record: NewformRecord, d: int) -> NewformRecord:
    """Twist by the quadratic character of discriminant d: a_p -> (d/p) a_p."""
    if d == 1:
        return record
    coeffs = tuple(kronecker(d, p) * a for p, a in zip(PRIMES, record.coeffs))
    return NewformRecord(record.level, f"{record.label}@{d}", coeffs)


def is_fundamental_discriminant(d: int) -> bool:
    if d in (0, 1):
        return False

    def squarefree(m: int) -> bool:
        m = abs(m)
        return all(m % (k * k) for k in range(2, math.isqrt(m) + 1))

    if d % 4 == 1:
        return squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and squarefree(m)
    return False


def default_twists(bound: int = 24) -> list[int]:
    """+1, -1 and every fundamental discriminant with |d| <= bound, ordered
    by |d| then sign (negative first)."""
    ds = [d for d in range(-bound, bound + 1) if is_fundamental_discriminant(d)]
    return [1, -1] + sorted(ds, key=lambda d: (abs(d), d))


# --- eta products ----------------------------------------------------------

def eta_product_series(spec: Sequence[tuple[int, int]], prec: int = 98) -> list[int]:
    """Coefficients c_0..c_{prec-1} of prod_i eta(m_i tau)^{e_i}.

    Index n holds the coefficient of q^n; the leading q-power is sum m_i e_i / 24.
    """
    spec = [(int(m), int(e)) for m, e in spec]
    if not spec:
        raise ValueError("empty eta product")
    for m, e in spec:
        if m <= 0 or e <= 0 or e % 2:
            raise ValueError(f"bad eta factor ({m}, {e}): need m > 0 and a positive even exponent")
    weight2 = sum(e for _, e in spec)
    if weight2 != 8:
        raise ValueError(f"eta product has weight {weight2 / 2:g}, expected 4")
    shift, rem = divmod(sum(m * e for m, e in spec), 24)
    if rem:
        raise ValueError("non-integral leading q-exponent")
    n_terms = prec - shift
    series = [0] * max(n_terms, 0)
    if n_terms <= 0:
        return [0] * prec
    series[0] = 1
    for m, e in spec:
        for n in range(1, n_terms):
            step = m * n
            if step >= n_terms:
                break
            for _ in range(e):
                # multiply in place by (1 - q^step), high to low
                for k in range(n_terms - 1, step - 1, -1):
                    series[k] -= series[k - step]
    return [0] * shift + series


def eta_product_ap(spec: Sequence[tuple[int, int]], pmax: int = 97) -> tuple[int, ...]:
    coeffs = eta_product_series(spec, pmax + 1)
    return tuple(coeffs[p] for p in PRIMES if p <= pmax)


def parse_eta_spec(text: str) -> list[tuple[int, int]]:
    """``"2:4,4:4"`` -> [(2, 4), (4, 4)]."""
    out = []
    for item in text.split(","):
        m, sep, e = item.strip().partition(":")
        if not sep:
            raise ValueError(f"bad eta factor {item!r}; expected m:exponent")
        out.append((int(m), int(e)))
    return out


def eta_level(spec: Sequence[tuple[int, int]]) -> int:
    """Smallest multiple N of lcm(m_i) with N * sum(e_i / m_i) = 0 mod 24."""
    base = math.lcm(*(m for m, _ in spec))
    total = sum(Fraction(e, m) for m, e in spec)
    n = base
    while (n * total) % 24:
        n += base
    return n


def eta_record(spec: Sequence[tuple[int, int]], label: str | None = None) -> NewformRecord:
    level = eta_level(spec)
    return NewformRecord(level, label or f"{level}/eta", eta_product_ap(spec))


LEVEL6_ETA = ((1, 2), (2, 2), (3, 2), (6, 2))
LEVEL8_ETA = ((2, 4), (4, 4))


def eta_table() -> list[NewformRecord]:
    """The two classic weight-4 eta-product newforms (levels 6 and 8)."""
    return [eta_record(LEVEL6_ETA), eta_record(LEVEL8_ETA)]
