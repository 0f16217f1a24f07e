import numpy as np
import pytest
from hypothesis import given, strategies as st

from doubleoctics.fieldcore import PRIMES
from doubleoctics.newforms import (
    LEVEL6_ETA,
    LEVEL8_ETA,
    NewformRecord,
    NewformTableError,
    default_twists,
    eta_level,
    eta_product_series,
    eta_record,
    format_table,
    is_fundamental_discriminant,
    load_table,
    parse_eta_spec,
    parse_table,
    save_table,
    twist,
)

LEVEL6_AP = (-2, -3, 6, -16, 12, 38, -126, 20, 168, 30, -88, 254, 42, -52, -96, 198,
             -660, -538, 884, 792, 218, -520, -492, 810, 1154)
LEVEL8_AP = (0, -4, -2, 24, -44, 22, 50, 44, -56, 198, -160, -162, -198, 52, 528, -242,
             -668, 550, 188, 728, 154, -656, 236, 714, -478)


def _eta_oracle(spec, prec):
    """Pentagonal-number expansion of each eta factor, multiplied with numpy."""
    def eta_q(m):
        s = np.zeros(prec, dtype=object)
        k = 0
        while True:
            hits = False
            for kk in ((k, -k) if k else (0,)):
                n = m * (kk * (3 * kk - 1) // 2)
                if n < prec:
                    s[n] += (-1) ** abs(kk)
                    hits = True
            if not hits:
                break
            k += 1
        return s

    def mul(a, b):
        return np.convolve(a, b)[:prec]

    out = np.zeros(prec, dtype=object)
    out[0] = 1
    for m, e in spec:
        f = eta_q(m)
        for _ in range(e):
            out = mul(out, f)
    shift = sum(m * e for m, e in spec) // 24
    return [0] * shift + list(out[:prec - shift])


def test_eta_known_coefficients():
    assert eta_record(LEVEL6_ETA).coeffs == LEVEL6_AP
    assert eta_record(LEVEL8_ETA).coeffs == LEVEL8_AP
    assert eta_record(LEVEL6_ETA).label == "6/eta"
    assert eta_record(LEVEL8_ETA).level == 8


@pytest.mark.parametrize("spec", [LEVEL6_ETA, LEVEL8_ETA])
def test_eta_series_matches_pentagonal_oracle(spec):
    assert eta_product_series(spec, 98) == _eta_oracle(spec, 98)


def test_eta_series_multiplicative():
    c = eta_product_series(LEVEL8_ETA, 98)
    assert c[1] == 1
    assert c[15] == c[3] * c[5] and c[21] == c[3] * c[7]
    # a_{p^2} = a_p^2 - p^3 at good p
    assert c[9] == c[3] ** 2 - 27 and c[25] == c[5] ** 2 - 125


def test_eta_spec_parsing_and_errors():
    assert parse_eta_spec("2:4, 4:4") == [(2, 4), (4, 4)]
    assert eta_level([(2, 4), (4, 4)]) == 8
    assert eta_level(LEVEL6_ETA) == 6
    with pytest.raises(ValueError):
        parse_eta_spec("2-4")
    with pytest.raises(ValueError):
        eta_product_series([(1, 4)])
    with pytest.raises(ValueError):
        eta_product_series([(1, 3), (2, 5)])
    with pytest.raises(ValueError):
        eta_product_series([(1, 4), (2, 2), (5, 2)])


def test_table_roundtrip(tmp_path):
    recs = [eta_record(LEVEL6_ETA, "6/a"), NewformRecord(5, "5/b", tuple(range(25)))]
    path = tmp_path / "forms.txt"
    save_table(recs, path)
    assert load_table(path) == recs
    text = "# header\n\n" + format_table(recs) + "   # trailing\n"
    assert parse_table(text) == recs
    assert parse_table("") == []


@pytest.mark.parametrize("text, needle", [
    ("6/a " + " ".join(["0"] * 24), "t:1:"),
    ("x/a " + " ".join(["0"] * 25), "level"),
    ("6/a " + " ".join(["0"] * 24) + " z", "non-integer"),
    ("6/a 100 " + " ".join(["0"] * 24), "Hasse"),
    ("\n".join(["6/a " + " ".join(["0"] * 25)] * 2), "duplicate"),
])
def test_parse_errors(text, needle):
    with pytest.raises(NewformTableError, match=needle):
        parse_table(text, "t")


def test_parse_error_reports_line():
    with pytest.raises(NewformTableError, match=r"t:3:"):
        parse_table("# a\n\n6/a 1 2\n", "t")


def test_hasse_bound_on_eta_forms():
    for rec in (eta_record(LEVEL6_ETA), eta_record(LEVEL8_ETA)):
        assert rec.hasse_violations() == []


def test_default_twists():
    assert default_twists() == [1, -1, -3, -4, 5, -7, -8, 8, -11, 12, 13, -15, 17,
                                -19, -20, 21, -23, -24, 24]
    assert all(is_fundamental_discriminant(d) for d in default_twists()[2:])
    assert not any(is_fundamental_discriminant(d) for d in (0, 1, -1, 4, 9, -16, 2, 3))


def test_twist_minus_four_flips_three_mod_four():
    rec = eta_record(LEVEL6_ETA)
    tw = twist(rec, -4)
    assert tw.label == "6/eta@-4"
    for p, a, b in zip(PRIMES, rec.coeffs, tw.coeffs):
        if p == 2:
            assert b == 0
        elif p % 4 == 3:
            assert b == -a
        else:
            assert b == a


@given(st.lists(st.integers(-500, 500), min_size=25, max_size=25),
       st.sampled_from(default_twists()[2:]))
def test_twist_involution(coeffs, d):
    rec = NewformRecord(1, "1/x", tuple(coeffs))
    assert twist(rec, 1) is rec
    back = twist(twist(rec, d), d)
    for p, a, b in zip(PRIMES, coeffs, back.coeffs):
        assert b == (0 if d % p == 0 else a)
