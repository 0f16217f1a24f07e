import pytest
from hypothesis import given, strategies as st

from doubleoctics.counting import count_vector
from doubleoctics.fieldcore import PRIMES, kronecker
from doubleoctics.matcher import (
    agreements,
    agrees_at,
    best_matches,
    check_threshold,
    synthetic_record,
    target_residues,
)
from doubleoctics.newforms import NewformRecord, default_twists, twist
from doubleoctics.octic import as_coeffs, unit

counts_st = st.tuples(*[st.integers(0, 2 * p**3 + 2 * p**2 + 2 * p + 2) for p in PRIMES])


def test_agrees_at():
    assert agrees_at(-2, 15, 2) and agrees_at(0, 15, 2)
    assert not agrees_at(1, 15, 2)
    assert agrees_at(1 - 48, 48, 3) and agrees_at(1 - 48 + 3 * 7, 48, 3)
    assert not agrees_at(-48, 48, 3)


@given(counts_st)
def test_synthetic_record_matches_everywhere(counts):
    rec = synthetic_record(counts)
    assert agreements(counts, rec) == (25, [])
    assert all(abs(a) <= p // 2 for p, a in zip(PRIMES, rec.coeffs))


@given(counts_st)
def test_shifted_record_matches_nowhere(counts):
    rec = synthetic_record(counts)
    shifted = NewformRecord(1, "1/s", tuple(a + 1 for a in rec.coeffs))
    assert agreements(counts, shifted) == (0, list(PRIMES))


@given(counts_st, st.sets(st.sampled_from(PRIMES), max_size=25))
def test_agreement_counts_flipped_primes(counts, flipped):
    rec = synthetic_record(counts)
    moved = NewformRecord(1, "1/m", tuple(a + (1 if p in flipped else 0)
                                          for p, a in zip(PRIMES, rec.coeffs)))
    n, bad = agreements(counts, moved)
    assert n == 25 - len(flipped) and bad == sorted(flipped)


def test_p2_agreement_is_parity():
    counts = count_vector(unit("B"), _stack_cache())
    assert counts[0] == 15
    for a in range(-6, 7):
        rec = NewformRecord(1, "1/x", (a,) + synthetic_record(counts).coeffs[1:])
        assert (agreements(counts, rec)[0] == 25) == (a % 2 == 0)


def test_threshold_monotone_and_sorted(eta_forms):
    counts = count_vector(as_coeffs("r=1"), _stack_cache())
    twists = default_twists()
    prev = None
    for t in range(25, 0, -1):
        got = best_matches(counts, eta_forms, twists, t)
        assert all(m.agree_count >= t for m in got)
        if prev is not None:
            assert set(prev) <= set(got)
        prev = got
    keys = [(-m.agree_count, m.level, abs(m.twist), m.label, m.twist) for m in prev]
    assert keys == sorted(keys)
    assert len(prev) == len(eta_forms) * len(twists)


def test_recovers_pre_twisted_form(eta_forms):
    counts = count_vector(as_coeffs("r=1"), _stack_cache())
    base = synthetic_record(counts, "9/base")
    hidden = NewformRecord(9, "9/hidden", twist(base, -4).coeffs)
    got = best_matches(counts, [hidden], (1, -1, -4), 25)
    # -1 and -4 induce the same character away from 2, and a_2 = 0 after twisting
    assert sorted(m.twist for m in got) == [-4, -1]


def test_r_only_matches_level_eight(eta_forms):
    counts = count_vector(as_coeffs("r=1"), _stack_cache())
    top = best_matches(counts, eta_forms, default_twists(), 21, octic=as_coeffs("r=1"))[0]
    assert (top.level, top.agree_count) == (8, 25)
    assert top.octic == as_coeffs("r=1")


def test_target_residues(eta_forms):
    t = target_residues(eta_forms, (1, -4))
    assert t.shape == (4, 25)
    for row, (rec, d) in zip(t, [(f, d) for f in eta_forms for d in (1, -4)]):
        for i, p in enumerate(PRIMES):
            assert row[i] == (1 - kronecker(d, p) * rec.coeffs[i]) % p


@pytest.mark.parametrize("bad", [0, 26, -1])
def test_threshold_bounds(bad):
    with pytest.raises(ValueError):
        check_threshold(bad)
    with pytest.raises(ValueError):
        best_matches([0] * 25, [], (1,), bad)


_STACK = []


def _stack_cache():
    if not _STACK:
        from doubleoctics.counting import TableStack, build_all_tables
        _STACK.append(TableStack(build_all_tables("exact")))
    return _STACK[0]
