import numpy as np
import pytest

from doubleoctics import kernels
from doubleoctics.counting import count_points_naive
from doubleoctics.fieldcore import PRIMES, prime_ctx
from doubleoctics.matcher import target_residues

pytestmark = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not installed")


def _cands(rng, n, bound=40):
    out = np.array([[rng.randint(-bound, bound) for _ in range(15)] for _ in range(n)], dtype=np.int64)
    out[:, 0] += (~out.any(axis=1)).astype(np.int64)
    return out


def test_counts_backends_agree(stack, rng):
    cands = _cands(rng, 64)
    arrays = stack.arrays()
    a = kernels.counts_numba(cands, *arrays)
    b = kernels.counts_numpy(cands, *arrays)
    assert a.shape == (64, 25)
    assert (a == b).all()


def test_counts_match_naive(stack, rng):
    cands = _cands(rng, 3, bound=6)
    got = kernels.counts(cands, stack)
    for row, v in zip(got, cands):
        for i, p in enumerate(PRIMES[:8]):
            assert row[i] == count_points_naive(tuple(v), prime_ctx(p))


@pytest.mark.parametrize("early_abort", [True, False])
def test_scan_backends_agree(stack, eta_forms, rng, early_abort):
    cands = _cands(rng, 200, bound=5)
    targets = target_residues(eta_forms, (1, -1, -4, 8))
    arrays = stack.arrays()
    for max_miss in (0, 4, 10, 25):
        a = kernels.scan_numba(cands, *arrays, targets, max_miss, early_abort)
        b = kernels.scan_numpy(cands, *arrays, targets, max_miss, early_abort)
        assert (a == b).all()


def test_scan_matches_counts(stack, eta_forms, rng):
    cands = _cands(rng, 300, bound=4)
    targets = target_residues(eta_forms, (1, -1, -4))
    c = kernels.counts(cands, stack) % np.array(PRIMES)
    misses = (c[:, None, :] != targets[None, :, :]).sum(axis=2)
    for max_miss in (4, 12):
        expect = (misses <= max_miss).any(axis=1).astype(np.uint8)
        assert (kernels.scan(cands, stack, targets, max_miss, True) == expect).all()
        assert (kernels.scan(cands, stack, targets, max_miss, False) == expect).all()


def test_scan_without_targets(stack):
    cands = np.eye(15, dtype=np.int64)
    empty = np.zeros((0, 25), dtype=np.int64)
    assert not kernels.scan(cands, stack, empty, 4).any()


def test_env_flag_selects_numpy(tmp_path):
    import os
    import subprocess
    import sys

    code = ("from doubleoctics import kernels; from doubleoctics.counting import *; "
            "from doubleoctics.octic import unit; "
            "print(kernels.BACKEND, count_vector(unit('B'), TableStack(build_all_tables()))[:3])")
    env = dict(os.environ, DOUBLEOCTICS_NO_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy (15, 48, 220)"
