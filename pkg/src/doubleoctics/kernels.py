"""Hot loops: aggregated point counts and early-abort congruence scans.

Two interchangeable backends.  The numba one is used when numba imports and
``DOUBLEOCTICS_NO_NUMBA`` is unset (or ``0``); otherwise the pure numpy path
runs.  Both take the same packed arrays and return identical results.

Packed table layout (see ``counting.TableStack``):
    keys     (M, 15) uint8   letter values per aggregate, all primes concatenated
    mults    (M,)    int64   multiplicities
    offsets  (26,)   int64   rows of prime i are offsets[i]:offsets[i+1]
    primes   (25,)   int64
    wtab     (25, 97) int64  solutions of u^2 = r, indexed [prime, residue]
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("DOUBLEOCTICS_NO_NUMBA", "0") in ("", "0")
BACKEND = "numba" if USE_NUMBA else "numpy"

# (n, M) intermediate budget for the numpy path
_NUMPY_BLOCK = 1 << 22


def counts_numpy(cands, keys, mults, offsets, primes, wtab):
    n = cands.shape[0]
    out = np.zeros((n, len(primes)), dtype=np.int64)
    for i, p in enumerate(primes):
        lo, hi = offsets[i], offsets[i + 1]
        k = keys[lo:hi].astype(np.int64)
        m = mults[lo:hi]
        w = wtab[i]
        step = max(1, _NUMPY_BLOCK // max(1, hi - lo))
        for s in range(0, n, step):
            v = cands[s:s + step] % p
            vals = (k @ v.T) % p
            out[s:s + step, i] = m @ w[vals]
    return out


def scan_numpy(cands, keys, mults, offsets, primes, wtab, targets, max_miss, early_abort):
    """Return per-candidate flags: 1 if some (form, twist) row of ``targets``
    misses at most ``max_miss`` primes."""
    n = cands.shape[0]
    nf = targets.shape[0]
    misses = np.zeros((n, nf), dtype=np.int64)
    alive = np.ones(n, dtype=bool) if nf else np.zeros(n, dtype=bool)
    for i, p in enumerate(primes):
        idx = np.nonzero(alive)[0] if early_abort else np.arange(n)
        if idx.size == 0:
            break
        lo, hi = offsets[i], offsets[i + 1]
        k = keys[lo:hi].astype(np.int64)
        m = mults[lo:hi]
        w = wtab[i]
        step = max(1, _NUMPY_BLOCK // max(1, hi - lo))
        for s in range(0, idx.size, step):
            sel = idx[s:s + step]
            v = cands[sel] % p
            r = (m @ w[(k @ v.T) % p]) % p
            misses[sel] += targets[None, :, i] != r[:, None]
        alive = (misses <= max_miss).any(axis=1)
    return alive.astype(np.uint8)


if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _count_one(cv, sup, nsup, keys, mults, lo, hi, p, w):
        total = 0
        for e in range(lo, hi):
            acc = 0
            for j in range(nsup):
                acc += cv[j] * keys[e, sup[j]]
            total += mults[e] * w[acc % p]
        return total

    @numba.njit(cache=True)
    def _prepare(row, p, sup, cv):
        nsup = 0
        for j in range(row.shape[0]):
            c = row[j] % p
            if c < 0:
                c += p
            if c != 0:
                sup[nsup] = j
                cv[nsup] = c
                nsup += 1
        return nsup

    @numba.njit(cache=True)
    def counts_numba(cands, keys, mults, offsets, primes, wtab):
        n = cands.shape[0]
        np_ = primes.shape[0]
        out = np.zeros((n, np_), dtype=np.int64)
        sup = np.empty(cands.shape[1], dtype=np.int64)
        cv = np.empty(cands.shape[1], dtype=np.int64)
        for c in range(n):
            for i in range(np_):
                p = primes[i]
                nsup = _prepare(cands[c], p, sup, cv)
                out[c, i] = _count_one(cv, sup, nsup, keys, mults,
                                       offsets[i], offsets[i + 1], p, wtab[i])
        return out

    @numba.njit(cache=True)
    def scan_numba(cands, keys, mults, offsets, primes, wtab, targets, max_miss, early_abort):
        n = cands.shape[0]
        nf = targets.shape[0]
        np_ = primes.shape[0]
        out = np.zeros(n, dtype=np.uint8)
        sup = np.empty(cands.shape[1], dtype=np.int64)
        cv = np.empty(cands.shape[1], dtype=np.int64)
        misses = np.zeros(nf, dtype=np.int64)
        for c in range(n):
            misses[:] = 0
            alive = nf
            for i in range(np_):
                if early_abort and alive == 0:
                    break
                p = primes[i]
                nsup = _prepare(cands[c], p, sup, cv)
                r = _count_one(cv, sup, nsup, keys, mults,
                               offsets[i], offsets[i + 1], p, wtab[i]) % p
                for f in range(nf):
                    if targets[f, i] != r:
                        misses[f] += 1
                        if misses[f] == max_miss + 1:
                            alive -= 1
            if alive > 0:
                out[c] = 1
        return out

else:  # pragma: no cover
    counts_numba = None
    scan_numba = None


def counts(cands, stack):
    fn = counts_numba if USE_NUMBA else counts_numpy
    return fn(np.ascontiguousarray(cands, dtype=np.int64), *stack.arrays())


def scan(cands, stack, targets, max_miss, early_abort=True):
    fn = scan_numba if USE_NUMBA else scan_numpy
    return fn(np.ascontiguousarray(cands, dtype=np.int64), *stack.arrays(),
              np.ascontiguousarray(targets, dtype=np.int64), int(max_miss), bool(early_abort))
