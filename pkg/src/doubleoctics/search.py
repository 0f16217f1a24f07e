"""Exhaustive search over coefficient vectors bounded by support size (phi)
and L1 norm (psi).

Candidates are produced in a fixed order: support size ascending, supports
in lexicographic letter order, then signed coefficient tuples in
lexicographic order with the first coefficient positive (u^2 = -f is a
quadratic twist of u^2 = f, which the twist search already covers).

The candidate stream is cut into fixed-size chunks.  Workers scan chunks
independently; the writer flushes results strictly in chunk order and
checkpoints after every chunk, so output bytes do not depend on the worker
count or on interruptions.
"""
from __future__ import annotations

import collections
import concurrent.futures as cf
import hashlib
import itertools
import logging
import math
import os
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from . import __version__, kernels
from .counting import TableStack
from .fieldcore import NUM_PRIMES
from .matcher import DEFAULT_THRESHOLD, MatchResult, best_matches, check_threshold, target_residues
from .newforms import NewformRecord, default_twists, format_table
from .octic import BRUCH, BRUCWEGA, LETTER_INDEX, LETTERS, NUM_LETTERS

log = logging.getLogger(__name__)

DEFAULT_CHUNK = 1 << 16


@dataclass(frozen=True)
class SearchRange:
    letters: str = LETTERS
    phi_min: int = 1
    phi_max: int = 2
    psi_min: int = 1
    psi_max: int = 10
    threshold: int = DEFAULT_THRESHOLD
    twists: tuple[int, ...] = field(default_factory=lambda: tuple(default_twists()))

    def __post_init__(self):
        letters = "".join(sorted(set(self.letters.upper()), key=LETTER_INDEX.__getitem__))
        object.__setattr__(self, "letters", letters)
        object.__setattr__(self, "twists", tuple(self.twists))
        if not letters:
            raise ValueError("empty letter subset")
        if not 1 <= self.phi_min <= self.phi_max <= len(letters):
            raise ValueError(f"need 1 <= phi_min <= phi_max <= {len(letters)}")
        if self.psi_min < self.phi_min:
            object.__setattr__(self, "psi_min", self.phi_min)
        if self.psi_max < self.psi_min:
            raise ValueError("psi_max below psi_min")
        check_threshold(self.threshold)
        if not self.twists:
            raise ValueError("empty twist set")

    def describe(self) -> str:
        return (f"letters={self.letters} phi={self.phi_min}..{self.phi_max} "
                f"psi={self.psi_min}..{self.psi_max} threshold={self.threshold} "
                f"twists={','.join(map(str, self.twists))}")


PRESETS: dict[str, dict] = {
    "sweep-phi2": dict(phi_min=1, phi_max=2, psi_max=2000),
    "sweep-phi3": dict(phi_min=3, phi_max=3, psi_max=350),
    "sweep-phi4": dict(phi_min=4, phi_max=4, psi_max=110),
    "sweep-phi5": dict(phi_min=5, phi_max=5, psi_max=40),
    "sweep-phi6": dict(phi_min=6, phi_max=6, psi_max=30),
    "sweep-phi7": dict(phi_min=7, phi_max=7, psi_max=20),
    "sweep-phi8": dict(phi_min=8, phi_max=15, psi_max=15),
    "sweep-bruch": dict(letters=BRUCH, phi_min=1, phi_max=5, psi_max=270),
    "sweep-brucwega": dict(letters=BRUCWEGA, phi_min=1, phi_max=8, psi_max=41),
}


def preset(name: str, **overrides) -> SearchRange:
    try:
        params = dict(PRESETS[name])
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}") from None
    params.update(overrides)
    return SearchRange(**params)


# --- enumeration -------------------------------------------------------------

def _signed_tuples(k: int, lo: int, hi: int) -> Iterator[tuple[int, ...]]:
    """k nonzero ints, first positive, lo <= sum of |x| <= hi, lexicographic."""

    def rec(pos: int, used: int):
        after = k - pos - 1
        top = hi - used - after
        vals = range(1, top + 1) if pos == 0 else itertools.chain(range(-top, 0), range(1, top + 1))
        for x in vals:
            u = used + abs(x)
            if after == 0:
                if u >= lo:
                    yield (x,)
            else:
                for rest in rec(pos + 1, u):
                    yield (x,) + rest

    if k > hi:
        return iter(())
    return rec(0, 0)


def enumerate_range(rng: SearchRange) -> Iterator[tuple[int, ...]]:
    idx = [LETTER_INDEX[ch] for ch in rng.letters]
    for k in range(rng.phi_min, rng.phi_max + 1):
        for sup in itertools.combinations(idx, k):
            for vals in _signed_tuples(k, rng.psi_min, rng.psi_max):
                v = [0] * NUM_LETTERS
                for i, c in zip(sup, vals):
                    v[i] = c
                yield tuple(v)


def range_size(rng: SearchRange) -> int:
    """Closed-form number of candidates in a range."""
    n = len(rng.letters)
    total = 0
    for k in range(rng.phi_min, rng.phi_max + 1):
        per_support = sum(math.comb(s - 1, k - 1) for s in range(max(k, rng.psi_min), rng.psi_max + 1))
        total += math.comb(n, k) * per_support * 2 ** (k - 1)
    return total


def iter_chunks(rng: SearchRange, chunk_size: int = DEFAULT_CHUNK,
                start: int = 0) -> Iterator[tuple[int, np.ndarray]]:
    stream = enumerate_range(rng)
    if start:
        # consume skipped chunks
        for _ in itertools.islice(stream, start * chunk_size):
            pass
    index = start
    while True:
        block = list(itertools.islice(stream, chunk_size))
        if not block:
            return
        yield index, np.array(block, dtype=np.int64)
        index += 1


# --- checkpoints -------------------------------------------------------------

@dataclass(frozen=True)
class Checkpoint:
    range_hash: str
    last_chunk: int = -1
    candidates: int = 0
    hits: int = 0
    results_bytes: int = 0
    complete: bool = False


def write_checkpoint(cp: Checkpoint, path) -> None:
    path = Path(path)
    text = "".join(f"{k}={v}\n" for k, v in (
        ("range_hash", cp.range_hash),
        ("last_chunk", cp.last_chunk),
        ("candidates", cp.candidates),
        ("hits", cp.hits),
        ("results_bytes", cp.results_bytes),
        ("complete", int(cp.complete)),
    ))
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def read_checkpoint(path) -> Checkpoint:
    values = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip() and not line.startswith("#"):
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    try:
        return Checkpoint(
            range_hash=values["range_hash"],
            last_chunk=int(values["last_chunk"]),
            candidates=int(values["candidates"]),
            hits=int(values["hits"]),
            results_bytes=int(values["results_bytes"]),
            complete=bool(int(values.get("complete", 0))),
        )
    except (KeyError, ValueError) as exc:
        raise ValueError(f"{path}: malformed checkpoint ({exc})") from None


class CheckpointMismatch(ValueError):
    pass


def range_hash(rng: SearchRange, forms: Sequence[NewformRecord], scheme: str, chunk_size: int) -> str:
    h = hashlib.sha256()
    h.update(f"{rng.describe()}\nscheme={scheme}\nchunk={chunk_size}\n".encode())
    h.update(format_table(forms).encode())
    return h.hexdigest()[:32]


# --- results -----------------------------------------------------------------

RESULT_COLUMNS = " ".join(LETTERS.lower()) + " label twist agree disagreeing"


def format_hit(hit: MatchResult) -> str:
    bad = ",".join(map(str, hit.disagreeing)) or "-"
    return f"{' '.join(map(str, hit.octic))} {hit.label} {hit.twist} {hit.agree_count} {bad}\n"


def parse_hit(line: str) -> MatchResult:
    fields = line.split()
    octic = tuple(int(x) for x in fields[:NUM_LETTERS])
    label, d, agree, bad = fields[NUM_LETTERS:NUM_LETTERS + 4]
    level = int(label.split("/", 1)[0]) if label.split("/", 1)[0].isdigit() else 0
    primes = () if bad == "-" else tuple(int(p) for p in bad.split(","))
    return MatchResult(octic, label, level, int(d), int(agree), primes)


def read_results(path) -> list[MatchResult]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip() and not line.startswith("#"):
            out.append(parse_hit(line))
    return out


def results_header(rng: SearchRange, scheme: str, forms: Sequence[NewformRecord]) -> str:
    return (f"# doubleoctics {__version__} search results\n"
            f"# range: {rng.describe()}\n"
            f"# scheme: {scheme}\n"
            f"# forms: {len(forms)}\n"
            f"# columns: {RESULT_COLUMNS}\n")


# --- scanning ----------------------------------------------------------------

@dataclass
class _ScanContext:
    stack: TableStack
    forms: list[NewformRecord]
    twists: tuple[int, ...]
    threshold: int
    targets: np.ndarray
    early_abort: bool


_WORKER: _ScanContext | None = None


def _init_worker(ctx: _ScanContext) -> None:
    global _WORKER
    _WORKER = ctx


def scan_chunk(ctx: _ScanContext, cands: np.ndarray) -> list[MatchResult]:
    if not len(cands) or not ctx.forms:
        return []
    flags = kernels.scan(cands, ctx.stack, ctx.targets, NUM_PRIMES - ctx.threshold, ctx.early_abort)
    idx = np.nonzero(flags)[0]
    if not idx.size:
        return []
    counts = kernels.counts(cands[idx], ctx.stack)
    hits = []
    for v, cv in zip(cands[idx], counts):
        hits.extend(best_matches(cv.tolist(), ctx.forms, ctx.twists, ctx.threshold,
                                 octic=tuple(int(c) for c in v)))
    return hits


def _scan_in_worker(index: int, cands: np.ndarray) -> tuple[int, int, str]:
    hits = scan_chunk(_WORKER, cands)
    return index, len(hits), "".join(format_hit(h) for h in hits)


@dataclass
class SearchSummary:
    candidates: int
    hits: int
    chunks: int
    elapsed: float
    complete: bool
    resumed_from: int = -1
    run_candidates: int = 0

    @property
    def rate(self) -> float:
        """Candidates per second scanned in this call."""
        return self.run_candidates / self.elapsed if self.elapsed > 0 else float("inf")


def run_search(
    rng: SearchRange,
    stack: TableStack,
    forms: Sequence[NewformRecord],
    out_path,
    *,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
    checkpoint_path=None,
    resume: bool = False,
    early_abort: bool = True,
    max_chunks: int | None = None,
) -> SearchSummary:
    """Scan every candidate in ``rng`` and write hits to ``out_path``.

    With ``resume`` and an existing checkpoint, continues after the last
    recorded chunk (refusing if the range, forms or scheme changed).
    ``max_chunks`` stops early after that many chunks in this call, leaving
    a resumable checkpoint."""
    if workers < 1:
        raise ValueError("workers must be >= 1")
    out_path = Path(out_path)
    forms = list(forms)
    h = range_hash(rng, forms, stack.scheme, chunk_size)
    cp = Checkpoint(h)
    if resume and checkpoint_path is not None and Path(checkpoint_path).exists():
        cp = read_checkpoint(checkpoint_path)
        if cp.range_hash != h:
            raise CheckpointMismatch(
                f"checkpoint {checkpoint_path} belongs to a different search (hash {cp.range_hash}, expected {h})")
    resumed_from = cp.last_chunk
    if cp.complete:
        return SearchSummary(cp.candidates, cp.hits, cp.last_chunk + 1, 0.0, True, resumed_from)

    if cp.last_chunk >= 0:
        with open(out_path, "r+b") as fh:
            fh.truncate(cp.results_bytes)
    else:
        out_path.write_text(results_header(rng, stack.scheme, forms), encoding="utf-8")
        cp = replace(cp, results_bytes=out_path.stat().st_size)
        if checkpoint_path is not None:
            write_checkpoint(cp, checkpoint_path)

    ctx = _ScanContext(stack, forms, rng.twists, rng.threshold,
                       target_residues(forms, rng.twists), early_abort)
    chunks = iter_chunks(rng, chunk_size, start=cp.last_chunk + 1)
    if max_chunks is not None:
        chunks = itertools.islice(chunks, max_chunks)

    t0 = time.perf_counter()
    processed = 0
    run_candidates = 0
    exhausted = max_chunks is None

    def commit(fh, index: int, n: int, nhits: int, text: str) -> None:
        nonlocal cp, run_candidates
        run_candidates += n
        fh.write(text.encode("utf-8"))
        fh.flush()
        cp = replace(cp, last_chunk=index, candidates=cp.candidates + n,
                     hits=cp.hits + nhits, results_bytes=fh.tell())
        if checkpoint_path is not None:
            write_checkpoint(cp, checkpoint_path)

    with open(out_path, "ab") as fh:
        if workers == 1:
            for index, cands in chunks:
                hits = scan_chunk(ctx, cands)
                commit(fh, index, len(cands), len(hits), "".join(format_hit(x) for x in hits))
                processed += 1
        else:
            with cf.ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(ctx,)) as pool:
                pending: collections.deque = collections.deque()
                sizes: dict[int, int] = {}
                try:
                    for index, cands in chunks:
                        sizes[index] = len(cands)
                        pending.append(pool.submit(_scan_in_worker, index, cands))
                        if len(pending) >= 2 * workers:
                            i, nh, text = pending.popleft().result()
                            commit(fh, i, sizes.pop(i), nh, text)
                            processed += 1
                    while pending:
                        i, nh, text = pending.popleft().result()
                        commit(fh, i, sizes.pop(i), nh, text)
                        processed += 1
                except BaseException:
                    for fut in pending:
                        fut.cancel()
                    raise

    if max_chunks is not None and processed < max_chunks:
        exhausted = True
    elif max_chunks is not None:
        # a full final batch may still have been the last one
        exhausted = cp.candidates >= range_size(rng)
    if exhausted:
        cp = replace(cp, complete=True)
        if checkpoint_path is not None:
            write_checkpoint(cp, checkpoint_path)
    elapsed = time.perf_counter() - t0
    log.info("search: %d candidates this run, %d hits total, %.1f cand/s", run_candidates, cp.hits,
             run_candidates / elapsed if elapsed else 0.0)
    return SearchSummary(cp.candidates, cp.hits, processed, elapsed, cp.complete, resumed_from,
                         run_candidates)
