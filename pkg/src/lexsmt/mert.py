"""Minimum error rate training over merged n-best pools.

Along a direction d the model score of every hypothesis is the line
w.f + gamma * d.f, so each sentence's 1-best is read off an upper envelope
and corpus BLEU is piecewise constant in gamma. The line search sweeps the
envelope breakpoints of all sentences in one pass.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .decoder import FEATURES, N_FEATURES, DecodingError, Translation, WeightVector
from .metrics import bleu_from_stats, bleu_stats

__all__ = [
    "Candidate",
    "Pool",
    "LineSearchResult",
    "TuningState",
    "upper_envelope",
    "line_search",
    "feasible_range",
    "sign_bounds",
    "pool_bleu",
    "select",
    "optimize_pools",
    "tune",
    "write_tuning_log",
]

log = logging.getLogger(__name__)

MAX_N = 4


@dataclass(frozen=True)
class Candidate:
    target: Tuple[str, ...]
    features: np.ndarray
    stats: Tuple[int, ...]


class Pool:
    """Distinct candidate translations of one dev sentence, in insertion order."""

    def __init__(self, reference: Sequence[str]):
        self.reference = tuple(reference)
        self.candidates: List[Candidate] = []
        self._seen = set()

    def add(self, target: Sequence[str], features) -> bool:
        target = tuple(target)
        if target in self._seen:
            return False
        self._seen.add(target)
        self.candidates.append(
            Candidate(target, np.asarray(features, dtype=float), bleu_stats(target, self.reference, MAX_N))
        )
        return True

    def __len__(self):
        return len(self.candidates)

    def feature_matrix(self) -> np.ndarray:
        return np.array([c.features for c in self.candidates]).reshape(len(self.candidates), N_FEATURES)


def select(pools: Sequence[Pool], weights) -> List[int]:
    """Index of the highest-scoring candidate per pool; ties go to the earliest."""
    w = np.asarray(weights, dtype=float)
    return [int(np.argmax(p.feature_matrix() @ w)) for p in pools]


def _corpus_bleu(stats_rows, smoothing: str) -> float:
    total = np.sum(np.array(stats_rows), axis=0)
    return bleu_from_stats(total.tolist(), MAX_N, smoothing).score


def pool_bleu(pools: Sequence[Pool], weights, smoothing: str = "add1") -> float:
    chosen = select(pools, weights)
    return _corpus_bleu([p.candidates[k].stats for p, k in zip(pools, chosen)], smoothing)


def upper_envelope(slopes: np.ndarray, intercepts: np.ndarray) -> List[Tuple[float, int]]:
    """Upper envelope of the lines intercept + slope * gamma.

    Returns (start, index) pairs sorted by start: line `index` is maximal
    from `start` up to the next start. The first start is -inf. Among
    identical lines the lowest index is kept.
    """
    order = sorted(range(len(slopes)), key=lambda i: (slopes[i], intercepts[i], -i))
    hull: List[Tuple[float, int]] = []
    for i in order:
        m, b = slopes[i], intercepts[i]
        if hull and slopes[hull[-1][1]] == m:
            # same slope, sorted so the current line is at least as high
            if intercepts[hull[-1][1]] == b:
                hull[-1] = (hull[-1][0], min(i, hull[-1][1]))
                continue
            hull.pop()
        while hull:
            start, k = hull[-1]
            x = (intercepts[k] - b) / (m - slopes[k])
            if x <= start:
                hull.pop()
            else:
                hull.append((x, i))
                break
        if not hull:
            hull.append((-math.inf, i))
    return hull


@dataclass
class LineSearchResult:
    gamma: float
    bleu: float


def feasible_range(weights, direction, bounds) -> Tuple[float, float]:
    """Steps gamma keeping weights + gamma * direction inside per-feature bounds."""
    lo_g, hi_g = -math.inf, math.inf
    if bounds is None:
        return lo_g, hi_g
    for w, d, (lo, hi) in zip(weights, direction, bounds):
        if d == 0:
            continue
        a, b = (lo - w) / d, (hi - w) / d
        if d < 0:
            a, b = b, a
        lo_g, hi_g = max(lo_g, a), min(hi_g, b)
    return lo_g, hi_g


def line_search(pools: Sequence[Pool], weights, direction, smoothing: str = "add1",
                bounds=None) -> LineSearchResult:
    """Exact search for the step along `direction` maximizing corpus BLEU.

    Returns gamma = 0 when the best interval contains the current point,
    otherwise the interval midpoint (one unit past the last breakpoint for
    unbounded intervals). Equal BLEU prefers the smaller |gamma|.
    `bounds` is an optional (low, high) pair per feature; intervals are
    clipped to the steps that respect it, and the current weights must.
    """
    w = np.asarray(weights, dtype=float)
    d = np.asarray(direction, dtype=float)
    if bounds is not None and any(not lo <= x <= hi for x, (lo, hi) in zip(w, bounds)):
        raise ValueError("current weights violate the bounds")
    g_lo, g_hi = feasible_range(w, d, bounds)
    events: List[Tuple[float, int, int]] = []
    current: List[int] = []
    for s, pool in enumerate(pools):
        if not len(pool):
            raise ValueError(f"pool {s} is empty")
        F = pool.feature_matrix()
        env = upper_envelope(F @ d, F @ w)
        current.append(env[0][1])
        for start, idx in env[1:]:
            events.append((start, s, idx))
    events.sort(key=lambda e: e[0])

    stats = np.array([pools[s].candidates[k].stats for s, k in enumerate(current)], dtype=float)
    total = stats.sum(axis=0)

    def score():
        return bleu_from_stats([int(round(x)) for x in total], MAX_N, smoothing).score

    intervals: List[Tuple[float, float, float]] = []  # (lo, hi, bleu)
    lo = -math.inf
    e = 0
    while True:
        hi = events[e][0] if e < len(events) else math.inf
        intervals.append((lo, hi, score()))
        if e >= len(events):
            break
        x = events[e][0]
        while e < len(events) and events[e][0] == x:
            _, s, idx = events[e]
            new = np.array(pools[s].candidates[idx].stats, dtype=float)
            total += new - stats[s]
            stats[s] = new
            e += 1
        lo = x

    if g_lo == g_hi:  # the bounds pin the weights along this direction
        return LineSearchResult(0.0, pool_bleu(pools, w, smoothing))
    best: Optional[LineSearchResult] = None
    for lo, hi, b in intervals:
        if lo < 0 < hi:
            g = 0.0
        else:
            lo, hi = max(lo, g_lo), min(hi, g_hi)
            if lo >= hi:
                continue
            if math.isinf(lo):
                g = hi - 1.0
            elif math.isinf(hi):
                g = lo + 1.0
            else:
                g = (lo + hi) / 2
        if best is None or b > best.bleu or (b == best.bleu and abs(g) < abs(best.gamma)):
            best = LineSearchResult(g, b)
    return best


def sign_bounds(nonnegative: Sequence[str]):
    """Per-feature (low, high) bounds keeping the named features >= 0."""
    unknown = set(nonnegative) - set(FEATURES)
    if unknown:
        raise ValueError(f"unknown features {sorted(unknown)}")
    if not nonnegative:
        return None
    return [(0.0 if f in nonnegative else -math.inf, math.inf) for f in FEATURES]


@dataclass
class TuningState:
    weights: WeightVector
    pools: List[Pool]
    dev_bleu_history: List[float] = field(default_factory=list)
    weight_history: List[WeightVector] = field(default_factory=list)
    failed_sentences: int = 0
    stop_reason: str = ""


def _directions(rng: np.random.Generator, n_random: int) -> List[np.ndarray]:
    dirs = [np.eye(N_FEATURES)[i] for i in range(N_FEATURES)]
    for _ in range(n_random):
        v = rng.standard_normal(N_FEATURES)
        dirs.append(v / np.linalg.norm(v))
    return dirs


def optimize_pools(
    pools: Sequence[Pool],
    weights,
    rng: Optional[np.random.Generator] = None,
    n_random: int = 8,
    max_steps: int = 25,
    min_gain: float = 1e-9,
    smoothing: str = "add1",
    nonnegative: Sequence[str] = (),
) -> Tuple[np.ndarray, float]:
    """Greedy line-search ascent of pool BLEU from `weights`.

    Each step tries every coordinate direction plus `n_random` random ones
    and applies the single best improving step. Weights are renormalized to
    unit L1 norm after each step, which leaves every selection unchanged.
    Features named in `nonnegative` are kept >= 0.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    w = np.asarray(weights, dtype=float).copy()
    bounds = sign_bounds(nonnegative)
    current = pool_bleu(pools, w, smoothing)
    for _ in range(max_steps):
        best_gain, best_w = min_gain, None
        for d in _directions(rng, n_random):
            res = line_search(pools, w, d, smoothing, bounds)
            if res.gamma != 0.0 and res.bleu - current > best_gain:
                cand = w + res.gamma * d
                if bounds is not None:  # guard against rounding just past a bound
                    cand = np.clip(cand, [lo for lo, _ in bounds], [hi for _, hi in bounds])
                if np.any(cand != 0):
                    best_gain, best_w = res.bleu - current, cand
        if best_w is None:
            break
        best_w = best_w / np.abs(best_w).sum()
        achieved = pool_bleu(pools, best_w, smoothing)
        if achieved <= current:
            break  # rounding at an envelope breakpoint; keep the last good point
        w, current = best_w, achieved
    return w, current


NBestFn = Callable[[Sequence[str], WeightVector, int], List[Translation]]


def tune(
    dev_sources: Sequence[Sequence[str]],
    dev_references: Sequence[Sequence[str]],
    nbest_fn: NBestFn,
    init: WeightVector,
    outer_iters: int = 10,
    n: int = 100,
    n_random: int = 8,
    seed: int = 0,
    min_improvement: float = 1e-4,
    smoothing: str = "add1",
    nonnegative: Sequence[str] = (),
) -> TuningState:
    """Alternate n-best decoding of the dev set with pool-BLEU optimization.

    `nbest_fn(source_tokens, weights, n)` supplies candidate lists; a
    sentence whose decoding fails is dropped and counted. An outer iteration
    counts as completed only when its optimized pool BLEU is at least the
    previous one; otherwise tuning stops and keeps the previous weights. It
    also stops once the gain falls below `min_improvement` or when the
    weights stop changing. Features named in `nonnegative` stay >= 0.
    """
    if nonnegative and np.any(init.array[[FEATURES.index(f) for f in nonnegative]] < 0):
        raise ValueError("initial weights violate the nonnegative constraint")
    if len(dev_sources) != len(dev_references):
        raise ValueError("dev sources and references differ in length")
    if not dev_sources:
        raise ValueError("empty dev set")
    pools = [Pool(r) for r in dev_references]
    failed = set()
    state = TuningState(init, pools)
    rng = np.random.default_rng(seed)
    weights = init.array
    for it in range(outer_iters):
        added = 0
        for s, src in enumerate(dev_sources):
            if s in failed:
                continue
            try:
                for t in nbest_fn(src, WeightVector.from_array(weights), n):
                    added += pools[s].add(t.target, t.features)
            except DecodingError as exc:
                log.warning("dev sentence %d dropped: %s", s, exc)
                failed.add(s)
        active = [p for s, p in enumerate(pools) if s not in failed and len(p)]
        if not active:
            state.stop_reason = "no decodable dev sentences"
            break
        new_w, new_bleu = optimize_pools(active, weights, rng, n_random, smoothing=smoothing,
                                         nonnegative=nonnegative)
        prev = state.dev_bleu_history[-1] if state.dev_bleu_history else None
        if prev is not None and new_bleu < prev:
            state.stop_reason = f"pool BLEU fell to {new_bleu:.6f} after merging; kept previous weights"
            break
        changed = not np.array_equal(new_w, weights)
        weights = new_w
        state.weights = WeightVector.from_array(weights)
        state.dev_bleu_history.append(new_bleu)
        log.info("tuning iteration %d: pool BLEU %.4f, %d new candidates", it + 1, new_bleu, added)
        state.weight_history.append(state.weights)
        if not changed:
            state.stop_reason = "converged: no weight change"
            break
        if prev is not None and new_bleu - prev < min_improvement:
            state.stop_reason = f"pool BLEU gain below {min_improvement}"
            break
    else:
        state.stop_reason = state.stop_reason or "iteration limit"
    state.failed_sentences = len(failed)
    return state


def write_tuning_log(state: TuningState, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("iter\tpool_bleu\t" + "\t".join(FEATURES) + "\n")
        for i, (b, w) in enumerate(zip(state.dev_bleu_history, state.weight_history), 1):
            fh.write(f"{i}\t{b:.6f}\t" + "\t".join(repr(v) for v in w.values) + "\n")
