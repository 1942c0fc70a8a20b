"""Phrase-based stack decoding under a seven-feature log-linear model.

One stack per number of covered source words. Hypotheses sharing coverage,
language model state and the end of the last translated phrase are
recombined; every incoming arc is kept so n-best lists can be read off the
resulting lattice exactly.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .lm import EOS, NGramModel
from .phrases import PhraseTable, escape, lookup

__all__ = [
    "FEATURES",
    "PASSTHROUGH_SCORE",
    "WeightVector",
    "DecoderConfig",
    "TranslationOption",
    "Translation",
    "DecodingError",
    "translation_options",
    "future_cost",
    "decode",
    "nbest",
    "derivation_features",
    "write_nbest",
]

FEATURES = ("phrase_fwd", "lex_fwd", "phrase_bwd", "lex_bwd", "lm", "word_penalty", "distortion")
N_FEATURES = len(FEATURES)
PASSTHROUGH_SCORE = 1e-7


@dataclass(frozen=True)
class WeightVector:
    values: Tuple[float, ...] = (0.2, 0.2, 0.2, 0.2, 0.5, 0.0, 0.3)

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) != N_FEATURES:
            raise ValueError(f"weight vector needs {N_FEATURES} values, got {len(vals)}")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"weights must be finite: {vals}")
        object.__setattr__(self, "values", vals)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.values)

    @classmethod
    def from_array(cls, arr) -> "WeightVector":
        return cls(tuple(float(x) for x in arr))

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, float]) -> "WeightVector":
        missing = set(FEATURES) - set(mapping)
        if missing:
            raise ValueError(f"missing weights for {sorted(missing)}")
        return cls(tuple(mapping[f] for f in FEATURES))

    def as_dict(self) -> Dict[str, float]:
        return dict(zip(FEATURES, self.values))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for name, v in zip(FEATURES, self.values):
                fh.write(f"{name}\t{v!r}\n")

    @classmethod
    def load(cls, path) -> "WeightVector":
        mapping = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    name, value = line.rstrip("\n").split("\t")
                    mapping[name] = float(value)
        return cls.from_mapping(mapping)


@dataclass(frozen=True)
class DecoderConfig:
    beam_size: Optional[int] = 100  # None: no pruning
    distortion_limit: Optional[int] = 6  # None: unlimited
    max_phrase_len: int = 7
    top_k: int = 20

    def __post_init__(self):
        if self.beam_size is not None and self.beam_size < 1:
            raise ValueError("beam_size must be >= 1")
        if self.distortion_limit is not None and self.distortion_limit < 0:
            raise ValueError("distortion_limit must be >= 0")
        if self.max_phrase_len < 1 or self.top_k < 1:
            raise ValueError("max_phrase_len and top_k must be positive")


class DecodingError(RuntimeError):
    pass


@dataclass(frozen=True)
class TranslationOption:
    span: Tuple[int, int]
    target: Tuple[str, ...]
    log_scores: Tuple[float, float, float, float]


@dataclass
class Translation:
    target: Tuple[str, ...]
    features: np.ndarray
    score: float
    derivation: Tuple[TranslationOption, ...] = ()

    @property
    def text(self) -> str:
        return " ".join(self.target)


def translation_options(
    sentence: Sequence[str], table: PhraseTable, config: DecoderConfig
) -> Dict[Tuple[int, int], List[TranslationOption]]:
    """Options per source span; words with no single-word entry pass through."""
    n = len(sentence)
    opts: Dict[Tuple[int, int], List[TranslationOption]] = {}
    for i in range(n):
        for j in range(i + 1, min(n, i + config.max_phrase_len) + 1):
            found = lookup(table, sentence[i:j], config.top_k)
            if found:
                opts[(i, j)] = [
                    TranslationOption((i, j), e.target, tuple(math.log(s) for s in e.scores))
                    for e in found
                ]
        if (i, i + 1) not in opts:
            floor = math.log(PASSTHROUGH_SCORE)
            opts[(i, i + 1)] = [TranslationOption((i, i + 1), (sentence[i],), (floor,) * 4)]
    return opts


def _lm_phrase(lm: NGramModel, state: Tuple[str, ...], words: Sequence[str]):
    total = 0.0
    for w in words:
        w = lm.map_token(w)
        total += math.log(lm.prob(state, w))
        if state:
            state = state[1:] + (w,)
    return total, state


def _lm_estimate(lm: NGramModel, words: Sequence[str]) -> float:
    """Context-free LM score: each word sees only the phrase-internal history."""
    total = 0.0
    hist: Tuple[str, ...] = ()
    for w in words:
        w = lm.map_token(w)
        total += math.log(lm.prob(hist, w, partial=True))
        hist = (hist + (w,))[-(lm.order - 1):] if lm.order > 1 else ()
    return total


def future_cost(
    sentence: Sequence[str],
    table: PhraseTable,
    lm: NGramModel,
    weights: WeightVector,
    config: Optional[DecoderConfig] = None,
    options=None,
) -> np.ndarray:
    """Best weighted score estimate for translating every span [i, j) in isolation.

    Entry [i, j] combines the best single option for the span with the best
    split into two sub-spans; -inf marks spans that cannot be covered.
    """
    config = config or DecoderConfig()
    options = options if options is not None else translation_options(sentence, table, config)
    w = weights.array
    n = len(sentence)
    cost = np.full((n + 1, n + 1), -np.inf)
    for (i, j), opts in options.items():
        for o in opts:
            est = float(np.dot(w[:4], o.log_scores)) + w[4] * _lm_estimate(lm, o.target) + w[5] * len(o.target)
            cost[i, j] = max(cost[i, j], est)
    for length in range(2, n + 1):
        for i in range(0, n - length + 1):
            j = i + length
            for k in range(i + 1, j):
                cost[i, j] = max(cost[i, j], cost[i, k] + cost[k, j])
    return cost


def _uncovered_cost(coverage: int, n: int, cost: np.ndarray) -> float:
    total, i = 0.0, 0
    while i < n:
        if coverage >> i & 1:
            i += 1
            continue
        j = i
        while j < n and not coverage >> j & 1:
            j += 1
        total += cost[i, j]
        i = j
    return total


@dataclass(eq=False)
class _Node:
    coverage: int
    lm_state: Tuple[str, ...]
    last_end: int
    features: np.ndarray
    score: float
    prefix: Tuple[str, ...]
    best_arc: Optional[Tuple["_Node", TranslationOption]]
    arcs: List[Tuple["_Node", TranslationOption, np.ndarray]] = field(default_factory=list)

    def rank(self):
        return (-self.score, len(self.prefix), self.prefix)


def _search(sentence, table, lm, weights, config):
    n = len(sentence)
    w = weights.array
    options = translation_options(sentence, table, config)
    fc = future_cost(sentence, table, lm, weights, config, options)
    fc_cache: Dict[int, float] = {}
    spans_from: Dict[int, List[Tuple[int, int]]] = {}
    for (i, j) in options:
        spans_from.setdefault(i, []).append((i, j))
    full = (1 << n) - 1

    root = _Node(0, lm.state(()), -1, np.zeros(N_FEATURES), 0.0, (), None)
    stacks: List[Dict[tuple, _Node]] = [dict() for _ in range(n + 1)]
    stacks[0][(0, root.lm_state, -1)] = root
    for k in range(n):
        hyps = list(stacks[k].values())
        if config.beam_size is not None and len(hyps) > config.beam_size:
            def prune_key(h):
                if h.coverage not in fc_cache:
                    fc_cache[h.coverage] = _uncovered_cost(h.coverage, n, fc)
                return (-(h.score + fc_cache[h.coverage]),) + h.rank()[1:]

            hyps = sorted(hyps, key=prune_key)[: config.beam_size]
            stacks[k] = {(h.coverage, h.lm_state, h.last_end): h for h in hyps}
        for h in hyps:
            for i in range(n):
                if h.coverage >> i & 1:
                    continue
                jump = abs(i - (h.last_end + 1))
                if config.distortion_limit is not None and jump > config.distortion_limit:
                    continue
                for (_, j) in spans_from.get(i, ()):
                    mask = ((1 << j) - 1) ^ ((1 << i) - 1)
                    if h.coverage & mask:
                        continue
                    cov = h.coverage | mask
                    for opt in options[(i, j)]:
                        lm_delta, state = _lm_phrase(lm, h.lm_state, opt.target)
                        if cov == full:
                            lm_delta += math.log(lm.prob(state, EOS))
                        delta = np.array(opt.log_scores + (lm_delta, float(len(opt.target)), -float(jump)))
                        feats = h.features + delta
                        node = _Node(cov, state, j - 1, feats, float(np.dot(w, feats)), h.prefix + opt.target, (h, opt))
                        key = (cov, state, j - 1)
                        stack = stacks[k + (j - i)]
                        old = stack.get(key)
                        if old is None:
                            node.arcs.append((h, opt, delta))
                            stack[key] = node
                        else:
                            old.arcs.append((h, opt, delta))
                            if node.rank() < old.rank():
                                old.features, old.score, old.prefix, old.best_arc = (
                                    node.features, node.score, node.prefix, node.best_arc)
    return root, stacks


def _best_path(node: _Node) -> Tuple[TranslationOption, ...]:
    out = []
    while node.best_arc is not None:
        node, opt = node.best_arc
        out.append(opt)
    return tuple(reversed(out))


def _stuck(stacks, n) -> DecodingError:
    for k in range(n, -1, -1):
        if stacks[k]:
            best = min(stacks[k].values(), key=_Node.rank)
            bits = "".join("1" if best.coverage >> i & 1 else "0" for i in range(n))
            return DecodingError(f"no complete translation; search stuck at coverage {bits}")
    return DecodingError("no complete translation")


def _empty(lm: NGramModel, weights: WeightVector) -> Translation:
    feats = np.zeros(N_FEATURES)
    feats[4] = math.log(lm.prob(lm.state(()), EOS))
    return Translation((), feats, float(np.dot(weights.array, feats)))


def decode(sentence, table, lm, weights, config: Optional[DecoderConfig] = None) -> Translation:
    """Highest-scoring translation; ties prefer the shorter, then the lexicographically smaller target."""
    config = config or DecoderConfig()
    sentence = tuple(sentence)
    if not sentence:
        return _empty(lm, weights)
    _, stacks = _search(sentence, table, lm, weights, config)
    finals = stacks[len(sentence)]
    if not finals:
        raise _stuck(stacks, len(sentence))
    best = min(finals.values(), key=_Node.rank)
    return Translation(best.prefix, best.features.copy(), best.score, _best_path(best))


def nbest(sentence, table, lm, weights, config: Optional[DecoderConfig] = None, n: int = 100,
          max_pops: Optional[int] = None) -> List[Translation]:
    """Up to `n` distinct translations in descending score order.

    The first entry is the `decode` result. The rest come from a best-first
    walk backwards through the search lattice, where each partial path is
    ranked by its exact completion score (the Viterbi score of the node it
    has reached plus the suffix already fixed).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    config = config or DecoderConfig()
    sentence = tuple(sentence)
    if not sentence:
        return [_empty(lm, weights)]
    root, stacks = _search(sentence, table, lm, weights, config)
    finals = stacks[len(sentence)]
    if not finals:
        raise _stuck(stacks, len(sentence))
    w = weights.array
    best = min(finals.values(), key=_Node.rank)
    results = [Translation(best.prefix, best.features.copy(), best.score, _best_path(best))]
    if n == 1:
        return results
    seen = {best.prefix}
    rest: List[Translation] = []
    counter = itertools.count()
    heap = []
    for node in sorted(finals.values(), key=_Node.rank):
        heapq.heappush(heap, (-node.score, next(counter), node, np.zeros(N_FEATURES), ()))
    max_pops = max_pops if max_pops is not None else 50 * n
    pops = 0
    while heap and len(seen) < n and pops < max_pops:
        _, _, node, suffix, ops = heapq.heappop(heap)
        pops += 1
        if node is root:
            target = tuple(t for o in ops for t in o.target)
            if target not in seen:
                seen.add(target)
                rest.append(Translation(target, suffix, float(np.dot(w, suffix)), ops))
            continue
        for parent, opt, delta in node.arcs:
            new_suffix = suffix + delta
            prio = float(np.dot(w, parent.features + new_suffix))
            heapq.heappush(heap, (-prio, next(counter), parent, new_suffix, (opt,) + ops))
    rest.sort(key=lambda t: (-t.score, len(t.target), t.target))
    return results + rest


def derivation_features(
    sentence: Sequence[str], derivation: Sequence[TranslationOption], lm: NGramModel
) -> np.ndarray:
    """Recompute the feature vector of a derivation from scratch."""
    from .lm import log_prob

    feats = np.zeros(N_FEATURES)
    last_end = -1
    target: List[str] = []
    covered = set()
    for opt in derivation:
        i, j = opt.span
        if covered & set(range(i, j)):
            raise ValueError(f"span {opt.span} covered twice")
        covered |= set(range(i, j))
        feats[:4] += opt.log_scores
        feats[6] -= abs(i - (last_end + 1))
        last_end = j - 1
        target.extend(opt.target)
    if covered != set(range(len(sentence))):
        raise ValueError("derivation does not cover the sentence")
    feats[4] = log_prob(lm, target)
    feats[5] = len(target)
    return feats


def write_nbest(lists: Sequence[Sequence[Translation]], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sid, lst in enumerate(lists):
            for t in lst:
                feats = " ".join(repr(float(x)) for x in t.features)
                text = " ".join(escape(w) for w in t.target)
                fh.write(f"{sid} ||| {text} ||| {feats} ||| {t.score!r}\n")
