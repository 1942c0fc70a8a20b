"""Interpolated n-gram language model over target sentences."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

__all__ = [
    "BOS",
    "EOS",
    "UNK",
    "Smoothing",
    "NGramModel",
    "train_lm",
    "log_prob",
    "score_continuation",
    "write_arpa",
    "write_counts",
    "read_counts",
]

BOS, EOS, UNK = "<s>", "</s>", "<unk>"
MLE_FLOOR = 1e-10


@dataclass(frozen=True)
class Smoothing:
    """method is "mle" or "add_k".

    `weights[n-1]` is the interpolation weight of the order-n estimate.
    Without weights all mass goes to the highest order.
    """

    method: str = "add_k"
    k: float = 0.1
    weights: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.method not in ("mle", "add_k"):
            raise ValueError(f"unknown smoothing method {self.method!r}")
        if self.method == "add_k" and not self.k > 0:
            raise ValueError(f"add_k needs k > 0, got {self.k}")
        if self.weights is not None:
            object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
            if any(w < 0 for w in self.weights) or abs(sum(self.weights) - 1.0) > 1e-9:
                raise ValueError(f"interpolation weights must be >= 0 and sum to 1: {self.weights}")

    def resolved_weights(self, order: int) -> Tuple[float, ...]:
        if self.weights is None:
            return (0.0,) * (order - 1) + (1.0,)
        if len(self.weights) != order:
            raise ValueError(f"{len(self.weights)} interpolation weights for order {order}")
        return self.weights


@dataclass
class NGramModel:
    order: int
    counts: List[Counter]  # counts[n-1]: n-gram tuple -> count
    context_counts: List[Counter]  # context_counts[n-1]: (n-1)-gram -> sum of continuations
    vocab: frozenset  # predictable tokens, always holding EOS and UNK
    smoothing: Smoothing
    _cache: Dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def weights(self) -> Tuple[float, ...]:
        return self.smoothing.resolved_weights(self.order)

    def map_token(self, w: str) -> str:
        return w if w in self.vocab or w == BOS else UNK

    def state(self, context: Sequence[str]) -> Tuple[str, ...]:
        """The last order-1 tokens of a sentence prefix, left-padded with <s>."""
        n = self.order - 1
        if n == 0:
            return ()
        ctx = tuple(self.map_token(w) for w in context[-n:])
        return (BOS,) * (n - len(ctx)) + ctx

    def _estimate(self, n: int, hist: Tuple[str, ...], w: str) -> Optional[float]:
        c = self.counts[n - 1].get(hist + (w,), 0)
        total = self.context_counts[n - 1].get(hist, 0)
        if self.smoothing.method == "add_k":
            k = self.smoothing.k
            return (c + k) / (total + k * len(self.vocab))
        return c / total if total else None

    def prob(self, hist: Tuple[str, ...], w: str, partial: bool = False) -> float:
        """Interpolated p(w | hist) for a mapped state and a mapped word.

        With `partial` the history is taken as is (no <s> padding) and only
        orders it can support are mixed, renormalizing their weights; this
        is the context-free estimate used for future costs.
        """
        key = (hist, w, partial)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        weights = self.weights
        top = min(self.order, len(hist) + 1) if partial else self.order
        total_p, total_w = 0.0, 0.0
        for n in range(1, top + 1):
            lam = weights[n - 1]
            if lam == 0.0:
                continue
            est = self._estimate(n, tuple(hist[len(hist) - (n - 1):]) if n > 1 else (), w)
            if est is None:
                continue
            total_p += lam * est
            total_w += lam
        if total_w == 0.0:
            # no order with weight could be estimated; fall back to the unigram
            est = self._estimate(1, (), w)
            total_p, total_w = est or 0.0, 1.0
        p = total_p / total_w
        if self.smoothing.method == "mle":
            p = max(p, MLE_FLOOR)
        self._cache[key] = p
        return p


def train_lm(
    sentences: Iterable[Sequence[str]],
    order: int = 3,
    smoothing: Optional[Smoothing] = None,
    unk_threshold: int = 0,
) -> NGramModel:
    """Count n-grams up to `order` with <s> padding and one </s> per sentence.

    Tokens seen at most `unk_threshold` times are counted as <unk>.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    smoothing = smoothing or Smoothing()
    smoothing.resolved_weights(order)
    sentences = [tuple(s) for s in sentences]
    if not sentences:
        raise ValueError("cannot train a language model on an empty corpus")
    freq = Counter(w for s in sentences for w in s)
    rare = {w for w, c in freq.items() if c <= unk_threshold}

    counts = [Counter() for _ in range(order)]
    for s in sentences:
        toks = (BOS,) * (order - 1) + tuple(UNK if w in rare else w for w in s) + (EOS,)
        for pos in range(order - 1, len(toks)):
            for n in range(1, order + 1):
                counts[n - 1][toks[pos - n + 1 : pos + 1]] += 1
    context_counts = [Counter() for _ in range(order)]
    for n in range(1, order + 1):
        for gram, c in counts[n - 1].items():
            context_counts[n - 1][gram[:-1]] += c
    vocab = frozenset(g[0] for g in counts[0]) | {EOS, UNK}
    return NGramModel(order, counts, context_counts, vocab, smoothing)


def score_continuation(model: NGramModel, context: Sequence[str], word: str) -> float:
    """Natural-log probability of `word` after the sentence prefix `context`."""
    return math.log(model.prob(model.state(context), model.map_token(word)))


def log_prob(model: NGramModel, sentence: Sequence[str]) -> float:
    """Natural-log probability of a whole sentence including </s>."""
    total = 0.0
    sentence = list(sentence)
    for i, w in enumerate(sentence + [EOS]):
        total += score_continuation(model, sentence[:i], w)
    return total


def write_arpa(model: NGramModel, path) -> None:
    """Back-off-style text dump: interpolated log10 p for every seen n-gram."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\\data\\\n")
        for n in range(1, model.order + 1):
            fh.write(f"ngram {n}={len(model.counts[n - 1])}\n")
        for n in range(1, model.order + 1):
            fh.write(f"\n\\{n}-grams:\n")
            for gram in sorted(model.counts[n - 1]):
                hist = gram[:-1]
                padded = (BOS,) * (model.order - 1 - len(hist)) + hist
                p = model.prob(padded if n == model.order else hist, gram[-1], partial=n < model.order)
                fh.write(f"{math.log10(p):.6f}\t{' '.join(gram)}\n")
        fh.write("\n\\end\\\n")


def write_counts(model: NGramModel, path) -> None:
    """Reloadable dump of the raw counts and smoothing settings."""
    sm = model.smoothing
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"order\t{model.order}\n")
        fh.write(f"method\t{sm.method}\nk\t{sm.k!r}\n")
        if sm.weights is not None:
            fh.write("weights\t" + " ".join(repr(w) for w in sm.weights) + "\n")
        fh.write("vocab\t" + " ".join(sorted(model.vocab)) + "\n")
        for n in range(1, model.order + 1):
            for gram, c in sorted(model.counts[n - 1].items()):
                fh.write(f"{c}\t{' '.join(gram)}\n")


def read_counts(path) -> NGramModel:
    header: Dict[str, str] = {}
    grams: List[Tuple[Tuple[str, ...], int]] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            key, _, value = line.rstrip("\n").partition("\t")
            if key.isdigit():
                grams.append((tuple(value.split(" ")), int(key)))
            else:
                header[key] = value
    order = int(header["order"])
    weights = tuple(float(w) for w in header["weights"].split()) if "weights" in header else None
    smoothing = Smoothing(header["method"], float(header["k"]), weights)
    counts = [Counter() for _ in range(order)]
    for gram, c in grams:
        counts[len(gram) - 1][gram] = c
    context_counts = [Counter() for _ in range(order)]
    for n in range(1, order + 1):
        for gram, c in counts[n - 1].items():
            context_counts[n - 1][gram[:-1]] += c
    return NGramModel(order, counts, context_counts, frozenset(header["vocab"].split(" ")), smoothing)
