"""Deterministic synthetic bilingual corpora.

Source sentences come from a tiny SVO grammar over Latin pseudo-words;
targets are produced word for word through a bijective lexicon into
Devanagari pseudo-words, then reordered and optionally inflected. The
ground-truth lexicon is returned with the corpus so tests and experiments
can build augmentation resources from it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import Dict, FrozenSet, List, Sequence, Tuple

from .corpus import Origin, ParallelCorpus, SentencePair
from .lexicon import Category, LexiconEntry, SuffixInventory, SynsetRecord, default_suffixes

__all__ = [
    "SynthSpec",
    "SynthCorpus",
    "generate",
    "split",
    "exclude_heldout",
    "add_noise",
    "synset_records",
    "PLURAL",
]

WORD_ORDERS = ("monotone", "reversed", "svo_to_sov")
PLURAL = "s"

_LATIN_ONSETS = "b c d f g h j k l m n p r s t v w z br st tr pl gr".split()
_LATIN_VOWELS = "a e i o u".split()
_DEV_CONSONANTS = list("कखगघचछजझटडतथदधनपफबभमरलवसह")
_DEV_MATRAS = ["", "ा", "ि", "ी", "ु", "ू", "े", "ो"]


@dataclass(frozen=True)
class SynthSpec:
    vocab_size: int = 200
    min_len: int = 4
    max_len: int = 10
    word_order: str = "monotone"
    inflection_rate: float = 0.0
    oov_fraction: float = 0.0  # share of content words held out of training
    seed: int = 0

    def __post_init__(self):
        if self.vocab_size < 8:
            raise ValueError("vocab_size must be at least 8")
        if not 1 <= self.min_len <= self.max_len:
            raise ValueError(f"bad length range [{self.min_len}, {self.max_len}]")
        if self.min_len > 12:
            raise ValueError("min_len above 12 is not reachable by the grammar")
        if self.word_order not in WORD_ORDERS:
            raise ValueError(f"word_order must be one of {WORD_ORDERS}")
        for name in ("inflection_rate", "oov_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")


@dataclass
class SynthCorpus:
    corpus: ParallelCorpus
    lexicon: List[LexiconEntry]
    heldout: FrozenSet[str]  # held-out source words
    suffixes: SuffixInventory
    plural_suffix: Dict[str, str]  # target noun -> its plural suffix

    def entries(self, category: Category, heldout_only: bool = False) -> List[LexiconEntry]:
        return [
            e for e in self.lexicon
            if e.category == category and (not heldout_only or e.source[0] in self.heldout)
        ]


def _pseudo_words(rng: random.Random, n: int, make, taken: set) -> List[str]:
    out = []
    while len(out) < n:
        w = make(rng)
        if w not in taken:
            taken.add(w)
            out.append(w)
    return out


def _latin(rng: random.Random) -> str:
    return "".join(rng.choice(_LATIN_ONSETS) + rng.choice(_LATIN_VOWELS) for _ in range(rng.randint(1, 3)))


def _devanagari(rng: random.Random) -> str:
    return "".join(rng.choice(_DEV_CONSONANTS) + rng.choice(_DEV_MATRAS) for _ in range(rng.randint(2, 3)))


def _build_lexicon(spec: SynthSpec, rng: random.Random, suffixes: SuffixInventory):
    n = spec.vocab_size
    n_func = max(2, n // 10)
    n_verb = max(2, n // 5)
    n_adj = max(1, n // 5)
    n_noun = n - n_func - n_verb - n_adj
    taken_src: set = set()
    # source plurals must not collide with base words
    src = _pseudo_words(rng, n, lambda r: _latin(r).rstrip("s") or "ba", taken_src)
    taken_tgt: set = set()

    def tgt_word(r):
        w = _devanagari(r)
        return "" if any(w.endswith(s) for s in suffixes.suffixes) else w

    taken_tgt.add("")
    tgt = _pseudo_words(rng, n, tgt_word, taken_tgt)
    cats = ["func"] * n_func + ["verb"] * n_verb + ["adj"] * n_adj + ["noun"] * n_noun
    words: Dict[str, List[Tuple[str, str]]] = {"func": [], "verb": [], "adj": [], "noun": []}
    for s, t, c in zip(src, tgt, cats):
        words[c].append((s, t))
    plural = {t: rng.choice(suffixes.suffixes) for _, t in words["noun"]}
    return words, plural


def _noun_phrase(words, rng: random.Random, dets):
    out = []
    if rng.random() < 0.6:
        out.append(("func", rng.choice(dets)))
    if rng.random() < 0.4:
        out.append(("adj", rng.choice(words["adj"])))
    out.append(("noun", rng.choice(words["noun"])))
    return out


def generate(spec: SynthSpec, n_pairs: int) -> SynthCorpus:
    """A pure function of (spec, n_pairs)."""
    if n_pairs < 1:
        raise ValueError("n_pairs must be positive")
    rng = random.Random(spec.seed)
    suffixes = default_suffixes()
    words, plural = _build_lexicon(spec, rng, suffixes)
    func = words["func"]
    dets, preps = func[: max(1, len(func) // 2)], func[max(1, len(func) // 2):] or func
    content = [s for c in ("noun", "verb", "adj") for s, _ in words[c]]
    n_hold = int(round(spec.oov_fraction * len(content)))
    heldout = frozenset(rng.sample(content, n_hold)) if n_hold else frozenset()

    pairs: List[SentencePair] = []
    while len(pairs) < n_pairs:
        target_len = rng.randint(spec.min_len, spec.max_len)
        sent = _noun_phrase(words, rng, dets)
        sent.append(("verb", rng.choice(words["verb"])))
        sent += _noun_phrase(words, rng, dets)
        while len(sent) < target_len - 1:
            sent.append(("func", rng.choice(preps)))
            sent += _noun_phrase(words, rng, dets)
        if not spec.min_len <= len(sent) <= spec.max_len:
            continue
        source, target = [], []
        for cat, (s, t) in sent:
            if cat == "noun" and spec.inflection_rate and rng.random() < spec.inflection_rate:
                source.append(s + PLURAL)
                target.append(t + plural[t])
            else:
                source.append(s)
                target.append(t)
        if spec.word_order == "reversed":
            target.reverse()
        elif spec.word_order == "svo_to_sov":
            v = next(i for i, (cat, _) in enumerate(sent) if cat == "verb")
            target = target[:v] + target[v + 1:] + [target[v]]
        pairs.append(SentencePair(tuple(source), tuple(target), Origin("synthetic", len(pairs) + 1)))

    category = {"func": Category.FUNCTION_WORD, "verb": Category.VERB_PHRASE,
                "adj": Category.SYNSET, "noun": Category.SYNSET}
    lexicon = [
        LexiconEntry((s,), (t,), category[c]) for c in ("func", "verb", "adj", "noun") for s, t in words[c]
    ]
    return SynthCorpus(ParallelCorpus(pairs), lexicon, heldout, suffixes, plural)


def synset_records(entries: Sequence[LexiconEntry]) -> List[SynsetRecord]:
    """One record per synset entry, with multi-token targets underscore-joined."""
    return [SynsetRecord(e.source, ("_".join(e.target),)) for e in entries if e.category == Category.SYNSET]


def _base(word: str, heldout: FrozenSet[str]) -> str:
    return word[: -len(PLURAL)] if word.endswith(PLURAL) and word[: -len(PLURAL)] in heldout else word


def exclude_heldout(corpus: ParallelCorpus, heldout: FrozenSet[str]) -> ParallelCorpus:
    """Drop pairs whose source mentions a held-out word (plural forms included)."""
    return ParallelCorpus(
        p for p in corpus.pairs if not any(_base(w, heldout) in heldout for w in p.source)
    )


def split(corpus: ParallelCorpus, fractions: Sequence[float] = (0.8, 0.1, 0.1), seed: int = 0):
    """Disjoint train/dev/test partition; each part keeps corpus order."""
    if len(fractions) != 3 or any(f < 0 for f in fractions) or abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError(f"fractions must be three non-negative numbers summing to 1, got {fractions}")
    n = len(corpus)
    idx = list(range(n))
    random.Random(seed).shuffle(idx)
    n_train = int(round(fractions[0] * n))
    n_dev = min(int(round(fractions[1] * n)), n - n_train)
    parts = (idx[:n_train], idx[n_train:n_train + n_dev], idx[n_train + n_dev:])
    return tuple(ParallelCorpus(corpus.pairs[i] for i in sorted(part)) for part in parts)


JUNK_TOKENS = ("&nbsp;", "<br>", "###", "@@", "http://x.y", "|||", "~~")
NOISE_KINDS = ("merge", "empty", "junk", "misaligned")


def add_noise(corpus: ParallelCorpus, rate: float, seed: int = 0,
              kinds: Sequence[str] = NOISE_KINDS) -> ParallelCorpus:
    """Corrupt a `rate` share of the pairs the way scraped corpora go wrong.

    merge: target run together with following lines; empty: missing
    translation; junk: markup debris in the target; misaligned: target of
    another sentence (the kind mechanical cleaning cannot see).
    """
    if not 0.0 <= rate <= 1.0:
        raise ValueError("rate must be in [0, 1]")
    rng = random.Random(seed)
    pairs = list(corpus.pairs)
    targets = [p.target for p in pairs]
    out = []
    for i, p in enumerate(pairs):
        if rng.random() >= rate:
            out.append(p)
            continue
        kind = rng.choice(list(kinds))
        if kind == "merge":
            tgt = list(p.target)
            k = i + 1
            while len(tgt) <= 3 * max(len(p.source), 1):
                tgt += targets[k % len(targets)]
                k += 1
            new = tuple(tgt)
        elif kind == "empty":
            new = ()
        elif kind == "junk":
            tgt = list(p.target)
            for _ in range(rng.randint(1, 3)):
                tgt.insert(rng.randint(0, len(tgt)), rng.choice(JUNK_TOKENS))
            new = tuple(tgt)
        elif kind == "misaligned":
            new = targets[rng.randrange(len(targets))]
        else:
            raise ValueError(f"unknown noise kind {kind!r}")
        out.append(replace(p, target=new))
    return ParallelCorpus(out)
