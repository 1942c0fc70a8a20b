"""Phrase pair extraction from word alignments and phrase table scoring."""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .align import NULL, OOV_FLOOR, AlignmentMatrix, TranslationTable
from .corpus import ParallelCorpus, SentencePair

__all__ = [
    "PhrasePair",
    "PhraseEntry",
    "PhraseTable",
    "extract_phrases",
    "extract_corpus",
    "score_table",
    "lookup",
    "write_phrase_table",
    "read_phrase_table",
    "escape",
    "unescape",
]

Span = Tuple[int, int]  # half-open [start, end)


@dataclass(frozen=True)
class PhrasePair:
    source: Tuple[str, ...]
    target: Tuple[str, ...]
    source_span: Span
    target_span: Span
    # links relative to the phrase origin; determined by the spans and the alignment
    links: FrozenSet[Tuple[int, int]] = field(default=frozenset(), compare=False, hash=False)


@dataclass(frozen=True)
class PhraseEntry:
    target: Tuple[str, ...]
    scores: Tuple[float, float, float, float]  # phi(t|s), lex(t|s), phi(s|t), lex(s|t)

    @property
    def phi_ts(self) -> float:
        return self.scores[0]


@dataclass
class PhraseTable:
    entries: Dict[Tuple[str, ...], List[PhraseEntry]]

    @property
    def max_source_len(self) -> int:
        return max((len(s) for s in self.entries), default=0)

    def __len__(self):
        return sum(len(v) for v in self.entries.values())

    def __contains__(self, source) -> bool:
        return tuple(source) in self.entries


def extract_phrases(pair: SentencePair, alignment: AlignmentMatrix, max_len: int = 7) -> set:
    """All alignment-consistent phrase pairs with both sides at most `max_len`.

    Target spans are widened over unaligned boundary words; unaligned source
    boundary words come in through the enumeration of source spans itself.
    """
    ns, nt = len(pair.source), len(pair.target)
    if (alignment.source_len, alignment.target_len) != (ns, nt):
        raise ValueError(
            f"alignment is {alignment.source_len}x{alignment.target_len}, pair is {ns}x{nt}"
        )
    by_src = defaultdict(list)
    tgt_aligned = [False] * nt
    for i, j in alignment.links:
        by_src[i].append(j)
        tgt_aligned[j] = True

    out = set()
    for s0 in range(ns):
        t_min, t_max = nt, -1
        for s1 in range(s0, min(ns, s0 + max_len)):
            for j in by_src.get(s1, ()):
                t_min, t_max = min(t_min, j), max(t_max, j)
            if t_max < 0 or t_max - t_min + 1 > max_len:
                continue
            if any(
                j >= t_min and j <= t_max and not s0 <= i <= s1 for i, j in alignment.links
            ):
                continue
            inside = [(i, j) for i, j in alignment.links if s0 <= i <= s1]
            t0 = t_min
            while True:
                t1 = t_max
                while True:
                    if t1 - t0 + 1 > max_len:
                        break
                    links = frozenset((i - s0, j - t0) for i, j in inside)
                    out.add(
                        PhrasePair(
                            pair.source[s0 : s1 + 1],
                            pair.target[t0 : t1 + 1],
                            (s0, s1 + 1),
                            (t0, t1 + 1),
                            links,
                        )
                    )
                    t1 += 1
                    if t1 >= nt or tgt_aligned[t1]:
                        break
                t0 -= 1
                if t0 < 0 or tgt_aligned[t0] or t_max - t0 + 1 > max_len:
                    break
    return out


def extract_corpus(
    corpus: ParallelCorpus, alignments: Sequence[AlignmentMatrix], max_len: int = 7
) -> List[PhrasePair]:
    """Extracted phrase pairs of every clean pair, as a multiset in corpus order."""
    pairs = corpus.clean_pairs()
    if len(pairs) != len(alignments):
        raise ValueError(f"{len(alignments)} alignments for {len(pairs)} clean pairs")
    out: List[PhrasePair] = []
    for p, a in zip(pairs, alignments):
        out.extend(sorted(extract_phrases(p, a, max_len), key=lambda pp: (pp.source_span, pp.target_span)))
    return out


def _lexical_weight(
    src: Sequence[str], tgt: Sequence[str], links: Iterable[Tuple[int, int]], table: TranslationTable
) -> float:
    """Product over target words of the mean t(target|source) across their links."""
    linked = defaultdict(list)
    for i, j in links:
        linked[j].append(i)
    weight = 1.0
    for j, f in enumerate(tgt):
        if linked[j]:
            weight *= sum(table.prob(f, src[i], OOV_FLOOR) for i in linked[j]) / len(linked[j])
        else:
            weight *= table.prob(f, NULL, OOV_FLOOR)
    return max(weight, OOV_FLOOR ** len(tgt))


def score_table(
    extracted: Iterable[PhrasePair], table: TranslationTable, table_rev: TranslationTable
) -> PhraseTable:
    """Relative frequencies in both directions plus both lexical weights.

    `table` holds t(target|source) and `table_rev` t(source|target). When a
    phrase pair was seen with several internal alignments the highest
    lexical weight is kept.
    """
    joint: Counter = Counter()
    lex_fwd: Dict[Tuple, float] = {}
    lex_bwd: Dict[Tuple, float] = {}
    for pp in extracted:
        key = (pp.source, pp.target)
        joint[key] += 1
        fw = _lexical_weight(pp.source, pp.target, pp.links, table)
        bw = _lexical_weight(pp.target, pp.source, [(j, i) for i, j in pp.links], table_rev)
        lex_fwd[key] = max(lex_fwd.get(key, 0.0), fw)
        lex_bwd[key] = max(lex_bwd.get(key, 0.0), bw)
    src_count: Counter = Counter()
    tgt_count: Counter = Counter()
    for (s, t), c in joint.items():
        src_count[s] += c
        tgt_count[t] += c
    entries: Dict[Tuple[str, ...], List[PhraseEntry]] = defaultdict(list)
    for (s, t), c in joint.items():
        entries[s].append(
            PhraseEntry(t, (c / src_count[s], lex_fwd[(s, t)], c / tgt_count[t], lex_bwd[(s, t)]))
        )
    for s in entries:
        entries[s].sort(key=lambda e: (-e.phi_ts, e.target))
    return PhraseTable(dict(entries))


def lookup(table: PhraseTable, source_phrase: Sequence[str], top_k: int = 20) -> List[PhraseEntry]:
    """Up to `top_k` translations by descending phi(t|s), ties by target tokens."""
    found = table.entries.get(tuple(source_phrase), [])
    return sorted(found, key=lambda e: (-e.phi_ts, e.target))[:top_k]


def escape(token: str) -> str:
    """Make a token safe inside `|||`-separated fields."""
    return token.replace("&", "&amp;").replace("|", "&#124;")


def unescape(token: str) -> str:
    return token.replace("&#124;", "|").replace("&amp;", "&")


def write_phrase_table(table: PhraseTable, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for s in sorted(table.entries):
            src = " ".join(map(escape, s))
            for e in sorted(table.entries[s], key=lambda e: (-e.phi_ts, e.target)):
                scores = " ".join(repr(x) for x in e.scores)
                fh.write(f"{src} ||| {' '.join(map(escape, e.target))} ||| {scores}\n")


def read_phrase_table(path) -> PhraseTable:
    entries: Dict[Tuple[str, ...], List[PhraseEntry]] = defaultdict(list)
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(" ||| ")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'src ||| tgt ||| scores'")
            scores = tuple(float(x) for x in parts[2].split())
            if len(scores) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 scores, got {len(scores)}")
            entries[tuple(map(unescape, parts[0].split()))].append(
                PhraseEntry(tuple(map(unescape, parts[1].split())), scores)
            )
    return PhraseTable(dict(entries))
