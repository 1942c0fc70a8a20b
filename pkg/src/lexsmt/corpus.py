"""Parallel corpus loading, tokenization and mechanical cleaning.

Cleaning never deletes: offending pairs are flagged with the first rule
they fail, so the transition from a raw corpus to its clean view stays
auditable through the flag report.
"""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

__all__ = [
    "CorpusError",
    "LineCountMismatch",
    "CorpusDecodeError",
    "Origin",
    "SentencePair",
    "ParallelCorpus",
    "CleaningRuleSet",
    "CorpusStats",
    "SCRIPT_RANGES",
    "FLAG_ORDER",
    "tokenize",
    "detokenize",
    "load_corpus",
    "save_corpus",
    "clean",
    "corpus_stats",
    "write_flag_report",
]

# Terminal punctuation detached from the end of tokens; the danda folds to ".".
TERMINAL_PUNCT = ".,?!।"
DANDA = "।"

FLAG_ORDER = ("empty", "length", "ratio", "script", "duplicate")

# Inclusive code point ranges usable in CleaningRuleSet.allowed_script_ranges.
SCRIPT_RANGES: Dict[str, Tuple[Tuple[int, int], ...]] = {
    "latin": ((0x0021, 0x007E), (0x00C0, 0x024F)),
    "devanagari": ((0x0900, 0x097F), (0xA8E0, 0xA8FF), (0x200C, 0x200D)),
    "punctuation": ((0x0021, 0x002F), (0x003A, 0x0040), (0x2010, 0x2027)),
    "digits": ((0x0030, 0x0039),),
}


class CorpusError(ValueError):
    pass


class LineCountMismatch(CorpusError):
    def __init__(self, source_path, target_path, source_count, target_count):
        self.source_count = source_count
        self.target_count = target_count
        super().__init__(
            f"line count mismatch: {source_path} has {source_count} lines, "
            f"{target_path} has {target_count} lines ({source_count} != {target_count})"
        )


class CorpusDecodeError(CorpusError):
    def __init__(self, path, offset, reason):
        self.path = path
        self.offset = offset
        super().__init__(f"{path}: invalid UTF-8 at byte offset {offset}: {reason}")


@dataclass(frozen=True)
class Origin:
    file: str
    line: int

    def __post_init__(self):
        if self.line < 1:
            raise ValueError(f"origin line numbers start at 1, got {self.line}")

    def __str__(self):
        return f"{self.file}:{self.line}"


@dataclass(frozen=True)
class SentencePair:
    source: Tuple[str, ...]
    target: Tuple[str, ...]
    origin: Origin
    flag: Optional[str] = None  # None means clean

    def __post_init__(self):
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "target", tuple(self.target))
        for tok in self.source + self.target:
            if not tok or any(ch.isspace() for ch in tok):
                raise ValueError(f"invalid token {tok!r} in pair from {self.origin}")

    @property
    def is_clean(self) -> bool:
        return self.flag is None

    @property
    def status(self) -> str:
        return "clean" if self.flag is None else f"flagged({self.flag})"

    def swapped(self) -> "SentencePair":
        return replace(self, source=self.target, target=self.source)


@dataclass(frozen=True)
class ParallelCorpus:
    pairs: Tuple[SentencePair, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))

    def __len__(self):
        return len(self.pairs)

    def __iter__(self) -> Iterator[SentencePair]:
        return iter(self.pairs)

    def __getitem__(self, i):
        return self.pairs[i]

    def clean_pairs(self) -> List[SentencePair]:
        return [p for p in self.pairs if p.is_clean]

    def clean_view(self) -> "ParallelCorpus":
        """The corpus restricted to unflagged pairs, order preserved."""
        return ParallelCorpus(self.clean_pairs())

    @property
    def source_vocab(self) -> Counter:
        return Counter(tok for p in self.pairs if p.is_clean for tok in p.source)

    @property
    def target_vocab(self) -> Counter:
        return Counter(tok for p in self.pairs if p.is_clean for tok in p.target)

    def swapped(self) -> "ParallelCorpus":
        return ParallelCorpus(p.swapped() for p in self.pairs)

    @classmethod
    def from_token_pairs(cls, pairs: Iterable[Tuple[Sequence[str], Sequence[str]]], name="<memory>"):
        return cls(
            SentencePair(tuple(s), tuple(t), Origin(name, i + 1)) for i, (s, t) in enumerate(pairs)
        )


@dataclass(frozen=True)
class CleaningRuleSet:
    max_length_ratio: float = 3.0
    max_tokens: int = 80
    # side -> code point ranges; a side missing from the mapping is unchecked
    allowed_script_ranges: Mapping[str, Tuple[Tuple[int, int], ...]] = field(default_factory=dict)
    drop_empty: bool = True
    drop_duplicates: bool = True

    def __post_init__(self):
        if not self.max_length_ratio >= 1:
            raise ValueError(f"max_length_ratio must be >= 1, got {self.max_length_ratio}")
        if self.max_tokens < 1:
            raise ValueError(f"max_tokens must be >= 1, got {self.max_tokens}")
        for side in self.allowed_script_ranges:
            if side not in ("source", "target"):
                raise ValueError(f"unknown side {side!r} in allowed_script_ranges")

    @staticmethod
    def ranges(*names: str) -> Tuple[Tuple[int, int], ...]:
        """Union of named presets from SCRIPT_RANGES."""
        out: List[Tuple[int, int]] = []
        for name in names:
            out.extend(SCRIPT_RANGES[name])
        return tuple(out)


def tokenize(line: str, side: str = "source") -> List[str]:
    """Whitespace split, then detach trailing punctuation as separate tokens.

    The danda is normalized to "." on either side. Only whole punctuation
    code points are detached, so combining marks always stay with their base.

    >>> tokenize("the cat.")
    ['the', 'cat', '.']
    """
    if side not in ("source", "target"):
        raise ValueError(f"side must be 'source' or 'target', got {side!r}")
    tokens: List[str] = []
    for raw in line.split():
        trailing: List[str] = []
        while raw and raw[-1] in TERMINAL_PUNCT:
            trailing.append("." if raw[-1] == DANDA else raw[-1])
            raw = raw[:-1]
        if raw:
            tokens.append(raw)
        tokens.extend(reversed(trailing))
    return tokens


def detokenize(tokens: Sequence[str]) -> str:
    return " ".join(tokens)


def _read_lines(path) -> List[str]:
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CorpusDecodeError(os.fspath(path), exc.start, exc.reason) from None
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [ln.rstrip("\r") for ln in lines]


def load_corpus(source_path, target_path) -> ParallelCorpus:
    """Pair line i of the source file with line i of the target file."""
    src_lines = _read_lines(source_path)
    tgt_lines = _read_lines(target_path)
    if len(src_lines) != len(tgt_lines):
        raise LineCountMismatch(source_path, target_path, len(src_lines), len(tgt_lines))
    name = os.path.basename(os.fspath(source_path))
    return ParallelCorpus(
        SentencePair(tokenize(s, "source"), tokenize(t, "target"), Origin(name, i + 1))
        for i, (s, t) in enumerate(zip(src_lines, tgt_lines))
    )


def save_corpus(corpus: ParallelCorpus, source_path, target_path, clean_only: bool = False) -> None:
    pairs = corpus.clean_pairs() if clean_only else corpus.pairs
    with open(source_path, "w", encoding="utf-8", newline="\n") as fs, open(
        target_path, "w", encoding="utf-8", newline="\n"
    ) as ft:
        for p in pairs:
            fs.write(detokenize(p.source) + "\n")
            ft.write(detokenize(p.target) + "\n")


def _in_ranges(ch: str, ranges) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in ranges)


def _first_violation(pair: SentencePair, rules: CleaningRuleSet, seen: set) -> Optional[str]:
    ns, nt = len(pair.source), len(pair.target)
    if rules.drop_empty and (ns == 0 or nt == 0):
        return "empty"
    if ns > rules.max_tokens or nt > rules.max_tokens:
        return "length"
    if ns and nt and max(ns, nt) / min(ns, nt) > rules.max_length_ratio:
        return "ratio"
    for side, tokens in (("source", pair.source), ("target", pair.target)):
        ranges = rules.allowed_script_ranges.get(side)
        if ranges is not None and not all(_in_ranges(ch, ranges) for tok in tokens for ch in tok):
            return "script"
    if rules.drop_duplicates and (pair.source, pair.target) in seen:
        return "duplicate"
    return None


def clean(corpus: ParallelCorpus, rules: Optional[CleaningRuleSet] = None) -> ParallelCorpus:
    """Flag every pair that breaks a rule; nothing is removed or reordered.

    Status is recomputed from the tokens alone, which makes the operation
    idempotent. A duplicate is any pair token-identical to an earlier one.
    """
    rules = rules or CleaningRuleSet()
    seen: set = set()
    out = []
    for pair in corpus.pairs:
        reason = _first_violation(pair, rules, seen)
        seen.add((pair.source, pair.target))
        out.append(replace(pair, flag=reason))
    return ParallelCorpus(out)


def write_flag_report(corpus: ParallelCorpus, path) -> int:
    """Write `line<TAB>reason<TAB>source<TAB>target` for flagged pairs."""
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for p in corpus.pairs:
            if p.flag is not None:
                fh.write(f"{p.origin.line}\t{p.flag}\t{detokenize(p.source)}\t{detokenize(p.target)}\n")
                n += 1
    return n


@dataclass
class CorpusStats:
    total: int
    clean: int
    flagged: int
    flag_reasons: Counter
    source_tokens: int
    target_tokens: int
    source_vocab_size: int
    target_vocab_size: int
    source_lengths: Counter
    target_lengths: Counter

    def as_rows(self) -> List[Tuple[str, object]]:
        rows = [
            ("pairs_total", self.total),
            ("pairs_clean", self.clean),
            ("pairs_flagged", self.flagged),
            ("source_tokens", self.source_tokens),
            ("target_tokens", self.target_tokens),
            ("source_vocab", self.source_vocab_size),
            ("target_vocab", self.target_vocab_size),
        ]
        rows += [(f"flag_{r}", self.flag_reasons[r]) for r in FLAG_ORDER if self.flag_reasons[r]]
        return rows


def corpus_stats(corpus: ParallelCorpus) -> CorpusStats:
    """Counts over the corpus; token and vocabulary figures cover clean pairs only."""
    clean_pairs = corpus.clean_pairs()
    src_vocab, tgt_vocab = corpus.source_vocab, corpus.target_vocab
    return CorpusStats(
        total=len(corpus),
        clean=len(clean_pairs),
        flagged=len(corpus) - len(clean_pairs),
        flag_reasons=Counter(p.flag for p in corpus.pairs if p.flag is not None),
        source_tokens=sum(src_vocab.values()),
        target_tokens=sum(tgt_vocab.values()),
        source_vocab_size=len(src_vocab),
        target_vocab_size=len(tgt_vocab),
        source_lengths=Counter(len(p.source) for p in clean_pairs),
        target_lengths=Counter(len(p.target) for p in clean_pairs),
    )
