"""Lexical resources: synset expansion, function words, verb phrases, suffix splitting."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from importlib import resources
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import regex

from .corpus import Origin, ParallelCorpus, SentencePair, tokenize

__all__ = [
    "Category",
    "LexiconEntry",
    "SynsetRecord",
    "SuffixInventory",
    "LexiconParseError",
    "expand_synsets",
    "split_token",
    "split_suffixes",
    "join_suffixes",
    "inject",
    "load_lexicon",
    "save_lexicon",
    "load_synsets",
    "load_suffixes",
    "default_suffixes",
    "grapheme_count",
]


class Category(str, enum.Enum):
    SYNSET = "synset"
    FUNCTION_WORD = "function_word"
    VERB_PHRASE = "verb_phrase"


class LexiconParseError(ValueError):
    def __init__(self, path, lineno, message):
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}")


@dataclass(frozen=True)
class LexiconEntry:
    source: Tuple[str, ...]
    target: Tuple[str, ...]
    category: Category

    def __post_init__(self):
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "target", tuple(self.target))
        object.__setattr__(self, "category", Category(self.category))
        if not self.source or not self.target:
            raise ValueError("lexicon entries need tokens on both sides")
        if any("\t" in tok for tok in self.source + self.target):
            raise ValueError("lexicon tokens may not contain tabs")


@dataclass(frozen=True)
class SynsetRecord:
    headword: Tuple[str, ...]
    synonyms: Tuple[Tuple[str, ...], ...]

    def __post_init__(self):
        head = tuple(self.headword)
        if not head:
            raise ValueError("synset headword is empty")
        syns: List[Tuple[str, ...]] = []
        for s in self.synonyms:
            s = (s,) if isinstance(s, str) else tuple(s)
            if s and s not in syns:
                syns.append(s)
        if not syns:
            raise ValueError(f"synset record for {' '.join(head)!r} has no synonyms")
        object.__setattr__(self, "headword", head)
        object.__setattr__(self, "synonyms", tuple(syns))


def grapheme_count(text: str) -> int:
    """Number of extended grapheme clusters (a Devanagari akshara counts once)."""
    return len(regex.findall(r"\X", text))


@dataclass(frozen=True)
class SuffixInventory:
    suffixes: Tuple[str, ...]
    min_stem_length: int = 1

    def __post_init__(self):
        if any(not s for s in self.suffixes):
            raise ValueError("empty suffix in inventory")
        if self.min_stem_length < 1:
            raise ValueError("min_stem_length must be positive")
        # longest first; equal lengths in code point order so matching is deterministic
        ordered = sorted(set(self.suffixes), key=lambda s: (-len(s), s))
        object.__setattr__(self, "suffixes", tuple(ordered))


def _unjoin(tokens: Sequence[str]) -> Tuple[str, ...]:
    return tuple(part for tok in tokens for part in tok.split("_") if part)


def expand_synsets(records: Iterable[SynsetRecord]) -> List[LexiconEntry]:
    """One synset entry per distinct (headword, synonym), first-seen order.

    Underscore-joined compounds become space-separated token sequences.
    """
    out: List[LexiconEntry] = []
    seen = set()
    for rec in records:
        head = _unjoin(rec.headword)
        for syn in rec.synonyms:
            key = (head, _unjoin(syn))
            if key in seen:
                continue
            seen.add(key)
            out.append(LexiconEntry(key[0], key[1], Category.SYNSET))
    return out


def split_token(token: str, inv: SuffixInventory) -> Tuple[str, ...]:
    for suf in inv.suffixes:
        if len(token) > len(suf) and token.endswith(suf):
            stem = token[: -len(suf)]
            if grapheme_count(stem) >= inv.min_stem_length:
                return (stem, suf)
    return (token,)


def split_suffixes(corpus: ParallelCorpus, inv: SuffixInventory, side: str = "target") -> ParallelCorpus:
    """Split at most one inventory suffix off every token on one side."""
    if side not in ("source", "target"):
        raise ValueError(f"side must be 'source' or 'target', got {side!r}")
    cache: Dict[str, Tuple[str, ...]] = {}

    def split_seq(tokens):
        out: List[str] = []
        for tok in tokens:
            if tok not in cache:
                cache[tok] = split_token(tok, inv)
            out.extend(cache[tok])
        return tuple(out)

    return ParallelCorpus(
        replace(p, **{side: split_seq(getattr(p, side))}) for p in corpus.pairs
    )


def join_suffixes(tokens: Sequence[str], inv: SuffixInventory) -> List[str]:
    """Reattach standalone suffix tokens to the preceding token."""
    suffixes = set(inv.suffixes)
    out: List[str] = []
    for tok in tokens:
        if tok in suffixes and out:
            out[-1] += tok
        else:
            out.append(tok)
    return out


def inject(corpus: ParallelCorpus, entries: Sequence[LexiconEntry], repeat: int = 1) -> ParallelCorpus:
    """Append each entry `repeat` times as a sentence pair after the corpus."""
    if repeat < 1:
        raise ValueError(f"repeat must be >= 1, got {repeat}")
    extra = [
        SentencePair(e.source, e.target, Origin(f"lexicon:{e.category.value}", i + 1))
        for i, e in enumerate(entries)
        for _ in range(repeat)
    ]
    return ParallelCorpus(corpus.pairs + tuple(extra))


def _data_lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield lineno, line


def load_lexicon(path, category) -> List[LexiconEntry]:
    category = Category(category)
    entries = []
    for lineno, line in _data_lines(path):
        if "\t" not in line:
            raise LexiconParseError(path, lineno, "expected source<TAB>target")
        src, tgt = line.split("\t", 1)
        src_toks, tgt_toks = tokenize(src, "source"), tokenize(tgt, "target")
        if not src_toks or not tgt_toks:
            raise LexiconParseError(path, lineno, "empty side")
        if "\t" in tgt:
            raise LexiconParseError(path, lineno, "more than one tab")
        entries.append(LexiconEntry(src_toks, tgt_toks, category))
    return entries


def save_lexicon(entries: Iterable[LexiconEntry], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for e in entries:
            fh.write(" ".join(e.source) + "\t" + " ".join(e.target) + "\n")


def load_synsets(path) -> List[SynsetRecord]:
    """Read `headword<TAB>syn1,syn2,...` lines."""
    records = []
    for lineno, line in _data_lines(path):
        if "\t" not in line:
            raise LexiconParseError(path, lineno, "expected headword<TAB>synonyms")
        head, syns = line.split("\t", 1)
        synonyms = [tuple(s.split()) for s in syns.split(",") if s.strip()]
        try:
            records.append(SynsetRecord(tuple(head.split()), tuple(synonyms)))
        except ValueError as exc:
            raise LexiconParseError(path, lineno, str(exc)) from None
    return records


def load_suffixes(path, min_stem_length: int = 1) -> SuffixInventory:
    suffixes = [line.strip() for _, line in _data_lines(path)]
    return SuffixInventory(tuple(suffixes), min_stem_length)


def default_suffixes(min_stem_length: int = 1) -> SuffixInventory:
    """The small shipped Hindi plural inventory; replace it for real work."""
    path = resources.files("lexsmt") / "data" / "hindi_suffixes.txt"
    with resources.as_file(path) as p:
        return load_suffixes(p, min_stem_length)
