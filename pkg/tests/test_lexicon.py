import pytest
from hypothesis import given, strategies as st

from lexsmt.corpus import Origin, ParallelCorpus, SentencePair
from lexsmt.lexicon import (
    Category,
    LexiconEntry,
    LexiconParseError,
    SuffixInventory,
    SynsetRecord,
    default_suffixes,
    expand_synsets,
    grapheme_count,
    inject,
    join_suffixes,
    load_lexicon,
    load_suffixes,
    load_synsets,
    split_suffixes,
    split_token,
)

INV = default_suffixes()


def corpus_of(*pairs):
    return ParallelCorpus.from_token_pairs([(s.split(), t.split()) for s, t in pairs])


def test_abandon_synset():
    rec = SynsetRecord(("abandon",), (("स्थान_त्यागना",), ("स्थान_खाली_करना",), ("स्थान_छोड़ना",)))
    out = expand_synsets([rec])
    assert [(e.source, e.target) for e in out] == [
        (("abandon",), ("स्थान", "त्यागना")),
        (("abandon",), ("स्थान", "खाली", "करना")),
        (("abandon",), ("स्थान", "छोड़ना")),
    ]
    assert all(e.category == Category.SYNSET for e in out)


def test_synset_counts():
    assert len(expand_synsets([SynsetRecord(("w",), (("a",),))])) == 1
    recs = [SynsetRecord(("w",), (("a",), ("b",))), SynsetRecord(("w",), (("b",), ("c",), ("d",)))]
    assert len(expand_synsets(recs)) == 4


def test_synset_without_synonyms():
    with pytest.raises(ValueError):
        SynsetRecord(("w",), ())


def test_suffix_split_examples():
    c = corpus_of(("photo and video arts", "फोटो व वीडियो कलाओं"), ("activities", "गतिविधियाँ"))
    out = split_suffixes(c, INV, "target")
    assert out[0].target == ("फोटो", "व", "वीडियो", "कला", "ओं")
    assert out[1].target == ("गतिविधि", "याँ")
    assert out[0].source == c[0].source


def test_suffix_guard():
    inv = SuffixInventory(("ओं",), min_stem_length=2)
    assert split_token("कओं", inv) == ("कओं",)  # one-cluster stem is too short
    assert split_token("ओं", INV) == ("ओं",)
    assert split_token("कलाओं", inv) == ("कला", "ओं")


def test_inventory_ordering():
    inv = SuffixInventory(("ों", "ओं", "याँ", "एं"))
    assert [len(s) for s in inv.suffixes] == sorted((len(s) for s in inv.suffixes), reverse=True)
    with pytest.raises(ValueError):
        SuffixInventory(("",))


def test_grapheme_count():
    assert grapheme_count("कला") == 2
    assert grapheme_count("गर्मी") == 2


def test_inject_counts_and_examples():
    base = corpus_of(*[("s%d" % i, "t%d" % i) for i in range(100)])
    fw = LexiconEntry(("Somebody",), ("किन्ही-किन्ही", "लोगों"), Category.FUNCTION_WORD)
    vp = LexiconEntry(tuple("Blow out of the water".split()), ("भौचक्का", "होना"), Category.VERB_PHRASE)
    other = LexiconEntry(("x",), ("y",), Category.SYNSET)
    out = inject(base, [fw, vp, other])
    assert len(out) == 103
    assert (fw.source, fw.target) in [(p.source, p.target) for p in out]
    twice = inject(base, [vp], repeat=2)
    assert [(p.source, p.target) for p in twice].count((vp.source, vp.target)) == 2
    with pytest.raises(ValueError):
        inject(base, [vp], repeat=0)


def test_load_lexicon(tmp_path):
    f = tmp_path / "fw.tsv"
    f.write_text("# function words\nSomebody\tकिन्ही-किन्ही लोगों\n\n", encoding="utf-8")
    entries = load_lexicon(f, "function_word")
    assert entries == [LexiconEntry(("Somebody",), ("किन्ही-किन्ही", "लोगों"), Category.FUNCTION_WORD)]
    empty = tmp_path / "e.tsv"
    empty.write_text("", encoding="utf-8")
    assert load_lexicon(empty, "verb_phrase") == []
    bad = tmp_path / "bad.tsv"
    bad.write_text("abc\n", encoding="utf-8")
    with pytest.raises(LexiconParseError) as err:
        load_lexicon(bad, "synset")
    assert err.value.lineno == 1


def test_load_synsets_and_suffixes(tmp_path):
    f = tmp_path / "syn.tsv"
    f.write_text("abandon\tस्थान_त्यागना,स्थान_खाली_करना,स्थान_छोड़ना\n", encoding="utf-8")
    assert len(expand_synsets(load_synsets(f))) == 3
    g = tmp_path / "suf.txt"
    g.write_text("ों\nयाँ\n", encoding="utf-8")
    assert load_suffixes(g).suffixes == ("याँ", "ों")


# --- properties -------------------------------------------------------------

STEMS = st.sampled_from(["कला", "गतिविधि", "लड़क", "घर", "क", "ओ", "नदी"])
TOKENS = st.builds(lambda a, b: a + b, STEMS, st.sampled_from(["", "ओं", "याँ", "एं", "ों", "ी"]))
SIDES = st.lists(TOKENS, min_size=1, max_size=8).map(tuple)
CORPORA = st.lists(st.tuples(SIDES, SIDES), max_size=10).map(ParallelCorpus.from_token_pairs)


@given(CORPORA, st.sampled_from(["source", "target"]), st.integers(1, 3))
def test_split_reversible(corpus, side, min_stem):
    inv = SuffixInventory(INV.suffixes, min_stem)
    out = split_suffixes(corpus, inv, side)
    other = "target" if side == "source" else "source"
    assert len(out) == len(corpus)
    for before, after in zip(corpus, out):
        assert getattr(after, other) == getattr(before, other)
        assert ["".join(split_token(tok, inv)) for tok in getattr(before, side)] == list(getattr(before, side))
        pieces = [split_token(tok, inv) for tok in getattr(before, side)]
        assert tuple(t for p in pieces for t in p) == getattr(after, side)
        assert all(len(p) <= 2 for p in pieces)


@given(SIDES)
def test_join_undoes_split_when_no_bare_suffix(tokens):
    tokens = tuple(t for t in tokens if t not in INV.suffixes)
    split = [part for tok in tokens for part in split_token(tok, INV)]
    assert tuple(join_suffixes(split, INV)) == tokens


ENTRIES = st.lists(
    st.builds(LexiconEntry, SIDES, SIDES, st.sampled_from(list(Category))), max_size=6
)


@given(CORPORA, ENTRIES, st.integers(1, 3))
def test_inject_superset_and_order(corpus, entries, repeat):
    out = inject(corpus, entries, repeat)
    assert len(out) == len(corpus) + repeat * len(entries)
    assert out.pairs[: len(corpus)] == corpus.pairs
    injected = [(p.source, p.target) for p in out.pairs[len(corpus):]]
    assert injected == [(e.source, e.target) for e in entries for _ in range(repeat)]
    src_vocab, tgt_vocab = set(out.source_vocab), set(out.target_vocab)
    assert set(corpus.source_vocab) | {w for e in entries for w in e.source} <= src_vocab
    assert set(corpus.target_vocab) | {w for e in entries for w in e.target} <= tgt_vocab


@given(st.lists(st.tuples(st.sampled_from("abc"), st.lists(st.sampled_from("xyz"), min_size=1, max_size=4)), max_size=8))
def test_expand_size(records):
    recs = [SynsetRecord((h,), tuple((s,) for s in syns)) for h, syns in records]
    per_head = {}
    for h, syns in records:
        per_head.setdefault(h, set()).update(syns)
    assert len(expand_synsets(recs)) == sum(len(v) for v in per_head.values())
