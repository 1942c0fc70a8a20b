import math
import random

import pytest
from hypothesis import given, strategies as st

from lexsmt.metrics import (
    bleu,
    bleu_from_stats,
    bleu_stats,
    edit_distance,
    evaluate,
    evaluate_corpus,
    format_table,
    meteor_lite,
    ter,
)


def s(text):
    return text.split()


# --- golden values ------------------------------------------------------------


def test_bleu_identity():
    h = s("the cat sat on the mat")
    assert bleu([h], [h]).score == 1.0


def test_bleu_brevity():
    r = bleu([s("the cat sat")], [s("the cat sat down")], max_n=2)
    assert r.precisions == [1.0, 1.0]
    assert abs(r.brevity_penalty - math.exp(1 - 4 / 3)) < 1e-12
    assert abs(r.score - math.exp(1 - 4 / 3)) < 1e-9


def test_bleu_clipping():
    r = bleu([s("the the the")], [s("the cat")], max_n=1)
    assert r.precisions[0] == 1 / 3
    assert r.matches == [1] and r.totals == [3]


def test_bleu_zero_precision_gives_zero():
    assert bleu([s("a b c d")], [s("a c b d")]).score == 0.0
    assert bleu([s("a b c d")], [s("a c b d")], smoothing="add1").score > 0.0


def test_bleu_length_mismatch():
    with pytest.raises(ValueError):
        bleu([s("a")], [])


def test_ter_examples():
    assert ter(s("a b c"), s("a b c")).score == 0.0
    r = ter(s("a b c d e"), s("a b x d e"))
    assert r.score == 0.2 and r.substitutions == 1
    r = ter(s("c a b"), s("a b c"))
    assert r.shifts == 1 and r.edits == 1 and r.score == 1 / 3
    assert ter(s("c a b"), s("a b c"), shifts=False).edits == 2


def test_ter_empty_reference():
    with pytest.raises(ValueError):
        ter(s("a"), [])


def test_edit_distance_breakdown():
    d, ops = edit_distance(s("a b c"), s("a x c d"))
    assert d == 2 and ops == {"ins": 1, "del": 0, "sub": 1}


def test_meteor_examples():
    r = meteor_lite(s("the cat"), s("the cat"))
    assert r.score == 0.9375 and r.chunks == 1 and r.matches == 2
    assert meteor_lite(s("a b"), s("c d")).score == 0.0
    r = meteor_lite(s("b a"), s("a b"))
    assert r.chunks == 2 and r.score == 0.5


def test_meteor_min_chunks_not_greedy():
    # greedy left-to-right would link the first "a" to ref position 0 and get 3 chunks
    r = meteor_lite(s("a b a"), s("x a y a b"))
    assert r.matches == 3 and r.chunks == 2


# --- corpus reports -----------------------------------------------------------


def write(path, lines):
    path.write_text("".join(l + "\n" for l in lines), encoding="utf-8")


def test_identical_files(tmp_path):
    lines = ["a b c d", "e f g h i"]
    write(tmp_path / "h", lines)
    write(tmp_path / "r", lines)
    rep = evaluate_corpus(tmp_path / "h", tmp_path / "r")
    b, m, t = rep.row()
    assert b == 100.0 and t == 0.0
    assert 0 < m < 1  # chunk penalty applies even to a perfect match
    assert all(x < 1 for x in rep.sentence_meteor)


def test_empty_hypotheses(tmp_path):
    write(tmp_path / "h", ["", ""])
    write(tmp_path / "r", ["a b c", "d e"])
    rep = evaluate_corpus(tmp_path / "h", tmp_path / "r")
    assert rep.bleu == 0.0
    assert rep.sentence_ter == [1.0, 1.0] and rep.ter == 1.0


def test_line_mismatch(tmp_path):
    write(tmp_path / "h", ["a"])
    write(tmp_path / "r", ["a", "b"])
    with pytest.raises(ValueError):
        evaluate_corpus(tmp_path / "h", tmp_path / "r")


def test_format_table_columns():
    rep = evaluate([s("a b c d")], [s("a b c d")])
    text = format_table([("baseline", "Without Tuning", rep), ("broken", "With Tuning", None)])
    head = text.splitlines()[0]
    assert "BLEU score" in head and "METEOR" in head and "TER" in head
    assert "failed" in text.splitlines()[2]
    assert "100.00" in text.splitlines()[1]


def test_dump_is_tab_separated():
    rep = evaluate([s("a b c")], [s("a b d")])
    rows = dict(line.split("\t") for line in rep.dump().splitlines())
    assert set(rows) >= {"BLEU", "METEOR", "TER"}


# --- properties ---------------------------------------------------------------

tokens = st.lists(st.sampled_from("abcde"), min_size=1, max_size=8)


@given(tokens, tokens)
def test_ranges_and_determinism(h, r):
    b = bleu([h], [r]).score
    m = meteor_lite(h, r).score
    t = ter(h, r).score
    assert 0 <= b <= 1 and 0 <= m <= 1 and t >= 0
    assert (b, m, t) == (bleu([h], [r]).score, meteor_lite(h, r).score, ter(h, r).score)
    assert bleu_stats(h, r)[0] <= bleu_stats(h, r)[1]  # clipped p1 <= 1


@given(tokens)
def test_self_scores(h):
    assert bleu([h], [h], smoothing="add1").score == 1.0
    assert ter(h, h).score == 0.0


@given(tokens, tokens, st.sampled_from("abcdexyz"))
def test_meteor_matches_monotone(h, r, w):
    assert meteor_lite(h + [w], r + [w]).matches >= meteor_lite(h, r).matches


def test_ter_shifts_never_hurt():
    rng = random.Random(0)
    for _ in range(600):
        r = [rng.choice("abcdef") for _ in range(rng.randint(1, 10))]
        h = r[:]
        rng.shuffle(h)
        if rng.random() < 0.5:
            h = [x if rng.random() > 0.2 else rng.choice("abcdefg") for x in h]
        if rng.random() < 0.3:
            h = h[: rng.randint(0, len(h))]
        assert ter(h, r).edits <= ter(h, r, shifts=False).edits


def test_corpus_bleu_from_summed_stats():
    hyps = [s("a b c d"), s("e f g")]
    refs = [s("a b c x"), s("e f g h")]
    total = [a + b for a, b in zip(bleu_stats(hyps[0], refs[0]), bleu_stats(hyps[1], refs[1]))]
    assert bleu_from_stats(total).score == bleu(hyps, refs).score
