import math
import random
import time

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lexsmt.decoder import (
    FEATURES,
    DecoderConfig,
    DecodingError,
    WeightVector,
    decode,
    derivation_features,
    future_cost,
    nbest,
    translation_options,
    write_nbest,
)
from lexsmt.lm import EOS, Smoothing, log_prob, train_lm
from lexsmt.phrases import PhraseEntry, PhraseTable

UNLIMITED = DecoderConfig(beam_size=None, distortion_limit=None)
FLAT_LM = train_lm([["x", "y"], ["y", "x"]], 2, Smoothing("add_k", 1.0))


def entry(target, p=1.0):
    return PhraseEntry(tuple(target.split()), (p, p, p, p))


def test_single_entry_covers_sentence():
    table = PhraseTable({("a", "b"): [entry("x y")]})
    t = decode(("a", "b"), table, FLAT_LM, WeightVector(), UNLIMITED)
    assert t.target == ("x", "y")
    assert t.features[FEATURES.index("distortion")] == 0


def test_monotone_wins_on_distortion():
    table = PhraseTable({("a",): [entry("x")], ("b",): [entry("y")]})
    w = WeightVector((1, 1, 1, 1, 0, 0, 1))
    assert decode(("a", "b"), table, FLAT_LM, w, UNLIMITED).target == ("x", "y")


def test_zero_weights_tie_break():
    table = PhraseTable({("a",): [entry("y"), entry("x"), entry("x x")]})
    t = decode(("a",), table, FLAT_LM, WeightVector((0,) * 7), UNLIMITED)
    assert t.score == 0.0 and t.target == ("x",)


def test_empty_sentence():
    t = decode((), PhraseTable({}), FLAT_LM, WeightVector())
    assert t.target == ()
    assert t.features[4] == pytest.approx(math.log(FLAT_LM.prob(FLAT_LM.state(()), EOS)))
    assert np.count_nonzero(t.features) == 1


def test_oov_passes_through():
    t = decode(("a", "zz"), PhraseTable({("a",): [entry("x")]}), FLAT_LM, WeightVector())
    assert t.target == ("x", "zz")
    assert t.derivation[1].log_scores == (math.log(1e-7),) * 4


def test_stuck_search_names_coverage():
    low = (1e-3,) * 4
    table = PhraseTable({
        ("a",): [PhraseEntry(("z",), low)],
        ("a", "b"): [PhraseEntry(("z",), (1.0,) * 4)],
        ("a", "b", "c"): [PhraseEntry(("z",), low)],
        ("b",): [PhraseEntry(("z",), low)],
        ("b", "c"): [PhraseEntry(("x",), low)],
        ("c",): [PhraseEntry(("x",), (1.0,) * 4)],
    })
    lm = train_lm([["x", "y", "z"]], 2, Smoothing("add_k", 1.0))
    w = WeightVector((1, 0, 0, 0, 0.1, 0, 0))
    with pytest.raises(DecodingError, match="coverage 1101"):
        decode(tuple("abcd"), table, lm, w, DecoderConfig(beam_size=1, distortion_limit=1))
    with pytest.raises(DecodingError):
        nbest(tuple("abcd"), table, lm, w, DecoderConfig(beam_size=1, distortion_limit=1))


def test_nbest_examples():
    single = PhraseTable({("a",): [entry("x")]})
    assert len(nbest(("a",), single, FLAT_LM, WeightVector(), n=10)) == 1
    two = PhraseTable({("a",): [entry("x", 0.8), entry("y", 0.2)]})
    out = nbest(("a",), two, FLAT_LM, WeightVector(), n=10)
    assert [t.target for t in out] == [("x",), ("y",)]
    assert out[0].score > out[1].score
    one = nbest(("a",), two, FLAT_LM, WeightVector(), n=1)
    best = decode(("a",), two, FLAT_LM, WeightVector())
    assert len(one) == 1 and one[0].target == best.target and one[0].score == best.score


def test_future_cost_examples():
    w = WeightVector((1, 0, 0, 0, 0, 0, 0))
    one = PhraseTable({("a",): [entry("x", 0.5)]})
    assert future_cost(("a",), one, FLAT_LM, w)[0, 1] == pytest.approx(math.log(0.5))
    split = PhraseTable({("a",): [entry("x", 0.5)], ("b",): [entry("y", 0.25)]})
    fc = future_cost(("a", "b"), split, FLAT_LM, w)
    assert fc[0, 2] == pytest.approx(fc[0, 1] + fc[1, 2])
    joint = PhraseTable({("a",): [entry("x", 0.5)], ("b",): [entry("y", 0.25)], ("a", "b"): [entry("x y", 0.9)]})
    assert future_cost(("a", "b"), joint, FLAT_LM, w)[0, 2] == pytest.approx(math.log(0.9))


def test_weight_vector_io(tmp_path):
    w = WeightVector((0.1, -0.2, 0.3, 0.4, 0.5, -1.0, 0.25))
    w.save(tmp_path / "w")
    assert WeightVector.load(tmp_path / "w") == w
    assert (tmp_path / "w").read_text().splitlines()[0] == "phrase_fwd\t0.1"
    with pytest.raises(ValueError):
        WeightVector((1.0,) * 6)
    with pytest.raises(ValueError):
        WeightVector((float("nan"),) * 7)


def test_nbest_dump(tmp_path):
    two = PhraseTable({("a",): [entry("x", 0.8), entry("y", 0.2)]})
    write_nbest([nbest(("a",), two, FLAT_LM, WeightVector())], tmp_path / "nb")
    lines = (tmp_path / "nb").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2
    sid, target, feats, score = lines[0].split(" ||| ")
    assert sid == "0" and target == "x" and len(feats.split()) == 7 and float(score)


# --- brute-force oracle -------------------------------------------------------


def random_instance(rng):
    n = rng.randint(1, 4)
    sentence = tuple(rng.choice("abcd") for _ in range(n))
    entries = {}
    for i in range(n):
        for j in range(i + 1, n + 1):
            if rng.random() < 0.6:
                k = rng.randint(1, 3)
                targets = {tuple(rng.choice("wxyz") for _ in range(rng.randint(1, 2))) for _ in range(k)}
                entries[sentence[i:j]] = [
                    PhraseEntry(t, tuple(rng.choice([1.0, 0.5, 0.3, 0.1, 0.01]) for _ in range(4)))
                    for t in sorted(targets)
                ]
    lm_data = [[rng.choice("wxyz") for _ in range(rng.randint(1, 5))] for _ in range(6)]
    lm = train_lm(lm_data, rng.choice([1, 2, 3]), Smoothing("add_k", rng.choice([0.1, 1.0])))
    w = WeightVector(tuple(rng.uniform(-1, 1) for _ in range(7)))
    return sentence, PhraseTable(entries), lm, w


def brute_force_best(sentence, table, lm, w):
    options = translation_options(sentence, table, DecoderConfig(top_k=100))
    n = len(sentence)
    best = -math.inf

    def walk(covered, last_end, feats, target):
        nonlocal best
        if len(covered) == n:
            full = feats.copy()
            full[4] = log_prob(lm, target)
            full[5] = len(target)
            best = max(best, float(np.dot(w.array, full)))
            return
        for (i, j), opts in options.items():
            if covered & set(range(i, j)):
                continue
            for o in opts:
                f = feats.copy()
                f[:4] += o.log_scores
                f[6] -= abs(i - (last_end + 1))
                walk(covered | set(range(i, j)), j - 1, f, target + list(o.target))

    walk(frozenset(), -1, np.zeros(7), [])
    return best


def test_decoder_matches_brute_force():
    rng = random.Random(11)
    start = time.perf_counter()
    for _ in range(200):
        sentence, table, lm, w = random_instance(rng)
        got = decode(sentence, table, lm, w, DecoderConfig(beam_size=None, distortion_limit=None, top_k=100))
        assert got.score == pytest.approx(brute_force_best(sentence, table, lm, w), abs=1e-6)
    assert time.perf_counter() - start < 30


@given(st.integers(0, 100_000))
def test_score_consistency_and_nbest_order(seed):
    sentence, table, lm, w = random_instance(random.Random(seed))
    config = DecoderConfig(beam_size=None, distortion_limit=None)
    out = nbest(sentence, table, lm, w, config, n=20)
    best = decode(sentence, table, lm, w, config)
    assert out[0].target == best.target and out[0].score == best.score
    targets = [t.target for t in out]
    assert len(set(targets)) == len(targets) <= 20
    scores = [t.score for t in out]
    assert all(a >= b for a, b in zip(scores, scores[1:]))
    for t in out:
        feats = derivation_features(sentence, t.derivation, lm)
        assert np.allclose(feats, t.features, atol=1e-6)
        assert abs(float(np.dot(w.array, feats)) - t.score) <= 1e-6
        assert tuple(x for o in t.derivation for x in o.target) == t.target


@given(st.integers(0, 100_000))
def test_beam_search_features_consistent(seed):
    sentence, table, lm, w = random_instance(random.Random(seed))
    t = decode(sentence, table, lm, w, DecoderConfig(beam_size=2, distortion_limit=2))
    assert abs(float(np.dot(w.array, derivation_features(sentence, t.derivation, lm))) - t.score) <= 1e-6
