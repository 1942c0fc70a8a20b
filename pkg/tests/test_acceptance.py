"""The acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line, printed in the terminal summary.
The oracles live with the module tests and are reused here.
"""

import math
import random
import time
from contextlib import contextmanager

import pytest

import test_align
import test_decoder
import test_lexicon
import test_lm
import test_mert
import test_phrases
import test_pipeline
from lexsmt import align, metrics, mert, pipeline
from lexsmt.align import AlignmentMatrix
from lexsmt.corpus import Origin, SentencePair
from lexsmt.decoder import DecoderConfig, WeightVector, decode
from lexsmt.phrases import extract_phrases
from lexsmt.synth import SynthSpec

FAST = {"decoder": {"beam_size": "20"}, "tune": {"nbest": "50"}}


@contextmanager
def criterion(log, number, text):
    start = time.perf_counter()
    note = {}
    try:
        yield note
    except BaseException as exc:
        line = f"criterion {number} FAIL  {text} ({type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''})"
        print(line)
        log.append(line)
        raise
    detail = note.get("detail", f"{time.perf_counter() - start:.1f}s")
    line = f"criterion {number} PASS  {text} [{detail}]"
    print(line)
    log.append(line)


def test_1_em_correctness(acceptance_log):
    with criterion(acceptance_log, 1, "Model 1 toy values to 1e-12, monotone log-likelihood, < 1 s"):
        start = time.perf_counter()
        t = align.train_model1(test_align.TOY, iterations=1, use_null=False).table
        assert abs(t.prob("x", "a") - 0.5) <= 1e-12
        assert abs(t.prob("y", "a") - 0.25) <= 1e-12
        assert abs(t.prob("z", "a") - 0.25) <= 1e-12
        ll = align.train_model1(test_align.TOY, iterations=10, use_null=False, tol=-math.inf).log_likelihood
        assert len(ll) == 10
        assert all(b >= a - 1e-9 for a, b in zip(ll, ll[1:]))
        assert time.perf_counter() - start < 1.0


def test_2_phrase_oracle(acceptance_log):
    with criterion(acceptance_log, 2, "phrase extraction equals exhaustive enumeration on 500 pairs, < 10 s"):
        rng = random.Random(2024)
        start = time.perf_counter()
        mismatches = 0
        for _ in range(500):
            ns, nt = rng.randint(1, 6), rng.randint(1, 6)
            links = {(i, j) for i in range(ns) for j in range(nt) if rng.random() < rng.choice([0.15, 0.3, 0.5])}
            p = SentencePair(tuple(f"s{i}" for i in range(ns)), tuple(f"t{j}" for j in range(nt)), Origin("r", 1))
            found = extract_phrases(p, AlignmentMatrix(frozenset(links), ns, nt), 7)
            mismatches += {(f.source_span, f.target_span) for f in found} != test_phrases.brute_force(ns, nt, links, 7)
        assert mismatches == 0
        assert time.perf_counter() - start < 10


def test_3_decoder_oracle(acceptance_log):
    with criterion(acceptance_log, 3, "unlimited-beam decode equals brute force on 200 instances within 1e-6, < 30 s"):
        rng = random.Random(2025)
        start = time.perf_counter()
        unlimited = DecoderConfig(beam_size=None, distortion_limit=None, top_k=100)
        for _ in range(200):
            sentence, table, lm, w = test_decoder.random_instance(rng)
            got = decode(sentence, table, lm, w, unlimited).score
            assert abs(got - test_decoder.brute_force_best(sentence, table, lm, w)) <= 1e-6
        assert time.perf_counter() - start < 30


def test_4_metric_golden_values(acceptance_log):
    with criterion(acceptance_log, 4, "BLEU, TER and METEOR golden values"):
        s = str.split
        assert metrics.bleu([s("a b c d e")], [s("a b c d e")]).score == 1.0
        assert abs(metrics.bleu([s("the cat sat")], [s("the cat sat down")], max_n=2).score
                   - math.exp(1 - 4 / 3)) <= 1e-9
        assert metrics.bleu([s("the the the")], [s("the cat")], max_n=1).precisions[0] == 1 / 3
        assert metrics.ter(s("a b c"), s("a b c")).score == 0
        assert metrics.ter(s("a b c d e"), s("a b x d e")).score == 0.2
        assert metrics.ter(s("c a b"), s("a b c")).score == 1 / 3
        assert metrics.meteor_lite(s("the cat"), s("the cat")).score == 0.9375


# --- end-to-end runs --------------------------------------------------------


@pytest.fixture(scope="module")
def ladder_runs(tmp_path_factory):
    """The three-seed noisy SOV ladder; returns per-seed rows and the elapsed time."""
    start = time.perf_counter()
    runs = {}
    for seed in (0, 1, 2):
        d = tmp_path_factory.mktemp(f"ladder{seed}")
        spec = SynthSpec(vocab_size=200, word_order="svo_to_sov", oov_fraction=0.1, seed=seed)
        config = pipeline.write_synthetic_setup(d, spec, 2000, 100, 200, noise_rate=0.2,
                                                ladder=pipeline.SHORT_LADDER, settings=FAST)
        cfgs = pipeline.load_configs(config)
        runs[seed] = (cfgs, pipeline.run_matrix(cfgs, d / "matrix.txt"))
        print((d / "matrix.txt").read_text(encoding="utf-8"))
    return runs, time.perf_counter() - start


@pytest.fixture(scope="module")
def monotone_runs(tmp_path_factory):
    out = {}
    for seed in (0, 1, 2):
        d = tmp_path_factory.mktemp(f"mono{seed}")
        start = time.perf_counter()
        config = pipeline.write_synthetic_setup(d, SynthSpec(vocab_size=200, seed=seed), 2000, 100, 200,
                                                ladder=(("baseline", {"cleaning": "on"}),), settings=FAST)
        cfg = pipeline.load_configs(config)[0]
        reports = pipeline.run_experiment(cfg)
        out[seed] = (cfg, reports, time.perf_counter() - start)
    return out


def tune_history(cfg):
    lines = (cfg.workdir / "model" / "tune.log").read_text().splitlines()[1:]
    return [float(l.split("\t")[1]) for l in lines]


def test_5_tuning_property(acceptance_log, ladder_runs, monotone_runs):
    with criterion(acceptance_log, 5, "pool-BLEU history non-decreasing on synthetic dev sets; flip toy reaches 1.0"):
        histories = [tune_history(cfg) for cfg, _, _ in monotone_runs.values()]
        histories += [tune_history(cfg) for cfgs, _ in ladder_runs[0].values() for cfg in cfgs]
        assert all(h for h in histories)
        for h in histories:
            assert all(b >= a for a, b in zip(h, h[1:])), h
        # and a longer run with the early stop on small gains disabled
        cfg = monotone_runs[1][0]
        lay = pipeline._Layout(cfg)
        models = pipeline._Models(cfg, lay)
        dev = pipeline.load_corpus(cfg.path("dev_source"), cfg.path("dev_target"))
        state = mert.tune([p.source for p in dev][:40], [p.target for p in dev][:40],
                          models.nbest, WeightVector((0.1, 0.1, 0.1, 0.1, 1.0, 0.0, 0.1)),
                          outer_iters=5, n=30, min_improvement=0.0, nonnegative=("lm",))
        h = state.dev_bleu_history
        assert all(b >= a for a, b in zip(h, h[1:])), h

        pools = test_mert.flip_pools()
        by_sentence = {"s1": pools[0], "s2": pools[1]}
        init = WeightVector.from_array(test_mert.vec(phrase_fwd=1, lm=0.5))
        state = mert.tune([["s1"], ["s2"]], [list("abc"), list("xyzw")], test_mert.fixed_nbest(by_sentence),
                          init, outer_iters=5)
        assert state.dev_bleu_history[-1] == 1.0


def test_6_end_to_end_monotone(acceptance_log, monotone_runs):
    with criterion(acceptance_log, 6, "monotone synthetic corpus: tuned test BLEU >= 0.90, < 2 min") as note:
        note["detail"] = ", ".join(f"seed {k}: BLEU {r['tuned'].bleu:.3f} in {t:.0f}s"
                                   for k, (_, r, t) in monotone_runs.items())
        for seed, (_, reports, elapsed) in monotone_runs.items():
            print(f"seed {seed}: tuned BLEU {reports['tuned'].bleu:.4f} in {elapsed:.1f}s")
            assert reports["tuned"].bleu >= 0.90
            assert elapsed < 120


def test_7_ladder_direction(acceptance_log, ladder_runs):
    with criterion(acceptance_log, 7, "noisy < cleaned < lexicon BLEU and strictly falling TER for >= 2 of 3 seeds, < 10 min") as note:
        runs, elapsed = ladder_runs
        holding = 0
        for seed, (_, rows) in runs.items():
            assert all(r.report is not None for r in rows), [r.error for r in rows]
            ok = True
            for tuning in ("Without Tuning", "With Tuning"):
                rep = [r.report for r in rows if r.tuning == tuning]
                bleus = [r.bleu for r in rep]
                ters = [r.ter for r in rep]
                ok &= bleus[0] < bleus[1] < bleus[2] and ters[0] > ters[1] > ters[2]
                print(f"seed {seed} {tuning}: BLEU {bleus} TER {ters}")
            holding += ok
        note["detail"] = f"held for {holding} of 3 seeds in {elapsed:.0f}s"
        assert holding >= 2, f"ordering held for {holding} of 3 seeds"
        assert elapsed < 600


def test_8_invariant_suites(acceptance_log, tmp_path):
    with criterion(acceptance_log, 8, "normalization, superset, suffix reversibility, n-best order, manifest reproducibility"):
        test_align.test_em_normalized_and_monotone()
        test_lm.test_add_k_normalizes_exhaustively()
        test_lm.test_exhaustive_normalization_on_larger_vocab()
        test_lexicon.test_inject_superset_and_order()
        test_lexicon.test_split_reversible()
        test_decoder.test_score_consistency_and_nbest_order()
        test_pipeline.test_manifest_reproducibility(tmp_path)
