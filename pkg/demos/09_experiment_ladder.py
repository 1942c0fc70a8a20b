"""
The experiment ladder on synthetic data
=======================================

Generates a noisy English-like to Hindi-like corpus with SOV order and
held-out vocabulary, then runs each system of the ladder with and without
tuning. The command line equivalent is

    smt synth runs/demo --word-order svo_to_sov --oov-fraction 0.1 --noise 0.2
    smt matrix --config runs/demo/experiment.ini

A smaller corpus keeps this script to about a minute.
"""

import sys
import tempfile
from pathlib import Path

from lexsmt import pipeline
from lexsmt.synth import SynthSpec

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp())
spec = SynthSpec(vocab_size=120, word_order="svo_to_sov", oov_fraction=0.1, seed=0)
config = pipeline.write_synthetic_setup(
    out, spec, n_train=800, n_dev=60, n_test=100, noise_rate=0.2,
    ladder=pipeline.SHORT_LADDER,
    settings={"decoder": {"beam_size": "20"}, "tune": {"nbest": "50"}},
)
print("config:", config)
print(config.read_text(encoding="utf-8"))

rows = pipeline.run_matrix(pipeline.load_configs(config), out / "matrix.txt")
print((out / "matrix.txt").read_text(encoding="utf-8"))
