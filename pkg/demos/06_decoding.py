"""
Stack decoding
==============

A small hand-made phrase table and language model. Hindi has no article,
so "the" is only covered inside the phrase "the boy"; on its own it would
pass through untranslated. The n-best list carries the feature vectors.
"""

from lexsmt.decoder import FEATURES, DecoderConfig, WeightVector, decode, nbest
from lexsmt.lm import Smoothing, train_lm
from lexsmt.phrases import PhraseEntry, PhraseTable

table = PhraseTable({
    ("boy",): [PhraseEntry(("लड़का",), (0.9, 0.9, 0.9, 0.9))],
    ("the", "boy"): [PhraseEntry(("लड़का",), (0.8, 0.8, 0.8, 0.8))],
    ("eats",): [PhraseEntry(("खाता",), (0.6, 0.6, 0.6, 0.6)), PhraseEntry(("खाता", "है"), (0.4, 0.4, 0.4, 0.4))],
    ("apples",): [PhraseEntry(("सेब",), (1.0, 1.0, 1.0, 1.0))],
})

lm = train_lm([s.split() for s in ["लड़का सेब खाता है", "लड़की सेब खाती है"]], 3, Smoothing("add_k", 0.1))
weights = WeightVector((0.2, 0.2, 0.2, 0.2, 0.5, 0.1, 0.3))
config = DecoderConfig(beam_size=50, distortion_limit=3)

sentence = "the boy eats apples".split()
best = decode(sentence, table, lm, weights, config)
print("best:", best.text, f"({best.score:.3f})")
for option in best.derivation:
    print("  ", option.span, " ".join(option.target))

print()
for t in nbest(sentence, table, lm, weights, config, n=5):
    feats = ", ".join(f"{name}={v:.2f}" for name, v in zip(FEATURES, t.features))
    print(f"{t.score:8.3f}  {t.text:22} {feats}")
