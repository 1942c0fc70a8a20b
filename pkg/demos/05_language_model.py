"""
An n-gram language model
========================

Counts with sentence boundaries, add-k smoothing and linear
interpolation across orders.
"""

import math

from lexsmt.lm import EOS, Smoothing, log_prob, score_continuation, train_lm

sentences = [s.split() for s in ["लड़का सेब खाता है", "लड़की सेब खाती है", "लड़का किताब पढ़ता है"]]
model = train_lm(sentences, order=3, smoothing=Smoothing("add_k", 0.1, (0.1, 0.3, 0.6)))

# score_continuation returns natural-log probabilities
for context in (["सेब", "खाता"], ["लड़का", "खाता"]):
    p = math.exp(score_continuation(model, context, "है"))
    print(f"P(है | {' '.join(context)}) = {p:.4f}")

# every context gives a proper distribution over the vocabulary
total = sum(math.exp(score_continuation(model, ["सेब"], w)) for w in model.vocab)
print("sum over vocabulary:", round(total, 12))

for s in ["लड़का सेब खाता है", "है खाता सेब लड़का"]:
    lp = log_prob(model, s.split())
    print(f"{s:22} log p = {lp:8.3f}  perplexity = {math.exp(-lp / (len(s.split()) + 1)):.2f}")
