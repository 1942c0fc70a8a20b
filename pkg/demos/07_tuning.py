"""
Minimum error rate training
===========================

Two dev sentences whose correct translations win only once the
phrase_fwd weight turns negative. The exact line search finds the flip.
"""

import numpy as np

from lexsmt.decoder import FEATURES, N_FEATURES, Translation, WeightVector
from lexsmt.mert import Pool, line_search, pool_bleu, tune


def vec(**kw):
    v = np.zeros(N_FEATURES)
    for k, x in kw.items():
        v[FEATURES.index(k)] = x
    return v


candidates = {
    "s1": [("a b d", vec(phrase_fwd=1, lm=1)), ("a b c", vec(phrase_fwd=-1, lm=1))],
    "s2": [("x z y w", vec(phrase_fwd=2)), ("x y z w", vec(phrase_fwd=-1))],
}
references = [["a", "b", "c"], ["x", "y", "z", "w"]]


def nbest(src, weights, n):
    return [Translation(tuple(t.split()), f, float(f @ weights.array)) for t, f in candidates[src[0]]]


init = WeightVector.from_array(vec(phrase_fwd=1, lm=0.5))

pools = []
for key, ref in zip(candidates, references):
    pool = Pool(ref)
    for t in nbest([key], init, 10):
        pool.add(t.target, t.features)
    pools.append(pool)
print("pool BLEU at the start:", round(pool_bleu(pools, init.array), 4))
step = line_search(pools, init.array, vec(phrase_fwd=1))
print(f"best step along phrase_fwd: gamma={step.gamma:.3f}, BLEU={step.bleu:.4f}")

state = tune([["s1"], ["s2"]], references, nbest, init, outer_iters=5)
print("history:", state.dev_bleu_history, "-", state.stop_reason)
print({k: round(v, 3) for k, v in state.weights.as_dict().items()})
