"""
IBM Model 1 word alignment
==========================

EM on a two-sentence toy corpus, then Viterbi alignments in both
directions and their symmetrization.
"""

import math

from lexsmt.align import symmetrize, train_model1, viterbi_align
from lexsmt.corpus import ParallelCorpus

toy = ParallelCorpus.from_token_pairs([("a b".split(), "x y".split()), ("a c".split(), "x z".split())])

# after one iteration "a" already prefers "x", which it sees in both pairs
one = train_model1(toy, iterations=1, use_null=False)
for tgt in "xyz":
    print(f"t({tgt}|a) = {one.table.prob(tgt, 'a'):.4f}")

# the log-likelihood never decreases
result = train_model1(toy, iterations=10, use_null=False, tol=-math.inf)
print(["%.4f" % ll for ll in result.log_likelihood])

forward = result.table
backward = train_model1(toy.swapped(), iterations=10, use_null=False).table
pair = toy[0]
f = viterbi_align(pair, forward)
b = viterbi_align(pair.swapped(), backward).transposed()
for heuristic in ("intersection", "grow_diag", "union"):
    print(f"{heuristic:13}", symmetrize(f, b, heuristic))
