"""
BLEU, METEOR and TER
====================

The three automatic scores on a few hand-checkable sentences, then a
corpus report in the usual three-column layout.
"""

from lexsmt.metrics import bleu, evaluate, format_table, meteor_lite, ter

s = str.split

r = bleu([s("the cat sat")], [s("the cat sat down")], max_n=2)
print("BLEU short hypothesis:", round(r.score, 4), "brevity penalty", round(r.brevity_penalty, 4))
print("clipped unigram precision:", bleu([s("the the the")], [s("the cat")], max_n=1).precisions[0])

t = ter(s("c a b"), s("a b c"))
print(f"TER with one shift: {t.score:.4f} ({t.shifts} shift, {t.edits} edits)")
print("TER without shifts:", round(ter(s("c a b"), s("a b c"), shifts=False).score, 4))

m = meteor_lite(s("b a"), s("a b"))
print(f"METEOR swapped pair: {m.score} with {m.chunks} chunks")

hyps = [s("लड़का सेब खाता है"), s("लड़की किताब पढ़ती")]
refs = [s("लड़का सेब खाता है"), s("लड़की किताब पढ़ती है")]
print()
print(format_table([("demo", "Without Tuning", evaluate(hyps, refs))]))
