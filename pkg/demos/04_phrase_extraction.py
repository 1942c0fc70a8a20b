"""
Phrase pairs from a word alignment
==================================

Every source span whose aligned target words form a span with no link
leaving the box is a phrase pair. Unaligned target words at the edges give
extra variants.
"""

from lexsmt.align import AlignmentMatrix, TranslationTable
from lexsmt.corpus import ParallelCorpus
from lexsmt.phrases import extract_corpus, extract_phrases, lookup, score_table

corpus = ParallelCorpus.from_token_pairs([
    ("the house is small".split(), "घर छोटा है".split()),
    ("the house is big".split(), "घर बड़ा है".split()),
])
# "the" stays unaligned; "is" links to "है" at the end of the Hindi sentence
links = AlignmentMatrix(frozenset({(1, 0), (2, 2), (3, 1)}), 4, 3)

for p in sorted(extract_phrases(corpus[0], links, max_len=4), key=lambda p: (p.source_span, p.target_span)):
    print(f"{' '.join(p.source):20} ||| {' '.join(p.target)}")

# scoring needs lexical tables in both directions; a flat one will do here
src_words = {w for p in corpus for w in p.source} | {"NULL"}
tgt_words = {w for p in corpus for w in p.target} | {"NULL"}
fwd = TranslationTable({(t, s): 1 / len(tgt_words) for s in src_words for t in tgt_words})
bwd = TranslationTable({(s, t): 1 / len(src_words) for s in src_words for t in tgt_words})
alignments = [links, AlignmentMatrix(frozenset({(1, 0), (2, 2), (3, 1)}), 4, 3)]
table = score_table(extract_corpus(corpus, alignments, 4), fwd, bwd)
for entry in lookup(table, ("house",)):
    print("house ->", " ".join(entry.target), ["%.3f" % s for s in entry.scores])
