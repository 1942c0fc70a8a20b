"""
Augmenting the training corpus with lexical resources
=====================================================

Synsets, function words and verb phrases are appended as extra one-line
pairs. Suffix splitting detaches Hindi inflections so that inflected forms
share a stem token with the bare word.
"""

from lexsmt.corpus import ParallelCorpus
from lexsmt.lexicon import (
    Category,
    LexiconEntry,
    SynsetRecord,
    default_suffixes,
    expand_synsets,
    inject,
    join_suffixes,
    split_suffixes,
)

corpus = ParallelCorpus.from_token_pairs([
    ("the boys play".split(), "लड़कों खेलते".split()),
    ("girls read books".split(), "लड़कियाँ किताबें पढ़ती".split()),
])

# one synset record expands to one entry per synonym
record = SynsetRecord(("abandon",), (("छोड़ना",), ("त्यागना",), ("तजना",)))
synsets = expand_synsets([record])
for e in synsets:
    print(e.category.value, " ".join(e.source), "->", " ".join(e.target))

function_words = [LexiconEntry(("in",), ("में",), Category.FUNCTION_WORD)]
verb_phrases = [LexiconEntry(("is", "going"), ("जा", "रहा", "है"), Category.VERB_PHRASE)]

augmented = inject(corpus, synsets + function_words + verb_phrases)
print(len(corpus), "pairs before,", len(augmented), "after")
assert augmented.pairs[: len(corpus)] == corpus.pairs  # originals untouched, in order

inventory = default_suffixes()
split = split_suffixes(augmented, inventory, side="target")
for pair in split.pairs[:2]:
    print(" ".join(pair.target))
    # joining undoes the split
    print("  rejoined:", " ".join(join_suffixes(pair.target, inventory)))
