"""
Cleaning a scraped parallel corpus
==================================

Pairs are never deleted: cleaning attaches a flag naming the first rule a
pair breaks, and training only reads the clean view.
"""

from lexsmt.corpus import CleaningRuleSet, ParallelCorpus, clean, corpus_stats, tokenize

raw = [
    ("The boy eats an apple.", "लड़का सेब खाता है।"),
    ("The boy eats an apple.", "लड़का सेब खाता है।"),  # exact duplicate
    ("Good morning", ""),  # translation missing
    ("Read this", "इसे पढ़ो &nbsp; <br>"),  # markup debris
    ("Yes", "हाँ हाँ हाँ हाँ हाँ हाँ हाँ हाँ"),  # lines run together
    ("Where is the station ?", "स्टेशन कहाँ है ?"),
]
corpus = ParallelCorpus.from_token_pairs(
    [(tokenize(s, "source"), tokenize(t, "target")) for s, t in raw], name="scraped"
)

# Latin letters on the Hindi side give the markup away
rules = CleaningRuleSet(
    max_length_ratio=3.0,
    allowed_script_ranges={"target": CleaningRuleSet.ranges("devanagari", "punctuation")},
)
cleaned = clean(corpus, rules)

for pair in cleaned:
    print(f"{str(pair.origin):12} {pair.status:28} {' '.join(pair.source)}")

print()
for key, value in corpus_stats(cleaned).as_rows():
    print(f"{key:24} {value}")

# cleaning is idempotent
assert clean(cleaned, rules) == cleaned
