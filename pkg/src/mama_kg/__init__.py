"""Open knowledge-graph construction from language-model attention matrices.

Pipeline: beam-search candidate facts out of per-sentence attention records,
filter them by degree/frequency/contiguity, link mentions to a reference KG,
map relation phrases through a curated co-occurrence table, and assemble the
mapped + open-schema facts into one graph with a slot-filling evaluator.
"""

__version__ = "0.1.0"
