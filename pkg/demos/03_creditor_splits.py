"""
Shared versus unseen creditors
==============================

S1 keeps every creditor on both sides of the split; S2 holds out whole
creditors so the test set only has layouts the model never saw.
"""

# %%
from collections import Counter

from dipeval import CorpusSpec, Scenario, SplitSpec, generate_corpus, split

corpus = generate_corpus(CorpusSpec(num_documents=120, num_creditors=12, seed=3))
owner = {d.doc_id: d.creditor_id for d in corpus.documents}

for scenario in Scenario:
    res = split(corpus, SplitSpec(scenario, train_fraction=0.8, seed=42))
    train = Counter(owner[d] for d in res.train_ids)
    test = Counter(owner[d] for d in res.test_ids)
    print(f"{scenario.name}: {len(res.train_ids)} train / {len(res.test_ids)} test "
          f"(fraction {res.achieved_fraction:.3f}), shared creditors: {len(set(train) & set(test))}")
