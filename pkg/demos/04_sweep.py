"""
F1 and DIP across error rates
=============================

Average per-class F1 barely moves as the token error rate grows, while
DIP drops geometrically with the number of labeled fields per document.
"""

# %%
import numpy as np

from dipeval import CorpusSpec
from dipeval.simulator import sweep

eps = np.round(np.arange(0, 0.21, 0.02), 2)
for k in (1, 5, 10):
    rows = sweep(eps, CorpusSpec.with_total_labeled(k, num_documents=3000, seed=5), seed=6)
    print(f"\n{k} labeled tokens per document")
    print("  eps   avg F1   DIP    expected")
    for r in rows:
        print(f"  {r.epsilon:.2f}  {r.avg_f1:.3f}   {r.dip:.3f}  {r.expected_dip:.3f}")

# %%
# To plot, write the same rows with ``dipeval sweep --out sweep.csv`` and
# load them with any CSV reader.
