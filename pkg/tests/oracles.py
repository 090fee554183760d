"""Independent reference implementations used only by the tests."""

from fractions import Fraction


def lev_table(a, b):
    """Full (len(a)+1) x (len(b)+1) Wagner-Fischer table."""
    d = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a) + 1):
        d[i][0] = i
    for j in range(len(b) + 1):
        d[0][j] = j
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1]))
    return d


def lev_oracle(a, b):
    return lev_table(a, b)[len(a)][len(b)]


def substring_oracle(a, b):
    """Left-to-right scan for a contiguous occurrence of ``a`` in ``b``."""
    for start in range(len(b) - len(a) + 1):
        if all(b[start + k] == a[k] for k in range(len(a))):
            return True
    return False


def dip_set_oracle(gt_docs, pred_docs, non_none_only):
    """|CD_t| / |D_t| with CD_t materialized as a set of completely correct document indices."""
    correct = {
        i for i, (gt, pred) in enumerate(zip(gt_docs, pred_docs))
        if all(g == p for g, p in zip(gt, pred) if not (non_none_only and g == "None"))
    }
    return Fraction(len(correct), len(gt_docs))


def counts_oracle(gt_docs, pred_docs, cls):
    """(TP, FP, FN) from an explicit confusion dictionary."""
    confusion = {}
    for gt, pred in zip(gt_docs, pred_docs):
        for g, p in zip(gt, pred):
            confusion[(g, p)] = confusion.get((g, p), 0) + 1
    tp = confusion.get((cls, cls), 0)
    fp = sum(v for (g, p), v in confusion.items() if p == cls and g != cls)
    fn = sum(v for (g, p), v in confusion.items() if g == cls and p != cls)
    return tp, fp, fn
