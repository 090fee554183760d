"""Per-class precision/recall/F1 and Document Integrity Precision (DIP).

DIP is the fraction of documents whose in-scope tokens are *all* classified
correctly.  A single wrong token makes its whole document wrong, so DIP
drops much faster than token-level F1 as documents carry more labeled
entities.

All rates are returned as :class:`fractions.Fraction` so reports can be
compared and re-ingested without rounding drift.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .core import NONE_LABEL, Corpus, Document, PredictionError, PredictionSet


class DipScope(enum.Enum):
    ALL_TOKENS = "all"
    NON_NONE_ONLY = "non-none"

    def in_scope(self, gt_label: str) -> bool:
        return self is DipScope.ALL_TOKENS or gt_label != NONE_LABEL


@dataclass(frozen=True)
class ClassCounts:
    class_name: str
    tp: int = 0
    fp: int = 0
    fn: int = 0


def precision(counts: ClassCounts) -> Fraction:
    denom = counts.tp + counts.fp
    return Fraction(counts.tp, denom) if denom else Fraction(0)


def recall(counts: ClassCounts) -> Fraction:
    denom = counts.tp + counts.fn
    return Fraction(counts.tp, denom) if denom else Fraction(0)


def f1(counts: ClassCounts) -> Fraction:
    p, r = precision(counts), recall(counts)
    if p + r == 0:
        return Fraction(0)
    return 2 * (p * r) / (p + r)


def _gt_labels(doc: Document) -> list[str]:
    labels = doc.gt_labels
    if None in labels:
        raise PredictionError(f"{doc.doc_id}[{labels.index(None)}]: token has no ground-truth label")
    return labels


def _pairs(corpus: Corpus, preds: PredictionSet) -> Iterator[tuple[Document, list[str], list[str]]]:
    for doc in corpus.documents:
        if doc.doc_id not in preds:
            raise PredictionError(f"{doc.doc_id}: no prediction for document")
        yield doc, _gt_labels(doc), preds.labels_for(doc, corpus.label_set)


def confusion_matrix(corpus: Corpus, preds: PredictionSet) -> np.ndarray:
    """c x c token counts, rows = ground truth, columns = prediction, in label-set order."""
    ls = corpus.label_set
    gt_idx: list[int] = []
    pred_idx: list[int] = []
    for _, gt, pred in _pairs(corpus, preds):
        gt_idx.extend(ls.index(g) for g in gt)
        pred_idx.extend(ls.index(p) for p in pred)
    return _tally(gt_idx, pred_idx, len(ls))


def _tally(gt_idx: list[int], pred_idx: list[int], c: int) -> np.ndarray:
    flat = np.asarray(gt_idx, dtype=np.int64) * c + np.asarray(pred_idx, dtype=np.int64)
    return np.bincount(flat, minlength=c * c).reshape(c, c)


def _counts_from_confusion(cm: np.ndarray, k: int, name: str) -> ClassCounts:
    tp = int(cm[k, k])
    return ClassCounts(name, tp=tp, fp=int(cm[:, k].sum()) - tp, fn=int(cm[k, :].sum()) - tp)


def class_counts(corpus: Corpus, preds: PredictionSet, class_name: str) -> ClassCounts:
    """Token-level one-vs-rest counts for ``class_name`` over the whole corpus."""
    k = corpus.label_set.index(class_name)
    return _counts_from_confusion(confusion_matrix(corpus, preds), k, class_name)


def _first_failure(gt: list[str], pred: list[str], scope: DipScope) -> int | None:
    for i, (g, p) in enumerate(zip(gt, pred)):
        if p != g and scope.in_scope(g):
            return i
    return None


def dip(corpus: Corpus, preds: PredictionSet, scope: DipScope = DipScope.NON_NONE_ONLY) -> Fraction:
    """Fraction of documents with no misclassified in-scope token."""
    if not corpus.documents:
        raise ValueError("DIP is undefined for an empty corpus")
    wrong = 0
    for _, gt, pred in _pairs(corpus, preds):
        for g, p in zip(gt, pred):
            if p != g and scope.in_scope(g):
                wrong += 1
                break
    return 1 - Fraction(wrong, len(corpus.documents))


@dataclass(frozen=True)
class ClassReport:
    class_name: str
    precision: Fraction | float
    recall: Fraction | float
    f1: Fraction | float
    counts: ClassCounts | None = None

    @classmethod
    def from_counts(cls, counts: ClassCounts) -> "ClassReport":
        return cls(counts.class_name, precision(counts), recall(counts), f1(counts), counts)


@dataclass(frozen=True)
class DocumentFailure:
    doc_id: str
    token_index: int
    gt_label: str
    predicted_label: str
    text: str = ""


@dataclass(frozen=True)
class EvaluationReport:
    per_class: tuple[ClassReport, ...]
    dip: Fraction | float
    scope: DipScope = DipScope.NON_NONE_ONLY
    num_documents: int | None = None
    document_failures: tuple[DocumentFailure, ...] = ()
    # per business class: tokens where gt or prediction is that class and they differ
    failure_extracts: dict[str, tuple[DocumentFailure, ...]] = field(default_factory=dict)

    @property
    def class_names(self) -> list[str]:
        return [r.class_name for r in self.per_class]

    @property
    def macro_f1(self) -> Fraction | float:
        if not self.per_class:
            return Fraction(0)
        total = sum((r.f1 for r in self.per_class), Fraction(0))
        return total / len(self.per_class)

    def get(self, class_name: str) -> ClassReport:
        for r in self.per_class:
            if r.class_name == class_name:
                return r
        raise KeyError(class_name)


def evaluate(corpus: Corpus, preds: PredictionSet, scope: DipScope = DipScope.NON_NONE_ONLY,
             max_extracts: int = 0) -> EvaluationReport:
    """Per-class reports for every non-background class, macro-F1, DIP and failure details."""
    if not corpus.documents:
        raise ValueError("cannot evaluate an empty corpus")
    ls = corpus.label_set
    business = ls.business_names
    failures = []
    extracts: dict[str, list[DocumentFailure]] = {name: [] for name in business}
    gt_idx: list[int] = []
    pred_idx: list[int] = []
    for doc, gt, pred in _pairs(corpus, preds):
        gt_idx.extend(ls.index(g) for g in gt)
        pred_idx.extend(ls.index(p) for p in pred)
        i = _first_failure(gt, pred, scope)
        if i is not None:
            failures.append(DocumentFailure(doc.doc_id, i, gt[i], pred[i], doc.tokens[i].text))
        if max_extracts:
            for j, (g, p) in enumerate(zip(gt, pred)):
                if g == p or not scope.in_scope(g):
                    continue
                for name in {g, p} - {NONE_LABEL}:
                    if len(extracts[name]) < max_extracts:
                        extracts[name].append(DocumentFailure(doc.doc_id, j, g, p, doc.tokens[j].text))

    cm = _tally(gt_idx, pred_idx, len(ls))
    per_class = tuple(
        ClassReport.from_counts(_counts_from_confusion(cm, ls.index(name), name)) for name in business
    )
    n = len(corpus.documents)
    return EvaluationReport(
        per_class=per_class,
        dip=Fraction(n - len(failures), n),
        scope=scope,
        num_documents=n,
        document_failures=tuple(failures),
        failure_extracts={k: tuple(v) for k, v in extracts.items()} if max_extracts else {},
    )


def token_accuracy(corpus: Corpus, preds: PredictionSet, scope: DipScope = DipScope.NON_NONE_ONLY) -> Fraction:
    """Micro accuracy over in-scope tokens."""
    right = total = 0
    for _, gt, pred in _pairs(corpus, preds):
        for g, p in zip(gt, pred):
            if scope.in_scope(g):
                total += 1
                right += g == p
    return Fraction(right, total) if total else Fraction(1)
