"""Document/token data model, label vocabulary and score-to-label resolution.

Coordinates are pixels with the origin at the upper-left corner of the
document image.  Token order is the OCR output order and is never re-sorted.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

NONE_LABEL = "None"


class PredictionError(ValueError):
    """Predictions do not line up with the corpus they are evaluated against."""


@dataclass(frozen=True, slots=True)
class BoundingBox:
    x1: float
    y1: float
    x2: float
    y2: float

    def violations(self) -> list[str]:
        out = []
        if self.x1 > self.x2:
            out.append("x1 > x2")
        if self.y1 > self.y2:
            out.append("y1 > y2")
        if min(self.x1, self.y1, self.x2, self.y2) < 0:
            out.append("negative coordinate")
        return out

    def as_list(self) -> list[float]:
        return [self.x1, self.y1, self.x2, self.y2]


@dataclass(frozen=True, slots=True)
class LabelClass:
    name: str
    exact_match_required: bool = False


@dataclass(frozen=True)
class LabelSet:
    """Ordered class vocabulary.  Position in ``classes`` is the score column."""

    classes: tuple[LabelClass, ...]

    def __post_init__(self):
        names = [c.name for c in self.classes]
        dupes = [n for n, k in Counter(names).items() if k > 1]
        if dupes:
            raise ValueError(f"duplicate label class names: {dupes}")
        if NONE_LABEL not in names:
            raise ValueError(f"label set must contain the background class {NONE_LABEL!r}")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})

    @classmethod
    def from_names(cls, names: Iterable[str], exact: Iterable[str] = ()) -> "LabelSet":
        exact = set(exact)
        return cls(tuple(LabelClass(n, n in exact) for n in names))

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.classes]

    @property
    def business_names(self) -> list[str]:
        """Class names excluding the background class, in label-set order."""
        return [c.name for c in self.classes if c.name != NONE_LABEL]

    @property
    def exact_names(self) -> set[str]:
        return {c.name for c in self.classes if c.exact_match_required}

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown label class {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __len__(self) -> int:
        return len(self.classes)


# The five receipt fields used throughout, in report column order.
RECEIPT_CLASSES = ("invoicenumber", "documentdate", "creditorname", "grossamount", "netamount")
DEFAULT_LABEL_SET = LabelSet(
    (LabelClass(NONE_LABEL),)
    + tuple(LabelClass(n, n in {"documentdate", "grossamount", "netamount"}) for n in RECEIPT_CLASSES)
)


@dataclass(frozen=True, slots=True)
class Token:
    text: str
    bbox: BoundingBox
    gt_label: str | None = None


@dataclass(frozen=True)
class Document:
    doc_id: str
    creditor_id: str
    tokens: tuple[Token, ...]

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def texts(self) -> list[str]:
        return [t.text for t in self.tokens]

    @property
    def gt_labels(self) -> list[str | None]:
        return [t.gt_label for t in self.tokens]

    def with_labels(self, labels: Sequence[str | None]) -> "Document":
        if len(labels) != len(self.tokens):
            raise ValueError(f"{self.doc_id}: {len(labels)} labels for {len(self.tokens)} tokens")
        return replace(self, tokens=tuple(replace(t, gt_label=l) for t, l in zip(self.tokens, labels)))


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...]
    label_set: LabelSet = DEFAULT_LABEL_SET

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def subset(self, doc_ids: Iterable[str]) -> "Corpus":
        """Documents whose id is in ``doc_ids``, in corpus order."""
        keep = set(doc_ids)
        return Corpus(tuple(d for d in self.documents if d.doc_id in keep), self.label_set)


@dataclass(frozen=True)
class Violation:
    doc_id: str
    token_index: int | None
    message: str

    def __str__(self) -> str:
        where = self.doc_id if self.token_index is None else f"{self.doc_id}[{self.token_index}]"
        return f"{where}: {self.message}"


def validate_corpus(corpus: Corpus) -> list[Violation]:
    """Every invariant violation in ``corpus``; empty iff the corpus is valid."""
    out: list[Violation] = []
    seen: set[str] = set()
    for doc in corpus.documents:
        if doc.doc_id in seen:
            out.append(Violation(doc.doc_id, None, "duplicate doc_id"))
        seen.add(doc.doc_id)
        if not doc.tokens:
            out.append(Violation(doc.doc_id, None, "document has no tokens"))
        for i, tok in enumerate(doc.tokens):
            for msg in tok.bbox.violations():
                out.append(Violation(doc.doc_id, i, msg))
            if not tok.text.strip():
                out.append(Violation(doc.doc_id, i, "empty token text"))
            if tok.gt_label is not None and tok.gt_label not in corpus.label_set:
                out.append(Violation(doc.doc_id, i, f"unknown gt_label {tok.gt_label!r}"))
    return out


def resolve_labels(scores, label_set: LabelSet, doc_id: str = "<scores>", n_tokens: int | None = None) -> list[str]:
    """Per-token argmax over class scores.

    Tied maxima resolve to the class that comes first in ``label_set``
    (``np.argmax`` returns the first occurrence).  NaN scores are rejected.
    """
    scores = np.asarray(scores, dtype=float)
    expected = (len(scores) if n_tokens is None else n_tokens, len(label_set))
    if scores.ndim != 2 or scores.shape != expected:
        raise PredictionError(f"{doc_id}: score matrix shape {scores.shape}, expected {expected}")
    if np.isnan(scores).any():
        row = int(np.argwhere(np.isnan(scores))[0, 0])
        raise PredictionError(f"{doc_id}: NaN score in row {row}")
    if len(scores) and not np.isfinite(scores).any(axis=1).all():
        row = int(np.flatnonzero(~np.isfinite(scores).any(axis=1))[0])
        raise PredictionError(f"{doc_id}: row {row} has no finite score")
    names = label_set.names
    return [names[i] for i in scores.argmax(axis=1)]


@dataclass(frozen=True)
class PredictionSet:
    """Predicted labels (or class scores) keyed by doc_id."""

    labels: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    scores: Mapping[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def from_labels(cls, labels: Mapping[str, Sequence[str]]) -> "PredictionSet":
        return cls(labels={k: tuple(v) for k, v in labels.items()})

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self.labels or doc_id in self.scores

    def doc_ids(self) -> list[str]:
        return list(self.labels) + [k for k in self.scores if k not in self.labels]

    def labels_for(self, doc: Document, label_set: LabelSet) -> list[str]:
        """Predicted label names for ``doc``, checked against its token count."""
        if doc.doc_id in self.labels:
            labels = list(self.labels[doc.doc_id])
            if len(labels) != len(doc.tokens):
                raise PredictionError(
                    f"{doc.doc_id}: {len(labels)} predicted labels, expected {len(doc.tokens)}"
                )
            for i, lab in enumerate(labels):
                if lab not in label_set:
                    raise PredictionError(f"{doc.doc_id}[{i}]: unknown predicted label {lab!r}")
            return labels
        if doc.doc_id in self.scores:
            return resolve_labels(self.scores[doc.doc_id], label_set, doc.doc_id, len(doc.tokens))
        raise PredictionError(f"{doc.doc_id}: no prediction for document")
