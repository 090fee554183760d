"""Token-level ground truth from field-level labels.

Each field value (e.g. a gross amount recorded in the bookkeeping system) is
located among the OCR tokens of its document with a text distance that is 0
whenever one string contains the other and the Levenshtein distance
otherwise.  Documents with any field that cannot be located are dropped
rather than trained on with noisy labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .core import NONE_LABEL, Document, LabelSet

DEFAULT_EXACT_CLASSES = frozenset({"documentdate", "grossamount", "netamount"})


def levenshtein(a: str, b: str, max_distance: int | None = None) -> int:
    """Minimum number of single-character insertions, deletions and substitutions turning ``a`` into ``b``.

    With ``max_distance`` set, the computation stops as soon as the distance
    is known to exceed the bound and returns ``max_distance + 1``.
    """
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if max_distance is not None and len(a) - len(b) > max_distance:
        return max_distance + 1
    if not b:
        return len(a)

    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        current = [i]
        for j, cb in enumerate(b, 1):
            current.append(min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (ca != cb),
            ))
        if max_distance is not None and min(current) > max_distance:
            return max_distance + 1
        previous = current
    return previous[-1]


def is_sub(a: str, b: str, case_sensitive: bool = True) -> bool:
    """True iff ``a`` occurs as a contiguous run of characters in ``b``."""
    if not case_sensitive:
        a, b = a.casefold(), b.casefold()
    return a in b


def text_distance(candidate: str, label_text: str, case_sensitive: bool = True,
                  max_distance: int | None = None) -> int:
    if is_sub(candidate, label_text, case_sensitive) or is_sub(label_text, candidate, case_sensitive):
        return 0
    return levenshtein(candidate, label_text, max_distance)


def _strip_ws(s: str) -> str:
    return "".join(s.split())


@dataclass(frozen=True)
class FieldValue:
    class_name: str
    value: str

    def __post_init__(self):
        if self.class_name == NONE_LABEL:
            raise ValueError("a field value cannot carry the background class")
        if not self.value.strip():
            raise ValueError(f"empty value for field {self.class_name!r}")


@dataclass(frozen=True)
class MatchPolicy:
    """Search limits for locating field values.

    The Levenshtein bound for a value of length ``n`` is
    ``min(n, max(lev_floor, floor(lev_ratio * n)))``.
    """

    lev_ratio: float = 0.2
    lev_floor: int = 1
    exact_only_classes: frozenset[str] = DEFAULT_EXACT_CLASSES
    window_max_tokens: int = 8

    def __post_init__(self):
        if self.window_max_tokens < 1:
            raise ValueError("window_max_tokens must be positive")
        if self.lev_ratio < 0 or self.lev_floor < 0:
            raise ValueError("Levenshtein bounds must be non-negative")
        object.__setattr__(self, "exact_only_classes", frozenset(self.exact_only_classes))

    def max_lev_distance(self, length: int) -> int:
        return min(length, max(self.lev_floor, math.floor(self.lev_ratio * length)))

    @classmethod
    def from_dict(cls, d: dict) -> "MatchPolicy":
        kwargs = dict(d)
        if "exact_only_classes" in kwargs:
            kwargs["exact_only_classes"] = frozenset(kwargs["exact_only_classes"])
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {
            "lev_ratio": self.lev_ratio,
            "lev_floor": self.lev_floor,
            "exact_only_classes": sorted(self.exact_only_classes),
            "window_max_tokens": self.window_max_tokens,
        }


@dataclass(frozen=True)
class MatchResult:
    matched: bool
    start: int | None = None
    stop: int | None = None  # inclusive
    distance: int | None = None
    # equally good windows elsewhere in the document (no overlap with the chosen one)
    ties: int = 0

    @property
    def span(self) -> tuple[int, int] | None:
        return None if not self.matched else (self.start, self.stop)


NO_MATCH = MatchResult(False)


def match_field(field: FieldValue, doc: Document | Sequence[str], policy: MatchPolicy = MatchPolicy(),
                blocked: Sequence[bool] | None = None) -> MatchResult:
    """Locate ``field.value`` in a window of consecutive tokens.

    Windows of 1..``policy.window_max_tokens`` tokens are joined by single
    spaces and ranked by text distance.  Among equal distances the window
    whose plain edit distance to the value is smallest wins, then the
    earliest start, then the shortest window.  The substring test is
    case-insensitive.

    Exact-only classes (amounts, dates) skip the distance entirely: a window
    qualifies only if it equals the value once all whitespace is removed, so
    neither a lone currency sign nor "40.00" inside "140.00" counts.

    Windows touching a ``blocked`` token are skipped.
    """
    texts = doc.texts if isinstance(doc, Document) else list(doc)
    exact = field.class_name in policy.exact_only_classes
    value = _strip_ws(field.value) if exact else field.value
    bound = policy.max_lev_distance(len(field.value))

    candidates = []
    for start in range(len(texts)):
        for stop in range(start, min(len(texts), start + policy.window_max_tokens)):
            if blocked is not None and blocked[stop]:
                break
            if exact:
                if "".join(_strip_ws(t) for t in texts[start:stop + 1]) == value:
                    candidates.append((0, 0, start, stop))
                continue
            window = " ".join(texts[start:stop + 1])
            dist = text_distance(window, value, case_sensitive=False, max_distance=bound)
            if dist > bound:
                continue
            residual = dist if dist else levenshtein(window, value)
            candidates.append((dist, residual, start, stop))
    if not candidates:
        return NO_MATCH
    dist, residual, start, stop = min(candidates)
    ties = sum(1 for d, r, s, e in candidates if (d, r) == (dist, residual) and (e < start or s > stop))
    return MatchResult(True, start, stop, dist, ties)


@dataclass(frozen=True)
class AnnotatedDocument:
    document: Document
    spans: dict[str, tuple[int, int]] = field(default_factory=dict)
    # classes whose best window was not unique
    ambiguous: tuple[str, ...] = ()


@dataclass(frozen=True)
class Omitted:
    doc_id: str
    class_name: str
    reason: str  # "no_match" or "overlap"


def annotate_document(doc: Document, fields: Sequence[FieldValue], policy: MatchPolicy = MatchPolicy(),
                      label_set: LabelSet | None = None) -> AnnotatedDocument | Omitted:
    """Set ``gt_label`` on every matched span and ``None`` everywhere else.

    Fields are matched in list order; a later field may not reuse tokens
    already claimed by an earlier one.  The whole document is omitted as
    soon as one field cannot be placed.
    """
    classes = [f.class_name for f in fields]
    dupes = sorted({c for c in classes if classes.count(c) > 1})
    if dupes:
        raise ValueError(f"{doc.doc_id}: duplicate field classes {dupes}")
    if label_set is not None:
        unknown = [c for c in classes if c not in label_set]
        if unknown:
            raise ValueError(f"{doc.doc_id}: field classes not in label set: {unknown}")

    blocked = [False] * len(doc.tokens)
    labels = [NONE_LABEL] * len(doc.tokens)
    spans: dict[str, tuple[int, int]] = {}
    ambiguous = []
    for f in fields:
        res = match_field(f, doc, policy, blocked)
        if not res.matched:
            reason = "overlap" if any(blocked) and match_field(f, doc, policy).matched else "no_match"
            return Omitted(doc.doc_id, f.class_name, reason)
        for i in range(res.start, res.stop + 1):
            blocked[i] = True
            labels[i] = f.class_name
        spans[f.class_name] = res.span
        if res.ties:
            ambiguous.append(f.class_name)
    return AnnotatedDocument(doc.with_labels(labels), spans, tuple(ambiguous))
