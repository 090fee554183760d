"""JSON/JSONL readers and writers for corpora, predictions, label sets and fields."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Iterator

import numpy as np

from .alignment import FieldValue
from .core import DEFAULT_LABEL_SET, NONE_LABEL, BoundingBox, Corpus, Document, LabelClass, LabelSet, PredictionSet, Token


class SchemaError(ValueError):
    """An input file is not valid JSON or does not have the expected shape."""

    def __init__(self, path, line: int | None, message: str):
        self.path = str(path)
        self.line = line
        self.message = message
        where = self.path if line is None else f"{self.path}:{line}"
        super().__init__(f"{where}: {message}")

    def to_dict(self) -> dict:
        return {"file": self.path, "line": self.line, "message": self.message}


def _iter_jsonl(path) -> Iterator[tuple[int, Any]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as e:
                raise SchemaError(path, lineno, f"invalid JSON: {e.msg}") from None


def _load_json(path) -> Any:
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as e:
            raise SchemaError(path, e.lineno, f"invalid JSON: {e.msg}") from None


def _require(obj, key, kind, path, lineno):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(path, lineno, f"missing field {key!r}")
    value = obj[key]
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise SchemaError(path, lineno, f"field {key!r} has wrong type {type(value).__name__}")
    return value


def _document(obj, path, lineno) -> Document:
    doc_id = _require(obj, "doc_id", str, path, lineno)
    creditor_id = obj.get("creditor_id", "")
    if not isinstance(creditor_id, str):
        raise SchemaError(path, lineno, "field 'creditor_id' must be a string")
    tokens = []
    for i, t in enumerate(_require(obj, "tokens", list, path, lineno)):
        text = _require(t, "text", str, path, lineno)
        bbox = _require(t, "bbox", list, path, lineno)
        if len(bbox) != 4 or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in bbox):
            raise SchemaError(path, lineno, f"token {i}: bbox must be 4 numbers")
        gt = t.get("gt_label")
        if gt is not None and not isinstance(gt, str):
            raise SchemaError(path, lineno, f"token {i}: gt_label must be a string or null")
        tokens.append(Token(text, BoundingBox(*bbox), gt))
    return Document(doc_id, creditor_id, tuple(tokens))


def read_corpus(path, label_set: LabelSet = DEFAULT_LABEL_SET) -> Corpus:
    return Corpus(tuple(_document(obj, path, n) for n, obj in _iter_jsonl(path)), label_set)


def document_to_dict(doc: Document) -> dict:
    return {
        "doc_id": doc.doc_id,
        "creditor_id": doc.creditor_id,
        "tokens": [{"text": t.text, "bbox": t.bbox.as_list(), "gt_label": t.gt_label} for t in doc.tokens],
    }


def corpus_lines(docs: Iterable[Document]) -> str:
    return "".join(json.dumps(document_to_dict(d), ensure_ascii=False) + "\n" for d in docs)


def read_predictions(path) -> PredictionSet:
    labels: dict[str, tuple[str, ...]] = {}
    scores: dict[str, np.ndarray] = {}
    for lineno, obj in _iter_jsonl(path):
        doc_id = _require(obj, "doc_id", str, path, lineno)
        if doc_id in labels or doc_id in scores:
            raise SchemaError(path, lineno, f"duplicate prediction for {doc_id!r}")
        if "labels" in obj:
            labs = _require(obj, "labels", list, path, lineno)
            if not all(isinstance(x, str) for x in labs):
                raise SchemaError(path, lineno, "labels must be strings")
            labels[doc_id] = tuple(labs)
        elif "scores" in obj:
            try:
                arr = np.asarray(obj["scores"], dtype=float)
            except (TypeError, ValueError):
                raise SchemaError(path, lineno, "scores must be a numeric matrix") from None
            if arr.ndim != 2 and arr.size:
                raise SchemaError(path, lineno, "scores must be a numeric matrix")
            scores[doc_id] = arr
        else:
            raise SchemaError(path, lineno, "expected 'labels' or 'scores'")
    return PredictionSet(labels=labels, scores=scores)


def prediction_lines(preds: PredictionSet) -> str:
    out = [json.dumps({"doc_id": k, "labels": list(v)}, ensure_ascii=False) for k, v in preds.labels.items()]
    out += [json.dumps({"doc_id": k, "scores": np.asarray(v).tolist()}) for k, v in preds.scores.items()]
    return "".join(line + "\n" for line in out)


def read_label_set(path) -> LabelSet:
    obj = _load_json(path)
    classes = _require(obj, "classes", list, path, None)
    parsed = []
    for c in classes:
        name = _require(c, "name", str, path, None)
        parsed.append(LabelClass(name, bool(c.get("exact_match_required", False))))
    if not parsed or parsed[0].name != NONE_LABEL:
        raise SchemaError(path, None, f"first class must be {NONE_LABEL!r}")
    try:
        return LabelSet(tuple(parsed))
    except ValueError as e:
        raise SchemaError(path, None, str(e)) from None


def label_set_to_dict(label_set: LabelSet) -> dict:
    return {"classes": [{"name": c.name, "exact_match_required": c.exact_match_required}
                        for c in label_set.classes]}


def read_fields(path) -> dict[str, list[FieldValue]]:
    out: dict[str, list[FieldValue]] = {}
    for lineno, obj in _iter_jsonl(path):
        doc_id = _require(obj, "doc_id", str, path, lineno)
        fields = []
        for f in _require(obj, "fields", list, path, lineno):
            cls = _require(f, "class", str, path, lineno)
            value = _require(f, "value", str, path, lineno)
            try:
                fields.append(FieldValue(cls, value))
            except ValueError as e:
                raise SchemaError(path, lineno, str(e)) from None
        out[doc_id] = fields
    return out


def read_json(path) -> Any:
    return _load_json(path)


def atomic_write(path, text: str) -> None:
    """Write ``text`` to a temp file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
