"""Rendering and (de)serialization of evaluation reports.

Numbers are printed with 3 decimals; JSON keeps full precision plus the raw
counts so a report read back from disk is identical to the one written.
"""

from __future__ import annotations

import csv
import hashlib
import io
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .metrics import ClassCounts, ClassReport, DipScope, DocumentFailure, EvaluationReport

DECIMALS = 3


def fmt(x) -> str:
    return f"{float(x):.{DECIMALS}f}"


def _failure_to_dict(f: DocumentFailure) -> dict:
    return {"doc_id": f.doc_id, "token_index": f.token_index, "gt": f.gt_label,
            "predicted": f.predicted_label, "text": f.text}


def _failure_from_dict(d: dict) -> DocumentFailure:
    return DocumentFailure(d["doc_id"], d["token_index"], d["gt"], d["predicted"], d.get("text", ""))


def report_to_dict(report: EvaluationReport) -> dict:
    out = {
        "scope": report.scope.value,
        "classes": report.class_names,
        "per_class": [],
        "macro_f1": float(report.macro_f1),
        "dip": float(report.dip),
        "num_documents": report.num_documents,
        "num_correct_documents": (None if report.num_documents is None
                                  else report.num_documents - len(report.document_failures)),
        "document_failures": [_failure_to_dict(f) for f in report.document_failures],
    }
    for r in report.per_class:
        row = {"class": r.class_name, "precision": float(r.precision), "recall": float(r.recall), "f1": float(r.f1)}
        if r.counts is not None:
            row.update(tp=r.counts.tp, fp=r.counts.fp, fn=r.counts.fn)
        out["per_class"].append(row)
    if report.failure_extracts:
        out["failure_extracts"] = {k: [_failure_to_dict(f) for f in v] for k, v in report.failure_extracts.items()}
    return out


def report_from_dict(d: dict) -> EvaluationReport:
    """Inverse of :func:`report_to_dict`.

    Rates are rebuilt exactly from counts when the counts are present;
    hand-written reports that only carry rates are accepted as floats.
    """
    per_class = []
    for row in d["per_class"]:
        if all(k in row for k in ("tp", "fp", "fn")):
            per_class.append(ClassReport.from_counts(ClassCounts(row["class"], row["tp"], row["fp"], row["fn"])))
        else:
            per_class.append(ClassReport(row["class"], row.get("precision", 0.0), row.get("recall", 0.0), row["f1"]))
    n, correct = d.get("num_documents"), d.get("num_correct_documents")
    dip = Fraction(correct, n) if n and correct is not None else d["dip"]
    return EvaluationReport(
        per_class=tuple(per_class),
        dip=dip,
        scope=DipScope(d.get("scope", DipScope.NON_NONE_ONLY.value)),
        num_documents=n,
        document_failures=tuple(_failure_from_dict(f) for f in d.get("document_failures", [])),
        failure_extracts={k: tuple(_failure_from_dict(f) for f in v)
                          for k, v in d.get("failure_extracts", {}).items()},
    )


def report_to_csv(report: EvaluationReport) -> str:
    """One row per class plus a DIP row; ``value`` holds F1 for classes and DIP for the last row."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "value", "precision", "recall", "tp", "fp", "fn"])
    for r in report.per_class:
        c = r.counts
        w.writerow([r.class_name, fmt(r.f1), fmt(r.precision), fmt(r.recall),
                    *(("", "", "") if c is None else (c.tp, c.fp, c.fn))])
    w.writerow(["DIP", fmt(report.dip), "", "", "", "", ""])
    return buf.getvalue()


def _table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    line = lambda cells: "  ".join(str(c).rjust(w) if i else str(c).ljust(w)
                                   for i, (c, w) in enumerate(zip(cells, widths)))
    sep = "  ".join("-" * w for w in widths)
    return "\n".join([line(header), sep, *map(line, rows)]) + "\n"


def render_report(report: EvaluationReport) -> str:
    rows = []
    for r in report.per_class:
        c = r.counts
        rows.append([r.class_name, fmt(r.precision), fmt(r.recall), fmt(r.f1),
                     *(("-", "-", "-") if c is None else (c.tp, c.fp, c.fn))])
    text = _table(["label", "precision", "recall", "f1", "tp", "fp", "fn"], rows)
    text += f"\nmacro F1  {fmt(report.macro_f1)}\nDIP       {fmt(report.dip)}  (scope: {report.scope.value}"
    if report.num_documents is not None:
        text += f", {report.num_documents - len(report.document_failures)}/{report.num_documents} documents correct"
    return text + ")\n"


def render_failures(report: EvaluationReport) -> str:
    """Per-class failure extracts: doc_id, token text, ground truth, prediction."""
    out = []
    for name, items in report.failure_extracts.items():
        if not items:
            continue
        out.append(f"[{name}]")
        for f in items:
            out.append(f"  {f.doc_id}  token {f.token_index} {f.text!r}: gt={f.gt_label} predicted={f.predicted_label}")
    return "\n".join(out) + ("\n" if out else "")


class LabelSetMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Comparison:
    names: tuple[str, str]
    classes: tuple[str, ...]
    rows: tuple[tuple, tuple]  # per report: f1 per class followed by DIP

    @property
    def deltas(self) -> tuple:
        a, b = self.rows
        return tuple(y - x for x, y in zip(a, b))

    def render(self) -> str:
        header = ["scenario", *self.classes, "DIP"]
        body = [[name, *map(fmt, row)] for name, row in zip(self.names, self.rows)]
        body.append(["delta", *map(fmt, self.deltas)])
        return _table(header, body)


def compare(report_a: EvaluationReport, report_b: EvaluationReport, names=("A", "B")) -> Comparison:
    """Side-by-side per-class F1 and DIP; deltas are ``b - a``.  Column order follows ``report_a``."""
    a_names, b_names = report_a.class_names, report_b.class_names
    for name in a_names:
        if name not in b_names:
            raise LabelSetMismatch(f"class {name!r} missing from {names[1]}")
    for name in b_names:
        if name not in a_names:
            raise LabelSetMismatch(f"class {name!r} missing from {names[0]}")
    rows = tuple(
        tuple(rep.get(c).f1 for c in a_names) + (rep.dip,) for rep in (report_a, report_b)
    )
    return Comparison(tuple(names), tuple(a_names), rows)


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return "sha256:" + h.hexdigest()


@dataclass
class RunManifest:
    command: str
    arguments: dict
    inputs: dict = field(default_factory=dict)
    version: str = ""
    timestamp: str = ""
    extra: dict = field(default_factory=dict)

    @classmethod
    def start(cls, command: str, arguments: dict, input_paths: dict) -> "RunManifest":
        from . import __version__
        return cls(
            command=command,
            arguments={k: (str(v) if isinstance(v, Path) else v) for k, v in arguments.items()},
            inputs={k: {"path": str(p), "digest": file_digest(p)} for k, p in input_paths.items() if p is not None},
            version=__version__,
            timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        )

    def to_dict(self) -> dict:
        d = {"command": self.command, "arguments": self.arguments, "inputs": self.inputs,
             "tool_version": self.version, "timestamp": self.timestamp,
             "python": sys.version.split()[0]}
        d.update(self.extra)
        return d
