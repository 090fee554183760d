"""Command-line entry point: ``dipeval <subcommand>`` (or ``python -m dipeval``).

Exit status: 0 on success, 1 when inputs parse but fail validation, 2 on
malformed or missing input files and bad command lines.  Diagnostics go to
stderr as ``<kind>: <json>`` with kind one of ``usage-error``,
``missing-file``, ``schema-error``, ``validation-error``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .alignment import AnnotatedDocument, MatchPolicy, annotate_document
from .core import DEFAULT_LABEL_SET, Corpus, PredictionError, validate_corpus
from .formats import (SchemaError, atomic_write, corpus_lines, label_set_to_dict, prediction_lines, read_corpus,
                      read_fields, read_json, read_label_set, read_predictions)
from .metrics import DipScope, evaluate
from .report import (LabelSetMismatch, RunManifest, compare, render_failures, render_report, report_from_dict,
                     report_to_csv, report_to_dict)
from .simulator import CorpusSpec, NoiseSpec, generate_corpus, perturb, sweep
from .splitting import SplitSpec, split


class CliError(Exception):
    def __init__(self, kind: str, payload: dict, status: int):
        super().__init__(payload.get("message", kind))
        self.kind, self.payload, self.status = kind, payload, status


def _validation(message: str, **extra) -> CliError:
    return CliError("validation-error", {"message": message, **extra}, 1)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("usage-error", {"message": message, "usage": self.format_usage().strip()}, 2)


def _write_json(path, obj) -> None:
    atomic_write(path, json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


def _write_with_manifest(path, text: str, manifest: RunManifest) -> None:
    atomic_write(path, text)
    _write_json(f"{path}.manifest.json", manifest.to_dict())


def _say(args, text: str) -> None:
    if not args.quiet:
        sys.stdout.write(text)


def _label_set(args):
    return read_label_set(args.labels) if args.labels else DEFAULT_LABEL_SET


def _check_corpus(corpus: Corpus) -> None:
    violations = validate_corpus(corpus)
    if violations:
        raise _validation("corpus failed validation", violations=[str(v) for v in violations])


def _args_dict(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


def cmd_align(args) -> int:
    label_set = _label_set(args)
    corpus = read_corpus(args.ocr, label_set)
    fields = read_fields(args.fields)
    policy = MatchPolicy.from_dict(read_json(args.policy)) if args.policy else MatchPolicy()
    _check_corpus(corpus)

    kept, audit = [], []
    for doc in corpus.documents:
        if doc.doc_id not in fields:
            audit.append({"doc_id": doc.doc_id, "reason": "missing_fields", "class": None})
            continue
        try:
            res = annotate_document(doc, fields[doc.doc_id], policy, label_set)
        except ValueError as e:
            raise _validation(str(e), doc_id=doc.doc_id) from None
        if isinstance(res, AnnotatedDocument):
            kept.append(res.document)
            for cls in res.ambiguous:
                audit.append({"doc_id": doc.doc_id, "reason": "ambiguous_match", "class": cls})
        else:
            audit.append({"doc_id": res.doc_id, "reason": res.reason, "class": res.class_name})

    total = len(corpus.documents)
    manifest = RunManifest.start("align", _args_dict(args),
                                 {"ocr": args.ocr, "fields": args.fields, "policy": args.policy, "labels": args.labels})
    manifest.extra = {"policy": policy.to_dict(), "documents": total, "aligned": len(kept),
                      "yield": len(kept) / total if total else 0.0}
    _write_with_manifest(args.out, corpus_lines(kept), manifest)
    atomic_write(args.audit, "".join(json.dumps(a, ensure_ascii=False) + "\n" for a in audit))
    _say(args, f"aligned {len(kept)}/{total} documents (yield {len(kept) / total if total else 0:.3f})\n")
    return 0


def cmd_split(args) -> int:
    corpus = read_corpus(args.corpus, _label_set(args))
    _check_corpus(corpus)
    spec = SplitSpec(args.scenario, args.train_frac, args.seed)
    try:
        result = split(corpus, spec)
    except ValueError as e:
        raise _validation(str(e)) from None
    train, test = set(result.train_ids), set(result.test_ids)
    manifest = RunManifest.start("split", _args_dict(args), {"corpus": args.corpus, "labels": args.labels})
    manifest.extra = {
        "spec": {"scenario": spec.scenario.value, "train_fraction": spec.train_fraction, "seed": spec.seed},
        "achieved_fraction": result.achieved_fraction,
        "train_documents": len(train), "test_documents": len(test),
        "train_creditors": len(result.train_creditors), "test_creditors": len(result.test_creditors),
        "shared_creditors": len(set(result.train_creditors) & set(result.test_creditors)),
    }
    atomic_write(args.out_train, corpus_lines(d for d in corpus.documents if d.doc_id in train))
    atomic_write(args.out_test, corpus_lines(d for d in corpus.documents if d.doc_id in test))
    _write_json(args.manifest or f"{args.out_train}.manifest.json", manifest.to_dict())
    _say(args, f"{spec.scenario.name}: {len(train)} train / {len(test)} test documents "
               f"(achieved fraction {result.achieved_fraction:.3f})\n")
    return 0


def cmd_evaluate(args) -> int:
    corpus = read_corpus(args.corpus, _label_set(args))
    preds = read_predictions(args.preds)
    _check_corpus(corpus)
    scope = DipScope(args.scope)
    try:
        report = evaluate(corpus, preds, scope, max_extracts=args.failures)
    except (PredictionError, ValueError, KeyError) as e:
        raise _validation(str(e)) from None

    _say(args, render_report(report))
    if args.failures:
        _say(args, "\n" + render_failures(report))
    if args.out:
        manifest = RunManifest.start("evaluate", _args_dict(args),
                                     {"corpus": args.corpus, "preds": args.preds, "labels": args.labels})
        if str(args.out).endswith(".csv"):
            _write_with_manifest(args.out, report_to_csv(report), manifest)
        else:
            _write_json(args.out, {**report_to_dict(report), "manifest": manifest.to_dict()})
    return 0


def _load_spec(path, cls):
    raw = read_json(path) if path else {}
    try:
        return cls(**raw)
    except (TypeError, ValueError) as e:
        raise SchemaError(path, None, str(e)) from None


def cmd_simulate(args) -> int:
    spec = _load_spec(args.spec, CorpusSpec)
    noise = _load_spec(args.noise, NoiseSpec)
    corpus = generate_corpus(spec)
    preds = perturb(corpus, noise)
    manifest = RunManifest.start("simulate", _args_dict(args), {"spec": args.spec, "noise": args.noise})
    manifest.extra = {"label_set": label_set_to_dict(corpus.label_set)}
    _write_with_manifest(args.out_corpus, corpus_lines(corpus.documents), manifest)
    _write_with_manifest(args.out_preds, prediction_lines(preds), manifest)
    if args.out_labels:
        _write_json(args.out_labels, label_set_to_dict(corpus.label_set))
    _say(args, f"wrote {len(corpus)} documents\n")
    return 0


def parse_range(text: str) -> list[float]:
    """``start:stop:step`` with ``stop`` included, or a comma-separated list."""
    if ":" not in text:
        return [float(x) for x in text.split(",")]
    start, stop, step = (float(x) for x in text.split(":"))
    if step <= 0 or stop < start:
        raise ValueError(f"bad range {text!r}")
    n = int(round((stop - start) / step)) + 1
    return [round(start + i * step, 12) for i in range(n)]


def cmd_sweep(args) -> int:
    try:
        eps = parse_range(args.eps)
    except ValueError as e:
        raise CliError("usage-error", {"message": str(e)}, 2) from None
    if any(not 0 <= e <= 1 for e in eps):
        raise CliError("usage-error", {"message": "error rates must lie in [0, 1]"}, 2)
    spec = _load_spec(args.spec, CorpusSpec)
    rows = sweep(eps, spec, seed=args.seed, scope=DipScope(args.scope))
    lines = ["epsilon,avg_f1,dip,expected_dip\n"]
    lines += [f"{r.epsilon!r},{r.avg_f1!r},{r.dip!r},{r.expected_dip!r}\n" for r in rows]
    manifest = RunManifest.start("sweep", _args_dict(args), {"spec": args.spec})
    _write_with_manifest(args.out, "".join(lines), manifest)
    _say(args, "".join(f"eps={r.epsilon:.3f}  avg F1={r.avg_f1:.3f}  DIP={r.dip:.3f}  "
                       f"expected={r.expected_dip:.3f}\n" for r in rows))
    return 0


def cmd_compare(args) -> int:
    reports = [report_from_dict(read_json(p)) for p in (args.report_a, args.report_b)]
    names = args.names or [Path(p).stem for p in (args.report_a, args.report_b)]
    try:
        cmp = compare(*reports, names=tuple(names))
    except LabelSetMismatch as e:
        raise _validation(str(e)) from None
    text = cmp.render()
    _say(args, text)
    if args.out:
        manifest = RunManifest.start("compare", _args_dict(args), {"a": args.report_a, "b": args.report_b})
        _write_with_manifest(args.out, text, manifest)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--labels", type=Path, default=argparse.SUPPRESS, help="label-set JSON file")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)

    p = _Parser(prog="dipeval", description="Token classification evaluation with Document Integrity Precision")
    p.add_argument("--labels", type=Path, default=None, help="label-set JSON file")
    p.add_argument("--quiet", action="store_true", default=False)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("align", parents=[common], help="token ground truth from field values")
    s.add_argument("--ocr", type=Path, required=True)
    s.add_argument("--fields", type=Path, required=True)
    s.add_argument("--policy", type=Path)
    s.add_argument("--out", type=Path, required=True)
    s.add_argument("--audit", type=Path, required=True)
    s.set_defaults(func=cmd_align)

    s = sub.add_parser("split", parents=[common], help="creditor-aware train/test split")
    s.add_argument("--corpus", type=Path, required=True)
    s.add_argument("--scenario", choices=["s1", "s2"], required=True)
    s.add_argument("--train-frac", type=float, default=0.8)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out-train", type=Path, required=True)
    s.add_argument("--out-test", type=Path, required=True)
    s.add_argument("--manifest", type=Path)
    s.set_defaults(func=cmd_split)

    s = sub.add_parser("evaluate", parents=[common], help="per-class F1 and DIP")
    s.add_argument("--corpus", type=Path, required=True)
    s.add_argument("--preds", type=Path, required=True)
    s.add_argument("--scope", choices=[m.value for m in DipScope], default=DipScope.NON_NONE_ONLY.value)
    s.add_argument("--out", type=Path, help="report file, .json or .csv")
    s.add_argument("--failures", type=int, default=0, metavar="N", help="show up to N failure extracts per class")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("simulate", parents=[common], help="synthetic corpus and noisy predictions")
    s.add_argument("--spec", type=Path)
    s.add_argument("--noise", type=Path)
    s.add_argument("--out-corpus", type=Path, required=True)
    s.add_argument("--out-preds", type=Path, required=True)
    s.add_argument("--out-labels", type=Path)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("sweep", parents=[common], help="F1 vs DIP over a range of error rates")
    s.add_argument("--eps", default="0:0.2:0.01")
    s.add_argument("--spec", type=Path)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--scope", choices=[m.value for m in DipScope], default=DipScope.NON_NONE_ONLY.value)
    s.add_argument("--out", type=Path, required=True)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("compare", parents=[common], help="side-by-side F1/DIP of two evaluate reports")
    s.add_argument("report_a", type=Path)
    s.add_argument("report_b", type=Path)
    s.add_argument("--names", nargs=2)
    s.add_argument("--out", type=Path)
    s.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except CliError as e:
        kind, payload, status = e.kind, e.payload, e.status
    except SchemaError as e:
        kind, payload, status = "schema-error", e.to_dict(), 2
    except FileNotFoundError as e:
        kind, payload, status = "missing-file", {"file": e.filename, "message": e.strerror}, 2
    sys.stderr.write(f"{kind}: {json.dumps(payload, ensure_ascii=False)}\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
