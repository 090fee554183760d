from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dipeval import (DEFAULT_LABEL_SET, ClassCounts, DipScope, PredictionError, PredictionSet, class_counts,
                     confusion_matrix, dip, evaluate, f1, precision, recall, token_accuracy)

from conftest import make_corpus
from oracles import counts_oracle, dip_set_oracle

ALL, NON_NONE = DipScope.ALL_TOKENS, DipScope.NON_NONE_ONLY


def preds_for(corpus, pred_docs):
    return PredictionSet.from_labels({d.doc_id: p for d, p in zip(corpus.documents, pred_docs)})


def test_counts_examples():
    c = make_corpus([["A", "None", "B"]], ["None", "A", "B"])
    assert class_counts(c, preds_for(c, [["A", "None", "B"]]), "A") == ClassCounts("A", 1, 0, 0)
    c = make_corpus([["A", "A", "None"]], ["None", "A"])
    assert class_counts(c, preds_for(c, [["A", "None", "A"]]), "A") == ClassCounts("A", 1, 1, 1)


def test_missing_or_empty_prediction_names_document():
    c = make_corpus([["A"], ["A", "None"]], ["None", "A"])
    with pytest.raises(PredictionError, match="d1"):
        class_counts(c, PredictionSet.from_labels({"d0": ["A"], "d1": []}), "A")
    with pytest.raises(PredictionError, match="d1"):
        dip(c, PredictionSet.from_labels({"d0": ["A"]}))


def test_rate_examples():
    c = ClassCounts("A", tp=9, fp=1, fn=1)
    assert precision(c) == recall(c) == f1(c) == Fraction(9, 10)
    zero = ClassCounts("A")
    assert precision(zero) == recall(zero) == f1(zero) == 0
    full = ClassCounts("A", tp=7)
    assert precision(full) == recall(full) == f1(full) == 1


def test_rates_against_confusion_matrix():
    gt = [["A"] * 10]
    pred = [["A"] * 9 + ["None"]]
    c = make_corpus(gt + [["None"]], ["None", "A"])
    counts = class_counts(c, preds_for(c, pred + [["A"]]), "A")
    assert counts_oracle(gt + [["None"]], pred + [["A"]], "A") == (counts.tp, counts.fp, counts.fn)
    assert f1(counts) == Fraction(9, 10)


def test_dip_examples():
    gt = [["A", "None"], ["B"], ["A", "B"], ["None", "A"]]
    pred = [["A", "None"], ["B"], ["A", "A"], ["None", "A"]]
    c = make_corpus(gt)
    assert dip(c, preds_for(c, pred)) == Fraction(3, 4)
    assert dip(c, preds_for(c, gt)) == 1


def test_dip_rejects_empty_corpus():
    with pytest.raises(ValueError):
        dip(make_corpus([]), PredictionSet())


def test_scope_changes_none_errors():
    c = make_corpus([["A", "None"]])
    p = preds_for(c, [["A", "A"]])
    assert dip(c, p, NON_NONE) == 1
    assert dip(c, p, ALL) == 0


def test_document_counted_wrong_once():
    c = make_corpus([["A", "A", "A"], ["A"]])
    assert dip(c, preds_for(c, [["None"] * 3, ["A"]])) == Fraction(1, 2)


def test_scores_form_predictions():
    c = make_corpus([["None", "A"]], ["None", "A"])
    p = PredictionSet(scores={"d0": [[0.5, 0.5], [0.1, 0.9]]})
    assert dip(c, p) == 1


def test_evaluate_perfect():
    c = make_corpus([["A", "None", "B"], ["B"]])
    r = evaluate(c, preds_for(c, [["A", "None", "B"], ["B"]]))
    assert r.macro_f1 == 1 and r.dip == 1 and r.document_failures == ()


def test_evaluate_class_a_right_b_wrong_once_per_doc():
    gt = [["A", "B", "B", "None"], ["B", "A", "None"]]
    pred = [["A", "None", "B", "None"], ["None", "A", "None"]]
    c = make_corpus(gt)
    r = evaluate(c, preds_for(c, pred), NON_NONE)
    assert r.get("A").f1 == 1
    assert r.dip == 0 == dip_set_oracle(gt, pred, True)
    assert [(f.doc_id, f.token_index, f.gt_label, f.predicted_label) for f in r.document_failures] == [
        ("d0", 1, "B", "None"), ("d1", 0, "B", "None")]


def test_evaluate_lists_the_five_receipt_classes():
    gt = [["None", "invoicenumber", "documentdate", "creditorname", "grossamount", "netamount"]]
    c = make_corpus(gt, DEFAULT_LABEL_SET.names)
    r = evaluate(c, preds_for(c, gt))
    assert r.class_names == ["invoicenumber", "documentdate", "creditorname", "grossamount", "netamount"]


def test_failure_extracts_capped_per_class():
    gt = [["A", "B"]] * 5
    pred = [["B", "B"]] * 5
    c = make_corpus(gt)
    r = evaluate(c, preds_for(c, pred), max_extracts=3)
    assert len(r.failure_extracts["A"]) == 3
    assert len(r.failure_extracts["B"]) == 3
    assert r.failure_extracts["A"][0].text == "t0"


def test_unlabeled_tokens_rejected():
    c = make_corpus([[None]], ["None"])
    with pytest.raises(PredictionError, match="ground-truth"):
        dip(c, preds_for(c, [["None"]]))


def test_confusion_matrix_layout():
    c = make_corpus([["None", "A", "A"]], ["None", "A"])
    cm = confusion_matrix(c, preds_for(c, [["A", "A", "None"]]))
    assert cm.tolist() == [[0, 1], [1, 1]]


# -- properties over random corpora -------------------------------------------------

@st.composite
def corpora(draw, max_docs=12, max_tokens=10, uniform_in_scope=False):
    n_classes = draw(st.integers(1, 5))
    names = ["None"] + [f"C{i}" for i in range(1, n_classes)]
    label = st.sampled_from(names)
    n_docs = draw(st.integers(1, max_docs))
    if uniform_in_scope:
        n_tokens = draw(st.integers(1, max_tokens))
        gt = [[draw(label) for _ in range(n_tokens)] for _ in range(n_docs)]
    else:
        gt = [draw(st.lists(label, min_size=1, max_size=max_tokens)) for _ in range(n_docs)]
    pred = [[draw(label) for _ in doc] for doc in gt]
    return names, gt, pred


@given(corpora())
def test_dip_equals_set_oracle(case):
    names, gt, pred = case
    c = make_corpus(gt, names)
    p = preds_for(c, pred)
    assert dip(c, p, NON_NONE) == dip_set_oracle(gt, pred, True)
    assert dip(c, p, ALL) == dip_set_oracle(gt, pred, False)
    assert evaluate(c, p, ALL).dip == dip(c, p, ALL)


@given(corpora())
def test_scope_ordering(case):
    names, gt, pred = case
    c = make_corpus(gt, names)
    p = preds_for(c, pred)
    assert dip(c, p, ALL) <= dip(c, p, NON_NONE)


@given(corpora(), st.randoms(use_true_random=False))
def test_dip_permutation_invariant(case, rnd):
    names, gt, pred = case
    c = make_corpus(gt, names)
    base = dip(c, preds_for(c, pred), ALL)
    pairs = list(zip(gt, pred))
    rnd.shuffle(pairs)
    shuffled = []
    for g, p in pairs:
        idx = list(range(len(g)))
        rnd.shuffle(idx)
        shuffled.append(([g[i] for i in idx], [p[i] for i in idx]))
    gt2, pred2 = [g for g, _ in shuffled], [p for _, p in shuffled]
    c2 = make_corpus(gt2, names)
    assert dip(c2, preds_for(c2, pred2), ALL) == base


@given(corpora(uniform_in_scope=True))
def test_dip_at_most_token_accuracy_for_equal_length_documents(case):
    names, gt, pred = case
    c = make_corpus(gt, names)
    p = preds_for(c, pred)
    assert dip(c, p, ALL) <= token_accuracy(c, p, ALL)


def test_dip_can_exceed_token_accuracy_for_unequal_documents():
    # one long all-wrong document, two short correct ones
    gt = [["A"] * 100, ["A"], ["A"]]
    pred = [["None"] * 100, ["A"], ["A"]]
    c = make_corpus(gt)
    p = preds_for(c, pred)
    assert dip(c, p) == Fraction(2, 3)
    assert token_accuracy(c, p) == Fraction(2, 102)


@settings(max_examples=200)
@given(corpora(), st.data())
def test_corrupting_one_token_never_increases_a_metric(case, data):
    names, gt, pred = case
    if len(names) < 2:
        return
    pred = [list(g) for g in gt]  # start fully correct, then corrupt extra tokens
    for d, doc in enumerate(gt):
        for i in range(len(doc)):
            if data.draw(st.booleans()):
                pred[d][i] = data.draw(st.sampled_from(names))
    cells = [(d, i) for d, doc in enumerate(gt) for i in range(len(doc)) if pred[d][i] == gt[d][i]]
    if not cells:
        return
    d, i = data.draw(st.sampled_from(cells))
    after = [list(p) for p in pred]
    after[d][i] = data.draw(st.sampled_from([n for n in names if n != gt[d][i]]))
    c = make_corpus(gt, names)
    for scope in (ALL, NON_NONE):
        r0 = evaluate(c, preds_for(c, pred), scope)
        r1 = evaluate(c, preds_for(c, after), scope)
        assert r1.dip <= r0.dip
        assert r1.macro_f1 <= r0.macro_f1
        for a, b in zip(r0.per_class, r1.per_class):
            assert b.precision <= a.precision and b.recall <= a.recall and b.f1 <= a.f1
