import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dipeval import BoundingBox, Corpus, Document, LabelSet, Token  # noqa: E402

_acceptance: dict[int, tuple[str, str]] = {}


def make_corpus(gt_docs, label_names=None, creditors=None):
    """Corpus from lists of gt labels; token texts and boxes are filler."""
    if label_names is None:
        label_names = ["None"] + sorted({g for doc in gt_docs for g in doc if g != "None"})
    docs = []
    for i, gt in enumerate(gt_docs):
        tokens = tuple(Token(f"t{j}", BoundingBox(j * 10, 0, j * 10 + 8, 10), g) for j, g in enumerate(gt))
        docs.append(Document(f"d{i}", creditors[i] if creditors else f"c{i}", tokens))
    return Corpus(tuple(docs), LabelSet.from_names(label_names))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    if rep.when == "call" or rep.failed:
        status = "PASS" if rep.passed else "FAIL"
        if _acceptance.get(number, ("", "PASS"))[1] != "FAIL":
            _acceptance[number] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        title, status = _acceptance[number]
        terminalreporter.write_line(f"[{status}] criterion {number}: {title}")
