"""Evaluation toolkit for token classification on visual documents.

Per-class precision/recall/F1 next to Document Integrity Precision (DIP),
ground-truth alignment of field values to OCR tokens, creditor-aware
dataset splits, and a noise simulator.
"""

from .core import (DEFAULT_LABEL_SET, NONE_LABEL, RECEIPT_CLASSES, BoundingBox, Corpus, Document, LabelClass,
                   LabelSet, PredictionError, PredictionSet, Token, Violation, resolve_labels, validate_corpus)
from .alignment import (AnnotatedDocument, FieldValue, MatchPolicy, MatchResult, Omitted, annotate_document,
                        is_sub, levenshtein, match_field, text_distance)
from .metrics import (ClassCounts, ClassReport, DipScope, DocumentFailure, EvaluationReport, class_counts,
                      confusion_matrix, dip, evaluate, f1, precision, recall, token_accuracy)
from .splitting import Scenario, SplitResult, SplitSpec, split
from .simulator import CorpusSpec, ConfusionTarget, NoiseSpec, expected_dip, generate_corpus, perturb, sweep

__version__ = "0.1.0"
