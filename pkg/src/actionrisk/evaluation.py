"""Confusion matrices, classification metrics, and cohort-partitioned reports.

The four metrics are accuracy, precision, sensitivity and specificity. In
the binary case they follow the usual TP/TN/FP/FN formulas with class 1 as
the positive class. For multi-class single-label data, accuracy is
trace/total, precision is micro-averaged one-vs-rest (which makes it equal
accuracy exactly), and sensitivity/specificity are macro-averaged
one-vs-rest. Reliability, as consumed by the reasoning layer, is the rank-1
accuracy of the relevant cohort.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .data import ATTRIBUTE_DOMAINS, Attributes


class EmptyMatrixError(ValueError):
    """Metrics were requested for a confusion matrix with no samples."""


@dataclass(frozen=True)
class ConfusionMatrix:
    """Integer count grid; rows are ground truth, columns are predictions."""

    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise ValueError(f"confusion matrix must be square, got {counts.shape}")
        if np.any(counts < 0):
            raise ValueError("confusion matrix counts must be non-negative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def n_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @classmethod
    def from_binary_counts(cls, tp: int, tn: int, fp: int, fn: int) -> "ConfusionMatrix":
        """2x2 matrix with class 1 as the positive class."""
        return cls(np.array([[tn, fp], [fn, tp]], dtype=np.int64))


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: float
    sensitivity: float
    specificity: float

    def __post_init__(self):
        for name in ("accuracy", "precision", "sensitivity", "specificity"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class CohortMetrics:
    metrics: MetricsReport
    cm: ConfusionMatrix
    count: int


@dataclass(frozen=True)
class CohortReport:
    """Baseline metrics plus one entry per attribute value (None = absent)."""

    baseline: CohortMetrics
    cohorts: Mapping[str, Mapping[str, CohortMetrics | None]]

    def reliability(self, attribute: str | None = None, value: str | None = None) -> float:
        """Rank-1 accuracy of the baseline or of one cohort."""
        if attribute is None:
            return self.baseline.metrics.accuracy
        entry = self.cohorts[attribute][value]
        if entry is None:
            raise ValueError(f"cohort {attribute}={value} has no samples")
        return entry.metrics.accuracy


def confusion_matrix(predictions: Sequence[int], truths: Sequence[int], n_classes: int) -> ConfusionMatrix:
    """Tally (truth, prediction) pairs into an n_classes x n_classes grid."""
    preds = np.asarray(predictions, dtype=np.int64)
    truth = np.asarray(truths, dtype=np.int64)
    if preds.shape != truth.shape:
        raise ValueError("predictions and truths differ in length")
    for name, labels in (("prediction", preds), ("truth", truth)):
        if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
            raise ValueError(f"{name} label outside [0, {n_classes})")
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (truth, preds), 1)
    return ConfusionMatrix(counts)


def metrics_from_cm(cm: ConfusionMatrix) -> MetricsReport:
    """Compute the four metrics; binary matrices use the direct formulas."""
    counts = cm.counts
    total = cm.total
    if total == 0:
        raise EmptyMatrixError("metrics are undefined for an empty confusion matrix")

    if cm.n_classes == 2:
        tn, fp = int(counts[0, 0]), int(counts[0, 1])
        fn, tp = int(counts[1, 0]), int(counts[1, 1])
        return MetricsReport(
            accuracy=(tp + tn) / total,
            precision=tp / (tp + fp) if tp + fp else 0.0,
            sensitivity=tp / (fn + tp) if fn + tp else 0.0,
            specificity=tn / (fp + tn) if fp + tn else 0.0,
        )

    tp = np.diag(counts).astype(float)
    row = counts.sum(axis=1).astype(float)  # truth totals
    col = counts.sum(axis=0).astype(float)  # prediction totals
    fn = row - tp
    fp = col - tp
    tn = total - tp - fn - fp

    accuracy = float(tp.sum() / total)
    # Micro one-vs-rest precision: sum(TP) / sum(TP + FP) = trace / total.
    precision = float(tp.sum() / (tp.sum() + fp.sum()))

    present = row > 0
    if not np.all(present):
        skipped = [int(i) for i in np.flatnonzero(~present)]
        warnings.warn(
            f"metrics_from_cm: classes {skipped} have no positive samples; "
            "excluded from macro sensitivity/specificity",
            RuntimeWarning,
            stacklevel=2,
        )
    sensitivity = float(np.mean(tp[present] / row[present]))
    specificity = float(np.mean(tn[present] / (tn[present] + fp[present])))
    return MetricsReport(
        accuracy=accuracy,
        precision=precision,
        sensitivity=sensitivity,
        specificity=specificity,
    )


def cohort_eval(
    predictions: Sequence[int],
    truths: Sequence[int],
    attributes: Sequence[Attributes],
    n_classes: int,
    cohort_attributes: Sequence[str] = ("gender", "pose", "view"),
) -> CohortReport:
    """Baseline metrics plus metrics restricted to each attribute-value cohort.

    Attribute values with zero samples are reported as absent (None), not as
    zero-metric entries.
    """
    preds = np.asarray(predictions, dtype=np.int64)
    truth = np.asarray(truths, dtype=np.int64)
    if not (len(preds) == len(truth) == len(attributes)):
        raise ValueError("predictions, truths, and attributes must align")
    if len(preds) == 0:
        raise EmptyMatrixError("cohort evaluation needs at least one sample")

    def entry(mask: np.ndarray) -> CohortMetrics | None:
        if not mask.any():
            return None
        sub = confusion_matrix(preds[mask], truth[mask], n_classes)
        return CohortMetrics(metrics=metrics_from_cm(sub), cm=sub, count=int(mask.sum()))

    baseline = entry(np.ones(len(preds), dtype=bool))
    cohorts: dict[str, dict[str, CohortMetrics | None]] = {}
    for attribute in cohort_attributes:
        domain = ATTRIBUTE_DOMAINS.get(attribute)
        if domain is None:
            raise ValueError(f"unknown cohort attribute {attribute!r}")
        values = np.array([a.value(attribute) for a in attributes])
        cohorts[attribute] = {v: entry(values == v) for v in domain}
    return CohortReport(baseline=baseline, cohorts=cohorts)
