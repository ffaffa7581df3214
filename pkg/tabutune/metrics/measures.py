from __future__ import annotations

import logging

import numpy as np
import pydantic
from scipy.stats import rankdata

from tabutune.utils import ZipCmp
from tabutune.utils.dataclass import BaseModel, Field

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.5


class DomainError(ValueError):
    pass


class ShapeError(ValueError):
    pass


class MetricsReport(BaseModel):
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0
    accuracy: float = 0.
    sensitivity: float = 0.
    specificity: float = 0.
    precision: float = 0.
    f1: float = 0.
    auc: float = 0.5
    roc: list[tuple[float, float]] = Field(default_factory=list)
    undefined: list[str] = Field(default_factory=list)

    @pydantic.model_validator(mode="after")
    def _check(self) -> MetricsReport:
        for name in ("tp", "fp", "tn", "fn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        for name in ("accuracy", "sensitivity", "specificity", "precision", "f1", "auc"):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise ValueError(f"{name} out of [0, 1]: {value}")
        return self

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def row(self) -> dict[str, float]:
        return {
            "auc": self.auc,
            "sensitivity": self.sensitivity,
            "specificity": self.specificity,
            "f1": self.f1,
            "accuracy": self.accuracy,
        }


def _check_shapes(labels: np.ndarray, scores: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    labels = np.asarray(labels).reshape(-1)
    scores = np.asarray(scores, dtype=np.float64).reshape(-1)
    if labels.shape != scores.shape:
        raise ShapeError(f"{len(labels)} labels but {len(scores)} scores")
    return labels.astype(np.int64), scores


def confusion(labels: np.ndarray, scores: np.ndarray, threshold: float=DEFAULT_THRESHOLD) -> tuple[int, int, int, int]:
    """
    Predict class 1 iff score >= threshold; returns (tp, fp, tn, fn).
    """
    labels, scores = _check_shapes(labels, scores)
    predicted = scores >= threshold
    positive = labels == 1

    tp = int(np.sum(predicted & positive))
    fp = int(np.sum(predicted & ~positive))
    tn = int(np.sum(~predicted & ~positive))
    fn = int(np.sum(~predicted & positive))

    return tp, fp, tn, fn


def _ratio(numerator: float, denominator: float, name: str, undefined: list[str]) -> float:
    if denominator == 0:
        undefined.append(name)
        return 0.
    return numerator / denominator


def derive_metrics(tp: int, fp: int, tn: int, fn: int) -> MetricsReport:
    """
    Scalar measures of a confusion matrix. A 0/0 ratio is reported as 0 and
    its name listed in `undefined`.
    """
    total = tp + fp + tn + fn
    if total <= 0:
        raise DomainError("confusion matrix is empty")

    undefined: list[str] = []
    accuracy = (tp + tn) / total
    sensitivity = _ratio(tp, tp + fn, "sensitivity", undefined)
    specificity = _ratio(tn, tn + fp, "specificity", undefined)
    precision = _ratio(tp, tp + fp, "precision", undefined)
    f1 = _ratio(2 * precision * sensitivity, precision + sensitivity, "f1", undefined)

    if undefined:
        logger.warning(f"undefined ratios reported as 0: {undefined}")

    return MetricsReport(
        tp=tp, fp=fp, tn=tn, fn=fn,
        accuracy=accuracy,
        sensitivity=sensitivity,
        specificity=specificity,
        precision=precision,
        f1=f1,
        undefined=undefined,
    )


def roc_auc(labels: np.ndarray, scores: np.ndarray) -> tuple[float, list[tuple[float, float]]]:
    """
    ROC curve over descending scores, tied scores grouped into one step, and
    its trapezoidal area.
    """
    labels, scores = _check_shapes(labels, scores)
    n_positive = int(np.sum(labels == 1))
    n_negative = len(labels) - n_positive
    if n_positive == 0 or n_negative == 0:
        raise DomainError("roc_auc needs both classes")

    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = labels[order]

    # last index of every group of tied scores
    group_ends = np.flatnonzero(np.diff(sorted_scores) != 0)
    group_ends = np.append(group_ends, len(sorted_scores) - 1)

    tps = np.cumsum(sorted_labels == 1)[group_ends]
    fps = np.cumsum(sorted_labels == 0)[group_ends]

    roc = [(0., 0.)] + [(int(fp) / n_negative, int(tp) / n_positive) for fp, tp in zip(fps, tps)]

    # integer trapezoids keep the area exact: sum (fp1-fp0)*(tp1+tp0) / 2PN
    area_twice = 0
    counts = [(0, 0)] + [(int(fp), int(tp)) for fp, tp in zip(fps, tps)]
    for (fp0, tp0), (fp1, tp1) in ZipCmp(counts):
        area_twice += (fp1 - fp0) * (tp1 + tp0)

    auc = area_twice / (2 * n_positive * n_negative)

    return auc, roc


def pair_auc(labels: np.ndarray, scores: np.ndarray) -> float:
    """
    Probability that a random positive outscores a random negative, ties
    counted half. Computed from mid-ranks.
    """
    labels, scores = _check_shapes(labels, scores)
    n_positive = int(np.sum(labels == 1))
    n_negative = len(labels) - n_positive
    if n_positive == 0 or n_negative == 0:
        raise DomainError("pair_auc needs both classes")

    ranks = rankdata(scores)
    u = ranks[labels == 1].sum() - n_positive * (n_positive + 1) / 2
    return float(u / (n_positive * n_negative))


def evaluate(labels: np.ndarray, scores: np.ndarray, threshold: float=DEFAULT_THRESHOLD) -> MetricsReport:
    report = derive_metrics(*confusion(labels, scores, threshold))
    auc, roc = roc_auc(labels, scores)
    return report.model_copy(update={"auc": auc, "roc": roc})
