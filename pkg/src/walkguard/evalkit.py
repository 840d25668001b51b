"""Evaluation: three-way frame labels, confusion matrices, ROC sweep, AUC."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionError, EvaluationError


class FrameLabel(Enum):
    NORMAL = "normal"
    ANOMALY_NONHAZARD = "anomaly_nonhazard"
    HAZARD = "hazard"


@dataclass
class ConfusionMatrix:
    """Hazard-vs-non-hazard cells; normal and non-hazardous-anomaly frames
    both count as non-hazard ground truth."""

    true_nonhazard: int
    false_hazard: int
    false_nonhazard: int
    true_hazard: int

    @property
    def total(self):
        return (self.true_nonhazard + self.false_hazard
                + self.false_nonhazard + self.true_hazard)


@dataclass
class RocPoint:
    threshold: float
    true_positive_rate: float
    false_positive_rate: float


def confusion_matrix(pred_hazard, labels) -> ConfusionMatrix:
    """pred_hazard: booleans; labels: FrameLabel values."""
    pred_hazard = list(pred_hazard)
    labels = list(labels)
    if len(pred_hazard) != len(labels):
        raise DimensionError(
            f"{len(pred_hazard)} predictions vs {len(labels)} labels")
    tn = fh = fn = th = 0
    for p, lab in zip(pred_hazard, labels):
        is_hazard = lab == FrameLabel.HAZARD
        if is_hazard:
            if p:
                th += 1
            else:
                fn += 1
        else:
            if p:
                fh += 1
            else:
                tn += 1
    return ConfusionMatrix(tn, fh, fn, th)


def accuracy(cm: ConfusionMatrix) -> float:
    if cm.total == 0:
        raise EvaluationError("accuracy undefined for an empty matrix")
    return (cm.true_nonhazard + cm.true_hazard) / cm.total


def roc_curve(scores, is_anomaly, thresholds) -> list:
    """Per threshold T: positive prediction = score >= T, against binary labels."""
    scores = np.asarray(scores, dtype=np.float64)
    is_anomaly = np.asarray(is_anomaly, dtype=bool)
    if scores.shape != is_anomaly.shape:
        raise DimensionError(
            f"{scores.shape} scores vs {is_anomaly.shape} labels")
    if len(thresholds) == 0:
        raise EvaluationError("threshold list must be nonempty")
    pos = int(is_anomaly.sum())
    neg = int((~is_anomaly).sum())
    if pos == 0 or neg == 0:
        raise EvaluationError("ROC needs both classes present")
    points = []
    for t in thresholds:
        pred = scores >= t
        tpr = int(np.sum(pred & is_anomaly)) / pos
        fpr = int(np.sum(pred & ~is_anomaly)) / neg
        points.append(RocPoint(float(t), tpr, fpr))
    return points


def auc(points) -> float:
    """Trapezoid over FPR, with (0,0) and (1,1) endpoints appended if absent."""
    if len(points) < 2:
        raise EvaluationError("AUC needs at least 2 ROC points")
    pts = sorted(((p.false_positive_rate, p.true_positive_rate) for p in points))
    if pts[0] != (0.0, 0.0):
        pts.insert(0, (0.0, 0.0))
    if pts[-1] != (1.0, 1.0):
        pts.append((1.0, 1.0))
    fpr = np.array([p[0] for p in pts])
    tpr = np.array([p[1] for p in pts])
    return float(np.trapezoid(tpr, fpr))


def default_thresholds(n=50, low=10.0, high=500.0):
    return np.linspace(low, high, n)
