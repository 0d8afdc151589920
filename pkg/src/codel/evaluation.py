"""Confusion-matrix metrics, cross-validation, and table aggregation.

Conventions used throughout: label 1 is the positive class, all six
metrics live in [0, 1] and are multiplied by 100 only at reporting time,
and higher is better for every metric.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import ParameterError
from .mlp import Dataset
from .streams import derive_seed, named_rng

__all__ = [
    "METRIC_NAMES",
    "ConfusionMatrix",
    "MetricReport",
    "FoldSummary",
    "CrossValidationResult",
    "confusion_from_predictions",
    "metrics",
    "error_enhancement",
    "kfold_split",
    "fold_datasets",
    "cross_validate",
    "wtl",
    "rank_and_mean_rank",
]

METRIC_NAMES = ("accuracy", "sensitivity", "specificity", "precision", "fscore", "gmean")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        counts = (self.tp, self.tn, self.fp, self.fn)
        if any(c < 0 for c in counts):
            raise ParameterError(f"counts must be non-negative, got {counts}")
        if sum(counts) < 1:
            raise ParameterError("confusion matrix must contain at least one sample")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class MetricReport:
    """Six classification metrics, each in [0, 1].

    `degenerate` names the metrics whose denominator was zero and whose
    value was therefore imputed as 0.
    """

    accuracy: float
    sensitivity: float
    specificity: float
    precision: float
    fscore: float
    gmean: float
    degenerate: frozenset = field(default=frozenset(), compare=False)

    def as_vector(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in METRIC_NAMES], dtype=float)


@dataclass(frozen=True)
class FoldSummary:
    """Spread of one metric across the folds of a cross-validation."""

    mean: float
    std: float
    min: float
    max: float
    median: float

    @classmethod
    def from_values(cls, values) -> "FoldSummary":
        values = np.asarray(values, dtype=float)
        if values.size < 2:
            raise ParameterError("summary needs at least two fold values")
        return cls(
            mean=float(np.mean(values)),
            std=float(np.std(values, ddof=1)),
            min=float(np.min(values)),
            max=float(np.max(values)),
            median=float(np.median(values)),
        )


@dataclass(frozen=True)
class CrossValidationResult:
    fold_reports: tuple
    summaries: dict

    def means(self) -> np.ndarray:
        return np.array([self.summaries[name].mean for name in METRIC_NAMES])


def confusion_from_predictions(y_true, y_pred) -> ConfusionMatrix:
    y_true = np.asarray(y_true).astype(int)
    y_pred = np.asarray(y_pred).astype(int)
    if y_true.shape != y_pred.shape:
        raise ParameterError("prediction and truth lengths differ")
    return ConfusionMatrix(
        tp=int(np.count_nonzero((y_true == 1) & (y_pred == 1))),
        tn=int(np.count_nonzero((y_true == 0) & (y_pred == 0))),
        fp=int(np.count_nonzero((y_true == 0) & (y_pred == 1))),
        fn=int(np.count_nonzero((y_true == 1) & (y_pred == 0))),
    )


def _ratio(numerator: float, denominator: float, name: str, degenerate: set) -> float:
    if denominator == 0:
        degenerate.add(name)
        return 0.0
    return numerator / denominator


def metrics(cm: ConfusionMatrix) -> MetricReport:
    """All six metrics of one confusion matrix.

    A zero denominator (e.g. a fold without negatives) yields 0 for that
    metric and records its name in the degenerate set instead of raising.
    """
    degenerate: set = set()
    accuracy = (cm.tp + cm.tn) / cm.total
    sensitivity = _ratio(cm.tp, cm.tp + cm.fn, "sensitivity", degenerate)
    specificity = _ratio(cm.tn, cm.tn + cm.fp, "specificity", degenerate)
    precision = _ratio(cm.tp, cm.tp + cm.fp, "precision", degenerate)
    fscore = _ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn, "fscore", degenerate)
    gmean = float(np.sqrt(sensitivity * specificity))
    return MetricReport(
        accuracy=accuracy,
        sensitivity=sensitivity,
        specificity=specificity,
        precision=precision,
        fscore=fscore,
        gmean=gmean,
        degenerate=frozenset(degenerate),
    )


def error_enhancement(base_metric_pct: float, codel_metric_pct: float) -> float:
    """Relative reduction of the error 100 - metric, in percent.

    Negative when the boosted variant scores below its base.
    """
    if not (0 <= base_metric_pct < 100):
        raise ParameterError(
            f"base metric must be in [0, 100), got {base_metric_pct}"
        )
    if not (0 <= codel_metric_pct <= 100):
        raise ParameterError(
            f"boosted metric must be in [0, 100], got {codel_metric_pct}"
        )
    base_err = 100.0 - base_metric_pct
    codel_err = 100.0 - codel_metric_pct
    return (base_err - codel_err) / base_err * 100.0


def kfold_split(n: int, k: int, labels, seed: int):
    """Stratified partition of range(n) into k folds.

    Each class is shuffled and dealt round-robin, with the dealing
    position carried over from class to class so fold sizes differ by at
    most one overall.
    """
    if k < 2:
        raise ParameterError("need at least 2 folds")
    if k > n:
        raise ParameterError(f"cannot split {n} samples into {k} folds")
    labels = np.asarray(labels)
    if labels.shape != (n,):
        raise ParameterError(f"labels shape {labels.shape} does not match n={n}")
    rng = named_rng(seed, "folds")
    folds = [[] for _ in range(k)]
    cursor = 0
    for value in np.unique(labels):
        idx = np.flatnonzero(labels == value)
        rng.shuffle(idx)
        for i in idx:
            folds[cursor % k].append(int(i))
            cursor += 1
    return [np.array(sorted(f), dtype=int) for f in folds]


def _standardize_columns(train_rows: np.ndarray, other_rows: np.ndarray):
    """Center and scale both row sets by the training statistics only."""
    mean = np.mean(train_rows, axis=0)
    std = np.std(train_rows, axis=0)
    std = np.where(std < 1e-12, 1.0, std)
    return (train_rows - mean) / std, (other_rows - mean) / std


def fold_datasets(dataset: Dataset, k: int, seed: int):
    """Materialize the k (train, test) dataset pairs of one split.

    Feature columns are standardized with statistics fitted on each
    train split, so nothing about a test fold influences training.
    """
    folds = kfold_split(len(dataset), k, dataset.labels, seed)
    pairs = []
    for f, test_idx in enumerate(folds):
        train_idx = np.setdiff1d(np.arange(len(dataset)), test_idx)
        train_rows, test_rows = _standardize_columns(
            dataset.rows[train_idx], dataset.rows[test_idx]
        )
        pairs.append(
            (
                Dataset(train_rows, dataset.labels[train_idx]),
                Dataset(test_rows, dataset.labels[test_idx]),
            )
        )
    return pairs


def run_fold(trainer, train: Dataset, test: Dataset, fold_seed: int) -> MetricReport:
    """Train on one fold's training split and score its test split."""
    predictor = trainer(train, fold_seed)
    predictions = predictor(test.rows)
    return metrics(confusion_from_predictions(test.labels, predictions))


def cross_validate(trainer, dataset: Dataset, k: int, seed: int) -> CrossValidationResult:
    """Stratified k-fold evaluation of a training procedure.

    Args:
        trainer: callable (train: Dataset, seed: int) -> predictor,
            where predictor maps a row matrix to 0/1 labels.
        dataset: full labeled dataset; must contain both classes.
        k: fold count.
        seed: root seed; fold splits and per-fold training seeds all
            derive from it.

    Returns:
        CrossValidationResult with one MetricReport per fold and a
        FoldSummary per metric (std uses the sample divisor k-1).
    """
    if len(np.unique(dataset.labels)) < 2:
        raise ParameterError("cross-validation needs both classes present")
    reports = []
    for f, (train, test) in enumerate(fold_datasets(dataset, k, seed)):
        reports.append(run_fold(trainer, train, test, derive_seed(seed, f)))
    summaries = {
        name: FoldSummary.from_values([getattr(r, name) for r in reports])
        for name in METRIC_NAMES
    }
    return CrossValidationResult(fold_reports=tuple(reports), summaries=summaries)


def wtl(base_means, codel_means, tie_tol: float = 1e-9):
    """Count wins, ties, losses of the boosted variants over their bases."""
    base = np.asarray(base_means, dtype=float)
    codel = np.asarray(codel_means, dtype=float)
    if base.shape != codel.shape:
        raise ParameterError("paired sequences must have equal length")
    diff = codel - base
    wins = int(np.count_nonzero(diff > tie_tol))
    ties = int(np.count_nonzero(np.abs(diff) <= tie_tol))
    return wins, ties, len(diff) - wins - ties


def rank_and_mean_rank(metric_table):
    """Rank algorithms per metric and average the ranks per algorithm.

    Args:
        metric_table: array (n_algorithms, n_metrics) of metric means;
            higher is better everywhere.

    Returns:
        (ranks, mean_ranks): ranks has the table's shape with 1 = best
        and tied values sharing the average rank; mean_ranks averages
        each algorithm's row.
    """
    table = np.asarray(metric_table, dtype=float)
    if table.ndim != 2 or table.shape[0] < 1 or table.shape[1] < 1:
        raise ParameterError("metric table must be a nonempty 2-D array")
    ranks = np.column_stack(
        [stats.rankdata(-table[:, j], method="average") for j in range(table.shape[1])]
    )
    return ranks, ranks.mean(axis=1)
