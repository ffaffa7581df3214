from tabutune.metrics.measures import (
    DEFAULT_THRESHOLD, DomainError, MetricsReport, ShapeError,
    confusion, derive_metrics, evaluate, pair_auc, roc_auc,
)

__all__ = [
    "DEFAULT_THRESHOLD", "DomainError", "MetricsReport", "ShapeError",
    "confusion", "derive_metrics", "evaluate", "pair_auc", "roc_auc",
]
