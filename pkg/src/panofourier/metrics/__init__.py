from .metrics import (
    ConfusionMatrix,
    DepthAccumulator,
    MetricsReport,
    depth_metrics,
    seg_metrics,
)
