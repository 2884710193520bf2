"""Hyperspectral anomaly detection with mask-guided separation training.

Cubes are float64 arrays of shape (H, W, L); maps and masks are (H, W).
"""

from ._bigset import (
    DataError,
    Error,
    NumericError,
    ThresholdError,
    auc,
    estimate_tau,
    load_envi,
    load_raw,
    log_conv,
    roc_curve,
    rx_detect,
    save_raw,
    synth_scene,
    train,
    train_plain,
    update_mask,
)

__all__ = [
    "DataError",
    "Error",
    "NumericError",
    "ThresholdError",
    "auc",
    "estimate_tau",
    "load_envi",
    "load_raw",
    "log_conv",
    "roc_curve",
    "rx_detect",
    "save_raw",
    "synth_scene",
    "train",
    "train_plain",
    "update_mask",
]
