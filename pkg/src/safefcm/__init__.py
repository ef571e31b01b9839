"""Safe semi-supervised fuzzy c-means clustering and its benchmark harness."""

from .config import ExperimentConfig, SafeParams
from .data import (Dataset, SemiSupervisedView, gen_gauss, gen_waveform,
                   inject_mislabels, load_csv, load_dataset, split_labeled,
                   standardize)
from .fcm import FCM, SSFCM, FitTrace, KMeans
from .metrics import aggregate, clustering_accuracy, predict_labels
from .safe import AS3FCM, KGBS3FCM

__all__ = [
    "AS3FCM", "Dataset", "ExperimentConfig", "FCM", "FitTrace", "KGBS3FCM",
    "KMeans", "SSFCM", "SafeParams", "SemiSupervisedView", "aggregate",
    "clustering_accuracy", "gen_gauss", "gen_waveform", "inject_mislabels",
    "load_csv", "load_dataset", "predict_labels", "split_labeled", "standardize",
]

__version__ = "0.1.0"
