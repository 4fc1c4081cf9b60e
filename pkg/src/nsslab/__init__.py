"""Nearest subspace classification with baselines, synthetic families and risk diagnostics."""

from .classifiers import (
    CvReport,
    LinearDiscriminantClassifier,
    NearestCentroidClassifier,
    NearestSubspaceClassifier,
    NearestSubspaceCV,
    default_dim_grid,
    nss_cross_validate,
)
from .dataio import PCAReducer, RangeScaler, read_csv, read_libsvm, write_csv, write_libsvm
from .dataset import LabeledDataset
from .subspace import SubspaceModel, fit_subspace, residual

__version__ = "0.1.0"

__all__ = [
    "CvReport",
    "LabeledDataset",
    "LinearDiscriminantClassifier",
    "NearestCentroidClassifier",
    "NearestSubspaceCV",
    "NearestSubspaceClassifier",
    "PCAReducer",
    "RangeScaler",
    "SubspaceModel",
    "default_dim_grid",
    "fit_subspace",
    "nss_cross_validate",
    "read_csv",
    "read_libsvm",
    "residual",
    "write_csv",
    "write_libsvm",
]
