from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatch, EmptyClass


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Dense samples (one row each) with integer class labels.

    Synthetic generators label classes ``1..K``; data read from files keeps
    whatever integer labels the file uses.
    """

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y)
        if X.ndim != 2:
            raise DimensionMismatch(f"samples must be a 2-D array, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise DimensionMismatch(f"{X.shape[0]} samples but labels of shape {y.shape}")
        if X.shape[0] == 0 or X.shape[1] == 0:
            raise EmptyClass("dataset must have at least one sample and one feature")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y.astype(np.int64))

    @property
    def n_samples(self):
        return self.X.shape[0]

    @property
    def n_features(self):
        return self.X.shape[1]

    @property
    def classes(self):
        return np.unique(self.y)

    @property
    def n_classes(self):
        return len(self.classes)

    def class_counts(self):
        return {int(c): int(np.sum(self.y == c)) for c in self.classes}

    def subset(self, index):
        return LabeledDataset(self.X[index], self.y[index])
