"""Affine subspace models and squared orthogonal distances to them."""

import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import BadDimension, DegenerateClassWarning, DimensionMismatch
from .linalg import ORTHONORMAL_TOL, as_points, centered_scatter, full_eigenpairs


@dataclass(frozen=True, eq=False)
class SubspaceModel:
    """One class's affine subspace ``mean + span(basis)``.

    Attributes
    ----------
    mean : ndarray of shape (D,)
    basis : ndarray of shape (D, d)
        Orthonormal columns.
    """

    mean: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float)
        basis = np.array(self.basis, dtype=float)
        if basis.ndim != 2 or mean.ndim != 1 or basis.shape[0] != mean.shape[0]:
            raise DimensionMismatch(
                f"mean of shape {mean.shape} does not match basis of shape {basis.shape}"
            )
        D, d = basis.shape
        if not 1 <= d < D:
            raise BadDimension(f"subspace dimension must satisfy 1 <= d < D, got d={d}, D={D}")
        if np.abs(basis.T @ basis - np.eye(d)).max() > ORTHONORMAL_TOL:
            raise ValueError("basis columns are not orthonormal")
        mean.setflags(write=False)
        basis.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self):
        return self.basis.shape[1]

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    def projector(self):
        return self.basis @ self.basis.T

    def residuals(self, X):
        """Squared distances from each row of ``X`` to the subspace."""
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[np.newaxis, :]
        if X.shape[1] != self.ambient_dim:
            raise DimensionMismatch(
                f"points have dimension {X.shape[1]}, model expects {self.ambient_dim}"
            )
        Z = X - self.mean
        coords = Z @ self.basis
        r = np.einsum("ij,ij->i", Z, Z) - np.einsum("ij,ij->i", coords, coords)
        return np.maximum(r, 0.0)

    def objective(self, points):
        """Sum of squared residuals of ``points``; the quantity the fit minimizes."""
        return float(self.residuals(points).sum())


def class_spectrum(points):
    """Mean and full descending eigendecomposition of a class's scatter."""
    X = as_points(points)
    mean = X.mean(axis=0)
    return mean, full_eigenpairs(centered_scatter(X, mean))


def fit_subspace(points, d):
    """Best-fitting ``d``-dimensional affine subspace in the least-squares sense.

    The mean is the sample mean and the basis is the top-``d`` eigenvectors
    of the centered scatter matrix. With ``n <= d`` points the scatter has
    rank below ``d``; the basis is then completed from its null space and a
    :class:`DegenerateClassWarning` is issued.
    """
    X = as_points(points)
    D = X.shape[1]
    if not (isinstance(d, (int, np.integer)) and 1 <= d < D):
        raise BadDimension(f"d must be an integer in [1, {D - 1}], got {d!r}")
    if X.shape[0] <= d:
        warnings.warn(
            f"class has {X.shape[0]} points, fewer than d+1={d + 1}; "
            "basis padded with arbitrary null-space directions",
            DegenerateClassWarning,
            stacklevel=2,
        )
    mean, (_, vectors) = class_spectrum(X)
    return SubspaceModel(mean, vectors[:, :d])


def residual(x, model):
    """Squared orthogonal distance from the vector ``x`` to ``model``."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got shape {x.shape}")
    return float(model.residuals(x)[0])
