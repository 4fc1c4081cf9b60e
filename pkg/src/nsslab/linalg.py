"""Dense linear algebra primitives: means, scatter matrices, eigenpairs.

Vectors are 1-D float arrays and point collections are 2-D arrays with one
point per row. The symmetric eigensolver is LAPACK's ``syevd`` via
:func:`numpy.linalg.eigh`; this module adds the ordering, sign and
validation policy on top of it.
"""

from typing import NamedTuple

import numpy as np

from .exceptions import BadDimension, DimensionMismatch, EmptyClass, NotSymmetric, NumericError

# Default tolerances. Callers may pass their own.
ORTHONORMAL_TOL = 1e-8
RESIDUAL_TOL = 1e-6
SYMMETRY_TOL = 1e-9


class EigenPairs(NamedTuple):
    """Eigenvalues in non-increasing order and matching orthonormal columns."""

    values: np.ndarray
    vectors: np.ndarray


def as_points(points, ndim=None):
    """Coerce a point collection to a finite 2-D float array."""
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[np.newaxis, :] if X.size else X.reshape(0, 0)
    if X.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D point array, got shape {X.shape}")
    if X.shape[0] == 0:
        raise EmptyClass("point collection is empty")
    if ndim is not None and X.shape[1] != ndim:
        raise DimensionMismatch(f"points have dimension {X.shape[1]}, expected {ndim}")
    if not np.all(np.isfinite(X)):
        raise NumericError("points contain NaN or infinite entries")
    return X


def mean_vector(points):
    """Entrywise arithmetic mean of a non-empty collection of equal-length vectors."""
    if not isinstance(points, np.ndarray):
        points = list(points)
        if not points:
            raise EmptyClass("cannot average an empty collection")
        lengths = {len(p) for p in points}
        if len(lengths) > 1:
            raise DimensionMismatch(f"mixed vector lengths {sorted(lengths)}")
    X = as_points(points)
    return X.mean(axis=0)


def centered_scatter(points, center):
    """Scatter matrix ``sum_i (x_i - c)(x_i - c)^T``, symmetrized exactly."""
    center = np.asarray(center, dtype=float)
    X = as_points(points, ndim=center.shape[0])
    Z = X - center
    S = Z.T @ Z
    return 0.5 * (S + S.T)


def _fix_signs(vectors):
    # largest-magnitude entry of every column made positive
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def full_eigenpairs(S, tol=SYMMETRY_TOL):
    """All eigenpairs of a symmetric matrix, sorted descending, signs fixed."""
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise NumericError("matrix contains NaN or infinite entries")
    scale = max(1.0, float(np.abs(S).max(initial=0.0)))
    if np.abs(S - S.T).max(initial=0.0) > tol * scale:
        raise NotSymmetric("matrix is not symmetric within tolerance")
    values, vectors = np.linalg.eigh(0.5 * (S + S.T))
    # eigh is ascending; a stable reverse keeps the decomposition's own order for ties
    order = np.argsort(-values, kind="stable")
    return EigenPairs(values[order], _fix_signs(vectors[:, order]))


def top_eigenpairs(S, d, tol=SYMMETRY_TOL):
    """The ``d`` largest eigenpairs of the symmetric matrix ``S``.

    Parameters
    ----------
    S : array-like of shape (D, D)
        Symmetric matrix (checked to within ``tol`` relative to its scale).
    d : int
        Number of pairs, ``1 <= d <= D``.

    Returns
    -------
    EigenPairs
        ``values`` non-increasing, ``vectors`` of shape (D, d) with
        orthonormal columns. Each column's largest-magnitude entry is
        positive, which makes the output deterministic.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {S.shape}")
    if not (isinstance(d, (int, np.integer)) and 1 <= d <= S.shape[0]):
        raise BadDimension(f"d must be an integer in [1, {S.shape[0]}], got {d!r}")
    values, vectors = full_eigenpairs(S, tol=tol)
    return EigenPairs(values[:d], vectors[:, :d])


def is_orthonormal(B, tol=ORTHONORMAL_TOL):
    B = np.asarray(B, dtype=float)
    return np.abs(B.T @ B - np.eye(B.shape[1])).max(initial=0.0) <= tol


def principal_angles(A, B):
    """Principal angles (radians, ascending) between ``span(A)`` and ``span(B)``.

    Both inputs must have orthonormal columns. The cosines are the singular
    values of ``A^T B``.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape[0] != B.shape[0]:
        raise DimensionMismatch("bases live in different ambient dimensions")
    cosines = np.linalg.svd(A.T @ B, compute_uv=False)
    return np.sort(np.arccos(np.clip(cosines, -1.0, 1.0)))
