"""Nearest subspace classifier, cross-validated dimension selection, baselines.

All estimators follow the scikit-learn conventions (``fit`` returns
``self``, learned attributes end in ``_``, hyperparameters are stored
verbatim in ``__init__``) so they compose with pipelines and
``sklearn.base.clone``. Ties in every argmin/argmax go to the class that
sorts first in ``classes_``.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ._random import make_rng
from .exceptions import BadDimension, DimensionMismatch, InfeasibleFolds, SingularCovariance
from .subspace import class_spectrum, fit_subspace

DEFAULT_DIM_GRID = (1, 2, 3, 5, 8, 12, 20)
MAX_CONDITION = 1e12


def default_dim_grid(n_features):
    """Candidate subspace dimensions ``{1,2,3,5,8,12,20,D//2}`` clipped to ``[1, D-1]``."""
    grid = set(DEFAULT_DIM_GRID) | {n_features // 2}
    return sorted(d for d in grid if 1 <= d <= n_features - 1)


def _check_training_data(X, y):
    X, y = check_X_y(X, y, dtype=float)
    classes, y_index = np.unique(y, return_inverse=True)
    return X, classes, y_index


def _check_features(estimator, X):
    check_is_fitted(estimator)
    X = check_array(X, dtype=float)
    if X.shape[1] != estimator.n_features_in_:
        raise DimensionMismatch(
            f"X has {X.shape[1]} features, model was fitted with {estimator.n_features_in_}"
        )
    return X


class NearestSubspaceClassifier(ClassifierMixin, BaseEstimator):
    """Assign each point to the class whose fitted affine subspace is nearest.

    Every class ``k`` is summarized by its sample mean and the top
    ``n_components`` principal directions of its centered samples; a point
    goes to the class with the smallest squared orthogonal distance.

    Parameters
    ----------
    n_components : int, default=1
        Shared intrinsic dimension ``d`` of every class subspace, ``1 <= d < D``.

    Attributes
    ----------
    classes_ : ndarray of shape (K,)
    subspaces_ : list of SubspaceModel
        One fitted model per entry of ``classes_``.
    n_features_in_ : int
    """

    def __init__(self, n_components=1):
        self.n_components = n_components

    def fit(self, X, y):
        X, classes, y_index = _check_training_data(X, y)
        d = self.n_components
        if not (isinstance(d, (int, np.integer)) and 1 <= d < X.shape[1]):
            raise BadDimension(f"n_components must be in [1, {X.shape[1] - 1}], got {d!r}")
        self.classes_ = classes
        self.subspaces_ = [fit_subspace(X[y_index == k], int(d)) for k in range(len(classes))]
        self.n_features_in_ = X.shape[1]
        return self

    @classmethod
    def from_subspaces(cls, subspaces, classes):
        """Build a fitted classifier from existing subspace models."""
        subspaces = list(subspaces)
        dims = {(m.ambient_dim, m.dim) for m in subspaces}
        if len(dims) != 1 or len(subspaces) != len(classes):
            raise DimensionMismatch("subspaces must share D and d and match the class list")
        (D, d), = dims
        clf = cls(n_components=d)
        clf.classes_ = np.asarray(classes)
        clf.subspaces_ = subspaces
        clf.n_features_in_ = D
        return clf

    def residuals(self, X):
        """Squared distance of every row of ``X`` to every class subspace, shape (n, K)."""
        X = _check_features(self, X)
        return np.column_stack([m.residuals(X) for m in self.subspaces_])

    def decision_function(self, X):
        return -self.residuals(X)

    def predict(self, X):
        return self.classes_[np.argmin(self.residuals(X), axis=1)]


@dataclass(frozen=True)
class CvReport:
    candidate_dims: list
    fold_accuracies: np.ndarray  # (len(candidate_dims), folds)
    chosen_dim: int

    @property
    def mean_accuracies(self):
        return self.fold_accuracies.mean(axis=1)


def stratified_folds(y, folds, seed=0):
    """Fold id for every sample; each class is spread round-robin over the folds.

    Members of each class are shuffled with a stream derived from ``seed``
    and dealt to folds in turn, continuing the rotation from one class to
    the next so fold sizes stay balanced overall.
    """
    y = np.asarray(y)
    if folds < 2:
        raise InfeasibleFolds(f"need at least 2 folds, got {folds}")
    if len(y) < folds:
        raise InfeasibleFolds(f"{len(y)} samples cannot fill {folds} folds")
    classes, counts = np.unique(y, return_counts=True)
    if np.any(counts < 2):
        raise InfeasibleFolds(
            f"class {classes[np.argmin(counts)]} has a single sample; "
            "some training fold would lose it"
        )
    rng = make_rng(seed)
    fold_of = np.empty(len(y), dtype=np.int64)
    offset = 0
    for c in classes:
        members = rng.permutation(np.flatnonzero(y == c))
        fold_of[members] = (offset + np.arange(len(members))) % folds
        offset += len(members)
    return fold_of


def nss_cross_validate(X, y, candidate_dims=None, folds=10, seed=0):
    """Pick the shared subspace dimension by stratified k-fold cross validation.

    Each class's scatter is eigendecomposed once per fold and every
    candidate dimension is scored from the same spectrum. The chosen
    dimension maximizes mean validation accuracy, ties going to the
    smaller dimension.

    Returns
    -------
    CvReport
    """
    X, classes, y_index = _check_training_data(X, y)
    D = X.shape[1]
    dims = default_dim_grid(D) if candidate_dims is None else sorted({int(d) for d in candidate_dims})
    if not dims:
        raise BadDimension("no candidate dimensions")
    if dims[0] < 1 or dims[-1] >= D:
        raise BadDimension(f"candidate dimensions must lie in [1, {D - 1}], got {dims}")
    fold_of = stratified_folds(y_index, folds, seed)
    acc = np.zeros((len(dims), folds))
    cols = np.asarray(dims) - 1
    for f in range(folds):
        train, test = fold_of != f, fold_of == f
        Xv, yv = X[test], y_index[test]
        # res[k] has shape (n_val, len(dims))
        res = []
        for k in range(len(classes)):
            mean, (_, vectors) = class_spectrum(X[train & (y_index == k)])
            Z = Xv - mean
            captured = np.cumsum((Z @ vectors[:, : dims[-1]]) ** 2, axis=1)[:, cols]
            res.append(np.maximum(np.einsum("ij,ij->i", Z, Z)[:, None] - captured, 0.0))
        res = np.stack(res, axis=-1)
        acc[:, f] = np.mean(np.argmin(res, axis=-1) == yv[:, None], axis=0)
    means = acc.mean(axis=1)
    chosen = dims[int(np.flatnonzero(means == means.max())[0])]
    return CvReport(candidate_dims=dims, fold_accuracies=acc, chosen_dim=chosen)


class NearestSubspaceCV(ClassifierMixin, BaseEstimator):
    """Nearest subspace classifier whose dimension is chosen by cross validation.

    Parameters
    ----------
    cv_dims : sequence of int or None
        Candidate dimensions; ``None`` uses :func:`default_dim_grid`.
    folds : int, default=10
    random_state : int, default=0
        Seed for the stratified fold assignment.
    """

    def __init__(self, cv_dims=None, folds=10, random_state=0):
        self.cv_dims = cv_dims
        self.folds = folds
        self.random_state = random_state

    def fit(self, X, y):
        self.cv_report_ = nss_cross_validate(X, y, self.cv_dims, self.folds, self.random_state)
        self.n_components_ = self.cv_report_.chosen_dim
        self.estimator_ = NearestSubspaceClassifier(self.n_components_).fit(X, y)
        self.classes_ = self.estimator_.classes_
        self.n_features_in_ = self.estimator_.n_features_in_
        return self

    def residuals(self, X):
        check_is_fitted(self)
        return self.estimator_.residuals(X)

    def predict(self, X):
        check_is_fitted(self)
        return self.estimator_.predict(X)


class LinearDiscriminantClassifier(ClassifierMixin, BaseEstimator):
    """Gaussian discriminant with a pooled within-class covariance.

    Scores ``x^T S^-1 mu_k - mu_k^T S^-1 mu_k / 2 + log pi_k`` with empirical
    class frequencies as priors. No regularization: a pooled covariance that
    is not positive definite, or whose condition number reaches ``1e12``,
    raises :class:`SingularCovariance`.

    Attributes
    ----------
    means_ : ndarray of shape (K, D)
    covariance_inv_ : ndarray of shape (D, D)
    log_priors_ : ndarray of shape (K,)
    """

    def fit(self, X, y):
        X, classes, y_index = _check_training_data(X, y)
        n, D = X.shape
        K = len(classes)
        counts = np.bincount(y_index, minlength=K)
        means = np.stack([X[y_index == k].mean(axis=0) for k in range(K)])
        Z = X - means[y_index]
        dof = n - K
        if dof <= 0:
            raise SingularCovariance(f"{n} samples leave no degrees of freedom for {K} classes")
        cov = Z.T @ Z / dof
        cov = 0.5 * (cov + cov.T)
        try:
            np.linalg.cholesky(cov)
        except np.linalg.LinAlgError:
            raise SingularCovariance("pooled covariance is not positive definite") from None
        cond = np.linalg.cond(cov)
        if not np.isfinite(cond) or cond >= MAX_CONDITION:
            raise SingularCovariance(f"pooled covariance condition number {cond:.3g} >= {MAX_CONDITION:g}")
        self.classes_ = classes
        self.means_ = means
        self.covariance_inv_ = np.linalg.inv(cov)
        self.log_priors_ = np.log(counts / n)
        self.n_features_in_ = D
        return self

    def decision_function(self, X):
        X = _check_features(self, X)
        W = self.means_ @ self.covariance_inv_
        bias = -0.5 * np.einsum("kd,kd->k", W, self.means_) + self.log_priors_
        return X @ W.T + bias

    def predict(self, X):
        return self.classes_[np.argmax(self.decision_function(X), axis=1)]


class NearestCentroidClassifier(ClassifierMixin, BaseEstimator):
    """Assign each point to the class with the nearest mean (squared Euclidean)."""

    def fit(self, X, y):
        X, classes, y_index = _check_training_data(X, y)
        self.classes_ = classes
        self.means_ = np.stack([X[y_index == k].mean(axis=0) for k in range(len(classes))])
        self.n_features_in_ = X.shape[1]
        return self

    def distances(self, X):
        X = _check_features(self, X)
        diff = X[:, None, :] - self.means_[None, :, :]
        return np.einsum("nkd,nkd->nk", diff, diff)

    def predict(self, X):
        return self.classes_[np.argmin(self.distances(X), axis=1)]


CLASSIFIERS = {
    "nss": NearestSubspaceClassifier,
    "lda": LinearDiscriminantClassifier,
    "centroid": NearestCentroidClassifier,
}
