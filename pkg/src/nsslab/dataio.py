"""Dataset readers/writers and the preprocessing transformers.

File formats
------------
CSV
    UTF-8, comma separated, no quoting. An optional single header line
    (every cell non-numeric) names the columns; the label column is the one
    named ``label``, else the one given by ``label_column``, else the last.
LIBSVM
    ``label idx:val idx:val ...`` with 1-based, strictly ascending indices.
    Unlisted entries are zero. Labels must be integers or integral floats.
Metadata sidecar
    ``key=value`` lines; blank lines and lines starting with ``#`` ignored.
"""

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .dataset import LabeledDataset
from .exceptions import DimensionMismatch, NonAscendingIndex, ParseError, RaggedRows
from .linalg import _fix_signs, full_eigenpairs


def _parse_float(token, line, column):
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"non-numeric value {token.strip()!r}", line, column) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite value {token.strip()!r}", line, column)
    return value


def _parse_label(token, line, column):
    token = token.strip()
    try:
        return int(token)
    except ValueError:
        pass
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"label {token!r} is not a number", line, column) from None
    if not (math.isfinite(value) and value == int(value)):
        raise ParseError(f"label {token!r} is not an integer", line, column)
    return int(value)


def _is_number(token):
    try:
        float(token)
    except ValueError:
        return False
    return True


def read_csv(path, label_column=None, header=None):
    """Read a dense labelled dataset.

    Parameters
    ----------
    path : str or path-like
    label_column : int or None
        0-based index of the label column (negative counts from the end).
        Ignored when the header names a ``label`` column.
    header : bool or None
        Force header handling on or off; ``None`` detects it.
    """
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    rows = [(i + 1, line) for i, line in enumerate(lines) if line.strip()]
    if not rows:
        raise ParseError("file contains no data")
    first_cells = rows[0][1].split(",")
    if header is None:
        header = not any(_is_number(c) for c in first_cells)
    width = len(first_cells)
    if header:
        names = [c.strip() for c in first_cells]
        if "label" in names:
            label_column = names.index("label")
        rows = rows[1:]
        if not rows:
            raise ParseError("file has a header but no data")
    if label_column is None:
        label_column = width - 1
    if not -width <= label_column < width:
        raise ParseError(f"label column {label_column} out of range for {width} columns")
    label_column %= width

    X, y = [], []
    for lineno, line in rows:
        cells = line.split(",")
        if len(cells) != width:
            raise RaggedRows(f"expected {width} fields, found {len(cells)}", lineno)
        feats = []
        for j, cell in enumerate(cells):
            if j == label_column:
                y.append(_parse_label(cell, lineno, j + 1))
            else:
                feats.append(_parse_float(cell, lineno, j + 1))
        X.append(feats)
    return LabeledDataset(np.array(X, dtype=float).reshape(len(X), width - 1), np.array(y))


def write_csv(dataset, path):
    """Write with a header ``x1,...,xD,label``; floats use shortest round-trip repr."""
    D = dataset.n_features
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join([f"x{j + 1}" for j in range(D)] + ["label"]) + "\n")
        for row, label in zip(dataset.X, dataset.y):
            fh.write(",".join([repr(float(v)) for v in row] + [str(int(label))]) + "\n")


def read_features(path, n_features=None):
    """Read an unlabelled dense CSV (optional header) as a float matrix."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    rows = [(i + 1, line) for i, line in enumerate(lines) if line.strip()]
    if rows and not any(_is_number(c) for c in rows[0][1].split(",")):
        rows = rows[1:]
    if not rows:
        raise ParseError("file contains no data")
    width = len(rows[0][1].split(","))
    X = []
    for lineno, line in rows:
        cells = line.split(",")
        if len(cells) != width:
            raise RaggedRows(f"expected {width} fields, found {len(cells)}", lineno)
        X.append([_parse_float(c, lineno, j + 1) for j, c in enumerate(cells)])
    X = np.array(X, dtype=float)
    if n_features is not None and X.shape[1] != n_features:
        raise DimensionMismatch(f"file has {X.shape[1]} features, expected {n_features}")
    return X


def read_libsvm(path, n_features=None):
    """Read a sparse LIBSVM-format file into a dense dataset.

    ``n_features`` fixes the column count; an index beyond it is a
    :class:`ParseError`. Without it the largest index seen sets ``D``.
    """
    labels, entries = [], []
    max_index = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0]
            tokens = line.split()
            if not tokens:
                continue
            labels.append(_parse_label(tokens[0], lineno, 1))
            row = []
            prev = 0
            for col, tok in enumerate(tokens[1:], start=2):
                idx_text, sep, val_text = tok.partition(":")
                if not sep:
                    raise ParseError(f"expected index:value, got {tok!r}", lineno, col)
                try:
                    idx = int(idx_text)
                except ValueError:
                    raise ParseError(f"bad feature index {idx_text!r}", lineno, col) from None
                if idx < 1:
                    raise ParseError(f"feature index {idx} is not 1-based", lineno, col)
                if idx <= prev:
                    raise NonAscendingIndex(f"index {idx} follows {prev}", lineno, col)
                if n_features is not None and idx > n_features:
                    raise ParseError(f"index {idx} exceeds n_features={n_features}", lineno, col)
                row.append((idx - 1, _parse_float(val_text, lineno, col)))
                prev = idx
            max_index = max(max_index, prev)
            entries.append(row)
    if not labels:
        raise ParseError("file contains no data")
    D = n_features if n_features is not None else max_index
    if D < 1:
        raise ParseError("no feature dimension: file lists no features and n_features is unset")
    X = np.zeros((len(labels), D))
    for i, row in enumerate(entries):
        for j, v in row:
            X[i, j] = v
    return LabeledDataset(X, np.array(labels))


def write_libsvm(dataset, path):
    """Write nonzero entries only, with shortest round-trip float repr."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row, label in zip(dataset.X, dataset.y):
            items = [f"{j + 1}:{float(row[j])!r}" for j in np.flatnonzero(row)]
            fh.write(" ".join([str(int(label))] + items) + "\n")


def read_dataset(path, fmt="csv", n_features=None):
    if fmt == "csv":
        return read_csv(path)
    if fmt == "libsvm":
        return read_libsvm(path, n_features)
    raise ValueError(f"unknown format {fmt!r}")


def write_metadata(meta, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# nsslab dataset metadata\n")
        for key, value in meta.items():
            fh.write(f"{key}={value!r}\n" if isinstance(value, float) else f"{key}={value}\n")


def read_metadata(path):
    meta = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ParseError("expected key=value", lineno)
            meta[key.strip()] = value.strip()
    return meta


class RangeScaler(TransformerMixin, BaseEstimator):
    """Linear per-feature scaling into ``[0, 1]`` or ``[-1, 1]``.

    Parameters
    ----------
    mode : {"unit", "sym"}
        ``"unit"`` maps each training column's ``[min, max]`` onto ``[0, 1]``;
        ``"sym"`` divides by the column's maximum absolute value.

    Attributes
    ----------
    offset_, scale_ : ndarray of shape (D,)
        ``transform(X) = (X - offset_) / scale_`` on non-degenerate columns.
    zero_range_ : ndarray of bool
        Columns with no spread; they transform to 0.

    Test data is scaled with the training parameters and is not clipped.
    """

    def __init__(self, mode="unit"):
        self.mode = mode

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        if self.mode == "unit":
            lo, hi = X.min(axis=0), X.max(axis=0)
            self.offset_, self.scale_ = lo, hi - lo
        elif self.mode == "sym":
            self.offset_ = np.zeros(X.shape[1])
            self.scale_ = np.abs(X).max(axis=0)
        else:
            raise ValueError(f"mode must be 'unit' or 'sym', got {self.mode!r}")
        self.zero_range_ = self.scale_ == 0
        self.n_features_in_ = X.shape[1]
        return self

    def _check(self, X):
        check_is_fitted(self)
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise DimensionMismatch(f"X has {X.shape[1]} features, scaler expects {self.n_features_in_}")
        return X

    def transform(self, X):
        X = self._check(X)
        scale = np.where(self.zero_range_, 1.0, self.scale_)
        out = (X - self.offset_) / scale
        out[:, self.zero_range_] = 0.0
        return out

    def inverse_transform(self, X):
        X = self._check(X)
        return X * np.where(self.zero_range_, 0.0, self.scale_) + self.offset_


class PCAReducer(TransformerMixin, BaseEstimator):
    """Project onto the leading principal components.

    Keeps the fewest components whose cumulative explained variance reaches
    ``variance_target``, but never more than ``max_dim``.

    Attributes
    ----------
    center_ : ndarray of shape (D,)
    components_ : ndarray of shape (D, m)
    explained_variance_ratio_ : float
        Variance fraction captured by the kept components.
    """

    def __init__(self, variance_target=0.95, max_dim=1000):
        self.variance_target = variance_target
        self.max_dim = max_dim

    def fit(self, X, y=None):
        X = check_array(X, dtype=float, ensure_min_samples=2)
        n, D = X.shape
        center = X.mean(axis=0)
        Z = X - center
        if D <= n:
            values, vectors = full_eigenpairs(Z.T @ Z)
        else:
            # n x n Gram matrix shares the nonzero spectrum of the scatter
            values, u = full_eigenpairs(Z @ Z.T)
            keep = values > values[0] * 1e-12 if values[0] > 0 else np.zeros(n, dtype=bool)
            values = values[keep]
            vectors = _fix_signs((Z.T @ u[:, keep]) / np.sqrt(values))
        values = np.maximum(values, 0.0)
        total = values.sum()
        if total > 0:
            ratios = np.cumsum(values) / total
            m = int(np.searchsorted(ratios, self.variance_target) + 1)
        else:
            ratios = np.ones(1)
            m = 1
        m = max(1, min(m, self.max_dim, vectors.shape[1]))
        self.center_ = center
        self.components_ = vectors[:, :m]
        self.explained_variance_ratio_ = float(ratios[m - 1])
        self.n_components_ = m
        self.n_features_in_ = D
        return self

    def transform(self, X):
        check_is_fitted(self)
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise DimensionMismatch(f"X has {X.shape[1]} features, PCA expects {self.n_features_in_}")
        return (X - self.center_) @ self.components_

    def inverse_transform(self, Y):
        check_is_fitted(self)
        return np.asarray(Y, dtype=float) @ self.components_.T + self.center_
