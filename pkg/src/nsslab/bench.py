"""Repeated train/test benchmark of the classifiers.

Each repeat draws a fresh synthetic dataset (builtin generators) or a fresh
stratified split (file data), fits the optional scaler and PCA on the
training part only, selects the nearest subspace dimension by k-fold cross
validation on the training part, and scores every classifier on the
held-out part.
"""

import csv
import math
import time
from dataclasses import dataclass, field

import numpy as np
from sklearn.pipeline import make_pipeline

from ._random import make_rng
from .classifiers import (
    LinearDiscriminantClassifier,
    NearestCentroidClassifier,
    NearestSubspaceClassifier,
    nss_cross_validate,
)
from .datagen import paper_gaussian_spec, paper_subspace_spec, sample_gaussian_mixture, sample_subspace_family
from .dataio import PCAReducer, RangeScaler, read_dataset
from .exceptions import NumericError

BUILTIN_GENERATORS = ("subspace-paper", "gaussian-paper")


def generate_builtin(name, n_samples, seed):
    """One dataset from a builtin generator; ``seed`` may be an int or Generator."""
    rng = make_rng(seed)
    if name == "subspace-paper":
        return sample_subspace_family(paper_subspace_spec(rng), n_samples, rng)
    if name == "gaussian-paper":
        return sample_gaussian_mixture(paper_gaussian_spec(), n_samples, rng)
    raise ValueError(f"unknown generator {name!r}; choose from {', '.join(BUILTIN_GENERATORS)}")


def stratified_split(y, train_fraction, seed):
    """Boolean training mask keeping at least one sample of every class on each side."""
    rng = make_rng(seed)
    y = np.asarray(y)
    mask = np.zeros(len(y), dtype=bool)
    for c in np.unique(y):
        members = rng.permutation(np.flatnonzero(y == c))
        if len(members) < 2:
            raise ValueError(f"class {c} has fewer than 2 samples; cannot split")
        n_train = min(max(int(round(train_fraction * len(members))), 1), len(members) - 1)
        mask[members[:n_train]] = True
    return mask


@dataclass
class BenchConfig:
    data: str
    format: str = "csv"
    classifiers: tuple = ("nss", "lda")
    train_fraction: float = 0.8
    repeats: int = None
    folds: int = 10
    cv_dims: tuple = None
    dim: int = None
    cv_once: bool = False
    scale: str = "none"
    pca_var: float = None
    pca_max: int = 1000
    seed: int = 0
    n_samples: int = 1200

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ValueError("train_fraction must lie in (0, 1)")
        if self.repeats is None:
            self.repeats = 200 if self.is_builtin else 10
        if self.repeats < 1:
            raise ValueError("repeats must be at least 1")
        unknown = set(self.classifiers) - {"nss", "lda", "centroid"}
        if unknown or not self.classifiers:
            raise ValueError(f"classifiers must be drawn from nss, lda, centroid; got {self.classifiers}")
        if self.scale not in ("none", "unit", "sym"):
            raise ValueError(f"scale must be none, unit or sym; got {self.scale!r}")

    @property
    def is_builtin(self):
        return self.data in BUILTIN_GENERATORS


@dataclass
class ClassifierSummary:
    mean_accuracy: float
    std_accuracy: float
    mean_fit_seconds: float
    median_fit_seconds: float
    n_ok: int
    n_failed: int


@dataclass
class BenchResult:
    rows: list  # dicts: repeat, classifier, accuracy, dim, status, fit_seconds
    summary: dict = field(default_factory=dict)

    @classmethod
    def from_rows(cls, rows, classifiers):
        summary = {}
        for name in classifiers:
            ok = [r for r in rows if r["classifier"] == name and r["status"] == "ok"]
            acc = np.array([r["accuracy"] for r in ok])
            secs = np.array([r["fit_seconds"] for r in ok])
            summary[name] = ClassifierSummary(
                mean_accuracy=float(acc.mean()) if len(acc) else math.nan,
                std_accuracy=float(acc.std(ddof=1)) if len(acc) > 1 else math.nan,
                mean_fit_seconds=float(secs.mean()) if len(secs) else math.nan,
                median_fit_seconds=float(np.median(secs)) if len(secs) else math.nan,
                n_ok=len(ok),
                n_failed=sum(1 for r in rows if r["classifier"] == name and r["status"] != "ok"),
            )
        return cls(rows, summary)

    def format_table(self):
        lines = [f"{'classifier':<10} {'accuracy (%)':>18} {'fit s (median)':>15} {'ok':>5} {'failed':>7}"]
        for name, s in self.summary.items():
            acc = f"{100 * s.mean_accuracy:.2f} +- {100 * s.std_accuracy:.2f}"
            lines.append(f"{name:<10} {acc:>18} {s.median_fit_seconds:>15.3g} {s.n_ok:>5} {s.n_failed:>7}")
        return "\n".join(lines)

    def to_csv(self, path, timing=False):
        """Per-repeat rows. Timings are excluded by default so output is byte-reproducible."""
        columns = ["repeat", "classifier", "accuracy", "dim", "status"] + (["fit_seconds"] if timing else [])
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for r in self.rows:
                writer.writerow(
                    [repr(v) if isinstance(v, float) else ("" if v is None else v) for v in (r[c] for c in columns)]
                )


def _preprocess(config, X_train, X_test):
    steps = []
    if config.scale != "none":
        steps.append(RangeScaler(config.scale))
    if config.pca_var is not None:
        steps.append(PCAReducer(config.pca_var, config.pca_max))
    if not steps:
        return X_train, X_test, steps
    pipe = make_pipeline(*steps).fit(X_train)
    return pipe.transform(X_train), pipe.transform(X_test), steps


def build_classifier(name, dim=None):
    if name == "nss":
        return NearestSubspaceClassifier(dim)
    if name == "lda":
        return LinearDiscriminantClassifier()
    return NearestCentroidClassifier()


def run_bench(config, progress=None):
    """Run the repeated benchmark described by ``config``.

    Classifier failures inside a repeat (for instance a singular pooled
    covariance for the discriminant) are recorded with their error name and
    left out of that classifier's aggregate.
    """
    source = None if config.is_builtin else read_dataset(config.data, config.format)
    rows = []
    tuned_dim = None
    for r in range(config.repeats):
        if config.is_builtin:
            data = generate_builtin(config.data, config.n_samples, make_rng(config.seed, r, 0))
        else:
            data = source
        mask = stratified_split(data.y, config.train_fraction, make_rng(config.seed, r, 1))
        X_train, X_test = _preprocess(config, data.X[mask], data.X[~mask])[:2]
        y_train, y_test = data.y[mask], data.y[~mask]
        for name in config.classifiers:
            dim = None
            try:
                if name == "nss":
                    dim = config.dim
                    if dim is None and config.cv_once and tuned_dim is not None:
                        dim = tuned_dim
                    if dim is None:
                        report = nss_cross_validate(
                            X_train, y_train, config.cv_dims, config.folds, make_rng(config.seed, r, 2)
                        )
                        dim = tuned_dim = report.chosen_dim
                clf = build_classifier(name, dim)
                start = time.perf_counter()
                clf.fit(X_train, y_train)
                elapsed = time.perf_counter() - start
                accuracy = float(np.mean(clf.predict(X_test) == y_test))
                rows.append(dict(repeat=r, classifier=name, accuracy=accuracy, dim=dim, status="ok", fit_seconds=elapsed))
            except NumericError as exc:
                rows.append(
                    dict(repeat=r, classifier=name, accuracy=math.nan, dim=dim, status=type(exc).__name__, fit_seconds=math.nan)
                )
        if progress is not None:
            progress(r + 1, config.repeats)
    return BenchResult.from_rows(rows, config.classifiers)
