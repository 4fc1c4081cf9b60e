"""Bayes rules, empirical risks, the L1 density bound and the consistency study.

For equal priors the excess risk of a plug-in rule is bounded by the mean
L1 distance between the true class densities ``g_k`` and the plug-in
densities ``g_hat_k``. For the orthogonal-exponential subspace family the
plug-in density of a fitted nearest subspace model has the true form with
the fitted mean and basis substituted and the true ``alpha`` and radius
kept.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from ._random import make_rng
from .classifiers import NearestSubspaceClassifier
from .datagen import (
    GaussianMixtureSpec,
    SubspaceFamilySpec,
    log_subspace_density,
    sample_affine_class,
    sample_subspace_family,
)
from .exceptions import UnsupportedFamily
from .subspace import SubspaceModel


def _log_posterior_scores(spec, X):
    if isinstance(spec, GaussianMixtureSpec):
        return spec.log_densities(X) + np.log(spec.priors)
    if isinstance(spec, SubspaceFamilySpec) and spec.mode == "theorem1":
        return spec.log_densities(X) + np.log(spec.priors)
    raise UnsupportedFamily(
        "no closed-form class densities for this family; "
        "use a Gaussian mixture or the orthogonal-exponential subspace family"
    )


def bayes_predict(spec, X):
    """Bayes-optimal labels ``argmax_k pi_k g_k(x)`` (labels ``1..K``).

    Ties go to the smaller label. For the subspace family, a point outside
    every class's ball support (probability zero under the model) falls
    back to the nearest true subspace.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    scores = _log_posterior_scores(spec, X)
    nowhere = np.all(np.isneginf(scores), axis=1)
    if np.any(nowhere):
        truth = NearestSubspaceClassifier.from_subspaces(_true_subspaces(spec), np.arange(1, spec.n_classes + 1))
        scores[nowhere] = -truth.residuals(X[nowhere])
    return np.argmax(scores, axis=1) + 1


def _true_subspaces(spec):
    return [SubspaceModel(spec.centers[k], spec.bases[k]) for k in range(spec.n_classes)]


def empirical_risk(classifier, test):
    """Fraction of ``test`` misclassified by ``classifier``.

    ``classifier`` is a fitted estimator or any callable mapping a sample
    matrix to labels.
    """
    predict = classifier.predict if hasattr(classifier, "predict") else classifier
    return float(np.mean(np.asarray(predict(test.X)) != test.y))


def _plugin_subspaces(model):
    if isinstance(model, NearestSubspaceClassifier):
        return model.subspaces_
    if hasattr(model, "estimator_"):
        return model.estimator_.subspaces_
    return list(model)


def lemma1_bound(spec, model, mc_samples=20000, seed=0):
    """Monte Carlo estimate of ``(1/K) sum_k int |g_k - g_hat_k|``.

    Each integral is taken against the average measure ``(g + g_hat)/2``:
    half the draws come from ``g_k`` and half from ``g_hat_k``, and the
    integrand ``2|g - g_hat|/(g + g_hat) = 2 tanh(|log g - log g_hat| / 2)``
    is bounded in ``[0, 2]``.

    Parameters
    ----------
    spec : SubspaceFamilySpec
        Orthogonal-exponential family (``alpha`` set).
    model : NearestSubspaceClassifier or sequence of SubspaceModel
        Fitted plug-in estimates, one per class in label order.

    Returns
    -------
    (float, float)
        The estimate and its standard error.
    """
    if not (isinstance(spec, SubspaceFamilySpec) and spec.mode == "theorem1"):
        raise UnsupportedFamily("the L1 bound needs the orthogonal-exponential subspace family")
    fitted = _plugin_subspaces(model)
    if len(fitted) != spec.n_classes:
        raise ValueError(f"model has {len(fitted)} classes, family has {spec.n_classes}")
    rng = make_rng(seed)
    half = max(1, mc_samples // 2)
    K = spec.n_classes
    estimates, variances = [], []
    for k in range(K):
        u, B = spec.centers[k], spec.bases[k]
        u_hat, B_hat = fitted[k].mean, fitted[k].basis
        parts = []
        for center, basis in ((u, B), (u_hat, B_hat)):
            X = sample_affine_class(center, basis, half, rng, spec.radius, alpha=spec.alpha)
            lg = log_subspace_density(X, u, B, spec.alpha, spec.radius)
            lg_hat = log_subspace_density(X, u_hat, B_hat, spec.alpha, spec.radius)
            with np.errstate(invalid="ignore"):
                gap = np.abs(lg - lg_hat)
            gap[np.isneginf(lg) & np.isneginf(lg_hat)] = 0.0
            parts.append(2.0 * np.tanh(0.5 * gap))
        estimates.append(0.5 * (parts[0].mean() + parts[1].mean()))
        variances.append(0.25 * (parts[0].var(ddof=1) / half + parts[1].var(ddof=1) / half))
    return float(np.mean(estimates)), float(np.sqrt(np.sum(variances)) / K)


@dataclass
class RiskReport:
    empirical_risk: float
    bayes_risk: float
    gap: float
    lemma1_bound: float
    stderr: dict = field(default_factory=dict)
    n_train: int = 0
    n_test: int = 0
    seed: int = 0


def evaluate_risk(spec, model, test, mc_samples=20000, seed=0, n_train=0):
    """Paired risk evaluation of ``model`` against the Bayes rule on one test set.

    Both risks use the same test points, so the gap's standard error comes
    from the per-point differences of the two loss indicators.
    """
    wrong = (model.predict(test.X) != test.y).astype(float)
    bayes_wrong = (bayes_predict(spec, test.X) != test.y).astype(float)
    n = len(wrong)
    diff = wrong - bayes_wrong

    def se(v):
        return float(v.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0

    bound, bound_se = lemma1_bound(spec, model, mc_samples, seed)
    return RiskReport(
        empirical_risk=float(wrong.mean()),
        bayes_risk=float(bayes_wrong.mean()),
        gap=float(diff.mean()),
        lemma1_bound=bound,
        stderr={"empirical": se(wrong), "bayes": se(bayes_wrong), "gap": se(diff), "lemma1": bound_se},
        n_train=n_train,
        n_test=n,
        seed=seed,
    )


CURVE_COLUMNS = [
    "n",
    "trial",
    "R_n",
    "R_star",
    "gap",
    "lemma1_bound",
    "R_n_stderr",
    "R_star_stderr",
    "gap_stderr",
    "lemma1_stderr",
]


@dataclass
class ConsistencyCurve:
    train_sizes: list
    reports: list  # reports[i][t] for train_sizes[i], trial t

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.train_sizes, self.train_sizes[1:])):
            raise ValueError("train_sizes must be strictly increasing")

    def gaps(self, i):
        return np.array([r.gap for r in self.reports[i]])

    def median_gaps(self):
        return np.array([np.median(self.gaps(i)) for i in range(len(self.train_sizes))])

    def median_bounds(self):
        return np.array([np.median([r.lemma1_bound for r in row]) for row in self.reports])

    def rows(self):
        for n, row in zip(self.train_sizes, self.reports):
            for t, r in enumerate(row):
                yield [
                    n,
                    t,
                    r.empirical_risk,
                    r.bayes_risk,
                    r.gap,
                    r.lemma1_bound,
                    r.stderr["empirical"],
                    r.stderr["bayes"],
                    r.stderr["gap"],
                    r.stderr["lemma1"],
                ]

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CURVE_COLUMNS)
            for row in self.rows():
                writer.writerow([v if isinstance(v, int) else repr(float(v)) for v in row])


def consistency_study(spec, train_sizes, trials=10, n_test=50000, seed=0, mc_samples=20000):
    """Excess risk of the nearest subspace classifier across training sizes.

    For every size and trial: draw a training set, fit with the family's
    true intrinsic dimension, and evaluate against the Bayes rule on a fresh
    test set (paired). All randomness is derived from ``seed``.
    """
    if not (isinstance(spec, SubspaceFamilySpec) and spec.mode == "theorem1"):
        raise UnsupportedFamily("the consistency study needs the orthogonal-exponential subspace family")
    sizes = [int(n) for n in train_sizes]
    minimum = spec.n_classes * (spec.intrinsic_dim + 1)
    if any(n < minimum for n in sizes):
        raise ValueError(f"every training size must be at least K*(d+1) = {minimum}")
    reports = []
    for i, n in enumerate(sizes):
        row = []
        for t in range(trials):
            train = sample_subspace_family(spec, n, make_rng(seed, 0, i, t))
            test = sample_subspace_family(spec, n_test, make_rng(seed, 1, i, t))
            model = NearestSubspaceClassifier(spec.intrinsic_dim).fit(train.X, train.y)
            report = evaluate_risk(spec, model, test, mc_samples, make_rng(seed, 2, i, t), n_train=n)
            report.seed = seed
            row.append(report)
        reports.append(row)
    return ConsistencyCurve(sizes, reports)
