import math

import numpy as np
import pytest

from nsslab.classifiers import NearestSubspaceClassifier
from nsslab.datagen import (
    GaussianMixtureSpec,
    paper_gaussian_spec,
    paper_subspace_spec,
    random_subspace_spec,
    sample_gaussian_mixture,
    sample_subspace_family,
)
from nsslab.exceptions import UnsupportedFamily
from nsslab.risk import (
    CURVE_COLUMNS,
    ConsistencyCurve,
    bayes_predict,
    consistency_study,
    empirical_risk,
    evaluate_risk,
    lemma1_bound,
)
from nsslab.subspace import SubspaceModel


def theorem1_spec(alpha=200.0, seed=0):
    return random_subspace_spec(3, 20, 2, math.pi / 8, 1.0, alpha=alpha, seed=seed)


def true_models(spec):
    return [SubspaceModel(spec.centers[k], spec.bases[k]) for k in range(spec.n_classes)]


@pytest.fixture(scope="module")
def curve():
    return consistency_study(theorem1_spec(), [100, 1000, 10000], trials=10, n_test=20000, seed=0, mc_samples=10000)


# Bayes rule


def test_bayes_point_on_second_subspace():
    spec = theorem1_spec()
    x = spec.bases[1] @ np.array([0.3, -0.2])
    assert bayes_predict(spec, x)[0] == 2


def test_bayes_equal_spherical_gaussians_is_nearest_mean():
    rng = np.random.default_rng(0)
    means = rng.normal(size=(4, 3)) * 2
    spec = GaussianMixtureSpec(means, np.stack([np.eye(3) * 1.7] * 4), np.full(4, 0.25))
    X = rng.normal(size=(2000, 3)) * 3
    nearest = np.argmin(((X[:, None] - means) ** 2).sum(-1), axis=1) + 1
    np.testing.assert_array_equal(bayes_predict(spec, X), nearest)


def test_bayes_gaussian_affine_invariance():
    spec = paper_gaussian_spec()
    rng = np.random.default_rng(1)
    A = rng.normal(size=(3, 3)) + 3 * np.eye(3)
    b = rng.normal(size=3)
    moved = GaussianMixtureSpec(
        spec.means @ A.T + b, np.stack([A @ S @ A.T for S in spec.covariances]), spec.priors
    )
    X = sample_gaussian_mixture(spec, 3000, seed=2).X
    np.testing.assert_array_equal(bayes_predict(moved, X @ A.T + b), bayes_predict(spec, X))


def test_bayes_accuracy_of_benchmark_gaussians():
    spec = paper_gaussian_spec()
    test = sample_gaussian_mixture(spec, 1_000_000, seed=3)
    correct = bayes_predict(spec, test.X) == test.y
    acc, se = correct.mean(), correct.std() / math.sqrt(len(correct))
    assert se < 0.001
    # LDA reaches 95.12% +- 1.58% here, and no rule beats Bayes
    assert acc >= 0.9512 - 0.0158


def test_bayes_unsupported_for_ambient_noise():
    with pytest.raises(UnsupportedFamily):
        bayes_predict(paper_subspace_spec(0), np.zeros((1, 50)))
    with pytest.raises(UnsupportedFamily):
        lemma1_bound(paper_subspace_spec(0), true_models(paper_subspace_spec(0)))


# empirical risk


def test_empirical_risk_examples():
    spec = theorem1_spec()
    test = sample_subspace_family(spec, 3000, seed=4)
    assert empirical_risk(lambda X: test.y, test) == 0.0
    constant = empirical_risk(lambda X: np.ones(len(X), dtype=int), test)
    assert constant == pytest.approx(2 / 3, abs=1e-12)


def test_empirical_risk_of_nss_on_benchmark_subspaces():
    spec = paper_subspace_spec(5)
    data = sample_subspace_family(spec, 1200, seed=6)
    idx = np.random.default_rng(0).permutation(1200)
    train, test = data.subset(idx[:960]), data.subset(idx[960:])
    clf = NearestSubspaceClassifier(2).fit(train.X, train.y)
    # three standard deviations (0.51%) below 99.16% accuracy
    assert empirical_risk(clf, test) <= 1 - 0.9916 + 3 * 0.0051


# L1 bound


def test_bound_is_zero_for_the_truth():
    spec = theorem1_spec()
    value, se = lemma1_bound(spec, true_models(spec), mc_samples=4000, seed=0)
    assert value == 0.0 and se == 0.0


def test_bound_is_positive_for_a_wrong_model():
    spec = theorem1_spec()
    swapped = true_models(spec)[::-1]
    value, se = lemma1_bound(spec, swapped, mc_samples=4000, seed=0)
    # classes 1 and 3 are essentially disjoint from their swapped estimate
    assert value > 1.0 and value <= 2.0
    assert se > 0.0


def test_bound_is_deterministic():
    spec = theorem1_spec()
    data = sample_subspace_family(spec, 300, seed=1)
    clf = NearestSubspaceClassifier(2).fit(data.X, data.y)
    assert lemma1_bound(spec, clf, 2000, seed=7) == lemma1_bound(spec, clf, 2000, seed=7)


def test_bound_dominates_gap(curve):
    for row in curve.reports:
        for r in row:
            combined = math.hypot(r.stderr["gap"], r.stderr["lemma1"])
            assert r.lemma1_bound >= r.gap - 3 * combined
            assert r.lemma1_bound >= -2 * r.stderr["lemma1"]


def test_bound_decreases_with_training_size(curve):
    bounds = curve.median_bounds()
    assert bounds[-1] < bounds[0]


# consistency study


def test_gap_is_never_significantly_negative(curve):
    for row in curve.reports:
        for r in row:
            assert r.gap >= -2 * r.stderr["gap"]
            assert r.gap == pytest.approx(r.empirical_risk - r.bayes_risk, abs=1e-12)


def test_median_gap_shrinks(curve):
    gaps = curve.median_gaps()
    assert gaps[-1] < gaps[0]
    assert gaps[-1] < 0.01


def test_gap_stable_across_test_seeds():
    spec = theorem1_spec()
    train = sample_subspace_family(spec, 300, seed=10)
    clf = NearestSubspaceClassifier(2).fit(train.X, train.y)
    a = evaluate_risk(spec, clf, sample_subspace_family(spec, 50000, seed=11), mc_samples=2000)
    b = evaluate_risk(spec, clf, sample_subspace_family(spec, 50000, seed=12), mc_samples=2000)
    assert abs(a.gap - b.gap) < 3 * math.hypot(a.stderr["gap"], b.stderr["gap"])


def test_near_separable_regime():
    spec = random_subspace_spec(3, 20, 2, math.pi / 4, 1.0, alpha=1e6, seed=3)
    curve = consistency_study(spec, [2000], trials=3, n_test=20000, seed=1, mc_samples=2000)
    assert np.all(curve.gaps(0) < 0.005)


def test_study_is_deterministic_and_exports(tmp_path):
    spec = theorem1_spec(seed=2)
    a = consistency_study(spec, [30, 60], trials=2, n_test=500, seed=4, mc_samples=200)
    b = consistency_study(spec, [30, 60], trials=2, n_test=500, seed=4, mc_samples=200)
    a.to_csv(tmp_path / "a.csv")
    b.to_csv(tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    lines = (tmp_path / "a.csv").read_text().splitlines()
    assert lines[0].split(",") == CURVE_COLUMNS
    assert len(lines) == 1 + 4


def test_study_validation():
    spec = theorem1_spec()
    with pytest.raises(ValueError):
        consistency_study(spec, [8], trials=1)
    with pytest.raises(ValueError):
        ConsistencyCurve([100, 100], [[], []])
    with pytest.raises(UnsupportedFamily):
        consistency_study(paper_subspace_spec(0), [100], trials=1)
