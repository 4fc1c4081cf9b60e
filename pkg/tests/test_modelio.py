import numpy as np
import pytest
from sklearn.pipeline import make_pipeline

from nsslab.classifiers import (
    LinearDiscriminantClassifier,
    NearestCentroidClassifier,
    NearestSubspaceClassifier,
    NearestSubspaceCV,
)
from nsslab.datagen import paper_gaussian_spec, paper_subspace_spec, sample_gaussian_mixture, sample_subspace_family
from nsslab.dataio import PCAReducer, RangeScaler
from nsslab.exceptions import ParseError
from nsslab.modelio import dumps_model, load_model, loads_model, save_model


@pytest.fixture(scope="module")
def data():
    return sample_subspace_family(paper_subspace_spec(1), 600, seed=2)


@pytest.mark.parametrize(
    "make",
    [
        lambda: NearestSubspaceClassifier(2),
        lambda: LinearDiscriminantClassifier(),
        lambda: NearestCentroidClassifier(),
        lambda: make_pipeline(RangeScaler("unit"), NearestSubspaceClassifier(3)),
        lambda: make_pipeline(RangeScaler("sym"), PCAReducer(0.9), LinearDiscriminantClassifier()),
    ],
    ids=["nss", "lda", "centroid", "scaler-nss", "scaler-pca-lda"],
)
def test_round_trip_is_bit_exact(tmp_path, data, make):
    model = make().fit(data.X, data.y)
    path = tmp_path / "model.txt"
    save_model(model, path)
    loaded = load_model(path)
    np.testing.assert_array_equal(loaded.predict(data.X), model.predict(data.X))
    # dumping the loaded model reproduces the file byte for byte
    assert dumps_model(loaded) == path.read_text(encoding="utf-8")


def test_nss_parameters_survive(data):
    model = NearestSubspaceClassifier(2).fit(data.X, data.y)
    loaded = loads_model(dumps_model(model))
    for a, b in zip(model.subspaces_, loaded.subspaces_):
        np.testing.assert_array_equal(a.mean, b.mean)
        np.testing.assert_array_equal(a.basis, b.basis)
    np.testing.assert_array_equal(loaded.residuals(data.X), model.residuals(data.X))


def test_cv_estimator_saves_its_refit(data):
    model = NearestSubspaceCV(cv_dims=[1, 2], folds=3).fit(data.X, data.y)
    loaded = loads_model(dumps_model(model))
    assert isinstance(loaded, NearestSubspaceClassifier)
    np.testing.assert_array_equal(loaded.predict(data.X), model.predict(data.X))


def test_gaussian_lda_round_trip():
    g = sample_gaussian_mixture(paper_gaussian_spec(), 300, seed=0)
    model = LinearDiscriminantClassifier().fit(g.X, g.y)
    loaded = loads_model(dumps_model(model))
    np.testing.assert_array_equal(loaded.decision_function(g.X), model.decision_function(g.X))


@pytest.mark.parametrize(
    "text",
    [
        "",
        "something else\n",
        "nsslab-model 1\n",
        "nsslab-model 1\nstep nss\nclasses 1 2\n",
        "nsslab-model 1\nstep mystery\nend\n",
        "nsslab-model 1\nend\n",
    ],
)
def test_malformed_files(text):
    with pytest.raises(ParseError):
        loads_model(text)


def test_corrupt_numbers(data):
    text = dumps_model(NearestCentroidClassifier().fit(data.X, data.y))
    lines = text.splitlines()
    i = next(j for j, line in enumerate(lines) if line.startswith("means"))
    lines[i] = lines[i].rsplit(" ", 1)[0] + " abc"
    with pytest.raises(ParseError):
        loads_model("\n".join(lines))
    lines[i] = lines[i].rsplit(" ", 1)[0]
    with pytest.raises(ParseError):
        loads_model("\n".join(lines))
