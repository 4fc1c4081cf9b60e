"""Plain-text model files.

A model file is a versioned header followed by one block per pipeline step::

    nsslab-model 1
    step scaler
    mode unit
    offset <D floats>
    ...
    end
    step nss
    classes 1 2 3
    D 50
    d 2
    subspace 1
    mean <D floats>
    basis <D*d floats, column-major>
    end

Floats are written with the shortest repr that round-trips, so a loaded
model reproduces the saved one bit for bit.
"""

import numpy as np
from sklearn.pipeline import Pipeline, make_pipeline

from .classifiers import (
    LinearDiscriminantClassifier,
    NearestCentroidClassifier,
    NearestSubspaceClassifier,
    NearestSubspaceCV,
)
from .dataio import PCAReducer, RangeScaler
from .exceptions import ParseError
from .subspace import SubspaceModel

MAGIC = "nsslab-model"
VERSION = 1


def _floats(values):
    return " ".join(repr(float(v)) for v in np.ravel(values))


def _ints(values):
    return " ".join(str(int(v)) for v in np.ravel(values))


def _steps(model):
    if isinstance(model, Pipeline):
        return [step for _, step in model.steps]
    return [model]


def _dump_step(step):
    if isinstance(step, NearestSubspaceCV):
        step = step.estimator_
    if isinstance(step, RangeScaler):
        return [
            "step scaler",
            f"mode {step.mode}",
            f"offset {_floats(step.offset_)}",
            f"scale {_floats(step.scale_)}",
            f"zero_range {_ints(step.zero_range_)}",
        ]
    if isinstance(step, PCAReducer):
        D, m = step.components_.shape
        return [
            "step pca",
            f"shape {D} {m}",
            f"variance_target {step.variance_target!r}",
            f"max_dim {step.max_dim}",
            f"explained {step.explained_variance_ratio_!r}",
            f"center {_floats(step.center_)}",
            f"components {_floats(step.components_.ravel(order='F'))}",
        ]
    if isinstance(step, NearestSubspaceClassifier):
        lines = [
            "step nss",
            f"classes {_ints(step.classes_)}",
            f"D {step.n_features_in_}",
            f"d {step.subspaces_[0].dim}",
        ]
        for label, m in zip(step.classes_, step.subspaces_):
            lines += [f"subspace {int(label)}", f"mean {_floats(m.mean)}", f"basis {_floats(m.basis.ravel(order='F'))}"]
        return lines
    if isinstance(step, LinearDiscriminantClassifier):
        return [
            "step lda",
            f"classes {_ints(step.classes_)}",
            f"D {step.n_features_in_}",
            f"means {_floats(step.means_)}",
            f"covariance_inv {_floats(step.covariance_inv_)}",
            f"log_priors {_floats(step.log_priors_)}",
        ]
    if isinstance(step, NearestCentroidClassifier):
        return [
            "step centroid",
            f"classes {_ints(step.classes_)}",
            f"D {step.n_features_in_}",
            f"means {_floats(step.means_)}",
        ]
    raise TypeError(f"cannot serialize {type(step).__name__}")


def dumps_model(model):
    lines = [f"{MAGIC} {VERSION}"]
    for step in _steps(model):
        lines += _dump_step(step) + ["end"]
    return "\n".join(lines) + "\n"


def save_model(model, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_model(model))


class _Block:
    def __init__(self, kind, lineno):
        self.kind = kind
        self.lineno = lineno
        self.fields = []  # (key, tokens, lineno)

    def get(self, key):
        for k, tokens, lineno in self.fields:
            if k == key:
                return tokens, lineno
        raise ParseError(f"step {self.kind!r} is missing {key!r}", self.lineno)

    def floats(self, key, count=None):
        return _parse_floats(key, *self.get(key), count)

    def ints(self, key):
        tokens, lineno = self.get(key)
        try:
            return [int(t) for t in tokens]
        except ValueError:
            raise ParseError(f"non-integer entry in {key!r}", lineno) from None


def _load_block(b):
    if b.kind == "scaler":
        s = RangeScaler(b.get("mode")[0][0])
        s.offset_ = b.floats("offset")
        D = s.offset_.size
        s.scale_ = b.floats("scale", D)
        s.zero_range_ = np.array(b.ints("zero_range"), dtype=bool)
        s.n_features_in_ = D
        return s
    if b.kind == "pca":
        D, m = b.ints("shape")
        p = PCAReducer(float(b.get("variance_target")[0][0]), int(b.get("max_dim")[0][0]))
        p.center_ = b.floats("center", D)
        p.components_ = b.floats("components", D * m).reshape((D, m), order="F")
        p.explained_variance_ratio_ = float(b.get("explained")[0][0])
        p.n_components_ = m
        p.n_features_in_ = D
        return p
    classes = np.array(b.ints("classes"))
    (D,) = b.ints("D")
    K = len(classes)
    if b.kind == "nss":
        (d,) = b.ints("d")
        means = [_parse_floats("mean", *f, D) for f in _repeated(b, "mean")]
        bases = [_parse_floats("basis", *f, D * d).reshape((D, d), order="F") for f in _repeated(b, "basis")]
        if len(means) != K or len(bases) != K:
            raise ParseError(f"expected {K} subspaces", b.lineno)
        return NearestSubspaceClassifier.from_subspaces(
            [SubspaceModel(u, B) for u, B in zip(means, bases)], classes
        )
    if b.kind == "lda":
        clf = LinearDiscriminantClassifier()
        clf.means_ = b.floats("means", K * D).reshape(K, D)
        clf.covariance_inv_ = b.floats("covariance_inv", D * D).reshape(D, D)
        clf.log_priors_ = b.floats("log_priors", K)
    elif b.kind == "centroid":
        clf = NearestCentroidClassifier()
        clf.means_ = b.floats("means", K * D).reshape(K, D)
    else:
        raise ParseError(f"unknown step {b.kind!r}", b.lineno)
    clf.classes_ = classes
    clf.n_features_in_ = D
    return clf


def _repeated(block, key):
    return [(tokens, lineno) for k, tokens, lineno in block.fields if k == key]


def _parse_floats(key, tokens, lineno, count=None):
    try:
        values = np.array([float(t) for t in tokens])
    except ValueError:
        raise ParseError(f"non-numeric entry in {key!r}", lineno) from None
    if count is not None and values.size != count:
        raise ParseError(f"{key!r} has {values.size} entries, expected {count}", lineno)
    return values


def loads_model(text):
    """Parse a model file; returns the classifier, or a Pipeline if preprocessing was saved."""
    lines = text.splitlines()
    if not lines or lines[0].split() != [MAGIC, str(VERSION)]:
        raise ParseError(f"not a {MAGIC} v{VERSION} file", 1)
    blocks, current = [], None
    for lineno, line in enumerate(lines[1:], start=2):
        tokens = line.split()
        if not tokens:
            continue
        if tokens[0] == "step":
            if current is not None or len(tokens) != 2:
                raise ParseError("malformed step header", lineno)
            current = _Block(tokens[1], lineno)
        elif tokens[0] == "end":
            if current is None:
                raise ParseError("'end' outside a step", lineno)
            blocks.append(current)
            current = None
        elif current is None:
            raise ParseError(f"field {tokens[0]!r} outside a step", lineno)
        else:
            current.fields.append((tokens[0], tokens[1:], lineno))
    if current is not None:
        raise ParseError("unterminated step", current.lineno)
    if not blocks:
        raise ParseError("model file has no steps")
    steps = [_load_block(b) for b in blocks]
    return steps[0] if len(steps) == 1 else make_pipeline(*steps)


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return loads_model(fh.read())
