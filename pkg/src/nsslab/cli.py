"""Command line front end: ``nsslab {gen,fit,predict,bench,consistency}``.

Exit codes: 0 success, 1 usage error, 2 unreadable or malformed input,
3 numerical failure (dimension mismatch, singular covariance, ...).
"""

import argparse
import math
import sys

import numpy as np
from sklearn.pipeline import make_pipeline

from ._random import make_rng
from .bench import BUILTIN_GENERATORS, BenchConfig, build_classifier, generate_builtin, run_bench
from .classifiers import NearestSubspaceClassifier, nss_cross_validate
from .datagen import random_subspace_spec, sample_subspace_family, spec_metadata
from .dataio import PCAReducer, RangeScaler, read_dataset, read_features, write_csv, write_metadata
from .exceptions import DimensionMismatch, NumericError, ParseError
from .modelio import load_model, save_model
from .risk import consistency_study

EXIT_USAGE, EXIT_PARSE, EXIT_NUMERIC = 1, 2, 3
GENERATORS = BUILTIN_GENERATORS + ("theorem1",)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_preprocessing(p):
    p.add_argument("--scale", choices=["none", "unit", "sym"], default="none",
                   help="linear feature scaling to [0,1] (unit) or [-1,1] (sym)")
    p.add_argument("--pca-var", type=float, default=None,
                   help="reduce dimension by PCA to this explained-variance fraction")
    p.add_argument("--pca-max", type=int, default=1000, help="upper bound on PCA dimension")


def _add_theorem1_family(p):
    p.add_argument("--classes", type=int, default=3)
    p.add_argument("--ambient-dim", type=int, default=20)
    p.add_argument("--dim", type=int, default=2, help="intrinsic subspace dimension")
    p.add_argument("--alpha", type=float, default=200.0)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--min-angle", type=float, default=math.pi / 8)


def build_parser():
    parser = _Parser(prog="nsslab", description="Nearest subspace classification toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="write a synthetic dataset to CSV")
    p.add_argument("--data", required=True, choices=GENERATORS, help="generator name")
    p.add_argument("--n-samples", type=int, default=1200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_theorem1_family(p)

    p = sub.add_parser("fit", help="train a classifier and save it")
    p.add_argument("--data", required=True)
    p.add_argument("--format", choices=["csv", "libsvm"], default="csv")
    p.add_argument("--classifier", choices=["nss", "lda", "centroid"], default="nss")
    p.add_argument("--dim", type=int, default=None, help="subspace dimension (default: cross-validate)")
    p.add_argument("--cv-dims", type=_int_list, default=None)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="model file to write")
    _add_preprocessing(p)

    p = sub.add_parser("predict", help="label samples with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--format", choices=["csv", "libsvm"], default="csv")
    p.add_argument("--out", default=None, help="write labels here instead of stdout")
    p.add_argument("--residuals", action="store_true", help="also write per-class residuals (nss only)")

    p = sub.add_parser("bench", help="repeated 80/20 benchmark")
    p.add_argument("--data", required=True, help=f"data file or builtin generator ({', '.join(BUILTIN_GENERATORS)})")
    p.add_argument("--format", choices=["csv", "libsvm"], default="csv")
    p.add_argument("--classifier", action="append", choices=["nss", "lda", "centroid"], default=None)
    p.add_argument("--dim", type=int, default=None, help="fix the subspace dimension instead of cross-validating")
    p.add_argument("--cv-dims", type=_int_list, default=None)
    p.add_argument("--cv-once", action="store_true", help="tune the dimension on the first repeat only")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--train-frac", type=float, default=0.8)
    p.add_argument("--repeats", type=int, default=None)
    p.add_argument("--n-samples", type=int, default=1200, help="dataset size for builtin generators")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="per-repeat CSV")
    p.add_argument("--timing", action="store_true", help="include fit times in the CSV")
    _add_preprocessing(p)

    p = sub.add_parser("consistency", help="excess-risk study on the orthogonal-exponential family")
    p.add_argument("--train-sizes", type=_int_list, default=[100, 300, 1000, 3000, 10000])
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--n-test", type=int, default=50000)
    p.add_argument("--mc-samples", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    _add_theorem1_family(p)
    return parser


def _theorem1_spec(args):
    return random_subspace_spec(
        args.classes, args.ambient_dim, args.dim, args.min_angle, args.radius, alpha=args.alpha, seed=args.seed
    )


def cmd_gen(args):
    if args.data == "theorem1":
        spec = _theorem1_spec(args)
        data = sample_subspace_family(spec, args.n_samples, make_rng(args.seed, 1))
        meta = spec_metadata(spec, args.n_samples, args.seed, args.data)
    else:
        data = generate_builtin(args.data, args.n_samples, args.seed)
        meta = {"generator": args.data, "n": args.n_samples, "seed": args.seed}
    write_csv(data, args.out)
    write_metadata(meta, args.out + ".meta")
    print(f"wrote {data.n_samples} samples x {data.n_features} features to {args.out}")


def cmd_fit(args):
    data = read_dataset(args.data, args.format)
    steps = []
    X = data.X
    if args.scale != "none":
        steps.append(RangeScaler(args.scale))
    if args.pca_var is not None:
        steps.append(PCAReducer(args.pca_var, args.pca_max))
    if steps:
        X = make_pipeline(*steps).fit_transform(X)
    dim = args.dim
    if args.classifier == "nss" and dim is None:
        report = nss_cross_validate(X, data.y, args.cv_dims, args.folds, args.seed)
        dim = report.chosen_dim
        print(f"cross-validated dimension: {dim}")
    clf = build_classifier(args.classifier, dim).fit(X, data.y)
    model = make_pipeline(*steps, clf) if steps else clf
    save_model(model, args.out)
    accuracy = np.mean(clf.predict(X) == data.y)
    print(f"training accuracy: {100 * accuracy:.2f}%")
    print(f"model written to {args.out}")


def _final_step(model):
    return model.steps[-1][1] if hasattr(model, "steps") else model


def _has_label_header(path):
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
    return "label" in [c.strip() for c in first.split(",")]


def cmd_predict(args):
    model = load_model(args.model)
    D = model.n_features_in_ if not hasattr(model, "steps") else model.steps[0][1].n_features_in_
    labels = None
    if args.format == "libsvm":
        data = read_dataset(args.data, "libsvm", n_features=D)
        X, labels = data.X, data.y
    elif _has_label_header(args.data):
        data = read_dataset(args.data, "csv")
        X, labels = data.X, data.y
    else:
        X = read_features(args.data)
        if X.shape[1] == D + 1:
            X, labels = X[:, :-1], X[:, -1].astype(np.int64)
        elif X.shape[1] != D:
            raise DimensionMismatch(f"data has {X.shape[1]} columns, model expects {D} features")
    pred = model.predict(X)
    lines = []
    if args.residuals:
        clf = _final_step(model)
        if not isinstance(clf, NearestSubspaceClassifier):
            raise UsageError("--residuals is only available for nss models")
        Xt = X
        if hasattr(model, "steps"):
            for _, step in model.steps[:-1]:
                Xt = step.transform(Xt)
        res = clf.residuals(Xt)
        lines.append(",".join(["label"] + [f"residual_{int(c)}" for c in clf.classes_]))
        lines += [",".join([str(int(p))] + [repr(float(v)) for v in row]) for p, row in zip(pred, res)]
    else:
        lines = [str(int(p)) for p in pred]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if labels is not None:
        print(f"accuracy: {100 * np.mean(pred == labels):.2f}%", file=sys.stderr if not args.out else sys.stdout)


def cmd_bench(args):
    config = BenchConfig(
        data=args.data,
        format=args.format,
        classifiers=tuple(args.classifier or ("nss", "lda")),
        train_fraction=args.train_frac,
        repeats=args.repeats,
        folds=args.folds,
        cv_dims=args.cv_dims,
        dim=args.dim,
        cv_once=args.cv_once,
        scale=args.scale,
        pca_var=args.pca_var,
        pca_max=args.pca_max,
        seed=args.seed,
        n_samples=args.n_samples,
    )
    result = run_bench(config)
    print(result.format_table())
    if args.out:
        result.to_csv(args.out, timing=args.timing)


def cmd_consistency(args):
    spec = _theorem1_spec(args)
    curve = consistency_study(spec, args.train_sizes, args.trials, args.n_test, args.seed, args.mc_samples)
    print(f"{'n':>8} {'median gap':>12} {'median bound':>13}")
    for n, gap, bound in zip(curve.train_sizes, curve.median_gaps(), curve.median_bounds()):
        print(f"{n:>8} {gap:>12.5f} {bound:>13.5f}")
    if args.out:
        curve.to_csv(args.out)


COMMANDS = {
    "gen": cmd_gen,
    "fit": cmd_fit,
    "predict": cmd_predict,
    "bench": cmd_bench,
    "consistency": cmd_consistency,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"nsslab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, OSError) as exc:
        print(f"nsslab: input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NumericError as exc:
        print(f"nsslab: numerical error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        # configuration problems surfaced by BenchConfig and friends
        print(f"nsslab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
