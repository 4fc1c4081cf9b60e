"""Synthetic distribution families with known ground truth.

Three families are provided:

* a Gaussian mixture (``paper_gaussian_spec`` gives the 3-class benchmark
  in R^3),
* a union of bounded linear subspaces with isotropic ambient noise
  (``noise_sigma`` set),
* the same subspaces with Gaussian spread restricted to each subspace's
  orthogonal complement (``alpha`` set), whose class density is
  ``exp(-alpha * t)`` times a uniform density on the d-ball, ``t`` being the
  squared distance to the subspace.

Every sampler is a deterministic function of ``(spec, n, seed)``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from ._random import make_rng
from .dataset import LabeledDataset
from .exceptions import AngleInfeasible, DimensionMismatch, WrongMode
from .linalg import ORTHONORMAL_TOL, principal_angles

PAPER_NOISE_SIGMA = 0.05


@dataclass(frozen=True, eq=False)
class GaussianMixtureSpec:
    means: np.ndarray
    covariances: np.ndarray
    priors: np.ndarray

    def __post_init__(self):
        means = np.array(self.means, dtype=float)
        covs = np.array(self.covariances, dtype=float)
        priors = np.array(self.priors, dtype=float)
        K, D = means.shape
        if covs.shape != (K, D, D) or priors.shape != (K,):
            raise DimensionMismatch("means, covariances and priors disagree on K or D")
        if np.abs(covs - covs.transpose(0, 2, 1)).max() > 1e-12:
            raise ValueError("covariances must be symmetric")
        if np.any(priors < 0) or abs(priors.sum() - 1.0) > 1e-12:
            raise ValueError("priors must be non-negative and sum to 1")
        try:
            chol = np.linalg.cholesky(covs)
        except np.linalg.LinAlgError:
            raise ValueError("covariances must be positive definite") from None
        for name, value in (("means", means), ("covariances", covs), ("priors", priors)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        object.__setattr__(self, "_chol", chol)

    @property
    def n_classes(self):
        return self.means.shape[0]

    @property
    def ambient_dim(self):
        return self.means.shape[1]

    def log_densities(self, X):
        """Log class densities ``log g_k(x)``, shape (n, K)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        D = self.ambient_dim
        out = np.empty((X.shape[0], self.n_classes))
        for k in range(self.n_classes):
            L = self._chol[k]
            z = np.linalg.solve(L, (X - self.means[k]).T)
            logdet = 2.0 * np.log(np.diag(L)).sum()
            out[:, k] = -0.5 * (np.einsum("ij,ij->j", z, z) + logdet + D * math.log(2 * math.pi))
        return out


def paper_gaussian_spec():
    """Three equiprobable Gaussians in R^3 (the mixture-Gaussian benchmark)."""
    means = [[1, 2, 3], [-1, -2, -3], [-1, 2, -3]]
    covariances = [
        [[3, 0.2, 0.1], [0.2, 2, 0.2], [0.1, 0.2, 2]],
        [[2, 0, 0], [0, 1, 0], [0, 0, 1]],
        [[2, 0, 0], [0, 2, 0], [0, 0, 3]],
    ]
    return GaussianMixtureSpec(means, covariances, np.full(3, 1 / 3))


def class_counts(n, priors):
    """Split ``n`` samples by ``priors`` with largest-remainder rounding."""
    priors = np.asarray(priors, dtype=float)
    raw = n * priors
    counts = np.floor(raw).astype(np.int64)
    short = n - counts.sum()
    # stable sort keeps low class indices first among equal remainders
    order = np.argsort(-(raw - counts), kind="stable")
    counts[order[:short]] += 1
    return counts


def sample_gaussian_mixture(spec, n, seed):
    """Draw ``n`` labelled samples, ``n * prior_k`` (rounded) from class ``k``.

    Labels are ``1..K``; rows are grouped by class.
    """
    rng = make_rng(seed)
    counts = class_counts(n, spec.priors)
    X, y = [], []
    for k, n_k in enumerate(counts):
        z = rng.standard_normal((n_k, spec.ambient_dim))
        X.append(spec.means[k] + z @ spec._chol[k].T)
        y.append(np.full(n_k, k + 1))
    return LabeledDataset(np.concatenate(X), np.concatenate(y))


@dataclass(frozen=True, eq=False)
class SubspaceFamilySpec:
    """K bounded affine d-subspaces in R^D with one of two noise models.

    Exactly one of ``noise_sigma`` (isotropic ambient Gaussian noise) and
    ``alpha`` (Gaussian on the orthogonal complement with per-coordinate
    variance ``1/(2 alpha)``) is set.

    Attributes
    ----------
    centers : ndarray of shape (K, D)
    bases : ndarray of shape (K, D, d)
    radius : float
        On-subspace coordinates are uniform in the d-ball of this radius.
    min_angle : float
        Separation the bases were drawn to satisfy (radians).
    """

    centers: np.ndarray
    bases: np.ndarray
    radius: float = 1.0
    noise_sigma: float = None
    alpha: float = None
    min_angle: float = 0.0
    angle_kind: str = field(default="largest")

    def __post_init__(self):
        centers = np.array(self.centers, dtype=float)
        bases = np.array(self.bases, dtype=float)
        if bases.ndim != 3 or centers.shape != bases.shape[:2]:
            raise DimensionMismatch("centers must be (K, D) and bases (K, D, d)")
        K, D, d = bases.shape
        if not 1 <= d < D:
            raise ValueError(f"need 1 <= d < D, got d={d}, D={D}")
        gram = np.einsum("kdi,kdj->kij", bases, bases)
        if np.abs(gram - np.eye(d)).max() > ORTHONORMAL_TOL:
            raise ValueError("bases must have orthonormal columns")
        if (self.noise_sigma is None) == (self.alpha is None):
            raise ValueError("set exactly one of noise_sigma and alpha")
        if self.alpha is not None and not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.noise_sigma is not None and self.noise_sigma < 0:
            raise ValueError("noise_sigma must be non-negative")
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        centers.setflags(write=False)
        bases.setflags(write=False)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "bases", bases)

    @property
    def n_classes(self):
        return self.bases.shape[0]

    @property
    def ambient_dim(self):
        return self.bases.shape[1]

    @property
    def intrinsic_dim(self):
        return self.bases.shape[2]

    @property
    def mode(self):
        return "theorem1" if self.alpha is not None else "ambient"

    @property
    def priors(self):
        return np.full(self.n_classes, 1.0 / self.n_classes)

    def with_alpha(self, alpha):
        """The same subspaces under the orthogonal-exponential noise model."""
        return SubspaceFamilySpec(
            self.centers, self.bases, self.radius, None, alpha, self.min_angle, self.angle_kind
        )

    def log_densities(self, X):
        """Log class densities ``log g_k(x)``, shape (n, K); ``-inf`` off-support."""
        if self.mode != "theorem1":
            raise WrongMode("class densities exist only for the orthogonal-exponential family")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.column_stack(
            [
                log_subspace_density(X, self.centers[k], self.bases[k], self.alpha, self.radius)
                for k in range(self.n_classes)
            ]
        )


def _separation_ok(bases, min_angle, kind):
    for i in range(len(bases)):
        for j in range(i + 1, len(bases)):
            angles = principal_angles(bases[i], bases[j])
            angle = angles[-1] if kind == "largest" else angles[0]
            if angle < min_angle:
                return False
    return True


def random_orthonormal(D, d, rng):
    Q, R = np.linalg.qr(rng.standard_normal((D, d)))
    # Haar-distributed once the column signs follow diag(R)
    return Q * np.where(np.diag(R) < 0, -1.0, 1.0)


def random_subspace_spec(
    n_classes=3,
    ambient_dim=50,
    intrinsic_dim=2,
    min_angle=math.pi / 8,
    radius=1.0,
    noise_sigma=PAPER_NOISE_SIGMA,
    alpha=None,
    seed=0,
    angle_kind="largest",
    max_tries=10000,
):
    """Random linear subspaces through the origin with a pairwise separation floor.

    Bases are orthonormalized Gaussian matrices, redrawn as a set until every
    pair's principal angle (the largest one by default, the smallest with
    ``angle_kind="smallest"``) is at least ``min_angle``.

    Pass ``alpha`` instead of ``noise_sigma`` for the orthogonal-exponential
    noise model.
    """
    if angle_kind not in ("largest", "smallest"):
        raise ValueError(f"angle_kind must be 'largest' or 'smallest', got {angle_kind!r}")
    if alpha is not None:
        noise_sigma = None
    rng = make_rng(seed)
    for _ in range(max_tries):
        bases = np.stack([random_orthonormal(ambient_dim, intrinsic_dim, rng) for _ in range(n_classes)])
        if _separation_ok(bases, min_angle, angle_kind):
            return SubspaceFamilySpec(
                centers=np.zeros((n_classes, ambient_dim)),
                bases=bases,
                radius=radius,
                noise_sigma=noise_sigma,
                alpha=alpha,
                min_angle=min_angle,
                angle_kind=angle_kind,
            )
    raise AngleInfeasible(f"no basis set met min_angle={min_angle:.4g} after {max_tries} draws")


def paper_subspace_spec(seed):
    """Three 2-planes in R^50, largest pairwise angle >= pi/8, sigma = 0.05."""
    return random_subspace_spec(3, 50, 2, math.pi / 8, 1.0, PAPER_NOISE_SIGMA, seed=seed)


def uniform_ball(n, d, radius, rng):
    """``n`` points uniform in the d-ball: random direction times ``radius * U**(1/d)``."""
    direction = rng.standard_normal((n, d))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    r = radius * rng.random(n) ** (1.0 / d)
    return direction * r[:, None]


def sample_affine_class(center, basis, n, rng, radius=1.0, noise_sigma=None, alpha=None):
    """Samples of one class: uniform on the bounded subspace plus noise."""
    D, d = basis.shape
    X = center + uniform_ball(n, d, radius, rng) @ basis.T
    if alpha is not None:
        z = rng.standard_normal((n, D)) / math.sqrt(2.0 * alpha)
        X += z - (z @ basis) @ basis.T
    elif noise_sigma:
        X += noise_sigma * rng.standard_normal((n, D))
    return X


def sample_subspace_family(spec, n, seed):
    """Draw ``n`` labelled samples, balanced over the classes, labels ``1..K``."""
    rng = make_rng(seed)
    counts = class_counts(n, spec.priors)
    X, y = [], []
    for k, n_k in enumerate(counts):
        X.append(
            sample_affine_class(
                spec.centers[k], spec.bases[k], n_k, rng, spec.radius, spec.noise_sigma, spec.alpha
            )
        )
        y.append(np.full(n_k, k + 1))
    return LabeledDataset(np.concatenate(X), np.concatenate(y))


def log_ball_volume(d, radius):
    return 0.5 * d * math.log(math.pi) + d * math.log(radius) - gammaln(0.5 * d + 1.0)


def log_normalizer(D, d, alpha, radius):
    """``log(C(d) beta)``: uniform density on the d-ball times the (D-d)-dim Gaussian peak."""
    return -log_ball_volume(d, radius) + 0.5 * (D - d) * math.log(alpha / math.pi)


def log_subspace_density(X, center, basis, alpha, radius):
    """Log density of the orthogonal-exponential class at each row of ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    D, d = basis.shape
    Z = X - center
    coords = Z @ basis
    inside = np.einsum("ij,ij->i", coords, coords)
    t = np.maximum(np.einsum("ij,ij->i", Z, Z) - inside, 0.0)
    out = log_normalizer(D, d, alpha, radius) - alpha * t
    out[inside > radius * radius] = -np.inf
    return out


def class_density(spec, k, x):
    """Density of class ``k`` (0-based) at the point ``x``; 0 outside the ball support."""
    if spec.mode != "theorem1":
        raise WrongMode("class densities exist only for the orthogonal-exponential family")
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.ambient_dim,):
        raise DimensionMismatch(f"expected a vector of length {spec.ambient_dim}")
    return float(np.exp(log_subspace_density(x, spec.centers[k], spec.bases[k], spec.alpha, spec.radius)[0]))


def spec_metadata(spec, n, seed, name):
    """Key/value description of a generated dataset for the metadata sidecar."""
    meta = {"generator": name, "n": n, "seed": seed}
    if isinstance(spec, GaussianMixtureSpec):
        meta.update(K=spec.n_classes, D=spec.ambient_dim)
    else:
        meta.update(
            K=spec.n_classes,
            D=spec.ambient_dim,
            d=spec.intrinsic_dim,
            M=spec.radius,
            min_angle=spec.min_angle,
            angle_kind=spec.angle_kind,
        )
        if spec.alpha is not None:
            meta["alpha"] = spec.alpha
        else:
            meta["noise_sigma"] = spec.noise_sigma
    return meta
