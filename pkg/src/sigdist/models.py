"""Density models: evaluation, sampling, KDE fitting, and JSON persistence.

Every model evaluates its density in log space. Significance-level scoring
only needs the *ordering* of density values, and log densities preserve that
ordering while staying finite in high dimension where raw densities underflow.

Models are immutable after construction and safe to share across concurrent
readers; sampling takes an externally supplied ``numpy.random.Generator`` so
concurrent callers can use independent seeded streams.
"""

import math

import numpy as np
from scipy.linalg import solve_triangular

from . import backend
from .errors import (
    DimensionMismatch,
    FactorizationError,
    InvalidParameter,
    NonFiniteInput,
    SchemaError,
    TooFewPoints,
    ZeroVariance,
)

SCHEMA_VERSION = 1

_LOG_2PI = math.log(2.0 * math.pi)


def as_points(x, dim=None, name="x"):
    """Validate feature vectors and return them as a float64 matrix.

    Parameters
    ----------
    x : array_like
        A single point of shape ``(d,)`` or a batch of shape ``(m, d)``.
    dim : int, optional
        Required dimensionality; mismatches raise ``DimensionMismatch``.
    name : str
        Label used in error messages.

    Returns
    -------
    (points, single) : (ndarray of shape (m, d), bool)
        ``single`` is True when the input was a lone point.
    """
    points = np.asarray(x, dtype=np.float64)
    single = points.ndim == 1
    if single:
        points = points[None, :]
    if points.ndim != 2:
        raise DimensionMismatch(f"{name} must be a point (d,) or a batch (m, d), got shape {np.shape(x)}")
    if points.shape[1] < 1:
        raise DimensionMismatch(f"{name} must have at least one coordinate")
    if dim is not None and points.shape[1] != dim:
        raise DimensionMismatch(f"{name} has dimension {points.shape[1]}, model expects {dim}")
    if not np.isfinite(points).all():
        raise NonFiniteInput(f"{name} contains NaN or infinite coordinates")
    return np.ascontiguousarray(points), single


class DensityModel:
    """Common behavior shared by all density models."""

    _dim: int

    @property
    def dim(self) -> int:
        """Dimensionality of the feature space."""
        return self._dim

    def log_pdf(self, x):
        raise NotImplementedError

    def pdf(self, x):
        """Density value exp(log_pdf). May underflow to 0 for extreme points;
        callers that need the ordering of density values must use log_pdf."""
        return np.exp(self.log_pdf(x))

    def sample(self, rng, count):
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def save(self, path) -> None:
        from . import jsonio

        jsonio.write_document(self.to_dict(), path)


def _check_count(count):
    if not isinstance(count, (int, np.integer)) or count < 1:
        raise InvalidParameter(f"sample count must be a positive integer, got {count!r}")
    return int(count)


class GaussianModel(DensityModel):
    """Multivariate normal density with a cached Cholesky factorization.

    Parameters
    ----------
    mean : array_like, shape (d,)
    covariance : array_like, shape (d, d)
        Must be symmetric (within 1e-12 relative tolerance) and positive
        definite; the factorization is attempted at construction time and
        failure raises ``FactorizationError`` immediately.
    """

    def __init__(self, mean, covariance):
        mean = np.asarray(mean, dtype=np.float64).reshape(-1)
        if mean.size < 1:
            raise DimensionMismatch("mean must have at least one coordinate")
        if not np.isfinite(mean).all():
            raise NonFiniteInput("mean contains non-finite values")
        d = mean.size
        cov = np.asarray(covariance, dtype=np.float64)
        if cov.shape != (d, d):
            raise DimensionMismatch(f"covariance must have shape ({d}, {d}), got {cov.shape}")
        if not np.isfinite(cov).all():
            raise NonFiniteInput("covariance contains non-finite values")
        scale = np.abs(cov).max()
        if scale == 0.0 or np.abs(cov - cov.T).max() > 1e-12 * scale:
            raise FactorizationError("covariance matrix is not symmetric")
        try:
            chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise FactorizationError(f"covariance matrix is not positive definite: {exc}") from exc

        self._dim = d
        self._mean = mean
        self._cov = cov
        self._chol = chol
        self._chol_inv = np.ascontiguousarray(
            solve_triangular(chol, np.eye(d), lower=True)
        )
        # -(d/2) log(2 pi) - log det(L)
        self._log_norm = -0.5 * d * _LOG_2PI - float(np.log(np.diag(chol)).sum())

    @property
    def mean(self):
        return self._mean

    @property
    def covariance(self):
        return self._cov

    def log_pdf(self, x):
        points, single = as_points(x, self._dim)
        z = (points - self._mean) @ self._chol_inv.T
        out = self._log_norm - 0.5 * np.einsum("ij,ij->i", z, z)
        return float(out[0]) if single else out

    def sample(self, rng, count):
        count = _check_count(count)
        noise = rng.standard_normal((count, self._dim))
        return noise @ self._chol.T + self._mean

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "kind": "gaussian",
            "mean": self._mean.tolist(),
            "covariance": self._cov.tolist(),
        }


class MixtureModel(DensityModel):
    """Finite mixture of Gaussian components.

    Weights must be nonnegative and sum to 1 within 1e-9; they are renormalized
    exactly after that check. Components must share one dimensionality.
    Log-density is computed with a log-sum-exp over components for stability.
    """

    def __init__(self, weights, components):
        weights = np.asarray(weights, dtype=np.float64).reshape(-1)
        if len(components) < 1 or weights.size != len(components):
            raise InvalidParameter(
                f"got {weights.size} weights for {len(components)} components"
            )
        if not np.isfinite(weights).all() or (weights < 0).any():
            raise InvalidParameter("mixture weights must be finite and nonnegative")
        if abs(weights.sum() - 1.0) > 1e-9:
            raise InvalidParameter(f"mixture weights sum to {weights.sum()!r}, expected 1")
        for component in components:
            if not isinstance(component, GaussianModel):
                raise InvalidParameter("mixture components must be GaussianModel instances")
        d = components[0].dim
        for component in components[1:]:
            if component.dim != d:
                raise DimensionMismatch("mixture components have differing dimensions")

        self._dim = d
        self._weights = weights / weights.sum()
        self._components = tuple(components)
        self._means = np.ascontiguousarray([c.mean for c in components])
        self._chol_invs = np.ascontiguousarray([c._chol_inv for c in components])
        with np.errstate(divide="ignore"):
            log_w = np.log(self._weights)
        self._log_weight_norms = np.ascontiguousarray(
            log_w + np.array([c._log_norm for c in components])
        )

    @property
    def weights(self):
        return self._weights

    @property
    def components(self):
        return self._components

    def log_pdf(self, x):
        points, single = as_points(x, self._dim)
        out = backend.mixture_log_density(
            points, self._means, self._chol_invs, self._log_weight_norms
        )
        return float(out[0]) if single else out

    def sample(self, rng, count):
        count = _check_count(count)
        picks = rng.choice(len(self._components), size=count, p=self._weights)
        out = np.empty((count, self._dim))
        for j, component in enumerate(self._components):
            idx = np.where(picks == j)[0]
            if idx.size:
                out[idx] = component.sample(rng, idx.size)
        return out

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "kind": "mixture",
            "weights": self._weights.tolist(),
            "components": [
                {"mean": c.mean.tolist(), "covariance": c.covariance.tolist()}
                for c in self._components
            ],
        }


class KdeModel(DensityModel):
    """Gaussian product-kernel density estimate over stored training points.

    Parameters
    ----------
    points : array_like, shape (m, d)
        Training points (m >= 1).
    bandwidths : float or array_like, shape (d,)
        Per-dimension kernel scales, all > 0. A scalar applies to every
        dimension.
    """

    def __init__(self, points, bandwidths):
        train, _ = as_points(points, name="training points")
        m, d = train.shape
        if m < 1:
            raise TooFewPoints("KDE needs at least 1 training point")
        bw = np.asarray(bandwidths, dtype=np.float64)
        if bw.ndim == 0:
            bw = np.full(d, float(bw))
        if bw.shape != (d,):
            raise DimensionMismatch(f"bandwidths must be scalar or shape ({d},), got {bw.shape}")
        if not np.isfinite(bw).all() or (bw <= 0).any():
            raise InvalidParameter("bandwidths must be finite and > 0")

        self._dim = d
        self._train = train
        self._bandwidths = bw
        self._inv_bw = np.ascontiguousarray(1.0 / bw)
        # -log m - sum log h - (d/2) log(2 pi), shared by every kernel
        self._log_norm = -math.log(m) - float(np.log(bw).sum()) - 0.5 * d * _LOG_2PI

    @property
    def training_points(self):
        return self._train

    @property
    def bandwidths(self):
        return self._bandwidths

    def log_pdf(self, x):
        points, single = as_points(x, self._dim)
        out = backend.kde_log_density(points, self._train, self._inv_bw, self._log_norm)
        return float(out[0]) if single else out

    def sample(self, rng, count):
        # every kernel carries weight 1/m, so the anchor draw is uniform
        count = _check_count(count)
        idx = rng.integers(0, self._train.shape[0], size=count)
        noise = rng.standard_normal((count, self._dim)) * self._bandwidths
        return self._train[idx] + noise

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "kind": "kde",
            "points": self._train.tolist(),
            "bandwidths": self._bandwidths.tolist(),
        }


def fit_kde(data, bandwidths=None) -> KdeModel:
    """Fit a Gaussian KDE with per-dimension Silverman bandwidths.

    The rule is ``h_j = 1.06 * stddev_j * m**(-1/5)`` with the sample standard
    deviation (ddof=1). Explicit ``bandwidths`` override the rule entirely.

    Raises
    ------
    TooFewPoints
        Fewer than 2 data points.
    ZeroVariance
        Some dimension has no spread and no explicit bandwidth was given.
    """
    points, _ = as_points(data, name="data")
    m = points.shape[0]
    if m < 2:
        raise TooFewPoints(f"KDE fit needs at least 2 points, got {m}")
    if bandwidths is not None:
        return KdeModel(points, bandwidths)
    stddev = points.std(axis=0, ddof=1)
    flat = np.where(stddev == 0)[0]
    if flat.size:
        raise ZeroVariance(
            f"dimension {flat[0]} has zero spread; supply an explicit bandwidth"
        )
    return KdeModel(points, 1.06 * stddev * m ** (-1.0 / 5.0))


_KINDS = {"gaussian", "mixture", "kde"}


def model_from_dict(document: dict) -> DensityModel:
    """Rebuild a model from its JSON document; rejects unknown schemas/kinds."""
    if not isinstance(document, dict):
        raise SchemaError("model document must be a JSON object")
    schema = document.get("schema")
    if schema != SCHEMA_VERSION:
        raise SchemaError(f"unknown model schema version {schema!r}, expected {SCHEMA_VERSION}")
    kind = document.get("kind")
    if kind not in _KINDS:
        raise SchemaError(f"unknown model kind {kind!r}")
    try:
        if kind == "gaussian":
            return GaussianModel(document["mean"], document["covariance"])
        if kind == "mixture":
            components = [
                GaussianModel(entry["mean"], entry["covariance"])
                for entry in document["components"]
            ]
            return MixtureModel(document["weights"], components)
        return KdeModel(document["points"], document["bandwidths"])
    except KeyError as exc:
        raise SchemaError(f"model document is missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"malformed model document: {exc}") from exc


def load_model(path) -> DensityModel:
    from . import jsonio

    return model_from_dict(jsonio.read_document(path))
