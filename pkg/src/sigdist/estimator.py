"""Monte Carlo CDF of density values: the machinery that turns a significance
level into a density threshold and a feature vector into a significance-level
score.

The estimator stores the sorted log-densities of n model samples. Evaluating
the empirical CDF at a query log-density is a binary search (counting entries
<= query, i.e. ties count), so a score costs O(log n) after the O(n log n)
build. The worst-case root-mean-square error of the estimated CDF is
1 / sqrt(4 n) at every level, independent of the model and its dimension.

Estimators are immutable after the build and safe to share across concurrent
scorers. Parallel builds must use distinct seeds.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import jsonio
from .errors import InvalidParameter, NonFiniteInput, NumericError, SchemaError
from .models import DensityModel, model_from_dict

SCHEMA_VERSION = 1

#: Default worst-case RMSE budget for the estimated CDF (gives n = 10000).
DEFAULT_RMSE_BUDGET = 0.005

#: Largest sample count the command-line front end will build.
MAX_SAMPLE_COUNT = 10**8


def required_sample_count(rmse: float) -> int:
    """Smallest sample count whose worst-case RMSE is within budget.

    ``n = ceil(1 / (2 rmse)^2)``: the error of the empirical CDF at level F is
    sqrt(F (1-F) / n) <= 1 / sqrt(4 n), so this n is sufficient at every level.
    """
    if not (0.0 < rmse <= 0.5) or not math.isfinite(rmse):
        raise InvalidParameter(f"rmse budget must lie in (0, 0.5], got {rmse!r}")
    return math.ceil(1.0 / (4.0 * rmse * rmse))


def theoretical_rmse(level: float, n: int) -> float:
    """Root-mean-square error sqrt(level * (1 - level) / n) of the empirical
    CDF at a given true CDF level."""
    if not (0.0 <= level <= 1.0):
        raise InvalidParameter(f"level must lie in [0, 1], got {level!r}")
    if n < 1:
        raise InvalidParameter(f"sample count must be >= 1, got {n!r}")
    return math.sqrt(level * (1.0 - level) / n)


def _check_alpha(alpha) -> float:
    alpha = float(alpha)
    if math.isnan(alpha) or not (0.0 <= alpha <= 1.0):
        raise InvalidParameter(f"significance level must lie in [0, 1], got {alpha!r}")
    return alpha


@dataclass(frozen=True)
class Threshold:
    """Density level-set threshold, kept in log units.

    Points with ``log_pdf(x) >= log_theta`` are inside the prediction region.
    ``log_theta = -inf`` (theta = 0) rejects nothing.
    """

    log_theta: float

    @property
    def theta(self) -> float:
        return math.exp(self.log_theta)


class Classification(NamedTuple):
    """Outcome of scoring one point: the significance level z and the verdict.
    A point is an outlier iff z < alpha (strictly); z == alpha is an inlier."""

    z: float
    outlier: bool

    @property
    def label(self) -> str:
        return "outlier" if self.outlier else "inlier"


class SldEstimator:
    """Empirical CDF of model density values, built from Monte Carlo samples.

    Parameters
    ----------
    sorted_log_densities : array_like, shape (n,)
        Finite log-density values in ascending order (validated).
    model : DensityModel, optional
        The generating model; required for scoring feature vectors, not for
        CDF queries on raw log-densities.
    seed
        The RNG seed the build used, kept for provenance and persistence.
    """

    def __init__(self, sorted_log_densities, model: Optional[DensityModel] = None, seed=None):
        values = np.asarray(sorted_log_densities, dtype=np.float64)
        if values.ndim != 1 or values.size < 1:
            raise InvalidParameter("estimator needs a 1-d array with at least one entry")
        if not np.isfinite(values).all():
            raise NonFiniteInput("stored log-densities must all be finite")
        if (np.diff(values) < 0).any():
            raise InvalidParameter("log-densities are not sorted ascending")
        self._values = values
        self._model = model
        self._seed = seed

    @classmethod
    def build(cls, model: DensityModel, n: int, seed) -> "SldEstimator":
        """Draw n samples from the model, map them through log_pdf, and sort.

        Deterministic for a fixed (seed, n, model) triple. Aborts if any
        sampled point has a non-finite log-density.
        """
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise InvalidParameter(f"sample count must be a positive integer, got {n!r}")
        rng = np.random.default_rng(seed)
        samples = model.sample(rng, int(n))
        log_densities = np.atleast_1d(model.log_pdf(samples))
        if not np.isfinite(log_densities).all():
            raise NumericError("model produced a non-finite log-density during the build")
        order = np.sort(log_densities)
        return cls(order, model=model, seed=seed)

    @property
    def n(self) -> int:
        return self._values.size

    @property
    def sorted_log_densities(self):
        return self._values

    @property
    def model(self) -> Optional[DensityModel]:
        return self._model

    @property
    def seed(self):
        return self._seed

    @property
    def rmse_bound(self) -> float:
        """Worst-case RMSE 1 / sqrt(4 n) of this estimator at any level."""
        return 1.0 / math.sqrt(4.0 * self.n)

    def empirical_cdf(self, log_y):
        """Fraction of stored entries <= log_y (ties count as below).

        Accepts a scalar or an array; -inf and +inf queries are allowed and
        give 0 and 1. Implemented as a binary search on the sorted array.
        """
        query = np.asarray(log_y, dtype=np.float64)
        if np.isnan(query).any():
            raise NonFiniteInput("CDF query must not be NaN")
        counts = np.searchsorted(self._values, query, side="right")
        out = counts / self.n
        return float(out) if query.ndim == 0 else out

    def significance_level_of(self, x):
        """Significance level z of a feature vector: the estimated probability
        mass of all points less likely than x under the model."""
        return self.empirical_cdf(self._require_model().log_pdf(x))

    def threshold_for(self, alpha) -> Threshold:
        """Density threshold whose sub-level set carries mass alpha.

        Returns the k-th smallest stored entry with k = ceil(alpha * n); on
        CDF plateaus this is the smallest admissible threshold, which keeps
        the prediction region maximal. alpha = 0 gives theta = 0 (nothing
        rejected); alpha = 1 gives the largest stored entry.
        """
        alpha = _check_alpha(alpha)
        k = math.ceil(alpha * self.n)
        if k == 0:
            return Threshold(-math.inf)
        return Threshold(float(self._values[k - 1]))

    def classify(self, x, alpha) -> Classification:
        """Score x and apply the strict z < alpha outlier rule.

        Batches give elementwise z and verdict arrays."""
        alpha = _check_alpha(alpha)
        z = self.significance_level_of(x)
        return Classification(z, z < alpha)

    def _require_model(self) -> DensityModel:
        if self._model is None:
            raise InvalidParameter("this estimator carries no model; scoring needs one")
        return self._model

    # ------------------------- persistence -------------------------

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "n": self.n,
            "seed": _seed_to_json(self._seed),
            "sorted_log_densities": self._values.tolist(),
            "model": self._require_model().to_dict(),
        }

    def save(self, path) -> None:
        jsonio.write_document(self.to_dict(), path)

    @classmethod
    def from_dict(cls, document: dict) -> "SldEstimator":
        if not isinstance(document, dict):
            raise SchemaError("estimator document must be a JSON object")
        schema = document.get("schema")
        if schema != SCHEMA_VERSION:
            raise SchemaError(
                f"unknown estimator schema version {schema!r}, expected {SCHEMA_VERSION}"
            )
        try:
            values = document["sorted_log_densities"]
            n = document["n"]
            model = model_from_dict(document["model"])
            seed = document.get("seed")
        except KeyError as exc:
            raise SchemaError(f"estimator document is missing field {exc}") from exc
        try:
            estimator = cls(values, model=model, seed=seed)
        except (InvalidParameter, NonFiniteInput) as exc:
            raise SchemaError(f"invalid estimator document: {exc}") from exc
        if estimator.n != n:
            raise SchemaError(f"document claims n = {n} but stores {estimator.n} entries")
        return estimator

    @classmethod
    def load(cls, path) -> "SldEstimator":
        return cls.from_dict(jsonio.read_document(path))


def build_estimator(model: DensityModel, n: int, seed) -> SldEstimator:
    """Module-level alias for :meth:`SldEstimator.build`."""
    return SldEstimator.build(model, n, seed)


def in_prediction_region(model: DensityModel, threshold: Threshold, x):
    """True where log_pdf(model, x) >= log_theta (scalar or elementwise)."""
    log_density = model.log_pdf(x)
    if np.ndim(log_density) == 0:
        return bool(log_density >= threshold.log_theta)
    return log_density >= threshold.log_theta


def _seed_to_json(seed):
    if seed is None or isinstance(seed, int):
        return seed
    if isinstance(seed, np.integer):
        return int(seed)
    if isinstance(seed, (tuple, list)):
        return [int(part) for part in seed]
    raise InvalidParameter(f"cannot persist seed of type {type(seed).__name__}")
