"""Validation experiment: empirical vs. theoretical RMSE of the estimated CDF.

For each sample count n the experiment rebuilds the estimator many times,
evaluates it at query points whose true CDF level is known, and compares the
root-mean-square deviation against sqrt(level * (1 - level) / n). Ground truth
comes either from the Gaussian closed form or from an oversized reference
estimator (useful in dimensions without a closed form; its own worst-case
error 1 / sqrt(4 n_ref) must be covered by the caller's tolerance).

Determinism: the build for repetition r at sample count n is seeded with the
entropy tuple ``(seed, n, r)`` (hashed through numpy's SeedSequence), so runs
are reproducible and repetitions are independent and order-free.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .analytic import gaussian_sld, gaussian_threshold
from .errors import InvalidParameter, SchemaError
from .estimator import SldEstimator, theoretical_rmse
from .jsonio import format_float
from .models import DensityModel, GaussianModel

DEFAULT_N_VALUES = (16, 64, 256, 1024, 4096)
DEFAULT_EVAL_ALPHAS = (0.05, 0.5)
DEFAULT_REPETITIONS = 500


@dataclass(frozen=True)
class RmseExperimentConfig:
    """Grid of sample counts and CDF levels plus the repetition budget."""

    n_values: Tuple[int, ...] = DEFAULT_N_VALUES
    repetitions: int = DEFAULT_REPETITIONS
    eval_alphas: Tuple[float, ...] = DEFAULT_EVAL_ALPHAS
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "eval_alphas", tuple(float(a) for a in self.eval_alphas))
        if len(self.n_values) < 1 or any(n < 1 for n in self.n_values):
            raise InvalidParameter("n_values must be a nonempty sequence of integers >= 1")
        if int(self.repetitions) < 1:
            raise InvalidParameter("repetitions must be >= 1")
        object.__setattr__(self, "repetitions", int(self.repetitions))
        if len(self.eval_alphas) < 1 or any(not 0.0 < a < 1.0 for a in self.eval_alphas):
            raise InvalidParameter("eval_alphas must be levels strictly inside (0, 1)")
        object.__setattr__(self, "seed", int(self.seed))

    @classmethod
    def from_dict(cls, document: dict) -> "RmseExperimentConfig":
        if not isinstance(document, dict):
            raise SchemaError("experiment config must be a JSON object")
        unknown = set(document) - {"n_values", "repetitions", "eval_alphas", "seed"}
        if unknown:
            raise SchemaError(f"unknown config fields: {sorted(unknown)}")
        try:
            return cls(**document)
        except (InvalidParameter, TypeError, ValueError) as exc:
            raise SchemaError(f"invalid experiment config: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "n_values": list(self.n_values),
            "repetitions": self.repetitions,
            "eval_alphas": list(self.eval_alphas),
            "seed": self.seed,
        }


@dataclass(frozen=True)
class RmseCell:
    """One (n, level) grid point of the experiment."""

    n: int
    level: float
    empirical_rmse: float
    theoretical_rmse: float

    @property
    def relative_deviation(self) -> float:
        return (self.empirical_rmse - self.theoretical_rmse) / self.theoretical_rmse


@dataclass(frozen=True)
class RmseExperimentResult:
    cells: Tuple[RmseCell, ...]

    @property
    def max_relative_deviation(self) -> float:
        return max(abs(cell.relative_deviation) for cell in self.cells)

    def within(self, relative_tolerance: float) -> bool:
        return all(
            abs(cell.relative_deviation) <= relative_tolerance for cell in self.cells
        )


class GaussianTruth:
    """Closed-form ground truth for a centered 1-d Gaussian."""

    def __init__(self, sigma: float = 1.0):
        self.sigma = float(sigma)
        self.model = GaussianModel([0.0], [[self.sigma**2]])

    def level_query(self, level: float) -> Tuple[float, float]:
        """Query log-density whose true CDF level is exactly `level`."""
        return gaussian_threshold(self.sigma, level).log_theta, level

    def curve(self, x):
        return gaussian_sld(self.sigma, x)


class ReferenceTruth:
    """Ground truth taken from a much larger reference estimator."""

    def __init__(self, reference: SldEstimator):
        self.reference = reference

    @classmethod
    def build(cls, model: DensityModel, n_ref: int, seed) -> "ReferenceTruth":
        return cls(SldEstimator.build(model, n_ref, seed))

    def level_query(self, level: float) -> Tuple[float, float]:
        log_y = self.reference.threshold_for(level).log_theta
        return log_y, self.reference.empirical_cdf(log_y)


def run_rmse_experiment(
    config: RmseExperimentConfig,
    model: Optional[DensityModel] = None,
    truth=None,
) -> RmseExperimentResult:
    """Average squared deviations between estimated and true CDF levels.

    With no model the experiment runs on the standard 1-d Gaussian against its
    closed form. A custom model needs a matching ``truth`` provider exposing
    ``level_query(level) -> (query_log_density, true_level)``.
    """
    if model is None:
        gaussian = GaussianTruth(1.0)
        model = gaussian.model
        truth = truth if truth is not None else gaussian
    elif truth is None:
        raise InvalidParameter("a custom model needs an explicit ground-truth provider")

    queries = [truth.level_query(level) for level in config.eval_alphas]
    query_logs = np.array([q[0] for q in queries])
    true_levels = np.array([q[1] for q in queries])

    cells = []
    for n in config.n_values:
        sum_sq = np.zeros(len(queries))
        for rep in range(config.repetitions):
            est = SldEstimator.build(model, n, (config.seed, n, rep))
            errors = est.empirical_cdf(query_logs) - true_levels
            sum_sq += errors * errors
        empirical = np.sqrt(sum_sq / config.repetitions)
        for level, emp in zip(config.eval_alphas, empirical):
            cells.append(
                RmseCell(
                    n=n,
                    level=level,
                    empirical_rmse=float(emp),
                    theoretical_rmse=theoretical_rmse(level, n),
                )
            )
    return RmseExperimentResult(cells=tuple(cells))


def export_plot_data(result: RmseExperimentResult, path) -> None:
    """Write the result grid as TSV: n, level, empirical_rmse, theoretical_rmse.

    Floats are rendered with 17 significant digits so a re-read round-trips
    exactly. An empty result is an error and writes nothing.
    """
    if not result.cells:
        raise InvalidParameter("experiment result is empty; nothing to export")
    lines = ["n\tlevel\tempirical_rmse\ttheoretical_rmse"]
    for cell in result.cells:
        lines.append(
            "\t".join(
                (
                    str(cell.n),
                    format_float(cell.level),
                    format_float(cell.empirical_rmse),
                    format_float(cell.theoretical_rmse),
                )
            )
        )
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")
