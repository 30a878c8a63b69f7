"""Closed-form significance level distributions for families that admit one.

These serve as ground truth for tests and experiments. The Gaussian form is
exact; the Cauchy form follows from the fact that its density is strictly
decreasing in |x|, so the mass of less-likely points is the two-tail mass:

    b(x) = 1 - (2 / pi) * arctan(|x| / gamma)

The test suite verifies this expression against a quadrature oracle of the
level-set mass before anything relies on it.
"""

import math

import numpy as np
from scipy.special import erf, erfinv

from .errors import InvalidParameter
from .estimator import Threshold

_SQRT2 = math.sqrt(2.0)


def _check_scale(value, name):
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise InvalidParameter(f"{name} must be finite and > 0, got {value!r}")
    return value


def gaussian_sld(sigma, x):
    """Significance level of x under a centered 1-d Gaussian with scale sigma:
    ``1 - erf(|x| / (sqrt(2) sigma))``. Scalar or elementwise."""
    sigma = _check_scale(sigma, "sigma")
    out = 1.0 - erf(np.abs(x) / (_SQRT2 * sigma))
    return float(out) if np.ndim(x) == 0 else out


def cauchy_sld(gamma, x):
    """Significance level of x under a centered Cauchy with scale gamma:
    ``1 - (2 / pi) * arctan(|x| / gamma)``. Scalar or elementwise."""
    gamma = _check_scale(gamma, "gamma")
    out = 1.0 - (2.0 / math.pi) * np.arctan(np.abs(x) / gamma)
    return float(out) if np.ndim(x) == 0 else out


def gaussian_region_halfwidth(sigma, alpha) -> float:
    """Half-width x_a of the centered Gaussian prediction region at level
    alpha: the point with significance level exactly alpha, so the region
    [-x_a, x_a] carries mass 1 - alpha."""
    sigma = _check_scale(sigma, "sigma")
    if not (0.0 < alpha < 1.0):
        raise InvalidParameter(f"alpha must lie strictly in (0, 1), got {alpha!r}")
    return _SQRT2 * sigma * float(erfinv(1.0 - alpha))


def gaussian_threshold(sigma, alpha) -> Threshold:
    """Density threshold for a centered 1-d Gaussian at significance level
    alpha: the pdf value at the region half-width. alpha in {0, 1} is a
    boundary error; those limits (theta -> 0 and theta -> peak) are the
    caller's convention."""
    sigma = _check_scale(sigma, "sigma")
    x_alpha = gaussian_region_halfwidth(sigma, alpha)
    log_theta = -math.log(math.sqrt(2.0 * math.pi) * sigma) - 0.5 * (x_alpha / sigma) ** 2
    return Threshold(log_theta)
