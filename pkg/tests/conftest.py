import numpy as np
import pytest

from sigdist import GaussianModel, MixtureModel, fit_kde
from sigdist.models import DensityModel


@pytest.fixture
def std_gaussian_1d():
    return GaussianModel([0.0], [[1.0]])


@pytest.fixture
def gaussian_2d():
    return GaussianModel([1.0, -2.0], [[2.0, 0.6], [0.6, 1.5]])


@pytest.fixture
def mixture_2d():
    return MixtureModel(
        [0.6, 0.4],
        [
            GaussianModel([-2.0, 0.0], [[1.0, 0.3], [0.3, 1.2]]),
            GaussianModel([3.0, 1.0], [[0.8, -0.2], [-0.2, 0.5]]),
        ],
    )


@pytest.fixture
def kde_1d():
    rng = np.random.default_rng(11)
    return fit_kde(rng.normal(size=(30, 1)))


class StubModel(DensityModel):
    """Density stand-in whose log_pdf is the first coordinate, verbatim.

    Lets contract tests place a query exactly on a stored entry."""

    def __init__(self, dim=1):
        self._dim = dim

    def log_pdf(self, x):
        points = np.asarray(x, dtype=np.float64)
        if points.ndim == 1:
            return float(points[0])
        return points[:, 0].copy()

    def sample(self, rng, count):
        raise NotImplementedError("stub model cannot sample")


@pytest.fixture
def stub_model():
    return StubModel()
