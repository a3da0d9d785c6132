"""Least-squares grid fit of (theta0, sigma) to a particle-number distribution.

Model distributions are tabulated once per grid (and cached), then the
target is compared against every cell. Only probabilities are fitted; the
phases of the state are not constrained by a number distribution.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_positive_int, check_probability_vector, check_real
from .distinguish import FINITE_N, cat_sizes
from .state import NumberDistribution, SuperpositionSpec, number_distribution

DEFAULT_THETA0_STEP = 0.01 * math.pi
DEFAULT_SIGMA_STEP = 0.005 * math.pi
DEFAULT_SIGMA_MAX = 0.05 * math.pi
THETA0_MAX = 0.25 * math.pi
NORMALIZATION_ATOL = 1e-6
# relative slack when deciding whether a grid axis reaches its upper end
_GRID_SLACK = 1e-9


@dataclass(frozen=True)
class FitGrid:
    """Search grid ``theta0 = i * theta0_step`` in [0, pi/4], ``sigma = j * sigma_step`` in [0, sigma_max]."""

    theta0_step: float = DEFAULT_THETA0_STEP
    sigma_step: float = DEFAULT_SIGMA_STEP
    sigma_max: float = DEFAULT_SIGMA_MAX

    def __post_init__(self):
        check_real(self.theta0_step, "theta0_step", 0.0, THETA0_MAX, low_open=True)
        check_real(self.sigma_step, "sigma_step", 0.0, low_open=True)
        check_real(self.sigma_max, "sigma_max", 0.0, 0.5 * math.pi)

    @staticmethod
    def _axis(step, top):
        return np.arange(int(math.floor(top / step * (1.0 + _GRID_SLACK))) + 1) * step

    @property
    def theta0_values(self):
        return self._axis(self.theta0_step, THETA0_MAX)

    @property
    def sigma_values(self):
        return self._axis(self.sigma_step, self.sigma_max)

    def refined(self, factor=2):
        return FitGrid(self.theta0_step / factor, self.sigma_step / factor, self.sigma_max)


@lru_cache(maxsize=16)
def _model_table(n_particles, grid):
    """Array ``[i, j, k]`` of model probabilities on the grid (read-only, cached)."""
    thetas = grid.theta0_values
    sigmas = grid.sigma_values
    table = np.empty((thetas.size, sigmas.size, n_particles + 1))
    for i, t in enumerate(thetas):
        for j, s in enumerate(sigmas):
            table[i, j] = number_distribution(SuperpositionSpec.from_angles(n_particles, t, s)).probs
    table.setflags(write=False)
    return table


@dataclass(frozen=True)
class FitResult:
    theta0: float
    sigma: float
    residual: float
    grid_resolution: tuple
    cat_sizes: dict = field(default_factory=dict)
    n_particles: int = 0


def _prepare_target(target, n_particles):
    probs = target.probs if isinstance(target, NumberDistribution) else target
    probs = check_probability_vector(probs, "target", atol=NORMALIZATION_ATOL, renormalize=True)
    if n_particles is None:
        n_particles = probs.size - 1
    n_particles = check_positive_int(n_particles, "N")
    if probs.size != n_particles + 1:
        raise ValueError(f"target has {probs.size} entries, expected N+1 = {n_particles + 1}")
    return probs, n_particles


def residual_surface(target, n_particles=None, grid=None):
    """Sum of squared differences for every grid cell, shape ``(n_theta0, n_sigma)``."""
    grid = grid or FitGrid()
    probs, n_particles = _prepare_target(target, n_particles)
    table = _model_table(n_particles, grid)
    return np.sum((table - probs) ** 2, axis=-1)


def fit_number_distribution(target, n_particles=None, grid=None, deltas=(), mode=FINITE_N):
    """Exhaustive least-squares fit of the spread parameters.

    Parameters
    ----------
    target : NumberDistribution or array_like
        N + 1 probabilities; renormalised if the sum is within 1e-6 of 1.
    n_particles : int, optional
        Checked against ``len(target) - 1``.
    grid : FitGrid, optional
        Defaults to steps 0.01 pi in theta0 and 0.005 pi in sigma.
    deltas : sequence of float
        Precisions for which the fitted state's cat size is reported.
    mode : {'finite-N', 'closed-form'}
        RDM family used for those cat sizes.

    Returns
    -------
    FitResult
        Ties in the residual go to the smaller sigma, then the smaller theta0.
    """
    grid = grid or FitGrid()
    surface = residual_surface(target, n_particles, grid)
    n_particles = len(target) - 1 if n_particles is None else n_particles
    best = surface.min()
    # exact ties only; the ordering is independent of evaluation order
    cand = np.argwhere(surface == best)
    i, j = min(cand, key=lambda ij: (ij[1], ij[0]))
    theta0 = float(grid.theta0_values[i])
    sigma = float(grid.sigma_values[j])
    sizes = {}
    if deltas:
        spec = SuperpositionSpec.from_angles(n_particles, theta0, sigma)
        sizes = {d: r.cat_size for d, r in cat_sizes(spec, deltas, mode).items()}
    return FitResult(theta0, sigma, float(best), (grid.theta0_step, grid.sigma_step), sizes, n_particles)


class SpreadFitter(BaseEstimator):
    """Estimator wrapper around :func:`fit_number_distribution`.

    ``fit(X)`` takes one number distribution (length N + 1); ``predict``
    returns the fitted model's distribution and ``score`` the negative
    residual against a distribution.

    Examples
    --------
    >>> from catsize.state import SuperpositionSpec, number_distribution
    >>> target = number_distribution(SuperpositionSpec.from_angles(20, 0, 0))
    >>> SpreadFitter().fit(target.probs).theta0_
    0.0
    """

    def __init__(self, theta0_step=DEFAULT_THETA0_STEP, sigma_step=DEFAULT_SIGMA_STEP,
                 sigma_max=DEFAULT_SIGMA_MAX, deltas=(), mode=FINITE_N):
        self.theta0_step = theta0_step
        self.sigma_step = sigma_step
        self.sigma_max = sigma_max
        self.deltas = deltas
        self.mode = mode

    def _grid(self):
        return FitGrid(self.theta0_step, self.sigma_step, self.sigma_max)

    def fit(self, X, y=None):
        probs = np.asarray(X, dtype=float).ravel()
        self.result_ = fit_number_distribution(probs, None, self._grid(), tuple(self.deltas), self.mode)
        self.theta0_ = self.result_.theta0
        self.sigma_ = self.result_.sigma
        self.residual_ = self.result_.residual
        self.n_particles_ = probs.size - 1
        return self

    def _check_fitted(self):
        if not hasattr(self, "result_"):
            raise AttributeError("SpreadFitter is not fitted yet; call fit first")

    def predict(self, X=None):
        self._check_fitted()
        spec = SuperpositionSpec.from_angles(self.n_particles_, self.theta0_, self.sigma_)
        return number_distribution(spec).probs.copy()

    def score(self, X, y=None):
        self._check_fitted()
        probs, _ = _prepare_target(np.asarray(X, dtype=float).ravel(), self.n_particles_)
        return -float(np.sum((self.predict() - probs) ** 2))


__all__ = [
    "FitGrid",
    "FitResult",
    "SpreadFitter",
    "fit_number_distribution",
    "residual_surface",
]
