"""Branch discrimination and the measurement-based cat size C_delta = N / n_min."""

import math
from dataclasses import dataclass
from typing import Optional

from . import linalg
from ._validation import check_delta, check_density_matrix, check_positive_int, check_real
from .rdm import rdm_closed_form, rdm_finite_n
from .state import SuperpositionSpec

CLOSED_FORM = "closed-form"
FINITE_N = "finite-N"
MODES = (CLOSED_FORM, FINITE_N)
DEFAULT_CLOSED_FORM_NMAX = 100
# slack on P >= 1 - delta so that analytically exact thresholds are not lost to rounding
PROBABILITY_TOL = 1e-12


def success_probability(rho_a, rho_b, method="lapack"):
    """Optimal probability of telling ``rho_a`` from ``rho_b`` with equal priors.

    ``P = 1/2 + ||rho_a - rho_b||_1 / 4``, attained by projecting onto the
    positive and negative eigenspaces of ``rho_a - rho_b``.
    """
    a = check_density_matrix(rho_a, "rho_a")
    b = check_density_matrix(rho_b, "rho_b")
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    p = 0.5 + 0.25 * linalg.trace_norm(0.5 * (diff + diff.conj().T), method)
    return min(max(p, 0.5), 1.0)


def error_probability(rho_a, rho_b, method="lapack"):
    return 1.0 - success_probability(rho_a, rho_b, method)


def ghz_like_probability(epsilon_sq, n):
    """Success probability for |0>^n versus |phi>^n with |<0|phi>|^2 = 1 - epsilon_sq."""
    epsilon_sq = check_real(epsilon_sq, "epsilon_sq", 0.0, 1.0)
    n = check_positive_int(n, "n")
    return 0.5 * (1.0 + math.sqrt(max(0.0, 1.0 - (1.0 - epsilon_sq) ** n)))


def ghz_like_nmin(epsilon_sq, delta):
    """Smallest n with ``ghz_like_probability(epsilon_sq, n) >= 1 - delta``.

    Evaluates ``ceil(log(4 delta - 4 delta^2) / log(1 - epsilon_sq))`` and then
    nudges the result by one where the log ratio sits within rounding of an
    integer, so the answer agrees with a direct scan.
    """
    epsilon_sq = check_real(epsilon_sq, "epsilon_sq", 0.0, 1.0, low_open=True)
    delta = check_delta(delta)
    if epsilon_sq == 1.0:
        return 1
    ratio = math.log(4.0 * delta - 4.0 * delta**2) / math.log1p(-epsilon_sq)
    n = max(1, math.ceil(ratio))
    target = 1.0 - delta - PROBABILITY_TOL
    while n > 1 and ghz_like_probability(epsilon_sq, n - 1) >= target:
        n -= 1
    while ghz_like_probability(epsilon_sq, n) < target:
        n += 1
    return n


@dataclass(frozen=True)
class CatSizeResult:
    """Outcome of an n_min search.

    ``probability_trace`` lists every ``(n, P)`` probed. ``n_min`` is ``None``
    when the scan ran out before reaching ``1 - delta``; the cat size is then 0.
    """

    delta: float
    n_particles: int
    n_min: Optional[int]
    probability_trace: tuple
    mode: str
    n_max: int

    @property
    def cat_size(self):
        return 0.0 if self.n_min is None else self.n_particles / self.n_min

    @property
    def relative_size(self):
        return 0.0 if self.n_min is None else 1.0 / self.n_min

    @property
    def error_trace(self):
        return tuple((n, 1.0 - p) for n, p in self.probability_trace)


def _rdm_family(spec, mode):
    if mode == CLOSED_FORM:
        return lambda n: rdm_closed_form(spec.spread, n)
    if mode == FINITE_N:
        return lambda n: rdm_finite_n(spec, n)
    raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def _resolve_n_max(spec, mode, n_max):
    if n_max is None:
        n_max = DEFAULT_CLOSED_FORM_NMAX if mode == CLOSED_FORM else spec.n_particles
    n_max = check_positive_int(n_max, "n_max")
    if mode == FINITE_N and n_max > spec.n_particles:
        raise ValueError(f"n_max={n_max} exceeds N={spec.n_particles} in finite-N mode")
    return n_max


def cat_sizes(spec, deltas, mode=CLOSED_FORM, n_max=None, method="lapack"):
    """Cat sizes for several precisions from one linear scan over n.

    Returns a dict ``{delta: CatSizeResult}``. Each result's trace is cut at
    its own ``n_min`` (or carries the whole scan if undefined).
    """
    if not isinstance(spec, SuperpositionSpec):
        raise TypeError("spec must be a SuperpositionSpec")
    deltas = [check_delta(d) for d in deltas]
    if not deltas:
        raise ValueError("at least one delta is required")
    n_max = _resolve_n_max(spec, mode, n_max)
    family = _rdm_family(spec, mode)
    goal = 1.0 - min(deltas) - PROBABILITY_TOL

    trace = []
    for n in range(1, n_max + 1):
        rdms = family(n)
        p = success_probability(rdms.rho_a, rdms.rho_b, method)
        trace.append((n, p))
        if p >= goal:
            break

    results = {}
    for delta in deltas:
        n_min = next((n for n, p in trace if p >= 1.0 - delta - PROBABILITY_TOL), None)
        cut = trace if n_min is None else trace[:n_min]
        results[delta] = CatSizeResult(delta, spec.n_particles, n_min, tuple(cut), mode, n_max)
    return results


def cat_size(spec, delta, mode=CLOSED_FORM, n_max=None, method="lapack"):
    """Measurement-based cat size ``C_delta = N / n_min`` of a two-branch state.

    Parameters
    ----------
    spec : SuperpositionSpec
    delta : float
        Required error, ``0 < delta < 1/2``. There is no default on purpose.
    mode : {'closed-form', 'finite-N'}
        Which n-RDMs to use. Closed form ignores N except in ``C = N / n_min``
        and scans to ``n_max`` (default 100); finite-N scans to ``n_max``
        (default N).
    n_max : int, optional

    Returns
    -------
    CatSizeResult
    """
    return cat_sizes(spec, [delta], mode, n_max, method)[check_delta(delta)]


def error_probability_curve(spec, ns, mode=CLOSED_FORM, method="lapack"):
    """``[(n, P_E(n))]`` for the given n values, without early stopping."""
    family = _rdm_family(spec, mode)
    out = []
    for n in ns:
        rdms = family(n)
        out.append((n, 1.0 - success_probability(rdms.rho_a, rdms.rho_b, method)))
    return out


def single_particle_epsilon_sq(theta0):
    """epsilon^2 = 1 - |<phi_A|phi_B>|^2 = cos^2(2 theta0) for the single-particle branch states."""
    return math.cos(2.0 * theta0) ** 2


def theta0_for_epsilon_sq(epsilon_sq):
    """Angle in [0, pi/4] whose single-particle branch states have the given epsilon^2."""
    epsilon_sq = check_real(epsilon_sq, "epsilon_sq", 0.0, 1.0)
    return 0.5 * math.acos(math.sqrt(epsilon_sq))


__all__ = [
    "CLOSED_FORM",
    "FINITE_N",
    "CatSizeResult",
    "cat_size",
    "cat_sizes",
    "error_probability",
    "error_probability_curve",
    "ghz_like_nmin",
    "ghz_like_probability",
    "single_particle_epsilon_sq",
    "success_probability",
    "theta0_for_epsilon_sq",
]
