"""von Neumann entropies of n-RDMs and Leggett's disconnectivity.

The disconnectivity ratio is

    beta_n = S_n / min_{1 <= m < n} (S_m + S_{n-m}),   beta_1 = 0,

and the disconnectivity ``D`` is the largest n with ``beta_n`` below a small
threshold. For permutation-symmetric states ``S_m`` depends only on ``m``, so
one entropy curve is enough.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from ._validation import TRACE_ATOL, check_hermitian, check_positive_int, check_real
from .distinguish import CLOSED_FORM, FINITE_N, MODES
from .rdm import FockOccupation, fock_rdm_diagonal, rdm_closed_form, rdm_finite_n
from .state import GaussianSpread, SuperpositionSpec

ZERO_EIGENVALUE = 1e-14
NEGATIVE_ATOL = 1e-10
# entropies below this are treated as exactly zero in beta_n
ZERO_ENTROPY = 1e-10
DEFAULT_THRESHOLD = 0.05


def _entropy_from_spectrum(lam):
    lam = np.asarray(lam, dtype=float)
    if lam.size and lam.min() < -NEGATIVE_ATOL:
        raise ValueError(f"density matrix has a negative eigenvalue {lam.min():.3e}")
    keep = lam[lam > ZERO_EIGENVALUE]
    return max(0.0, float(-np.sum(keep * np.log(keep))))


def von_neumann_entropy(rho, method="lapack"):
    """``S = -tr(rho ln rho)`` in nats.

    Eigenvalues below 1e-14 contribute nothing (``0 ln 0 = 0``); an
    eigenvalue below -1e-10 is a domain error. Diagonal input skips the
    eigensolver.
    """
    m = check_hermitian(rho, "rho", atol=1e-10)
    if abs(np.trace(m) - 1.0) > TRACE_ATOL:
        raise ValueError(f"rho must have unit trace, got {np.trace(m).real!r}")
    if np.count_nonzero(m - np.diag(np.diag(m))) == 0:
        return _entropy_from_spectrum(np.diag(m).real)
    return _entropy_from_spectrum(linalg.eigvalsh(m, method))


@dataclass(frozen=True)
class EntropyCurve:
    """``values`` is a tuple of ``(n, S_n)`` pairs in increasing n."""

    values: tuple

    def __post_init__(self):
        vals = tuple((int(n), float(s)) for n, s in self.values)
        ns = [n for n, _ in vals]
        if ns != sorted(set(ns)):
            raise ValueError("entropy curve must have strictly increasing n")
        if any(s < -NEGATIVE_ATOL for _, s in vals):
            raise ValueError("entropies must be non-negative")
        object.__setattr__(self, "values", vals)

    @property
    def ns(self):
        return np.array([n for n, _ in self.values])

    @property
    def entropies(self):
        return np.array([s for _, s in self.values])

    def __getitem__(self, n):
        for m, s in self.values:
            if m == n:
                return s
        raise KeyError(n)


def _parse_range(ns):
    if isinstance(ns, range):
        ns = list(ns)
    ns = [check_positive_int(n, "n") for n in np.atleast_1d(ns)]
    if not ns:
        raise ValueError("empty n range")
    return sorted(set(ns))


def entropy_curve(source, ns, mode=CLOSED_FORM, branch="full"):
    """Entropies ``S_n`` of the n-RDMs of a two-branch state.

    Parameters
    ----------
    source : SuperpositionSpec or GaussianSpread
        A bare spread is accepted in closed-form mode only.
    ns : iterable of int
    mode : {'closed-form', 'finite-N'}
        Closed form is the N >> n limit; use finite-N for curves reaching n ~ N.
    branch : {'full', 'a', 'b'}
        Which matrix of the :class:`BranchRdms` to use.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if branch not in ("full", "a", "b"):
        raise ValueError(f"branch must be 'full', 'a' or 'b', got {branch!r}")
    if isinstance(source, SuperpositionSpec):
        spec, spread = source, source.spread
    elif isinstance(source, GaussianSpread):
        if mode == FINITE_N:
            raise TypeError("finite-N entropies need a SuperpositionSpec (N is required)")
        spec, spread = None, source
    else:
        raise TypeError("source must be a SuperpositionSpec or GaussianSpread")

    values = []
    for n in _parse_range(ns):
        rdms = rdm_closed_form(spread, n) if mode == CLOSED_FORM else rdm_finite_n(spec, n)
        rho = rdms.full() if branch == "full" else rdms.rho_a if branch == "a" else rdms.rho_b
        values.append((n, von_neumann_entropy(rho)))
    return EntropyCurve(tuple(values))


@dataclass(frozen=True)
class DisconnectivityResult:
    betas: tuple
    threshold: float
    d_value: int


def disconnectivity_ratios(curve):
    """``[(n, beta_n)]`` for n = 1..N; the curve must cover 1..N without gaps.

    When the denominator vanishes the state splits into uncorrelated pieces
    and ``beta_n = 1``. Subadditivity forbids ``S_n > 0`` there, so that case
    is reported as an error.
    """
    if not isinstance(curve, EntropyCurve):
        raise TypeError("curve must be an EntropyCurve")
    ns = [n for n, _ in curve.values]
    if ns != list(range(1, len(ns) + 1)):
        raise ValueError("entropy curve must cover n = 1..N without gaps")
    s = [0.0] + [v for _, v in curve.values]  # s[n] = S_n
    betas = [(1, 0.0)]
    for n in range(2, len(s)):
        den = min(s[m] + s[n - m] for m in range(1, n))
        if den <= ZERO_ENTROPY:
            if s[n] > ZERO_ENTROPY:
                raise ArithmeticError(f"S_{n}={s[n]:.3e} with vanishing split entropies violates subadditivity")
            beta = 1.0
        else:
            beta = max(0.0, s[n]) / den
        betas.append((n, beta))
    return tuple(betas)


def disconnectivity(curve, threshold=DEFAULT_THRESHOLD):
    """Disconnectivity ``D = max{n : beta_n < threshold}`` of an entropy curve."""
    threshold = check_real(threshold, "threshold", 0.0, 1.0, low_open=True)
    betas = disconnectivity_ratios(curve)
    d = max(n for n, b in betas if b < threshold)
    return DisconnectivityResult(betas, threshold, d)


def fock_entropy_curve(occ):
    """``S_n`` for n = 1..N of a multi-mode Fock state (the n-RDMs are diagonal)."""
    if not isinstance(occ, FockOccupation):
        occ = FockOccupation(tuple(occ))
    values = tuple(
        (n, _entropy_from_spectrum(fock_rdm_diagonal(occ, n))) for n in range(1, occ.n_particles + 1)
    )
    return EntropyCurve(values)


def fock_disconnectivity(occ, threshold=DEFAULT_THRESHOLD):
    """Disconnectivity of a Fock state: N if two or more modes are occupied, 1 otherwise."""
    return disconnectivity(fock_entropy_curve(occ), threshold)


LN2 = math.log(2.0)

__all__ = [
    "DEFAULT_THRESHOLD",
    "DisconnectivityResult",
    "EntropyCurve",
    "LN2",
    "disconnectivity",
    "disconnectivity_ratios",
    "entropy_curve",
    "fock_disconnectivity",
    "fock_entropy_curve",
    "von_neumann_entropy",
]
