"""Two-branch, two-mode bosonic superposition states.

A state in this family is

    |Psi> ~ integral dtheta f(theta) [ (cos t a+ + sin t b+)^N + (sin t a+ + cos t b+)^N ] |0>

with a Gaussian amplitude ``f`` centred on ``theta0`` with width ``sigma``.
The first term is branch A, the second branch B. Each integrand term is a
symmetric product state of N particles, so inner products between them reduce
to powers of single-particle overlaps:

    <A(t')|A(t)> = <B(t')|B(t)> = cos(t - t'),   <A(t')|B(t)> = sin(t + t').
"""

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from . import quadrature
from ._validation import check_positive_int, check_probability_vector, check_real, check_real_part

HALF_PI = 0.5 * math.pi
# amplitude tails beyond this many sigma are below double precision
TAIL_SIGMAS = 12.0
# widths below this are indistinguishable from the delta function in double precision
DELTA_SIGMA = 1e-12


@dataclass(frozen=True)
class GaussianSpread:
    """Gaussian amplitude spreading function over the mixing angle.

    ``f(theta) = (2 pi sigma^2)^(-1/4) exp(-(theta - theta0)^2 / (4 sigma^2))``
    restricted to ``[-pi/2, pi/2]`` and renormalised so that ``|f|^2``
    integrates to one there. ``sigma == 0`` (or below 1e-12) is the delta function
    ``delta(theta - theta0)`` and is always handled analytically.
    """

    theta0: float
    sigma: float

    def __post_init__(self):
        object.__setattr__(
            self, "theta0", check_real(self.theta0, "theta0", -HALF_PI - 1e-12, HALF_PI + 1e-12)
        )
        object.__setattr__(self, "sigma", check_real(self.sigma, "sigma", 0.0))

    @property
    def is_delta(self):
        return self.sigma < DELTA_SIGMA

    def support(self):
        """Interval outside which ``f`` is zero to double precision."""
        if self.is_delta:
            return self.theta0, self.theta0
        lo = max(-HALF_PI, self.theta0 - TAIL_SIGMAS * self.sigma)
        hi = min(HALF_PI, self.theta0 + TAIL_SIGMAS * self.sigma)
        return lo, hi

    def _clipped_mass(self):
        s = self.sigma * math.sqrt(2.0)
        return 0.5 * (math.erf((HALF_PI - self.theta0) / s) - math.erf((-HALF_PI - self.theta0) / s))

    def amplitude(self, theta):
        """Evaluate ``f`` at ``theta`` (zero outside ``[-pi/2, pi/2]``)."""
        if self.is_delta:
            raise ValueError("the delta-function spread has no pointwise amplitude")
        theta = np.asarray(theta, dtype=float)
        norm = (2.0 * math.pi * self.sigma**2) ** -0.25 / math.sqrt(self._clipped_mass())
        f = norm * np.exp(-((theta - self.theta0) ** 2) / (4.0 * self.sigma**2))
        return np.where(np.abs(theta) <= HALF_PI, f, 0.0)

    def start_panels(self, kernel_power=0):
        """Initial panel count resolving both ``f`` and a ``cos**kernel_power`` kernel."""
        lo, hi = self.support()
        scale = self.sigma
        if kernel_power > 0:
            scale = min(scale, 1.0 / math.sqrt(kernel_power))
        return max(2, int(math.ceil((hi - lo) / (3.0 * scale))))


@dataclass(frozen=True)
class SuperpositionSpec:
    n_particles: int
    spread: GaussianSpread

    def __post_init__(self):
        object.__setattr__(self, "n_particles", check_positive_int(self.n_particles, "n_particles"))
        if not isinstance(self.spread, GaussianSpread):
            raise TypeError("spread must be a GaussianSpread")

    @classmethod
    def from_angles(cls, n_particles, theta0, sigma):
        return cls(n_particles, GaussianSpread(theta0, sigma))


@dataclass(frozen=True)
class NumberDistribution:
    """Probabilities of finding ``k`` of the N particles in mode ``a``, k = 0..N."""

    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = check_probability_vector(self.probs, "probs")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def n_particles(self):
        return self.probs.size - 1

    def reflected(self):
        return NumberDistribution(self.probs[::-1].copy())

    def __len__(self):
        return self.probs.size


def _sqrt_binomials(n):
    k = np.arange(n + 1)
    return np.exp(0.5 * (gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)))


def _branch_gram(spec, rtol=quadrature.DEFAULT_RTOL):
    """Unnormalised <A|A>, <B|B>, <A|B> for the spec's two branches."""
    n = spec.n_particles
    spread = spec.spread
    if spread.is_delta:
        t = spread.theta0
        return 1.0 + 0j, 1.0 + 0j, complex(math.sin(2.0 * t) ** n)

    def integrand(nodes, weights):
        fw = spread.amplitude(nodes) * weights
        diff = nodes[:, None] - nodes[None, :]
        tot = nodes[:, None] + nodes[None, :]
        aa = fw @ np.cos(diff) ** n @ fw
        ab = fw @ np.sin(tot) ** n @ fw
        return np.array([aa, aa, ab], dtype=complex)

    lo, hi = spread.support()
    est, _ = quadrature.integrate(integrand, lo, hi, rtol=rtol, start_panels=spread.start_panels(n))
    return est[0], est[1], est[2]


def branch_overlap(spec):
    """Normalised overlap <Psi_A|Psi_B> / (||Psi_A|| ||Psi_B||) of the two branches.

    Computed from the double integral of ``f(t) f(t')`` against the exact
    ``cos**N(t - t')`` and ``sin**N(t + t')`` kernels.

    Raises
    ------
    quadrature.QuadratureError
        If the integral does not converge; the exception carries the estimate.
    """
    aa, bb, ab = _branch_gram(spec)
    overlap = ab / cmath.sqrt(aa * bb)
    check_real_part(overlap, "branch overlap")
    return complex(overlap)


def number_distribution(spec):
    """Distribution of the number of particles in mode ``a`` for the normalised state.

    The amplitude of ``|k, N-k>`` is proportional to
    ``sqrt(C(N, k)) * integral f(t) [cos^k t sin^(N-k) t + sin^k t cos^(N-k) t]``;
    both branches are summed before squaring, so the cross term is included.
    """
    n = spec.n_particles
    spread = spec.spread
    k = np.arange(n + 1)
    root_binom = _sqrt_binomials(n)

    def branch_sum(t):
        c, s = np.cos(t), np.sin(t)
        c = np.atleast_1d(c)[:, None]
        s = np.atleast_1d(s)[:, None]
        return c**k * s ** (n - k) + s**k * c ** (n - k)

    if spread.is_delta:
        amp = root_binom * branch_sum(spread.theta0)[0]
    else:
        def integrand(nodes, weights):
            fw = spread.amplitude(nodes) * weights
            return fw @ branch_sum(nodes)

        lo, hi = spread.support()
        # the integrand is no sharper than cos^N
        amp, _ = quadrature.integrate(integrand, lo, hi, start_panels=spread.start_panels(n))
        amp = root_binom * amp
    probs = amp**2
    total = probs.sum()
    if total <= 0.0:
        raise ValueError("state vanishes identically for these parameters")
    return NumberDistribution(probs / total)


def distillation_probability(overlap, g):
    """Probability of distilling ``|A> + g|B>`` into the balanced ``|A> + |B>``.

    Parameters
    ----------
    overlap : complex
        ``<A|B>`` for normalised branch states.
    g : complex
        Relative weight of the smaller branch, ``|g| <= 1``.

    Returns
    -------
    float
        ``(2 + <A|B> + <B|A>) |g|^2 / (1 + <A|B> g + <B|A> g* + |g|^2)``.
        The effective cat size of the unbalanced state is this times the
        balanced cat size.
    """
    overlap = complex(overlap)
    g = complex(g)
    if abs(g) > 1.0 + 1e-12:
        raise ValueError(f"|g| must be <= 1, got {abs(g)}")
    if abs(overlap) > 1.0 + 1e-12:
        raise ValueError(f"|<A|B>| must be <= 1, got {abs(overlap)}")
    num = (2.0 + overlap + overlap.conjugate()) * abs(g) ** 2
    den = 1.0 + overlap * g + overlap.conjugate() * g.conjugate() + abs(g) ** 2
    if abs(den) < 1e-14:
        raise ValueError("distillation undefined: |A> + g|B> vanishes")
    p = check_real_part(num / den, "distillation probability")
    if p < -1e-12 or p > 1.0 + 1e-12:
        # the distilling operator is not a contraction for this phase combination
        raise ValueError(f"no valid distilling measurement for overlap={overlap}, g={g} (p={p:.4g})")
    return min(max(p, 0.0), 1.0)
