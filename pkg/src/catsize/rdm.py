"""Symmetrised n-particle reduced density matrices (n-RDMs).

Matrices are indexed in the rotated mode basis

    c+ = (a+ - i b+) / sqrt(2),    d+ = (b+ - i a+) / sqrt(2),

by ``k`` = number of c-quanta among the n measured particles, and entry
``[k, l]`` stores ``sqrt(C(n,k) C(n,l)) <Psi| c+^k d+^(n-k) c^l d^(n-l) |Psi>``
(suitably normalised). That is the transpose of ``<k|rho|l>``; it has the
same spectrum, which is all the discrimination and entropy code uses.

In this basis a single particle of branch A at angle t is
``(e^{it} c+ + i e^{-it} d+) / sqrt(2)`` and of branch B
``(i e^{-it} c+ + e^{it} d+) / sqrt(2)``.
"""

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import comb

from . import quadrature
from ._validation import PSD_ATOL, TRACE_ATOL, check_hermitian, check_positive_int
from .state import GaussianSpread, SuperpositionSpec

QUARTER_PI = 0.25 * math.pi
# relative norm below which |A> + |B> is treated as the zero vector
VANISHING_TRACE = 1e-12


@dataclass(frozen=True)
class BranchRdms:
    """n-RDMs of branch A, branch B and the full normalised state.

    ``rho_full`` is ``None`` when the superposition of the two branches
    vanishes (the branches cancel), in which case only the branch matrices
    are meaningful.
    """

    n: int
    rho_a: np.ndarray
    rho_b: np.ndarray
    rho_full: Optional[np.ndarray]

    def __post_init__(self):
        for name in ("rho_a", "rho_b", "rho_full"):
            if name == "rho_full" and self.rho_full is None:
                continue
            m = check_hermitian(getattr(self, name), name, atol=1e-10)
            if m.shape != (self.n + 1, self.n + 1):
                raise ValueError(f"{name} has shape {m.shape}, expected {(self.n + 1,) * 2}")
            if abs(np.trace(m) - 1.0) > TRACE_ATOL:
                raise ValueError(f"{name} trace {np.trace(m).real!r} != 1")
            # symmetrise away rounding so downstream eigensolvers see exact Hermitian input
            m = 0.5 * (m + m.conj().T)
            m.setflags(write=False)
            object.__setattr__(self, name, m)

    def min_eigenvalues(self):
        mats = (self.rho_a, self.rho_b, self.rho_full)
        return tuple(float(np.linalg.eigvalsh(m)[0]) for m in mats if m is not None)

    def full(self):
        """``rho_full``, raising if the full state vanishes."""
        if self.rho_full is None:
            raise ValueError(f"the full state vanishes; its {self.n}-RDM is undefined")
        return self.rho_full

    def check_positive(self, atol=PSD_ATOL):
        lows = self.min_eigenvalues()
        if min(lows) < -atol:
            raise ValueError(f"n-RDM not positive semidefinite: min eigenvalues {lows}")
        return self


def _root_binomial_outer(n):
    r = np.sqrt(comb(n, np.arange(n + 1), exact=False))
    return np.outer(r, r)


def _edge_weights(spread):
    """E_- and E_+: overlap weights of f with its reflections about +-pi/4."""
    if spread.is_delta:
        e_minus = 1.0 if math.isclose(spread.theta0, QUARTER_PI, abs_tol=1e-12) else 0.0
        e_plus = 1.0 if math.isclose(spread.theta0, -QUARTER_PI, abs_tol=1e-12) else 0.0
        return e_minus, e_plus
    s2 = 2.0 * spread.sigma**2
    return (
        math.exp(-((spread.theta0 - QUARTER_PI) ** 2) / s2),
        math.exp(-((spread.theta0 + QUARTER_PI) ** 2) / s2),
    )


def rdm_closed_form(spread, n):
    """Large-N n-RDMs obtained by replacing the overlap kernels with delta functions.

    The branch matrices are

        rho_a[k, l] = i^(k-l) / 2^n sqrt(C(n,k) C(n,l)) e^{-2i(k-l) theta0} e^{-2 (k-l)^2 sigma^2}

    and ``rho_b`` its complex conjugate. The full-state matrix adds the
    cross term ``2/2^n sqrt(CC) e^{-2(k-l)^2 sigma^2} [E_- + (-1)^(n+k-l) E_+]``
    and is divided by its trace ``2 + 2 (E_- + (-1)^n E_+)``. No N appears:
    the form is meant for n much smaller than N.
    """
    if not isinstance(spread, GaussianSpread):
        raise TypeError("spread must be a GaussianSpread")
    n = check_positive_int(n, "n")
    k = np.arange(n + 1)
    dk = k[:, None] - k[None, :]
    common = _root_binomial_outer(n) / 2.0**n * np.exp(-2.0 * dk**2 * spread.sigma**2)
    rho_a = common * (1j ** (dk % 4)) * np.exp(-2j * dk * spread.theta0)
    rho_b = rho_a.conj()

    e_minus, e_plus = _edge_weights(spread)
    parity = np.where((n + dk) % 2 == 0, 1.0, -1.0)
    cross = 2.0 * common * (e_minus + parity * e_plus)
    trace = 2.0 + 2.0 * (e_minus + (-1) ** n * e_plus)
    # the two branches cancel (theta0 = -+pi/4 with sigma -> 0 and odd/even n)
    full = None
    if trace >= VANISHING_TRACE:
        full = rho_a + rho_b + cross
        # near cancellation the analytic trace loses digits; the summed diagonal does not
        full = full / np.trace(full).real
    return BranchRdms(n, rho_a, rho_b, full)


def _single_particle(theta):
    """(c, d) components of the branch-A and branch-B single-particle states."""
    e = np.exp(1j * np.asarray(theta)) / math.sqrt(2.0)
    ec = e.conj()
    return (e, 1j * ec), (1j * ec, e)


def _dicke_columns(n, u, v):
    """Column i holds sqrt(C(n,k)) u_i^k v_i^(n-k) for k = 0..n."""
    k = np.arange(n + 1)[:, None]
    r = np.sqrt(comb(n, np.arange(n + 1), exact=False))[:, None]
    return r * u[None, :] ** k * v[None, :] ** (n - k)


def _finite_n_blocks(spec, n, rtol):
    """Unnormalised standard-convention blocks rho_AA, rho_BB and rho_AB + rho_BA."""
    big_n = spec.n_particles
    spread = spec.spread
    power = big_n - n

    def assemble(nodes, weights, fw):
        (ua, va), (ub, vb) = _single_particle(nodes)
        xa = _dicke_columns(n, ua, va) * fw[None, :]
        xb = _dicke_columns(n, ub, vb) * fw[None, :]
        if nodes.size == 1:
            t = nodes[0]
            k_same = np.array([[1.0]])
            k_cross = np.array([[math.sin(2.0 * t) ** power]])
        else:
            k_same = np.cos(nodes[:, None] - nodes[None, :]) ** power
            k_cross = np.sin(nodes[:, None] + nodes[None, :]) ** power
        aa = xa @ k_same @ xa.conj().T
        bb = xb @ k_same @ xb.conj().T
        ab = xa @ k_cross @ xb.conj().T
        return np.stack([aa, bb, ab + ab.conj().T])

    if spread.is_delta:
        nodes = np.array([spread.theta0])
        return assemble(nodes, None, np.ones(1))

    lo, hi = spread.support()
    est, _ = quadrature.integrate(
        lambda x, w: assemble(x, w, spread.amplitude(x) * w),
        lo,
        hi,
        rtol=rtol,
        start_panels=spread.start_panels(power),
    )
    return est


def rdm_finite_n(spec, n, rtol=quadrature.DEFAULT_RTOL):
    """Exact n-RDMs of an N-particle state by 2-D quadrature over the spread.

    For each pair of angles the N - n traced-out particles contribute the
    overlap ``cos^(N-n)(t - t')`` (same branch) or ``sin^(N-n)(t + t')``
    (opposite branches), and the n kept particles contribute the outer
    product of their symmetric (Dicke) components.

    Raises
    ------
    quadrature.QuadratureError
        If the tensor-product rule fails to converge.
    """
    if not isinstance(spec, SuperpositionSpec):
        raise TypeError("spec must be a SuperpositionSpec")
    n = check_positive_int(n, "n")
    if n > spec.n_particles:
        raise ValueError(f"n={n} exceeds the particle number N={spec.n_particles}")
    aa, bb, cross = _finite_n_blocks(spec, n, rtol)
    tr_a = np.trace(aa).real
    tr_b = np.trace(bb).real
    full = aa + bb + cross
    tr_full = np.trace(full).real
    # transpose: store <Psi| c+^k .. c^l .. |Psi>
    full = None if tr_full < VANISHING_TRACE * (tr_a + tr_b) else (full / tr_full).T
    return BranchRdms(n, (aa / tr_a).T, (bb / tr_b).T, full)


@dataclass(frozen=True)
class FockOccupation:
    """Occupation numbers ``(n_1, ..., n_d)`` of a multi-mode Fock state."""

    counts: tuple

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if not counts or any(c < 0 for c in counts):
            raise ValueError(f"counts must be non-negative integers, got {self.counts}")
        if sum(counts) < 1:
            raise ValueError("Fock state needs at least one particle")
        object.__setattr__(self, "counts", counts)

    @property
    def n_particles(self):
        return sum(self.counts)

    @property
    def occupied_modes(self):
        return sum(1 for c in self.counts if c > 0)


def occupation_patterns(modes, n):
    """All ``p`` with ``len(p) == modes`` and ``sum(p) == n``, in descending lexicographic order."""
    out = []
    for bars in itertools.combinations(range(n + modes - 1), modes - 1):
        edges = (-1,) + bars + (n + modes - 1,)
        out.append(tuple(edges[i + 1] - edges[i] - 1 for i in range(modes)))
    return sorted(out, reverse=True)


def fock_rdm_diagonal(occ, n):
    """Diagonal of the symmetrised n-RDM of a Fock state, ordered as ``occupation_patterns``.

    Entry ``p`` is the multivariate hypergeometric probability
    ``prod_k C(n_k, p_k) / C(N, n)`` of drawing the pattern ``p`` when ``n``
    of the ``N`` particles are sampled without replacement.
    """
    if not isinstance(occ, FockOccupation):
        occ = FockOccupation(tuple(occ))
    n = check_positive_int(n, "n")
    if n > occ.n_particles:
        raise ValueError(f"n={n} exceeds the particle number N={occ.n_particles}")
    total = math.comb(occ.n_particles, n)
    diag = [
        math.prod(math.comb(nk, pk) for nk, pk in zip(occ.counts, p)) / total
        for p in occupation_patterns(len(occ.counts), n)
    ]
    return np.array(diag)


def fock_rdm(occ, n):
    """Symmetrised n-RDM of a Fock state as a (diagonal) matrix."""
    return np.diag(fock_rdm_diagonal(occ, n)).astype(complex)
