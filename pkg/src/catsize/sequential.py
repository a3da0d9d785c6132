"""Sequential single-particle discrimination of two product-state branches.

Each particle k of branch A or B is one of two pure states with overlap
magnitude ``c_k``. Measuring the particles one at a time, each in the
optimal (Helstrom) basis for the *current* priors, and updating the priors by
Bayes' rule after every outcome reaches the same success probability as the
best collective n-particle measurement:

    P_n = 1/2 + 1/2 sqrt(1 - 4 q_A q_B prod_k c_k^2).

For a single-mode bosonic branch every particle shares the same state, so the
bosonic case is the special case ``c_k = c`` for all k.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._validation import check_positive_int, check_real

# posterior bookkeeping must reproduce P_k to this accuracy
POSTERIOR_ATOL = 1e-12
BRANCHES = ("A", "B")


@dataclass(frozen=True)
class ProductBranchPair:
    """Per-particle overlaps ``c_k = |<psi_A^(k)|psi_B^(k)>|`` and the prior of branch A."""

    overlaps: tuple
    prior_a: float = 0.5

    def __post_init__(self):
        c = tuple(check_real(x, "overlap", 0.0, 1.0) for x in np.atleast_1d(self.overlaps))
        if not c:
            raise ValueError("at least one particle overlap is required")
        object.__setattr__(self, "overlaps", c)
        object.__setattr__(
            self, "prior_a", check_real(self.prior_a, "prior_a", 0.0, 1.0, low_open=True, high_open=True)
        )

    @property
    def prior_b(self):
        return 1.0 - self.prior_a

    @property
    def n(self):
        return len(self.overlaps)

    @classmethod
    def from_angles(cls, thetas, prior_a=0.5):
        """Branches ``cos t |x> +- sin t |y>``, whose overlap is ``|cos 2t|``."""
        return cls(tuple(abs(math.cos(2.0 * t)) for t in thetas), prior_a)

    @classmethod
    def bosonic(cls, overlap, n, prior_a=0.5):
        """n particles all in the same single-particle branch states."""
        return cls((overlap,) * check_positive_int(n, "n"), prior_a)


@dataclass(frozen=True)
class SingleMeasurement:
    """Optimal measurement of one particle given priors.

    ``p_ea_given_a`` is the probability of outcome E_A when the particle
    belongs to branch A, and so on.
    """

    r: float
    p_success: float
    p_ea_given_a: float
    p_ea_given_b: float
    p_eb_given_a: float
    p_eb_given_b: float


def _small_conditional(q, r, c2, one_minus_c2):
    """``1/2 - (1 - 2 q c^2) / 2R`` without cancellation.

    Rationalising gives ``2 q^2 c^2 (1 - c^2) / (R (R + 1 - 2 q c^2))``, which
    is stable whenever ``1 - 2 q c^2 >= 0``; otherwise the direct form has no
    cancellation.
    """
    u = 1.0 - 2.0 * q * c2
    with np.errstate(divide="ignore", invalid="ignore"):
        stable = 2.0 * q * q * c2 * one_minus_c2 / (r * (r + u))
        direct = 0.5 - u / (2.0 * r)
    return np.where(u >= 0.0, stable, direct)


def _conditionals(q_a, c):
    """Vectorised R and the likelihoods ``(E_A|A, E_A|B, E_B|A, E_B|B)``.

    The two "wrong-outcome" probabilities are computed directly rather than as
    ``1 - p``, so they keep full relative accuracy when they are tiny.
    """
    q_a = np.asarray(q_a, dtype=float)
    q_b = 1.0 - q_a
    c2 = c * c
    one_minus_c2 = (1.0 - c) * (1.0 + c)
    # R^2 = 1 - 4 q_A q_B c^2, written as a sum of non-negative terms
    r = np.sqrt(one_minus_c2 + c2 * (q_a - q_b) ** 2)
    ea_b = np.clip(_small_conditional(q_a, r, c2, one_minus_c2), 0.0, 1.0)
    eb_a = np.clip(_small_conditional(q_b, r, c2, one_minus_c2), 0.0, 1.0)
    # R = 0 only for equal priors and identical states: the outcome is a coin flip
    ea_b = np.where(r > 0.0, ea_b, 0.5)
    eb_a = np.where(r > 0.0, eb_a, 0.5)
    return r, (1.0 - eb_a, ea_b, eb_a, 1.0 - ea_b)


def optimal_single_measurement(prior_a, c_k):
    """Helstrom measurement on one particle with overlap ``c_k`` and prior ``prior_a``.

    ``R = sqrt(1 - 4 q_A q_B c^2)``, ``P = 1/2 + R/2`` and

        P(E_A|A) = 1/2 + (1 - 2 q_B c^2) / 2R,   P(E_B|B) = 1/2 + (1 - 2 q_A c^2) / 2R.
    """
    q_a = check_real(prior_a, "prior_a", 0.0, 1.0, low_open=True, high_open=True)
    c = check_real(c_k, "c_k", 0.0, 1.0)
    r, likes = _conditionals(q_a, c)
    r = float(r)
    return SingleMeasurement(r, 0.5 + 0.5 * r, *(float(x) for x in likes))


def _bayes(q_a, likes, outcome_a):
    """Posterior of branch A after outcome E_A (``outcome_a`` True) or E_B."""
    ea_a, ea_b, eb_a, eb_b = likes
    like_a = np.where(outcome_a, ea_a, eb_a)
    like_b = np.where(outcome_a, ea_b, eb_b)
    num = q_a * like_a
    return num / (num + (1.0 - q_a) * like_b)


@dataclass(frozen=True)
class ProtocolStep:
    k: int
    r: float
    p: float
    outcome: Optional[str] = None
    posterior_a: Optional[float] = None


@dataclass(frozen=True)
class ProtocolTrace:
    steps: tuple
    final_success_probability: float

    @property
    def probabilities(self):
        return tuple(s.p for s in self.steps)


def closed_form_success(branches):
    """``P_n = 1/2 + 1/2 sqrt(1 - 4 q_A q_B prod c_k^2)``."""
    prod = math.prod(c * c for c in branches.overlaps)
    return 0.5 + 0.5 * math.sqrt(max(0.0, 1.0 - 4.0 * branches.prior_a * branches.prior_b * prod))


def run_protocol(branches, outcomes=None):
    """Step through the protocol, returning R_k and P_k for every particle.

    The sequence ``R_k = sqrt(1 - 4 P_{k-1} (1 - P_{k-1}) c_k^2)`` does not
    depend on the outcomes, because after each step the branch favoured by the
    outcome has posterior exactly ``P_k``. If ``outcomes`` (a string or
    sequence of 'A'/'B') is given, the posterior of A is tracked as well.
    """
    if not isinstance(branches, ProductBranchPair):
        raise TypeError("branches must be a ProductBranchPair")
    if outcomes is not None:
        outcomes = tuple(outcomes)
        if len(outcomes) != branches.n or any(o not in BRANCHES for o in outcomes):
            raise ValueError(f"outcomes must be {branches.n} labels from {BRANCHES}")

    steps = []
    q_a = branches.prior_a
    p_prev = max(q_a, 1.0 - q_a)
    for k, c in enumerate(branches.overlaps, start=1):
        r = math.sqrt(max(0.0, 1.0 - 4.0 * p_prev * (1.0 - p_prev) * c * c))
        p = 0.5 + 0.5 * r
        outcome = posterior = None
        if outcomes is not None:
            _, likes = _conditionals(q_a, c)
            outcome = outcomes[k - 1]
            like_a, like_b = (likes[0], likes[1]) if outcome == "A" else (likes[2], likes[3])
            if q_a * like_a + (1.0 - q_a) * like_b == 0.0:
                raise ValueError(f"outcome {outcome!r} at step {k} has probability zero")
            posterior = float(_bayes(q_a, likes, outcome == "A"))
            q_a = posterior
        steps.append(ProtocolStep(k, r, p, outcome, posterior))
        p_prev = p
    return ProtocolTrace(tuple(steps), steps[-1].p)


@dataclass(frozen=True)
class SimulationResult:
    trials: int
    successes: int
    analytic: float

    @property
    def rate(self):
        return self.successes / self.trials

    @property
    def standard_error(self):
        """Binomial standard error at the analytic success probability."""
        return math.sqrt(self.analytic * (1.0 - self.analytic) / self.trials)

    @property
    def z_score(self):
        se = self.standard_error
        if se == 0.0:
            return 0.0 if self.rate == self.analytic else math.inf
        return (self.rate - self.analytic) / se


def simulate_protocol(branches, true_branch=None, rng_seed=0, trials=100_000):
    """Monte Carlo run of the protocol.

    Parameters
    ----------
    branches : ProductBranchPair
    true_branch : {'A', 'B', None}
        Branch actually prepared; ``None`` draws it from the prior per trial.
    rng_seed : int
        Seed for ``numpy.random.default_rng``; results are reproducible.
    trials : int

    Returns
    -------
    SimulationResult
        ``analytic`` is the success probability the trials should reproduce:
        ``P_n`` for a random branch, or the conditional success rate for a
        fixed one.

    Notes
    -----
    Outcomes are drawn from the conditional probabilities of the optimal
    single-particle measurement, the prior is updated by Bayes' rule, and the
    decision is the label of the last outcome. After every step the updated
    posterior of the favoured branch is checked against ``P_k``.
    """
    if not isinstance(branches, ProductBranchPair):
        raise TypeError("branches must be a ProductBranchPair")
    if true_branch not in (None,) + BRANCHES:
        raise ValueError(f"true_branch must be None, 'A' or 'B', got {true_branch!r}")
    trials = check_positive_int(trials, "trials")
    rng = np.random.default_rng(rng_seed)

    if true_branch is None:
        is_a = rng.random(trials) < branches.prior_a
    else:
        is_a = np.full(trials, true_branch == "A")
    expected = run_protocol(branches)

    q_a = np.full(trials, branches.prior_a)
    said_a = np.zeros(trials, dtype=bool)
    for step, c in zip(expected.steps, branches.overlaps):
        _, likes = _conditionals(q_a, c)
        p_ea = np.where(is_a, likes[0], likes[1])
        said_a = rng.random(trials) < p_ea
        q_a = _bayes(q_a, likes, said_a)
        favoured = np.where(said_a, q_a, 1.0 - q_a)
        worst = float(np.max(np.abs(favoured - step.p)))
        if worst > POSTERIOR_ATOL:
            raise ArithmeticError(f"posterior deviates from P_{step.k} by {worst:.3e}")

    successes = int(np.count_nonzero(said_a == is_a))
    if true_branch is None:
        analytic = expected.final_success_probability
    else:
        analytic = _conditional_success(branches, true_branch)
    return SimulationResult(trials, successes, analytic)


def _conditional_success(branches, true_branch):
    """Exact probability that the last outcome names ``true_branch``.

    After step k the prior of A is ``P_k`` if the outcome was E_A and
    ``1 - P_k`` otherwise, so the outcome process is a two-state Markov chain
    indexed by the last outcome.
    """
    want_a = true_branch == "A"
    states = [(branches.prior_a, 1.0)]  # (prior of A, path weight)
    weight_a = 0.0
    for step, c in zip(run_protocol(branches).steps, branches.overlaps):
        weight_a = 0.0
        for q_a, w in states:
            _, likes = _conditionals(q_a, c)
            weight_a += w * float(likes[0] if want_a else likes[1])
        states = [(step.p, weight_a), (1.0 - step.p, 1.0 - weight_a)]
    return weight_a if want_a else 1.0 - weight_a


__all__ = [
    "ProductBranchPair",
    "ProtocolStep",
    "ProtocolTrace",
    "SimulationResult",
    "SingleMeasurement",
    "closed_form_success",
    "optimal_single_measurement",
    "run_protocol",
    "simulate_protocol",
]
