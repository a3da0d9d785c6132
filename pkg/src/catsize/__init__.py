"""Measurement-based effective size of two-branch bosonic superposition states.

The cat size ``C_delta = N / n_min`` counts how many N-particle "subsystems"
a superposition behaves like: ``n_min`` is the fewest particles whose joint
measurement tells the two branches apart with error at most ``delta``.
"""

from .distinguish import (
    CLOSED_FORM,
    FINITE_N,
    CatSizeResult,
    cat_size,
    cat_sizes,
    error_probability,
    error_probability_curve,
    ghz_like_nmin,
    ghz_like_probability,
    single_particle_epsilon_sq,
    success_probability,
    theta0_for_epsilon_sq,
)
from .entropy import (
    DisconnectivityResult,
    EntropyCurve,
    disconnectivity,
    disconnectivity_ratios,
    entropy_curve,
    fock_disconnectivity,
    fock_entropy_curve,
    von_neumann_entropy,
)
from .fit import FitGrid, FitResult, SpreadFitter, fit_number_distribution
from .quadrature import QuadratureError
from .rdm import (
    BranchRdms,
    FockOccupation,
    fock_rdm,
    fock_rdm_diagonal,
    occupation_patterns,
    rdm_closed_form,
    rdm_finite_n,
)
from .sequential import (
    ProductBranchPair,
    ProtocolTrace,
    closed_form_success,
    optimal_single_measurement,
    run_protocol,
    simulate_protocol,
)
from .state import (
    GaussianSpread,
    NumberDistribution,
    SuperpositionSpec,
    branch_overlap,
    distillation_probability,
    number_distribution,
)

__version__ = "0.1.0"
