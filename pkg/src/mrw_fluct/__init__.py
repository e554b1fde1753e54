"""Markov random walks with exact and Monte Carlo fluctuation-theory checks."""

from .arcsine import ArcsineLaw, as_cdf, as_density, as_quantile, as_sample
from .exact import (
    LadderStructure,
    LatticeLaw,
    OccupationLaw,
    ReturnLaw,
    SpitzerIdentityReport,
    brute_force_law,
    brute_force_occupation,
    classic_spitzer_rhs,
    embedded_positive_curve,
    embedded_return_law,
    exact_law,
    ladder_epochs,
    occupation_law,
    prob_level_curve,
    prob_positive,
    prob_positive_at_state,
    prob_positive_curve,
    spitzer_identity,
    threshold_counts_law,
)
from .lattice import LatticeStructure, is_lattice_exact, lattice_structure
from .model import (
    GaussianKernel,
    LatticeKernel,
    MrwModel,
    NullHomology,
    Periodicity,
    PointKernel,
    ValidationReport,
    dual,
    dump_model,
    is_null_homologous,
    load_model,
    period,
    stationary_distribution,
    validate_model,
)
from .montecarlo import (
    BoundaryOccupation,
    EstimatorResult,
    PathEngine,
    ReturnStructure,
    boundary_occupation,
    clt_check,
    embedded_spitzer_average,
    extract_returns,
    occupation_fraction_samples,
    spitzer_average,
    strong_spitzer_curve,
)
from .simulate import Trajectory, simulate
from .stats import (
    EmpiricalDistribution,
    NormalLaw,
    RhoConfig,
    RhoReport,
    ks_distance,
    rho_report,
)

__version__ = "0.1.0"
