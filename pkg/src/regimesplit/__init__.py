"""Optimal two-regime approximation: thresholds in one dimension, halfspaces in several."""

from .density import (
    Density1D,
    EmpiricalDist,
    QuadratureConfig,
    SupportInterval,
    family_from_config,
    logconcavity_probe,
    make_family,
    weibull_mean_median_k,
)
from .estimators import HalfspaceSplitter, TwoRegimeSplitter
from .exceptions import (
    BracketFailure,
    ConsistencyError,
    DegenerateCut,
    DegeneratePolygon,
    DegenerateRegime,
    DomainError,
    EigenFailure,
    NonIntegrable,
    NotLogConcave,
    RegimeSplitError,
)
from .geometry import ConvexPolygon, R_polygon, hexagon_counterexample
from .inequality import ConvexPotential, check_lemma, inactivity_time, monotonicity_probe, residual_life
from .multidim import (
    EllipticalModel,
    F_halfspace,
    F_mc,
    best_direction,
    c0,
    cubic_region_member,
    model_from_config,
    optimal_t_check,
    quad_regime_halfspace,
    rayleigh,
)
from .splitcore import (
    SplitResult,
    conditional_levels,
    f_X,
    mk_gap,
    reduced_objective,
    solve_empirical,
    solve_global,
    solve_logconcave,
    sweep,
)

__version__ = "0.1.0"
