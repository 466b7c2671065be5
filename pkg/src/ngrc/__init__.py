"""Numerical workbench for polynomial delay-embedding (next-generation
reservoir computing) forecasting of chaotic systems."""

from .config import NgrcConfig, load_config
from .dynamics import (
    DegenerateDataError,
    DivergenceError,
    IntegratorId,
    OverflowGuardError,
    SystemId,
    Trajectory,
    discard_transient,
    double_scroll_rhs,
    generate,
    integrate,
    lorenz_rhs,
    normalize,
    observe,
    sample_initial_condition,
    subsample,
)
from .features import (
    DesignSet,
    EmbeddingConfig,
    MonomialBasis,
    build_design,
    column_weight,
    embed,
    feature_vector,
    monomial_exponents,
    x_submatrix,
)
from .forecast import ForecastResult, is_bounded, rollout
from .metrics import (
    LYAPUNOV_EXPONENT,
    MetricsReport,
    PsdEstimate,
    compute_metrics,
    maxima_map_distance,
    mutual_information_first_min,
    psd_divergence,
    successive_maxima,
    valid_prediction_time,
    welch_psd,
)
from .solvers import (
    ALL_SOLVERS,
    KAPPA_SENTINEL,
    ReadoutMatrix,
    SolverFailure,
    SolverId,
    TrainReport,
    closeness_of_fit,
    condition_number,
    pairwise_diff,
    regularized_condition_number,
    relative_error_bound,
    solve_cholesky,
    solve_lu,
    solve_svd,
    train,
)

__version__ = "0.1.0"
