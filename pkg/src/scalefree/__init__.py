"""Scale-free online linear optimization.

Adaptive follow-the-regularized-leader learners whose predictions are
invariant to rescaling the loss sequence by any positive constant, together
with the geometry, conjugate machinery, adversaries, and regret-bound
checkers needed to exercise them.
"""

from .adversaries import (
    GaussianAdversary,
    LowerBoundAdversary,
    ReplayAdversary,
    SpikyAdversary,
    generate,
    khinchin_check,
    khinchin_monte_carlo,
    rademacher_signs,
    scale_losses,
)
from .bounds import (
    BoundReport,
    adaftrl_optimized_bound,
    adaftrl_optimized_scale,
    adaftrl_regret_bound,
    generic_ftrl_regret_bound,
    lower_bound_value,
    min_term_inequality_check,
    solo_optimized_bound,
    solo_optimized_scale,
    solo_regret_bound,
    sqrt_sum_check,
)
from .geometry import (
    L1,
    L2,
    LINF,
    Box,
    DecisionSet,
    FullSpace,
    L2Ball,
    ProductSet,
    Simplex,
    UnboundedError,
    dual_kind,
    dual_norm,
    primal_norm,
    support_value,
)
from .harness import (
    ConfigError,
    ExperimentConfig,
    best_in_hindsight,
    read_loss_csv,
    run_experiment,
    run_verify_suite,
    write_loss_csv,
)
from .learners import (
    AdaFTRL,
    FixedEtaFTRL,
    PerCoordinateLearner,
    RoundTrace,
    SoloFTRL,
    run,
    scale_invariance_check,
)
from .regularizers import (
    HalfSquaredDistance,
    Regularizer,
    ShiftedNegativeEntropy,
    scaled_bregman,
    tie_broken_linear_minimizer,
)

__version__ = "0.1.0"
