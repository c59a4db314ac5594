"""Physics-informed networks for a 1-D bar and a simply supported beam,
with boundary conditions imposed by penalties, output multipliers, or both."""

from .bc import (
    BarDecay,
    BeamSine,
    Hybrid,
    Penalty,
    Reparameterization,
    make_strategy,
    multiplier_value,
    penalty_term,
    reparam_chain_factor,
    reparameterize,
)
from .fdm import Grid, SampledField, d1, d2, d4, make_grid, sample
from .nn import AdamState, DenseNetwork, ParamGradient, adam_step, backward, forward, init_network
from .problems import (
    BarSpec,
    BeamSpec,
    CaseLoss,
    LossBreakdown,
    bar_analytic,
    bar_loss,
    beam_analytic,
    beam_loss,
    loss_gradient,
)
from .trainer import (
    CASES,
    ExperimentReport,
    SuiteResult,
    TrainConfig,
    TrainingDiverged,
    percent_error,
    run_suite,
    train,
)

__version__ = "0.1.0"
