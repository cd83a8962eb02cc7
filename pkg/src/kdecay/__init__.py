"""k-decay learning-rate schedules, baselines, and a deterministic desk-scale harness."""

from .datasets import Dataset, DatasetSpec, load_csv_dataset, make_synthetic_dataset
from .errors import ConfigError, DivergenceError, DomainError, UnsupportedCaseError
from .network import (
    MlpModel,
    ModelSpec,
    evaluate_error,
    forward_backward,
    gradient_check,
    init_mlp,
)
from .schedules import (
    Clr,
    CosineKDecay,
    CurveSample,
    ExpKDecay,
    Htd,
    KDecayParams,
    PolynomialKDecay,
    ScheduleSpec,
    Sgdr,
    StepDecay,
    derivative_increment_schedule,
    evaluate,
    kdecay_term,
    lr_baseline,
    lr_cosine_kdecay,
    lr_exp_kdecay,
    lr_polynomial_kdecay,
    polynomial_kth_derivative,
    sample_curve,
    schedule_from_dict,
    schedule_to_dict,
)
from .sweep import (
    ScheduleTemplate,
    SweepPlan,
    SweepResult,
    best_k,
    compare_loss_ordering,
    run_sweep,
)
from .training import RunRecord, TrainConfig, expected_horizon, sgd_momentum_step, train

__version__ = "0.1.0"
