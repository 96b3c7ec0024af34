"""Testing whether a hazard rate is nondecreasing on an interval."""

from .bootstrap import (
    BootstrapConfig,
    TestOutcome,
    durot_calibrated_test,
    naive_isotonic_bootstrap_test,
    plugin_asymptotic_factors,
    run_test,
    smoothed_isotonic_bootstrap_test,
)
from .families import BumpFamily, DFamily, ExponentialModel, WeibullModel, linearize_cumhaz
from .gcm import CusumDiagram, PiecewiseLinearFn, gcm
from .hazard import (
    Interval,
    ecdf,
    empirical_cumhaz,
    penalized_isotonic_hazard,
    restricted_gcm_cumhaz,
)
from .rng import DEFAULT_SEED, RngStream
from .simulation import StudySpec, run_coupling_experiment, run_null_level_study, run_power_study
from .smoothing import smooth_hazard
from .statistics import StatisticSpec, durot_stat, t_n

__version__ = "0.1.0"
