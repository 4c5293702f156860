"""Specification tests for multivariate dynamic models via the dynamic Rosenblatt transform."""

__version__ = "0.1.0"

from .bootstrap import BootstrapConfig, BootstrapResult, p_value, run_bootstrap
from .core import as_series, read_csv, stack, unstack, write_csv
from .models import (EstimationError, FittedModel, InitPolicy, ModelFamily, Params, conditional_factors,
                     estimate, loglik, lstar_mean, pit_sequence, simulate)
from .montecarlo import DgpSpec, ExperimentResult, curve_csv, dgp_simulate, power_curve, run_experiment
from .reference import jarque_bera, ljung_box
from .stats import (adj_mdj, bai_chen_combos, cvm_d2, d1_stats, d2_stats, ks_d2, patton_s,
                    statistic_set, v2_eval)
from .transform import (ConditionalFactor, FactorArray, bivariate_normal_factors, multivariate_t_factors,
                        pit_step, rosenblatt)

__all__ = [
    "BootstrapConfig", "BootstrapResult", "ConditionalFactor", "DgpSpec", "EstimationError",
    "ExperimentResult", "FactorArray", "FittedModel", "InitPolicy", "ModelFamily", "Params",
    "adj_mdj", "as_series", "bai_chen_combos", "bivariate_normal_factors", "conditional_factors",
    "curve_csv", "cvm_d2", "d1_stats", "d2_stats", "dgp_simulate", "estimate", "jarque_bera", "ks_d2",
    "ljung_box", "loglik", "lstar_mean", "multivariate_t_factors", "p_value", "patton_s",
    "pit_sequence", "pit_step", "power_curve", "read_csv", "rosenblatt", "run_bootstrap", "run_experiment",
    "simulate", "stack", "statistic_set", "unstack", "v2_eval", "write_csv",
]
