from .norms import energy_trace, zt_norm
from .lemma_key import (
    exponential_weights,
    integrate_relaxation,
    lemma_key_trial,
    lemma_key_suite,
    scalar_mode_check,
)
from .sweeps import (
    worker_count,
    run_jobs,
    run_name,
    kappa_runs,
    sweep_table,
    kappa_sweep,
    common_levels,
    trajectory_distance,
    convergence_table,
    kappa_convergence,
    perturbation_study,
)
from .mms import fitted_rate, rate_table, temporal_error, spatial_error, mms_convergence, MMS_FAMILIES
from .verification import VERIFICATION_CHECKS, verify, existence_time_verdict, lemma_key_verdicts, mms_verdicts

__all__ = [
    "energy_trace",
    "zt_norm",
    "exponential_weights",
    "integrate_relaxation",
    "lemma_key_trial",
    "lemma_key_suite",
    "scalar_mode_check",
    "worker_count",
    "run_jobs",
    "run_name",
    "kappa_runs",
    "sweep_table",
    "kappa_sweep",
    "common_levels",
    "trajectory_distance",
    "convergence_table",
    "kappa_convergence",
    "perturbation_study",
    "fitted_rate",
    "rate_table",
    "temporal_error",
    "spatial_error",
    "mms_convergence",
    "MMS_FAMILIES",
    "VERIFICATION_CHECKS",
    "verify",
    "existence_time_verdict",
    "lemma_key_verdicts",
    "mms_verdicts",
]
