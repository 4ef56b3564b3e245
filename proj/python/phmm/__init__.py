"""HMM training with partial, noisy state labels."""

import json as _json

from ._phmm import (
    UNOBSERVED,
    DegenerateLikelihood,
    DegenerateStatistics,
    Error,
    FitReport,
    HmmModel,
    InvalidInput,
    InvalidModel,
    SideInfoParams,
    UndefinedMargin,
    baum_welch_fit,
    baum_welch_step,
    corrupt_labels,
    forward_scaled,
    joint_log_likelihood,
    log_likelihood,
    margin_gain,
    nu,
    phmm_em_step,
    phmm_fit,
    random_model,
    reference_model,
    sample_sequence,
    viterbi,
)
from ._phmm import run_experiment as _run_experiment


def run_experiment(config, threads=0):
    """Run a recognition sweep. `config` is a dict or a JSON string."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _run_experiment(config, threads)


__all__ = [
    "UNOBSERVED",
    "DegenerateLikelihood",
    "DegenerateStatistics",
    "Error",
    "FitReport",
    "HmmModel",
    "InvalidInput",
    "InvalidModel",
    "SideInfoParams",
    "UndefinedMargin",
    "baum_welch_fit",
    "baum_welch_step",
    "corrupt_labels",
    "forward_scaled",
    "joint_log_likelihood",
    "log_likelihood",
    "margin_gain",
    "nu",
    "phmm_em_step",
    "phmm_fit",
    "random_model",
    "reference_model",
    "run_experiment",
    "sample_sequence",
    "viterbi",
]
