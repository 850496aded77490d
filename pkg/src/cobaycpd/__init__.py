"""Conjugate Bayesian change-point detection for sigmoid nonlinear Hawkes processes."""

__version__ = "0.1.0"

from ._validation import DataError
from .datagen import LabeledDataset, SegmentSpec, generate_piecewise, stress_configs, synthetic_preset
from .detector import DetectionResult, DetectionState, DetectorConfig, StepRecord, run, step
from .estimators import CoBayCPD, HawkesPosterior
from .gibbs import GibbsConfig, NumericalError, PosteriorSamples, run_chain
from .hawkes import (Basis, BasisSet, EventSequence, ModelParams, default_basis, intensity,
                     log_likelihood, simulate_thinning)
from .metrics import aggregate, compute_mse, evaluate, match_changepoints
from .polyagamma import pg_mean, pg_sample

__all__ = [
    "Basis", "BasisSet", "CoBayCPD", "DataError", "DetectionResult", "DetectionState",
    "DetectorConfig", "EventSequence", "GibbsConfig", "HawkesPosterior", "LabeledDataset",
    "ModelParams", "NumericalError", "PosteriorSamples", "SegmentSpec", "StepRecord",
    "aggregate", "compute_mse", "default_basis", "evaluate", "generate_piecewise",
    "intensity", "log_likelihood", "match_changepoints", "pg_mean", "pg_sample", "run",
    "run_chain", "simulate_thinning", "step", "stress_configs", "synthetic_preset",
]
