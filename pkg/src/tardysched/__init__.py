"""Maximising the weight of early jobs on one machine with hard deadlines."""
from .core import (EARLY, TARDY, InfeasibleInstanceError, InfeasibleScheduleError, Instance,
                   InvariantViolation, Job, Schedule, ValidationError, labels_feasible, objective)
from .exact import brute_force, solve_exact
from .features import featurize
from .generator import DatasetSpec, generate, generate_many
from .oracle import MlpModel, TrainConfig, classify, predict_scores, train
from .refine import reduce_instance, refine
from .scheduler import edf_feasible, schedule_from_labels

__all__ = [
    "EARLY", "TARDY", "InfeasibleInstanceError", "InfeasibleScheduleError", "Instance",
    "InvariantViolation", "Job", "Schedule", "ValidationError", "labels_feasible", "objective",
    "brute_force", "solve_exact", "featurize", "DatasetSpec", "generate", "generate_many",
    "MlpModel", "TrainConfig", "classify", "predict_scores", "train", "reduce_instance", "refine",
    "edf_feasible", "schedule_from_labels",
]
