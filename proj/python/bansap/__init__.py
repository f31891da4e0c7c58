"""Bandit online saddle-point optimization with long-term constraints."""

from ._core import (
    BoxSet,
    FogInstanceConfig,
    FogProblem,
    GradientEstimate,
    HyperParams,
    RunSummary,
    generate_instance,
    m_point_grad,
    one_point_grad,
    run_experiment_file,
    run_fog,
    sample_ball,
    sample_direction,
    schedule,
    smoothed_value,
    two_point_grad,
)

__version__ = "0.1.0"

__all__ = [
    "BoxSet",
    "FogInstanceConfig",
    "FogProblem",
    "GradientEstimate",
    "HyperParams",
    "RunSummary",
    "generate_instance",
    "m_point_grad",
    "one_point_grad",
    "run_experiment_file",
    "run_fog",
    "sample_ball",
    "sample_direction",
    "schedule",
    "smoothed_value",
    "two_point_grad",
]
