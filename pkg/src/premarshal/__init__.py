"""Unit-load pre-marshalling: state model, greedy heuristic search, fitness
evaluation, and an LLM-driven heuristic-evolution loop."""

from .core import (
    IllegalMoveError,
    MalformedLaneError,
    Move,
    WarehouseState,
    accessible_index,
    apply_move,
    blocking_indices,
    canonical_key,
    count_blocking,
    enumerate_moves,
    is_blockage_free,
    validate_lane,
    validate_state,
)
from .fitness import FitnessReport, InstanceResult, evaluate, fitness_value
from .heuristics import (
    Scorer,
    ScorerError,
    UnknownScorerError,
    available_scorers,
    lookup_scorer,
    score_blocking_baseline,
    score_gpt4o_eoh,
    score_qwen_ceoh,
)
from .instances import (
    Instance,
    InstanceConfig,
    InstanceError,
    InstanceFormatError,
    SplitMix64,
    generate_instance,
    lower_bound_blocking,
    read_instance,
    write_instance,
)
from .search import SolveResult, replay, solve

__version__ = "0.1.0"

__all__ = [
    "FitnessReport",
    "IllegalMoveError",
    "Instance",
    "InstanceConfig",
    "InstanceError",
    "InstanceFormatError",
    "InstanceResult",
    "MalformedLaneError",
    "Move",
    "Scorer",
    "ScorerError",
    "SolveResult",
    "SplitMix64",
    "UnknownScorerError",
    "WarehouseState",
    "accessible_index",
    "apply_move",
    "available_scorers",
    "blocking_indices",
    "canonical_key",
    "count_blocking",
    "enumerate_moves",
    "evaluate",
    "fitness_value",
    "generate_instance",
    "is_blockage_free",
    "lookup_scorer",
    "lower_bound_blocking",
    "read_instance",
    "replay",
    "score_blocking_baseline",
    "score_gpt4o_eoh",
    "score_qwen_ceoh",
    "solve",
    "validate_lane",
    "validate_state",
    "write_instance",
]
