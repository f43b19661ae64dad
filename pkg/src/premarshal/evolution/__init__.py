from .llm import CredentialsError, TransportError, ensure_credentials, llm_complete
from .loop import (
    CodeEvaluator,
    EvaluationError,
    RunAborted,
    RunError,
    RunLogSink,
    load_checkpoint,
    run_evolution,
    select_parents,
    survivor_selection,
)
from .prompts import (
    HEURISTIC_FUNCTION_NAME,
    ParsedResponse,
    PromptBundle,
    PromptError,
    TemplateSet,
    build_prompt,
    default_templates,
    parse_response,
)
from .records import (
    EVOLVE_STRATEGIES,
    STRATEGIES,
    EvolutionConfig,
    HeuristicRecord,
    LlmConfig,
)

__all__ = [
    "CodeEvaluator",
    "CredentialsError",
    "EVOLVE_STRATEGIES",
    "EvaluationError",
    "EvolutionConfig",
    "HEURISTIC_FUNCTION_NAME",
    "HeuristicRecord",
    "LlmConfig",
    "ParsedResponse",
    "PromptBundle",
    "PromptError",
    "RunAborted",
    "RunError",
    "RunLogSink",
    "STRATEGIES",
    "TemplateSet",
    "TransportError",
    "build_prompt",
    "default_templates",
    "ensure_credentials",
    "llm_complete",
    "load_checkpoint",
    "parse_response",
    "run_evolution",
    "select_parents",
    "survivor_selection",
]
