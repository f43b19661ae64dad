"""Records and configuration for the heuristic-evolution loop."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Optional

STRATEGIES = ("I0", "E1", "E2", "M1", "M2")
# Per-generation order of the evolve strategies.
EVOLVE_STRATEGIES = ("E1", "E2", "M1", "M2")

STATUS_PENDING = "pending"
STATUS_EVALUATED = "evaluated"
STATUS_INVALID = "invalid"


@dataclass(frozen=True, slots=True)
class HeuristicRecord:
    """One sampled heuristic: thought + code + provenance + fitness."""

    id: int
    strategy: str
    generation: int
    parent_ids: tuple[int, ...] = ()
    thought: str = ""
    code: str = ""
    status: str = STATUS_PENDING
    fitness: Optional[float] = None
    invalid_reason: Optional[str] = None
    prompt_sha256: str = ""
    response: str = ""

    def evaluated(self, fitness: float) -> "HeuristicRecord":
        return replace(self, status=STATUS_EVALUATED, fitness=fitness)

    def invalid(self, reason: str) -> "HeuristicRecord":
        return replace(self, status=STATUS_INVALID, invalid_reason=reason, fitness=None)

    def to_json(self) -> str:
        doc = {
            "id": self.id,
            "strategy": self.strategy,
            "generation": self.generation,
            "parent_ids": list(self.parent_ids),
            "thought": self.thought,
            "code": self.code,
            "status": self.status,
            "fitness": self.fitness,
            "invalid_reason": self.invalid_reason,
            "prompt_sha256": self.prompt_sha256,
            "response": self.response,
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "HeuristicRecord":
        doc = json.loads(line)
        return cls(
            id=doc["id"],
            strategy=doc["strategy"],
            generation=doc["generation"],
            parent_ids=tuple(doc.get("parent_ids", [])),
            thought=doc.get("thought", ""),
            code=doc.get("code", ""),
            status=doc.get("status", STATUS_PENDING),
            fitness=doc.get("fitness"),
            invalid_reason=doc.get("invalid_reason"),
            prompt_sha256=doc.get("prompt_sha256", ""),
            response=doc.get("response", ""),
        )


@dataclass(slots=True)
class LlmConfig:
    """Chat-completions endpoint settings. Sampling parameters are never sent,
    so the provider's defaults apply."""

    endpoint: str
    model: str
    timeout_s: float = 120.0
    max_retries: int = 3
    backoff_s: float = 1.0
    api_key_env: str = "PREMARSHAL_LLM_API_KEY"


@dataclass(slots=True)
class EvolutionConfig:
    mode: str = "ceoh"  # "ceoh" embeds the problem description, "eoh" omits it
    population_size: int = 20
    generations: int = 20
    samples_per_strategy: int = 20
    parents: int = 5
    init_calls: int = 40
    m_max: int = 100
    rng_seed: int = 0
    llm: LlmConfig = field(default_factory=lambda: LlmConfig(endpoint="", model=""))

    def __post_init__(self) -> None:
        if self.mode not in ("ceoh", "eoh"):
            raise ValueError(f"mode must be 'ceoh' or 'eoh', got {self.mode!r}")
        for name in ("population_size", "generations", "samples_per_strategy", "parents", "m_max"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.init_calls < self.population_size:
            raise ValueError(
                f"init_calls ({self.init_calls}) must be >= population_size "
                f"({self.population_size})"
            )
