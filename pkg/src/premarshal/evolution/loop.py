"""The evolutionary loop: initialization calls, per-generation strategy
sampling, parent selection, survivor selection, and append-only run logging.

A run starts with `init_calls` initialization prompts; the best
`population_size` evaluated heuristics form the starting population. Each
generation then issues `samples_per_strategy` samples for every evolve
strategy in fixed order; each evaluated sample joins the working population
immediately (so it can be selected as a parent within the same generation),
and survivor selection trims back to `population_size` at the generation
boundary. Every LLM call yields exactly one logged record, valid or not.
"""

from __future__ import annotations

import hashlib
import json
import random
from pathlib import Path
from typing import Callable, Optional, Protocol, Sequence

from .llm import TransportError, ensure_credentials, llm_complete
from .prompts import PromptBundle, TemplateSet, build_prompt, default_templates, parse_response
from .records import (
    EVOLVE_STRATEGIES,
    STATUS_EVALUATED,
    EvolutionConfig,
    HeuristicRecord,
)

# Evaluates heuristic source code; returns fitness or raises EvaluationError.
CodeEvaluator = Callable[[str], float]
LlmFn = Callable[[PromptBundle], str]


class EvaluationError(RuntimeError):
    """Generated code could not be evaluated (bad code, sandbox refusal...)."""


class RunError(RuntimeError):
    pass


class RunAborted(RuntimeError):
    """Unrecoverable sink/IO failure; a checkpoint was written if configured."""


class RecordSink(Protocol):
    def append(self, record: HeuristicRecord) -> None: ...


class RunLogSink:
    """Append-only JSONL run log, one record per line, flushed per append."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self._fh = self.path.open("a", encoding="utf-8")

    def append(self, record: HeuristicRecord) -> None:
        self._fh.write(record.to_json() + "\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()


def select_parents(
    population: Sequence[HeuristicRecord], count: int, rng: random.Random
) -> list[HeuristicRecord]:
    """Rank-based roulette without replacement.

    Sorted ascending by (fitness, id), rank k (best = 1) gets weight
    1 / (k + population size); draws use the supplied generator only, so a
    fixed seed reproduces the selection exactly."""
    if count > len(population):
        raise ValueError(f"cannot select {count} parents from {len(population)}")
    if any(r.fitness is None for r in population):
        raise ValueError("population contains unevaluated records")
    ranked = sorted(population, key=lambda r: (r.fitness, r.id))
    n = len(ranked)
    weights = [1.0 / (k + 1 + n) for k in range(n)]
    chosen: list[HeuristicRecord] = []
    picked = [False] * n
    for _ in range(count):
        total = sum(w for w, used in zip(weights, picked) if not used)
        target = rng.random() * total
        acc = 0.0
        for i in range(n):
            if picked[i]:
                continue
            acc += weights[i]
            if target < acc:
                pick = i
                break
        else:
            pick = max(i for i in range(n) if not picked[i])
        picked[pick] = True
        chosen.append(ranked[pick])
    return chosen


def survivor_selection(
    population: Sequence[HeuristicRecord], keep: int
) -> list[HeuristicRecord]:
    """The `keep` records with smallest fitness, ties to the older id,
    returned in ascending fitness order."""
    if keep > len(population):
        raise ValueError(f"cannot keep {keep} of {len(population)}")
    if any(r.fitness is None for r in population):
        raise ValueError("population contains unevaluated records")
    return sorted(population, key=lambda r: (r.fitness, r.id))[:keep]


def _boundary_doc(
    generation: int, next_id: int, rng: random.Random,
    population: Sequence[HeuristicRecord],
) -> dict:
    return {
        "generation": generation,
        "next_id": next_id,
        "rng_state": _state_to_json(rng.getstate()),
        "population": [json.loads(r.to_json()) for r in population],
    }


def _write_checkpoint(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, sort_keys=True), encoding="utf-8")


def _state_to_json(state):
    return [state[0], list(state[1]), state[2]]


def _state_from_json(doc):
    return (doc[0], tuple(doc[1]), doc[2])


def load_checkpoint(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def run_evolution(
    config: EvolutionConfig,
    evaluator: CodeEvaluator,
    sink: RecordSink,
    templates: Optional[TemplateSet] = None,
    llm: Optional[LlmFn] = None,
    checkpoint_path: str | Path | None = None,
    resume_from: Optional[dict] = None,
) -> list[HeuristicRecord]:
    """Run the full loop; returns the final population (ascending fitness).

    `evaluator` maps heuristic source code to a fitness value; `llm` maps a
    prompt bundle to a response text and defaults to the HTTP transport using
    config.llm. Transport, parse and evaluation failures mark the sample
    invalid and the loop continues; sink failures abort after writing a
    checkpoint (resume with resume_from=load_checkpoint(path))."""
    templates = templates or default_templates()
    if llm is None:
        ensure_credentials(config.llm)
        transport = lambda bundle: llm_complete(bundle, config.llm)  # noqa: E731
    else:
        transport = llm
    checkpoint = Path(checkpoint_path) if checkpoint_path else None
    rng = random.Random(config.rng_seed)

    if resume_from is not None:
        start_generation = resume_from["generation"] + 1
        next_id = resume_from["next_id"]
        rng.setstate(_state_from_json(resume_from["rng_state"]))
        population = [
            HeuristicRecord.from_json(json.dumps(doc)) for doc in resume_from["population"]
        ]
        boundary = dict(resume_from)
    else:
        start_generation = 1
        next_id = 0
        population = []
        boundary = None

    def log(record: HeuristicRecord) -> None:
        try:
            sink.append(record)
        except Exception as e:
            # Checkpoint the last generation boundary, not the mid-flight state.
            if checkpoint is not None and boundary is not None:
                _write_checkpoint(checkpoint, boundary)
            raise RunAborted(f"run log write failed: {e}") from e

    def sample(strategy: str, generation: int, parents: list[HeuristicRecord]) -> HeuristicRecord:
        nonlocal next_id
        bundle = build_prompt(strategy, config.mode, parents, templates)
        record = HeuristicRecord(
            id=next_id,
            strategy=strategy,
            generation=generation,
            parent_ids=tuple(p.id for p in parents),
            prompt_sha256=hashlib.sha256(bundle.text().encode("utf-8")).hexdigest(),
        )
        next_id += 1
        try:
            response = transport(bundle)
        except TransportError as e:
            return record.invalid(f"transport: {e}")
        parsed = parse_response(response)
        base = dict(
            id=record.id,
            strategy=record.strategy,
            generation=record.generation,
            parent_ids=record.parent_ids,
            prompt_sha256=record.prompt_sha256,
            response=response,
        )
        if not parsed.ok:
            return HeuristicRecord(**base).invalid(parsed.invalid_reason)
        enriched = HeuristicRecord(**base, thought=parsed.thought, code=parsed.code)
        try:
            fitness = evaluator(parsed.code)
        except EvaluationError as e:
            return enriched.invalid(f"evaluation: {e}")
        return enriched.evaluated(fitness)

    if resume_from is None:
        evaluated: list[HeuristicRecord] = []
        for _ in range(config.init_calls):
            record = sample("I0", 0, [])
            log(record)
            if record.status == STATUS_EVALUATED:
                evaluated.append(record)
        if not evaluated:
            raise RunError("initialization produced no evaluated heuristic")
        population = survivor_selection(evaluated, min(config.population_size, len(evaluated)))
        boundary = _boundary_doc(0, next_id, rng, population)
        if checkpoint is not None:
            _write_checkpoint(checkpoint, boundary)

    for g in range(start_generation, config.generations + 1):
        working = list(population)
        for strategy in EVOLVE_STRATEGIES:
            arity = 1 if strategy in ("M1", "M2") else min(config.parents, len(working))
            for _ in range(config.samples_per_strategy):
                parents = select_parents(working, arity, rng)
                record = sample(strategy, g, parents)
                log(record)
                if record.status == STATUS_EVALUATED:
                    working.append(record)
        population = survivor_selection(working, min(config.population_size, len(working)))
        boundary = _boundary_doc(g, next_id, rng, population)
        if checkpoint is not None:
            _write_checkpoint(checkpoint, boundary)

    return population
