"""Fitness of a scorer over an instance set: average relative excess over the
per-instance move lower bound. Lower is better; 0.2 means 20% more moves than
the bound on average. Unsolved, crashed and timed-out instances are charged
the full move budget m_max."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence, Union

from .heuristics import Scorer, lookup_scorer
from .instances import Instance
from .search import solve

DEFAULT_TIMEOUT_S = 60.0

# A scorer object is shared across instances; a registry name or a zero-arg
# factory is re-resolved per instance so sandbox-backed scorers get a fresh
# process each time.
ScorerSpec = Union[Scorer, str, Callable[[], Scorer]]


@dataclass(slots=True)
class InstanceResult:
    instance_id: str
    moves: int
    lower_bound: int
    solved: bool
    failure_reason: str | None
    solve_time: float


@dataclass(slots=True)
class FitnessReport:
    per_instance: list[InstanceResult]
    fitness: float
    evaluated_at: float
    mean_solve_time: float

    def to_dict(self) -> dict:
        return {
            "fitness": self.fitness,
            "evaluated_at": self.evaluated_at,
            "mean_solve_time": self.mean_solve_time,
            "per_instance": [
                {
                    "instance": r.instance_id,
                    "m": r.moves,
                    "lower_bound": r.lower_bound,
                    "solved": r.solved,
                    "failure_reason": r.failure_reason,
                    "solve_time": r.solve_time,
                }
                for r in self.per_instance
            ],
        }


def fitness_value(ms: Sequence[int], lbs: Sequence[int]) -> float:
    """Average relative excess of move counts over lower bounds."""
    if len(ms) != len(lbs) or not ms:
        raise ValueError(f"need equal non-empty sequences, got {len(ms)} and {len(lbs)}")
    for m, lb in zip(ms, lbs):
        if lb < 1:
            raise ValueError(f"degenerate lower bound {lb}")
        if m < lb:
            raise ValueError(f"bound violation: m={m} < lower bound {lb}")
    return sum((m - lb) / lb for m, lb in zip(ms, lbs)) / len(ms)


def _solve_one(scorer_spec: ScorerSpec, instance: Instance, m_max: int, timeout_s: float):
    if isinstance(scorer_spec, str):
        scorer, owned = lookup_scorer(scorer_spec), True
    elif not hasattr(scorer_spec, "score_states") and callable(scorer_spec):
        scorer, owned = scorer_spec(), True
    else:
        scorer, owned = scorer_spec, False
    try:
        return solve(
            instance.initial,
            scorer,
            m_max,
            deadline=time.monotonic() + timeout_s,
        )
    finally:
        close = getattr(scorer, "close", None)
        if owned and close is not None:
            close()


def evaluate(
    scorer: ScorerSpec,
    instances: Sequence[Instance],
    m_max: int = 100,
    per_instance_timeout: float = DEFAULT_TIMEOUT_S,
    workers: int = 1,
) -> FitnessReport:
    """Solve every instance and aggregate Eq-style fitness.

    Per-instance failures never raise; they are recorded with m = m_max.
    Results keep input order regardless of completion order.
    """
    if not instances:
        raise ValueError("instance set is empty")
    for inst in instances:
        if inst.lower_bound < 1:
            raise ValueError(f"{inst.instance_id}: degenerate lower bound 0")
        if m_max < inst.lower_bound:
            raise ValueError(
                f"{inst.instance_id}: m_max {m_max} below lower bound {inst.lower_bound}"
            )

    def run(inst: Instance) -> InstanceResult:
        try:
            res = _solve_one(scorer, inst, m_max, per_instance_timeout)
            moves = res.move_count
            solved = res.solved
            reason = res.failure_reason
            elapsed = res.wall_time
        except Exception as e:
            moves, solved, reason, elapsed = m_max, False, f"crash: {e}", 0.0
        if solved:
            assert moves >= inst.lower_bound, "solved below the lower bound"
        return InstanceResult(
            instance_id=inst.instance_id,
            moves=moves,
            lower_bound=inst.lower_bound,
            solved=solved,
            failure_reason=reason,
            solve_time=elapsed,
        )

    if workers <= 1:
        results = [run(inst) for inst in instances]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, instances))

    f = fitness_value([r.moves for r in results], [r.lower_bound for r in results])
    times = [r.solve_time for r in results]
    return FitnessReport(
        per_instance=results,
        fitness=f,
        evaluated_at=time.time(),
        mean_solve_time=sum(times) / len(times),
    )
