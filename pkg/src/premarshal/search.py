"""Greedy best-first tree search over reshuffling moves.

Each iteration branches every legal move, scores all unvisited successor
states in one batch, and commits the best one. Ties break toward the
lexicographically smallest (source, dest) so runs are reproducible. States
already committed on the path (including the start state) are never revisited;
without this, score-driven greedy search oscillates between mirror states.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from .core import (
    Move,
    WarehouseState,
    apply_move,
    canonical_key,
    enumerate_moves,
    is_blockage_free,
    validate_state,
)
from .heuristics import Scorer

REASON_BUDGET = "move budget exhausted"
REASON_DEAD_END = "dead end: every successor already visited"
REASON_TIMEOUT = "timeout"


@dataclass(slots=True)
class SolveResult:
    solved: bool
    moves: list[Move] = field(default_factory=list)
    move_count: int = 0
    expanded_states: int = 0
    wall_time: float = 0.0
    failure_reason: str | None = None


def solve(
    initial: WarehouseState,
    scorer: Scorer,
    m_max: int,
    deadline: float | None = None,
) -> SolveResult:
    """Run the greedy search from `initial` until blockage-free or give-up.

    Unsolved results always report move_count == m_max (penalty convention),
    with failure_reason distinguishing budget exhaustion, dead ends, scorer
    failures and the optional wall-clock deadline (time.monotonic() value).
    """
    if m_max < 1:
        raise ValueError(f"m_max must be >= 1, got {m_max}")
    validate_state(initial)
    t0 = time.perf_counter()

    def finish(solved: bool, moves: list[Move], expanded: int, reason: str | None) -> SolveResult:
        return SolveResult(
            solved=solved,
            moves=moves,
            move_count=len(moves) if solved else m_max,
            expanded_states=expanded,
            wall_time=time.perf_counter() - t0,
            failure_reason=reason,
        )

    visited = {canonical_key(initial)}
    current = initial
    moves: list[Move] = []
    expanded = 0
    while True:
        if is_blockage_free(current):
            return finish(True, moves, expanded, None)
        if len(moves) >= m_max:
            return finish(False, moves, expanded, REASON_BUDGET)
        if deadline is not None and time.monotonic() >= deadline:
            return finish(False, moves, expanded, REASON_TIMEOUT)
        candidates: list[tuple[Move, WarehouseState]] = []
        for mv in enumerate_moves(current):
            nxt = apply_move(current, mv)
            if canonical_key(nxt) in visited:
                continue
            candidates.append((mv, nxt))
        if not candidates:
            return finish(False, moves, expanded, REASON_DEAD_END)
        expanded += len(candidates)
        try:
            scores = scorer.score_states([nxt for _, nxt in candidates])
            if len(scores) != len(candidates):
                raise ValueError(f"{len(scores)} scores for {len(candidates)} states")
            if any(not math.isfinite(s) for s in scores):
                raise ValueError("non-finite score")
        except Exception as e:
            return finish(False, moves, expanded, f"scorer failure: {e}")
        # Candidates come in lexicographic move order, so the first maximum
        # realizes the documented tie-break.
        best = max(range(len(candidates)), key=lambda i: (scores[i], -i))
        mv, current = candidates[best]
        moves.append(mv)
        visited.add(canonical_key(current))


def replay(initial: WarehouseState, moves: list[Move] | list[tuple[int, int]]) -> WarehouseState:
    """Fold apply_move over `moves`; errors name the offending move index."""
    state = initial
    for i, mv in enumerate(moves):
        try:
            state = apply_move(state, Move(*mv))
        except ValueError as e:
            raise type(e)(f"move {i}: {e}") from e
    return state
