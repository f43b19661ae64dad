"""Shared test utilities: an exhaustive BFS oracle and random-state builders.

The BFS oracle is deliberately independent of the greedy search: it explores
the full move graph breadth-first and returns the true optimal move count to
any blockage-free state (or None if unreachable). Only usable on tiny states.
"""

from __future__ import annotations

import random
from collections import deque

from premarshal.core import (
    WarehouseState,
    apply_move,
    canonical_key,
    enumerate_moves,
    is_blockage_free,
)


def bfs_optimal_moves(initial: WarehouseState, limit: int = 200_000) -> int | None:
    """True minimum move count to reach a blockage-free state, by brute force."""
    if is_blockage_free(initial):
        return 0
    seen = {canonical_key(initial)}
    frontier = deque([(initial, 0)])
    visited = 0
    while frontier:
        state, dist = frontier.popleft()
        visited += 1
        if visited > limit:
            raise RuntimeError("BFS oracle state limit exceeded; shrink the instance")
        for mv in enumerate_moves(state):
            nxt = apply_move(state, mv)
            key = canonical_key(nxt)
            if key in seen:
                continue
            if is_blockage_free(nxt):
                return dist + 1
            seen.add(key)
            frontier.append((nxt, dist + 1))
    return None


def random_valid_state(
    rng: random.Random,
    max_lanes: int = 5,
    max_depth: int = 5,
    max_priority: int = 5,
    ensure_empty_slot: bool = False,
) -> WarehouseState:
    depth = rng.randint(1, max_depth)
    lanes = []
    for _ in range(rng.randint(1, max_lanes)):
        n = rng.randint(0, depth)
        loads = [rng.randint(1, max_priority) for _ in range(n)]
        lanes.append([0] * (depth - n) + loads)
    if ensure_empty_slot and all(lane[0] != 0 for lane in lanes):
        lanes[rng.randrange(len(lanes))] = [0] * depth
    return WarehouseState.from_lists(lanes)


def naive_blocking_indices(lane: list[int]) -> set[int]:
    """Quadratic restatement of the blocking definition, used as an oracle."""
    out = set()
    for i, v in enumerate(lane):
        if v == 0:
            continue
        if any(0 < lane[j] < v for j in range(i + 1, len(lane))):
            out.add(i)
    return out
