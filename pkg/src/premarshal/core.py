"""Warehouse state model: lanes, blocking detection, move enumeration and application.

A warehouse is a flat sequence of lanes, each a fixed-depth sequence of slots.
Slot value 0 is an empty slot; values 1..P are priority classes, 1 the highest
(retrieved soonest). Index 0 of a lane is the outermost slot, the last index the
innermost. Because loads are stored gap-free, every valid lane has all of its
zeros grouped at the front.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence


class MalformedLaneError(ValueError):
    """A lane (or a state containing one) breaks the zero-prefix rule."""


class IllegalMoveError(ValueError):
    """A move violates one of its preconditions; the message names which."""


class Move(NamedTuple):
    source: int
    dest: int


@dataclass(frozen=True, slots=True)
class WarehouseState:
    """Immutable warehouse state: a tuple of equal-depth lanes.

    Multibay warehouses are modeled as one flat lane collection; since the
    objective counts moves and not travel distance, inter-bay geometry does
    not matter.
    """

    lanes: tuple[tuple[int, ...], ...]

    @classmethod
    def from_lists(cls, lanes: Iterable[Iterable[int]]) -> "WarehouseState":
        return cls(tuple(tuple(int(v) for v in lane) for lane in lanes))

    def to_lists(self) -> list[list[int]]:
        return [list(lane) for lane in self.lanes]

    @property
    def lane_count(self) -> int:
        return len(self.lanes)

    @property
    def depth(self) -> int:
        return len(self.lanes[0])


def validate_lane(lane: Sequence[int]) -> bool:
    """True iff all zeros form a (possibly empty) prefix of the lane."""
    seen_load = False
    for v in lane:
        if v != 0:
            seen_load = True
        elif seen_load:
            return False
    return True


def validate_state(state: WarehouseState) -> None:
    """Raise if the state breaks any structural invariant."""
    if not state.lanes:
        raise MalformedLaneError("state has no lanes")
    depth = len(state.lanes[0])
    if depth < 1:
        raise MalformedLaneError("lane depth must be >= 1")
    for i, lane in enumerate(state.lanes):
        if len(lane) != depth:
            raise MalformedLaneError(f"lane {i}: depth {len(lane)} != {depth}")
        if any(v < 0 for v in lane):
            raise MalformedLaneError(f"lane {i}: negative slot value")
        if not validate_lane(lane):
            raise MalformedLaneError(f"malformed lane {i}: zeros must form a prefix")


def blocking_indices(lane: Sequence[int]) -> set[int]:
    """Indices of blocking loads: slots with a strictly higher-priority
    (smaller nonzero value) load somewhere deeper in the lane."""
    if not validate_lane(lane):
        raise MalformedLaneError("malformed lane: zeros must form a prefix")
    blocking: set[int] = set()
    min_deeper = float("inf")
    for i in range(len(lane) - 1, -1, -1):
        v = lane[i]
        if v == 0:
            continue
        if v > min_deeper:
            blocking.add(i)
        else:
            min_deeper = v
    return blocking


def count_blocking(state: WarehouseState) -> int:
    return sum(len(blocking_indices(lane)) for lane in state.lanes)


def is_blockage_free(state: WarehouseState) -> bool:
    return count_blocking(state) == 0


def accessible_index(lane: Sequence[int]) -> int | None:
    """Index of the single accessible load (first nonzero slot), or None if empty."""
    if not validate_lane(lane):
        raise MalformedLaneError("malformed lane: zeros must form a prefix")
    for i, v in enumerate(lane):
        if v != 0:
            return i
    return None


def enumerate_moves(state: WarehouseState) -> list[Move]:
    """All legal moves, ordered lexicographically by (source, dest).

    A move is legal when the source lane holds at least one load and the
    destination lane has at least one empty slot.
    """
    sources = [i for i, lane in enumerate(state.lanes) if any(v != 0 for v in lane)]
    dests = [i for i, lane in enumerate(state.lanes) if lane and lane[0] == 0]
    return [Move(s, d) for s in sources for d in dests if s != d]


def apply_move(state: WarehouseState, move: Move) -> WarehouseState:
    """Relocate the accessible load of lane `source` to the deepest empty slot
    of lane `dest`. Returns a new state; the input is untouched."""
    s, d = move
    n = len(state.lanes)
    if s == d:
        raise IllegalMoveError(f"illegal move: source == dest == {s}")
    if not (0 <= s < n and 0 <= d < n):
        raise IllegalMoveError(f"illegal move: lane index out of range ({s},{d})")
    src_idx = accessible_index(state.lanes[s])
    if src_idx is None:
        raise IllegalMoveError(f"illegal move: source lane {s} is empty")
    dest_lane = state.lanes[d]
    if dest_lane[0] != 0:
        raise IllegalMoveError(f"illegal move: destination lane {d} is full")
    # Deepest empty slot = last index of the destination's zero prefix.
    fill_idx = 0
    while fill_idx + 1 < len(dest_lane) and dest_lane[fill_idx + 1] == 0:
        fill_idx += 1
    load = state.lanes[s][src_idx]
    new_src = state.lanes[s][:src_idx] + (0,) + state.lanes[s][src_idx + 1 :]
    new_dst = dest_lane[:fill_idx] + (load,) + dest_lane[fill_idx + 1 :]
    lanes = list(state.lanes)
    lanes[s] = new_src
    lanes[d] = new_dst
    return WarehouseState(tuple(lanes))


def canonical_key(state: WarehouseState) -> bytes:
    """Stable byte encoding of a state: little-endian u32 lane count and depth,
    then every slot lane-major outermost-first as u16. Equal states map to
    equal keys; lane order matters."""
    parts = [struct.pack("<II", state.lane_count, state.depth)]
    for lane in state.lanes:
        parts.append(struct.pack(f"<{len(lane)}H", *lane))
    return b"".join(parts)
