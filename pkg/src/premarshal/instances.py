"""Seeded instance generation, JSON persistence, and the blocking-count move lower bound.

Generation is a pure function of the config: a SplitMix64 stream seeded with
``config.seed`` drives every draw, in a fixed order (all priority classes
first, then one lane choice per load), so instances are byte-identical across
runs and platforms.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .core import MalformedLaneError, WarehouseState, count_blocking, validate_lane

_MASK64 = (1 << 64) - 1

# Attempts at redrawing a degenerate (lower bound 0) instance before giving up.
_MAX_REDRAWS = 10_000


class InstanceError(ValueError):
    """Config cannot produce a usable instance."""


class InstanceFormatError(ValueError):
    """An instance file is malformed; the message carries field context."""


class SplitMix64:
    """Deterministic 64-bit PRNG; documented so instances are portable."""

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform draw in [0, n) by modulo; bias is negligible for small n."""
        return self.next_u64() % n


@dataclass(frozen=True, slots=True)
class InstanceConfig:
    bay_rows: int
    bay_cols: int
    warehouse_x: int
    warehouse_y: int
    fill_pct: float
    priority_classes: int
    seed: int

    def __post_init__(self) -> None:
        for name in ("bay_rows", "bay_cols", "warehouse_x", "warehouse_y", "priority_classes"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise InstanceError(f"{name} must be an integer >= 1, got {v!r}")
        if not (0.0 < self.fill_pct < 1.0):
            raise InstanceError(f"fill_pct must be in (0, 1), got {self.fill_pct!r}")
        if not (0 <= self.seed <= _MASK64):
            raise InstanceError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    @property
    def lane_count(self) -> int:
        return self.warehouse_x * self.warehouse_y * self.bay_cols

    @property
    def depth(self) -> int:
        return self.bay_rows

    @property
    def total_slots(self) -> int:
        return self.lane_count * self.depth

    @property
    def load_count(self) -> int:
        """Number of loads: fill share of all slots, rounded half up."""
        return math.floor(self.fill_pct * self.total_slots + 0.5)


@dataclass(frozen=True, slots=True)
class Instance:
    config: InstanceConfig
    initial: WarehouseState
    lower_bound: int

    @property
    def instance_id(self) -> str:
        c = self.config
        return (
            f"bay{c.bay_rows}x{c.bay_cols}-wh{c.warehouse_x}x{c.warehouse_y}"
            f"-fill{c.fill_pct:g}-p{c.priority_classes}-seed{c.seed}"
        )


def lower_bound_blocking(state: WarehouseState) -> int:
    """Move lower bound: every blocking load must be relocated at least once."""
    return count_blocking(state)


def generate_instance(config: InstanceConfig) -> Instance:
    """Deterministically generate an instance with lower bound >= 1.

    Draw order per attempt: one priority class per load (uniform in 1..P),
    then one destination lane per load (uniform over lanes with free depth).
    Within a lane, earlier-assigned loads sit deeper. Attempts with a
    blockage-free result are discarded and redrawn from the same stream.
    """
    k = config.load_count
    if k >= config.total_slots:
        raise InstanceError(
            f"fill_pct {config.fill_pct} fills all {config.total_slots} slots; no move is possible"
        )
    if k < 2 or config.priority_classes < 2 or config.depth < 2:
        raise InstanceError(
            "config cannot produce a blocked state: needs >= 2 loads, >= 2 priority classes "
            "and lane depth >= 2"
        )
    rng = SplitMix64(config.seed)
    for _ in range(_MAX_REDRAWS):
        priorities = [1 + rng.below(config.priority_classes) for _ in range(k)]
        counts = [0] * config.lane_count
        per_lane: list[list[int]] = [[] for _ in range(config.lane_count)]
        for p in priorities:
            open_lanes = [i for i, c in enumerate(counts) if c < config.depth]
            lane = open_lanes[rng.below(len(open_lanes))]
            counts[lane] += 1
            per_lane[lane].append(p)
        lanes = tuple(
            (0,) * (config.depth - len(loads)) + tuple(reversed(loads)) for loads in per_lane
        )
        state = WarehouseState(lanes)
        lb = lower_bound_blocking(state)
        if lb >= 1:
            return Instance(config=config, initial=state, lower_bound=lb)
    raise InstanceError(
        f"no instance with a positive lower bound found after {_MAX_REDRAWS} draws"
    )


def _require(cond: bool, context: str) -> None:
    if not cond:
        raise InstanceFormatError(context)


def instance_to_json(instance: Instance) -> str:
    doc = {
        "config": {
            "bay_rows": instance.config.bay_rows,
            "bay_cols": instance.config.bay_cols,
            "warehouse_x": instance.config.warehouse_x,
            "warehouse_y": instance.config.warehouse_y,
            "fill_pct": instance.config.fill_pct,
            "priority_classes": instance.config.priority_classes,
            "seed": instance.config.seed,
        },
        "lanes": instance.initial.to_lists(),
        "lower_bound": instance.lower_bound,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def instance_from_json(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceFormatError(f"not valid JSON: {e}") from e
    _require(isinstance(doc, dict), "top level must be an object")
    _require("config" in doc, "missing field 'config'")
    _require("lanes" in doc, "missing field 'lanes'")
    _require("lower_bound" in doc, "missing field 'lower_bound'")
    cfg = doc["config"]
    _require(isinstance(cfg, dict), "'config' must be an object")
    keys = (
        "bay_rows",
        "bay_cols",
        "warehouse_x",
        "warehouse_y",
        "fill_pct",
        "priority_classes",
        "seed",
    )
    for key in keys:
        _require(key in cfg, f"config: missing field '{key}'")
    try:
        config = InstanceConfig(**{k: cfg[k] for k in keys})
    except InstanceError as e:
        raise InstanceFormatError(f"config: {e}") from e
    lanes = doc["lanes"]
    _require(isinstance(lanes, list) and lanes, "'lanes' must be a non-empty array")
    for i, lane in enumerate(lanes):
        _require(
            isinstance(lane, list) and all(isinstance(v, int) for v in lane),
            f"lanes[{i}]: must be an array of integers",
        )
        _require(len(lane) == config.depth, f"lanes[{i}]: depth {len(lane)} != {config.depth}")
        _require(validate_lane(lane), f"lanes[{i}]: zeros must form a prefix")
        for v in lane:
            _require(
                0 <= v <= config.priority_classes,
                f"lanes[{i}]: slot value {v} outside 0..{config.priority_classes}",
            )
    _require(
        len(lanes) == config.lane_count,
        f"lanes: count {len(lanes)} != {config.lane_count} implied by config",
    )
    state = WarehouseState.from_lists(lanes)
    loads = sum(1 for lane in state.lanes for v in lane if v != 0)
    _require(
        loads == config.load_count,
        f"lanes: {loads} loads != {config.load_count} implied by fill_pct",
    )
    lb = doc["lower_bound"]
    _require(isinstance(lb, int), "'lower_bound' must be an integer")
    _require(
        lb == count_blocking(state),
        f"lower_bound {lb} inconsistent with state (blocking count {count_blocking(state)})",
    )
    return Instance(config=config, initial=state, lower_bound=lb)


def write_instance(instance: Instance, path: str | Path) -> None:
    Path(path).write_text(instance_to_json(instance), encoding="utf-8")


def read_instance(path: str | Path) -> Instance:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InstanceFormatError(f"{path}: {e}") from e
    try:
        return instance_from_json(text)
    except (InstanceFormatError, MalformedLaneError) as e:
        raise InstanceFormatError(f"{path}: {e}") from e
