"""State scorers and the scorer registry.

A scorer maps a batch of candidate warehouse states to one finite score per
state, index-aligned; the search commits the highest-scoring candidate.
Scorers must be deterministic. Built-ins:

* ``blocking`` — negated blocking-load count, the reference baseline.
* ``qwen-ceoh`` — native transcription of an LLM-generated heuristic that
  combines priority balance, blocking penalties and lane-density weighting.
* ``gpt4o-eoh`` — native transcription of an LLM-generated heuristic built on
  logistic transforms of priority values with an accessibility latch.
* ``sandbox:<path>`` — runs the heuristic source file at <path> in an
  isolated subprocess (see sandbox_client).
"""

from __future__ import annotations

import math
from typing import Protocol, Sequence

from .core import WarehouseState, count_blocking


class ScorerError(RuntimeError):
    """A scorer could not produce a usable score vector."""


class UnknownScorerError(ValueError):
    pass


class Scorer(Protocol):
    name: str

    def score_states(self, states: Sequence[WarehouseState]) -> list[float]: ...


def score_blocking_baseline(states: Sequence[WarehouseState]) -> list[float]:
    """score[i] = -(number of blocking loads in states[i])."""
    return [-count_blocking(s) for s in states]


def score_qwen_ceoh(states: Sequence[WarehouseState]) -> list[float]:
    """Priority-balance / blocking-penalty / density-weighted scorer.

    Transcribed verbatim from generated code, quirks included: the priority
    balance sums over empty slots too (contributing 0), and the blocking
    penalty decays with the distance j from the innermost slot.
    """
    scores: list[float] = []
    for ws in states:
        state = ws.lanes
        score = 0.0
        total_units = sum(len([unit for unit in lane if unit != 0]) for lane in state)
        num_lanes = len(state)

        for lane in state:
            highest_priority_seen = float("inf")
            blocking_occurred = False
            non_zero_count = len([unit for unit in lane if unit != 0])
            density_weight = (non_zero_count / total_units) ** 2 if total_units > 0 else 1
            block_penalty_factor = 4 + density_weight * num_lanes * 1.2
            priority_balance = sum(unit * (5 - unit) for unit in lane)

            for j, unit in enumerate(reversed(lane)):
                if unit != 0:
                    if unit > highest_priority_seen:
                        penalty = (unit**2) * block_penalty_factor * (0.9**j)
                        score -= penalty
                        blocking_occurred = True
                    else:
                        highest_priority_seen = unit

            score += priority_balance * density_weight * 1.8
            if not blocking_occurred:
                score += non_zero_count**2 * (1 + density_weight * 0.6)

        scores.append(score)
    return scores


def score_gpt4o_eoh(states: Sequence[WarehouseState]) -> list[float]:
    """Logistic-transform scorer with a per-lane accessibility latch.

    Transcribed verbatim from generated code. Slots are compared by raw value
    (empty slots take part as 0); the bonus accumulates until the first
    outward priority drop flips the latch.
    """
    scores: list[float] = []
    for ws in states:
        state = ws.lanes
        score = 0.0
        for stack in state:
            bonus = 0.0
            penalty = 0.0
            can_access = True
            for i in range(len(stack) - 1, -1, -1):
                priority_adjustment = 1 / (1 + math.exp(-0.7 * stack[i]))
                if can_access:
                    bonus += stack[i] * (1 + math.exp(-0.5 * i))
                if i > 0 and stack[i] < stack[i - 1]:
                    penalty += (
                        (1 - priority_adjustment)
                        * (stack[i - 1] - stack[i])
                        * (1 / (1 + math.exp(0.5 * i)))
                    )
                    can_access = False
            score += bonus - penalty
        scores.append(score)
    return scores


class FunctionScorer:
    """Wraps a pure scoring function as a Scorer."""

    def __init__(self, name: str, fn) -> None:
        self.name = name
        self._fn = fn

    def score_states(self, states: Sequence[WarehouseState]) -> list[float]:
        return self._fn(states)


_BUILTINS = {
    "blocking": score_blocking_baseline,
    "qwen-ceoh": score_qwen_ceoh,
    "gpt4o-eoh": score_gpt4o_eoh,
}

SANDBOX_PREFIX = "sandbox:"


def available_scorers() -> list[str]:
    return sorted(_BUILTINS) + [f"{SANDBOX_PREFIX}<path>"]


def lookup_scorer(name: str) -> Scorer:
    """Resolve a scorer by registry name; sandbox scorers spawn lazily."""
    if name in _BUILTINS:
        return FunctionScorer(name, _BUILTINS[name])
    if name.startswith(SANDBOX_PREFIX):
        from .sandbox_client import SandboxScorer

        path = name[len(SANDBOX_PREFIX) :]
        if not path:
            raise UnknownScorerError("sandbox scorer needs a heuristic file: sandbox:<path>")
        return SandboxScorer.from_file(path)
    raise UnknownScorerError(
        f"unknown scorer {name!r}; available: {', '.join(available_scorers())}"
    )
