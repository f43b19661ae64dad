"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with -s to watch them stream). Budgets and tolerances are
asserted, not aspirational. The suite needs no sandbox runner: frozen fixture
vectors stand in for live oracle execution."""

from pathlib import Path
import hashlib
import json
import math
import random
import time

import pytest

from premarshal.core import WarehouseState, canonical_key, is_blockage_free, validate_lane, blocking_indices
from premarshal.evolution import (
    EvolutionConfig,
    RunLogSink,
    build_prompt,
    default_templates,
    run_evolution,
)
from premarshal.fitness import fitness_value
from premarshal.heuristics import lookup_scorer, score_gpt4o_eoh, score_qwen_ceoh
from premarshal.instances import InstanceConfig, generate_instance
from premarshal.search import replay, solve

from helpers import bfs_optimal_moves

FIXTURES = Path(__file__).parent / "fixtures"


def report(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    line = f"{status}: {name}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


class TestAcceptance:
    def test_blocking_and_validity_examples(self):
        t0 = time.perf_counter()
        blocking_ok = (
            blocking_indices([0, 4, 1]) == {1}
            and blocking_indices([3, 3, 2]) == {0, 1}
            and blocking_indices([0, 5, 1, 5, 2]) == {1, 3}
            and blocking_indices([0, 4, 4, 3]) == {1, 2}
        )
        validity_ok = (
            validate_lane([1, 1, 0, 0]) is False
            and validate_lane([2, 0, 2]) is False
            and validate_lane([0, 0, 1, 2]) is True
            and validate_lane([1, 2, 3, 3]) is True
        )
        elapsed = time.perf_counter() - t0
        report(
            "worked examples (blocking sets + lane validity)",
            blocking_ok and validity_ok and elapsed < 1.0,
            f"{elapsed:.3f}s",
        )

    def test_prompt_fidelity(self):
        templates = default_templates()
        ceoh = build_prompt("I0", "ceoh", [], templates)
        eoh = build_prompt("I0", "eoh", [], templates)
        desc = ceoh.section("problem_description") or ""
        required_fragments = (
            "A 0 represents an empty slot.",
            "[[[0, 2, 3], [0, 5, 5], [5, 1, 1]], [[0, 2, 3], [5, 5, 5], [0, 1, 1]], "
            "[[5, 2, 3], [1, 5, 5], [0, 0, 1]]]",
            "[[[2, 2, 3, 5], [0, 3, 5, 4], [0, 0, 2, 2]], [[0, 0, 3, 5], [2, 3, 5, 4], "
            "[0, 2, 2, 2]], [[0, 2, 3, 5], [0, 0, 5, 4], [3, 2, 2, 2]], [[0, 0, 3, 5], "
            "[0, 3, 5, 4], [2, 2, 2, 2]]]",
            "[-3, -1, -4]",
            "[0, 1, 3, 1]",
        )
        fragments_ok = all(f in desc for f in required_fragments)
        golden = (FIXTURES / "golden_i0_ceoh.txt").read_bytes()
        hash_ok = hashlib.sha256(ceoh.text().encode("utf-8")).digest() == hashlib.sha256(
            golden
        ).digest()
        eoh_ok = eoh.section("problem_description") is None and eoh.text() == (
            FIXTURES / "golden_i0_eoh.txt"
        ).read_text(encoding="utf-8")
        report(
            "prompt fidelity (CEoH I0 golden hash, EoH omits description)",
            fragments_ok and hash_ok and eoh_ok,
        )

    def test_fitness_equation(self):
        t0 = time.perf_counter()
        exact_ok = fitness_value([12], [10]) == 0.2
        zero_ok = fitness_value([4, 9, 17], [4, 9, 17]) == 0.0
        rng = random.Random(2024)
        monotone_ok = True
        for _ in range(1000):
            n = rng.randint(1, 8)
            lbs = [rng.randint(1, 25) for _ in range(n)]
            ms = [lb + rng.randint(0, 40) for lb in lbs]
            i = rng.randrange(n)
            bumped = list(ms)
            bumped[i] += rng.randint(1, 12)
            if fitness_value(bumped, lbs) < fitness_value(ms, lbs):
                monotone_ok = False
                break
        elapsed = time.perf_counter() - t0
        report(
            "fitness equation (0.2 anchor, zero at bounds, monotone x1000)",
            exact_ok and zero_ok and monotone_ok and elapsed < 1.0,
            f"{elapsed:.3f}s",
        )

    def _seeded_suite(self):
        instances = []
        fills = (0.4, 0.5, 0.6)
        for seed in range(100):
            for rows, cols in ((3, 3), (4, 4)):
                cfg = InstanceConfig(
                    bay_rows=rows, bay_cols=cols, warehouse_x=1, warehouse_y=1,
                    fill_pct=fills[seed % 3], priority_classes=5, seed=seed,
                )
                instances.append(generate_instance(cfg))
        return instances

    def test_search_soundness_suite(self):
        t0 = time.perf_counter()
        scorer = lookup_scorer("blocking")
        instances = self._seeded_suite()
        assert len(instances) == 200
        for inst in instances:
            res = solve(inst.initial, scorer, 100)
            state = inst.initial
            keys = {canonical_key(state)}
            for mv in res.moves:
                state = replay(state, [mv])  # raises on any illegal move
                key = canonical_key(state)
                assert key not in keys, "committed state repeated"
                keys.add(key)
            if res.solved:
                assert is_blockage_free(state)
                assert res.move_count == len(res.moves) <= 100
            else:
                assert res.move_count == 100
        elapsed = time.perf_counter() - t0
        report(
            "search soundness (200 seeded instances, all moves legal, no revisits)",
            elapsed < 30.0,
            f"{elapsed:.1f}s",
        )

    def test_oracle_optimality_floor(self):
        t0 = time.perf_counter()
        scorer = lookup_scorer("blocking")
        small = [
            inst
            for inst in self._seeded_suite()
            if inst.initial.lane_count <= 3
            and inst.initial.lane_count * inst.initial.depth <= 9
        ]
        assert small, "seeded suite must contain BFS-tractable instances"
        checked_floor = 0
        checked_optimal = 0
        for inst in small:
            optimal = bfs_optimal_moves(inst.initial)
            if optimal is None:
                continue
            assert inst.lower_bound <= optimal, (
                f"{inst.instance_id}: lower bound {inst.lower_bound} > optimal {optimal}"
            )
            checked_floor += 1
            if optimal == 1 and inst.lower_bound == 1:
                res = solve(inst.initial, scorer, 100)
                assert res.solved and res.move_count == 1, (
                    f"{inst.instance_id}: greedy missed the single-move optimum"
                )
                checked_optimal += 1
        elapsed = time.perf_counter() - t0
        report(
            "oracle optimality floor (BFS bound soundness + single-move optima)",
            checked_floor >= 50 and checked_optimal >= 5 and elapsed < 60.0,
            f"{checked_floor} bounds, {checked_optimal} optima, {elapsed:.1f}s",
        )

    def test_transcription_fixtures(self):
        doc = json.loads((FIXTURES / "builtin_scorer_vectors.json").read_text())
        states = [WarehouseState.from_lists(s) for s in doc["states"]]
        assert len(states) >= 20
        qwen = score_qwen_ceoh(states)
        gpt4o = score_gpt4o_eoh(states)
        vec_ok = all(
            abs(a - b) <= 1e-9 for a, b in zip(qwen, doc["scores"]["qwen-ceoh"])
        ) and all(abs(a - b) <= 1e-9 for a, b in zip(gpt4o, doc["scores"]["gpt4o-eoh"]))
        anchor_state = [WarehouseState.from_lists([[0, 1]])]
        anchors_ok = score_qwen_ceoh(anchor_state) == [8.8] and abs(
            score_gpt4o_eoh(anchor_state)[0] - (1 + math.exp(-0.5))
        ) <= 1e-4
        report(
            "transcription fixtures (frozen vectors at 1e-9, hand-traced anchors)",
            vec_ok and anchors_ok,
            f"{len(states)} states",
        )

    def test_desk_scale_solve_capability(self):
        t0 = time.perf_counter()
        scorer = lookup_scorer("qwen-ceoh")
        solved = 0
        for seed in range(10):
            cfg = InstanceConfig(
                bay_rows=5, bay_cols=5, warehouse_x=1, warehouse_y=1,
                fill_pct=0.6, priority_classes=5, seed=seed,
            )
            inst = generate_instance(cfg)
            res = solve(inst.initial, scorer, 100)
            if res.solved:
                assert is_blockage_free(replay(inst.initial, res.moves))
                solved += 1
        elapsed = time.perf_counter() - t0
        report(
            "desk-scale solve capability (qwen-ceoh on 5x5/60% seeds 0-9)",
            solved >= 9 and elapsed < 60.0,
            f"{solved}/10 solved, {elapsed:.2f}s",
        )

    def test_evolution_dry_run(self, tmp_path):
        t0 = time.perf_counter()

        class ScriptedLlm:
            def __init__(self):
                self.calls = 0

            def __call__(self, bundle):
                self.calls += 1
                if self.calls % 10 == 0:  # 10% deliberately malformed
                    return "no brace, no code, nothing usable"
                tag = hashlib.sha256(str(self.calls).encode()).hexdigest()[:6]
                return (
                    f"{{scripted variant {tag}}}\n"
                    "```python\n"
                    "def select_next_move(warehouse_states):\n"
                    f"    return [-sum(v for lane in s for v in lane) % 0x{tag} "
                    "for s in warehouse_states]\n"
                    "```"
                )

        def stub_evaluator(code: str) -> float:
            return int(hashlib.sha256(code.encode()).hexdigest()[:8], 16) / 0xFFFFFFFF

        config = EvolutionConfig(mode="ceoh", generations=2, rng_seed=11)
        logs = []
        final = None
        for run in range(2):
            path = tmp_path / f"dry{run}.jsonl"
            sink = RunLogSink(path)
            final = run_evolution(config, stub_evaluator, sink, llm=ScriptedLlm())
            sink.close()
            logs.append(path.read_bytes())
        records = [json.loads(line) for line in logs[0].decode().splitlines()]
        count_ok = len(records) == 40 + 160
        population_ok = len(final) == 20
        evaluated = [r for r in records if r["status"] == "evaluated"]
        best = None
        elitism_ok = True
        for g in range(0, 3):
            upto = [r["fitness"] for r in evaluated if r["generation"] <= g]
            current = min(upto)
            if best is not None and current > best:
                elitism_ok = False
            best = current
        identical_ok = logs[0] == logs[1]
        elapsed = time.perf_counter() - t0
        report(
            "evolution dry run (200 records, population 20, elitism, byte-identical log)",
            count_ok and population_ok and elitism_ok and identical_ok and elapsed < 300.0,
            f"{len(records)} records, {elapsed:.1f}s",
        )
