"""Operator command line: generate instances, solve, score, evaluate, evolve.

Exit codes: 0 success, 1 domain error (bad file, unsolved precondition,
unreachable endpoint...), 2 usage error. A JSON config file passed as
``premarshal --config FILE <command> ...`` supplies defaults for any flag of
the command (command-line values win)."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .evolution import (
    CredentialsError,
    EvaluationError,
    EvolutionConfig,
    LlmConfig,
    PromptError,
    RunAborted,
    RunError,
    RunLogSink,
    TemplateSet,
    ensure_credentials,
    run_evolution,
)
from .core import MalformedLaneError, WarehouseState, validate_state
from .fitness import evaluate
from .heuristics import ScorerError, UnknownScorerError, lookup_scorer
from .instances import (
    Instance,
    InstanceConfig,
    InstanceError,
    InstanceFormatError,
    generate_instance,
    read_instance,
    write_instance,
)
from .sandbox_client import SandboxError, SandboxScorer, SandboxSession
from .search import replay, solve

DOMAIN_ERRORS = (
    CredentialsError,
    EvaluationError,
    InstanceError,
    InstanceFormatError,
    MalformedLaneError,
    PromptError,
    RunAborted,
    RunError,
    SandboxError,
    ScorerError,
    UnknownScorerError,
    ValueError,
    OSError,
)


def _dims(text: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        dims = (int(a), int(b))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected ROWSxCOLS, got {text!r}")
    if dims[0] < 1 or dims[1] < 1:
        raise argparse.ArgumentTypeError(f"dimensions must be >= 1, got {text!r}")
    return dims


def _seed_range(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            seeds = list(range(int(lo), int(hi) + 1))
        else:
            seeds = [int(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B or a single seed, got {text!r}")
    if not seeds or any(s < 0 for s in seeds):
        raise argparse.ArgumentTypeError(f"seeds must be a non-empty non-negative range: {text!r}")
    return seeds


def _fill(text: str) -> float:
    try:
        f = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not (0.0 < f < 1.0):
        raise argparse.ArgumentTypeError(f"fill must be strictly between 0 and 1, got {f}")
    return f


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {n}")
    return n


def _load_instances_dir(directory: str) -> list[Instance]:
    paths = sorted(Path(directory).glob("*.json"))
    if not paths:
        raise InstanceFormatError(f"no instance files (*.json) in {directory}")
    return [read_instance(p) for p in paths]


def cmd_generate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for seed in args.seeds:
        config = InstanceConfig(
            bay_rows=args.bay[0],
            bay_cols=args.bay[1],
            warehouse_x=args.warehouse[0],
            warehouse_y=args.warehouse[1],
            fill_pct=args.fill,
            priority_classes=args.classes,
            seed=seed,
        )
        instance = generate_instance(config)
        write_instance(instance, out / f"{instance.instance_id}.json")
    print(f"wrote {len(args.seeds)} instance(s) to {out}")
    return 0


def cmd_solve(args) -> int:
    instance = read_instance(args.instance)
    scorer = lookup_scorer(args.scorer)
    try:
        result = solve(instance.initial, scorer, args.m_max)
    finally:
        close = getattr(scorer, "close", None)
        if close is not None:
            close()
    if result.solved:
        final = replay(instance.initial, result.moves)
        validate_state(final)
        print(
            f"solved m={result.move_count} lb={instance.lower_bound} "
            f"time={result.wall_time:.3f}s"
        )
    else:
        print(
            f"unsolved m={result.move_count} lb={instance.lower_bound} "
            f"reason={result.failure_reason!r} time={result.wall_time:.3f}s"
        )
    if args.out:
        doc = {
            "instance": str(args.instance),
            "moves": [[s, d] for s, d in result.moves],
            "solved": result.solved,
            "m": result.move_count,
        }
        Path(args.out).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return 0


def cmd_score(args) -> int:
    try:
        doc = json.loads(Path(args.state).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise InstanceFormatError(f"{args.state}: {e}") from e
    if not isinstance(doc, list) or not doc or not isinstance(doc[0], list) or not doc[0]:
        raise InstanceFormatError(f"{args.state}: expected a nested list of lanes or states")
    # Two-level nesting is one state, three-level a batch of states.
    single = not isinstance(doc[0][0], list)
    try:
        states = [WarehouseState.from_lists(doc)] if single else [
            WarehouseState.from_lists(s) for s in doc
        ]
    except (TypeError, ValueError) as e:
        raise InstanceFormatError(f"{args.state}: {e}") from e
    for s in states:
        validate_state(s)
    scorer = lookup_scorer(args.scorer)
    try:
        scores = scorer.score_states(states)
    finally:
        close = getattr(scorer, "close", None)
        if close is not None:
            close()
    print(json.dumps(scores[0] if single else scores))
    return 0


def cmd_evaluate(args) -> int:
    instances = _load_instances_dir(args.instances)
    report = evaluate(
        args.scorer,
        instances,
        m_max=args.m_max,
        per_instance_timeout=args.timeout,
        workers=args.workers,
    )
    width = max(len(r.instance_id) for r in report.per_instance)
    print(f"{'instance':<{width}}  {'lb':>4}  {'m':>5}  solved  time")
    for r in report.per_instance:
        print(
            f"{r.instance_id:<{width}}  {r.lower_bound:>4}  {r.moves:>5}  "
            f"{str(r.solved).lower():<6}  {r.solve_time:.3f}s"
        )
    print(f"f = {report.fitness:.6g}")
    if args.out:
        Path(args.out).write_text(
            json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8"
        )
    return 0


def make_sandbox_evaluator(
    instances: list[Instance],
    m_max: int,
    timeout_s: float,
    command: list[str] | None = None,
):
    """Code evaluator for the evolution loop: generated code runs only in the
    sandbox runner. Code that fails to load is invalid; code that loads but
    fails while scoring is charged m_max per failed instance."""

    def evaluate_code(code: str) -> float:
        session = SandboxSession(command)
        try:
            session.start()
            session.load(code)
        except SandboxError as e:
            raise EvaluationError(f"sandbox load: {e}") from e
        finally:
            session.shutdown()
        factory = lambda: SandboxScorer(code, name="sandbox:<generated>", command=command)  # noqa: E731
        report = evaluate(
            factory, instances, m_max=m_max, per_instance_timeout=timeout_s
        )
        return report.fitness

    return evaluate_code


def cmd_evolve(args) -> int:
    llm = LlmConfig(endpoint=args.llm_endpoint, model=args.llm_model)
    ensure_credentials(llm)
    config = EvolutionConfig(
        mode=args.mode,
        population_size=args.pop,
        generations=args.generations,
        samples_per_strategy=args.samples,
        parents=args.parents,
        init_calls=args.init_calls if args.init_calls else 2 * args.pop,
        m_max=args.m_max,
        rng_seed=args.seed,
        llm=llm,
    )
    instances = _load_instances_dir(args.instances)
    evaluator = make_sandbox_evaluator(instances, config.m_max, args.timeout)
    templates = TemplateSet.load(args.templates) if args.templates else None
    sink = RunLogSink(args.log)
    checkpoint = args.checkpoint or f"{args.log}.checkpoint.json"
    try:
        population = run_evolution(
            config,
            evaluator,
            sink,
            templates=templates,
            checkpoint_path=checkpoint,
        )
    finally:
        sink.close()
    best = population[0]
    print(f"final population: {len(population)} heuristics")
    print(f"best fitness: {best.fitness:.6g} (record id {best.id}, strategy {best.strategy})")
    return 0


def build_parser(config_defaults: dict | None = None) -> argparse.ArgumentParser:
    config_defaults = dict(config_defaults or {})
    config_defaults.pop("fn", None)
    config_defaults.pop("command", None)
    parser = argparse.ArgumentParser(
        prog="premarshal",
        description="Unit-load pre-marshalling: instances, greedy solves, heuristic evolution.",
    )

    def req(dest: str) -> bool:
        # A flag covered by the config file no longer has to appear on the line.
        return dest not in config_defaults

    parser.add_argument("--config", help="JSON file with default values for the command's flags")
    sub = parser.add_subparsers(dest="command", required=True)
    subparsers = []

    p = sub.add_parser("generate", help="write seeded instance files")
    subparsers.append(p)
    p.add_argument("--bay", type=_dims, required=req("bay"), help="bay layout ROWSxCOLS, e.g. 5x5")
    p.add_argument("--warehouse", type=_dims, required=req("warehouse"), help="warehouse layout XxY")
    p.add_argument("--fill", type=_fill, required=req("fill"), help="fill share in (0,1), e.g. 0.6")
    p.add_argument("--classes", type=_positive, required=req("classes"), help="priority classes")
    p.add_argument("--seeds", type=_seed_range, required=req("seeds"), help="range A..B or one seed")
    p.add_argument("--out", required=req("out"), help="output directory")
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("solve", help="solve one instance with a scorer")
    subparsers.append(p)
    p.add_argument("--instance", required=req("instance"))
    p.add_argument("--scorer", required=req("scorer"))
    p.add_argument("--m-max", type=_positive, default=100)
    p.add_argument("--out", help="write the solution JSON here")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("score", help="print scorer output for a state file")
    subparsers.append(p)
    p.add_argument("--state", required=req("state"), help="JSON file: one state or a list of states")
    p.add_argument("--scorer", required=req("scorer"))
    p.set_defaults(fn=cmd_score)

    p = sub.add_parser("evaluate", help="fitness of a scorer over an instance directory")
    subparsers.append(p)
    p.add_argument("--instances", required=req("instances"))
    p.add_argument("--scorer", required=req("scorer"))
    p.add_argument("--m-max", type=_positive, default=100)
    p.add_argument("--timeout", type=float, default=60.0, help="per-instance seconds")
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--out", help="write the report JSON here")
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("evolve", help="run the heuristic-evolution loop")
    subparsers.append(p)
    p.add_argument("--mode", choices=("ceoh", "eoh"), default="ceoh")
    p.add_argument("--instances", required=req("instances"))
    p.add_argument("--generations", type=_positive, default=20)
    p.add_argument("--pop", type=_positive, default=20)
    p.add_argument("--samples", type=_positive, default=20)
    p.add_argument("--parents", type=_positive, default=5)
    p.add_argument("--init-calls", type=_positive, default=None)
    p.add_argument("--m-max", type=_positive, default=100)
    p.add_argument("--timeout", type=float, default=60.0, help="per-instance seconds")
    p.add_argument("--llm-endpoint", required=req("llm_endpoint"))
    p.add_argument("--llm-model", required=req("llm_model"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--log", required=req("log"), help="append-only JSONL run log")
    p.add_argument("--templates", help="directory overriding the packaged prompt templates")
    p.add_argument("--checkpoint", help="checkpoint path (default: <log>.checkpoint.json)")
    p.set_defaults(fn=cmd_evolve)

    if config_defaults:
        # Subparsers re-parse into a fresh namespace, so defaults must be
        # installed on each of them, not on the top-level parser.
        for sp in subparsers:
            sp.set_defaults(**config_defaults)
    return parser


def main(argv: list[str] | None = None) -> int:
    # Pre-scan for --config so its values become the command's defaults.
    argv = list(sys.argv[1:] if argv is None else argv)
    defaults: dict = {}
    if "--config" in argv:
        scout = argparse.ArgumentParser(prog="premarshal", add_help=False)
        try:
            cfg_path = argv[argv.index("--config") + 1]
            cfg = json.loads(Path(cfg_path).read_text(encoding="utf-8"))
        except (IndexError, OSError, json.JSONDecodeError) as e:
            scout.error(f"--config: {e}")
        if not isinstance(cfg, dict):
            scout.error("--config: file must hold a JSON object")
        defaults = {str(k).replace("-", "_"): v for k, v in cfg.items()}
    parser = build_parser(defaults)
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except DOMAIN_ERRORS as e:
        print(f"premarshal: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
