"""Sandbox runner: executes one heuristic behind a stdio JSON protocol.

Each line on stdin is one request object; each request gets exactly one
response line on stdout. stderr carries diagnostics only; exit code is 0 on a
clean shutdown.

    {"id": 1, "kind": "load", "code": "def select_next_move(...): ..."}
    {"id": 2, "kind": "score", "warehouse_states": [[[0, 1]], [[5, 1]]]}
    {"id": 3, "kind": "shutdown"}

Responses are ``{"id": n, "ok": true, "scores": [...]}`` or
``{"id": n, "ok": false, "error": {"kind": k, "message": m}}`` with error
kinds syntax, runtime, bad_shape, non_numeric, timeout, protocol.

The heuristic runs in a restricted namespace: a curated builtin set, imports
limited to math-adjacent standard modules, no filesystem, network or process
access. This contains accidents, not a determined adversary; callers enforce
wall-clock timeouts by killing the process. Ambient random state is re-seeded
to a constant at every load so stray randomness is at least reproducible.
"""

from __future__ import annotations

import argparse
import builtins
import json
import math
import random
import sys

FUNCTION_NAME = "select_next_move"

ALLOWED_MODULES = {
    "math",
    "cmath",
    "statistics",
    "itertools",
    "functools",
    "operator",
    "collections",
    "heapq",
    "bisect",
    "random",
}

_SAFE_BUILTIN_NAMES = (
    "abs", "all", "any", "bool", "dict", "divmod", "enumerate", "filter",
    "float", "frozenset", "int", "isinstance", "issubclass", "iter", "len",
    "list", "map", "max", "min", "next", "pow", "range", "repr", "reversed",
    "round", "set", "slice", "sorted", "str", "sum", "tuple", "zip",
    "ValueError", "TypeError", "KeyError", "IndexError", "ZeroDivisionError",
    "ArithmeticError", "Exception", "StopIteration", "True", "False", "None",
)


def _restricted_import(name, globals=None, locals=None, fromlist=(), level=0):
    root = name.split(".")[0]
    if level != 0 or root not in ALLOWED_MODULES:
        raise ImportError(f"import of {name!r} is not allowed in the sandbox")
    return __import__(name, globals, locals, fromlist, 0)


def _stderr_print(*args, **kwargs):
    kwargs.pop("file", None)
    print(*args, file=sys.stderr, **kwargs)


def make_namespace() -> dict:
    safe = {name: getattr(builtins, name) for name in _SAFE_BUILTIN_NAMES if hasattr(builtins, name)}
    safe["True"], safe["False"], safe["None"] = True, False, None
    safe["__import__"] = _restricted_import
    safe["print"] = _stderr_print  # stdout belongs to the protocol
    return {"__builtins__": safe, "__name__": "heuristic"}


class Session:
    """Protocol state machine for one heuristic."""

    def __init__(self) -> None:
        self.fn = None
        self.last_id: int | None = None

    def handle(self, request: dict) -> dict:
        req_id = request.get("id")
        if not isinstance(req_id, int) or (self.last_id is not None and req_id <= self.last_id):
            return _error(req_id, "protocol", f"request ids must be strictly increasing integers, got {req_id!r}")
        self.last_id = req_id
        kind = request.get("kind")
        if kind == "load":
            return self._load(req_id, request.get("code"))
        if kind == "score":
            return self._score(req_id, request.get("warehouse_states"))
        if kind == "shutdown":
            return {"id": req_id, "ok": True}
        return _error(req_id, "protocol", f"unknown request kind {kind!r}")

    def _load(self, req_id: int, code) -> dict:
        if not isinstance(code, str):
            return _error(req_id, "protocol", "'code' must be a string")
        namespace = make_namespace()
        random.seed(0)
        try:
            compiled = compile(code, "<heuristic>", "exec")
        except SyntaxError as e:
            return _error(req_id, "syntax", str(e))
        try:
            exec(compiled, namespace)
        except BaseException as e:  # noqa: BLE001 - anything the code throws
            return _error(req_id, "runtime", f"{type(e).__name__}: {e}")
        fn = namespace.get(FUNCTION_NAME)
        if not callable(fn):
            return _error(req_id, "runtime", f"{FUNCTION_NAME} not defined")
        self.fn = fn
        return {"id": req_id, "ok": True}

    def _score(self, req_id: int, states) -> dict:
        if self.fn is None:
            return _error(req_id, "protocol", "score before load")
        if not isinstance(states, list):
            return _error(req_id, "protocol", "'warehouse_states' must be a list")
        try:
            result = self.fn(states)
        except BaseException as e:  # noqa: BLE001
            return _error(req_id, "runtime", f"{type(e).__name__}: {e}")
        if not isinstance(result, (list, tuple)):
            return _error(req_id, "bad_shape", f"expected a list of numbers, got {type(result).__name__}")
        if len(result) != len(states):
            return _error(
                req_id, "bad_shape", f"{len(result)} scores for {len(states)} states"
            )
        scores: list[float] = []
        for value in result:
            if isinstance(value, (list, tuple, dict)):
                return _error(req_id, "bad_shape", "scores must be a flat list of numbers")
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                return _error(req_id, "non_numeric", f"score {value!r} is not a number")
            if not math.isfinite(value):
                return _error(req_id, "non_numeric", f"score {value!r} is not finite")
            scores.append(float(value))
        return {"id": req_id, "ok": True, "scores": scores}


def _error(req_id, kind: str, message: str) -> dict:
    _stderr_print(f"[sandbox] {kind}: {message}")
    return {"id": req_id, "ok": False, "error": {"kind": kind, "message": message}}


def apply_limits(memory_mb: int | None, cpu_s: int | None) -> None:
    """Best-effort rlimits; platforms without the resource module skip them."""
    try:
        import resource
    except ImportError:
        return
    if memory_mb:
        try:
            limit = memory_mb * 1024 * 1024
            resource.setrlimit(resource.RLIMIT_AS, (limit, limit))
        except (ValueError, OSError) as e:
            _stderr_print(f"[sandbox] cannot set memory limit: {e}")
    if cpu_s:
        try:
            resource.setrlimit(resource.RLIMIT_CPU, (cpu_s, cpu_s))
        except (ValueError, OSError) as e:
            _stderr_print(f"[sandbox] cannot set cpu limit: {e}")


def serve(stdin=None, stdout=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    session = Session()
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
        except json.JSONDecodeError as e:
            response = _error(None, "protocol", f"request is not valid JSON: {e}")
            request = None
        else:
            if not isinstance(request, dict):
                response = _error(None, "protocol", "request must be a JSON object")
                request = None
            else:
                response = session.handle(request)
        stdout.write(json.dumps(response) + "\n")
        stdout.flush()
        if request is not None and request.get("kind") == "shutdown" and response["ok"]:
            return 0
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="premarshal-sandbox",
        description="Heuristic sandbox runner (line-delimited JSON over stdio).",
    )
    parser.add_argument("--memory-mb", type=int, default=None, help="address-space rlimit")
    parser.add_argument("--cpu-s", type=int, default=None, help="CPU-time rlimit in seconds")
    args = parser.parse_args(argv)
    apply_limits(args.memory_mb, args.cpu_s)
    return serve()


if __name__ == "__main__":
    sys.exit(main())
