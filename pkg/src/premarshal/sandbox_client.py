"""Client side of the heuristic sandbox protocol.

Generated heuristic code is never executed in this process: a runner
subprocess (by default ``python -m premarshal_sandbox``, override with the
PREMARSHAL_SANDBOX_CMD environment variable) receives line-delimited JSON
requests over stdin and answers one JSON object per line on stdout:

    {"id": 1, "kind": "load", "code": "..."}
    {"id": 2, "kind": "score", "warehouse_states": [[[0, 1]]]}
    {"id": 3, "kind": "shutdown"}

    {"id": 1, "ok": true}
    {"id": 2, "ok": true, "scores": [8.8]}
    {"id": 2, "ok": false, "error": {"kind": "timeout", "message": "..."}}

One session serves one heuristic; timeouts kill the child and mark the
session dead. Every sandbox failure surfaces as a ScorerError so the search
records it instead of crashing.
"""

from __future__ import annotations

import json
import math
import os
import select
import shlex
import subprocess
import sys
import time
from pathlib import Path
from typing import Sequence

from .core import WarehouseState
from .heuristics import ScorerError

DEFAULT_CALL_TIMEOUT_S = 60.0
_SHUTDOWN_GRACE_S = 2.0


def default_runner_command() -> list[str]:
    env_cmd = os.environ.get("PREMARSHAL_SANDBOX_CMD", "").strip()
    if env_cmd:
        return shlex.split(env_cmd)
    return [sys.executable, "-m", "premarshal_sandbox"]


class SandboxError(RuntimeError):
    def __init__(self, kind: str, message: str) -> None:
        super().__init__(f"{kind}: {message}")
        self.kind = kind


class SandboxSession:
    """One runner subprocess speaking the line-delimited JSON protocol."""

    def __init__(self, command: Sequence[str] | None = None) -> None:
        self.command = list(command) if command else default_runner_command()
        self._proc: subprocess.Popen | None = None
        self._buf = b""
        self._next_id = 0
        self.dead = False

    # -- lifecycle

    def start(self) -> None:
        if self._proc is not None:
            return
        try:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
            )
        except OSError as e:
            self.dead = True
            raise SandboxError("protocol", f"cannot spawn runner {self.command}: {e}") from e

    def shutdown(self) -> None:
        """Best-effort clean stop; idempotent; kills after a grace period."""
        proc, self._proc = self._proc, None
        self.dead = True
        if proc is None:
            return
        try:
            if proc.poll() is None:
                req = {"id": self._next_id, "kind": "shutdown"}
                proc.stdin.write((json.dumps(req) + "\n").encode("utf-8"))
                proc.stdin.flush()
        except OSError:
            pass
        try:
            proc.wait(timeout=_SHUTDOWN_GRACE_S)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.wait()

    def __enter__(self) -> "SandboxSession":
        self.start()
        return self

    def __exit__(self, *exc) -> None:
        self.shutdown()

    # -- protocol

    def _kill(self) -> None:
        self.dead = True
        if self._proc is not None and self._proc.poll() is None:
            self._proc.kill()
            self._proc.wait()

    def _read_line(self, deadline: float) -> bytes:
        fd = self._proc.stdout.fileno()
        while b"\n" not in self._buf:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                self._kill()
                raise SandboxError("timeout", "no response before deadline; runner killed")
            ready, _, _ = select.select([fd], [], [], remaining)
            if not ready:
                continue
            chunk = os.read(fd, 65536)
            if not chunk:
                self._kill()
                raise SandboxError("protocol", "runner closed its output mid-request")
            self._buf += chunk
        line, self._buf = self._buf.split(b"\n", 1)
        return line

    def request(self, kind: str, timeout_s: float = DEFAULT_CALL_TIMEOUT_S, **fields) -> dict:
        if self.dead:
            raise SandboxError("protocol", "session is dead")
        self.start()
        req_id = self._next_id
        self._next_id += 1
        req = {"id": req_id, "kind": kind, **fields}
        deadline = time.monotonic() + timeout_s
        try:
            self._proc.stdin.write((json.dumps(req) + "\n").encode("utf-8"))
            self._proc.stdin.flush()
        except OSError as e:
            self._kill()
            raise SandboxError("protocol", f"cannot write to runner: {e}") from e
        raw = self._read_line(deadline)
        try:
            resp = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            self._kill()
            raise SandboxError("protocol", f"bad response line: {e}") from e
        if resp.get("id") != req_id:
            self._kill()
            raise SandboxError("protocol", f"response id {resp.get('id')} != request id {req_id}")
        if not resp.get("ok"):
            err = resp.get("error") or {}
            raise SandboxError(err.get("kind", "runtime"), err.get("message", "unknown error"))
        return resp

    def load(self, code: str, timeout_s: float = DEFAULT_CALL_TIMEOUT_S) -> None:
        self.request("load", timeout_s, code=code)

    def score(
        self, warehouse_states: list[list[list[int]]], timeout_s: float = DEFAULT_CALL_TIMEOUT_S
    ) -> list[float]:
        resp = self.request("score", timeout_s, warehouse_states=warehouse_states)
        scores = resp.get("scores")
        if not isinstance(scores, list) or len(scores) != len(warehouse_states):
            raise SandboxError("bad_shape", "scores missing or of wrong length")
        out: list[float] = []
        for s in scores:
            if isinstance(s, bool) or not isinstance(s, (int, float)) or not math.isfinite(s):
                raise SandboxError("non_numeric", f"score {s!r} is not a finite number")
            out.append(float(s))
        return out


class SandboxScorer:
    """Scorer facade over one sandbox session; spawns and loads lazily."""

    def __init__(
        self,
        code: str,
        name: str = "sandbox:<inline>",
        command: Sequence[str] | None = None,
        call_timeout_s: float = DEFAULT_CALL_TIMEOUT_S,
    ) -> None:
        self.name = name
        self.code = code
        self.call_timeout_s = call_timeout_s
        self._session = SandboxSession(command)
        self._loaded = False

    @classmethod
    def from_file(
        cls, path: str | Path, command: Sequence[str] | None = None
    ) -> "SandboxScorer":
        text = Path(path).read_text(encoding="utf-8")
        return cls(text, name=f"sandbox:{path}", command=command)

    def score_states(self, states: Sequence[WarehouseState]) -> list[float]:
        try:
            if not self._loaded:
                self._session.load(self.code, self.call_timeout_s)
                self._loaded = True
            return self._session.score([s.to_lists() for s in states], self.call_timeout_s)
        except SandboxError as e:
            raise ScorerError(str(e)) from e

    def close(self) -> None:
        self._session.shutdown()
