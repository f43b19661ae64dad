"""Prompt assembly and response parsing for the evolution loop.

Every prompt is built from plain-text template files and follows the same
section order: task, problem description (contextual mode only), parents
(evolve strategies only), output instructions, additional instructions.
Templates are editable; pass a directory to TemplateSet.load to override the
packaged defaults.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .records import HeuristicRecord

HEURISTIC_FUNCTION_NAME = "select_next_move"

_TEMPLATE_FILES = (
    "task",
    "problem_description",
    "parents",
    "output_instructions",
    "additional_instructions",
    "strategy_e1",
    "strategy_e2",
    "strategy_m1",
    "strategy_m2",
)

_DEF_RE = re.compile(rf"^[ \t]*def\s+{HEURISTIC_FUNCTION_NAME}\s*\(", re.MULTILINE)
_FENCE_RE = re.compile(r"```[^\n]*\n(.*?)```", re.DOTALL)


class PromptError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class PromptBundle:
    """Ordered (label, text) prompt sections."""

    sections: tuple[tuple[str, str], ...]

    def text(self) -> str:
        return "\n\n".join(body for _, body in self.sections)

    def section(self, label: str) -> Optional[str]:
        for name, body in self.sections:
            if name == label:
                return body
        return None


@dataclass(frozen=True, slots=True)
class TemplateSet:
    texts: dict[str, str]

    @classmethod
    def load(cls, directory: str | Path) -> "TemplateSet":
        directory = Path(directory)
        texts = {}
        for name in _TEMPLATE_FILES:
            path = directory / f"{name}.txt"
            if not path.is_file():
                raise PromptError(f"missing template file: {path}")
            texts[name] = path.read_text(encoding="utf-8").rstrip("\n")
        return cls(texts)


def default_templates() -> TemplateSet:
    root = resources.files("premarshal.evolution") / "templates"
    texts = {
        name: (root / f"{name}.txt").read_text(encoding="utf-8").rstrip("\n")
        for name in _TEMPLATE_FILES
    }
    return TemplateSet(texts)


def _fill(template: str, values: dict[str, str]) -> str:
    out = template
    for key, val in values.items():
        out = out.replace("{{" + key + "}}", val)
    return out


def _parent_block(index: int, record: HeuristicRecord) -> str:
    return (
        f"No. {index} heuristic's description and the corresponding code are:\n"
        f"{record.thought}\n{record.code}"
    )


def build_prompt(
    strategy: str,
    mode: str,
    parents: Sequence[HeuristicRecord],
    templates: TemplateSet,
) -> PromptBundle:
    """Assemble the prompt for one LLM call.

    I0 takes no parents, M1/M2 exactly one, E1/E2 at least one. In contextual
    mode ("ceoh") the problem-description section is included and the output
    instructions continue its First/Second analysis steps with "Third"; plain
    mode ("eoh") drops the section and starts at "First"."""
    if strategy not in ("I0", "E1", "E2", "M1", "M2"):
        raise PromptError(f"unknown strategy {strategy!r}")
    if mode not in ("ceoh", "eoh"):
        raise PromptError(f"unknown mode {mode!r}")
    if strategy == "I0" and parents:
        raise PromptError("I0 takes no parents")
    if strategy in ("M1", "M2") and len(parents) != 1:
        raise PromptError(f"{strategy} takes exactly one parent")
    if strategy in ("E1", "E2") and not parents:
        raise PromptError(f"{strategy} needs at least one parent")

    sections: list[tuple[str, str]] = [("task", templates.texts["task"])]
    if mode == "ceoh":
        sections.append(("problem_description", templates.texts["problem_description"]))
    if strategy != "I0":
        blocks = "\n".join(_parent_block(i + 1, p) for i, p in enumerate(parents))
        sections.append(
            (
                "parents",
                _fill(
                    templates.texts["parents"],
                    {"parent_count": str(len(parents)), "parents": blocks},
                ),
            )
        )
    sentence = "" if strategy == "I0" else templates.texts[f"strategy_{strategy.lower()}"] + "\n"
    sections.append(
        (
            "output_instructions",
            _fill(
                templates.texts["output_instructions"],
                {
                    "strategy_sentence": sentence,
                    "ordinal": "Third" if mode == "ceoh" else "First",
                    "function_name": HEURISTIC_FUNCTION_NAME,
                },
            ),
        )
    )
    sections.append(("additional_instructions", templates.texts["additional_instructions"]))
    return PromptBundle(tuple(sections))


@dataclass(frozen=True, slots=True)
class ParsedResponse:
    thought: Optional[str] = None
    code: Optional[str] = None
    invalid_reason: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.invalid_reason is None


def _first_brace_block(text: str) -> Optional[str]:
    start = text.find("{")
    if start < 0:
        return None
    depth = 0
    for i in range(start, len(text)):
        if text[i] == "{":
            depth += 1
        elif text[i] == "}":
            depth -= 1
            if depth == 0:
                return text[start + 1 : i]
    return None


def parse_response(text: str) -> ParsedResponse:
    """Split an LLM response into (thought, code); never raises.

    The thought is the first balanced {...} block. The code is the first
    fenced block when present, otherwise everything from the heuristic
    function's def header to the end of the text."""
    thought = _first_brace_block(text)
    if thought is None:
        return ParsedResponse(invalid_reason="missing_thought")
    fence = _FENCE_RE.search(text)
    if fence:
        code = fence.group(1)
    else:
        header = _DEF_RE.search(text)
        if header is None:
            return ParsedResponse(thought=thought, invalid_reason="missing_code")
        code = text[header.start() :]
    if not _DEF_RE.search(code):
        return ParsedResponse(thought=thought, invalid_reason="missing_function")
    return ParsedResponse(thought=thought.strip(), code=code.strip())
