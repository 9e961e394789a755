"""Task prompt templates."""

from __future__ import annotations

from .config import ConfigError

TASKS = ("caption", "iupac")

_PROMPTS = {
    "caption": "Caption the following molecule:",
    "iupac": "Predict IUPAC name of the following molecule:",
}


def build_prompt(task: str) -> str:
    try:
        return _PROMPTS[task]
    except KeyError:
        raise ConfigError(f"unknown task {task!r}; expected one of {TASKS}") from None
