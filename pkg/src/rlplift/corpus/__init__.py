"""Model and knowledge-base fixtures shipped with the package, plus instance generators."""
from __future__ import annotations

from pathlib import Path

HERE = Path(__file__).resolve().parent


def path(name: str) -> Path:
    """Absolute path of a shipped fixture, e.g. ``path("flow.rlp")``."""
    p = HERE / name
    if not p.exists():
        raise FileNotFoundError(f"no corpus fixture named {name!r}")
    return p


def fixtures(suffix: str | None = None) -> list[Path]:
    files = sorted(p for p in HERE.iterdir() if p.suffix in (".rlp", ".lkb"))
    return [p for p in files if suffix is None or p.suffix == suffix]


__all__ = ["HERE", "fixtures", "path"]
