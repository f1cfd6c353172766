"""Run an external solver executable on an exported LP.

The command is called as ``<cmd> <model file> <solution file>``.  The
solution file holds one ``name value`` pair per line, using the names of the
exported file; an optional ``status <word>`` line reports the outcome.
"""
from __future__ import annotations

import os
import shlex
import subprocess
import tempfile

from .dualform import DualFormLP
from .export import export
from .simplex import OPTIMAL, Solution

ENV_VAR = "RLPLIFT_EXTERNAL_SOLVER"


class ExternalSolverError(RuntimeError):
    pass


def solve_external(lp: DualFormLP, cmd: str | None = None, fmt: str = "mps",
                   timeout: float | None = None) -> Solution:
    cmd = cmd or os.environ.get(ENV_VAR)
    if not cmd:
        raise ExternalSolverError(f"no external solver configured (set {ENV_VAR})")
    exp = export(lp, fmt)
    with tempfile.TemporaryDirectory(prefix="rlplift-") as tmp:
        model = os.path.join(tmp, "model." + ("mps" if fmt == "mps" else "lp"))
        sol = os.path.join(tmp, "model.sol")
        with open(model, "w", encoding="utf-8") as fh:
            fh.write(exp.text)
        proc = subprocess.run(shlex.split(cmd) + [model, sol], capture_output=True, text=True,
                              timeout=timeout)
        if proc.returncode != 0 or not os.path.exists(sol):
            raise ExternalSolverError(f"`{cmd}` failed with exit code {proc.returncode}: "
                                      f"{proc.stderr.strip()[-500:]}")
        with open(sol, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    status = OPTIMAL
    x = [0.0] * lp.n
    for line in lines:
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 2:
            raise ExternalSolverError(f"malformed solution line: {line!r}")
        name, value = parts
        if name == "status":
            status = value
            continue
        j = exp.columns.get(name)
        if j is None:
            raise ExternalSolverError(f"solution names unknown column {name!r}")
        x[j] = float(value)
    if status != OPTIMAL:
        return Solution(status, mode="external")
    obj = sum(float(c) * xj for c, xj in zip(lp.c, x))
    return Solution(OPTIMAL, x, obj, 0, "external")


__all__ = ["ENV_VAR", "ExternalSolverError", "solve_external"]
