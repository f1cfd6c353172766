"""Command-line driver: ``rlplift run|stats|export``.

Exit codes: 0 optimal (or nothing to solve), 1 error, 3 infeasible,
4 unbounded, 5 iteration limit.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .grounder import GroundLP, GroundingError, SizeReport, ground, stats
from .lang import ModelError, PrenexError, ValidationError, load_rlp
from .lifting import LiftingError, lift_lp, lifted_solve
from .logkb import AbsentValueError, ProgramError, UnsafeQueryError, evaluate, load_logkb
from .lp import (
    INFEASIBLE, ITERATION_LIMIT, OPTIMAL, UNBOUNDED, DualFormLP, ExternalSolverError,
    Solution, export, solve, solve_external, to_dual_form,
)
from .terms import TermError, format_number
from ._lexer import ParseError

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE, EXIT_UNBOUNDED, EXIT_ITERATIONS = 0, 1, 3, 4, 5
_EXIT = {OPTIMAL: EXIT_OK, INFEASIBLE: EXIT_INFEASIBLE, UNBOUNDED: EXIT_UNBOUNDED,
         ITERATION_LIMIT: EXIT_ITERATIONS}

# above this many nonzeros `auto` leaves exact arithmetic for HiGHS
AUTO_EXACT_NNZ = 1000

_ERRORS = (ParseError, ModelError, ValidationError, PrenexError, ProgramError, UnsafeQueryError,
           AbsentValueError, GroundingError, TermError, LiftingError, ExternalSolverError,
           OSError)


@dataclass
class RunConfig:
    rlp_path: str
    lkb_path: str
    lift: bool = True
    solver: str = "auto"
    row_dedup: bool = True
    color_eps: float | None = None
    max_iter: int = 10**6
    pricing: str = "bland"
    json_path: str | None = None
    timings: bool = False

    def solver_kind(self) -> tuple[str, str]:
        """``(kind, argument)`` with kind one of internal, external, export."""
        s = self.solver
        for prefix in ("external:", "export:"):
            if s.startswith(prefix):
                return prefix[:-1], s[len(prefix):]
        if s == "external":
            return "external", ""
        mode = s.removeprefix("internal-")
        if mode not in ("auto", "rational", "float", "highs"):
            raise ValueError(f"unknown solver {s!r}")
        return "internal", mode


@dataclass
class RunResult:
    status: str
    sense: str
    objective: object = None
    solution: dict = field(default_factory=dict)
    ground: SizeReport | None = None
    report: object = None        # LiftReport when lifting
    solver: str = ""
    times_ms: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def to_json(self, timings: bool = False) -> dict:
        return {
            "status": self.status,
            "sense": self.sense,
            "objective": _num(self.objective),
            "solution": {k: _num(v) for k, v in self.solution.items()},
            "ground": self.ground._asdict() if self.ground else None,
            "lifting": self.report.to_json(timings) if self.report is not None else None,
            "solver": self.solver,
            "times_ms": ({k: round(v, 3) for k, v in self.times_ms.items()} if timings
                         else None),
            "warnings": list(self.warnings),
        }


def _num(v):
    if v is None:
        return None
    if isinstance(v, (int, Fraction)):
        return format_number(Fraction(v))
    v = float(v)
    return 0.0 if v == 0 else v


def build(config: RunConfig, times: dict | None = None) -> tuple[GroundLP, DualFormLP]:
    """Parse, evaluate, validate and ground; returns the ground LP and its dual form."""
    times = {} if times is None else times
    t0 = time.perf_counter()
    model = load_rlp(config.rlp_path)
    program = load_logkb(config.lkb_path)
    t1 = time.perf_counter()
    kb = evaluate(program)
    t2 = time.perf_counter()
    glp = ground(model, kb)
    t3 = time.perf_counter()
    dual = to_dual_form(glp)
    times.update(parse=(t1 - t0) * 1e3, evaluate=(t2 - t1) * 1e3, ground=(t3 - t2) * 1e3)
    return glp, dual


def _internal_mode(mode: str, lp: DualFormLP) -> str:
    if mode != "auto":
        return mode
    return "rational" if lp.exact and lp.nnz <= AUTO_EXACT_NNZ else "highs"


def run(config: RunConfig) -> RunResult:
    kind, arg = config.solver_kind()
    if kind == "export":
        raise ValueError("export:<format> writes a file instead of solving; use `rlplift export`")
    times: dict = {}
    glp, dual = build(config, times)
    result = RunResult(status="", sense=glp.sense, ground=stats(glp), warnings=list(glp.warnings))

    if kind == "external":
        solver = lambda lp: solve_external(lp, arg or None)  # noqa: E731
        mode = "float"
        result.solver = "external"
    else:
        mode = _internal_mode(arg, dual)
        solver = lambda lp: solve(lp, mode, config.pricing, config.max_iter)  # noqa: E731
        result.solver = mode

    t0 = time.perf_counter()
    if config.lift:
        sol, report = lifted_solve(dual, mode, config.row_dedup, config.color_eps, solver=solver)
        result.report = report
    else:
        sol = solver(dual)
        if sol.status == OPTIMAL:
            _verify_ground(dual, sol, mode)
    times["solve"] = (time.perf_counter() - t0) * 1e3
    result.times_ms = times
    result.status = sol.status
    if sol.status == OPTIMAL:
        result.objective = dual.original_objective(sol.objective)
        result.solution = dict(zip(glp.names(), sol.x))
    return result


def _verify_ground(dual: DualFormLP, sol: Solution, mode: str) -> None:
    from .lp import check_feasible

    exact = mode == "rational"
    tol = 0 if exact else 1e-9 * (1.0 + max((abs(float(v)) for v in dual.b), default=0.0))
    feas = check_feasible(dual, sol.x, tol)
    if not feas.ok:
        raise LiftingError(f"solver returned an infeasible point: {feas.provenance} "
                           f"violated by {feas.violation}")


def stats_cmd(config: RunConfig) -> tuple[SizeReport, SizeReport]:
    glp, dual = build(config)
    ground_size = stats(dual)
    if not config.lift or dual.n == 0 or dual.m == 0:
        return ground_size, ground_size
    lifted = lift_lp(dual, config.row_dedup, config.color_eps)
    return ground_size, stats(lifted.lp)


# ---------------------------------------------------------------------------
# argument handling

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rlplift",
                                description="Ground, lift and solve relational linear programs.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--rlp", required=True, help="model file (.rlp)")
        sp.add_argument("--lkb", required=True, help="logical knowledge base (.lkb)")
        sp.add_argument("--lift", dest="lift", action="store_true", default=True,
                        help="lift before solving (default)")
        sp.add_argument("--no-lift", dest="lift", action="store_false",
                        help="solve the ground LP directly")
        sp.add_argument("--no-row-dedup", dest="row_dedup", action="store_false",
                        help="keep every projected row of the lifted LP")
        sp.add_argument("--color-eps", type=float, default=None, metavar="D",
                        help="bucket coefficient values of width D before coloring (unsafe)")
        sp.add_argument("--json", dest="json_path", metavar="OUT",
                        help="write the JSON result to OUT ('-' for stdout)")

    run_p = sub.add_parser("run", help="ground, optionally lift, solve and verify")
    common(run_p)
    run_p.add_argument("--solver", default="auto", metavar="S",
                       help="auto | rational | float | highs | external:<cmd>")
    run_p.add_argument("--pricing", choices=("bland", "dantzig"), default="bland")
    run_p.add_argument("--max-iter", type=int, default=10**6)
    run_p.add_argument("--timings", action="store_true",
                       help="include wall-clock times in the JSON output")

    stats_p = sub.add_parser("stats", help="report ground and lifted LP sizes")
    common(stats_p)
    stats_p.add_argument("--csv", metavar="OUT", help="append a size row to a CSV file ('-' for stdout)")

    exp_p = sub.add_parser("export", help="write the (lifted) LP in LP or MPS format")
    common(exp_p)
    exp_p.add_argument("--solver", default="export:lp", metavar="S",
                       help="export:lp or export:mps")
    exp_p.add_argument("--format", choices=("lp", "mps"), default=None)
    exp_p.add_argument("--out", default="-", help="output file ('-' for stdout)")
    exp_p.set_defaults(lift=False)
    return p


def _config(args) -> RunConfig:
    return RunConfig(args.rlp, args.lkb, args.lift, getattr(args, "solver", "auto"),
                     args.row_dedup, args.color_eps, getattr(args, "max_iter", 10**6),
                     getattr(args, "pricing", "bland"), args.json_path,
                     getattr(args, "timings", False))


def _write(path: str | None, text: str) -> None:
    if path is None:
        return
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _cmd_run(args) -> int:
    config = _config(args)
    res = run(config)
    _write(config.json_path, _dumps(res.to_json(config.timings)))
    if config.json_path != "-":
        print(f"status: {res.status}")
        if res.objective is not None:
            print(f"objective ({res.sense}): {_num(res.objective)}")
        g = res.ground
        print(f"ground: {g.vars} vars, {g.rows} rows, {g.nnz} nonzeros")
        if res.report is not None:
            lf = res.report.lifted
            print(f"lifted: {lf.vars} vars, {lf.rows} rows, {lf.nnz} nonzeros "
                  f"(verified: {str(res.report.verified).lower()})")
    return _EXIT.get(res.status, EXIT_ERROR)


def _cmd_stats(args) -> int:
    config = _config(args)
    g, lf = stats_cmd(config)
    ratio = lf.vars / g.vars if g.vars else 1.0
    doc = {"ground": g._asdict(), "lifted": lf._asdict(), "ratio": round(ratio, 6)}
    _write(config.json_path, _dumps(doc))
    if "-" not in (config.json_path, args.csv):
        print(f"ground: {g.vars} vars, {g.rows} rows, {g.nnz} nonzeros")
        print(f"lifted: {lf.vars} vars, {lf.rows} rows, {lf.nnz} nonzeros")
        print(f"ratio: {ratio:.4f}")
    if args.csv:
        header = ["rlp", "lkb", "ground_vars", "ground_rows", "ground_nnz",
                  "lifted_vars", "lifted_rows", "lifted_nnz", "ratio"]
        row = [config.rlp_path, config.lkb_path, *g, *lf, f"{ratio:.6f}"]
        if args.csv == "-":
            w = csv.writer(sys.stdout, lineterminator="\n")
            w.writerow(header)
            w.writerow(row)
        else:
            path = Path(args.csv)
            fresh = not path.exists() or path.stat().st_size == 0
            with path.open("a", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh)
                if fresh:
                    w.writerow(header)
                w.writerow(row)
    return EXIT_OK


def _cmd_export(args) -> int:
    config = _config(args)
    fmt = args.format
    if fmt is None:
        kind, arg = config.solver_kind()
        if kind != "export":
            raise ValueError("export needs --format or --solver export:<format>")
        fmt = arg
    if fmt not in ("lp", "mps"):
        raise ValueError(f"unknown export format {fmt!r}")
    glp, dual = build(config)
    lp = dual
    if config.lift and dual.n and dual.m:
        lp = lift_lp(dual, config.row_dedup, config.color_eps, exact=dual.exact).lp
    out = export(lp, fmt)
    _write(args.out, out.text)
    if config.json_path:
        _write(config.json_path, _dumps({"format": fmt, "columns": out.columns,
                                          "rows": out.rows}))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    handler = {"run": _cmd_run, "stats": _cmd_stats, "export": _cmd_export}[args.command]
    try:
        return handler(args)
    except (*_ERRORS, ValueError) as exc:
        print(f"rlplift: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
