"""LP-file and fixed-format MPS writers.

Names are mangled to the format's identifier rules and the mapping is
returned with the text, so solutions can be read back.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import NamedTuple

from ..grounder import GroundLP
from .dualform import DualFormLP


class Exported(NamedTuple):
    text: str
    columns: dict  # file name -> column index
    rows: dict     # file name -> row index


def format_value(v) -> str:
    """Integers print as integers, everything else as the shortest round-trip float."""
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return str(v.numerator)
        v = float(v)
    v = float(v)
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


_BAD = re.compile(r"[^A-Za-z0-9_]+")


def lp_names(names: list[str], prefix: str) -> list[str]:
    out, seen = [], set()
    for i, s in enumerate(names):
        base = _BAD.sub("_", s).strip("_") or f"{prefix}{i}"
        if base[0].isdigit() or base[0] in "eE":
            base = f"{prefix}_{base}"
        name, k = base, 1
        while name in seen:
            k += 1
            name = f"{base}_{k}"
        seen.add(name)
        out.append(name)
    return out


def _view(lp):
    """(sense, c, offset, rows as (coeffs, rel, rhs), column names)."""
    if isinstance(lp, GroundLP):
        rows = [(r.coeffs, r.rel, r.rhs) for r in lp.rows]
        return lp.sense, lp.c, lp.offset, rows, lp.names()
    rows = [(r, "<=", bi) for r, bi in zip(lp.rows, lp.b)]
    names = lp.col_names or [f"x{j}" for j in range(lp.n)]
    return "minimize", lp.c, Fraction(0), rows, names


def _terms(coeffs: dict, names: list[str]) -> str:
    parts = []
    for j in sorted(coeffs):
        v = coeffs[j]
        if not v:
            continue
        s = format_value(v)
        sign = "-" if s.startswith("-") else "+"
        parts.append(f"{sign} {s.lstrip('-')} {names[j]}")
    if not parts:
        return "0"
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


def to_lp_file(lp) -> Exported:
    sense, c, offset, rows, names = _view(lp)
    cols = lp_names(names, "x")
    rnames = [f"r{i + 1}" for i in range(len(rows))]
    out = ["\\ relational linear program", "Maximize" if sense == "maximize" else "Minimize"]
    obj = _terms({j: v for j, v in enumerate(c)}, cols)
    if offset:
        s = format_value(offset)
        obj += f" - {s[1:]}" if s.startswith("-") else f" + {s}"
    out.append(f" obj: {obj}")
    out.append("Subject To")
    for name, (coeffs, rel, rhs) in zip(rnames, rows):
        out.append(f" {name}: {_terms(coeffs, cols)} {rel} {format_value(rhs)}")
    out.append("Bounds")
    for name in cols:
        out.append(f" {name} free")
    out.append("End")
    return Exported("\n".join(out) + "\n", {n: j for j, n in enumerate(cols)},
                    {n: i for i, n in enumerate(rnames)})


def _mps_line(kind: str, f1: str, f2: str = "", v2: str = "", f3: str = "", v3: str = "") -> str:
    # fixed-format field layout; values longer than 12 characters widen the field
    line = f" {kind:<2} {f1:<8}"
    if f2:
        line += f"  {f2:<8}  {v2:>12}"
    if f3:
        line += f"   {f3:<8}  {v3:>12}"
    return line.rstrip()


def to_mps(lp, name: str = "RLP") -> Exported:
    sense, c, offset, rows, names = _view(lp)
    cols = [f"C{j + 1:07d}" for j in range(len(names))]
    rnames = [f"R{i + 1:07d}" for i in range(len(rows))]
    out = [f"NAME          {name}"]
    if sense == "maximize":
        out += ["OBJSENSE", "    MAX"]
    out.append("ROWS")
    out.append(" N  OBJ")
    kind = {"<=": "L", ">=": "G", "=": "E"}
    for rn, (_, rel, _) in zip(rnames, rows):
        out.append(f" {kind[rel]}  {rn}")
    out.append("COLUMNS")
    by_col: list[list] = [[] for _ in cols]
    for j, v in enumerate(c):
        if v:
            by_col[j].append(("OBJ", v))
    for i, (coeffs, _, _) in enumerate(rows):
        for j in sorted(coeffs):
            if coeffs[j]:
                by_col[j].append((rnames[i], coeffs[j]))
    for j, entries in enumerate(by_col):
        if not entries:
            # keep empty columns visible to the reader
            entries = [("OBJ", 0)]
        for r, v in entries:
            out.append(_mps_line("", cols[j], r, format_value(v)))
    out.append("RHS")
    if offset:
        out.append(_mps_line("", "RHS", "OBJ", format_value(-offset)))
    for rn, (_, _, rhs) in zip(rnames, rows):
        if rhs:
            out.append(_mps_line("", "RHS", rn, format_value(rhs)))
    out.append("BOUNDS")
    for cn in cols:
        out.append(_mps_line("FR", "BND", cn))
    out.append("ENDATA")
    return Exported("\n".join(out) + "\n", {n: j for j, n in enumerate(cols)},
                    {n: i for i, n in enumerate(rnames)})


def export(lp, fmt: str = "lp") -> Exported:
    """Write ``lp`` (ground or dual form) as ``lp`` or ``mps`` text."""
    if fmt in ("lp", "lp-file"):
        return to_lp_file(lp)
    if fmt == "mps":
        return to_mps(lp)
    raise ValueError(f"unknown export format {fmt!r}")


__all__ = ["Exported", "export", "format_value", "to_lp_file", "to_mps"]
