"""PORTA-style ``.ieq`` (half-spaces) and ``.poi`` (points) text files.

Only the subset needed for cross-checking is supported: a ``DIM`` header,
``INEQUALITIES_SECTION`` rows such as ``( 3) -x1+1/2x4 <= 0`` (``==`` for
equalities) and ``CONV_SECTION`` rows of space-separated rationals.
Writing is canonical, so ``write(read(text)) == text`` for any file this
module produced.
"""
from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path

import numpy as np

from ..errors import FormatError
from .polytope import HPolytope, VPolytope

_TERM = re.compile(r"([+-]?)(\d+(?:/\d+)?)?x(\d+)")
_ROW = re.compile(r"^\(\s*\d+\)\s*(.*?)\s*(<=|==|>=)\s*(\S+)\s*$")


def _q(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _lhs(a) -> str:
    parts = []
    for i, v in enumerate(a, start=1):
        if v == 0:
            continue
        sign = "-" if v < 0 else "+"
        mag = abs(v)
        parts.append(f"{sign}{'' if mag == 1 else _q(mag)}x{i}")
    if not parts:
        return "0"
    s = "".join(parts)
    return s[1:] if s.startswith("+") else s


def dumps_ieq(h: HPolytope) -> str:
    lines = [f"DIM = {h.dim}", "", "INEQUALITIES_SECTION"]
    rows = [(a, "==", b) for a, b in h.equalities] + [(a, "<=", b) for a, b in h.inequalities]
    width = len(str(len(rows)))
    for k, (a, op, b) in enumerate(rows, start=1):
        lines.append(f"({k:>{width}}) {_lhs(a)} {op} {_q(Fraction(b))}")
    lines += ["", "END", ""]
    return "\n".join(lines)


def _parse_lhs(text: str, dim: int) -> list[Fraction]:
    a = [Fraction(0)] * dim
    text = text.replace(" ", "")
    if text == "0":
        return a
    pos = 0
    for m in _TERM.finditer(text):
        if m.start() != pos:
            raise FormatError(f"cannot parse {text[pos:m.start()]!r} in {text!r}")
        sign, coef, idx = m.groups()
        i = int(idx) - 1
        if not 0 <= i < dim:
            raise FormatError(f"variable x{idx} outside dimension {dim}")
        v = Fraction(coef) if coef else Fraction(1)
        a[i] += -v if sign == "-" else v
        pos = m.end()
    if pos != len(text):
        raise FormatError(f"trailing text {text[pos:]!r}")
    return a


def _dim(lines) -> int:
    for line in lines:
        m = re.match(r"^DIM\s*=\s*(\d+)\s*$", line)
        if m:
            return int(m.group(1))
    raise FormatError("missing DIM header")


def _section(lines, name):
    try:
        start = lines.index(name) + 1
    except ValueError:
        raise FormatError(f"missing {name}") from None
    out = []
    for line in lines[start:]:
        if line == "END" or line.endswith("_SECTION"):
            break
        if line:
            out.append(line)
    return out


def loads_ieq(text: str) -> HPolytope:
    lines = [ln.strip() for ln in text.splitlines()]
    dim = _dim(lines)
    ineqs, eqs = [], []
    for line in _section(lines, "INEQUALITIES_SECTION"):
        m = _ROW.match(line)
        if not m:
            raise FormatError(f"bad inequality row {line!r}")
        lhs, op, rhs = m.groups()
        a = _parse_lhs(lhs, dim)
        b = Fraction(rhs)
        if op == ">=":
            a, b = [-v for v in a], -b
        (eqs if op == "==" else ineqs).append((tuple(a), b))
    return HPolytope(dim, tuple(ineqs), tuple(eqs))


def dumps_poi(v: VPolytope) -> str:
    lines = [f"DIM = {v.dim}", "", "CONV_SECTION"]
    width = len(str(len(v)))
    for k, p in enumerate(v, start=1):
        lines.append(f"({k:>{width}}) " + " ".join(_q(x) for x in p))
    lines += ["", "END", ""]
    return "\n".join(lines)


def loads_poi(text: str, scenario=None) -> VPolytope:
    lines = [ln.strip() for ln in text.splitlines()]
    dim = _dim(lines)
    pts = []
    for line in _section(lines, "CONV_SECTION"):
        body = re.sub(r"^\(\s*\d+\)", "", line).split()
        if len(body) != dim:
            raise FormatError(f"point with {len(body)} coordinates in dimension {dim}")
        try:
            pts.append([Fraction(x) for x in body])
        except (ValueError, ZeroDivisionError):
            raise FormatError(f"bad rational in {line!r}") from None
    if not pts:
        return VPolytope(np.zeros((0, dim), dtype=np.int64), np.zeros(0, dtype=np.int64), scenario, _canonical=True)
    return VPolytope.from_points(pts, scenario)


def write_ieq(h: HPolytope, path) -> None:
    Path(path).write_text(dumps_ieq(h))


def read_ieq(path) -> HPolytope:
    return loads_ieq(Path(path).read_text())


def write_poi(v: VPolytope, path) -> None:
    Path(path).write_text(dumps_poi(v))


def read_poi(path, scenario=None) -> VPolytope:
    return loads_poi(Path(path).read_text(), scenario)
