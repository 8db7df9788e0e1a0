"""Bundled global-point fixtures and their exactness validation."""
from __future__ import annotations

import importlib.resources
from dataclasses import dataclass

from .darmon import squarefree_part
from .errors import PreconditionError
from .modsym import EllCurve
from .quadfield import QuadElt, parse_quad


@dataclass
class TableRow:
    label: str
    ainvs: tuple
    p: int
    D: int
    h: int
    kind: str           # point | poly2 | poly4
    data: dict
    multiple: int = 1

    def curve(self) -> EllCurve:
        return EllCurve(*self.ainvs, p=self.p)

    def point(self):
        if self.kind != "point":
            raise PreconditionError(f"row {self.label}:{self.D} has no point")
        return self.data["x"], self.data["y"]


def _parse_field(txt: str, d0: int):
    key, _, val = txt.partition("=")
    val = val.strip()
    if "sqrt" in val:
        return key.strip(), parse_quad(val, d0)
    from fractions import Fraction
    if key.strip() == "mult":
        return "mult", int(val)
    return key.strip(), QuadElt(d0, Fraction(val))


def load_rows() -> list[TableRow]:
    text = (importlib.resources.files("shpoints") / "data" /
            "global_points.txt").read_text()
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        label, ain, p, D, h, kind, data = [t.strip() for t in line.split("|")]
        D = int(D)
        d0 = squarefree_part(D)
        fields = {}
        mult = 1
        for part in data.split(";"):
            k, v = _parse_field(part.strip(), d0)
            if k == "mult":
                mult = v
            else:
                fields[k] = v
        rows.append(TableRow(
            label=label, ainvs=tuple(int(a) for a in ain.split()),
            p=int(p), D=D, h=int(h), kind=kind, data=fields, multiple=mult))
    return rows


def find_row(label: str, D: int) -> TableRow:
    for row in load_rows():
        if row.label.lower() == label.lower() and row.D == D:
            return row
    raise PreconditionError(f"no fixture row {label}:{D}")


def validate_fixture_exactness() -> list[str]:
    """Exact on-curve check of every point row; returns failures."""
    bad = []
    for row in load_rows():
        if row.kind != "point":
            continue
        E = EllCurve(*row.ainvs)
        x, y = row.data["x"], row.data["y"]
        if not E.is_on_curve(x, y):
            bad.append(f"{row.label}:{row.D}")
    return bad


# Desk-scale default subset: smallest discriminant with h = 1 per curve
# computable at the default precision/depth within minutes.
DESK_ROWS = [("15A1", 13), ("21A1", 8), ("33A1", 13)]
