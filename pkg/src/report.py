"""
JSON and TSV rendering of command results.

A document is {command, params, rows, flags}; TSV output prints the fixed
columns of the command, one row per line.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional

from .classification import FamilyRecord, ModuliFamily
from .finite_forms import FiniteQuadraticForm
from .lattice import Lattice
from .walls import ChamberReport, WallPair

COLUMNS = {
    "discr": ["generator", "order", "q", "b"],
    "classify": ["family", "n", "rank", "action", "T", "S", "exists", "case",
                 "verified", "uniqueness", "dimension"],
    "walls": ["square", "divisibility"],
    "chambers": ["family", "n", "T", "walls", "chambers", "orbits", "orbit_bounds"],
    "twisted": ["example", "n", "v", "v_B", "v_B_square", "picard_gram", "picard", "transcendental",
                "matches_family"],
    "check": ["check", "passed", "detail"],
    "families": ["family", "rank", "action", "T", "S", "dimension", "components"],
}


def _fraction(value: Fraction, modulus: int) -> str:
    value = Fraction(value) % modulus
    text = str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    return f"{text} mod {modulus}"


def format_q(value: Fraction) -> str:
    return _fraction(value, 2)


def format_b(value: Fraction) -> str:
    return _fraction(value, 1)


def form_rows(form: FiniteQuadraticForm) -> List[Dict[str, Any]]:
    rows = []
    for i, order in enumerate(form.orders):
        rows.append({
            "generator": i,
            "order": order,
            "q": format_q(form.gram[i][i]),
            "b": [format_b(form.gram[i][j]) for j in range(form.ngens)],
        })
    return rows


def lattice_summary(lattice: Lattice) -> Dict[str, Any]:
    form = lattice.discriminant_form
    return {
        "lattice": str(lattice),
        "rank": lattice.rank,
        "signature": str(lattice.signature),
        "determinant": lattice.determinant,
        "group": list(form.invariant_factors),
        "form": form.describe(),
    }


def family_row(record: FamilyRecord) -> Dict[str, Any]:
    return {
        "family": record.family_id,
        "n": record.n,
        "rank": record.rank,
        "action": record.action,
        "T": record.t_display,
        "S": record.s_display,
        "exists": record.exists,
        "case": record.case.label if record.case else None,
        "verified": record.verified,
        "uniqueness": record.uniqueness_note,
        "dimension": record.dimension,
    }


def wall_rows(pairs: List[WallPair]) -> List[Dict[str, Any]]:
    return [{"square": p.square, "divisibility": p.divisibility} for p in pairs]


def chamber_row(record: FamilyRecord, report: ChamberReport) -> Dict[str, Any]:
    return {
        "family": record.family_id,
        "n": record.n,
        "T": record.t_display,
        "walls": [str(w.pair) for w in report.walls],
        "chambers": report.chambers,
        "orbits": report.orbits,
        "orbit_bounds": list(report.orbit_bounds),
    }


def moduli_family_row(family: ModuliFamily) -> Dict[str, Any]:
    record = family.record
    return {
        "family": record.family_id,
        "rank": record.rank,
        "action": record.action,
        "T": record.t_display,
        "S": record.s_display,
        "dimension": family.dimension,
        "components": family.components,
    }


@dataclass
class Document:
    command: str
    params: Dict[str, Any] = field(default_factory=dict)
    rows: List[Dict[str, Any]] = field(default_factory=list)
    exhaustive: bool = True
    separation: Optional[bool] = None
    passed: Optional[bool] = None

    def as_dict(self) -> Dict[str, Any]:
        flags = {"exhaustive": self.exhaustive, "separation": self.separation}
        # only the check suite reports pass/fail
        if self.passed is not None:
            flags["passed"] = self.passed
        return {"command": self.command, "params": self.params, "rows": self.rows, "flags": flags}


def _cell(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ";".join(_cell(v) for v in value)
    return str(value)


def render(document: Document, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(document.as_dict(), indent=2, ensure_ascii=False)
    columns = COLUMNS[document.command]
    lines = ["\t".join(columns)]
    for row in document.rows:
        lines.append("\t".join(_cell(row.get(column)) for column in columns))
    return "\n".join(lines)
