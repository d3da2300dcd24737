"""CNF logic over disjunct indicators: linear reformulation and exhaustive
feasible-assignment enumeration (the ground-truth driver for the oracle)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .model import BooleanVar, BoolRow, CnfFormula, GdpModel

#: Brute-force enumeration cap (total Boolean count).
DEFAULT_BOOLEAN_CAP = 24


class LogicError(ValueError):
    pass


def cnf_to_linear(formula: CnfFormula) -> list[BoolRow]:
    """One row per clause: sum_{R_t} y + sum_{Q_t} (1-y) >= 1 rearranged to
    <= 0 form."""
    rows = []
    for cl in formula.clauses:
        terms = [(b, -1.0) for b in sorted(cl.positives)]
        terms += [(b, 1.0) for b in sorted(cl.negatives)]
        # -sum_R y + sum_Q y <= |Q| - 1
        rows.append(BoolRow(tuple(terms), constant=1.0 - len(cl.negatives), sense="le"))
    return rows


def exactly_one_rows(disjunctions) -> list[BoolRow]:
    """Partitioning equality sum_i y_ik = 1 per disjunction."""
    rows = []
    for dj in disjunctions:
        terms = tuple((d.boolean, 1.0) for d in dj.disjuncts)
        rows.append(BoolRow(terms, constant=-1.0, sense="eq"))
    return rows


@dataclass(frozen=True)
class Assignment:
    """Chosen disjunct index per disjunction."""

    choice: tuple[int, ...]

    def truth(self, b: BooleanVar) -> bool:
        return self.choice[b.disjunction] == b.disjunct

    def value(self, b: BooleanVar) -> float:
        return 1.0 if self.truth(b) else 0.0


def _satisfies(model: GdpModel, asg: Assignment) -> bool:
    for cl in model.logic.clauses:
        if any(asg.truth(b) for b in cl.positives):
            continue
        if any(not asg.truth(b) for b in cl.negatives):
            continue
        return False
    for row in model.bool_rows:
        v = row.constant + sum(c * asg.value(b) for b, c in row.terms)
        if row.sense == "le" and v > 1e-9:
            return False
        if row.sense == "eq" and abs(v) > 1e-9:
            return False
    return True


def enumerate_feasible_assignments(model: GdpModel, cap: int = DEFAULT_BOOLEAN_CAP) -> list[Assignment]:
    """All assignments satisfying every exactly-one constraint, CNF clause,
    and Boolean linear row, in lexicographic (disjunction, disjunct) order."""
    total = sum(len(dj.disjuncts) for dj in model.disjunctions)
    if total > cap:
        raise LogicError(f"{total} Booleans exceed the enumeration cap {cap}")
    sizes = [range(len(dj.disjuncts)) for dj in model.disjunctions]
    out = []
    for choice in itertools.product(*sizes):
        asg = Assignment(choice)
        if _satisfies(model, asg):
            out.append(asg)
    return out
