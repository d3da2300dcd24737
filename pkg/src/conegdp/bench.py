"""Benchmark harness: formulation-by-instance matrix with CSV records and
absolute performance profiles (instances solved to a quality gap within a
time or node budget)."""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import reformulate as rf
from . import solver as sv
from .ipm import IpmSettings
from .model import GdpModel
from .solver import BnbSettings

FORMULATIONS = (
    "bigm",
    "bigm_cone",
    "hull_eps_lee",
    "hull_eps_furman",
    "hull_cone",
    "oracle",
)

CSV_HEADER = "instance,formulation,status,objective,bound,nodes,wall_s,seed"


@dataclass(frozen=True)
class BenchRecord:
    instance: str
    formulation: str
    status: str  # Optimal|Infeasible|Unbounded|GapLimit|NodeLimit|TimeLimit|Error
    objective: float
    bound: float
    nodes: int
    wall_s: float
    seed: int


@dataclass
class BenchSettings:
    rel_gap: float = 1e-5
    node_limit: int | None = None
    time_limit_s: float | None = None
    eps: float = 1e-4
    ipm: IpmSettings | None = None


def solve_formulation(
    model: GdpModel, formulation: str, settings: BenchSettings | None = None
) -> sv.Solution:
    """Reformulate and solve; wall time covers the solve call only."""
    settings = settings or BenchSettings()
    bnb = BnbSettings(
        rel_gap=settings.rel_gap,
        node_limit=settings.node_limit,
        time_limit_s=settings.time_limit_s,
    )
    if formulation == "oracle":
        return sv.enumerate_oracle(model, settings.ipm)
    if formulation == "bigm":
        micp = rf.minlp_to_micp(rf.bigm_scalar(model))
    elif formulation == "bigm_cone":
        micp = rf.bigm_cone(model)
    elif formulation == "hull_eps_lee":
        micp = rf.minlp_to_micp(rf.hull_eps(model, rf.EpsVariant("lee", settings.eps)))
    elif formulation == "hull_eps_furman":
        micp = rf.minlp_to_micp(rf.hull_eps(model, rf.EpsVariant("furman", settings.eps)))
    elif formulation == "hull_cone":
        micp = rf.hull_cone(model)
    else:
        raise ValueError(f"unknown formulation {formulation!r}")
    return sv.branch_and_bound(micp, bnb, settings.ipm)


def run_benchmark(instances, formulations=None, settings: BenchSettings | None = None):
    """Cartesian product of instances x formulations. ``instances`` holds
    (instance_id, model, seed) triples. Failures become Error records; the
    matrix never aborts."""
    settings = settings or BenchSettings()
    formulations = list(formulations or FORMULATIONS)
    records = []
    for inst_id, model, seed in instances:
        for form in formulations:
            try:
                sol = solve_formulation(model, form, settings)
                rec = BenchRecord(
                    inst_id, form, sol.status, sol.objective, sol.bound,
                    sol.nodes, sol.wall_s, seed,
                )
            except Exception:
                rec = BenchRecord(inst_id, form, "Error", math.nan, math.nan, 1, 0.0, seed)
            records.append(rec)
    records.sort(key=lambda r: (r.instance, r.formulation))
    return records


def _fmt(v: float) -> str:
    if math.isnan(v):
        return "nan"
    if v == math.inf:
        return "inf"
    if v == -math.inf:
        return "-inf"
    return format(v, ".17g")


def records_to_csv(records) -> str:
    lines = [CSV_HEADER]
    for r in sorted(records, key=lambda r: (r.instance, r.formulation)):
        lines.append(
            f"{r.instance},{r.formulation},{r.status},{_fmt(r.objective)},"
            f"{_fmt(r.bound)},{r.nodes},{_fmt(r.wall_s)},{r.seed}"
        )
    return "\n".join(lines) + "\n"


def records_from_csv(text: str):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if lines[0] != CSV_HEADER:
        raise ValueError("unexpected CSV header")
    out = []
    for ln in lines[1:]:
        inst, form, status, obj, bound, nodes, wall, seed = ln.split(",")
        out.append(
            BenchRecord(inst, form, status, float(obj), float(bound), int(nodes), float(wall), int(seed))
        )
    return out


#: Deterministic log-spaced budget grid (1e-3 .. 1e7, steps 1/2/5).
def budget_grid():
    out = []
    for k in range(-3, 8):
        for mult in (1.0, 2.0, 5.0):
            out.append(mult * 10.0**k)
    return out


def performance_profile(records, metric="wall_s", gap_threshold=1e-3, best_known=None):
    """Absolute performance profile: per formulation, how many instances are
    solved to within ``gap_threshold`` (relative) of the best known objective
    using at most ``budget`` of the metric. Returns CSV text with columns
    formulation,budget,solved; counts are nondecreasing in the budget."""
    if metric not in ("wall_s", "nodes"):
        raise ValueError("metric must be wall_s or nodes")
    records = list(records)
    if not records:
        raise ValueError("empty record set")
    best = dict(best_known or {})
    for r in records:
        if r.status == "Optimal" and not math.isnan(r.objective):
            if r.instance not in best or r.objective < best[r.instance]:
                best[r.instance] = r.objective

    def solved_within(r, budget):
        if r.status != "Optimal" or r.instance not in best:
            return False
        gap = (r.objective - best[r.instance]) / max(1.0, abs(best[r.instance]))
        return gap <= gap_threshold and getattr(r, metric) <= budget

    formulations = sorted({r.formulation for r in records})
    lines = ["formulation,budget,solved"]
    for form in formulations:
        mine = [r for r in records if r.formulation == form]
        for budget in budget_grid():
            count = sum(1 for r in mine if solved_within(r, budget))
            lines.append(f"{form},{_fmt(budget)},{count}")
    return "\n".join(lines) + "\n"
