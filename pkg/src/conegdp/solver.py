"""Continuous conic solves, binary branch-and-bound, and the
disjunct-enumeration oracle.

Node accounting: every continuous solve counts, including the root. Search is
best-bound with most-fractional branching; ties break on lowest variable
index, then FIFO, so identical inputs give identical node counts.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import cones as cn
from . import ipm
from .ipm import IpmSettings
from .model import MicpModel

_INT_TOL = 1e-6


@dataclass
class BnbSettings:
    rel_gap: float = 1e-5
    node_limit: int | None = None
    time_limit_s: float | None = None
    branching: str = "MostFractional"
    node_order: str = "BestBound"

    def __post_init__(self):
        if self.rel_gap <= 0:
            raise ValueError("rel_gap must be positive")


@dataclass
class Solution:
    status: str  # Optimal | Infeasible | Unbounded | GapLimit | NodeLimit | TimeLimit
    objective: float
    bound: float
    point: tuple[float, ...]
    nodes: int
    wall_s: float
    detail: str = ""
    dual: dict = field(default_factory=dict, repr=False)

    @property
    def solved(self) -> bool:
        return self.status == "Optimal"


class _Infeasible(Exception):
    pass


class _Compiled:
    """MicpModel flattened to dense arrays once; per-node assembly only
    slices columns and moves fixed-variable contributions to the right-hand
    side."""

    def __init__(self, micp: MicpModel):
        self.micp = micp
        n = micp.n_vars
        self.n = n
        self.lower = np.array(micp.lower)
        self.upper = np.array(micp.upper)
        self.c = np.zeros(n)
        for v, cf in micp.objective.terms.items():
            self.c[v] = cf
        self.c0 = micp.objective.constant

        eq_rows, eq_c, in_rows, in_c = [], [], [], []
        for row in micp.rows:
            a = np.zeros(n)
            for v, cf in row.expr.terms.items():
                a[v] = cf
            if row.sense == "eq":
                eq_rows.append(a)
                eq_c.append(row.expr.constant)
            else:
                in_rows.append(a)
                in_c.append(row.expr.constant)
        self.Aeq = np.array(eq_rows).reshape(len(eq_rows), n)
        self.ceq = np.array(eq_c)
        self.Ain = np.array(in_rows).reshape(len(in_rows), n)
        self.cin = np.array(in_c)

        q_rows, q_c = [], []
        self.cones = []
        for tc in micp.cones:
            for expr in tc.rows:
                a = np.zeros(n)
                for v, cf in expr.terms.items():
                    a[v] = cf
                q_rows.append(a)
                q_c.append(expr.constant)
            self.cones.append(tc.cone)
        self.Aq = np.array(q_rows).reshape(len(q_rows), n)
        self.cq = np.array(q_c)

    def _presolve(self, fixed):
        """Iteratively absorb singleton rows into bounds and fix collapsed
        variables; fixing binaries in hull models otherwise leaves opposing
        row pairs (v <= 0, -v <= 0) with no strict interior."""
        lo = self.lower.copy()
        up = self.upper.copy()
        for j, v in (fixed or {}).items():
            lo[j] = up[j] = float(v)
        eq_dead = np.zeros(self.Aeq.shape[0], dtype=bool)
        in_dead = np.zeros(self.Ain.shape[0], dtype=bool)
        tol = 1e-9

        def scale(v):
            return 1.0 + abs(v)

        for _ in range(30):
            isfix = lo == up
            xf = np.where(isfix, lo, 0.0)
            changed = False
            for Amat, consts, dead, is_eq in (
                (self.Aeq, self.ceq, eq_dead, True),
                (self.Ain, self.cin, in_dead, False),
            ):
                if not Amat.size:
                    continue
                live_cols = Amat[:, ~isfix]
                nnz = np.count_nonzero(live_cols, axis=1) if live_cols.size else np.zeros(len(consts), dtype=int)
                const = consts + Amat[:, isfix] @ xf[isfix]
                # row range over the current box (fixed vars contribute 0
                # here; their value is already inside const)
                Alive = np.where(isfix, 0.0, 1.0) * Amat
                pos = Alive > 0
                neg = Alive < 0
                at_lo = np.where(pos, lo[None, :], np.where(neg, up[None, :], 0.0))
                at_up = np.where(pos, up[None, :], np.where(neg, lo[None, :], 0.0))
                rmin = const + np.sum(Alive * at_lo, axis=1)
                if is_eq:
                    rmax = const + np.sum(Alive * at_up, axis=1)
                    bad = ~dead & (rmax < -tol * (1.0 + np.abs(rmax)))
                    if np.any(bad):
                        raise _Infeasible("equality row infeasible over the box")
                for i in np.where(~dead)[0]:
                    if nnz[i] == 0:
                        if is_eq and abs(const[i]) > tol * scale(const[i]):
                            raise _Infeasible("constant equality row")
                        if not is_eq and const[i] > tol * scale(const[i]):
                            raise _Infeasible("constant inequality row")
                        dead[i] = True
                        changed = True
                    elif rmin[i] > tol * scale(rmin[i]):
                        raise _Infeasible("row infeasible over the box")
                    elif nnz[i] == 1:
                        cols = np.nonzero(Amat[i])[0]
                        j = next(jj for jj in cols if not isfix[jj])
                        a = Amat[i, j]
                        v = -const[i] / a
                        if is_eq:
                            if v < lo[j] - tol * scale(v) or v > up[j] + tol * scale(v):
                                raise _Infeasible("singleton equality out of bounds")
                            lo[j] = up[j] = min(max(v, lo[j]), up[j])
                        elif a > 0:
                            up[j] = min(up[j], v)
                        else:
                            lo[j] = max(lo[j], v)
                        dead[i] = True
                        changed = True
                    elif rmin[i] > -tol * scale(rmin[i]):
                        # forcing row: feasible only with every term at its
                        # extreme (e.g. sum of zero-bounded binaries = 0)
                        for j in np.nonzero(Amat[i])[0]:
                            if not isfix[j]:
                                val = lo[j] if Amat[i, j] > 0 else up[j]
                                lo[j] = up[j] = val
                        dead[i] = True
                        changed = True
            crossed = lo > up
            if np.any(crossed):
                bad = np.where(crossed)[0]
                if np.any(lo[bad] - up[bad] > tol * (1.0 + np.abs(lo[bad]))):
                    raise _Infeasible("crossed bounds")
                mid = 0.5 * (lo[bad] + up[bad])
                lo[bad] = up[bad] = mid
                changed = True
            if not changed:
                break
        return lo, up, eq_dead, in_dead

    def problem(self, fixed: dict[int, float] | None = None):
        lo, up, eq_dead, in_dead = self._presolve(fixed)
        isfix = lo == up
        kept = np.where(~isfix)[0]
        xf = np.where(isfix, lo, 0.0)
        fixed = {int(j): float(lo[j]) for j in np.where(isfix)[0]}

        offset = self.c0 + float(self.c @ xf)
        c = self.c[kept]

        def split(Amat, consts, dead=None):
            if Amat.size == 0:
                return Amat.reshape(0, kept.size), consts
            live = ~dead if dead is not None else np.ones(Amat.shape[0], dtype=bool)
            return Amat[live][:, kept], consts[live] + Amat[live] @ xf

        Aeq, ceq = split(self.Aeq, self.ceq, eq_dead)
        if Aeq.shape[0]:
            alive = np.abs(Aeq).sum(axis=1) > 0.0
            dead = ~alive
            if np.any(np.abs(ceq[dead]) > 1e-9 * (1.0 + np.abs(ceq[dead]))):
                raise _Infeasible("constant equality row")
            Aeq, ceq = Aeq[alive], ceq[alive]
        Ain, cin = split(self.Ain, self.cin, in_dead)
        if Ain.shape[0]:
            alive = np.abs(Ain).sum(axis=1) > 0.0
            dead = ~alive
            if np.any(cin[dead] > 1e-9 * (1.0 + np.abs(cin[dead]))):
                raise _Infeasible("constant inequality row")
            Ain, cin = Ain[alive], cin[alive]

        G_rows = [Ain]
        h_vals = [-cin]
        lo, hi = lo[kept], up[kept]
        fin_lo = np.isfinite(lo)
        fin_hi = np.isfinite(hi)
        nb = int(fin_lo.sum())
        if nb:
            B = np.zeros((nb, kept.size))
            B[np.arange(nb), np.where(fin_lo)[0]] = -1.0
            G_rows.append(B)
            h_vals.append(-lo[fin_lo])
        nb = int(fin_hi.sum())
        if nb:
            B = np.zeros((nb, kept.size))
            B[np.arange(nb), np.where(fin_hi)[0]] = 1.0
            G_rows.append(B)
            h_vals.append(hi[fin_hi])
        m_nn = sum(g.shape[0] for g in G_rows)

        Aq, cq = split(self.Aq, self.cq)
        keep_cones = []
        keep_rows = np.ones(Aq.shape[0], dtype=bool)
        off = 0
        for cone in self.cones:
            rows = slice(off, off + cone.dim)
            off += cone.dim
            if Aq.size and not np.abs(Aq[rows]).sum():
                # slice became constant under the fixing: verify membership
                if not cn.membership(cone, cq[rows], tol=1e-7):
                    raise _Infeasible("constant cone slice outside its cone")
                keep_rows[rows] = False
            else:
                keep_cones.append(cone)
        if Aq.size:
            Aq, cq = Aq[keep_rows], cq[keep_rows]
        G = np.vstack([*G_rows, -Aq]) if (m_nn or Aq.size) else np.zeros((0, kept.size))
        h = np.concatenate([*h_vals, cq])
        blocks = ([cn.nonneg(m_nn)] if m_nn else []) + keep_cones
        prob = ipm.ConicProblem(
            c=c, A=Aeq, b=-ceq, G=G, h=h, cones=blocks, obj_offset=offset
        )
        return prob, kept, fixed


def _full_point(n, kept, fixed, x):
    out = np.zeros(n)
    out[kept] = x
    for j, v in fixed.items():
        out[j] = v
    return tuple(out)


def _solve_compiled(comp: _Compiled, settings: IpmSettings, fixed=None) -> Solution:
    t0 = time.perf_counter()
    try:
        prob, kept, fixed_all = comp.problem(fixed)
    except _Infeasible as exc:
        return Solution("Infeasible", math.inf, math.inf, (), 1, time.perf_counter() - t0, detail=str(exc))
    res = ipm.solve(prob, settings)
    wall = time.perf_counter() - t0
    point = _full_point(comp.n, kept, fixed_all, res.x)
    duals = {"y": res.y, "z": res.z, "s": res.s, "pres": res.pres, "dres": res.dres, "relgap": res.relgap}
    if res.status == "optimal":
        return Solution("Optimal", res.obj_primal, res.obj_dual, point, 1, wall, dual=duals)
    if res.status == "infeasible":
        return Solution("Infeasible", math.inf, math.inf, point, 1, wall, dual=duals)
    if res.status == "unbounded":
        return Solution("Unbounded", -math.inf, -math.inf, point, 1, wall, dual=duals)
    detail = res.detail or f"stopped after {res.iterations} iterations"
    return Solution("GapLimit", res.obj_primal, res.obj_dual, point, 1, wall, detail=detail, dual=duals)


def solve_conic(
    micp: MicpModel,
    settings: IpmSettings | None = None,
    fixed: dict[int, float] | None = None,
) -> Solution:
    """Continuous solve with binaries relaxed to their [0,1] boxes (optionally
    with some variables fixed). One node."""
    return _solve_compiled(_Compiled(micp), settings or IpmSettings(), fixed)


def relaxation_bound(micp: MicpModel, settings: IpmSettings | None = None) -> float:
    """Optimal value of the continuous relaxation (binaries in [0,1])."""
    sol = solve_conic(micp, settings)
    if sol.status == "Optimal":
        return sol.objective
    if sol.status == "Infeasible":
        return math.inf
    if sol.status == "Unbounded":
        return -math.inf
    raise RuntimeError(f"relaxation solve failed: {sol.status} ({sol.detail})")


# ---------------------------------------------------------------------------
# Branch and bound
# ---------------------------------------------------------------------------


#: Node relaxations do not need the full 1e-8: the search terminates at a
#: 1e-5 relative gap, so 1e-6-feasible bounds are far below the noise line.
NODE_IPM = IpmSettings(feas_tol=1e-6, gap_tol=1e-7, max_iters=150)


def branch_and_bound(
    micp: MicpModel,
    settings: BnbSettings | None = None,
    ipm_settings: IpmSettings | None = None,
) -> Solution:
    settings = settings or BnbSettings()
    ipm_settings = ipm_settings or NODE_IPM
    t0 = time.perf_counter()
    comp = _Compiled(micp)
    binaries = micp.binary_indices()

    incumbent = math.inf
    incumbent_point: tuple[float, ...] = ()
    nodes = 0
    seq = 0
    frontier: list[tuple[float, int, dict[int, float]]] = [(-math.inf, 0, {})]
    status = "Optimal"
    detail = ""
    global_bound = -math.inf

    def gap_ok(obj, bnd):
        return (obj - bnd) / max(1.0, abs(obj)) <= settings.rel_gap

    while frontier:
        bound_here, _, fixing = heapq.heappop(frontier)
        global_bound = bound_here
        if incumbent < math.inf and gap_ok(incumbent, bound_here):
            status = "Optimal"
            break
        if settings.node_limit is not None and nodes >= settings.node_limit:
            status = "NodeLimit"
            break
        if settings.time_limit_s is not None and time.perf_counter() - t0 > settings.time_limit_s:
            status = "TimeLimit"
            break

        sol = _solve_compiled(comp, ipm_settings, fixed=fixing)
        nodes += 1
        if sol.status == "Infeasible":
            continue
        if sol.status == "Unbounded":
            status = "Unbounded"
            incumbent = -math.inf
            global_bound = -math.inf
            detail = "relaxation unbounded"
            break
        if sol.status == "GapLimit":
            # untrusted solve: keep the (valid) parent bound, never prune or
            # accept an incumbent from it
            detail = f"node solve stalled: {sol.detail}"
            node_bound = bound_here
        else:
            node_bound = sol.bound
        if incumbent < math.inf and gap_ok(incumbent, node_bound):
            continue
        frac = [
            (abs(sol.point[j] - 0.5), j)
            for j in binaries
            if j not in fixing and min(sol.point[j], 1.0 - sol.point[j]) > _INT_TOL
        ]
        if not frac:
            if sol.status == "Optimal" and sol.objective < incumbent:
                incumbent = sol.objective
                incumbent_point = sol.point
            continue
        frac.sort()  # most fractional first; ties by lowest index
        j = frac[0][1]
        for v in (0.0, 1.0):
            child = dict(fixing)
            child[j] = v
            seq += 1
            heapq.heappush(frontier, (node_bound, seq, child))
    else:
        # frontier exhausted
        global_bound = incumbent
        status = "Optimal" if incumbent < math.inf else "Infeasible"

    wall = time.perf_counter() - t0
    if status == "Optimal" and incumbent == math.inf:
        status = "Infeasible"
    bound = min(global_bound, incumbent) if incumbent < math.inf else global_bound
    if status == "Infeasible":
        return Solution("Infeasible", math.inf, math.inf, (), max(nodes, 1), wall, detail=detail)
    return Solution(status, incumbent, bound, incumbent_point, max(nodes, 1), wall, detail=detail)


# ---------------------------------------------------------------------------
# Enumeration oracle
# ---------------------------------------------------------------------------


def enumerate_oracle(model, settings: IpmSettings | None = None, cap: int | None = None) -> Solution:
    """Ground truth: solve the continuous conic subproblem of every feasible
    Boolean assignment and return the best. Nodes = assignments solved."""
    from . import logic as lg
    from . import reformulate as rf

    settings = settings or NODE_IPM
    t0 = time.perf_counter()
    assignments = lg.enumerate_feasible_assignments(
        model, cap if cap is not None else lg.DEFAULT_BOOLEAN_CAP
    )
    best = math.inf
    best_point: tuple[float, ...] = ()
    unbounded = False
    stalled = ""
    for asg in assignments:
        sub = rf.assignment_subproblem(model, asg)
        sol = solve_conic(sub, settings)
        if sol.status == "Unbounded":
            unbounded = True
            break
        if sol.status == "GapLimit":
            stalled = sol.detail
        if sol.status == "Optimal" and sol.objective < best:
            best = sol.objective
            best_point = sol.point
    wall = time.perf_counter() - t0
    nodes = max(len(assignments), 1)
    if unbounded:
        return Solution("Unbounded", -math.inf, -math.inf, (), nodes, wall)
    if best == math.inf:
        return Solution("Infeasible", math.inf, math.inf, (), nodes, wall, detail=stalled)
    return Solution("Optimal", best, best, best_point, nodes, wall, detail=stalled)
