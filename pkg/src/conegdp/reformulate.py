"""GDP -> mixed-integer transformations: big-M (scalar and conic), hull
(conic and eps-approximated scalar), the epigraph transform, and the
scalar-MINLP -> MICP conversion.

Big-M conventions: scalar atom rows are relaxed through the atom's epigraph
slot, ``h(x) <= M*(1-y)`` with M an exact interval maximum over the variable
box. Raw conic rows get an additive slack vector w with ``rows + w*(1-y)``
feasible over the whole box (w = -M in the ``Ax >= b + M(1-y)`` orientation);
each w is validated against the box at construction.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from . import atoms as at
from . import cones as cn
from . import logic as lg
from .model import (
    INF,
    BooleanVar,
    ConicConstraint,
    ContinuousVar,
    GdpModel,
    LinExpr,
    MicpModel,
    PerspRow,
    ScalarConstraint,
    ScalarMinlp,
    ScalarRow,
    TaggedCone,
    TaggedRow,
)


class ReformulationError(ValueError):
    pass


class BigMError(ReformulationError):
    pass


class HullError(ReformulationError):
    pass


@dataclass(frozen=True)
class BigMStrategy:
    """interval: exact box maxima; subproblem: affine rows maximized with the
    continuous solver (identical values on boxes, accepts tighter boxes);
    user: values supplied per constraint tag, caller's responsibility."""

    mode: str = "interval"  # "interval" | "subproblem" | "user"
    values: dict | None = None

    def __post_init__(self):
        if self.mode not in ("interval", "subproblem", "user"):
            raise ReformulationError(f"unknown big-M mode {self.mode!r}")
        if self.mode == "user" and not self.values:
            raise ReformulationError("user strategy needs a values map")


@dataclass(frozen=True)
class EpsVariant:
    variant: str = "furman"  # "lee" | "furman"
    eps: float = 1e-4

    def __post_init__(self):
        if self.variant not in ("lee", "furman"):
            raise ReformulationError(f"unknown eps variant {self.variant!r}")
        if not (0.0 < self.eps < 1.0):
            raise ReformulationError("eps must lie in (0,1)")


# atoms whose last slot is a plain epigraph bound (f(x) <= t)
_EPI_KINDS = {
    "square", "sumsq", "recip", "powabs", "invpow", "ratpow", "exp", "invlog",
    "xexpx", "prodexp", "softplus", "logistic", "log1pinv", "logsumexp",
    "l1norm", "l2norm", "lpnorm",
}


class _Builder:
    def __init__(self):
        self.lower: list[float] = []
        self.upper: list[float] = []
        self.binary: list[bool] = []
        self.names: list[str] = []
        self.rows: list[TaggedRow] = []
        self.cones: list[TaggedCone] = []
        self.atom_rows: list[ScalarRow] = []
        self.persp_rows: list[PerspRow] = []

    def add_var(self, lo, hi, binary=False, name="") -> int:
        j = len(self.lower)
        self.lower.append(float(lo))
        self.upper.append(float(hi))
        self.binary.append(bool(binary))
        self.names.append(name or f"x{j}")
        return j

    def alloc(self, prefix="aux") -> at.AuxAlloc:
        return at.AuxAlloc(lambda: self.add_var(-INF, INF, name=f"{prefix}{len(self.lower)}"))

    def add_row(self, expr, sense, tag=""):
        self.rows.append(TaggedRow(expr, sense, tag))

    def add_cone(self, rows, cone, tag=""):
        self.cones.append(TaggedCone(tuple(rows), cone, tag))

    def emit(self, rep: at.ConicRep, tag=""):
        for cone, rows in rep.slices:
            self.add_cone(rows, cone, tag)
        for row in rep.lin_rows:
            self.add_row(row.expr, row.sense, tag)

    def micp(self, objective) -> MicpModel:
        if self.atom_rows or self.persp_rows:
            raise ReformulationError("scalar rows left in a conic build")
        return MicpModel(
            lower=tuple(self.lower),
            upper=tuple(self.upper),
            binary=tuple(self.binary),
            objective=objective,
            rows=tuple(self.rows),
            cones=tuple(self.cones),
            var_names=tuple(self.names),
        )

    def minlp(self, objective) -> ScalarMinlp:
        return ScalarMinlp(
            lower=tuple(self.lower),
            upper=tuple(self.upper),
            binary=tuple(self.binary),
            objective=objective,
            rows=tuple(self.rows),
            atom_rows=tuple(self.atom_rows),
            persp_rows=tuple(self.persp_rows),
            cones=tuple(self.cones),
            var_names=tuple(self.names),
        )


def _bool_expr(row, ymap) -> LinExpr:
    e = LinExpr.const(row.constant)
    for b, c in row.terms:
        e = e + LinExpr.var(ymap[b], c)
    return e


def _skeleton(model: GdpModel):
    """Variables, binaries, exactly-one + CNF + Boolean rows, global linear."""
    b = _Builder()
    for v in model.variables:
        b.add_var(v.lower, v.upper, name=v.name or f"x{v.id}")
    ymap: dict[BooleanVar, int] = {}
    for dj in model.disjunctions:
        for d in dj.disjuncts:
            ymap[d.boolean] = b.add_var(
                0.0, 1.0, binary=True, name=f"y_{dj.index}_{d.boolean.disjunct}"
            )
    for dj in model.disjunctions:
        total = LinExpr.const(-1.0)
        for d in dj.disjuncts:
            total = total + LinExpr.var(ymap[d.boolean])
        b.add_row(total, "eq", tag=f"xone.k{dj.index}")
    for t, row in enumerate(lg.cnf_to_linear(model.logic)):
        b.add_row(_bool_expr(row, ymap), row.sense, tag=f"cnf.{t}")
    for t, row in enumerate(model.bool_rows):
        b.add_row(_bool_expr(row, ymap), row.sense, tag=f"boolrow.{t}")
    for t, row in enumerate(model.global_linear):
        b.add_row(row.expr, row.sense, tag=f"g.lin{t}")
    return b, ymap


# ---------------------------------------------------------------------------
# Big-M values
# ---------------------------------------------------------------------------


def _scalar_bigm(sc: ScalarConstraint, lower, upper, strategy: BigMStrategy, key=None) -> float:
    if strategy.mode == "user":
        try:
            return float(strategy.values[key])
        except KeyError:
            raise BigMError(f"no user big-M for {key!r}") from None
    if strategy.mode == "subproblem" and sc.atom.kind == "affine":
        from . import solver as sv

        box = MicpModel(
            lower=tuple(lower), upper=tuple(upper), binary=(False,) * len(lower),
            objective=-sc.bindings[0],
        )
        sol = sv.solve_conic(box)
        if sol.status == "Unbounded":
            raise BigMError("unbounded affine row over the box")
        if sol.status != "Optimal":
            raise BigMError(f"big-M subproblem failed: {sol.status}")
        return -sol.objective
    iv = [e.interval(lower, upper) for e in sc.bindings]
    m = sc.atom.box_max(iv)
    if not math.isfinite(m):
        raise BigMError(f"big-M unbounded for {sc.atom.kind} over the variable box")
    return m


def _cone_slack(cone: cn.Cone, iv: list[tuple[float, float]]) -> np.ndarray:
    """Additive vector w with rows + w inside the cone over the whole box."""
    lo = np.array([a for a, _ in iv])
    hi = np.array([b for _, b in iv])
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise BigMError("conic big-M needs finite row ranges")
    mag = np.maximum(np.abs(lo), np.abs(hi))
    w = np.zeros(cone.dim)
    v = cone.variant
    if v == "nonneg":
        w = np.maximum(0.0, -lo)
    elif v == "soc":
        w[0] = max(0.0, math.sqrt(float(mag[1:] @ mag[1:])) - lo[0])
    elif v == "rsoc":
        s = float(mag[2:] @ mag[2:])
        a = math.sqrt(s / 2.0)
        w[0] = max(0.0, a - lo[0])
        w[1] = max(0.0, a - lo[1])
    elif v == "exp":
        w[2] = -max(0.0, hi[2])
        w[1] = max(0.0, -lo[1])
        w[0] = max(0.0, (hi[1] + w[1]) - lo[0])
    elif v == "pow3":
        s3 = mag[2]
        w[0] = max(0.0, s3 - lo[0])
        w[1] = max(0.0, s3 - lo[1])
    else:
        raise BigMError(f"no conic big-M rule for {cone}")
    _check_cone_slack(cone, lo, hi, mag, w)
    return w


def _check_cone_slack(cone, lo, hi, mag, w):
    v = cone.variant
    ok = True
    if v == "nonneg":
        ok = bool(np.all(lo + w >= -1e-12))
    elif v == "soc":
        ok = lo[0] + w[0] >= math.sqrt(float(mag[1:] @ mag[1:])) - 1e-9
    elif v == "rsoc":
        ok = (
            lo[0] + w[0] >= -1e-12
            and lo[1] + w[1] >= -1e-12
            and 2.0 * (lo[0] + w[0]) * (lo[1] + w[1]) >= float(mag[2:] @ mag[2:]) - 1e-9
        )
    elif v == "exp":
        ok = hi[2] + w[2] <= 1e-12 and lo[1] + w[1] >= -1e-12 and lo[0] + w[0] >= hi[1] + w[1] - 1e-9
    elif v == "pow3":
        ok = lo[0] + w[0] >= mag[2] - 1e-9 and lo[1] + w[1] >= mag[2] - 1e-9
    if not ok:  # pragma: no cover - construction guarantees validity
        raise BigMError(f"conic big-M construction check failed for {cone}")


def compute_bigm(constraint, lower, upper, strategy: BigMStrategy | None = None, key=None):
    """Big-M for one constraint over the variable box.

    ScalarConstraint -> scalar M with h(x) <= M on the box.
    ConicConstraint -> additive slack vector w (rows + w*(1-y) stays conic)."""
    strategy = strategy or BigMStrategy()
    if isinstance(constraint, ScalarConstraint):
        return _scalar_bigm(constraint, lower, upper, strategy, key)
    if isinstance(constraint, ConicConstraint):
        iv = [r.interval(lower, upper) for r in constraint.rows]
        return _cone_slack(constraint.cone, iv)
    raise ReformulationError(f"cannot compute big-M for {type(constraint).__name__}")


def _relaxed_cone_rows(cc: ConicConstraint, w: np.ndarray, y: LinExpr):
    return tuple(row + wi - y * wi for row, wi in zip(cc.rows, w))


# ---------------------------------------------------------------------------
# Reformulations
# ---------------------------------------------------------------------------


def bigm_scalar(model: GdpModel, strategy: BigMStrategy | None = None) -> ScalarMinlp:
    """Scalar MINLP big-M: one relaxed row per disjunct constraint, relaxed
    through the atom's epigraph slot. No continuous variables are added."""
    strategy = strategy or BigMStrategy()
    lower, upper = model.bounds()
    b, ymap = _skeleton(model)
    for j, sc in enumerate(model.global_scalar):
        if sc.atom.kind == "affine":
            b.add_row(sc.bindings[0], "le", tag=f"g.s{j}")
        else:
            b.atom_rows.append(ScalarRow(sc.atom, sc.bindings, LinExpr.ZERO, tag=f"g.s{j}"))
    for j, cc in enumerate(model.global_conic):
        b.add_cone(cc.rows, cc.cone, tag=f"g.q{j}")
    for dj in model.disjunctions:
        for d in dj.disjuncts:
            k, i = dj.index, d.boolean.disjunct
            y = LinExpr.var(ymap[d.boolean])
            for j, sc in enumerate(d.scalar_constraints):
                tag = f"k{k}.i{i}.s{j}"
                m = compute_bigm(sc, lower, upper, strategy, key=tag)
                relax = LinExpr.const(m) - y * m
                if sc.atom.kind == "affine":
                    b.add_row(sc.bindings[0] - relax, "le", tag=tag)
                else:
                    b.atom_rows.append(ScalarRow(sc.atom, sc.bindings, relax, tag=tag))
            for j, cc in enumerate(d.conic_constraints):
                tag = f"k{k}.i{i}.q{j}"
                w = compute_bigm(cc, lower, upper, strategy, key=tag)
                b.add_cone(_relaxed_cone_rows(cc, w, y), cc.cone, tag=tag)
    return b.minlp(model.objective)


def bigm_cone(model: GdpModel, strategy: BigMStrategy | None = None) -> MicpModel:
    """Conic big-M: scalar disjunct constraints are conified with the scalar
    M threaded through the epigraph slot; raw conic rows get slack vectors.
    With y fixed to 1 every slice coincides with the plain conification."""
    strategy = strategy or BigMStrategy()
    lower, upper = model.bounds()
    b, ymap = _skeleton(model)
    for j, sc in enumerate(model.global_scalar):
        b.emit(at.conify_atom(sc.atom, sc.bindings, alloc=b.alloc()), tag=f"g.s{j}")
    for j, cc in enumerate(model.global_conic):
        b.add_cone(cc.rows, cc.cone, tag=f"g.q{j}")
    for dj in model.disjunctions:
        for d in dj.disjuncts:
            k, i = dj.index, d.boolean.disjunct
            y = LinExpr.var(ymap[d.boolean])
            for j, sc in enumerate(d.scalar_constraints):
                tag = f"k{k}.i{i}.s{j}"
                m = compute_bigm(sc, lower, upper, strategy, key=tag)
                relax = LinExpr.const(m) - y * m
                b.emit(at.conify_atom(sc.atom, sc.bindings, relax=relax, alloc=b.alloc()), tag=tag)
            for j, cc in enumerate(d.conic_constraints):
                tag = f"k{k}.i{i}.q{j}"
                w = compute_bigm(cc, lower, upper, strategy, key=tag)
                b.add_cone(_relaxed_cone_rows(cc, w, y), cc.cone, tag=tag)
    return b.micp(model.objective)


def _hull_bounds_check(model: GdpModel):
    for dj in model.disjunctions:
        for v in sorted(dj.vars()):
            var = model.variables[v]
            if not (math.isfinite(var.lower) and math.isfinite(var.upper)):
                raise HullError(
                    f"hull reformulation needs finite bounds on x{v} "
                    f"(appears in disjunction {dj.index})"
                )


def _hull_skeleton(model: GdpModel, on_scalar, on_conic):
    """Disaggregation shared by hull_cone and hull_eps: v-copies for the
    variables each disjunction touches, v-bound rows, aggregation rows."""
    _hull_bounds_check(model)
    b, ymap = _skeleton(model)
    for dj in model.disjunctions:
        k = dj.index
        dvars = sorted(dj.vars())
        copies: dict[int, dict[int, int]] = {}
        for d in dj.disjuncts:
            i = d.boolean.disjunct
            y = LinExpr.var(ymap[d.boolean])
            vmap = {}
            for v in dvars:
                var = model.variables[v]
                cid = b.add_var(
                    min(var.lower, 0.0), max(var.upper, 0.0), name=f"v_k{k}_i{i}_x{v}"
                )
                vmap[v] = cid
                ve = LinExpr.var(cid)
                b.add_row(ve - y * var.upper, "le", tag=f"k{k}.i{i}.vub.x{v}")
                b.add_row(y * var.lower - ve, "le", tag=f"k{k}.i{i}.vlb.x{v}")
            copies[i] = vmap
            for j, sc in enumerate(d.scalar_constraints):
                on_scalar(b, sc, vmap, y, f"k{k}.i{i}.s{j}")
            for j, cc in enumerate(d.conic_constraints):
                on_conic(b, cc, vmap, y, f"k{k}.i{i}.q{j}")
        for v in dvars:
            agg = LinExpr.var(v)
            for i in copies:
                agg = agg - LinExpr.var(copies[i][v])
            b.add_row(agg, "eq", tag=f"k{k}.agg.x{v}")
    return b


def hull_cone(model: GdpModel) -> MicpModel:
    """Extended hull: disaggregated copies, perspective slices per Table-style
    conic perspectives (scalar atoms) or y-scaled right-hand sides (raw conic
    rows). Uses only cone families present in the conified input."""

    def on_scalar(b, sc, vmap, y, tag):
        bindings = [e.remap(vmap) for e in sc.bindings]
        b.emit(at.perspective_conify_atom(sc.atom, bindings, y, alloc=b.alloc()), tag=tag)

    def on_conic(b, cc, vmap, y, tag):
        rows = [r.remap(vmap).scale_constant_onto(y) for r in cc.rows]
        b.add_cone(rows, cc.cone, tag=tag)

    b = _hull_skeleton(model, on_scalar, on_conic)
    for j, sc in enumerate(model.global_scalar):
        b.emit(at.conify_atom(sc.atom, sc.bindings, alloc=b.alloc()), tag=f"g.s{j}")
    for j, cc in enumerate(model.global_conic):
        b.add_cone(cc.rows, cc.cone, tag=f"g.q{j}")
    return b.micp(model.objective)


def hull_eps(model: GdpModel, cfg: EpsVariant | None = None) -> ScalarMinlp:
    """Scalar hull with the eps-approximated closed perspective applied to the
    atom form of each disjunct constraint (never to conic slices)."""
    cfg = cfg or EpsVariant()
    eps = cfg.eps

    def on_scalar(b, sc, vmap, y, tag):
        bindings = tuple(e.remap(vmap) for e in sc.bindings)
        if cfg.variant == "lee":
            lam = y + eps
            relax = LinExpr.ZERO
        else:
            lam = y * (1.0 - eps) + eps
            try:
                h0 = sc.atom.eval([e.constant for e in sc.bindings])
            except at.DomainError as exc:
                raise ReformulationError(
                    f"furman approximation needs h(0); {sc.atom.kind}: {exc}"
                ) from None
            relax = LinExpr.const(eps * h0) - y * (eps * h0)
        b.persp_rows.append(PerspRow(sc.atom, bindings, lam, relax, tag=tag))

    def on_conic(b, cc, vmap, y, tag):
        raise ReformulationError(
            "hull_eps applies to scalar atom constraints; conify the model "
            "with hull_cone for raw conic rows"
        )

    b = _hull_skeleton(model, on_scalar, on_conic)
    for j, sc in enumerate(model.global_scalar):
        if sc.atom.kind == "affine":
            b.add_row(sc.bindings[0], "le", tag=f"g.s{j}")
        else:
            b.atom_rows.append(ScalarRow(sc.atom, sc.bindings, LinExpr.ZERO, tag=f"g.s{j}"))
    for j, cc in enumerate(model.global_conic):
        b.add_cone(cc.rows, cc.cone, tag=f"g.q{j}")
    return b.minlp(model.objective)


def eval_persp_row(row: PerspRow, x) -> float:
    """Value of lam*h(args/lam) - relax at a point (closure at lam = 0)."""
    lam = row.lam.evaluate(x)
    relax = row.relax.evaluate(x)
    if lam < 0.0:
        return math.inf
    if lam == 0.0:
        linear = [e - LinExpr.const(e.constant) for e in row.bindings]
        vals = [e.evaluate(x) for e in linear]
        return (0.0 if all(v == 0.0 for v in vals) else math.inf) - relax
    args = [e.evaluate([xi / lam for xi in x]) for e in row.bindings]
    # evaluating the binding at x/lam keeps constants unscaled: h(Bx/lam + beta)
    return lam * row.atom.eval(args) - relax


# ---------------------------------------------------------------------------
# Scalar MINLP -> MICP
# ---------------------------------------------------------------------------


def minlp_to_micp(sm: ScalarMinlp) -> MicpModel:
    """Parsimonious conic lift: per nonlinear row, equality-tied variable
    copies, a nonnegative epigraph slack, and the row's conic representation
    (recession slot pinned by the construction)."""
    b = _Builder()
    for j in range(sm.n_vars):
        b.add_var(sm.lower[j], sm.upper[j], binary=sm.binary[j], name=sm.var_names[j])
    for row in sm.rows:
        b.add_row(row.expr, row.sense, row.tag)
    for tc in sm.cones:
        b.add_cone(tc.rows, tc.cone, tc.tag)

    def lift(bindings, tag):
        refs = sorted(set().union(*(e.vars() for e in bindings)) if bindings else set())
        vmap = {}
        for v in refs:
            cid = b.add_var(sm.lower[v], sm.upper[v], name=f"{tag}.copy.{sm.var_names[v]}")
            vmap[v] = cid
            b.add_row(LinExpr.var(cid) - LinExpr.var(v), "eq", tag=f"{tag}.tie.{v}")
        s = b.add_var(0.0, INF, name=f"{tag}.slack")
        return tuple(e.remap(vmap) for e in bindings), LinExpr.var(s)

    for r, row in enumerate(sm.atom_rows):
        tag = row.tag or f"nl{r}"
        if row.atom.kind == "affine":
            b.add_row(row.bindings[0] - row.relax, "le", tag=tag)
            continue
        bindings, s = lift(row.bindings, tag)
        rep = at.conify_atom(row.atom, bindings, relax=row.relax - s, alloc=b.alloc())
        b.emit(rep, tag=tag)
    for r, row in enumerate(sm.persp_rows):
        tag = row.tag or f"pr{r}"
        if row.atom.kind == "affine":
            rep = at.perspective_conify_atom(row.atom, row.bindings, row.lam, relax=row.relax)
            b.emit(rep, tag=tag)
            continue
        bindings, s = lift(row.bindings, tag)
        rep = at.perspective_conify_atom(
            row.atom, bindings, row.lam, relax=row.relax - s, alloc=b.alloc()
        )
        b.emit(rep, tag=tag)
    return b.micp(sm.objective)


# ---------------------------------------------------------------------------
# Epigraph transform and oracle subproblems
# ---------------------------------------------------------------------------


def epigraph_transform(model: GdpModel, terms) -> GdpModel:
    """Replace a nonlinear objective ``min sum_i f_i(x)`` by its epigraph:
    one catalog constraint per term plus a linear objective. ``terms`` are
    (atom, bindings-without-epigraph-slot) pairs; a single affine term just
    becomes the objective."""
    terms = list(terms)
    if not terms:
        raise ReformulationError("epigraph_transform needs at least one term")
    if len(terms) == 1 and terms[0][0].kind == "affine":
        return dataclasses.replace(model, objective=terms[0][1][0])
    variables = list(model.variables)
    global_scalar = list(model.global_scalar)
    global_linear = list(model.global_linear)
    t_ids = []
    for atom, bindings in terms:
        if atom.kind not in _EPI_KINDS:
            raise ReformulationError(f"{atom.kind} has no plain epigraph slot")
        if len(bindings) != atom.arity - 1:
            raise ReformulationError("bindings must omit the epigraph slot")
        t = len(variables)
        variables.append(ContinuousVar(t, -INF, INF, name=f"epi{len(t_ids)}"))
        t_ids.append(t)
        global_scalar.append(ScalarConstraint(atom, tuple(bindings) + (LinExpr.var(t),)))
    if len(t_ids) == 1:
        objective = LinExpr.var(t_ids[0])
    else:
        total = len(variables)
        variables.append(ContinuousVar(total, -INF, INF, name="epi_total"))
        agg = LinExpr.var(total)
        for t in t_ids:
            agg = agg - LinExpr.var(t)
        from .model import LinRow

        global_linear.append(LinRow(agg, "eq"))
        objective = LinExpr.var(total)
    return dataclasses.replace(
        model,
        variables=tuple(variables),
        objective=objective,
        global_scalar=tuple(global_scalar),
        global_linear=tuple(global_linear),
    )


def assignment_subproblem(model: GdpModel, asg: lg.Assignment) -> MicpModel:
    """Continuous conic program of one Boolean assignment: global constraints
    plus the active disjuncts' conified constraints."""
    b = _Builder()
    for v in model.variables:
        b.add_var(v.lower, v.upper, name=v.name or f"x{v.id}")
    for t, row in enumerate(model.global_linear):
        b.add_row(row.expr, row.sense, tag=f"g.lin{t}")
    for j, sc in enumerate(model.global_scalar):
        if sc.atom.kind == "affine":
            b.add_row(sc.bindings[0], "le", tag=f"g.s{j}")
        else:
            b.emit(at.conify_atom(sc.atom, sc.bindings, alloc=b.alloc()), tag=f"g.s{j}")
    for j, cc in enumerate(model.global_conic):
        b.add_cone(cc.rows, cc.cone, tag=f"g.q{j}")
    for dj in model.disjunctions:
        d = dj.disjuncts[asg.choice[dj.index]]
        k, i = dj.index, d.boolean.disjunct
        for j, sc in enumerate(d.scalar_constraints):
            if sc.atom.kind == "affine":
                b.add_row(sc.bindings[0], "le", tag=f"k{k}.i{i}.s{j}")
            else:
                b.emit(at.conify_atom(sc.atom, sc.bindings, alloc=b.alloc()), tag=f"k{k}.i{i}.s{j}")
        for j, cc in enumerate(d.conic_constraints):
            b.add_cone(cc.rows, cc.cone, tag=f"k{k}.i{i}.q{j}")
    return b.micp(model.objective)
