"""In-memory GDP and flat mixed-integer conic models.

Everything downstream (reformulations, solver, generators, IO) speaks the
types in this module. Models are immutable after construction and safe to
share across concurrent solves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

INF = math.inf

#: Variables are dense nonnegative integers within a model.
VarId = int


class ModelError(ValueError):
    """Raised for structurally invalid model constructions."""


# ---------------------------------------------------------------------------
# Affine expressions
# ---------------------------------------------------------------------------


class LinExpr:
    """Affine expression ``sum(coef * var) + constant`` over VarIds.

    Normalized: zero coefficients are dropped, terms are kept keyed by
    variable index. Instances are immutable and support +, -, and scalar *.
    """

    __slots__ = ("terms", "constant")

    def __init__(self, terms: Mapping[VarId, float] | None = None, constant: float = 0.0):
        clean = {}
        if terms:
            for v, c in terms.items():
                c = float(c)
                if c != 0.0:
                    clean[int(v)] = c
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "constant", float(constant))

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("LinExpr is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def var(v: VarId, coef: float = 1.0) -> "LinExpr":
        return LinExpr({v: coef})

    @staticmethod
    def const(c: float) -> "LinExpr":
        return LinExpr({}, c)

    ZERO: "LinExpr"

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other) -> "LinExpr":
        if isinstance(other, (int, float)):
            return LinExpr(self.terms, self.constant + other)
        t = dict(self.terms)
        for v, c in other.terms.items():
            t[v] = t.get(v, 0.0) + c
        return LinExpr(t, self.constant + other.constant)

    __radd__ = __add__

    def __neg__(self) -> "LinExpr":
        return LinExpr({v: -c for v, c in self.terms.items()}, -self.constant)

    def __sub__(self, other) -> "LinExpr":
        if isinstance(other, (int, float)):
            return LinExpr(self.terms, self.constant - other)
        return self + (-other)

    def __rsub__(self, other) -> "LinExpr":
        return (-self) + other

    def __mul__(self, s: float) -> "LinExpr":
        s = float(s)
        return LinExpr({v: c * s for v, c in self.terms.items()}, self.constant * s)

    __rmul__ = __mul__

    # -- queries -----------------------------------------------------------

    def evaluate(self, x: Sequence[float]) -> float:
        return self.constant + sum(c * x[v] for v, c in self.terms.items())

    def vars(self) -> set[VarId]:
        return set(self.terms)

    def is_zero(self) -> bool:
        return not self.terms and self.constant == 0.0

    def is_constant(self) -> bool:
        return not self.terms

    def remap(self, var_map: Mapping[VarId, VarId]) -> "LinExpr":
        """Rename variables; constant is left untouched."""
        return LinExpr({var_map.get(v, v): c for v, c in self.terms.items()}, self.constant)

    def scale_constant_onto(self, scale: "LinExpr") -> "LinExpr":
        """Replace the constant ``b`` by ``b * scale`` (perspective of the
        constant part). ``scale`` must not share variables with self."""
        if self.constant == 0.0:
            return self
        return LinExpr(self.terms, 0.0) + scale * self.constant

    def substitute(self, fixed: Mapping[VarId, float]) -> "LinExpr":
        t = {}
        const = self.constant
        for v, c in self.terms.items():
            if v in fixed:
                const += c * fixed[v]
            else:
                t[v] = c
        return LinExpr(t, const)

    def interval(self, lower: Sequence[float], upper: Sequence[float]) -> tuple[float, float]:
        """Tight range of the expression over the variable box."""
        lo = hi = self.constant
        for v, c in self.terms.items():
            if c >= 0.0:
                lo += c * lower[v]
                hi += c * upper[v]
            else:
                lo += c * upper[v]
                hi += c * lower[v]
        return lo, hi

    def canonical(self) -> tuple:
        return (tuple(sorted(self.terms.items())), self.constant)

    def __eq__(self, other) -> bool:
        return isinstance(other, LinExpr) and self.canonical() == other.canonical()

    def __hash__(self) -> int:
        return hash(self.canonical())

    def __repr__(self) -> str:
        parts = [f"{c:+g}*x{v}" for v, c in sorted(self.terms.items())]
        parts.append(f"{self.constant:+g}")
        return "LinExpr(" + " ".join(parts) + ")"


LinExpr.ZERO = LinExpr()


def as_expr(x) -> LinExpr:
    if isinstance(x, LinExpr):
        return x
    if isinstance(x, (int, float)):
        return LinExpr.const(x)
    raise TypeError(f"cannot coerce {x!r} to LinExpr")


# ---------------------------------------------------------------------------
# GDP model pieces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContinuousVar:
    id: VarId
    lower: float = -INF
    upper: float = INF
    name: str = ""

    def __post_init__(self):
        if self.lower > self.upper:
            raise ModelError(f"var {self.id}: lower {self.lower} > upper {self.upper}")


@dataclass(frozen=True, order=True)
class BooleanVar:
    """Indicator of disjunct ``disjunct`` inside disjunction ``disjunction``."""

    disjunction: int
    disjunct: int


@dataclass(frozen=True)
class LinRow:
    """Linear constraint ``expr <= 0`` or ``expr == 0``."""

    expr: LinExpr
    sense: str = "le"  # "le" | "eq"

    def __post_init__(self):
        if self.sense not in ("le", "eq"):
            raise ModelError(f"bad sense {self.sense!r}")


@dataclass(frozen=True)
class ScalarConstraint:
    """Catalog-atom constraint ``h(bindings) <= 0``."""

    atom: object  # atoms.ConvexAtom; untyped to avoid an import cycle
    bindings: tuple[LinExpr, ...]

    def __post_init__(self):
        object.__setattr__(self, "bindings", tuple(as_expr(b) for b in self.bindings))
        if len(self.bindings) != self.atom.arity:
            raise ModelError(
                f"{self.atom.kind}: expected {self.atom.arity} bindings, got {len(self.bindings)}"
            )

    def vars(self) -> set[VarId]:
        out: set[VarId] = set()
        for b in self.bindings:
            out |= b.vars()
        return out


@dataclass(frozen=True)
class ConicConstraint:
    """Affine-slice membership ``rows(x) ∈ cone``."""

    rows: tuple[LinExpr, ...]
    cone: object  # cones.Cone

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(as_expr(r) for r in self.rows))
        if len(self.rows) != self.cone.dim:
            raise ModelError(
                f"cone {self.cone} expects {self.cone.dim} rows, got {len(self.rows)}"
            )

    def vars(self) -> set[VarId]:
        out: set[VarId] = set()
        for r in self.rows:
            out |= r.vars()
        return out


@dataclass(frozen=True)
class Disjunct:
    boolean: BooleanVar
    scalar_constraints: tuple[ScalarConstraint, ...] = ()
    conic_constraints: tuple[ConicConstraint, ...] = ()
    explicitly_empty: bool = False

    def vars(self) -> set[VarId]:
        out: set[VarId] = set()
        for c in self.scalar_constraints:
            out |= c.vars()
        for c in self.conic_constraints:
            out |= c.vars()
        return out


@dataclass(frozen=True)
class Disjunction:
    index: int
    disjuncts: tuple[Disjunct, ...]

    def __post_init__(self):
        if not self.disjuncts:
            raise ModelError("disjunction needs at least one disjunct")
        for i, d in enumerate(self.disjuncts):
            if d.boolean != BooleanVar(self.index, i):
                raise ModelError("disjunct booleans must be (disjunction, position) pairs")

    def vars(self) -> set[VarId]:
        out: set[VarId] = set()
        for d in self.disjuncts:
            out |= d.vars()
        return out


@dataclass(frozen=True)
class CnfClause:
    positives: frozenset[BooleanVar] = frozenset()
    negatives: frozenset[BooleanVar] = frozenset()

    def __post_init__(self):
        if self.positives & self.negatives:
            raise ModelError("clause has a literal in both polarities")


@dataclass(frozen=True)
class CnfFormula:
    clauses: tuple[CnfClause, ...] = ()

    def booleans(self) -> set[BooleanVar]:
        out: set[BooleanVar] = set()
        for cl in self.clauses:
            out |= cl.positives | cl.negatives
        return out


@dataclass(frozen=True)
class BoolRow:
    """Linear row over Boolean indicators: ``sum(coef*y) + constant <= 0`` (or == 0)."""

    terms: tuple[tuple[BooleanVar, float], ...]
    constant: float = 0.0
    sense: str = "le"

    def booleans(self) -> set[BooleanVar]:
        return {b for b, _ in self.terms}


@dataclass(frozen=True)
class GdpModel:
    variables: tuple[ContinuousVar, ...]
    objective: LinExpr
    global_linear: tuple[LinRow, ...] = ()
    global_scalar: tuple[ScalarConstraint, ...] = ()
    global_conic: tuple[ConicConstraint, ...] = ()
    disjunctions: tuple[Disjunction, ...] = ()
    logic: CnfFormula = CnfFormula()
    bool_rows: tuple[BoolRow, ...] = ()
    name: str = ""

    def __post_init__(self):
        for j, v in enumerate(self.variables):
            if v.id != j:
                raise ModelError("variable ids must be dense 0..n-1 in order")
        for k, dj in enumerate(self.disjunctions):
            if dj.index != k:
                raise ModelError("disjunction indices must be dense 0..K-1 in order")

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    def booleans(self) -> list[BooleanVar]:
        out = []
        for dj in self.disjunctions:
            out.extend(d.boolean for d in dj.disjuncts)
        return out

    def bounds(self) -> tuple[list[float], list[float]]:
        return [v.lower for v in self.variables], [v.upper for v in self.variables]


# ---------------------------------------------------------------------------
# Flat models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TaggedRow:
    expr: LinExpr
    sense: str
    tag: str = ""


@dataclass(frozen=True)
class TaggedCone:
    rows: tuple[LinExpr, ...]
    cone: object
    tag: str = ""


@dataclass(frozen=True)
class MicpModel:
    """Flat mixed-integer conic program: linear objective, linear rows,
    affine cone slices, binary markers. Row tags record provenance
    (which disjunct produced each row)."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]
    binary: tuple[bool, ...]
    objective: LinExpr
    rows: tuple[TaggedRow, ...] = ()
    cones: tuple[TaggedCone, ...] = ()
    var_names: tuple[str, ...] = ()

    def __post_init__(self):
        n = len(self.lower)
        if len(self.upper) != n or len(self.binary) != n:
            raise ModelError("bound/binary arrays must share length")
        for j in range(n):
            if self.lower[j] > self.upper[j]:
                raise ModelError(f"var {j}: crossed bounds")
            if self.binary[j] and not (self.lower[j] >= 0.0 and self.upper[j] <= 1.0):
                raise ModelError(f"binary var {j} must have bounds within [0,1]")
        for tc in self.cones:
            if len(tc.rows) != tc.cone.dim:
                raise ModelError("cone slice dimension mismatch")
        names = self.var_names or tuple(f"x{j}" for j in range(n))
        object.__setattr__(self, "var_names", names)

    @property
    def n_vars(self) -> int:
        return len(self.lower)

    def binary_indices(self) -> list[int]:
        return [j for j, b in enumerate(self.binary) if b]


@dataclass(frozen=True)
class ScalarRow:
    """Atom row ``h(bindings) <= relax``."""

    atom: object
    bindings: tuple[LinExpr, ...]
    relax: LinExpr = LinExpr.ZERO
    tag: str = ""


@dataclass(frozen=True)
class PerspRow:
    """Perspective row ``lam * h(bindings/lam) - relax <= 0`` (closure at lam=0)."""

    atom: object
    bindings: tuple[LinExpr, ...]
    lam: LinExpr
    relax: LinExpr = LinExpr.ZERO
    tag: str = ""


@dataclass(frozen=True)
class ScalarMinlp:
    """Scalar mixed-integer NLP over catalog atoms (big-M / HR-eps output)."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]
    binary: tuple[bool, ...]
    objective: LinExpr
    rows: tuple[TaggedRow, ...] = ()
    atom_rows: tuple[ScalarRow, ...] = ()
    persp_rows: tuple[PerspRow, ...] = ()
    cones: tuple[TaggedCone, ...] = ()
    var_names: tuple[str, ...] = ()

    def __post_init__(self):
        names = self.var_names or tuple(f"x{j}" for j in range(len(self.lower)))
        object.__setattr__(self, "var_names", names)

    @property
    def n_vars(self) -> int:
        return len(self.lower)


# ---------------------------------------------------------------------------
# Validation and summaries
# ---------------------------------------------------------------------------


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.errors

    @property
    def issues(self) -> list[str]:
        return self.errors + self.warnings


def validate_gdp(model: GdpModel) -> ValidationReport:
    """Structural validation: dangling variables, dimension mismatches,
    unbounded disjunct variables (hull needs finite boxes), empty disjuncts.

    Pure and idempotent; never raises."""
    rep = ValidationReport()
    n = model.n_vars
    declared = set(range(n))

    def check_vars(vs: set[VarId], where: str):
        bad = sorted(v for v in vs if v not in declared)
        for v in bad:
            rep.errors.append(f"dangling variable x{v} in {where}")

    check_vars(model.objective.vars(), "objective")
    for i, row in enumerate(model.global_linear):
        check_vars(row.expr.vars(), f"global linear row {i}")
    for i, sc in enumerate(model.global_scalar):
        check_vars(sc.vars(), f"global scalar constraint {i}")
    for i, cc in enumerate(model.global_conic):
        check_vars(cc.vars(), f"global conic constraint {i}")
        if len(cc.rows) != cc.cone.dim:  # pragma: no cover - blocked by ctor
            rep.errors.append(f"global conic constraint {i}: dimension mismatch")

    logic_booleans = model.logic.booleans()
    for br in model.bool_rows:
        logic_booleans |= br.booleans()
    known = set()
    for dj in model.disjunctions:
        for d in dj.disjuncts:
            known.add(d.boolean)
    for b in sorted(logic_booleans):
        if b not in known:
            rep.errors.append(f"logic references unknown Boolean {b}")

    for dj in model.disjunctions:
        for d in dj.disjuncts:
            where = f"disjunction {dj.index} disjunct {d.boolean.disjunct}"
            check_vars(d.vars(), where)
            if (
                not d.scalar_constraints
                and not d.conic_constraints
                and not d.explicitly_empty
            ):
                rep.errors.append(f"{where} is empty and not flagged explicitly empty")
        dvars = dj.vars() & declared
        for v in sorted(dvars):
            var = model.variables[v]
            if not math.isfinite(var.lower) or not math.isfinite(var.upper):
                rep.warnings.append(
                    f"x{v} in disjunction {dj.index} lacks finite bounds; "
                    "hull reformulation requires finite bounds"
                )
    return rep


@dataclass(frozen=True)
class Summary:
    n_vars: int
    n_disjunctions: int
    n_disjuncts: int
    n_booleans: int
    n_global: int


def model_summary(model: GdpModel) -> Summary:
    n_disjuncts = sum(len(dj.disjuncts) for dj in model.disjunctions)
    n_global = (
        len(model.global_linear) + len(model.global_scalar) + len(model.global_conic)
    )
    return Summary(
        n_vars=model.n_vars,
        n_disjunctions=len(model.disjunctions),
        n_disjuncts=n_disjuncts,
        n_booleans=n_disjuncts,
        n_global=n_global,
    )
