"""Line-oriented text format for GDP models.

Human-readable sections (VARS, GLOBAL, DISJUNCTION k, CNF, BOOLROW) with a
lossless round trip: reals carry 17 significant digits, expressions are
``const idx:coef ...`` token lists, atom/cone parameters are JSON. Parse
errors report line and column.
"""

from __future__ import annotations

import json
import math

from . import atoms as at
from . import cones as cn
from .model import (
    BooleanVar,
    BoolRow,
    CnfClause,
    CnfFormula,
    ConicConstraint,
    ContinuousVar,
    Disjunct,
    Disjunction,
    GdpModel,
    LinExpr,
    LinRow,
    ScalarConstraint,
)

_HEADER = "CONEGDP GDP 1"


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int = 1):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


def _fmt(v: float) -> str:
    if v == math.inf:
        return "inf"
    if v == -math.inf:
        return "-inf"
    return format(v, ".17g")


def _fmt_expr(e: LinExpr) -> str:
    parts = [_fmt(e.constant)]
    for v, c in sorted(e.terms.items()):
        parts.append(f"{v}:{_fmt(c)}")
    return " ".join(parts)


def _fmt_cone(cone: cn.Cone) -> str:
    if cone.variant in ("pow3", "dpow3"):
        return f"{cone.variant} {_fmt(cone.alpha)}"
    if cone.variant in ("powk", "dpowk"):
        return f"{cone.variant} {cone.dim} {json.dumps(list(cone.alphas))}"
    return f"{cone.variant} {cone.dim}"


def _fmt_atom(atom) -> str:
    return f"{atom.kind} {json.dumps(list(atom.params()), separators=(',', ':'))}"


def _scalar_line(sc: ScalarConstraint) -> str:
    args = " | ".join(_fmt_expr(b) for b in sc.bindings)
    return f"ATOM {_fmt_atom(sc.atom)} :: {args}"


def _conic_line(cc: ConicConstraint) -> str:
    rows = " | ".join(_fmt_expr(r) for r in cc.rows)
    return f"CONE {_fmt_cone(cc.cone)} :: {rows}"


def serialize_model(model: GdpModel) -> str:
    """Deterministic, lossless text form of a GDP model."""
    out = [_HEADER]
    if model.name:
        out.append(f"NAME {model.name}")
    out.append(f"VARS {model.n_vars}")
    for v in model.variables:
        out.append(f"V {v.id} {_fmt(v.lower)} {_fmt(v.upper)} {v.name}")
    out.append(f"OBJ {_fmt_expr(model.objective)}")
    out.append("GLOBAL")
    for row in model.global_linear:
        out.append(f"LIN {row.sense} {_fmt_expr(row.expr)}")
    for sc in model.global_scalar:
        out.append(_scalar_line(sc))
    for cc in model.global_conic:
        out.append(_conic_line(cc))
    for dj in model.disjunctions:
        out.append(f"DISJUNCTION {dj.index}")
        for d in dj.disjuncts:
            flag = " EMPTY" if d.explicitly_empty else ""
            out.append(f"DISJUNCT {d.boolean.disjunct}{flag}")
            for sc in d.scalar_constraints:
                out.append(_scalar_line(sc))
            for cc in d.conic_constraints:
                out.append(_conic_line(cc))
    for cl in model.logic.clauses:
        lits = [f"+{b.disjunction}:{b.disjunct}" for b in sorted(cl.positives)]
        lits += [f"-{b.disjunction}:{b.disjunct}" for b in sorted(cl.negatives)]
        out.append("CNF " + " ".join(lits))
    for row in model.bool_rows:
        terms = " ".join(f"{b.disjunction}:{b.disjunct}*{_fmt(c)}" for b, c in row.terms)
        out.append(f"BOOLROW {row.sense} {_fmt(row.constant)} {terms}")
    out.append("END")
    return "\n".join(out) + "\n"


class _Reader:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.pos = 0

    @property
    def lineno(self) -> int:
        return self.pos

    def peek(self):
        while self.pos < len(self.lines) and not self.lines[self.pos].strip():
            self.pos += 1
        if self.pos >= len(self.lines):
            return None
        return self.lines[self.pos]

    def take(self):
        line = self.peek()
        if line is None:
            raise ParseError("unexpected end of file", len(self.lines) + 1)
        self.pos += 1
        return line


def _parse_float(tok: str, lineno: int, col: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"bad real {tok!r}", lineno, col) from None


def _parse_expr(text: str, lineno: int, col: int) -> LinExpr:
    toks = text.split()
    if not toks:
        raise ParseError("empty expression", lineno, col)
    const = _parse_float(toks[0], lineno, col)
    terms = {}
    for tok in toks[1:]:
        if ":" not in tok:
            raise ParseError(f"bad term {tok!r} (want idx:coef)", lineno, col)
        vs, cs = tok.split(":", 1)
        try:
            v = int(vs)
        except ValueError:
            raise ParseError(f"bad variable index {vs!r}", lineno, col) from None
        terms[v] = _parse_float(cs, lineno, col)
    return LinExpr(terms, const)


def _parse_cone(spec: str, lineno: int) -> cn.Cone:
    toks = spec.split(None, 2)
    kind = toks[0]
    try:
        if kind in ("nonneg", "soc", "rsoc"):
            return cn.Cone(kind, int(toks[1]))
        if kind in ("exp", "dexp"):
            return cn.Cone(kind, 3)
        if kind in ("pow3", "dpow3"):
            return cn.Cone(kind, 3, alpha=float(toks[1]))
        if kind in ("powk", "dpowk"):
            return cn.Cone(kind, int(toks[1]), alphas=tuple(json.loads(toks[2])))
    except (IndexError, ValueError, cn.ConeError) as exc:
        raise ParseError(f"bad cone spec {spec!r}: {exc}", lineno) from None
    raise ParseError(f"unknown cone tag {kind!r}", lineno)


def _parse_atom(spec: str, lineno: int):
    kind, _, params = spec.partition(" ")
    try:
        payload = json.loads(params) if params.strip() else []
        payload = [tuple(p) if isinstance(p, list) else p for p in payload]
        payload = [
            tuple(tuple(q) if isinstance(q, list) else q for q in p) if isinstance(p, tuple) else p
            for p in payload
        ]
        return at.atom_from_spec(kind, tuple(payload))
    except (json.JSONDecodeError, at.AtomError) as exc:
        raise ParseError(f"bad atom spec {spec!r}: {exc}", lineno) from None


def _parse_constraint(line: str, lineno: int):
    head, sep, rest = line.partition("::")
    if not sep:
        raise ParseError("missing '::' in constraint", lineno)
    args = [a.strip() for a in rest.split("|")]
    if line.startswith("ATOM "):
        atom = _parse_atom(head[5:].strip(), lineno)
        bindings = tuple(_parse_expr(a, lineno, 1) for a in args)
        try:
            return ScalarConstraint(atom, bindings)
        except Exception as exc:
            raise ParseError(str(exc), lineno) from None
    if line.startswith("CONE "):
        cone = _parse_cone(head[5:].strip(), lineno)
        rows = tuple(_parse_expr(a, lineno, 1) for a in args)
        try:
            return ConicConstraint(rows, cone)
        except Exception as exc:
            raise ParseError(str(exc), lineno) from None
    raise ParseError(f"unknown constraint line {line.split()[0]!r}", lineno)


def parse_model(text: str) -> GdpModel:
    rd = _Reader(text)
    if rd.take().strip() != _HEADER:
        raise ParseError(f"expected header {_HEADER!r}", 1)
    name = ""
    line = rd.take()
    if line.startswith("NAME "):
        name = line[5:].strip()
        line = rd.take()
    if not line.startswith("VARS "):
        raise ParseError("expected VARS", rd.lineno)
    try:
        n = int(line.split()[1])
    except (IndexError, ValueError):
        raise ParseError("bad VARS count", rd.lineno) from None
    variables = []
    for _ in range(n):
        ln = rd.take()
        toks = ln.split(None, 4)
        if len(toks) < 4 or toks[0] != "V":
            raise ParseError("expected V id lower upper name", rd.lineno)
        vid = int(toks[1])
        lo = _parse_float(toks[2], rd.lineno, 3)
        hi = _parse_float(toks[3], rd.lineno, 4)
        variables.append(ContinuousVar(vid, lo, hi, name=toks[4] if len(toks) > 4 else ""))
    line = rd.take()
    if not line.startswith("OBJ "):
        raise ParseError("expected OBJ", rd.lineno)
    objective = _parse_expr(line[4:], rd.lineno, 1)
    line = rd.take()
    if line.strip() != "GLOBAL":
        raise ParseError("expected GLOBAL", rd.lineno)

    global_linear, global_scalar, global_conic = [], [], []
    disjunctions = []
    clauses = []
    bool_rows = []
    current_disjunction = None  # (index, [disjuncts])
    current_disjunct = None  # (index, empty_flag, scalars, conics)
    in_global = True

    def close_disjunct():
        nonlocal current_disjunct
        if current_disjunct is not None:
            i, empty, scs, ccs = current_disjunct
            current_disjunction[1].append(
                Disjunct(
                    BooleanVar(current_disjunction[0], i),
                    tuple(scs),
                    tuple(ccs),
                    explicitly_empty=empty,
                )
            )
            current_disjunct = None

    def close_disjunction():
        nonlocal current_disjunction
        close_disjunct()
        if current_disjunction is not None:
            k, djs = current_disjunction
            disjunctions.append(Disjunction(k, tuple(djs)))
            current_disjunction = None

    while True:
        line = rd.take()
        stripped = line.strip()
        if stripped == "END":
            close_disjunction()
            break
        if stripped.startswith("DISJUNCTION"):
            close_disjunction()
            in_global = False
            try:
                current_disjunction = (int(stripped.split()[1]), [])
            except (IndexError, ValueError):
                raise ParseError("bad DISJUNCTION index", rd.lineno) from None
            continue
        if stripped.startswith("DISJUNCT"):
            if current_disjunction is None:
                raise ParseError("DISJUNCT outside DISJUNCTION", rd.lineno)
            close_disjunct()
            toks = stripped.split()
            try:
                current_disjunct = (int(toks[1]), len(toks) > 2 and toks[2] == "EMPTY", [], [])
            except (IndexError, ValueError):
                raise ParseError("bad DISJUNCT index", rd.lineno) from None
            continue
        if stripped.startswith("CNF"):
            close_disjunction()
            pos, neg = set(), set()
            for tok in stripped.split()[1:]:
                sign, body = tok[0], tok[1:]
                if sign not in "+-" or ":" not in body:
                    raise ParseError(f"bad CNF literal {tok!r}", rd.lineno)
                k, i = body.split(":")
                (pos if sign == "+" else neg).add(BooleanVar(int(k), int(i)))
            clauses.append(CnfClause(frozenset(pos), frozenset(neg)))
            continue
        if stripped.startswith("BOOLROW"):
            close_disjunction()
            toks = stripped.split()
            if len(toks) < 3 or toks[1] not in ("le", "eq"):
                raise ParseError("bad BOOLROW", rd.lineno)
            const = _parse_float(toks[2], rd.lineno, 3)
            terms = []
            for tok in toks[3:]:
                body, _, coef = tok.partition("*")
                k, i = body.split(":")
                terms.append((BooleanVar(int(k), int(i)), _parse_float(coef, rd.lineno, 1)))
            bool_rows.append(BoolRow(tuple(terms), const, toks[1]))
            continue
        if stripped.startswith("LIN "):
            toks = stripped.split(None, 2)
            if len(toks) < 3 or toks[1] not in ("le", "eq"):
                raise ParseError("bad LIN row", rd.lineno)
            row = LinRow(_parse_expr(toks[2], rd.lineno, 1), toks[1])
            if not in_global:
                raise ParseError("LIN rows are global only", rd.lineno)
            global_linear.append(row)
            continue
        if stripped.startswith(("ATOM ", "CONE ")):
            item = _parse_constraint(stripped, rd.lineno)
            if current_disjunct is not None:
                if isinstance(item, ScalarConstraint):
                    current_disjunct[2].append(item)
                else:
                    current_disjunct[3].append(item)
            elif in_global:
                if isinstance(item, ScalarConstraint):
                    global_scalar.append(item)
                else:
                    global_conic.append(item)
            else:
                raise ParseError("constraint outside GLOBAL or DISJUNCT", rd.lineno)
            continue
        raise ParseError(f"unrecognized line {stripped.split()[0]!r}", rd.lineno)

    try:
        return GdpModel(
            variables=tuple(variables),
            objective=objective,
            global_linear=tuple(global_linear),
            global_scalar=tuple(global_scalar),
            global_conic=tuple(global_conic),
            disjunctions=tuple(disjunctions),
            logic=CnfFormula(tuple(clauses)),
            bool_rows=tuple(bool_rows),
            name=name,
        )
    except Exception as exc:
        raise ParseError(f"model validation failed: {exc}", rd.lineno) from None
