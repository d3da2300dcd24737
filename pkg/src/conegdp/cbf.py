"""Conic Benchmark Format (v3) export and a minimal reader.

Mapping: variables are declared free; bounds, linear rows, and cone slices
all become CON blocks (CBF has no variable-bound section), binaries go to
INT. Exponential slices are emitted in the reverse coordinate order the
format prescribes (x3 >= x2*e^(x1/x2)); power cones use a POWCONES
parameter block. Output is byte-stable for a fixed model.
"""

from __future__ import annotations

import math

from . import cones as cn
from .model import LinExpr, MicpModel, TaggedCone, TaggedRow


class CbfError(ValueError):
    pass


def _fmt(v: float) -> str:
    return format(v, ".17g")


def canonical_micp(micp: MicpModel) -> MicpModel:
    """Equivalent model with finite bounds materialized as linear rows and
    provenance tags dropped; the shape a CBF round trip reproduces."""
    rows = [TaggedRow(r.expr, r.sense) for r in micp.rows if r.sense == "eq"]
    rows += [TaggedRow(r.expr, r.sense) for r in micp.rows if r.sense == "le"]
    for j in range(micp.n_vars):
        if micp.binary[j]:
            continue  # binary [0,1] boxes travel as a dedicated trailing block
        lo, hi = micp.lower[j], micp.upper[j]
        if math.isfinite(lo):
            rows.append(TaggedRow(LinExpr({j: -1.0}, lo), "le"))
        if math.isfinite(hi):
            rows.append(TaggedRow(LinExpr({j: 1.0}, -hi), "le"))
    inf = math.inf
    # binaries keep [0,1] so the model invariant holds; their bound rows are
    # still materialized above (CBF INT alone does not bound a variable)
    lower = tuple(0.0 if b else -inf for b in micp.binary)
    upper = tuple(1.0 if b else inf for b in micp.binary)
    return MicpModel(
        lower=lower,
        upper=upper,
        binary=micp.binary,
        objective=micp.objective,
        rows=tuple(rows),
        cones=tuple(TaggedCone(tc.rows, tc.cone) for tc in micp.cones),
        var_names=micp.var_names,
    )


_SIMPLE = {"soc": "Q", "rsoc": "QR"}


def export_cbf(micp: MicpModel) -> str:
    """CBF v3 text for a flat mixed-integer conic model."""
    m = canonical_micp(micp)
    n = m.n_vars

    pow_params: list[tuple[float, ...]] = []

    def pow_ref(alphas) -> int:
        alphas = tuple(alphas)
        if alphas not in pow_params:
            pow_params.append(alphas)
        return pow_params.index(alphas)

    # constraint blocks in order: equalities, inequalities, cone slices
    blocks: list[tuple[str, int]] = []
    affine_rows: list[LinExpr] = []
    eq = [r.expr for r in m.rows if r.sense == "eq"]
    le = [r.expr for r in m.rows if r.sense == "le"]
    if eq:
        blocks.append(("L=", len(eq)))
        affine_rows.extend(eq)
    if le:
        blocks.append(("L-", len(le)))
        affine_rows.extend(le)
    for tc in m.cones:
        cone, rows = tc.cone, list(tc.rows)
        if cone.variant == "nonneg":
            blocks.append(("L+", cone.dim))
        elif cone.variant in _SIMPLE:
            blocks.append((_SIMPLE[cone.variant], cone.dim))
        elif cone.variant == "exp":
            blocks.append(("EXP", 3))
            rows = rows[::-1]
        elif cone.variant == "pow3":
            blocks.append((f"@{pow_ref((cone.alpha, 1.0 - cone.alpha))}:POW", 3))
        elif cone.variant == "powk":
            blocks.append((f"@{pow_ref(cone.alphas)}:POW", cone.dim))
        else:
            raise CbfError(f"cone {cone} has no CBF encoding")
        affine_rows.extend(rows)

    bins = m.binary_indices()
    if bins:
        # trailing L+ block pins every INT variable into [0,1]; the reader
        # recognizes the pattern and folds it back into variable bounds
        blocks.append(("L+", 2 * len(bins)))
        for j in bins:
            affine_rows.append(LinExpr({j: 1.0}))
            affine_rows.append(LinExpr({j: -1.0}, 1.0))

    out = ["VER", "3", ""]
    if pow_params:
        out += ["POWCONES", f"{len(pow_params)} {sum(len(p) for p in pow_params)}"]
        for alphas in pow_params:
            out.append(str(len(alphas)))
            out.extend(_fmt(a) for a in alphas)
        out.append("")
    out += ["OBJSENSE", "MIN", ""]
    out += ["VAR", f"{n} 1", f"F {n}", ""]
    ints = m.binary_indices()
    if ints:
        out += ["INT", str(len(ints))]
        out.extend(str(j) for j in ints)
        out.append("")
    total_rows = sum(d for _, d in blocks)
    out += ["CON", f"{total_rows} {len(blocks)}"]
    out.extend(f"{tag} {d}" for tag, d in blocks)
    out.append("")

    obj_terms = sorted(m.objective.terms.items())
    out += ["OBJACOORD", str(len(obj_terms))]
    out.extend(f"{j} {_fmt(c)}" for j, c in obj_terms)
    out.append("")
    if m.objective.constant != 0.0:
        out += ["OBJBCOORD", _fmt(m.objective.constant), ""]

    acoord = []
    bcoord = []
    for i, expr in enumerate(affine_rows):
        for j, c in sorted(expr.terms.items()):
            acoord.append(f"{i} {j} {_fmt(c)}")
        if expr.constant != 0.0:
            bcoord.append(f"{i} {_fmt(expr.constant)}")
    out += ["ACOORD", str(len(acoord))]
    out.extend(acoord)
    out.append("")
    out += ["BCOORD", str(len(bcoord))]
    out.extend(bcoord)
    out.append("")
    return "\n".join(out)


def parse_cbf(text: str) -> MicpModel:
    """Minimal reader for documents produced by export_cbf."""
    tokens_by_section: dict[str, list[str]] = {}
    lines = [ln for ln in text.splitlines()]
    i = 0
    order = []
    while i < len(lines):
        ln = lines[i].strip()
        i += 1
        if not ln or ln.startswith("#"):
            continue
        section = ln
        body = []
        while i < len(lines) and lines[i].strip():
            body.append(lines[i].strip())
            i += 1
        tokens_by_section[section] = body
        order.append(section)

    if tokens_by_section.get("VER", ["0"])[0] != "3":
        raise CbfError("unsupported CBF version")
    if tokens_by_section.get("OBJSENSE", ["MIN"])[0] != "MIN":
        raise CbfError("only OBJSENSE MIN is supported")

    pow_params = []
    if "POWCONES" in tokens_by_section:
        body = tokens_by_section["POWCONES"]
        k = int(body[0].split()[0])
        pos = 1
        for _ in range(k):
            ln = int(body[pos])
            pos += 1
            alphas = tuple(float(body[pos + t]) for t in range(ln))
            pos += ln
            pow_params.append(alphas)

    var_body = tokens_by_section["VAR"]
    n = int(var_body[0].split()[0])

    binary = [False] * n
    if "INT" in tokens_by_section:
        body = tokens_by_section["INT"]
        for tok in body[1:]:
            binary[int(tok)] = True

    con_body = tokens_by_section.get("CON", ["0 0"])
    blocks = []
    for ln in con_body[1:]:
        tag, d = ln.split()
        blocks.append((tag, int(d)))
    total_rows = sum(d for _, d in blocks)

    obj = {}
    for ln in tokens_by_section.get("OBJACOORD", ["0"])[1:]:
        j, c = ln.split()
        obj[int(j)] = float(c)
    obj_const = float(tokens_by_section.get("OBJBCOORD", ["0"])[0])

    coefs: list[dict[int, float]] = [dict() for _ in range(total_rows)]
    consts = [0.0] * total_rows
    for ln in tokens_by_section.get("ACOORD", ["0"])[1:]:
        i_, j_, c_ = ln.split()
        coefs[int(i_)][int(j_)] = float(c_)
    for ln in tokens_by_section.get("BCOORD", ["0"])[1:]:
        i_, c_ = ln.split()
        consts[int(i_)] = float(c_)
    exprs = [LinExpr(t, c) for t, c in zip(coefs, consts)]

    rows: list[TaggedRow] = []
    cones: list[TaggedCone] = []
    pos = 0
    for tag, d in blocks:
        chunk = exprs[pos : pos + d]
        pos += d
        if tag == "L=":
            rows.extend(TaggedRow(e, "eq") for e in chunk)
        elif tag == "L-":
            rows.extend(TaggedRow(e, "le") for e in chunk)
        elif tag == "L+":
            cones.append(TaggedCone(tuple(chunk), cn.nonneg(d)))
        elif tag == "Q":
            cones.append(TaggedCone(tuple(chunk), cn.soc(d)))
        elif tag == "QR":
            cones.append(TaggedCone(tuple(chunk), cn.rsoc(d)))
        elif tag == "EXP":
            cones.append(TaggedCone(tuple(chunk[::-1]), cn.exp_cone()))
        elif tag.startswith("@") and tag.endswith(":POW"):
            alphas = pow_params[int(tag[1:-4])]
            if d == 3 and len(alphas) == 2:
                cones.append(TaggedCone(tuple(chunk), cn.pow3(alphas[0])))
            else:
                cones.append(TaggedCone(tuple(chunk), cn.powk(alphas, d)))
        else:
            raise CbfError(f"unsupported CON tag {tag!r}")

    ints = [j for j, b in enumerate(binary) if b]
    if ints and cones and cones[-1].cone.variant == "nonneg" and cones[-1].cone.dim == 2 * len(ints):
        expect = []
        for j in ints:
            expect.append(LinExpr({j: 1.0}))
            expect.append(LinExpr({j: -1.0}, 1.0))
        if list(cones[-1].rows) == expect:
            cones.pop()

    inf = math.inf
    lower = tuple(0.0 if b else -inf for b in binary)
    upper = tuple(1.0 if b else inf for b in binary)
    return MicpModel(
        lower=lower,
        upper=upper,
        binary=tuple(binary),
        objective=LinExpr(obj, obj_const),
        rows=tuple(rows),
        cones=tuple(cones),
    )
