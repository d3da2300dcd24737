"""Seeded generators for the six instance families.

Randomness comes from named splitmix64 streams: every parameter family of a
generator draws from its own stream keyed by (seed, generator id, family
label), so adding a parameter family never perturbs existing draws and two
calls with identical arguments produce identical models byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import atoms as at
from .model import (
    BooleanVar,
    BoolRow,
    CnfClause,
    CnfFormula,
    ContinuousVar,
    Disjunct,
    Disjunction,
    GdpModel,
    LinExpr,
    LinRow,
    ScalarConstraint,
)

_MASK = (1 << 64) - 1


class GeneratorError(ValueError):
    pass


@dataclass(frozen=True)
class Seed:
    value: int
    generator: str


def _fnv1a(text: str) -> int:
    h = 0xCBF29CE484222325
    for ch in text.encode():
        h = ((h ^ ch) * 0x100000001B3) & _MASK
    return h


class Stream:
    """splitmix64 stream keyed by (seed, *labels)."""

    def __init__(self, seed: int, *labels: str):
        self._state = (int(seed) ^ _fnv1a("/".join(labels))) & _MASK
        self._spare_normal: float | None = None

    def u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return (z ^ (z >> 31)) & _MASK

    def unit(self) -> float:
        return (self.u64() >> 11) * 2.0**-53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.unit()

    def normal(self) -> float:
        if self._spare_normal is not None:
            v, self._spare_normal = self._spare_normal, None
            return v
        u1 = max(self.unit(), 2.0**-53)
        u2 = self.unit()
        r = math.sqrt(-2.0 * math.log(u1))
        self._spare_normal = r * math.sin(2.0 * math.pi * u2)
        return r * math.cos(2.0 * math.pi * u2)


# ---------------------------------------------------------------------------
# chi-squared inverse CDF (series + continued fraction, Newton refinement)
# ---------------------------------------------------------------------------


def _gammainc_lower(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a,x): power series for x < a+1,
    Lentz continued fraction for the upper tail otherwise."""
    if x < 0 or a <= 0:
        raise ValueError("gammainc domain")
    if x == 0.0:
        return 0.0
    lg = math.lgamma(a)
    if x < a + 1.0:
        term = 1.0 / a
        total = term
        n = a
        for _ in range(500):
            n += 1.0
            term *= x / n
            total += term
            if abs(term) < abs(total) * 1e-16:
                break
        return total * math.exp(-x + a * math.log(x) - lg)
    # continued fraction for Q(a,x)
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    f = d
    for i in range(1, 500):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    q = math.exp(-x + a * math.log(x) - lg) * f
    return 1.0 - q


def chi2_inverse(prob: float, dof: int) -> float:
    """Inverse chi-squared CDF to ~1e-10 relative accuracy: bisection bracket
    plus safeguarded Newton on P(dof/2, x/2) = prob."""
    if not (0.0 < prob < 1.0):
        raise ValueError("prob must be in (0,1)")
    a = dof / 2.0
    lo, hi = 0.0, float(dof)
    while _gammainc_lower(a, hi / 2.0) < prob:
        hi *= 2.0
        if hi > 1e8:
            raise ValueError("chi2_inverse bracket failure")
    x = dof * (1.0 - 2.0 / (9.0 * dof) + math.sqrt(2.0 / (9.0 * dof))) ** 3  # Wilson-Hilferty
    x = min(max(x, 1e-8), hi)
    lg = math.lgamma(a)
    for _ in range(200):
        f = _gammainc_lower(a, x / 2.0) - prob
        if f > 0:
            hi = x
        else:
            lo = x
        pdf = 0.5 * math.exp((a - 1.0) * math.log(x / 2.0) - x / 2.0 - lg)
        if pdf > 0.0:
            step = f / pdf
            nxt = x - step
        else:
            nxt = 0.5 * (lo + hi)
        if not (lo < nxt < hi):
            nxt = 0.5 * (lo + hi)
        if abs(nxt - x) <= 1e-12 * max(1.0, x):
            return nxt
        x = nxt
    return x


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _affine(e: LinExpr) -> ScalarConstraint:
    return ScalarConstraint(at.Affine(), (e,))


def _eq_pair(e: LinExpr) -> tuple[ScalarConstraint, ScalarConstraint]:
    """Equality e = 0 as paired inequalities (disjunct-safe encoding)."""
    return _affine(e), _affine(-e)


# ---------------------------------------------------------------------------
# k-means clustering
# ---------------------------------------------------------------------------


def gen_kclus(K: int, N: int, D: int, seed: int) -> GdpModel:
    """N points in [0,1]^D, K cluster centers; per-point disjunction over
    which center measures the squared distance. Centers are boxed to [0,1]
    and distances to [0,D] (hull needs finite boxes)."""
    if K < 2 or N < K:
        raise GeneratorError("gen_kclus needs K >= 2, N >= K")
    pts = Stream(seed, "kclus", "points")
    p = [[pts.uniform(0.0, 1.0) for _ in range(D)] for _ in range(N)]

    variables = []
    c_id = [[len(variables) + k * D + j for j in range(D)] for k in range(K)]
    for k in range(K):
        for j in range(D):
            variables.append(ContinuousVar(c_id[k][j], 0.0, 1.0, name=f"c_{k}_{j}"))
    d_id = [len(variables) + i for i in range(N)]
    for i in range(N):
        variables.append(ContinuousVar(d_id[i], 0.0, float(D), name=f"d_{i}"))

    global_linear = tuple(
        LinRow(LinExpr.var(c_id[k - 1][0]) - LinExpr.var(c_id[k][0]), "le")
        for k in range(1, K)
    )
    disjunctions = []
    for i in range(N):
        djs = []
        for k in range(K):
            bindings = tuple(
                LinExpr({c_id[k][j]: -1.0}, p[i][j]) for j in range(D)
            ) + (LinExpr.var(d_id[i]),)
            djs.append(
                Disjunct(BooleanVar(i, k), (ScalarConstraint(at.SumSquares(D), bindings),))
            )
        disjunctions.append(Disjunction(i, tuple(djs)))

    obj = LinExpr({d_id[i]: 1.0 for i in range(N)})
    return GdpModel(
        variables=tuple(variables),
        objective=obj,
        global_linear=global_linear,
        disjunctions=tuple(disjunctions),
        name=f"kClus_{K}_{N}_{D}_{seed}",
    )


# ---------------------------------------------------------------------------
# random quadratic GDPs
# ---------------------------------------------------------------------------


def gen_socp_random(K: int, Dk: int, n: int, seed: int) -> GdpModel:
    """Disjuncts sum(a'_j x_j^2 + a''_j x_j) + a''' <= 1, x in [-100,100]^n,
    conified as one rotated-SOC slice plus one linear row via a per-disjunct
    epigraph variable t_ik (the published conic form)."""
    if K < 1 or Dk < 1 or n < 1:
        raise GeneratorError("gen_socp_random needs positive sizes")
    s_a1 = Stream(seed, "socp_random", "aprime")
    s_a2 = Stream(seed, "socp_random", "adoubleprime")
    s_a3 = Stream(seed, "socp_random", "atripleprime")
    s_c = Stream(seed, "socp_random", "cost")
    a1 = [[[s_a1.uniform(0.01, 1.0) for _ in range(n)] for _ in range(Dk)] for _ in range(K)]
    a2 = [[[s_a2.uniform(-1.0, 1.0) for _ in range(n)] for _ in range(Dk)] for _ in range(K)]
    a3 = [[s_a3.uniform(-1.0, 1.0) for _ in range(Dk)] for _ in range(K)]
    c = [s_c.uniform(-1000.0, 1000.0) for _ in range(n)]

    variables = [ContinuousVar(j, -100.0, 100.0, name=f"x{j}") for j in range(n)]
    t_id = {}
    tmax = 1e4 * n
    for k in range(K):
        for i in range(Dk):
            vid = len(variables)
            t_id[(k, i)] = vid
            variables.append(ContinuousVar(vid, 0.0, tmax, name=f"t_k{k}_i{i}"))

    disjunctions = []
    for k in range(K):
        djs = []
        for i in range(Dk):
            t = LinExpr.var(t_id[(k, i)])
            quad = ScalarConstraint(
                at.SumSquares(n),
                tuple(LinExpr.var(j, math.sqrt(a1[k][i][j])) for j in range(n)) + (t,),
            )
            lin = t + a3[k][i] - 1.0
            for j in range(n):
                lin = lin + LinExpr.var(j, a2[k][i][j])
            djs.append(Disjunct(BooleanVar(k, i), (quad, _affine(lin))))
        disjunctions.append(Disjunction(k, tuple(djs)))

    obj = LinExpr({j: c[j] for j in range(n)})
    return GdpModel(
        variables=tuple(variables),
        objective=obj,
        disjunctions=tuple(disjunctions),
        name=f"socp_random_{K}_{Dk}_{n}_{seed}",
    )


# ---------------------------------------------------------------------------
# random exponential GDPs
# ---------------------------------------------------------------------------


def gen_exp_random(K: int, Dk: int, n: int, seed: int) -> GdpModel:
    """Disjuncts a' exp(sum a'''' x) <= a'' z + a''', x in [0,10]^n, with the
    published z upper bound and conic form a' v <= a'' z + a''',
    (v, 1, sum a'''' x) in K_exp."""
    if K < 1 or Dk < 1 or n < 1:
        raise GeneratorError("gen_exp_random needs positive sizes")
    s1 = Stream(seed, "exp_random", "aprime")
    s2 = Stream(seed, "exp_random", "adoubleprime")
    s3 = Stream(seed, "exp_random", "atripleprime")
    s4 = Stream(seed, "exp_random", "aquadprime")
    sc = Stream(seed, "exp_random", "cost")
    a1 = [[s1.uniform(0.01, 1.0) for _ in range(Dk)] for _ in range(K)]
    a2 = [[s2.uniform(0.01, 1.0) for _ in range(Dk)] for _ in range(K)]
    a3 = [[s3.uniform(0.01, 1.0) for _ in range(Dk)] for _ in range(K)]
    a4 = [[[s4.uniform(0.01, 1.0) for _ in range(n)] for _ in range(Dk)] for _ in range(K)]
    c = [sc.uniform(-1.0, -0.01) for _ in range(n)]

    x_lo = 0.0
    zu = max(
        (a1[k][i] * math.exp(sum(a4[k][i][j] * x_lo for j in range(n))) - a3[k][i])
        / a2[k][i] ** 2
        for k in range(K)
        for i in range(Dk)
    )
    zl = min(0.0, min((a1[k][i] - a3[k][i]) / a2[k][i] for k in range(K) for i in range(Dk))) - 1.0

    variables = [ContinuousVar(j, 0.0, 10.0, name=f"x{j}") for j in range(n)]
    z_id = len(variables)
    variables.append(ContinuousVar(z_id, zl, zu, name="z"))
    v_id = {}
    for k in range(K):
        for i in range(Dk):
            vid = len(variables)
            v_id[(k, i)] = vid
            arg_hi = 10.0 * sum(a4[k][i])
            v_hi = max(1.0, min(math.exp(min(arg_hi, 700.0)), (a2[k][i] * max(zu, 0.0) + a3[k][i]) / a1[k][i]))
            variables.append(ContinuousVar(vid, 0.0, v_hi, name=f"v_k{k}_i{i}"))

    disjunctions = []
    for k in range(K):
        djs = []
        for i in range(Dk):
            v = LinExpr.var(v_id[(k, i)])
            arg = LinExpr({j: a4[k][i][j] for j in range(n)})
            expc = ScalarConstraint(at.ExpFn(), (arg, v))
            lin = v * a1[k][i] - LinExpr.var(z_id, a2[k][i]) - a3[k][i]
            djs.append(Disjunct(BooleanVar(k, i), (expc, _affine(lin))))
        disjunctions.append(Disjunction(k, tuple(djs)))

    obj = LinExpr({j: c[j] for j in range(n)})
    return GdpModel(
        variables=tuple(variables),
        objective=obj,
        disjunctions=tuple(disjunctions),
        name=f"exp_random_{K}_{Dk}_{n}_{seed}",
    )


# ---------------------------------------------------------------------------
# logistic regression
# ---------------------------------------------------------------------------


def gen_logreg(D: int, n_points: int, sigma: int, seed: int) -> GdpModel:
    """Two unit-variance Gaussian clusters at opposite hypercube corners with
    Mahalanobis separation from the inverse chi-squared recipe; per-point
    class disjunctions with softplus loss rows and sign rows; logic enforces
    a 45-55% class split and puts the two points farthest from the origin in
    opposite classes."""
    if n_points < 4 or n_points % 2 != 0:
        raise GeneratorError("gen_logreg needs an even n_points >= 4")
    if sigma not in (1, 2):
        raise GeneratorError("sigma must be 1 or 2")
    prob = {1: 0.68, 2: 0.95}[sigma]
    sep = math.sqrt(chi2_inverse(prob, D)) / (2.0 * math.sqrt(D))
    pts = Stream(seed, "logreg", "points")
    p = []
    for i in range(n_points):
        center = -sep if i < n_points // 2 else sep
        p.append([center + pts.normal() for _ in range(D)])

    theta_bound = 5.0
    b_max = theta_bound * (max(sum(abs(v) for v in row) for row in p) + 1.0)
    t_hi = b_max + 1.0

    variables = [ContinuousVar(j, -theta_bound, theta_bound, name=f"theta{j}") for j in range(D)]
    th0_id = len(variables)
    variables.append(ContinuousVar(th0_id, -theta_bound, theta_bound, name="theta0"))
    t_id = [len(variables) + i for i in range(n_points)]
    for i in range(n_points):
        variables.append(ContinuousVar(t_id[i], 0.0, t_hi, name=f"t{i}"))

    disjunctions = []
    for i in range(n_points):
        dot = LinExpr({j: p[i][j] for j in range(D)})
        t = LinExpr.var(t_id[i])
        th0 = LinExpr.var(th0_id)
        pos = Disjunct(
            BooleanVar(i, 0),
            (ScalarConstraint(at.Softplus(), (-dot + th0, t)), _affine(-dot)),
        )
        neg = Disjunct(
            BooleanVar(i, 1),
            (ScalarConstraint(at.Softplus(), (dot + th0, t)), _affine(dot)),
        )
        disjunctions.append(Disjunction(i, (pos, neg)))

    lb = math.ceil(0.45 * n_points)
    ub = math.floor(0.55 * n_points)
    split = [
        BoolRow(tuple((BooleanVar(i, 0), -1.0) for i in range(n_points)), float(lb), "le"),
        BoolRow(tuple((BooleanVar(i, 0), 1.0) for i in range(n_points)), -float(ub), "le"),
    ]
    norms = [(sum(v * v for v in p[i]), i) for i in range(n_points)]
    norms.sort(key=lambda t: (-t[0], t[1]))
    fa, fb = norms[0][1], norms[1][1]
    logic = CnfFormula(
        (
            CnfClause(positives=frozenset({BooleanVar(fa, 0), BooleanVar(fb, 0)})),
            CnfClause(negatives=frozenset({BooleanVar(fa, 0), BooleanVar(fb, 0)})),
        )
    )

    obj = LinExpr({t_id[i]: 1.0 for i in range(n_points)})
    return GdpModel(
        variables=tuple(variables),
        objective=obj,
        disjunctions=tuple(disjunctions),
        logic=logic,
        bool_rows=tuple(split),
        name=f"LogReg_{D}_{n_points}_{sigma}_{seed}",
    )


# ---------------------------------------------------------------------------
# process networks
# ---------------------------------------------------------------------------


def gen_process(n_units: int, variant: str, seed: int) -> GdpModel:
    """Process superstructure with exponential input-output units.

    Multi: two serial stages, the units split across them, one alternative
    chosen per stage. Boolean: units in parallel under a shared feed cap,
    each unit either active or forced to zero flow and cost."""
    if n_units < 2:
        raise GeneratorError("gen_process needs n_units >= 2")
    if variant not in ("Multi", "Boolean"):
        raise GeneratorError("variant must be Multi or Boolean")
    sd = Stream(seed, "process", "d")
    st = Stream(seed, "process", "t")
    ss = Stream(seed, "process", "s")
    sg = Stream(seed, "process", "gamma")
    sp = Stream(seed, "process", "price")
    flow_cap = 10.0

    if variant == "Multi":
        sizes = [math.ceil(n_units / 2), n_units - math.ceil(n_units / 2)]
        stages = [s for s in sizes if s > 0]
        d = [[sd.uniform(1.0, 1.2) for _ in range(sz)] for sz in stages]
        tt = [[st.uniform(1.0, 1.3) for _ in range(sz)] for sz in stages]
        sconv = [[ss.uniform(0.8, 1.2) for _ in range(sz)] for sz in stages]
        gamma = [[sg.uniform(2.0, 3.0) for _ in range(sz)] for sz in stages]
        p_feed = sp.uniform(0.1, 0.5)
        p_prod = -sp.uniform(5.0, 10.0)

        variables = [
            ContinuousVar(j, 0.0, flow_cap, name=f"flow{j}") for j in range(len(stages) + 1)
        ]
        c_id = []
        for k in range(len(stages)):
            vid = len(variables)
            c_id.append(vid)
            variables.append(ContinuousVar(vid, 0.0, 3.0, name=f"cost{k}"))
        u_id = {}
        for k, sz in enumerate(stages):
            for i in range(sz):
                vid = len(variables)
                u_id[(k, i)] = vid
                u_hi = sconv[k][i] * flow_cap / d[k][i]
                variables.append(ContinuousVar(vid, 0.0, u_hi, name=f"u_k{k}_i{i}"))

        global_linear = tuple(
            LinRow(LinExpr.var(k + 1) - LinExpr.var(k), "le") for k in range(len(stages))
        )
        disjunctions = []
        for k, sz in enumerate(stages):
            djs = []
            for i in range(sz):
                u = LinExpr.var(u_id[(k, i)])
                conv = ScalarConstraint(
                    at.ExpFn(), (LinExpr.var(k + 1, 1.0 / tt[k][i]), u + 1.0)
                )
                balance = _affine(u * d[k][i] - LinExpr.var(k, sconv[k][i]))
                cost = _eq_pair(LinExpr.var(c_id[k]) - gamma[k][i])
                djs.append(Disjunct(BooleanVar(k, i), (conv, balance) + cost))
            disjunctions.append(Disjunction(k, tuple(djs)))

        obj = LinExpr({c: 1.0 for c in c_id}) + LinExpr.var(0, p_feed) + LinExpr.var(len(stages), p_prod)
        return GdpModel(
            variables=tuple(variables),
            objective=obj,
            global_linear=global_linear,
            disjunctions=tuple(disjunctions),
            name=f"proc{n_units}",
        )

    # Boolean variant
    d = [sd.uniform(1.0, 1.2) for _ in range(n_units)]
    tt = [st.uniform(1.0, 1.3) for _ in range(n_units)]
    sconv = [ss.uniform(0.8, 1.2) for _ in range(n_units)]
    gamma = [sg.uniform(2.0, 3.0) for _ in range(n_units)]
    p_feed = sp.uniform(0.1, 0.5)
    p_prod = [-sp.uniform(5.0, 10.0) for _ in range(n_units)]

    variables = []
    in_id, out_id, c_id, u_id = [], [], [], []
    for k in range(n_units):
        in_id.append(len(variables))
        variables.append(ContinuousVar(in_id[k], 0.0, flow_cap, name=f"in{k}"))
        out_id.append(len(variables))
        variables.append(ContinuousVar(out_id[k], 0.0, flow_cap, name=f"out{k}"))
        c_id.append(len(variables))
        variables.append(ContinuousVar(c_id[k], 0.0, 3.0, name=f"cost{k}"))
        u_id.append(len(variables))
        variables.append(
            ContinuousVar(u_id[k], 0.0, sconv[k] * flow_cap / d[k], name=f"u{k}")
        )

    feed = LinExpr({in_id[k]: 1.0 for k in range(n_units)}) - flow_cap
    global_linear = (LinRow(feed, "le"),)

    disjunctions = []
    for k in range(n_units):
        u = LinExpr.var(u_id[k])
        active = Disjunct(
            BooleanVar(k, 0),
            (
                ScalarConstraint(at.ExpFn(), (LinExpr.var(out_id[k], 1.0 / tt[k]), u + 1.0)),
                _affine(u * d[k] - LinExpr.var(in_id[k], sconv[k])),
            )
            + _eq_pair(LinExpr.var(c_id[k]) - gamma[k]),
        )
        idle = Disjunct(
            BooleanVar(k, 1),
            _eq_pair(LinExpr.var(in_id[k]))
            + _eq_pair(LinExpr.var(out_id[k]))
            + _eq_pair(LinExpr.var(c_id[k])),
        )
        disjunctions.append(Disjunction(k, (active, idle)))

    obj = LinExpr({c_id[k]: 1.0 for k in range(n_units)})
    for k in range(n_units):
        obj = obj + LinExpr.var(in_id[k], p_feed) + LinExpr.var(out_id[k], p_prod[k])
    return GdpModel(
        variables=tuple(variables),
        objective=obj,
        global_linear=global_linear,
        disjunctions=tuple(disjunctions),
        name=f"proc{n_units}b",
    )


# ---------------------------------------------------------------------------
# constrained layout
# ---------------------------------------------------------------------------


def gen_clay(n_rects: int, n_circles: int, seed: int) -> GdpModel:
    """Rectangle layout: pairwise non-overlap (four-way disjunctions) and
    circle containment (one disjunct per circle, four corner SOC rows).
    Sizes, costs, radii, and jittered-grid centers are drawn values; radii
    scale with sqrt(n_rects) so instances stay feasible with high
    probability (50 resampling attempts, then an error)."""
    if n_rects < 2 or n_circles < 1:
        raise GeneratorError("gen_clay needs n_rects >= 2, n_circles >= 1")

    for attempt in range(50):
        s_size = Stream(seed + attempt, "clay", "sizes")
        s_cost = Stream(seed + attempt, "clay", "costs")
        s_rad = Stream(seed + attempt, "clay", "radii")
        s_ctr = Stream(seed + attempt, "clay", "centers")
        L = [s_size.uniform(2.0, 6.0) for _ in range(n_rects)]
        H = [s_size.uniform(2.0, 6.0) for _ in range(n_rects)]
        cost = {}
        for i in range(n_rects):
            for j in range(i + 1, n_rects):
                cost[(i, j)] = s_cost.uniform(1.0, 10.0)
        halfdiag = max(math.hypot(L[i], H[i]) / 2.0 for i in range(n_rects))
        r = [
            halfdiag * math.sqrt(n_rects) * s_rad.uniform(1.1, 1.6)
            for _ in range(n_circles)
        ]
        rmax = max(r)
        xc, yc = [], []
        for tix in range(n_circles):
            xc.append(1.2 * rmax + 2.4 * rmax * tix + s_ctr.uniform(0.0, 0.5 * rmax))
            yc.append(1.2 * rmax + s_ctr.uniform(0.0, 0.5 * rmax))
        # sufficient feasibility check: all rects in a row inside the largest circle
        width = sum(L)
        height = max(H)
        if (width / 2.0) ** 2 + (height / 2.0) ** 2 <= max(r) ** 2:
            break
    else:
        raise GeneratorError("gen_clay: no feasible draw in 50 attempts")

    x_lo = min(xc[t] - r[t] for t in range(n_circles))
    x_hi = max(xc[t] + r[t] for t in range(n_circles))
    y_lo = min(yc[t] - r[t] for t in range(n_circles))
    y_hi = max(yc[t] + r[t] for t in range(n_circles))
    span = max(x_hi - x_lo, y_hi - y_lo)

    variables = []
    x_id = [len(variables) + i for i in range(n_rects)]
    for i in range(n_rects):
        variables.append(ContinuousVar(x_id[i], x_lo, x_hi, name=f"x{i}"))
    y_id = [len(variables) + i for i in range(n_rects)]
    for i in range(n_rects):
        variables.append(ContinuousVar(y_id[i], y_lo, y_hi, name=f"y{i}"))
    pairs = [(i, j) for i in range(n_rects) for j in range(i + 1, n_rects)]
    dx_id, dy_id = {}, {}
    for (i, j) in pairs:
        dx_id[(i, j)] = len(variables)
        variables.append(ContinuousVar(dx_id[(i, j)], 0.0, span, name=f"dx_{i}_{j}"))
    for (i, j) in pairs:
        dy_id[(i, j)] = len(variables)
        variables.append(ContinuousVar(dy_id[(i, j)], 0.0, span, name=f"dy_{i}_{j}"))

    rows = []
    for (i, j) in pairs:
        xi, xj = LinExpr.var(x_id[i]), LinExpr.var(x_id[j])
        yi, yj = LinExpr.var(y_id[i]), LinExpr.var(y_id[j])
        dx, dy = LinExpr.var(dx_id[(i, j)]), LinExpr.var(dy_id[(i, j)])
        rows += [
            LinRow(xi - xj - dx, "le"),
            LinRow(xj - xi - dx, "le"),
            LinRow(yi - yj - dy, "le"),
            LinRow(yj - yi - dy, "le"),
        ]

    disjunctions = []
    kix = 0
    for (i, j) in pairs:
        xi, xj = LinExpr.var(x_id[i]), LinExpr.var(x_id[j])
        yi, yj = LinExpr.var(y_id[i]), LinExpr.var(y_id[j])
        halves_x = (L[i] + L[j]) / 2.0
        halves_y = (H[i] + H[j]) / 2.0
        djs = (
            Disjunct(BooleanVar(kix, 0), (_affine(xi - xj + halves_x),)),
            Disjunct(BooleanVar(kix, 1), (_affine(xj - xi + halves_x),)),
            Disjunct(BooleanVar(kix, 2), (_affine(yi - yj + halves_y),)),
            Disjunct(BooleanVar(kix, 3), (_affine(yj - yi + halves_y),)),
        )
        disjunctions.append(Disjunction(kix, djs))
        kix += 1
    for i in range(n_rects):
        djs = []
        for tix in range(n_circles):
            atoms = []
            for sx in (1.0, -1.0):
                for sy in (1.0, -1.0):
                    ex = LinExpr({x_id[i]: 1.0}, sx * L[i] / 2.0 - xc[tix])
                    ey = LinExpr({y_id[i]: 1.0}, sy * H[i] / 2.0 - yc[tix])
                    atoms.append(
                        ScalarConstraint(at.L2Norm(2), (ex, ey, LinExpr.const(r[tix])))
                    )
            djs.append(Disjunct(BooleanVar(kix, tix), tuple(atoms)))
        disjunctions.append(Disjunction(kix, tuple(djs)))
        kix += 1

    obj = LinExpr.ZERO
    for (i, j) in pairs:
        obj = obj + LinExpr.var(dx_id[(i, j)], cost[(i, j)]) + LinExpr.var(dy_id[(i, j)], cost[(i, j)])
    return GdpModel(
        variables=tuple(variables),
        objective=obj,
        global_linear=tuple(rows),
        disjunctions=tuple(disjunctions),
        name=f"CLay{n_circles:02d}{n_rects:02d}",
    )


# ---------------------------------------------------------------------------


GENERATORS = {
    "kclus": gen_kclus,
    "socp_random": gen_socp_random,
    "exp_random": gen_exp_random,
    "logreg": gen_logreg,
    "process": gen_process,
    "clay": gen_clay,
}
