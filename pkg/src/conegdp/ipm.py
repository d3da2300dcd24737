"""Primal-dual interior-point method on the homogeneous self-dual embedding.

Solves   min c'x  s.t.  A x = b,  G x + s = h,  s in K
with K a product of nonneg / second-order / rotated second-order /
exponential / three-dimensional power cones. All cones are handled with
primal-barrier predictor-corrector steps tracking the central path
z = -mu * grad(barrier)(s), tau*kappa = mu; the embedding certifies
optimality, infeasibility, and unboundedness uniformly.

Cone blocks of the same shape are batched (stacked gradient/Hessian
evaluations), which keeps the per-iteration cost dominated by one dense KKT
factorization. Deterministic: no randomness, no wall-clock decisions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from . import cones as cn

_ETA_PRED = 0.85  # combined steps may wander this far from the path
_ETA_CTR = 0.45  # rescue correctors pull back inside
_MAX_CORRECTORS = 4
_STEP_SHRINK = 0.70
_MIN_STEP = 1e-9


@dataclass
class IpmSettings:
    feas_tol: float = 1e-8
    gap_tol: float = 1e-8
    max_iters: int = 200

    def __post_init__(self):
        if self.feas_tol <= 0 or self.gap_tol <= 0 or self.max_iters <= 0:
            raise ValueError("IpmSettings fields must be positive")


@dataclass
class ConicProblem:
    """Standard-form data. Cone blocks partition s = h - Gx in order."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    G: np.ndarray
    h: np.ndarray
    cones: list[cn.Cone]
    obj_offset: float = 0.0

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        self.A = np.asarray(self.A, dtype=float).reshape(-1, self.c.size)
        self.b = np.asarray(self.b, dtype=float)
        self.G = np.asarray(self.G, dtype=float).reshape(-1, self.c.size)
        self.h = np.asarray(self.h, dtype=float)
        if sum(k.dim for k in self.cones) != self.h.size:
            raise ValueError("cone dims do not match G/h")


@dataclass
class IpmResult:
    status: str  # optimal | infeasible | unbounded | iteration_limit | numerical
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    s: np.ndarray
    obj_primal: float
    obj_dual: float
    iterations: int
    pres: float
    dres: float
    relgap: float
    detail: str = ""


# ---------------------------------------------------------------------------
# batched cone engine
# ---------------------------------------------------------------------------


def _log(v):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(v)


def _lin_step(v, dv) -> float:
    """sup alpha with v + alpha*dv > 0 elementwise."""
    neg = dv < 0.0
    if not np.any(neg):
        return math.inf
    return float(np.min(-v[neg] / dv[neg]))


def _quad_step(a, b, c) -> float:
    """Smallest positive root of a*x^2 + b*x + c per row (c > 0 at x = 0);
    inf where the quadratic stays positive."""
    out = math.inf
    with np.errstate(divide="ignore", invalid="ignore"):
        disc = b * b - 4.0 * a * c
        sq = np.sqrt(np.maximum(disc, 0.0))
        for r in (
            np.where((a != 0.0) & (disc >= 0.0), (-b - sq) / (2.0 * a), math.inf),
            np.where((a != 0.0) & (disc >= 0.0), (-b + sq) / (2.0 * a), math.inf),
            np.where((a == 0.0) & (b < 0.0), -c / b, math.inf),
        ):
            pos = r[r > 0.0]
            if pos.size:
                out = min(out, float(np.min(pos)))
    return out


class _Groups:
    """Cone blocks grouped by shape for stacked barrier evaluations."""

    def __init__(self, cones_list, G, h):
        self.total_dim = sum(k.dim for k in cones_list)
        nn_idx = []
        buckets: dict[tuple, list[np.ndarray]] = {}
        off = 0
        for k in cones_list:
            idx = np.arange(off, off + k.dim)
            off += k.dim
            if k.variant == "nonneg":
                nn_idx.append(idx)
            elif k.variant in ("soc", "rsoc", "exp", "pow3"):
                buckets.setdefault((k.variant, k.dim, k.alpha), []).append(idx)
            else:
                raise cn.ConeError(f"solver does not support cone {k}")
        self.nn = np.concatenate(nn_idx) if nn_idx else np.zeros(0, dtype=int)
        self.groups = []
        for (variant, dim, alpha), rows in sorted(buckets.items()):
            idx = np.vstack(rows)
            self.groups.append(_Group(variant, dim, alpha, idx, G, h))
        self.G_nn = G[self.nn]
        self.h_nn = h[self.nn]
        # bound-style singleton rows contribute only diagonal terms to G'HG
        nnz = np.count_nonzero(self.G_nn, axis=1) if self.G_nn.size else np.zeros(0, dtype=int)
        single = nnz == 1
        self._nn_single = np.where(single)[0]
        self._nn_dense = np.where(~single)[0]
        if self._nn_single.size:
            cols = np.argmax(np.abs(self.G_nn[self._nn_single]) > 0, axis=1)
            self._nn_scol = cols
            self._nn_sval = self.G_nn[self._nn_single, cols]
        self.nu = self.nn.size + sum(g.nu for g in self.groups)

    def init_point(self):
        s = np.empty(self.total_dim)
        s[self.nn] = 1.0
        for g in self.groups:
            s[g.idx] = g.init_block()
        return s

    def interior(self, v, dual_side=False) -> bool:
        if self.nn.size and not np.all(v[self.nn] > 0.0):
            return False
        return all(g.interior(v[g.idx], dual_side) for g in self.groups)

    def eval(self, s):
        """Barrier state at s, or None if any block left its domain."""
        st = {"s_nn": s[self.nn]}
        if self.nn.size and not np.all(st["s_nn"] > 0.0):
            return None
        for g in self.groups:
            gs = g.eval(s[g.idx])
            if gs is None:
                return None
            # subnormal guard (see _Newton): tiny couplings are noise
            gs["hess"][np.abs(gs["hess"]) < 1e-250] = 0.0
            st[g.key] = gs
        return st

    def grad(self, st):
        out = np.empty(self.total_dim)
        out[self.nn] = -1.0 / st["s_nn"]
        for g in self.groups:
            out[g.idx] = st[g.key]["grad"]
        return out

    def quad_forms(self, st):
        """P = G' H G, q = G' H h, hHh (multiply by mu outside)."""
        n = self.G_nn.shape[1] if self.G_nn.size else (self.groups[0].G.shape[2] if self.groups else 0)
        P = np.zeros((n, n))
        q = np.zeros(n)
        hHh = 0.0
        if self.nn.size:
            w = 1.0 / st["s_nn"] ** 2
            if self._nn_dense.size:
                Gd = self.G_nn[self._nn_dense]
                wd = w[self._nn_dense]
                P += (Gd * wd[:, None]).T @ Gd
            if self._nn_single.size:
                ws = w[self._nn_single] * self._nn_sval**2
                np.add.at(P, (self._nn_scol, self._nn_scol), ws)
            Hh = w * self.h_nn
            q += self.G_nn.T @ Hh
            hHh += float(self.h_nn @ Hh)
        for g in self.groups:
            H = st[g.key]["hess"]
            HG = np.matmul(H, g.G)
            n_ = g.G.shape[2]
            P += g.G.reshape(-1, n_).T @ HG.reshape(-1, n_)
            Hh = np.matmul(H, g.h[:, :, None])[:, :, 0]
            q += g.G.reshape(-1, n_).T @ Hh.reshape(-1)
            hHh += float(np.sum(g.h * Hh))
        return P, q, hHh

    def apply_H(self, st, u):
        out = np.empty(self.total_dim)
        out[self.nn] = u[self.nn] / st["s_nn"] ** 2
        for g in self.groups:
            out[g.idx] = np.matmul(st[g.key]["hess"], u[g.idx][:, :, None])[:, :, 0]
        return out

    def apply_Hinv(self, st, u):
        out = np.empty(self.total_dim)
        out[self.nn] = u[self.nn] * st["s_nn"] ** 2
        for g in self.groups:
            gs = st[g.key]
            if "hinv" not in gs:
                gs["hinv"] = np.linalg.inv(gs["hess"])
            out[g.idx] = np.matmul(gs["hinv"], u[g.idx][:, :, None])[:, :, 0]
        return out

    def prox2(self, st, s, z, mu):
        """sum over blocks of psi' H^{-1} psi with psi = z + mu*grad."""
        total = 0.0
        if self.nn.size:
            psi = z[self.nn] - mu / st["s_nn"]
            total += float(np.sum((psi * st["s_nn"]) ** 2))
        for g in self.groups:
            gs = st[g.key]
            psi = z[g.idx] + mu * gs["grad"]
            try:
                if "hinv" in gs:
                    sol = np.matmul(gs["hinv"], psi[:, :, None])[:, :, 0]
                else:
                    sol = np.linalg.solve(gs["hess"], psi[:, :, None])[:, :, 0]
            except np.linalg.LinAlgError:
                return math.inf
            v = float(np.sum(psi * sol))
            total += max(v, 0.0)
        return total

    def max_step(self, v, dv, dual_side=False, cap=1.0) -> float:
        """Largest step keeping v + alpha*dv strictly interior. Closed forms
        for nonneg/soc/rsoc; exp/pow3 groups are handled by the caller's
        trial loop (this returns their linear positivity bounds only)."""
        alpha = cap
        if self.nn.size:
            vv, dd = v[self.nn], dv[self.nn]
            neg = dd < 0.0
            if np.any(neg):
                alpha = min(alpha, float(np.min(-vv[neg] / dd[neg])))
        for g in self.groups:
            vb, db = v[g.idx], dv[g.idx]
            if g.variant == "soc":
                a = db[:, 0] ** 2 - np.sum(db[:, 1:] ** 2, axis=1)
                bq = 2.0 * (vb[:, 0] * db[:, 0] - np.einsum("bi,bi->b", vb[:, 1:], db[:, 1:]))
                cq = vb[:, 0] ** 2 - np.sum(vb[:, 1:] ** 2, axis=1)
                alpha = min(alpha, _quad_step(a, bq, cq))
                alpha = min(alpha, _lin_step(vb[:, 0], db[:, 0]))
            elif g.variant == "rsoc":
                a = 2.0 * db[:, 0] * db[:, 1] - np.sum(db[:, 2:] ** 2, axis=1)
                bq = 2.0 * (vb[:, 0] * db[:, 1] + vb[:, 1] * db[:, 0]) - 2.0 * np.einsum(
                    "bi,bi->b", vb[:, 2:], db[:, 2:]
                )
                cq = 2.0 * vb[:, 0] * vb[:, 1] - np.sum(vb[:, 2:] ** 2, axis=1)
                alpha = min(alpha, _quad_step(a, bq, cq))
                alpha = min(alpha, _lin_step(vb[:, 0], db[:, 0]))
                alpha = min(alpha, _lin_step(vb[:, 1], db[:, 1]))
            elif g.variant == "exp":
                cols = (0, 1) if not dual_side else (0,)
                for c in cols:
                    alpha = min(alpha, _lin_step(vb[:, c], db[:, c]))
                if dual_side:
                    alpha = min(alpha, _lin_step(-vb[:, 2], -db[:, 2]))
            else:
                alpha = min(alpha, _lin_step(vb[:, 0], db[:, 0]))
                alpha = min(alpha, _lin_step(vb[:, 1], db[:, 1]))
        return alpha


class _Group:
    def __init__(self, variant, dim, alpha, idx, G, h):
        self.variant, self.dim, self.alpha = variant, dim, alpha
        self.idx = idx
        self.key = (variant, dim, alpha)
        self.G = G[idx]  # (B, k, n)
        self.h = h[idx]
        self.count = idx.shape[0]
        self.nu = self.count * (2 if variant in ("soc", "rsoc") else 3)
        if variant == "soc":
            d2 = -2.0 * np.eye(dim)
            d2[0, 0] = 2.0
            self.D2 = d2
        elif variant == "rsoc":
            d2 = -2.0 * np.eye(dim)
            d2[0, 0] = d2[1, 1] = 0.0
            d2[0, 1] = d2[1, 0] = 2.0
            self.D2 = d2

    def init_block(self):
        b, k = self.count, self.dim
        out = np.zeros((b, k))
        if self.variant == "soc":
            out[:, 0] = math.sqrt(2.0)
        elif self.variant == "rsoc":
            out[:, 0] = out[:, 1] = 1.0
        elif self.variant == "exp":
            out[:] = cn.initial_point(cn.exp_cone())
        else:
            a = self.alpha
            out[:, 0] = math.sqrt(1.0 + a)
            out[:, 1] = math.sqrt(2.0 - a)
        return out

    def interior(self, v, dual_side=False) -> bool:
        if self.variant == "soc":
            d = v[:, 0] ** 2 - np.einsum("bi,bi->b", v[:, 1:], v[:, 1:])
            return v[:, 0].min() > 0.0 and d.min() > 0.0
        if self.variant == "rsoc":
            d = 2.0 * v[:, 0] * v[:, 1] - np.einsum("bi,bi->b", v[:, 2:], v[:, 2:])
            return v[:, 0].min() > 0.0 and v[:, 1].min() > 0.0 and d.min() > 0.0
        if self.variant == "exp":
            if not dual_side:
                if v[:, 0].min() <= 0.0 or v[:, 1].min() <= 0.0:
                    return False
                return (np.log(v[:, 0] / v[:, 1]) - v[:, 2] / v[:, 1]).min() > 0.0
            if v[:, 0].min() <= 0.0 or v[:, 2].max() >= 0.0:
                return False
            return (np.log(-v[:, 0] / v[:, 2]) - v[:, 1] / v[:, 2] + 1.0).min() > 0.0
        a = self.alpha
        if v[:, 0].min() <= 0.0 or v[:, 1].min() <= 0.0:
            return False
        if not dual_side:
            lhs = 2.0 * a * np.log(v[:, 0]) + (2.0 - 2.0 * a) * np.log(v[:, 1])
        else:
            lhs = 2.0 * (
                a * np.log(v[:, 0] / a) + (1.0 - a) * np.log(v[:, 1] / (1.0 - a))
            )
        t2 = v[:, 2] ** 2
        live = t2 > 0.0
        if not live.any():
            return True
        return (lhs[live] - np.log(t2[live])).min() > 0.0

    def eval(self, v):
        b, k = v.shape
        if self.variant == "soc":
            d = v[:, 0] ** 2 - np.sum(v[:, 1:] ** 2, axis=1)
            if np.any(d <= 0.0) or np.any(v[:, 0] <= 0.0):
                return None
            gd = -2.0 * v
            gd[:, 0] = 2.0 * v[:, 0]
            grad = -gd / d[:, None]
            H = gd[:, :, None] * gd[:, None, :] / (d**2)[:, None, None] - self.D2[None] / d[:, None, None]
            return {"grad": grad, "hess": H}
        if self.variant == "rsoc":
            d = 2.0 * v[:, 0] * v[:, 1] - np.sum(v[:, 2:] ** 2, axis=1)
            if np.any(d <= 0.0) or np.any(v[:, 0] <= 0.0) or np.any(v[:, 1] <= 0.0):
                return None
            gd = -2.0 * v
            gd[:, 0] = 2.0 * v[:, 1]
            gd[:, 1] = 2.0 * v[:, 0]
            grad = -gd / d[:, None]
            H = gd[:, :, None] * gd[:, None, :] / (d**2)[:, None, None] - self.D2[None] / d[:, None, None]
            return {"grad": grad, "hess": H}
        if self.variant == "exp":
            v0, v1, v2 = v[:, 0], v[:, 1], v[:, 2]
            if np.any(v0 <= 0.0) or np.any(v1 <= 0.0):
                return None
            l = np.log(v0 / v1)
            rho = v1 * l - v2
            if np.any(rho <= 0.0):
                return None
            gr = np.stack([v1 / v0, l - 1.0, -np.ones(b)], axis=1)
            grad = -gr / rho[:, None]
            grad[:, 0] -= 1.0 / v0
            grad[:, 1] -= 1.0 / v1
            hr = np.zeros((b, 3, 3))
            hr[:, 0, 0] = -v1 / v0**2
            hr[:, 0, 1] = hr[:, 1, 0] = 1.0 / v0
            hr[:, 1, 1] = -1.0 / v1
            H = gr[:, :, None] * gr[:, None, :] / (rho**2)[:, None, None] - hr / rho[:, None, None]
            H[:, 0, 0] += 1.0 / v0**2
            H[:, 1, 1] += 1.0 / v1**2
            return {"grad": grad, "hess": H}
        a = self.alpha
        v0, v1, v2 = v[:, 0], v[:, 1], v[:, 2]
        if np.any(v0 <= 0.0) or np.any(v1 <= 0.0):
            return None
        p = v0 ** (2.0 * a) * v1 ** (2.0 - 2.0 * a)
        xi = p - v2**2
        if np.any(xi <= 0.0):
            return None
        gxi = np.stack([2.0 * a * p / v0, (2.0 - 2.0 * a) * p / v1, -2.0 * v2], axis=1)
        grad = -gxi / xi[:, None]
        grad[:, 0] -= (1.0 - a) / v0
        grad[:, 1] -= a / v1
        hxi = np.zeros((v.shape[0], 3, 3))
        hxi[:, 0, 0] = 2.0 * a * (2.0 * a - 1.0) * p / v0**2
        hxi[:, 0, 1] = hxi[:, 1, 0] = 4.0 * a * (1.0 - a) * p / (v0 * v1)
        hxi[:, 1, 1] = 2.0 * (1.0 - a) * (1.0 - 2.0 * a) * p / v1**2
        hxi[:, 2, 2] = -2.0
        H = gxi[:, :, None] * gxi[:, None, :] / (xi**2)[:, None, None] - hxi / xi[:, None, None]
        H[:, 0, 0] += (1.0 - a) / v0**2
        H[:, 1, 1] += a / v1**2
        return {"grad": grad, "hess": H}


# ---------------------------------------------------------------------------
# main loop
# ---------------------------------------------------------------------------


def _equilibrate(prob: ConicProblem):
    """Ruiz equilibration of [A; G] with cone-block-uniform row scales on G
    (uniform positive scaling preserves every cone) plus objective
    normalization. Returns the scaled problem and recovery data."""
    c, A, b, G, h = prob.c, prob.A, prob.b, prob.G, prob.h
    n, p, m = c.size, b.size, h.size
    blocks = []
    off = 0
    for k in prob.cones:
        blocks.append((off, off + k.dim, k.variant == "nonneg"))
        off += k.dim
    rA = np.ones(p)
    rG = np.ones(m)
    d = np.ones(n)
    A = A.copy()
    G = G.copy()
    for _ in range(3):
        if p:
            rn = np.max(np.abs(A), axis=1)
            sc = 1.0 / np.sqrt(np.maximum(rn, 1e-12))
            sc[rn == 0.0] = 1.0
            A *= sc[:, None]
            rA *= sc
        rn = np.max(np.abs(G), axis=1)
        for lo, hi, per_row in blocks:
            if per_row:
                sc = 1.0 / np.sqrt(np.maximum(rn[lo:hi], 1e-12))
                sc[rn[lo:hi] == 0.0] = 1.0
            else:
                top = float(np.max(rn[lo:hi]))
                sc = np.full(hi - lo, 1.0 if top == 0.0 else 1.0 / math.sqrt(max(top, 1e-12)))
            G[lo:hi] *= sc[:, None]
            rG[lo:hi] *= sc
        cn_ = np.maximum(
            np.max(np.abs(A), axis=0) if p else 0.0, np.max(np.abs(G), axis=0)
        )
        sc = 1.0 / np.sqrt(np.maximum(cn_, 1e-12))
        sc[cn_ == 0.0] = 1.0
        A *= sc[None, :]
        G *= sc[None, :]
        d *= sc
    c2 = c * d
    beta = 1.0 / max(1.0, float(np.max(np.abs(c2))) if n else 1.0)
    scaled = ConicProblem(
        c=c2 * beta, A=A, b=b * rA, G=G, h=h * rG, cones=list(prob.cones), obj_offset=0.0
    )
    return scaled, d, rA, rG, beta


def solve(prob: ConicProblem, settings: IpmSettings | None = None) -> IpmResult:
    settings = settings or IpmSettings()
    n, p, m = prob.c.size, prob.b.size, prob.h.size
    if m == 0:
        return _solve_no_cones(prob, settings)
    scaled, d, rA, rG, beta = _equilibrate(prob)
    res = _solve_core(scaled, settings)
    x = d * res.x
    y = rA * res.y / beta
    z = rG * res.z / beta
    s = res.s / rG
    pobj = float(prob.c @ x) + prob.obj_offset
    dobj = res.obj_dual / beta + prob.obj_offset
    return IpmResult(
        status=res.status,
        x=x,
        y=y,
        z=z,
        s=s,
        obj_primal=pobj,
        obj_dual=dobj,
        iterations=res.iterations,
        pres=res.pres,
        dres=res.dres,
        relgap=res.relgap,
        detail=res.detail,
    )


def _solve_core(prob: ConicProblem, settings: IpmSettings) -> IpmResult:
    c, A, b, G, h = prob.c, prob.A, prob.b, prob.G, prob.h
    n, p, m = c.size, b.size, h.size

    grp = _Groups(prob.cones, G, h)
    nu = grp.nu + 1

    x = np.zeros(n)
    y = np.zeros(p)
    s = grp.init_point()
    z = s.copy()  # self-centered starts: z = -grad(s) = s
    tau = kappa = 1.0

    best = None
    best_score = math.inf
    norm_b = 1.0 + (float(np.max(np.abs(b))) if p else 0.0)
    norm_h = 1.0 + float(np.max(np.abs(h)))
    norm_c = 1.0 + (float(np.max(np.abs(c))) if n else 0.0)

    def scaled_metrics(x, y, z, s, tau):
        xin, yin, zin, sin = x / tau, y / tau, z / tau, s / tau
        pres_eq = float(np.max(np.abs(A @ xin - b))) / norm_b if p else 0.0
        pres_cone = float(np.max(np.abs(G @ xin + sin - h))) / norm_h
        pres = max(pres_eq, pres_cone)
        dres = float(np.max(np.abs((A.T @ yin if p else 0.0) + G.T @ zin + c))) / norm_c
        pobj = float(c @ xin)
        dobj = -(float(b @ yin) if p else 0.0) - float(h @ zin)
        gap = float(sin @ zin)
        denom = max(1.0, abs(pobj), abs(dobj))
        relgap = min(abs(pobj - dobj), abs(gap)) / denom
        return pres, dres, relgap, pobj, dobj

    status = "iteration_limit"
    detail = ""
    it = 0
    since_improved = 0
    best_mu = math.inf
    sigma_floor = 1e-4
    for it in range(1, settings.max_iters + 1):
        mu = (float(s @ z) + tau * kappa) / nu
        pres, dres, relgap, pobj, dobj = scaled_metrics(x, y, z, s, tau)

        score = max(pres, dres, relgap)
        if score < 0.75 * best_score or mu < 0.5 * best_mu:
            since_improved = 0
        else:
            since_improved += 1
        best_mu = min(best_mu, mu)
        if score < best_score:
            best_score = score
            best = (x.copy(), y.copy(), z.copy(), s.copy(), tau, kappa)
        if since_improved >= 15 and mu <= 1e-7:
            # neither the residuals nor complementarity improve anymore: a
            # double-precision plateau near a degenerate solution
            status = "iteration_limit"
            detail = "stagnation"
            break

        if pres <= settings.feas_tol and dres <= settings.feas_tol and relgap <= settings.gap_tol:
            status = "optimal"
            break
        if (
            mu < 1e-11
            and pres <= min(1e3 * settings.feas_tol, 1e-5)
            and dres <= min(1e3 * settings.feas_tol, 1e-5)
            and relgap <= min(1e3 * settings.gap_tol, 1e-5)
        ):
            # complementarity exhausted double precision at a near-feasible
            # point; further iterations cannot improve the residual floor
            status = "optimal"
            detail = "reduced accuracy"
            break

        cert = _certificate(prob, x, y, z, s, settings.feas_tol, norm_b, norm_h, norm_c)
        if cert:
            status = cert
            break
        if mu < 1e-14 or tau < 1e-12 * max(1.0, kappa):
            # collapsed embedding: classify with a looser certificate check
            cert = _certificate(prob, x, y, z, s, 1e-6, norm_b, norm_h, norm_c)
            status = cert or "numerical"
            detail = "" if cert else "embedding collapsed without certificate"
            break

        st = grp.eval(s)
        if st is None:
            status = "numerical"
            detail = "barrier domain failure"
            break

        step = _Newton(prob, grp, x, y, z, s, tau, kappa, mu, st, rtol=settings.feas_tol)
        if not step.ok:
            status = "numerical"
            detail = step.detail
            break

        # combined step: centering weight from the affine probe (one
        # factorization serves the probe and the combined direction); the
        # floor adapts so rescue correctors stay rare
        d_aff = step.direction(0.0)
        alpha_aff = step.interior_cap(d_aff)
        sigma = min(0.9, max(sigma_floor, (1.0 - alpha_aff) ** 3))
        moved = step.take(step.direction(sigma), eta=_ETA_PRED)
        if not moved and d_aff is not None:
            moved = step.take(d_aff, eta=_ETA_PRED)
        if not moved:
            moved = step.take(step.direction(1.0), eta=_ETA_PRED)
        if not moved:
            status = "numerical"
            detail = "no acceptable step"
            break
        x, y, z, s, tau, kappa = step.state()

        # rescue correctors when the iterate drifted off the path
        corrected = False
        for _ in range(_MAX_CORRECTORS):
            mu = (float(s @ z) + tau * kappa) / nu
            st = grp.eval(s)
            if st is None:
                break
            prox = math.sqrt(grp.prox2(st, s, z, mu) / mu**2 + ((tau * kappa - mu) / mu) ** 2)
            if prox <= _ETA_CTR:
                break
            corrected = True
            step = _Newton(prob, grp, x, y, z, s, tau, kappa, mu, st, rtol=settings.feas_tol)
            eta = max(_ETA_CTR, min(0.9 * prox, _ETA_PRED))
            if not step.ok or not step.take(step.direction(1.0), eta=eta):
                break
            x, y, z, s, tau, kappa = step.state()
        sigma_floor = min(0.3, sigma_floor * 4.0) if corrected else max(1e-4, sigma_floor * 0.5)

    if status in ("iteration_limit", "numerical") and best is not None:
        x, y, z, s, tau, kappa = best
    pres, dres, relgap, pobj, dobj = scaled_metrics(x, y, z, s, tau)
    if status in ("iteration_limit", "numerical"):
        # complementarity exhausted double precision at a near-feasible point:
        # accept at reduced accuracy rather than reporting a failure
        if (
            pres <= min(1e3 * settings.feas_tol, 1e-5)
            and dres <= min(1e3 * settings.feas_tol, 1e-5)
            and relgap <= min(1e3 * settings.gap_tol, 1e-5)
        ):
            status = "optimal"
            detail = "reduced accuracy"
    return IpmResult(
        status=status,
        x=x / tau,
        y=y / tau,
        z=z / tau,
        s=s / tau,
        obj_primal=pobj + prob.obj_offset,
        obj_dual=dobj + prob.obj_offset,
        iterations=it,
        pres=pres,
        dres=dres,
        relgap=relgap,
        detail=detail,
    )


class _Newton:
    """One KKT factorization at the current iterate; directions for any sigma.

    The reduced normal-equations factorization acts as the solver for the full
    (dx, dy, dz) saddle system; refinement passes against the full system keep
    per-row residuals near machine precision even when mu*H mixes scales badly
    late on the path (otherwise the homogeneous residuals hit a floor)."""

    def __init__(self, prob, grp, x, y, z, s, tau, kappa, mu, st, rtol=1e-8):
        self.prob, self.grp = prob, grp
        self._rtol = rtol
        self.x, self.y, self.z, self.s = x, y, z, s
        self.tau, self.kappa, self.mu = tau, kappa, mu
        self.st = st
        self.ok = True
        self.detail = ""
        c, A, b, G, h = prob.c, prob.A, prob.b, prob.G, prob.h
        n, p = c.size, b.size
        self._n, self._p = n, p

        P, _, _ = grp.quad_forms(st)
        P *= mu
        M = np.zeros((n + p, n + p))
        M[:n, :n] = P
        if p:
            M[:n, n:] = A.T
            M[n:, :n] = A
        reg = 1e-12 * (1.0 + (float(np.max(np.abs(P))) if n else 0.0))
        M[:n, :n] += reg * np.eye(n)
        if p:
            M[n:, n:] -= reg * np.eye(p)
        # flush numerically irrelevant entries: values this far below the
        # pivot scale only breed subnormals inside the factorization (an
        # order-of-magnitude slowdown on some hardware)
        M[np.abs(M) < 1e-250 * (1.0 + float(np.max(np.abs(M))))] = 0.0
        try:
            self._lu = sla.lu_factor(M, check_finite=False)
        except Exception:
            self.ok = False
            self.detail = "KKT factorization failed"
            return

        rx = (A.T @ y if p else np.zeros(n)) + G.T @ z + c * tau
        ry = -A @ x + b * tau if p else np.zeros(0)
        rz = -G @ x + h * tau - s
        rt = -float(c @ x) - (float(b @ y) if p else 0.0) - float(h @ z) - kappa
        self._res = (rx, ry, rz, rt)
        self._grad = grp.grad(st)
        # tau column of the saddle system (sigma-independent)
        self._sol_b = self._solve_xyz(-c, -b if p else np.zeros(0), -h)

    def _W(self, u):
        return self.mu * self.grp.apply_H(self.st, u)

    def _Winv(self, u):
        return self.grp.apply_Hinv(self.st, u) / self.mu

    def _reduced(self, f1, f2, f3):
        """Exact block elimination of dz = W(f3 + G dx)."""
        G = self.prob.G
        n = self._n
        Wf3 = self._W(f3)
        rhs = np.concatenate([f1 - G.T @ Wf3, -f2])
        sol = sla.lu_solve(self._lu, rhs, check_finite=False)
        dx, dy = sol[:n], sol[n:]
        dz = Wf3 + self._W(G @ dx)
        return dx, dy, dz

    def _residual_xyz(self, sol, f1, f2, f3):
        A, G = self.prob.A, self.prob.G
        p = self._p
        dx, dy, dz = sol
        g1 = f1 - ((A.T @ dy if p else 0.0) + G.T @ dz)
        g2 = f2 - (-(A @ dx) if p else np.zeros(0))
        g3 = f3 - (-(G @ dx) + self._Winv(dz))
        err = max(
            float(np.max(np.abs(g1))) if g1.size else 0.0,
            float(np.max(np.abs(g2))) if g2.size else 0.0,
            float(np.max(np.abs(g3))) if g3.size else 0.0,
        )
        return err, g1, g2, g3

    def _solve_xyz(self, f1, f2, f3, refinements=3):
        """Solve  A'dy + G'dz = f1;  -A dx = f2;  -G dx + W^{-1} dz = f3.

        Refinement against the full system; each correction is kept only if
        it actually reduces the full-system residual."""
        sol = self._reduced(f1, f2, f3)
        scale = (1e-3 * self._rtol) * (
            1.0
            + max(
                float(np.max(np.abs(f1))) if f1.size else 0.0,
                float(np.max(np.abs(f2))) if f2.size else 0.0,
                float(np.max(np.abs(f3))) if f3.size else 0.0,
            )
        )
        err, g1, g2, g3 = self._residual_xyz(sol, f1, f2, f3)
        for _ in range(refinements):
            if err <= scale:
                break
            ex, ey, ez = self._reduced(g1, g2, g3)
            cand = (sol[0] + ex, sol[1] + ey, sol[2] + ez)
            err2, h1, h2, h3 = self._residual_xyz(cand, f1, f2, f3)
            if err2 >= err:
                break
            sol, err, g1, g2, g3 = cand, err2, h1, h2, h3
        return sol

    def direction(self, sigma):
        prob = self.prob
        c, A, b, G, h = prob.c, prob.A, prob.b, prob.G, prob.h
        p = self._p
        mu, tau, kappa = self.mu, self.tau, self.kappa
        rx, ry, rz, rt = self._res

        rhs5 = -self.z - sigma * mu * self._grad
        f3 = self._Winv(rhs5) + (sigma - 1.0) * rz
        ax, ay, az = self._solve_xyz((sigma - 1.0) * rx, (sigma - 1.0) * ry, f3)
        bx, by, bz = self._sol_b
        denom = (
            mu / tau**2
            - float(c @ bx)
            - (float(b @ by) if p else 0.0)
            - float(h @ bz)
        )
        if not math.isfinite(denom) or abs(denom) < 1e-300:
            return None
        num = (
            (sigma - 1.0) * rt
            - kappa
            + sigma * mu / tau
            + float(c @ ax)
            + (float(b @ ay) if p else 0.0)
            + float(h @ az)
        )
        dtau = num / denom
        dx = ax + dtau * bx
        dy = ay + dtau * by
        dz = az + dtau * bz
        ds = -G @ dx + h * dtau - (sigma - 1.0) * rz
        dkappa = -kappa + sigma * mu / tau - (mu / tau**2) * dtau
        return dx, dy, dz, ds, dtau, dkappa

    def interior_cap(self, d) -> float:
        """Largest interior step along d (exp/pow3 blocks refined by trial)."""
        if d is None:
            return 0.0
        _, _, dz, ds, dtau, dkappa = d
        grp = self.grp
        alpha = 1.0
        if dtau < 0.0:
            alpha = min(alpha, -self.tau / dtau)
        if dkappa < 0.0:
            alpha = min(alpha, -self.kappa / dkappa)
        alpha = grp.max_step(self.s, ds, cap=alpha)
        alpha = grp.max_step(self.z, dz, dual_side=True, cap=alpha)
        alpha = min(0.9995 * alpha, 1.0)
        while alpha > _MIN_STEP:
            if grp.interior(self.s + alpha * ds) and grp.interior(self.z + alpha * dz, dual_side=True):
                return alpha
            alpha *= _STEP_SHRINK
        return 0.0

    def take(self, d, eta):
        if d is None:
            return False
        dx, dy, dz, ds, dtau, dkappa = d
        grp = self.grp
        nu = grp.nu + 1
        alpha = self.interior_cap(d)
        while alpha > _MIN_STEP:
            s_t = self.s + alpha * ds
            z_t = self.z + alpha * dz
            tau_t = self.tau + alpha * dtau
            kappa_t = self.kappa + alpha * dkappa
            mu_t = (float(s_t @ z_t) + tau_t * kappa_t) / nu
            if mu_t > 0.0 and grp.interior(s_t) and grp.interior(z_t, dual_side=True):
                st_t = grp.eval(s_t)
                if st_t is not None:
                    prox = math.sqrt(
                        grp.prox2(st_t, s_t, z_t, mu_t) / mu_t**2
                        + ((tau_t * kappa_t - mu_t) / mu_t) ** 2
                    )
                    if prox <= eta:
                        self.x = self.x + alpha * dx
                        self.y = self.y + alpha * dy
                        self.z, self.s = z_t, s_t
                        self.tau, self.kappa = tau_t, kappa_t
                        return True
            alpha *= _STEP_SHRINK
        return False

    def state(self):
        return self.x, self.y, self.z, self.s, self.tau, self.kappa


def _certificate(prob, x, y, z, s, tol, norm_b, norm_h, norm_c):
    """Farkas-type classification: primal infeasible when (y,z) proves
    b'y + h'z < 0 with A'y + G'z ~ 0; unbounded when x is an improving ray."""
    A, G, b, h, c = prob.A, prob.G, prob.b, prob.h, prob.c
    p = b.size
    ct = (float(b @ y) if p else 0.0) + float(h @ z)
    if ct < -tol:
        dres_cert = float(np.max(np.abs((A.T @ y if p else 0.0) + G.T @ z)))
        if dres_cert / (-ct) <= tol * norm_c:
            return "infeasible"
    cx = float(c @ x)
    if cx < -tol:
        pres_cert = max(
            float(np.max(np.abs(A @ x))) if p else 0.0,
            float(np.max(np.abs(G @ x + s))),
        )
        if pres_cert / (-cx) <= tol * max(norm_b, norm_h):
            return "unbounded"
    return None


def _solve_no_cones(prob: ConicProblem, settings: IpmSettings) -> IpmResult:
    """Degenerate case K empty: pure equality system min c'x, Ax=b."""
    c, A, b = prob.c, prob.A, prob.b
    n, p = c.size, b.size
    empty = np.zeros(0)
    if n == 0:
        feasible = p == 0 or float(np.max(np.abs(b))) <= settings.feas_tol
        st = "optimal" if feasible else "infeasible"
        return IpmResult(st, empty, np.zeros(p), empty, empty, prob.obj_offset, prob.obj_offset, 0, 0.0, 0.0, 0.0)
    x, *_ = np.linalg.lstsq(A, b, rcond=None) if p else (np.zeros(n),)
    if p and float(np.max(np.abs(A @ x - b))) > settings.feas_tol * (1.0 + float(np.max(np.abs(b)))):
        return IpmResult("infeasible", x, np.zeros(p), empty, empty, math.inf, math.inf, 0, 0.0, 0.0, 0.0)
    y, *_ = np.linalg.lstsq(A.T, -c, rcond=None) if p else (np.zeros(0),)
    resid = c + (A.T @ y if p else 0.0)
    if float(np.max(np.abs(resid))) > settings.feas_tol * (1.0 + float(np.max(np.abs(c)))):
        return IpmResult("unbounded", x, y, empty, empty, -math.inf, -math.inf, 0, 0.0, 0.0, 0.0)
    obj = float(c @ x) + prob.obj_offset
    return IpmResult("optimal", x, y, empty, empty, obj, obj, 0, 0.0, 0.0, 0.0)
