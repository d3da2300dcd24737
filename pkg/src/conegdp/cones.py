"""Cone descriptors, membership tests, dual cones, and barrier oracles.

Supported variants: nonnegative orthant, second-order, rotated second-order,
exponential (plus its dual), three-dimensional power cones (plus duals), and
the general power cone with its recursive decomposition into Soc + Power3
slices. Barriers are the standard logarithmic ones used by the interior-point
solver; gradients and Hessians are exact.

Membership tolerance semantics: additive slack on each defining inequality
after scaling by max(1, ||z||_inf).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_EXP_CAP = 700.0  # exp() overflow guard


class ConeError(ValueError):
    pass


@dataclass(frozen=True)
class Cone:
    variant: str  # "nonneg" | "soc" | "rsoc" | "exp" | "dexp" | "pow3" | "dpow3" | "powk" | "dpowk"
    dim: int
    alpha: float = 0.0
    alphas: tuple[float, ...] = ()

    def __post_init__(self):
        v, k = self.variant, self.dim
        if v == "nonneg" and k < 1:
            raise ConeError("NonNeg needs dim >= 1")
        if v == "soc" and k < 2:
            raise ConeError("Soc needs dim >= 2")
        if v == "rsoc" and k < 3:
            raise ConeError("RotSoc needs dim >= 3")
        if v in ("exp", "dexp") and k != 3:
            raise ConeError("Exp cones are 3-dimensional")
        if v in ("pow3", "dpow3"):
            if k != 3:
                raise ConeError("Power3 cones are 3-dimensional")
            if not (0.0 < self.alpha < 1.0):
                raise ConeError("Power3 exponent must lie in (0,1)")
        if v in ("powk", "dpowk"):
            l = len(self.alphas)
            if not (2 <= l < k):
                raise ConeError("PowerK needs 2 <= l < k")
            if any(a <= 0 for a in self.alphas):
                raise ConeError("PowerK exponents must be positive")
            if abs(sum(self.alphas) - 1.0) > 1e-12:
                raise ConeError("PowerK exponents must sum to 1")

    def __repr__(self):
        if self.variant in ("pow3", "dpow3"):
            return f"{self.variant}({self.alpha:g})"
        if self.variant in ("powk", "dpowk"):
            return f"{self.variant}{self.alphas}[{self.dim}]"
        return f"{self.variant}[{self.dim}]"


def nonneg(k: int) -> Cone:
    return Cone("nonneg", k)


def soc(k: int) -> Cone:
    return Cone("soc", k)


def rsoc(k: int) -> Cone:
    return Cone("rsoc", k)


def exp_cone() -> Cone:
    return Cone("exp", 3)


def dual_exp_cone() -> Cone:
    return Cone("dexp", 3)


def pow3(alpha: float) -> Cone:
    return Cone("pow3", 3, alpha=float(alpha))


def dual_pow3(alpha: float) -> Cone:
    return Cone("dpow3", 3, alpha=float(alpha))


def powk(alphas, k: int) -> Cone:
    return Cone("powk", k, alphas=tuple(float(a) for a in alphas))


# ---------------------------------------------------------------------------
# Membership
# ---------------------------------------------------------------------------


def _safe_exp(t: float) -> float:
    return math.exp(min(t, _EXP_CAP))


def _pow_prod(vals, exps) -> float:
    p = 1.0
    for v, a in zip(vals, exps):
        p *= max(v, 0.0) ** a
    return p


def margins(cone: Cone, z) -> list[float]:
    """Raw (unscaled) slacks of the defining inequalities at z."""
    z = np.asarray(z, dtype=float)
    if z.shape != (cone.dim,):
        raise ConeError(f"point of dim {z.shape} for cone {cone}")
    v = cone.variant
    if v == "nonneg":
        return list(z)
    if v == "soc":
        return [z[0] - float(np.linalg.norm(z[1:]))]
    if v == "rsoc":
        return [z[0], z[1], 2.0 * z[0] * z[1] - float(z[2:] @ z[2:])]
    if v == "exp":
        # closure form: z1 >= z2 e^{z3/z2}, z2 >= 0
        if z[1] > 0.0:
            return [z[1], z[0] - z[1] * _safe_exp(z[2] / z[1])]
        return [z[1], z[0], -z[2]]
    if v == "dexp":
        # {u1 >= -u3 e^{u2/u3 - 1}, u3 <= 0, u1 >= 0}
        if z[2] < 0.0:
            return [-z[2], z[0] - (-z[2]) * _safe_exp(z[1] / z[2] - 1.0)]
        return [-z[2], z[0], z[1]]
    if v == "pow3":
        a = cone.alpha
        return [z[0], z[1], _pow_prod(z[:2], (a, 1.0 - a)) - abs(z[2])]
    if v == "dpow3":
        a = cone.alpha
        prod = _pow_prod((z[0] / a, z[1] / (1.0 - a)), (a, 1.0 - a))
        return [z[0], z[1], prod - abs(z[2])]
    if v == "powk":
        l = len(cone.alphas)
        tail = float(np.linalg.norm(z[l:]))
        return list(z[:l]) + [_pow_prod(z[:l], cone.alphas) - tail]
    if v == "dpowk":
        l = len(cone.alphas)
        tail = float(np.linalg.norm(z[l:]))
        prod = _pow_prod([z[i] / cone.alphas[i] for i in range(l)], cone.alphas)
        return list(z[:l]) + [prod - tail]
    raise ConeError(f"unknown variant {v}")


def membership(cone: Cone, z, tol: float = 1e-9) -> bool:
    """True iff z satisfies the defining inequalities within tol, scaled by
    max(1, ||z||_inf)."""
    z = np.asarray(z, dtype=float)
    scale = max(1.0, float(np.max(np.abs(z))) if z.size else 1.0)
    return min(margins(cone, z)) >= -tol * scale


def interior_margin(cone: Cone, z) -> float:
    """Scaled minimum slack; strictly positive iff z is strictly interior."""
    z = np.asarray(z, dtype=float)
    scale = max(1.0, float(np.max(np.abs(z))) if z.size else 1.0)
    return min(margins(cone, z)) / scale


def dual(cone: Cone) -> Cone:
    """Dual cone descriptor. NonNeg/Soc/RotSoc are self-dual."""
    v = cone.variant
    if v in ("nonneg", "soc", "rsoc"):
        return cone
    if v == "exp":
        return Cone("dexp", 3)
    if v == "dexp":
        return Cone("exp", 3)
    if v == "pow3":
        return Cone("dpow3", 3, alpha=cone.alpha)
    if v == "dpow3":
        return Cone("pow3", 3, alpha=cone.alpha)
    if v == "powk":
        return Cone("dpowk", cone.dim, alphas=cone.alphas)
    if v == "dpowk":
        return Cone("powk", cone.dim, alphas=cone.alphas)
    raise ConeError(f"unknown variant {v}")


def rotation_matrix(k: int) -> np.ndarray:
    """R_k with z in Soc(k) iff R_k z in RotSoc(k)."""
    r = np.eye(k)
    s = math.sqrt(2.0) / 2.0
    r[0, 0] = r[0, 1] = r[1, 0] = s
    r[1, 1] = -s
    return r


# ---------------------------------------------------------------------------
# Barriers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BarrierEval:
    value: float
    gradient: np.ndarray
    hessian: np.ndarray


def barrier_degree(cone: Cone) -> int:
    v = cone.variant
    if v == "nonneg":
        return cone.dim
    if v in ("soc", "rsoc"):
        return 2
    if v in ("exp", "pow3"):
        return 3
    raise ConeError(f"no barrier for {cone}")


def barrier(cone: Cone, z) -> BarrierEval:
    """Standard logarithmic barrier with exact gradient and Hessian.

    Raises ConeError outside the interior."""
    z = np.asarray(z, dtype=float)
    if z.shape != (cone.dim,):
        raise ConeError("dimension mismatch")
    if interior_margin(cone, z) <= 0.0:
        raise ConeError(f"point not strictly interior to {cone}")
    v = cone.variant
    if v == "nonneg":
        val = -float(np.sum(np.log(z)))
        g = -1.0 / z
        h = np.diag(1.0 / z**2)
        return BarrierEval(val, g, h)
    if v == "soc":
        d = float(z[0] ** 2 - z[1:] @ z[1:])
        gd = np.concatenate(([2.0 * z[0]], -2.0 * z[1:]))
        h2 = -2.0 * np.eye(cone.dim)
        h2[0, 0] = 2.0
        g = -gd / d
        h = np.outer(gd, gd) / d**2 - h2 / d
        return BarrierEval(-math.log(d), g, h)
    if v == "rsoc":
        d = float(2.0 * z[0] * z[1] - z[2:] @ z[2:])
        gd = np.concatenate(([2.0 * z[1], 2.0 * z[0]], -2.0 * z[2:]))
        h2 = -2.0 * np.eye(cone.dim)
        h2[0, 0] = h2[1, 1] = 0.0
        h2[0, 1] = h2[1, 0] = 2.0
        g = -gd / d
        h = np.outer(gd, gd) / d**2 - h2 / d
        return BarrierEval(-math.log(d), g, h)
    if v == "exp":
        z1, z2, z3 = z
        rho = z2 * math.log(z1 / z2) - z3
        val = -math.log(rho) - math.log(z1) - math.log(z2)
        gr = np.array([z2 / z1, math.log(z1 / z2) - 1.0, -1.0])
        hr = np.array(
            [[-z2 / z1**2, 1.0 / z1, 0.0], [1.0 / z1, -1.0 / z2, 0.0], [0.0, 0.0, 0.0]]
        )
        g = -gr / rho - np.array([1.0 / z1, 1.0 / z2, 0.0])
        h = np.outer(gr, gr) / rho**2 - hr / rho + np.diag([1.0 / z1**2, 1.0 / z2**2, 0.0])
        return BarrierEval(val, g, h)
    if v == "pow3":
        a = cone.alpha
        z1, z2, z3 = z
        p = z1 ** (2.0 * a) * z2 ** (2.0 - 2.0 * a)
        xi = p - z3**2
        val = -math.log(xi) - (1.0 - a) * math.log(z1) - a * math.log(z2)
        gxi = np.array([2.0 * a * p / z1, 2.0 * (1.0 - a) * p / z2, -2.0 * z3])
        hxi = np.array(
            [
                [2.0 * a * (2.0 * a - 1.0) * p / z1**2, 4.0 * a * (1.0 - a) * p / (z1 * z2), 0.0],
                [4.0 * a * (1.0 - a) * p / (z1 * z2), 2.0 * (1.0 - a) * (1.0 - 2.0 * a) * p / z2**2, 0.0],
                [0.0, 0.0, -2.0],
            ]
        )
        g = -gxi / xi + np.array([-(1.0 - a) / z1, -a / z2, 0.0])
        h = np.outer(gxi, gxi) / xi**2 - hxi / xi + np.diag([(1.0 - a) / z1**2, a / z2**2, 0.0])
        return BarrierEval(val, g, h)
    raise ConeError(f"no barrier for {cone}")


# Self-centered exponential-cone point with s = -grad(s), solved offline to
# full precision; used to start the interior-point iteration at mu = 1.
_EXP_INIT = None


def initial_point(cone: Cone) -> np.ndarray:
    """Strictly interior point with s = -grad(barrier)(s)."""
    v = cone.variant
    if v == "nonneg":
        return np.ones(cone.dim)
    if v == "soc":
        p = np.zeros(cone.dim)
        p[0] = math.sqrt(2.0)
        return p
    if v == "rsoc":
        p = np.zeros(cone.dim)
        p[0] = p[1] = 1.0
        return p
    if v == "exp":
        global _EXP_INIT
        if _EXP_INIT is None:
            _EXP_INIT = _solve_exp_init()
        return _EXP_INIT.copy()
    if v == "pow3":
        a = cone.alpha
        return np.array([math.sqrt(1.0 + a), math.sqrt(2.0 - a), 0.0])
    raise ConeError(f"no initial point for {cone}")


def _solve_exp_init() -> np.ndarray:
    # Newton on F(s) = s + grad(s) = 0 from a safe interior start.
    cone = Cone("exp", 3)
    s = np.array([1.5, 0.6, -0.5])
    for _ in range(60):
        be = barrier(cone, s)
        f = s + be.gradient
        if float(np.linalg.norm(f)) < 1e-14:
            break
        step = np.linalg.solve(np.eye(3) + be.hessian, f)
        t = 1.0
        while t > 1e-8 and interior_margin(cone, s - t * step) <= 0.0:
            t *= 0.5
        s = s - t * step
    return s


def max_step(cone: Cone, z: np.ndarray, dz: np.ndarray, cap: float = 1.0) -> float:
    """Largest step alpha <= cap with z + alpha*dz strictly interior
    (bisection on the margin function; exact roots are not needed)."""
    if interior_margin(cone, z + cap * dz) > 0.0:
        return cap
    lo, hi = 0.0, cap
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        if interior_margin(cone, z + mid * dz) > 0.0:
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# Power-cone decomposition
# ---------------------------------------------------------------------------


def decompose_power(cone: Cone, slots, alloc):
    """Split a PowerK membership into one Soc slice and l-1 Power3 slices.

    ``slots`` are the k coordinate expressions (anything the caller treats as
    rows); ``alloc`` returns a fresh expression for each of the l-1 auxiliary
    variables. Returns a list of (Cone, rows) pairs whose joint feasibility
    projects onto the original cone.
    """
    if cone.variant != "powk":
        raise ConeError("decompose_power expects a PowerK cone")
    alphas = cone.alphas
    l, k = len(alphas), cone.dim
    if len(slots) != k:
        raise ConeError("slot count must match cone dimension")
    u = alloc()
    parts = [(soc(k - l + 1), [u] + list(slots[l:]))]
    if l == 2:
        parts.append((pow3(alphas[0]), [slots[0], slots[1], u]))
        return parts
    vs = [alloc() for _ in range(l - 2)]
    parts.append((pow3(alphas[0]), [slots[0], vs[0], u]))
    for i in range(2, l - 1):
        abar = alphas[i - 1] / sum(alphas[i - 1 :])
        parts.append((pow3(abar), [slots[i - 1], vs[i - 1], vs[i - 2]]))
    abar = alphas[l - 2] / (alphas[l - 2] + alphas[l - 1])
    parts.append((pow3(abar), [slots[l - 2], slots[l - 1], vs[l - 3]]))
    return parts


def power_completion(cone: Cone, z) -> list[float]:
    """Auxiliary values making every decomposition slice feasible for
    z in PowerK (tight weighted-GM accumulators)."""
    if cone.variant != "powk":
        raise ConeError("power_completion expects a PowerK cone")
    z = np.asarray(z, dtype=float)
    alphas = cone.alphas
    l = len(alphas)
    u = float(np.linalg.norm(z[l:]))
    if l == 2:
        return [u]
    # W_j = weighted GM of z_j..z_l with renormalized exponents
    aux = [u]
    for j in range(2, l):  # v_{j-1} = W_j for j = 2..l-1
        tail = alphas[j - 1 :]
        tot = sum(tail)
        w = _pow_prod(z[j - 1 : l], [a / tot for a in tail])
        aux.append(w)
    return aux
