"""Executable catalog of convex scalar constraints with conic representations.

Each atom is one constraint shape ``h(args) <= 0`` together with

* an exact evaluator,
* a conic representation (``conify``) of the relaxed constraint
  ``h(args) <= relax`` for an affine relaxation expression,
* the conic representation of the closed perspective
  ``lam * h(args/lam) - relax <= 0`` (``persp``),
* an explicit auxiliary-variable completion for both representations, so
  equivalence tests are constructive rather than requiring a feasibility
  solve, and
* an exact interval maximum over a bound box (used for big-M values).

Bindings are affine expressions; in the perspective representation every
binding constant is scaled by ``lam`` (the perspective of an affine argument),
which reproduces the published perspective cells when bindings are bare
variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import cones as cn
from .model import LinExpr, LinRow, as_expr

_SQRT2 = math.sqrt(2.0)


class AtomError(ValueError):
    pass


class DomainError(AtomError):
    """Point outside the atom's domain (e.g. log of a nonpositive value)."""


@dataclass
class ConicRep:
    """Cone slices plus extra linear rows over original + auxiliary vars."""

    slices: list[tuple[cn.Cone, tuple[LinExpr, ...]]]
    lin_rows: list[LinRow]
    aux: list[int]

    @property
    def aux_var_count(self) -> int:
        return len(self.aux)


class AuxAlloc:
    """Fresh-variable allocator; wraps a callable returning new VarIds."""

    def __init__(self, new_id: Callable[[], int]):
        self._new_id = new_id
        self.created: list[int] = []

    def __call__(self) -> LinExpr:
        v = self._new_id()
        self.created.append(v)
        return LinExpr.var(v)


def _counter_alloc(start: int = 0) -> AuxAlloc:
    box = [start]

    def nxt():
        box[0] += 1
        return box[0] - 1

    return AuxAlloc(nxt)


def _pos(x: float, what: str, strict=True) -> float:
    if (x <= 0.0) if strict else (x < 0.0):
        raise DomainError(f"{what} must be {'positive' if strict else 'nonnegative'}, got {x}")
    return x


def _mag(lo: float, hi: float) -> float:
    return max(abs(lo), abs(hi))


class ConvexAtom:
    kind: str = ""

    @property
    def arity(self) -> int:
        raise NotImplementedError

    def params(self) -> tuple:
        return ()

    # scalar side ----------------------------------------------------------
    def eval(self, args: Sequence[float]) -> float:
        raise NotImplementedError

    def box_max(self, iv: Sequence[tuple[float, float]]) -> float:
        """Exact max of h over the interval box (domain-clipped)."""
        raise NotImplementedError

    # conic side -----------------------------------------------------------
    def conify(self, bindings, relax, alloc: AuxAlloc) -> ConicRep:
        raise NotImplementedError

    def persp(self, bindings, lam, relax, alloc: AuxAlloc) -> ConicRep:
        raise NotImplementedError

    def completion(self, args, relax: float = 0.0) -> list[float]:
        return []

    def persp_completion(self, args, lamv: float, relax: float = 0.0) -> list[float]:
        return []

    # test support ---------------------------------------------------------
    def sample_args(self, rng) -> list[float]:
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self.params() == other.params()

    def __hash__(self):
        return hash((self.kind, self.params()))

    def __repr__(self):
        ps = ",".join(repr(p) for p in self.params())
        return f"{self.kind}({ps})"


def _pb(e: LinExpr, lam: LinExpr) -> LinExpr:
    """Perspective of an affine binding: constants scale by lam."""
    return e.scale_constant_onto(lam)


# ---------------------------------------------------------------------------


class Affine(ConvexAtom):
    """h = e (the binding itself); constraint e <= 0."""

    kind = "affine"
    arity = 1

    def eval(self, args):
        return float(args[0])

    def box_max(self, iv):
        return iv[0][1]

    def conify(self, bindings, relax, alloc):
        return ConicRep([], [LinRow(bindings[0] - relax, "le")], [])

    def persp(self, bindings, lam, relax, alloc):
        return ConicRep([], [LinRow(_pb(bindings[0], lam) - relax, "le")], [])

    def sample_args(self, rng):
        return [rng.uniform(-3.0, 3.0)]


class Square(ConvexAtom):
    """h = x^2 - t."""

    kind = "square"
    arity = 2

    def eval(self, args):
        x, t = args
        return x * x - t

    def box_max(self, iv):
        (xl, xu), (tl, tu) = iv
        return _mag(xl, xu) ** 2 - tl

    def conify(self, bindings, relax, alloc):
        x, t = bindings
        return ConicRep([(cn.rsoc(3), (LinExpr.const(0.5), t + relax, x))], [], [])

    def persp(self, bindings, lam, relax, alloc):
        x, t = bindings
        return ConicRep([(cn.rsoc(3), (lam * 0.5, _pb(t, lam) + relax, _pb(x, lam)))], [], [])

    def sample_args(self, rng):
        x = rng.uniform(-3.0, 3.0)
        return [x, x * x + rng.uniform(-2.0, 2.0)]


class SumSquares(ConvexAtom):
    """h = sum(x_i^2) - t."""

    kind = "sumsq"

    def __init__(self, n: int):
        if n < 1:
            raise AtomError("sumsq needs n >= 1")
        self.n = n

    @property
    def arity(self):
        return self.n + 1

    def params(self):
        return (self.n,)

    def eval(self, args):
        return float(sum(a * a for a in args[:-1]) - args[-1])

    def box_max(self, iv):
        return sum(_mag(lo, hi) ** 2 for lo, hi in iv[:-1]) - iv[-1][0]

    def conify(self, bindings, relax, alloc):
        xs, t = bindings[:-1], bindings[-1]
        return ConicRep([(cn.rsoc(self.n + 2), (LinExpr.const(0.5), t + relax, *xs))], [], [])

    def persp(self, bindings, lam, relax, alloc):
        xs, t = bindings[:-1], bindings[-1]
        rows = (lam * 0.5, _pb(t, lam) + relax, *(_pb(x, lam) for x in xs))
        return ConicRep([(cn.rsoc(self.n + 2), rows)], [], [])

    def sample_args(self, rng):
        xs = [rng.uniform(-2.0, 2.0) for _ in range(self.n)]
        return xs + [sum(x * x for x in xs) + rng.uniform(-2.0, 2.0)]


class Reciprocal(ConvexAtom):
    """h = 1/x - t, x > 0."""

    kind = "recip"
    arity = 2

    def eval(self, args):
        x, t = args
        _pos(x, "recip argument")
        return 1.0 / x - t

    def box_max(self, iv):
        (xl, xu), (tl, tu) = iv
        if xl <= 0.0:
            return math.inf
        return 1.0 / xl - tl

    def conify(self, bindings, relax, alloc):
        x, t = bindings
        return ConicRep([(cn.rsoc(3), (x, t + relax, LinExpr.const(_SQRT2)))], [], [])

    def persp(self, bindings, lam, relax, alloc):
        x, t = bindings
        return ConicRep([(cn.rsoc(3), (_pb(x, lam), _pb(t, lam) + relax, lam * _SQRT2))], [], [])

    def sample_args(self, rng):
        x = rng.uniform(0.05, 4.0)
        return [x, 1.0 / x + rng.uniform(-1.5, 1.5)]


class PowAbs(ConvexAtom):
    """h = |x|^p - t, p > 1."""

    kind = "powabs"
    arity = 2

    def __init__(self, p: float):
        if p <= 1.0:
            raise AtomError("powabs needs p > 1")
        self.p = float(p)

    def params(self):
        return (self.p,)

    def eval(self, args):
        x, t = args
        return abs(x) ** self.p - t

    def box_max(self, iv):
        (xl, xu), (tl, tu) = iv
        return _mag(xl, xu) ** self.p - tl

    def conify(self, bindings, relax, alloc):
        x, t = bindings
        return ConicRep([(cn.pow3(1.0 / self.p), (t + relax, LinExpr.const(1.0), x))], [], [])

    def persp(self, bindings, lam, relax, alloc):
        x, t = bindings
        return ConicRep([(cn.pow3(1.0 / self.p), (_pb(t, lam) + relax, lam, _pb(x, lam)))], [], [])

    def sample_args(self, rng):
        x = rng.uniform(-2.5, 2.5)
        return [x, abs(x) ** self.p + rng.uniform(-2.0, 2.0)]


class InvPow(ConvexAtom):
    """h = 1/x^p - t, x > 0, p > 1."""

    kind = "invpow"
    arity = 2

    def __init__(self, p: float):
        if p <= 1.0:
            raise AtomError("invpow needs p > 1")
        self.p = float(p)

    def params(self):
        return (self.p,)

    def eval(self, args):
        x, t = args
        _pos(x, "invpow argument")
        return x ** (-self.p) - t

    def box_max(self, iv):
        (xl, xu), (tl, tu) = iv
        if xl <= 0.0:
            return math.inf
        return xl ** (-self.p) - tl

    def conify(self, bindings, relax, alloc):
        x, t = bindings
        a = 1.0 / (1.0 + self.p)
        return ConicRep([(cn.pow3(a), (t + relax, x, LinExpr.const(1.0)))], [], [])

    def persp(self, bindings, lam, relax, alloc):
        x, t = bindings
        a = 1.0 / (1.0 + self.p)
        return ConicRep([(cn.pow3(a), (_pb(t, lam) + relax, _pb(x, lam), lam))], [], [])

    def sample_args(self, rng):
        x = rng.uniform(0.2, 3.0)
        return [x, x ** (-self.p) + rng.uniform(-1.5, 1.5)]


class RationalPow(ConvexAtom):
    """h = x^(a/b) - t, x > 0, a >= b > 0 integers (exponent kept exact)."""

    kind = "ratpow"
    arity = 2

    def __init__(self, a: int, b: int):
        if not (isinstance(a, int) and isinstance(b, int)) or not a >= b > 0:
            raise AtomError("ratpow needs integers a >= b > 0")
        self.a, self.b = a, b
        self.exponent = Fraction(a, b)

    def params(self):
        return (self.a, self.b)

    def eval(self, args):
        x, t = args
        _pos(x, "ratpow argument")
        return x ** float(self.exponent) - t

    def box_max(self, iv):
        (xl, xu), (tl, tu) = iv
        return max(xu, 0.0) ** float(self.exponent) - tl

    def conify(self, bindings, relax, alloc):
        x, t = bindings
        al = float(Fraction(self.b, self.a))
        return ConicRep([(cn.pow3(al), (t + relax, LinExpr.const(1.0), x))], [], [])

    def persp(self, bindings, lam, relax, alloc):
        x, t = bindings
        al = float(Fraction(self.b, self.a))
        return ConicRep([(cn.pow3(al), (_pb(t, lam) + relax, lam, _pb(x, lam)))], [], [])

    def sample_args(self, rng):
        x = rng.uniform(0.05, 3.0)
        return [x, x ** float(self.exponent) + rng.uniform(-1.5, 1.5)]


class ExpFn(ConvexAtom):
    """h = e^x - t."""

    kind = "exp"
    arity = 2

    def eval(self, args):
        x, t = args
        return math.exp(x) - t

    def box_max(self, iv):
        (xl, xu), (tl, tu) = iv
        return math.exp(min(xu, 700.0)) - tl

    def conify(self, bindings, relax, alloc):
        x, t = bindings
        return ConicRep([(cn.exp_cone(), (t + relax, LinExpr.const(1.0), x))], [], [])

    def persp(self, bindings, lam, relax, alloc):
        x, t = bindings
        return ConicRep([(cn.exp_cone(), (_pb(t, lam) + relax, lam, _pb(x, lam)))], [], [])

    def sample_args(self, rng):
        x = rng.uniform(-2.0, 2.0)
        return [x, math.exp(x) + rng.uniform(-2.0, 2.0)]


class NegLog(ConvexAtom):
    """h = t - log(x), x > 0."""

    kind = "neglog"
    arity = 2

    def eval(self, args):
        x, t = args
        _pos(x, "neglog argument")
        return t - math.log(x)

    def box_max(self, iv):
        (xl, xu), (tl, tu) = iv
        if xl <= 0.0:
            return math.inf
        return tu - math.log(xl)

    def conify(self, bindings, relax, alloc):
        x, t = bindings
        return ConicRep([(cn.exp_cone(), (x, LinExpr.const(1.0), t - relax))], [], [])

    def persp(self, bindings, lam, relax, alloc):
        x, t = bindings
        return ConicRep([(cn.exp_cone(), (_pb(x, lam), lam, _pb(t, lam) - relax))], [], [])

    def sample_args(self, rng):
        x = rng.uniform(0.05, 4.0)
        return [x, math.log(x) + rng.uniform(-1.5, 1.5)]


class InvLog(ConvexAtom):
    """h = 1/log(x) - t, x > 1."""

    kind = "invlog"
    arity = 2

    def eval(self, args):
        x, t = args
        if x <= 1.0:
            raise DomainError(f"invlog needs x > 1, got {x}")
        return 1.0 / math.log(x) - t

    def box_max(self, iv):
        (xl, xu), (tl, tu) = iv
        if xl <= 1.0:
            return math.inf
        return 1.0 / math.log(xl) - tl

    def conify(self, bindings, relax, alloc):
        x, t = bindings
        u = alloc()
        return ConicRep(
            [
                (cn.rsoc(3), (u, t + relax, LinExpr.const(_SQRT2))),
                (cn.exp_cone(), (x, LinExpr.const(1.0), u)),
            ],
            [],
            alloc.created[-1:],
        )

    def persp(self, bindings, lam, relax, alloc):
        x, t = bindings
        u = alloc()
        return ConicRep(
            [
                (cn.rsoc(3), (u, _pb(t, lam) + relax, lam * _SQRT2)),
                (cn.exp_cone(), (_pb(x, lam), lam, u)),
            ],
            [],
            alloc.created[-1:],
        )

    def completion(self, args, relax=0.0):
        return [math.log(args[0])]

    def persp_completion(self, args, lamv, relax=0.0):
        return [lamv * math.log(args[0] / lamv)]

    def sample_args(self, rng):
        x = rng.uniform(1.05, 5.0)
        return [x, 1.0 / math.log(x) + rng.uniform(-1.5, 1.5)]


class XExpX(ConvexAtom):
    """h = x*e^x - t, x >= 0."""

    kind = "xexpx"
    arity = 2

    def eval(self, args):
        x, t = args
        _pos(x, "xexpx argument", strict=False)
        return x * math.exp(x) - t

    def box_max(self, iv):
        (xl, xu), (tl, tu) = iv
        xu = max(xu, 0.0)
        return xu * math.exp(min(xu, 700.0)) - tl

    def conify(self, bindings, relax, alloc):
        x, t = bindings
        u = alloc()
        return ConicRep(
            [
                (cn.rsoc(3), (LinExpr.const(0.5), u, x)),
                (cn.exp_cone(), (t + relax, x, u)),
            ],
            [],
            alloc.created[-1:],
        )

    def persp(self, bindings, lam, relax, alloc):
        x, t = bindings
        u = alloc()
        return ConicRep(
            [
                (cn.rsoc(3), (lam * 0.5, u, _pb(x, lam))),
                (cn.exp_cone(), (_pb(t, lam) + relax, _pb(x, lam), u)),
            ],
            [],
            alloc.created[-1:],
        )

    def completion(self, args, relax=0.0):
        return [args[0] ** 2]

    def persp_completion(self, args, lamv, relax=0.0):
        return [args[0] ** 2 / lamv]

    def sample_args(self, rng):
        x = rng.uniform(0.0, 2.5)
        return [x, x * math.exp(x) + rng.uniform(-2.0, 2.0)]


class ProdExponentials(ConvexAtom):
    """h = a_1^{x_1} * ... * a_n^{x_n} - t, a_i > 0."""

    kind = "prodexp"

    def __init__(self, bases: Sequence[float]):
        bases = tuple(float(a) for a in bases)
        if not bases or any(a <= 0.0 for a in bases):
            raise AtomError("prodexp needs positive bases")
        self.bases = bases
        self._logs = tuple(math.log(a) for a in bases)

    @property
    def arity(self):
        return len(self.bases) + 1

    def params(self):
        return (self.bases,)

    def _logsum(self, xs) -> float:
        return float(sum(l * x for l, x in zip(self._logs, xs)))

    def eval(self, args):
        return math.exp(self._logsum(args[:-1])) - args[-1]

    def box_max(self, iv):
        hi = sum((l * b if l >= 0 else l * a) for l, (a, b) in zip(self._logs, iv[:-1]))
        return math.exp(min(hi, 700.0)) - iv[-1][0]

    def _arg_expr(self, bindings) -> LinExpr:
        e = LinExpr.ZERO
        for l, x in zip(self._logs, bindings[:-1]):
            e = e + x * l
        return e

    def conify(self, bindings, relax, alloc):
        t = bindings[-1]
        return ConicRep(
            [(cn.exp_cone(), (t + relax, LinExpr.const(1.0), self._arg_expr(bindings)))], [], []
        )

    def persp(self, bindings, lam, relax, alloc):
        t = bindings[-1]
        arg = self._arg_expr([_pb(x, lam) for x in bindings[:-1]] + [None])
        return ConicRep([(cn.exp_cone(), (_pb(t, lam) + relax, lam, arg))], [], [])

    def sample_args(self, rng):
        xs = [rng.uniform(-1.5, 1.5) for _ in self.bases]
        return xs + [math.exp(self._logsum(xs)) + rng.uniform(-2.0, 2.0)]


class Softplus(ConvexAtom):
    """h = log(1 + e^x) - t."""

    kind = "softplus"
    arity = 2

    def eval(self, args):
        x, t = args
        return float(np.logaddexp(0.0, x)) - t

    def box_max(self, iv):
        (xl, xu), (tl, tu) = iv
        return float(np.logaddexp(0.0, xu)) - tl

    def conify(self, bindings, relax, alloc):
        x, t = bindings
        u, v = alloc(), alloc()
        tr = t + relax
        return ConicRep(
            [
                (cn.exp_cone(), (u, LinExpr.const(1.0), x - tr)),
                (cn.exp_cone(), (v, LinExpr.const(1.0), -tr)),
            ],
            [LinRow(u + v - 1.0, "le")],
            alloc.created[-2:],
        )

    def persp(self, bindings, lam, relax, alloc):
        x, t = bindings
        u, v = alloc(), alloc()
        tr = _pb(t, lam) + relax
        return ConicRep(
            [
                (cn.exp_cone(), (u, lam, _pb(x, lam) - tr)),
                (cn.exp_cone(), (v, lam, -tr)),
            ],
            [LinRow(u + v - lam, "le")],
            alloc.created[-2:],
        )

    def completion(self, args, relax=0.0):
        x, t = args
        return [math.exp(x - t - relax), math.exp(-t - relax)]

    def persp_completion(self, args, lamv, relax=0.0):
        x, t = args
        return [
            lamv * math.exp((x - t - relax) / lamv),
            lamv * math.exp((-t - relax) / lamv),
        ]

    def sample_args(self, rng):
        x = rng.uniform(-4.0, 4.0)
        return [x, float(np.logaddexp(0.0, x)) + rng.uniform(-1.5, 1.5)]


class LogisticLoss(ConvexAtom):
    """h = log(1 + e^{-theta'x}) - t (negative log-likelihood of class 1)."""

    kind = "logistic"

    def __init__(self, theta: Sequence[float]):
        self.theta = tuple(float(v) for v in theta)
        if not self.theta:
            raise AtomError("logistic needs a nonempty theta")

    @property
    def arity(self):
        return len(self.theta) + 1

    def params(self):
        return (self.theta,)

    def _w(self, xs) -> float:
        return float(sum(th * x for th, x in zip(self.theta, xs)))

    def eval(self, args):
        return float(np.logaddexp(0.0, -self._w(args[:-1]))) - args[-1]

    def box_max(self, iv):
        neg_hi = sum((-th * a if th >= 0 else -th * b) for th, (a, b) in zip(self.theta, iv[:-1]))
        return float(np.logaddexp(0.0, neg_hi)) - iv[-1][0]

    def _wexpr(self, bindings) -> LinExpr:
        e = LinExpr.ZERO
        for th, x in zip(self.theta, bindings[:-1]):
            e = e + x * th
        return e

    def conify(self, bindings, relax, alloc):
        t = bindings[-1]
        u, v = alloc(), alloc()
        tr = t + relax
        return ConicRep(
            [
                (cn.exp_cone(), (u, LinExpr.const(1.0), -self._wexpr(bindings) - tr)),
                (cn.exp_cone(), (v, LinExpr.const(1.0), -tr)),
            ],
            [LinRow(u + v - 1.0, "le")],
            alloc.created[-2:],
        )

    def persp(self, bindings, lam, relax, alloc):
        t = bindings[-1]
        u, v = alloc(), alloc()
        tr = _pb(t, lam) + relax
        w = self._wexpr([_pb(x, lam) for x in bindings[:-1]] + [None])
        return ConicRep(
            [
                (cn.exp_cone(), (u, lam, -w - tr)),
                (cn.exp_cone(), (v, lam, -tr)),
            ],
            [LinRow(u + v - lam, "le")],
            alloc.created[-2:],
        )

    def completion(self, args, relax=0.0):
        w, t = self._w(args[:-1]), args[-1]
        return [math.exp(-w - t - relax), math.exp(-t - relax)]

    def persp_completion(self, args, lamv, relax=0.0):
        w, t = self._w(args[:-1]), args[-1]
        return [
            lamv * math.exp((-w - t - relax) / lamv),
            lamv * math.exp((-t - relax) / lamv),
        ]

    def sample_args(self, rng):
        xs = [rng.uniform(-2.0, 2.0) for _ in self.theta]
        return xs + [float(np.logaddexp(0.0, -self._w(xs))) + rng.uniform(-1.5, 1.5)]


class Entropy(ConvexAtom):
    """h = x*log(x) + t, x >= 0 (0 log 0 = 0)."""

    kind = "entropy"
    arity = 2

    def eval(self, args):
        x, t = args
        _pos(x, "entropy argument", strict=False)
        return (x * math.log(x) if x > 0.0 else 0.0) + t

    def box_max(self, iv):
        (xl, xu), (tl, tu) = iv
        xl = max(xl, 0.0)
        f = lambda v: v * math.log(v) if v > 0.0 else 0.0
        return max(f(xl), f(max(xu, 0.0))) + tu

    def conify(self, bindings, relax, alloc):
        x, t = bindings
        return ConicRep([(cn.exp_cone(), (LinExpr.const(1.0), x, t - relax))], [], [])

    def persp(self, bindings, lam, relax, alloc):
        x, t = bindings
        return ConicRep([(cn.exp_cone(), (lam, _pb(x, lam), _pb(t, lam) - relax))], [], [])

    def sample_args(self, rng):
        x = rng.uniform(0.01, 3.0)
        return [x, -x * math.log(x) + rng.uniform(-1.5, 1.5)]


class Log1PlusInv(ConvexAtom):
    """h = log(1 + 1/x) - t, x > 0.

    The perspective uses the distinct three-constraint exponential form
    (two Exp slices plus an equality), not a mechanical substitution."""

    kind = "log1pinv"
    arity = 2

    def eval(self, args):
        x, t = args
        _pos(x, "log1pinv argument")
        return math.log1p(1.0 / x) - t

    def box_max(self, iv):
        (xl, xu), (tl, tu) = iv
        if xl <= 0.0:
            return math.inf
        return math.log1p(1.0 / xl) - tl

    def conify(self, bindings, relax, alloc):
        x, t = bindings
        u = alloc()
        return ConicRep(
            [
                (cn.rsoc(3), (x + 1.0, u, LinExpr.const(_SQRT2))),
                (cn.exp_cone(), (1.0 - u, LinExpr.const(1.0), -t - relax)),
            ],
            [],
            alloc.created[-1:],
        )

    def persp(self, bindings, lam, relax, alloc):
        x, t = bindings
        xp, tp = _pb(x, lam), _pb(t, lam)
        u, v = alloc(), alloc()
        return ConicRep(
            [
                (cn.exp_cone(), (xp, lam + xp, u)),
                (cn.exp_cone(), (xp + lam, xp, v)),
            ],
            [LinRow(tp + relax + u + v, "eq")],
            alloc.created[-2:],
        )

    def completion(self, args, relax=0.0):
        return [1.0 / (args[0] + 1.0)]

    def persp_completion(self, args, lamv, relax=0.0):
        x, t = args
        v = x * math.log((x + lamv) / x)
        return [-(t + relax) - v, v]

    def sample_args(self, rng):
        x = rng.uniform(0.05, 4.0)
        return [x, math.log1p(1.0 / x) + rng.uniform(-1.5, 1.5)]


class SocRobust(ConvexAtom):
    """h = ||A x + b||_2 - c'x + d (robust linear row)."""

    kind = "socrobust"

    def __init__(self, A: Sequence[Sequence[float]], b: Sequence[float], c: Sequence[float], d: float):
        self.A = tuple(tuple(float(v) for v in row) for row in A)
        self.b = tuple(float(v) for v in b)
        self.c = tuple(float(v) for v in c)
        self.d = float(d)
        if len(self.A) != len(self.b) or any(len(r) != len(self.c) for r in self.A):
            raise AtomError("socrobust shape mismatch")

    @property
    def arity(self):
        return len(self.c)

    def params(self):
        return (self.A, self.b, self.c, self.d)

    def eval(self, args):
        r = [sum(a * x for a, x in zip(row, args)) + bb for row, bb in zip(self.A, self.b)]
        return math.sqrt(sum(v * v for v in r)) - sum(ci * x for ci, x in zip(self.c, args)) + self.d

    def box_max(self, iv):
        sq = 0.0
        for row, bb in zip(self.A, self.b):
            lo = hi = bb
            for a, (l, u) in zip(row, iv):
                lo += a * l if a >= 0 else a * u
                hi += a * u if a >= 0 else a * l
            sq += _mag(lo, hi) ** 2
        cmin = sum(ci * (l if ci >= 0 else u) for ci, (l, u) in zip(self.c, iv))
        return math.sqrt(sq) - cmin + self.d

    def _rows(self, bindings, scale: LinExpr | float):
        # scale multiplies the constant offsets (1.0 for the plain form)
        def sc(const):
            return scale * const if isinstance(scale, LinExpr) else LinExpr.const(const * scale)

        head = LinExpr.ZERO
        for ci, x in zip(self.c, bindings):
            head = head + x * ci
        head = head - sc(self.d)
        rows = [head]
        for row, bb in zip(self.A, self.b):
            e = sc(bb)
            for a, x in zip(row, bindings):
                e = e + x * a
            rows.append(e)
        return rows

    def conify(self, bindings, relax, alloc):
        rows = self._rows(bindings, 1.0)
        rows[0] = rows[0] + relax
        return ConicRep([(cn.soc(len(self.b) + 1), tuple(rows))], [], [])

    def persp(self, bindings, lam, relax, alloc):
        rows = self._rows([_pb(x, lam) for x in bindings], lam)
        rows[0] = rows[0] + relax
        return ConicRep([(cn.soc(len(self.b) + 1), tuple(rows))], [], [])

    def sample_args(self, rng):
        return [rng.uniform(-2.0, 2.0) for _ in self.c]


class LogSumExp(ConvexAtom):
    """h = log(sum e^{x_i}) - t."""

    kind = "logsumexp"

    def __init__(self, n: int):
        if n < 1:
            raise AtomError("logsumexp needs n >= 1")
        self.n = n

    @property
    def arity(self):
        return self.n + 1

    def params(self):
        return (self.n,)

    def eval(self, args):
        xs = np.asarray(args[:-1], dtype=float)
        m = float(np.max(xs))
        return m + math.log(float(np.sum(np.exp(xs - m)))) - args[-1]

    def box_max(self, iv):
        return self.eval([hi for _, hi in iv[:-1]] + [iv[-1][0]])

    def conify(self, bindings, relax, alloc):
        xs, t = bindings[:-1], bindings[-1]
        tr = t + relax
        us = [alloc() for _ in xs]
        slices = [(cn.exp_cone(), (u, LinExpr.const(1.0), x - tr)) for u, x in zip(us, xs)]
        total = LinExpr.ZERO
        for u in us:
            total = total + u
        return ConicRep(slices, [LinRow(total - 1.0, "le")], alloc.created[-self.n:])

    def persp(self, bindings, lam, relax, alloc):
        xs, t = bindings[:-1], bindings[-1]
        tr = _pb(t, lam) + relax
        us = [alloc() for _ in xs]
        slices = [(cn.exp_cone(), (u, lam, _pb(x, lam) - tr)) for u, x in zip(us, xs)]
        total = LinExpr.ZERO
        for u in us:
            total = total + u
        return ConicRep(slices, [LinRow(total - lam, "le")], alloc.created[-self.n:])

    def completion(self, args, relax=0.0):
        t = args[-1] + relax
        return [math.exp(x - t) for x in args[:-1]]

    def persp_completion(self, args, lamv, relax=0.0):
        t = args[-1] + relax
        return [lamv * math.exp((x - t) / lamv) for x in args[:-1]]

    def sample_args(self, rng):
        xs = [rng.uniform(-2.0, 2.0) for _ in range(self.n)]
        return xs + [self.eval(xs + [0.0]) + rng.uniform(-1.5, 1.5)]


class L1Norm(ConvexAtom):
    """h = sum |x_i| - t."""

    kind = "l1norm"

    def __init__(self, n: int):
        if n < 1:
            raise AtomError("l1norm needs n >= 1")
        self.n = n

    @property
    def arity(self):
        return self.n + 1

    def params(self):
        return (self.n,)

    def eval(self, args):
        return float(sum(abs(a) for a in args[:-1]) - args[-1])

    def box_max(self, iv):
        return sum(_mag(lo, hi) for lo, hi in iv[:-1]) - iv[-1][0]

    def conify(self, bindings, relax, alloc):
        xs, t = bindings[:-1], bindings[-1]
        us = [alloc() for _ in xs]
        slices = [(cn.soc(2), (u, x)) for u, x in zip(us, xs)]
        total = LinExpr.ZERO
        for u in us:
            total = total + u
        return ConicRep(slices, [LinRow(total - t - relax, "eq")], alloc.created[-self.n:])

    def persp(self, bindings, lam, relax, alloc):
        xs, t = [_pb(x, lam) for x in bindings[:-1]], _pb(bindings[-1], lam)
        us = [alloc() for _ in xs]
        slices = [(cn.soc(2), (u, x)) for u, x in zip(us, xs)]
        total = LinExpr.ZERO
        for u in us:
            total = total + u
        return ConicRep(slices, [LinRow(total - t - relax, "eq")], alloc.created[-self.n:])

    def completion(self, args, relax=0.0):
        xs, t = args[:-1], args[-1] + relax
        us = [abs(x) for x in xs]
        us[0] += t - sum(us)
        return us

    def persp_completion(self, args, lamv, relax=0.0):
        return self.completion(args, relax)

    def sample_args(self, rng):
        xs = [rng.uniform(-2.0, 2.0) for _ in range(self.n)]
        return xs + [sum(abs(x) for x in xs) + rng.uniform(-1.5, 1.5)]


class L2Norm(ConvexAtom):
    """h = ||x||_2 - t."""

    kind = "l2norm"

    def __init__(self, n: int):
        if n < 1:
            raise AtomError("l2norm needs n >= 1")
        self.n = n

    @property
    def arity(self):
        return self.n + 1

    def params(self):
        return (self.n,)

    def eval(self, args):
        return math.sqrt(sum(a * a for a in args[:-1])) - args[-1]

    def box_max(self, iv):
        return math.sqrt(sum(_mag(lo, hi) ** 2 for lo, hi in iv[:-1])) - iv[-1][0]

    def conify(self, bindings, relax, alloc):
        xs, t = bindings[:-1], bindings[-1]
        return ConicRep([(cn.soc(self.n + 1), (t + relax, *xs))], [], [])

    def persp(self, bindings, lam, relax, alloc):
        xs = [_pb(x, lam) for x in bindings[:-1]]
        t = _pb(bindings[-1], lam)
        return ConicRep([(cn.soc(self.n + 1), (t + relax, *xs))], [], [])

    def sample_args(self, rng):
        xs = [rng.uniform(-2.0, 2.0) for _ in range(self.n)]
        return xs + [math.sqrt(sum(x * x for x in xs)) + rng.uniform(-1.5, 1.5)]


class LpNorm(ConvexAtom):
    """h = (sum |x_i|^p)^{1/p} - t, p > 1."""

    kind = "lpnorm"

    def __init__(self, n: int, p: float):
        if n < 1 or p <= 1.0:
            raise AtomError("lpnorm needs n >= 1, p > 1")
        self.n, self.p = n, float(p)

    @property
    def arity(self):
        return self.n + 1

    def params(self):
        return (self.n, self.p)

    def eval(self, args):
        return float(sum(abs(a) ** self.p for a in args[:-1]) ** (1.0 / self.p) - args[-1])

    def box_max(self, iv):
        return sum(_mag(lo, hi) ** self.p for lo, hi in iv[:-1]) ** (1.0 / self.p) - iv[-1][0]

    def _build(self, xs, t, relax, alloc):
        tr = t + relax
        us = [alloc() for _ in xs]
        slices = [(cn.pow3(1.0 / self.p), (u, tr, x)) for u, x in zip(us, xs)]
        total = LinExpr.ZERO
        for u in us:
            total = total + u
        return ConicRep(slices, [LinRow(total - tr, "eq")], alloc.created[-self.n:])

    def conify(self, bindings, relax, alloc):
        return self._build(bindings[:-1], bindings[-1], relax, alloc)

    def persp(self, bindings, lam, relax, alloc):
        return self._build([_pb(x, lam) for x in bindings[:-1]], _pb(bindings[-1], lam), relax, alloc)

    def completion(self, args, relax=0.0):
        xs, t = args[:-1], args[-1] + relax
        if t <= 0.0:
            # feasible only when x = 0 and t = 0; zeros witness either way
            return [0.0] * len(xs)
        us = [abs(x) ** self.p / t ** (self.p - 1.0) for x in xs]
        us[0] += t - sum(us)
        return us

    def persp_completion(self, args, lamv, relax=0.0):
        return self.completion(args, relax)

    def sample_args(self, rng):
        xs = [rng.uniform(-2.0, 2.0) for _ in range(self.n)]
        return xs + [self.eval(xs + [0.0]) + rng.uniform(-1.5, 1.5)]


class HarmonicMean(ConvexAtom):
    """h = t - n*(sum 1/x_i)^{-1}, x > 0, t >= 0 (hypograph of the harmonic
    mean; the cone representation requires a nonnegative t)."""

    kind = "harmonic"

    def __init__(self, n: int):
        if n < 1:
            raise AtomError("harmonic needs n >= 1")
        self.n = n

    @property
    def arity(self):
        return self.n + 1

    def params(self):
        return (self.n,)

    def hm(self, xs) -> float:
        for x in xs:
            _pos(x, "harmonic argument")
        return self.n / sum(1.0 / x for x in xs)

    def eval(self, args):
        t = args[-1]
        _pos(t, "harmonic epigraph slot", strict=False)
        return t - self.hm(args[:-1])

    def box_max(self, iv):
        if any(lo <= 0.0 for lo, _ in iv[:-1]):
            return math.inf
        return iv[-1][1] - self.hm([lo for lo, _ in iv[:-1]])

    def _build(self, xs, t, relax, alloc):
        tr = t - relax
        us = [alloc() for _ in xs]
        slices = [(cn.rsoc(3), (u, x, tr)) for u, x in zip(us, xs)]
        total = LinExpr.ZERO
        for u in us:
            total = total + u
        return ConicRep(slices, [LinRow(total - tr * (self.n / 2.0), "eq")], alloc.created[-self.n:])

    def conify(self, bindings, relax, alloc):
        return self._build(bindings[:-1], bindings[-1], relax, alloc)

    def persp(self, bindings, lam, relax, alloc):
        return self._build([_pb(x, lam) for x in bindings[:-1]], _pb(bindings[-1], lam), relax, alloc)

    def completion(self, args, relax=0.0):
        xs, t = args[:-1], args[-1] - relax
        us = [t * t / (2.0 * x) for x in xs]
        us[0] += self.n * t / 2.0 - sum(us)
        return us

    def persp_completion(self, args, lamv, relax=0.0):
        return self.completion(args, relax)

    def sample_args(self, rng):
        xs = [rng.uniform(0.1, 3.0) for _ in range(self.n)]
        return xs + [max(0.0, self.hm(xs) + rng.uniform(-1.0, 1.0))]


class _GeoMeanBase(ConvexAtom):
    """Shared power-cone chain for plain and weighted geometric means.

    h = |t| - prod x_i^{alpha_i}, x > 0. The chain seeds its accumulator with
    x_1 and threads partial weighted means through Power3 slices."""

    def _alphas(self) -> tuple[float, ...]:
        raise NotImplementedError

    @property
    def arity(self):
        return len(self._alphas()) + 1

    def gm(self, xs) -> float:
        for x in xs:
            _pos(x, f"{self.kind} argument")
        return math.exp(sum(a * math.log(x) for a, x in zip(self._alphas(), xs)))

    def eval(self, args):
        return abs(args[-1]) - self.gm(args[:-1])

    def box_max(self, iv):
        if any(lo < 0.0 for lo, _ in iv[:-1]):
            return math.inf  # domain requires x > 0; treat crossings as unbounded
        gm_lo = math.exp(
            sum(a * math.log(max(lo, 1e-300)) for a, (lo, _) in zip(self._alphas(), iv[:-1]))
        )
        return _mag(*iv[-1]) - gm_lo

    def _chain(self, xs, out, alloc):
        alphas = self._alphas()
        n = len(alphas)
        slices = []
        acc = xs[0]
        created = []
        for i in range(2, n + 1):
            beta = alphas[i - 1] / sum(alphas[:i])
            nxt = out if i == n else alloc()
            if i != n:
                created.append(alloc.created[-1])
            slices.append((cn.pow3(1.0 - beta), (acc, xs[i - 1], nxt)))
            acc = nxt
        return slices, created

    def _build(self, xs, t, relax, alloc, relax_structural: bool):
        if not relax_structural:
            slices, created = self._chain(xs, t, alloc)
            return ConicRep(slices, [], created)
        w = alloc()
        w_id = alloc.created[-1]
        slices, created = self._chain(xs, w, alloc)
        rows = [LinRow(t - w - relax, "le"), LinRow(-t - w - relax, "le")]
        return ConicRep(slices, rows, [w_id] + created)

    def conify(self, bindings, relax, alloc):
        return self._build(bindings[:-1], bindings[-1], relax, alloc, not relax.is_zero())

    def persp(self, bindings, lam, relax, alloc):
        xs = [_pb(x, lam) for x in bindings[:-1]]
        return self._build(xs, _pb(bindings[-1], lam), relax, alloc, not relax.is_zero())

    def _chain_values(self, xs) -> list[float]:
        alphas = self._alphas()
        n = len(alphas)
        vals = []
        for i in range(2, n):
            tot = sum(alphas[:i])
            vals.append(math.exp(sum(a / tot * math.log(x) for a, x in zip(alphas[:i], xs[:i]))))
        return vals

    def completion(self, args, relax=0.0, relax_structural=None):
        if relax_structural is None:
            relax_structural = relax != 0.0
        chain = self._chain_values(args[:-1])
        if not relax_structural:
            return chain
        return [self.gm(args[:-1])] + chain

    def persp_completion(self, args, lamv, relax=0.0):
        return self.completion(args, relax)

    def sample_args(self, rng):
        xs = [rng.uniform(0.1, 3.0) for _ in self._alphas()]
        g = self.gm(xs)
        return xs + [rng.choice([-1.0, 1.0]) * max(0.0, g + rng.uniform(-1.0, 1.0))]


class GeoMean(_GeoMeanBase):
    kind = "geomean"

    def __init__(self, n: int):
        if n < 2:
            raise AtomError("geomean needs n >= 2")
        self.n = n

    def params(self):
        return (self.n,)

    def _alphas(self):
        return tuple(1.0 / self.n for _ in range(self.n))


class WeightedGeoMean(_GeoMeanBase):
    kind = "wgeomean"

    def __init__(self, alphas: Sequence[float]):
        alphas = tuple(float(a) for a in alphas)
        if len(alphas) < 2 or any(a <= 0.0 for a in alphas) or abs(sum(alphas) - 1.0) > 1e-12:
            raise AtomError("wgeomean needs >= 2 positive weights summing to 1")
        self.alphas = alphas

    def params(self):
        return (self.alphas,)

    def _alphas(self):
        return self.alphas


# ---------------------------------------------------------------------------
# Module-level operations
# ---------------------------------------------------------------------------


def eval_atom(atom: ConvexAtom, point: Sequence[float]) -> float:
    """h(point); the constraint is satisfied iff the value is <= 0."""
    if len(point) != atom.arity:
        raise AtomError(f"{atom.kind}: expected {atom.arity} args, got {len(point)}")
    return atom.eval(list(map(float, point)))


def conify_atom(atom: ConvexAtom, bindings, relax=LinExpr.ZERO, alloc: AuxAlloc | None = None) -> ConicRep:
    """Conic representation of ``h(bindings) <= relax``."""
    bindings = tuple(as_expr(b) for b in bindings)
    if len(bindings) != atom.arity:
        raise AtomError(f"{atom.kind}: expected {atom.arity} bindings")
    return atom.conify(bindings, as_expr(relax), alloc or _counter_alloc())


def perspective_conify_atom(
    atom: ConvexAtom, bindings, y, relax=LinExpr.ZERO, alloc: AuxAlloc | None = None
) -> ConicRep:
    """Conic representation of ``y*h(bindings/y) - relax <= 0`` (closure)."""
    bindings = tuple(as_expr(b) for b in bindings)
    if len(bindings) != atom.arity:
        raise AtomError(f"{atom.kind}: expected {atom.arity} bindings")
    return atom.persp(bindings, as_expr(y), as_expr(relax), alloc or _counter_alloc())


def eval_perspective_closure(atom: ConvexAtom, point: Sequence[float], lam: float) -> float:
    """Closed perspective: lam*h(point/lam) for lam > 0; at lam = 0 the
    recession value (0 at the origin, +inf otherwise: all catalog domains are
    compact once boxed)."""
    if lam < 0.0:
        raise AtomError("lam must be nonnegative")
    if lam == 0.0:
        return 0.0 if all(v == 0.0 for v in point) else math.inf
    return lam * atom.eval([v / lam for v in point])


#: Representative instance of each of the 24 catalog rows.
def catalog() -> list[ConvexAtom]:
    return [
        Affine(),
        Square(),
        SumSquares(3),
        Reciprocal(),
        PowAbs(1.7),
        InvPow(2.3),
        RationalPow(7, 3),
        ExpFn(),
        NegLog(),
        InvLog(),
        XExpX(),
        ProdExponentials((2.0, 0.5, 3.0)),
        Softplus(),
        LogisticLoss((1.2, -0.7)),
        Entropy(),
        Log1PlusInv(),
        SocRobust(((1.0, 0.5), (-0.3, 1.1)), (0.2, -0.4), (0.8, 0.1), -2.5),
        LogSumExp(3),
        L1Norm(3),
        L2Norm(3),
        LpNorm(3, 3.0),
        HarmonicMean(3),
        GeoMean(3),
        WeightedGeoMean((0.2, 0.3, 0.5)),
    ]


_CTORS = {
    "affine": lambda p: Affine(),
    "square": lambda p: Square(),
    "sumsq": lambda p: SumSquares(int(p[0])),
    "recip": lambda p: Reciprocal(),
    "powabs": lambda p: PowAbs(float(p[0])),
    "invpow": lambda p: InvPow(float(p[0])),
    "ratpow": lambda p: RationalPow(int(p[0]), int(p[1])),
    "exp": lambda p: ExpFn(),
    "neglog": lambda p: NegLog(),
    "invlog": lambda p: InvLog(),
    "xexpx": lambda p: XExpX(),
    "prodexp": lambda p: ProdExponentials(p[0]),
    "softplus": lambda p: Softplus(),
    "logistic": lambda p: LogisticLoss(p[0]),
    "entropy": lambda p: Entropy(),
    "log1pinv": lambda p: Log1PlusInv(),
    "socrobust": lambda p: SocRobust(p[0], p[1], p[2], p[3]),
    "logsumexp": lambda p: LogSumExp(int(p[0])),
    "l1norm": lambda p: L1Norm(int(p[0])),
    "l2norm": lambda p: L2Norm(int(p[0])),
    "lpnorm": lambda p: LpNorm(int(p[0]), float(p[1])),
    "harmonic": lambda p: HarmonicMean(int(p[0])),
    "geomean": lambda p: GeoMean(int(p[0])),
    "wgeomean": lambda p: WeightedGeoMean(p[0]),
}


def atom_from_spec(kind: str, params: tuple) -> ConvexAtom:
    try:
        return _CTORS[kind](params)
    except KeyError:
        raise AtomError(f"unknown atom kind {kind!r}") from None
