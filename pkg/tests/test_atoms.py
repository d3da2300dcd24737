import math

import numpy as np
import pytest

from conegdp import atoms as at
from conegdp import cones as cn
from conegdp.model import LinExpr

RNG = np.random.default_rng(7)
TOL = 1e-7


def rep_feasible(rep, point, tol=TOL):
    for cone, rows in rep.slices:
        z = np.array([r.evaluate(point) for r in rows])
        if not cn.membership(cone, z, tol):
            return False
    for row in rep.lin_rows:
        v = row.expr.evaluate(point)
        scale = max(1.0, abs(v))
        if row.sense == "le" and v > tol * scale:
            return False
        if row.sense == "eq" and abs(v) > tol * scale:
            return False
    return True


def check_equivalence(atom, samples=300):
    """h(z) <= 0 iff the conic representation admits the stored completion."""
    bindings = [LinExpr.var(i) for i in range(atom.arity)]
    checked = 0
    for _ in range(samples):
        args = atom.sample_args(RNG)
        try:
            h = at.eval_atom(atom, args)
        except at.DomainError:
            continue
        if abs(h) < 1e-6:
            continue  # resample away from the boundary at this tolerance
        checked += 1
        alloc = at._counter_alloc(atom.arity)
        rep = at.conify_atom(atom, bindings, alloc=alloc)
        point = list(args) + list(atom.completion(args))
        assert rep_feasible(rep, point) == (h <= 0), (atom.kind, args, h)
    assert checked >= samples // 2


def check_perspective(atom, samples=100):
    bindings = [LinExpr.var(i) for i in range(atom.arity)]
    for y in (0.1, 0.5, 1.0):
        checked = 0
        for _ in range(samples):
            args = atom.sample_args(RNG)
            try:
                pv = at.eval_perspective_closure(atom, args, y)
            except at.DomainError:
                continue
            if not math.isfinite(pv) or abs(pv) < 1e-6:
                continue
            checked += 1
            alloc = at._counter_alloc(atom.arity)
            rep = at.perspective_conify_atom(atom, bindings, LinExpr.const(y), alloc=alloc)
            try:
                point = list(args) + list(atom.persp_completion(args, y))
            except (at.DomainError, ValueError, OverflowError, ZeroDivisionError):
                continue
            assert rep_feasible(rep, point) == (pv <= 0), (atom.kind, y, args, pv)
        assert checked >= samples // 3


class TestEval:
    def test_square(self):
        assert at.eval_atom(at.Square(), [3.0, 9.0]) == pytest.approx(0.0)

    def test_exp(self):
        assert at.eval_atom(at.ExpFn(), [0.0, 1.0]) == pytest.approx(0.0)

    def test_entropy(self):
        assert at.eval_atom(at.Entropy(), [1.0, 0.0]) == pytest.approx(0.0)

    def test_domain_violation_raises(self):
        with pytest.raises(at.DomainError):
            at.eval_atom(at.NegLog(), [-1.0, 0.0])
        with pytest.raises(at.DomainError):
            at.eval_atom(at.InvLog(), [0.5, 1.0])


class TestConify:
    def test_square_row(self):
        rep = at.conify_atom(at.Square(), [LinExpr.var(0), LinExpr.var(1)])
        assert rep.aux_var_count == 0
        ((cone, rows),) = rep.slices
        assert cone == cn.rsoc(3)
        assert rows[0] == LinExpr.const(0.5)
        assert rows[1] == LinExpr.var(1)
        assert rows[2] == LinExpr.var(0)

    def test_softplus_rows(self):
        alloc = at._counter_alloc(2)
        rep = at.conify_atom(at.Softplus(), [LinExpr.var(0), LinExpr.var(1)], alloc=alloc)
        assert rep.aux_var_count == 2
        assert [c.variant for c, _ in rep.slices] == ["exp", "exp"]
        (u, v) = rep.aux
        # u + v <= 1
        assert rep.lin_rows[0].expr == LinExpr({u: 1.0, v: 1.0}, -1.0)
        # first slice: (u, 1, x - t)
        assert rep.slices[0][1][2] == LinExpr({0: 1.0, 1: -1.0})

    def test_reciprocal_row(self):
        rep = at.conify_atom(at.Reciprocal(), [LinExpr.var(0), LinExpr.var(1)])
        ((cone, rows),) = rep.slices
        assert cone == cn.rsoc(3)
        assert rows[2] == LinExpr.const(math.sqrt(2.0))
        assert rep.aux_var_count == 0

    def test_unsupported_parameter(self):
        with pytest.raises(at.AtomError):
            at.PowAbs(1.0)
        with pytest.raises(at.AtomError):
            at.RationalPow(2, 3)


class TestPerspectiveRep:
    def test_square_scales_half(self):
        rep = at.perspective_conify_atom(
            at.Square(), [LinExpr.var(0), LinExpr.var(1)], LinExpr.var(2)
        )
        ((cone, rows),) = rep.slices
        assert cone == cn.rsoc(3)
        assert rows[0] == LinExpr.var(2, 0.5)

    def test_exp_y_in_middle(self):
        rep = at.perspective_conify_atom(
            at.ExpFn(), [LinExpr.var(0), LinExpr.var(1)], LinExpr.var(2)
        )
        ((cone, rows),) = rep.slices
        assert cone == cn.exp_cone()
        assert rows == (LinExpr.var(1), LinExpr.var(2), LinExpr.var(0))

    def test_l2norm_identical_to_plain(self):
        bindings = [LinExpr.var(i) for i in range(4)]
        plain = at.conify_atom(at.L2Norm(3), bindings)
        persp = at.perspective_conify_atom(at.L2Norm(3), bindings, LinExpr.var(9))
        assert plain.slices == persp.slices


class TestPerspectiveClosure:
    def test_square_half(self):
        v = at.eval_perspective_closure(at.Square(), [2.0, 1.0], 0.5)
        assert v == pytest.approx(7.0)

    def test_origin_at_zero_lambda(self):
        for atom in at.catalog():
            assert at.eval_perspective_closure(atom, [0.0] * atom.arity, 0.0) == 0.0

    def test_nonzero_point_at_zero_lambda_is_inf(self):
        assert at.eval_perspective_closure(at.Square(), [1.0, 0.0], 0.0) == math.inf

    def test_lambda_one_reduces_to_h(self):
        v = at.eval_perspective_closure(at.ExpFn(), [1.0, 3.0], 1.0)
        assert v == pytest.approx(math.e - 3.0)


@pytest.mark.parametrize("atom", at.catalog(), ids=lambda a: a.kind)
class TestCatalogSampling:
    def test_scalar_conic_equivalence(self, atom):
        check_equivalence(atom, samples=120)

    def test_perspective_equivalence(self, atom):
        check_perspective(atom, samples=60)

    def test_lambda_one_reduction(self, atom):
        bindings = [LinExpr.var(i) for i in range(atom.arity)]
        for _ in range(40):
            args = atom.sample_args(RNG)
            try:
                h = at.eval_atom(atom, args)
            except at.DomainError:
                continue
            if abs(h) < 1e-6:
                continue
            rep = at.perspective_conify_atom(
                atom, bindings, LinExpr.const(1.0), alloc=at._counter_alloc(atom.arity)
            )
            try:
                point = list(args) + list(atom.persp_completion(args, 1.0))
            except (at.DomainError, ValueError, OverflowError):
                continue
            assert rep_feasible(rep, point) == (h <= 0)

    def test_homogeneity_of_perspective(self, atom):
        # (z, y) feasible => (lam*z, lam*y) feasible
        bindings = [LinExpr.var(i) for i in range(atom.arity)]
        done = 0
        for _ in range(60):
            if done >= 20:
                break
            args = atom.sample_args(RNG)
            try:
                if at.eval_perspective_closure(atom, args, 0.8) > -1e-6:
                    continue
            except at.DomainError:
                continue
            done += 1
            for lam in (0.25, 0.5, 1.0):
                v = at.eval_perspective_closure(atom, [a * lam for a in args], 0.8 * lam)
                assert v <= 1e-7 * max(1.0, abs(v))
        assert done > 0


class TestRelaxSlot:
    """Big-M relaxation threads through each atom's conic representation."""

    @pytest.mark.parametrize("atom", at.catalog(), ids=lambda a: a.kind)
    def test_relaxed_rep_encodes_h_le_relax(self, atom):
        bindings = [LinExpr.var(i) for i in range(atom.arity)]
        for _ in range(60):
            args = atom.sample_args(RNG)
            relax = float(RNG.uniform(0.0, 2.0))
            try:
                h = at.eval_atom(atom, args)
            except at.DomainError:
                continue
            if abs(h - relax) < 1e-6:
                continue
            alloc = at._counter_alloc(atom.arity)
            rep = at.conify_atom(atom, bindings, relax=LinExpr.const(relax), alloc=alloc)
            if atom.kind in ("geomean", "wgeomean"):
                comp = atom.completion(args, relax, relax_structural=True)
            else:
                comp = atom.completion(args, relax)
            point = list(args) + list(comp)
            assert rep_feasible(rep, point) == (h <= relax), (atom.kind, args, relax, h)
