import math

import numpy as np
import pytest

from conegdp import cones as cn

RNG = np.random.default_rng(20240811)


def rand_interior(cone, rng, spread=2.0):
    v = cone.variant
    if v == "nonneg":
        return rng.uniform(0.1, spread, cone.dim)
    if v == "soc":
        t = rng.uniform(-1, 1, cone.dim - 1)
        return np.concatenate(([np.linalg.norm(t) * rng.uniform(1.05, spread) + 0.1], t))
    if v == "rsoc":
        t = rng.uniform(-1, 1, cone.dim - 2)
        z2 = rng.uniform(0.2, spread)
        z1 = (t @ t) / (2 * z2) * rng.uniform(1.05, spread) + 0.1
        return np.concatenate(([z1, z2], t))
    if v == "exp":
        z2 = rng.uniform(0.2, spread)
        z3 = rng.uniform(-1.0, 1.0)
        return np.array([z2 * math.exp(z3 / z2) * rng.uniform(1.05, spread) + 0.05, z2, z3])
    if v == "dexp":
        z3 = -rng.uniform(0.2, spread)
        z2 = rng.uniform(-1.0, 1.0)
        return np.array([-z3 * math.exp(z2 / z3 - 1.0) * rng.uniform(1.05, spread) + 0.05, z2, z3])
    if v == "pow3":
        a = cone.alpha
        z1, z2 = rng.uniform(0.2, spread, 2)
        return np.array([z1, z2, rng.uniform(-0.95, 0.95) * z1**a * z2 ** (1 - a)])
    if v == "dpow3":
        a = cone.alpha
        z1, z2 = rng.uniform(0.2, spread, 2)
        cap = (z1 / a) ** a * (z2 / (1 - a)) ** (1 - a)
        return np.array([z1, z2, rng.uniform(-0.95, 0.95) * cap])
    if v in ("powk", "dpowk"):
        l = len(cone.alphas)
        head = rng.uniform(0.3, spread, l)
        prod = 1.0
        for zi, ai in zip(head, cone.alphas):
            prod *= (zi / (ai if v == "dpowk" else 1.0)) ** ai
        tail = rng.uniform(-1, 1, cone.dim - l)
        tail *= rng.uniform(0.0, 0.95) * prod / max(np.linalg.norm(tail), 1e-9)
        return np.concatenate([head, tail])
    raise AssertionError(v)


class TestMembership:
    def test_soc_boundary(self):
        assert cn.membership(cn.soc(3), [5.0, 3.0, 4.0], 1e-9)
        assert not cn.membership(cn.soc(3), [4.999, 3.0, 4.0], 1e-9)

    def test_exp_boundary_and_exterior(self):
        assert cn.membership(cn.exp_cone(), [math.e, 1.0, 1.0], 1e-9)
        assert not cn.membership(cn.exp_cone(), [1.0, 1.0, 1.0], 1e-9)

    def test_rsoc_encodes_square_epigraph(self):
        # x^2 <= t at x = 3, t = 9 via the (0.5, t, x) slice
        assert cn.membership(cn.rsoc(3), [0.5, 9.0, 3.0], 1e-9)
        assert not cn.membership(cn.rsoc(3), [0.5, 8.99, 3.0], 1e-9)

    def test_exp_closure_at_zero_second_coordinate(self):
        assert cn.membership(cn.exp_cone(), [1.0, 0.0, -2.0], 1e-9)
        assert not cn.membership(cn.exp_cone(), [1.0, 0.0, 0.5], 1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(cn.ConeError):
            cn.membership(cn.soc(3), [1.0, 2.0], 1e-9)

    @pytest.mark.parametrize("cone", [
        cn.nonneg(4), cn.soc(4), cn.rsoc(4), cn.exp_cone(), cn.pow3(0.3),
        cn.powk((0.2, 0.8), 4),
    ])
    def test_conic_scaling(self, cone):
        for _ in range(40):
            z = rand_interior(cone, RNG)
            assert cn.membership(cone, z, 1e-9)
            for lam in (0.0, 0.5, 1.0, 7.0):
                assert cn.membership(cone, lam * z, 1e-9)


class TestDual:
    def test_symmetric_self_dual(self):
        assert cn.dual(cn.soc(4)) == cn.soc(4)
        assert cn.dual(cn.nonneg(2)) == cn.nonneg(2)
        assert cn.dual(cn.rsoc(5)) == cn.rsoc(5)

    def test_exp_dual_descriptor_round_trips(self):
        d = cn.dual(cn.exp_cone())
        assert d.variant == "dexp"
        assert cn.dual(d) == cn.exp_cone()

    @pytest.mark.parametrize("cone", [cn.exp_cone(), cn.pow3(0.4), cn.pow3(0.85)])
    def test_dual_pairing_by_sampling(self, cone):
        # 200 (z, u) pairs: every primal-dual product is nonnegative
        dual = cn.dual(cone)
        for _ in range(200):
            z = rand_interior(cone, RNG)
            u = rand_interior(dual, RNG)
            assert float(z @ u) >= 0.0


class TestBarrier:
    def test_nonneg_values(self):
        be = cn.barrier(cn.nonneg(2), [1.0, 1.0])
        assert be.value == pytest.approx(0.0)
        assert be.gradient == pytest.approx([-1.0, -1.0])

    def test_soc_hand_derivative(self):
        be = cn.barrier(cn.soc(3), [2.0, 0.0, 0.0])
        assert be.value == pytest.approx(-math.log(4.0))
        assert be.gradient == pytest.approx([-1.0, 0.0, 0.0])

    def test_boundary_rejected(self):
        with pytest.raises(cn.ConeError):
            cn.barrier(cn.soc(3), [1.0, 1.0, 0.0])

    @pytest.mark.parametrize("cone", [
        cn.nonneg(3), cn.soc(4), cn.rsoc(4), cn.exp_cone(), cn.pow3(0.3), cn.pow3(0.71),
    ])
    def test_gradient_hessian_match_finite_differences(self, cone):
        # full 500-point sweep lives in the acceptance suite
        h = 1e-6
        for _ in range(60):
            z = rand_interior(cone, RNG)
            if cn.interior_margin(cone, z) < 1e-4:
                continue
            be = cn.barrier(cone, z)
            for i in range(cone.dim):
                e = np.zeros(cone.dim)
                e[i] = h * max(1.0, abs(z[i]))
                fp = cn.barrier(cone, z + e).value
                fm = cn.barrier(cone, z - e).value
                fd = (fp - fm) / (2 * e[i])
                assert fd == pytest.approx(be.gradient[i], rel=1e-5, abs=1e-7)
                gp = cn.barrier(cone, z + e).gradient
                gm = cn.barrier(cone, z - e).gradient
                fd_row = (gp - gm) / (2 * e[i])
                assert np.allclose(fd_row, be.hessian[i], rtol=1e-4, atol=1e-5)

    def test_exp_gradient_spec_point(self):
        z = np.array([math.e**2, 1.0, 1.0])
        be = cn.barrier(cn.exp_cone(), z)
        h = 1e-7
        for i in range(3):
            e = np.zeros(3)
            e[i] = h * max(1.0, abs(z[i]))
            fd = (cn.barrier(cn.exp_cone(), z + e).value - cn.barrier(cn.exp_cone(), z - e).value) / (2 * e[i])
            assert abs(fd - be.gradient[i]) <= 1e-6 * max(1.0, abs(be.gradient[i]))


class TestRotation:
    def test_soc_rsoc_rotation_identity(self):
        r3 = cn.rotation_matrix(3)
        for _ in range(100):
            z = RNG.uniform(-2, 2, 3)
            lhs = cn.membership(cn.soc(3), z, 1e-9)
            rhs = cn.membership(cn.rsoc(3), r3 @ z, 1e-9)
            assert lhs == rhs


class TestPowerDecomposition:
    def test_base_case_l2(self):
        cone = cn.powk((0.5, 0.5), 3)
        parts = cn.decompose_power(cone, list("abc"), _alloc())
        kinds = [p[0].variant for p in parts]
        assert kinds == ["soc", "pow3"]
        assert parts[0][0].dim == 2
        assert parts[1][0].alpha == pytest.approx(0.5)

    def test_renormalized_exponent(self):
        cone = cn.powk((0.2, 0.3, 0.5), 5)
        parts = cn.decompose_power(cone, list("abcde"), _alloc())
        # last chain link carries alpha_2/(alpha_2+alpha_3) = 0.375
        assert parts[-1][0].alpha == pytest.approx(0.3 / 0.8)

    def test_completion_feasible_on_100_samples(self):
        cone = cn.powk((0.2, 0.3, 0.5), 5)
        alloc = _alloc()
        parts = cn.decompose_power(cone, [("z", i) for i in range(5)], alloc)
        for _ in range(100):
            z = rand_interior(cone, RNG)
            aux = cn.power_completion(cone, z)
            values = {("z", i): z[i] for i in range(5)}
            values.update({("aux", i): aux[i] for i in range(len(aux))})
            for cone_i, rows in parts:
                vec = [values[r] for r in rows]
                assert cn.membership(cone_i, vec, 1e-9)


class TestPowerExpLimit:
    def test_small_alpha_matches_exp(self):
        alpha = 1e-6
        cone = cn.pow3(alpha)
        hits = 0
        for _ in range(300):
            z = rand_interior(cn.exp_cone(), RNG)
            if abs(cn.interior_margin(cn.exp_cone(), z)) < 1e-3:
                continue
            hits += 1
            mapped = np.array([z[0], z[1], z[1] + alpha * z[2]])
            assert cn.membership(cone, mapped, 1e-9) == cn.membership(cn.exp_cone(), z, 1e-9)
        assert hits > 100


def _alloc():
    count = [0]

    def nxt():
        count[0] += 1
        return ("aux", count[0] - 1)

    return nxt
