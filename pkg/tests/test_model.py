import math

import pytest
from hypothesis import given, strategies as st

from conegdp import atoms as at
from conegdp.model import (
    BooleanVar,
    CnfClause,
    CnfFormula,
    ContinuousVar,
    Disjunct,
    Disjunction,
    GdpModel,
    LinExpr,
    ModelError,
    ScalarConstraint,
    model_summary,
    validate_gdp,
)


def two_disjunct_model(ub=10.0, cnf=False, dangling=False):
    x = LinExpr.var(0)
    ref = LinExpr.var(5) if dangling else x
    disj = Disjunction(
        0,
        (
            Disjunct(BooleanVar(0, 0), (ScalarConstraint(at.Affine(), (ref - 2.0,)),)),
            Disjunct(BooleanVar(0, 1), (ScalarConstraint(at.Affine(), (5.0 - x,)),)),
        ),
    )
    logic = CnfFormula(
        (CnfClause(negatives=frozenset({BooleanVar(0, 0)})),) if cnf else ()
    )
    return GdpModel(
        variables=(ContinuousVar(0, 0.0, ub),),
        objective=x,
        disjunctions=(disj,),
        logic=logic,
    )


class TestLinExpr:
    def test_normalization_drops_zeros(self):
        e = LinExpr({0: 1.0, 1: 0.0}, 2.0)
        assert e.terms == {0: 1.0}

    def test_arithmetic(self):
        e = LinExpr.var(0) * 2.0 + LinExpr.var(1) - 3.0
        assert e.evaluate([1.0, 5.0]) == 4.0

    @given(
        st.dictionaries(st.integers(0, 5), st.floats(-10, 10, allow_nan=False), max_size=4),
        st.dictionaries(st.integers(0, 5), st.floats(-10, 10, allow_nan=False), max_size=4),
        st.floats(-5, 5, allow_nan=False),
    )
    def test_add_evaluates_pointwise(self, t1, t2, c):
        a, b = LinExpr(t1, c), LinExpr(t2, -c)
        x = [1.5, -2.0, 0.25, 3.0, -1.0, 0.5]
        assert (a + b).evaluate(x) == pytest.approx(a.evaluate(x) + b.evaluate(x))

    @given(st.dictionaries(st.integers(0, 5), st.floats(-10, 10, allow_nan=False), max_size=4))
    def test_interval_contains_sample_values(self, terms):
        e = LinExpr(terms, 1.0)
        lower = [-1.0] * 6
        upper = [2.0] * 6
        lo, hi = e.interval(lower, upper)
        for x in ([0.0] * 6, [-1.0] * 6, [2.0] * 6, [1.0, -1.0, 2.0, 0.0, -0.5, 1.5]):
            assert lo - 1e-12 <= e.evaluate(x) <= hi + 1e-12

    def test_scale_constant_onto(self):
        e = LinExpr({0: 2.0}, 3.0)
        y = LinExpr.var(7)
        out = e.scale_constant_onto(y)
        assert out.terms == {0: 2.0, 7: 3.0} and out.constant == 0.0


class TestValidate:
    def test_well_formed_model_valid(self):
        rep = validate_gdp(two_disjunct_model())
        assert rep.valid and rep.issues == []

    def test_dangling_variable_reported(self):
        rep = validate_gdp(two_disjunct_model(dangling=True))
        assert not rep.valid
        assert any("dangling variable x5" in msg for msg in rep.errors)

    def test_unbounded_disjunct_var_warns_about_hull(self):
        rep = validate_gdp(two_disjunct_model(ub=math.inf))
        assert rep.valid  # warning, not error
        assert any("hull" in w for w in rep.warnings)

    def test_empty_disjunct_needs_flag(self):
        disj = Disjunction(
            0,
            (
                Disjunct(BooleanVar(0, 0)),
                Disjunct(BooleanVar(0, 1), explicitly_empty=True),
            ),
        )
        m = GdpModel(
            variables=(ContinuousVar(0, 0.0, 1.0),),
            objective=LinExpr.var(0),
            disjunctions=(disj,),
        )
        rep = validate_gdp(m)
        assert any("empty" in e for e in rep.errors)

    def test_idempotent_and_pure(self):
        m = two_disjunct_model()
        r1, r2 = validate_gdp(m), validate_gdp(m)
        assert r1.errors == r2.errors and r1.warnings == r2.warnings


class TestSummary:
    def test_counts_on_toy(self):
        s = model_summary(two_disjunct_model())
        assert (s.n_vars, s.n_disjunctions, s.n_disjuncts, s.n_booleans, s.n_global) == (
            1, 1, 2, 2, 0,
        )

    def test_empty_model_all_zero(self):
        m = GdpModel(variables=(), objective=LinExpr.ZERO)
        s = model_summary(m)
        assert (s.n_vars, s.n_disjunctions, s.n_disjuncts, s.n_booleans, s.n_global) == (
            0, 0, 0, 0, 0,
        )


class TestInvariants:
    def test_crossed_bounds_rejected(self):
        with pytest.raises(ModelError):
            ContinuousVar(0, 2.0, 1.0)

    def test_binding_arity_checked(self):
        with pytest.raises(ModelError):
            ScalarConstraint(at.Square(), (LinExpr.var(0),))

    def test_boolean_pairing_enforced(self):
        with pytest.raises(ModelError):
            Disjunction(0, (Disjunct(BooleanVar(1, 0), explicitly_empty=True),))
