import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mfold.maximal import WindowFamily
from mfold.measure import Grid, ScalarField, WeightField
from mfold.weights import (
    CONSTANT_CSV_HEADER,
    Constant,
    CounterexampleF,
    CounterexampleG,
    CounterexampleW2,
    Indicator,
    PiecewiseRandom,
    Power,
    ProductCombine,
    RandomSteps,
    a1_constant,
    ap_constant,
    apr_constant,
    combined_exponent,
    conjugate,
    cube_comparability,
    realize,
    rh_constant,
    spec_from_json,
    spec_to_json,
)
from oracles import weak_sup

weights_1d = st.integers(1, 6).flatmap(
    lambda k: st.lists(st.floats(0.05, 30), min_size=2 * k, max_size=2 * k)
).map(lambda v: WeightField(Grid(1, 1.0, len(v)), v))


def intervals(N):
    for a in range(N):
        for b in range(a + 1, N + 1):
            yield a, b


def ap_oracle(w, p):
    v, pp = w.values, conjugate(p)
    return max(v[a:b].mean() * (v[a:b] ** (1 - pp)).mean() ** (p - 1) for a, b in intervals(len(v)))


def apr_oracle(w, p):
    v, h = w.values, w.grid.cell_volume
    best = 0.0
    for a, b in intervals(len(v)):
        wq, q = v[a:b].sum() * h, (b - a) * h
        inner = 1 / v[a:b].min() if p == 1 else weak_sup(1 / v[a:b], v[a:b], h, conjugate(p))
        best = max(best, wq ** (1 / p) * inner / q)
    return best


class TestSpecs:
    def test_power_and_counterexample(self):
        g = Grid(1, 4.0, 8)
        w2 = realize(CounterexampleW2(2, 2), g).values
        r = np.abs(g.axis)
        assert np.allclose(w2[r >= 1], r[r >= 1] ** -2) and (w2[r < 1] == 1).all()
        assert CounterexampleW2(2, 4).exponent(2) == -6
        assert np.allclose(realize(Power(0.5), g).values, r**0.5)
        f, gg = realize(CounterexampleF(2), g).values, realize(CounterexampleG(2), g).values
        assert np.allclose(f * gg, (r >= 1).astype(float))

    def test_weight_types(self):
        g = Grid(1, 2.0, 8)
        assert isinstance(realize(Constant(2.0), g), WeightField)
        assert not isinstance(realize(Indicator(0, 1), g), WeightField)

    def test_piecewise_extends_with_domain(self):
        small, big = Grid.with_spacing(1, 4, 0.25), Grid.with_spacing(1, 8, 0.25)
        spec = PiecewiseRandom(7, 1.0, 16.0, 1.0)
        a, b = realize(spec, small).values, realize(spec, big).values
        assert np.array_equal(a, b[16:48])
        assert a.min() >= 1 and a.max() <= 16
        # constant on each unit block
        assert len(np.unique(a)) == 8

    def test_product_combine(self):
        g = Grid(1, 2.0, 8)
        w = realize(ProductCombine(Power(0.5), Constant(4.0), 2.0, 2.0), g).values
        assert np.allclose(w, np.abs(g.axis) ** 0.25 * 2.0)

    def test_json_roundtrip(self):
        for spec in (Constant(2.0), CounterexampleW2(2, 3), PiecewiseRandom(3),
                     ProductCombine(Power(0.2), Constant(1.0), 1.5, 3.0), RandomSteps(4, 5)):
            assert spec_from_json(spec_to_json(spec)) == spec
        with pytest.raises(ValueError):
            spec_from_json({"tag": "Nope"})

    def test_random_steps_seeded(self):
        g = Grid(2, 1.0, 8)
        assert np.array_equal(realize(RandomSteps(9), g).values, realize(RandomSteps(9), g).values)

    def test_exponents(self):
        assert combined_exponent(2, 2) == 1
        assert conjugate(2) == 2 and conjugate(1) == math.inf


class TestConstants:
    @pytest.mark.parametrize("grid", [Grid(1, 4.0, 16), Grid(2, 2.0, 8)])
    def test_unit_weight_is_one(self, grid):
        one = WeightField.ones(grid)
        for rep in (ap_constant(one, 2), ap_constant(one, 1.5), a1_constant(one), apr_constant(one, 2),
                    apr_constant(one, 1), rh_constant(one, 2)):
            assert rep.value == 1.0

    @given(weights_1d, st.sampled_from([1.5, 2.0, 3.0]))
    @settings(max_examples=40, deadline=None)
    def test_ap_oracle(self, w, p):
        assert math.isclose(ap_constant(w, p).value, ap_oracle(w, p), rel_tol=1e-12)

    @given(weights_1d, st.sampled_from([1.0, 1.5, 2.0, 3.0]))
    @settings(max_examples=40, deadline=None)
    def test_apr_oracle(self, w, p):
        assert math.isclose(apr_constant(w, p).value, apr_oracle(w, p), rel_tol=1e-12)

    @given(weights_1d, st.sampled_from([1.5, 2.0, 3.0]))
    @settings(max_examples=60, deadline=None)
    def test_apr_below_ap_root(self, w, p):
        assert apr_constant(w, p).value <= ap_constant(w, p).value ** (1 / p) * (1 + 1e-12)

    @given(weights_1d)
    @settings(max_examples=40, deadline=None)
    def test_lower_bounds(self, w):
        # every constant is >= 1 by Jensen / Holder on a single window
        for rep in (ap_constant(w, 2), a1_constant(w), apr_constant(w, 2), rh_constant(w, 3)):
            assert rep.value >= 1 - 1e-12

    def test_a1_oracle(self):
        w = WeightField(Grid(1, 1.0, 4), [1.0, 4.0, 1.0, 1.0])
        # at cell 0 the best interval is cells 0..1, average 2.5
        assert a1_constant(w).value == 2.5 and a1_constant(w).witness == (0, 0)

    def test_witness_and_csv(self):
        w = WeightField(Grid(1, 1.0, 4), [1.0, 9.0, 1.0, 1.0])
        rep = ap_constant(w, 2)
        lo, hi = rep.witness
        v = w.values[lo : hi + 1]
        assert math.isclose(v.mean() * (1 / v).mean(), rep.value)
        assert rep.family_size == 10
        assert len(rep.csv_row()) == len(CONSTANT_CSV_HEADER)

    def test_scale_invariance(self):
        w = realize(Power(0.7), Grid(1, 3.0, 12))
        for fn in (lambda v: ap_constant(v, 2), a1_constant, lambda v: apr_constant(v, 3), lambda v: rh_constant(v, 2)):
            assert math.isclose(fn(w * 5.0).value, fn(w).value, rel_tol=1e-12)

    def test_counterexample_apr_grows(self):
        vals = [apr_constant(realize(CounterexampleW2(2, 2), Grid.with_spacing(1, R, 1.0)), 2).value for R in (8, 16, 32)]
        assert vals[1] > 1.05 * vals[0] and vals[2] > 1.05 * vals[1]

    def test_invalid_exponents(self):
        w = WeightField.ones(Grid(1, 1.0, 4))
        for call in (lambda: ap_constant(w, 0.5), lambda: apr_constant(w, 0.9), lambda: rh_constant(w, 1.0)):
            with pytest.raises(ValueError):
                call()


class TestComparability:
    @given(weights_1d, st.floats(0.05, 30), st.floats(1, 4), st.floats(1, 4))
    @settings(max_examples=60, deadline=None)
    def test_holder_lower_bound(self, w1, scale, p1, p2):
        w2 = WeightField(w1.grid, np.roll(w1.values, 1) * scale)
        c = cube_comparability(w1, w2, p1, p2)
        assert c.min_ratio >= 1 - 1e-12
        assert c.max_ratio >= c.min_ratio

    def test_equal_weights_give_one(self):
        w = realize(Power(0.3), Grid(1, 2.0, 8))
        c = cube_comparability(w, w, 2.0, 3.0)
        assert math.isclose(c.min_ratio, 1.0, rel_tol=1e-13) and math.isclose(c.max_ratio, 1.0, rel_tol=1e-13)
