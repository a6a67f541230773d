import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mfold.maximal import WindowFamily, calderon_maximal_1d, hl_maximal, m_tensor
from mfold.measure import Grid, ScalarField
from oracles import brute_calderon, brute_maximal_1d, brute_maximal_2d

ints = st.integers(0, 9).map(float)


@st.composite
def int_field(draw, max_half=40):
    N = 2 * draw(st.integers(1, max_half))
    return ScalarField(Grid(1, 1.0, N), draw(st.lists(ints, min_size=N, max_size=N)))


class TestWindowFamily:
    def test_all_intervals_count(self):
        wf = WindowFamily(Grid(1, 1.0, 10))
        assert wf.sizes == "all" and wf.size == 55

    def test_dyadic_sides(self):
        assert WindowFamily(Grid(1, 1.0, 12), "dyadic").side_lengths == [1, 2, 4, 8, 12]
        assert WindowFamily(Grid(2, 1.0, 8)).sizes == "dyadic"

    def test_sums_match_masks(self):
        rng = np.random.default_rng(0)
        for grid in (Grid(1, 1.0, 8), Grid(2, 1.0, 6)):
            wf = WindowFamily(grid)
            v = rng.random(grid.size)
            sums = wf.sums(v)
            for k in range(0, wf.size, 7):
                m = wf.mask(k)
                assert np.isclose(sums[k], v[m].sum())
                assert wf.cell_counts[k] == m.sum()
                a, b = wf.corners(k)
                assert m[a] and m[b] and np.flatnonzero(m)[0] == a and np.flatnonzero(m)[-1] == b

    def test_clipped_windows_stay_inside(self):
        wf = WindowFamily(Grid(2, 1.0, 6), "dyadic")
        assert (wf.cell_counts >= 1).all()

    def test_rejects_unknown(self):
        with pytest.raises(ValueError):
            WindowFamily(Grid(1, 1.0, 4), "odd")


class TestHardyLittlewood:
    @given(int_field())
    @settings(max_examples=60, deadline=None)
    def test_equals_brute_force_on_integers(self, f):
        # integer sums are exact and each average is one correctly rounded division
        assert np.array_equal(hl_maximal(f).values, brute_maximal_1d(f.values))

    def test_large_segments_use_hull(self):
        rng = np.random.default_rng(5)
        for N in (100, 256, 500):
            v = rng.pareto(1.0, N) * (rng.random(N) < 0.5)
            f = ScalarField(Grid(1, 1.0, N), v)
            assert np.allclose(hl_maximal(f).values, brute_maximal_1d(v), rtol=1e-13, atol=0)

    @given(st.integers(1, 4), st.data())
    @settings(max_examples=20, deadline=None)
    def test_2d_matches_brute(self, half, data):
        N = 2 * half
        vals = data.draw(st.lists(ints, min_size=N * N, max_size=N * N))
        grid = Grid(2, 1.0, N)
        wf = WindowFamily(grid, data.draw(st.sampled_from(["all", "dyadic"])))
        out = hl_maximal(ScalarField(grid, vals), wf).values.reshape(N, N)
        ref = brute_maximal_2d(np.reshape(vals, (N, N)), wf.side_lengths)
        assert np.allclose(out, ref, atol=1e-12)

    def test_indicator_decay(self):
        grid = Grid.with_spacing(1, 8.0, 0.125)
        chi = ScalarField(grid, ((grid.axis > 0) & (grid.axis < 1)).astype(float))
        M = hl_maximal(chi).values
        x = grid.axis
        far = x > 1.5
        # intervals [0, x + h/2] give 1/(x + h/2)
        assert np.allclose(M[far], 1 / (x[far] + grid.h / 2), rtol=1e-12)

    @given(int_field(max_half=20))
    @settings(max_examples=40, deadline=None)
    def test_dominates_and_bounded(self, f):
        M = hl_maximal(f).values
        assert (M >= f.values).all() and (M <= f.values.max()).all()

    def test_tensor(self):
        g = Grid(1, 1.0, 6)
        f, h = ScalarField(g, [0, 1, 0, 0, 2, 0]), ScalarField(g, [1, 0, 0, 0, 0, 3])
        assert np.array_equal(m_tensor(f, h).values, hl_maximal(f).values * hl_maximal(h).values)

    def test_grid_mismatch(self):
        with pytest.raises(ValueError):
            hl_maximal(ScalarField(Grid(1, 1.0, 4), [1, 2, 3, 4]), WindowFamily(Grid(1, 2.0, 4)))


class TestCalderon:
    def test_matches_brute(self):
        rng = np.random.default_rng(1)
        g = Grid(1, 1.0, 14)
        f, h = ScalarField(g, rng.random(14)), ScalarField(g, rng.random(14) * (rng.random(14) < 0.6))
        assert np.allclose(calderon_maximal_1d(f, h).values, brute_calderon(f.values, h.values), rtol=1e-13)

    def test_pointwise_upper_bound(self):
        rng = np.random.default_rng(2)
        g = Grid(1, 1.0, 20)
        f, h = ScalarField(g, rng.random(20)), ScalarField(g, rng.random(20))
        assert (calderon_maximal_1d(f, h).values <= f.values.max() * h.values.max() + 1e-15).all()

    def test_rejects_2d(self):
        g = Grid(2, 1.0, 4)
        with pytest.raises(ValueError):
            calderon_maximal_1d(ScalarField(g, np.ones(16)), ScalarField(g, np.ones(16)))
