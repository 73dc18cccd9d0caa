import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holdex import DataError
from holdex.seminorm import (
    BetaGrid,
    SemiNormCurve,
    Window,
    estimate_holder_by_jump,
    semi_norm,
    semi_norm_curve,
)
from holdex.testfuncs import weierstrass

from conftest import naive_semi_norm, random_window

TENT = Window([0.0, 1.0, 0.0], [0.0, 0.5, 1.0])


def test_constant_window_is_zero():
    w = Window([5, 5, 5, 5], [0.1, 0.2, 0.3, 0.4])
    assert semi_norm(w, 0.3) == 0.0
    assert np.all(semi_norm_curve(w).c_values == 0.0)


@pytest.mark.parametrize("beta", [0.01, 0.5, 1.0])
def test_single_pair_unit_gap(beta):
    assert semi_norm(Window([0, 1], [0, 1]), beta) == 1.0


def test_tent_beta_one():
    # pairs: 1/0.5, 1/0.5, 0/1
    assert semi_norm(TENT, 1.0) == 2.0


def test_tent_curve_closed_form():
    curve = semi_norm_curve(TENT, BetaGrid(4))
    np.testing.assert_allclose(curve.c_values, [2 ** 0.25, 2 ** 0.5, 2 ** 0.75, 2.0], rtol=1e-15)


def test_grid():
    g = BetaGrid(4)
    np.testing.assert_array_equal(g.betas, [0.25, 0.5, 0.75, 1.0])
    assert BetaGrid().n == 100 and BetaGrid().betas[-1] == 1.0
    with pytest.raises(DataError):
        BetaGrid(0)


@pytest.mark.parametrize("bad", [0.0, -0.1, 1.01])
def test_beta_out_of_range(bad):
    with pytest.raises(DataError):
        semi_norm(TENT, bad)


@pytest.mark.parametrize(
    "values, times",
    [([1.0], [0.1]), ([1, 2], [0.2, 0.1]), ([1, 2], [0.1, 0.1]), ([1, 2], [0.0, 1.5]), ([1, np.nan], [0, 1])],
)
def test_invalid_windows(values, times):
    with pytest.raises(DataError):
        Window(values, times)


def test_weierstrass_curve_jumps_near_half():
    t = np.arange(1, 1001) / 1000
    x = weierstrass(t)
    curve = semi_norm_curve(Window(x[:30], t[:30]), BetaGrid(100))
    assert 0.43 <= estimate_holder_by_jump(curve) <= 0.57


def test_jump_synthetic_curve():
    # log increments: 0, log(10/0.001), 0 -> largest between k=2 and k=3
    curve = SemiNormCurve(BetaGrid(4), np.array([0.001, 0.001, 10.0, 10.0]))
    assert estimate_holder_by_jump(curve) == 0.75


def test_jump_ties_go_to_smaller_k():
    curve = SemiNormCurve(BetaGrid(4), np.array([1.0, 10.0, 100.0, 1000.0]))
    assert estimate_holder_by_jump(curve) == 0.5


def test_jump_errors():
    with pytest.raises(DataError):
        estimate_holder_by_jump(SemiNormCurve(BetaGrid(4), np.zeros(4)))
    with pytest.raises(DataError):
        estimate_holder_by_jump(SemiNormCurve(BetaGrid(2), np.ones(2)))


def test_oracle_equivalence_random(rng):
    for _ in range(300):
        m = int(rng.integers(2, 51))
        v, t = random_window(rng, m)
        beta = float(rng.uniform(0.01, 1.0))
        assert semi_norm(Window(v, t), beta) == naive_semi_norm(v, t, beta)


def test_curve_matches_pointwise(rng):
    v, t = random_window(rng, 25)
    w = Window(v, t)
    grid = BetaGrid(20)
    curve = semi_norm_curve(w, grid)
    assert [semi_norm(w, b) for b in grid.betas] == curve.c_values.tolist()


windows = st.integers(2, 40).flatmap(
    lambda m: st.tuples(
        st.lists(st.floats(-1e3, 1e3), min_size=m, max_size=m),
        st.lists(st.integers(1, 1000), min_size=m, max_size=m, unique=True),
    )
)


@settings(max_examples=200, deadline=None)
@given(windows)
def test_curve_nondecreasing(data):
    values, ticks = data
    w = Window(values, np.sort(ticks) / 1000.0)
    c = semi_norm_curve(w, BetaGrid(50)).c_values
    assert np.all(np.diff(c) >= 0)
    assert np.all(np.isfinite(c)) and np.all(c >= 0)


@settings(max_examples=100, deadline=None)
@given(windows, st.floats(0.01, 100.0), st.floats(-1e3, 1e3))
def test_scaling_and_translation(data, scale, shift):
    values, ticks = data
    values = np.array(values)
    times = np.sort(ticks) / 1000.0
    grid = BetaGrid(10)
    base = semi_norm_curve(Window(values, times), grid).c_values
    scaled = semi_norm_curve(Window(values * scale, times), grid).c_values
    shifted = semi_norm_curve(Window(values + shift, times), grid).c_values
    np.testing.assert_allclose(scaled, base * scale, rtol=1e-12, atol=1e-9)
    np.testing.assert_allclose(shifted, base, rtol=1e-9, atol=1e-6)
