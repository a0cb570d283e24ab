import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings, strategies as st

from lppgeo import (
    Direction,
    LatticeWindow,
    Sign,
    TO_ANCHOR,
    busemann_value,
    check_stabilized,
    cif_direction,
    competition_interface,
    coupled,
    find_jump_directions,
    horizon_busemann_field,
    jump_count_estimate,
    level_target,
    passage_times,
    sample_weight_field,
    stabilized_busemann_field,
    stationary_busemann_field,
)
from lppgeo.busemann import ScanResult


def xi1(alpha: float) -> float:
    return alpha**2 / (alpha**2 + (1 - alpha) ** 2)


def test_level_target_rounding_and_sign_cases():
    d = Direction(0.5)
    assert level_target(d, 100, Sign.NONE) == (50, 50)
    assert level_target(d, 100, Sign.MINUS) == (49, 51)
    assert level_target(d, 100, Sign.PLUS) == (50, 50)
    d = Direction(0.3)
    t = 100 * xi1(0.3)  # 15.5...
    assert level_target(d, 100, Sign.NONE) == (round(t), 100 - round(t))
    assert level_target(d, 100, Sign.MINUS) == (math.ceil(t) - 1, 100 - math.ceil(t) + 1)
    assert level_target(d, 100, Sign.PLUS) == (math.ceil(t), 100 - math.ceil(t))


def test_level_target_clamps_to_interior():
    assert level_target(Direction(0.01), 100, Sign.MINUS)[0] >= 1
    assert level_target(Direction(0.99), 100, Sign.PLUS)[0] <= 99
    with pytest.raises(ValueError):
        level_target(Direction(0.5), 1, Sign.NONE)


@given(alpha=st.floats(0.05, 0.95), n=st.integers(10, 5000))
@settings(max_examples=100)
def test_level_target_monotone_in_alpha_and_sign(alpha, n):
    d = Direction(alpha)
    vm = level_target(d, n, Sign.MINUS)
    v0 = level_target(d, n, Sign.NONE)
    vp = level_target(d, n, Sign.PLUS)
    assert vm[0] <= v0[0] <= vp[0]
    assert vp[0] - vm[0] == 1 or vp[0] == vm[0]  # clamped at the ends
    assert vm[0] + vm[1] == n


def test_stationary_field_exact_identities(small_window):
    f = sample_weight_field(small_window, 77)
    b = stationary_busemann_field(small_window, 0.4, f, boundary_seed=78)
    inner = ~(np.isnan(b.U) | np.isnan(b.V))
    # recovery holds exactly: the losing increment carries the site weight
    assert np.array_equal(
        np.minimum(b.U[inner], b.V[inner]), b.weights[inner])
    assert b._closure_residual() <= 1e-9


def test_stationary_field_marginal_laws():
    w = LatticeWindow(0, 199, 0, 199)
    f = sample_weight_field(w, 500)
    b = stationary_busemann_field(w, 0.35, f, boundary_seed=501)
    # increments are iid only along a single line; rows of U, columns of V
    u = b.U[:-1, 0]
    v = b.V[0, :-1]
    assert scipy.stats.kstest(u, "expon", args=(0, 1 / 0.35)).pvalue > 0.01
    assert scipy.stats.kstest(v, "expon", args=(0, 1 / 0.65)).pvalue > 0.01


def test_busemann_value_staircase_sum_and_cocycle(small_window):
    f = sample_weight_field(small_window, 12)
    b = stationary_busemann_field(small_window, 0.5, f, boundary_seed=13)
    # hand staircase (0,0) -> e2, e2 -> (0,2) -> e1 x3 -> (3,2)
    hand = (b.v_at(0, 0) + b.v_at(0, 1)
            + b.u_at(0, 2) + b.u_at(1, 2) + b.u_at(2, 2))
    assert busemann_value(b, (0, 0), (3, 2)) == pytest.approx(hand, abs=1e-9)
    # antisymmetry and additivity
    assert busemann_value(b, (3, 2), (0, 0)) == pytest.approx(-hand, abs=1e-9)
    ab = busemann_value(b, (1, 1), (4, 3))
    bc = busemann_value(b, (4, 3), (2, 6))
    assert busemann_value(b, (1, 1), (2, 6)) == pytest.approx(ab + bc, abs=1e-9)
    with pytest.raises(Exception):
        busemann_value(b, (0, 0), (99, 0))


def test_horizon_field_equals_passage_time_differences():
    # independent oracle: target-anchored passage times on the same weights
    d = Direction(0.45)
    n = 24
    tv = level_target(d, n, Sign.NONE)
    b = horizon_busemann_field(LatticeWindow(2, 6, 1, 4), [(d, Sign.NONE)], n, seed=3)[0]
    assert b.target == tv
    wf = sample_weight_field(LatticeWindow(0, tv[0], 0, tv[1]), 3)
    G = passage_times(wf, tv, TO_ANCHOR).values
    U = G[:-1, :] - G[1:, :]
    V = G[:, :-1] - G[:, 1:]
    assert np.allclose(b.U, U[2:7, 1:5], atol=1e-9)
    assert np.allclose(b.V, V[2:7, 1:5], atol=1e-9)


def test_horizon_fields_monotone_coupled_in_direction():
    win = LatticeWindow(0, 15, 0, 15)
    for seed in (0, 1, 2):
        lo, hi = horizon_busemann_field(
            win, [(Direction(0.3), Sign.NONE), (Direction(0.5), Sign.NONE)],
            512, seed)
        # more e1-ward direction gives smaller horizontal increments
        assert np.all(lo.U[~np.isnan(lo.U)] >= hi.U[~np.isnan(hi.U)] - 1e-12)
        assert np.all(lo.V[~np.isnan(lo.V)] <= hi.V[~np.isnan(hi.V)] + 1e-12)


def test_coupled_predicate():
    win = LatticeWindow(0, 5, 0, 5)
    pair = horizon_busemann_field(
        win, [(Direction(0.4), Sign.NONE), (Direction(0.6), Sign.NONE)], 64, 9)
    assert coupled(*pair)
    other = horizon_busemann_field(win, [(Direction(0.4), Sign.NONE)], 128, 9)[0]
    assert not coupled(pair[0], other)  # horizons differ
    f = sample_weight_field(win, 9)
    exact = stationary_busemann_field(win, 0.4, f, boundary_seed=10)
    assert not coupled(pair[0], exact)


def test_stabilized_field_honors_its_quiet_streak():
    win = LatticeWindow(0, 6, 0, 6)
    b = stabilized_busemann_field(win, Direction(0.5), Sign.NONE, seed=21,
                                  horizon0=64, horizon_cap=16384)
    if b.stabilized:
        # contract: the two doublings reaching b.horizon were both quiet
        for h in (b.horizon // 4, b.horizon // 2):
            earlier = horizon_busemann_field(
                win, [(Direction(0.5), Sign.NONE)], h, 21)[0]
            assert np.nanmax(np.abs(earlier.U - b.U)) <= 1e-8
            assert np.nanmax(np.abs(earlier.V - b.V)) <= 1e-8
        assert check_stabilized(
            win, Direction(0.5), Sign.NONE, b.horizon // 2, 21)
    else:
        assert b.horizon == 16384


def test_scan_telescopes_to_profile_drop():
    f = sample_weight_field(LatticeWindow(0, 0, 0, 0), 31)
    scan = find_jump_directions(((0, 0), (1, 0)), f, (0.25, 0.75), 512)
    # lattice targets bracket the requested range from outside
    assert scan.coverage[0] <= 0.25 and scan.coverage[1] >= 0.75
    alphas = [r.alpha_star for r in scan]
    assert alphas == sorted(alphas)
    for r in scan:
        assert r.bracket[0] < r.alpha_star < r.bracket[1]
        assert r.gap > 0
    # vertical edge scans step the other way
    scan_v = find_jump_directions(((0, 0), (0, 1)), f, (0.25, 0.75), 512)
    assert all(r.gap > 0 for r in scan_v)


def test_scan_gap_sum_matches_endpoint_increment_difference():
    # total scanned mass telescopes to the increment drop across the range
    f = sample_weight_field(LatticeWindow(0, 0, 0, 0), 47)
    n = 512
    lo_a, hi_a = 0.3, 0.7
    scan = find_jump_directions(((0, 0), (1, 0)), f, (lo_a, hi_a), n)
    from lppgeo.busemann import _fan_pair
    v1_lo = max(1, math.floor(n * xi1(lo_a)))
    v1_hi = min(n - 1, math.ceil(n * xi1(hi_a)))
    D = _fan_pair(f, (0, 0), (1, 0), n, v1_lo, v1_hi)
    assert sum(r.gap for r in scan) == pytest.approx(D[0] - D[-1], abs=1e-9)


def test_scan_rejects_bad_inputs(small_field):
    with pytest.raises(ValueError):
        find_jump_directions(((0, 0), (1, 1)), small_field, (0.2, 0.4), 128)
    with pytest.raises(ValueError):
        find_jump_directions(((0, 0), (1, 0)), small_field, (0.4, 0.2), 128)


def test_jump_count_estimate_void_formula():
    def scanlike(k):
        recs = []
        return ScanResult(recs if k == 0 else [None] * k,
                          ((0, 0), (1, 0)), 64, (0.2, 0.4), (0.2, 0.4), 9)

    scans = [scanlike(0), scanlike(2), scanlike(0), scanlike(1)]
    assert jump_count_estimate(scans) == pytest.approx(-math.log(0.5))
    with pytest.raises(ValueError):
        jump_count_estimate([])
    with pytest.raises(ValueError):
        jump_count_estimate([scanlike(3)])


def test_cif_direction_in_range_and_deterministic():
    f = sample_weight_field(LatticeWindow(0, 0, 0, 0), 0)
    grid = np.linspace(0.05, 0.95, 31)
    d1 = cif_direction((0, 0), f, grid, 256)
    d2 = cif_direction((0, 0), f, grid, 256)
    assert d1.alpha == d2.alpha
    assert 0.05 < d1.alpha < 0.95
    with pytest.raises(ValueError):
        cif_direction((0, 0), f, np.array([0.97, 0.98]), 256)


def test_competition_interface_path_geometry():
    f = sample_weight_field(LatticeWindow(0, 0, 0, 0), 8)
    ci = competition_interface((2, 3), f, 40)
    assert ci.root == (2, 3)
    assert ci.points[0] == (2.5, 3.5)
    assert len(ci.steps) == 39
    assert len(ci.points) == 40
    for p, q, s in zip(ci.points, ci.points[1:], ci.steps):
        assert (q[0] - p[0], q[1] - p[1]) == s
