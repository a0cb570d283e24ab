"""Geodesic / dual / instability graph structure, plus TSV round trips."""

import numpy as np
import pytest

from lppgeo import (
    BusemannField,
    BusemannMode,
    Direction,
    DualGraph,
    GeodesicGraph,
    InstabilityGraph,
    LatticeWindow,
    Sign,
    busemann_value,
    classify_points,
    coalescence_point,
    dual_graph,
    flow_check,
    follow_geodesic,
    geodesic_graph,
    horizon_busemann_field,
    instability_graph,
    interval_mass,
    island_components,
    read_edges_tsv,
    sample_weight_field,
    stationary_busemann_field,
    write_edges_tsv,
)


def handmade_field(f, g, sign=Sign.NONE):
    """Increment field from a separable potential phi(i,j) = f[i] + g[j].

    U rows repeat the f-increments, V columns the g-increments, so the
    cocycle closes exactly and recovery pins the weights to min(U, V).
    Last row of U and last column of V are unavailable, like a field built
    toward a finite target.
    """
    n = len(f) - 1
    w = LatticeWindow(0, n, 0, n)
    U = np.full((n + 1, n + 1), np.nan)
    V = np.full((n + 1, n + 1), np.nan)
    U[:-1, :] = np.diff(f)[:, None]
    V[:, :-1] = np.diff(g)[None, :]
    weights = np.where(np.isnan(U) | np.isnan(V), 1.0, np.fmin(U, V))
    return BusemannField(
        direction=Direction(0.5),
        sign=sign,
        mode=BusemannMode.HORIZON,
        window=w,
        U=U,
        V=V,
        weights=weights,
        horizon=4,
        env_seed=0,
    )


@pytest.fixture(scope="module")
def bracket_pair():
    w = LatticeWindow(0, 20, 0, 20)
    return horizon_busemann_field(
        w, [(Direction(0.40), Sign.NONE), (Direction(0.60), Sign.NONE)], 512, 0
    )


class TestGeodesicGraph:
    def test_step_coding_from_handmade_field(self):
        # f-increments 1, 3 against g-increments 2, 2: e1 wins on row 0,
        # e2 on row 1, margins undefined
        g = geodesic_graph(handmade_field([0, 1, 4], [0, 2, 4]))
        expect = np.array([[1, 1, 0], [2, 2, 0], [0, 0, 0]], dtype=np.int8)
        assert np.array_equal(g.step, expect)
        assert g.step_at(0, 1) == 1
        assert g.tie_count == 0

    def test_exact_ties_follow_the_sign_tag(self):
        f = [0.0, 1.0, 2.0]
        gm = geodesic_graph(handmade_field(f, f, sign=Sign.MINUS))
        gp = geodesic_graph(handmade_field(f, f, sign=Sign.PLUS))
        assert np.all(gm.step[:2, :2] == 2)
        assert np.all(gp.step[:2, :2] == 1)
        assert gm.tie_count == 4 and gp.tie_count == 4

    def test_follow_geodesic_stops_where_steps_run_out(self):
        g = geodesic_graph(handmade_field([0, 1, 4], [0, 2, 4]))
        assert follow_geodesic(g, (0, 0)) == [(0, 0), (1, 0), (1, 1), (1, 2)]
        assert follow_geodesic(g, (0, 0), max_steps=1) == [(0, 0), (1, 0)]
        assert follow_geodesic(g, (2, 2)) == [(2, 2)]

    def test_real_field_steps_match_increment_comparison(self, bracket_pair):
        b = bracket_pair[0]
        g = geodesic_graph(b)
        defined = ~np.isnan(b.U) & ~np.isnan(b.V)
        assert np.array_equal(g.step == 1, defined & (b.U < b.V))
        assert np.array_equal(g.step == 2, defined & (b.U > b.V))
        assert np.array_equal(g.step == 0, ~defined)


class TestCoalescence:
    def test_handmade_merge(self):
        g = geodesic_graph(handmade_field([0, 1, 4], [0, 2, 4]))
        r = coalescence_point((0, 0), (0, 1), g)
        assert r.coalesced and r.site == (1, 1) and not r.censored

    def test_censored_when_a_path_runs_out(self):
        g = geodesic_graph(handmade_field([0, 1, 4], [0, 2, 4]))
        r = coalescence_point((2, 0), (0, 0), g)
        assert not r.coalesced and r.censored
        assert r.exit_sites == ((2, 0),)

    def test_stationary_field_first_common_site(self):
        wf = sample_weight_field(LatticeWindow(0, 39, 0, 39), 2024)
        g = geodesic_graph(stationary_busemann_field(wf.window, 0.5, wf, 777))
        r = coalescence_point((0, 0), (3, 0), g)
        assert r.site == (3, 5) and not r.censored
        # the reported site is the first one shared by the two followed paths
        p0 = follow_geodesic(g, (0, 0))
        shared = set(follow_geodesic(g, (3, 0)))
        assert next(s for s in p0 if s in shared) == r.site


class TestDualGraph:
    def test_steps_copied_and_edges_reversed(self):
        g = geodesic_graph(handmade_field([0, 1, 4], [0, 2, 4]))
        d = dual_graph(g)
        assert np.array_equal(d.step, g.step)
        assert set(d.edges()) == {
            ((0, 0), (-1, 0)),
            ((0, 1), (-1, 1)),
            ((1, 0), (1, -1)),
            ((1, 1), (1, 0)),
        }

    def test_one_dual_edge_per_primal_edge(self, bracket_pair):
        g = geodesic_graph(bracket_pair[0])
        assert len(list(dual_graph(g).edges())) == int(np.sum(g.step != 0))


class TestIntervalMass:
    def test_edge_signs_and_additivity(self, bracket_pair):
        b_lo, b_hi = bracket_pair
        for x in [(0, 0), (5, 7), (12, 3)]:
            h = interval_mass(x, (x[0] + 1, x[1]), b_lo, b_hi)
            v = interval_mass(x, (x[0], x[1] + 1), b_lo, b_hi)
            assert h <= 1e-12 and v >= -1e-12
            corner = interval_mass(x, (x[0] + 1, x[1] + 1), b_lo, b_hi)
            via_e1 = h + interval_mass(
                (x[0] + 1, x[1]), (x[0] + 1, x[1] + 1), b_lo, b_hi
            )
            assert corner == pytest.approx(via_e1, abs=1e-9)
            assert v == pytest.approx(
                busemann_value(b_hi, x, (x[0], x[1] + 1))
                - busemann_value(b_lo, x, (x[0], x[1] + 1)),
                abs=1e-12,
            )

    def test_uncoupled_pairs_are_rejected(self, bracket_pair):
        b_lo, b_hi = bracket_pair
        other = horizon_busemann_field(
            b_lo.window, [(Direction(0.60), Sign.NONE)], 512, 1
        )[0]
        with pytest.raises(ValueError, match="not coupled"):
            interval_mass((0, 0), (1, 0), b_lo, other)
        with pytest.raises(ValueError, match="out of order"):
            interval_mass((0, 0), (1, 0), b_hi, b_lo)

    def test_degenerate_interval_needs_one_sided_signs(self):
        w = LatticeWindow(0, 6, 0, 6)
        plus, minus = horizon_busemann_field(
            w, [(Direction(0.5), Sign.PLUS), (Direction(0.5), Sign.MINUS)], 64, 9
        )
        interval_mass((0, 0), (1, 0), minus, plus)  # accepted
        with pytest.raises(ValueError, match="degenerate interval"):
            interval_mass((0, 0), (1, 0), plus, minus)


class TestInstabilityGraph:
    def test_frozen_census(self, bracket_pair):
        ig = instability_graph(*bracket_pair)
        assert ig.n_edges == 316
        assert ig.total_mass == pytest.approx(613.5392067486019, rel=1e-12)
        assert ig.interval == (0.40, 0.60)

    def test_masses_are_the_increment_differences(self, bracket_pair):
        b_lo, b_hi = bracket_pair
        ig = instability_graph(b_lo, b_hi)
        pos = ig.south_mass > 0
        assert np.array_equal(ig.south_mass[pos], (b_lo.U - b_hi.U)[pos])
        assert np.all(ig.west_mass[ig.west_mass > 0] > 0)
        # unavailable increments stay unavailable, never zero-filled
        assert np.array_equal(np.isnan(ig.south_mass), np.isnan(b_lo.U - b_hi.U))

    def test_vertices_are_the_edge_endpoints(self, bracket_pair):
        ig = instability_graph(*bracket_pair)
        endpoints = set()
        for fr, to, mass in ig.edges():
            assert mass > 0
            endpoints.add(fr)
            endpoints.add(to)
        assert ig.vertices() == endpoints

    def test_vertex_censoring_tracks_the_margin(self, bracket_pair):
        ig = instability_graph(*bracket_pair)
        assert ig.vertex_censored((20, 3))
        assert not ig.vertex_censored((5, 5))


class TestClassifyPoints:
    def test_classes_match_a_direct_scan(self, bracket_pair):
        ig = instability_graph(*bracket_pair)
        pc = classify_points(ig)
        south = ig.south_mass > 0
        west = ig.west_mass > 0
        w = ig.window
        branch, coalesce = set(), set()
        for i in range(w.nx):
            for j in range(w.ny):
                x = (w.x_min + i, w.y_min + j)
                if south[i, j] and west[i, j]:
                    branch.add(x)
                if (
                    i + 1 < w.nx
                    and j + 1 < w.ny
                    and south[i, j + 1]
                    and west[i + 1, j]
                ):
                    coalesce.add(x)
        assert pc.branch == branch
        assert pc.coalesce == coalesce
        assert branch and coalesce  # census is nontrivial at this scale

    def test_cif_cross_check_flags_mismatches(self, bracket_pair):
        ig = instability_graph(*bracket_pair)
        pc0 = classify_points(ig)
        some_branch = min(pc0.branch)
        non_branch = next(
            (x, y)
            for x in range(21)
            for y in range(21)
            if (x, y) not in pc0.branch
        )
        cif = {some_branch: Direction(0.5), non_branch: Direction(0.5)}
        pc = classify_points(ig, cif_map=cif)
        assert (non_branch, 0.5, "nonbranch-inside") in pc.cif_violations
        assert all(v[0] != some_branch for v in pc.cif_violations)
        # a branch point whose interface direction left the interval is flagged
        pc2 = classify_points(ig, cif_map={some_branch: Direction(0.95)})
        assert pc2.cif_violations == [(some_branch, 0.95, "branch-outside")]

    def test_ancestors_flow_into_the_vertex(self, bracket_pair):
        ig = instability_graph(*bracket_pair)
        pc = classify_points(ig)
        v = min(pc.coalesce)
        anc = pc.ancestors(v)
        assert v not in anc
        south = ig.south_mass > 0
        w = ig.window
        north = (v[0], v[1] + 1)
        if south[north[0] - w.x_min, north[1] - w.y_min]:
            assert north in anc


class TestIslands:
    def test_components_partition_the_window(self, bracket_pair):
        g_lo = geodesic_graph(bracket_pair[0])
        g_hi = geodesic_graph(bracket_pair[1])
        comps = island_components(g_lo, g_hi)
        assert sum(c.size for c in comps) == 21 * 21
        seen = set()
        for c in comps:
            sites = c.sites()
            assert len(sites) == c.size
            assert c.terminal in sites
            assert seen.isdisjoint(sites)
            seen.update(sites)

    def test_terminals_split_by_disagreement(self, bracket_pair):
        g_lo = geodesic_graph(bracket_pair[0])
        g_hi = geodesic_graph(bracket_pair[1])
        w = g_lo.window
        for c in island_components(g_lo, g_hi):
            i, j = w.index(*c.terminal)
            a, b = g_lo.step[i, j], g_hi.step[i, j]
            if c.censored:
                assert a == 0 or b == 0 or a == b
            else:
                assert a != 0 and b != 0 and a != b

    def test_members_flow_to_their_terminal(self, bracket_pair):
        g_lo = geodesic_graph(bracket_pair[0])
        g_hi = geodesic_graph(bracket_pair[1])
        w = g_lo.window
        agree = (g_lo.step == g_hi.step) & (g_lo.step != 0)
        for c in island_components(g_lo, g_hi):
            if c.size < 2:
                continue
            for site in c.sites()[:5]:
                i, j = w.index(*site)
                while (site != c.terminal) and agree[i, j]:
                    if g_lo.step[i, j] == 1:
                        i += 1
                    else:
                        j += 1
                    site = (w.x_min + i, w.y_min + j)
                assert site == c.terminal

    def test_window_mismatch_rejected(self, bracket_pair):
        g_lo = geodesic_graph(bracket_pair[0])
        other = GeodesicGraph(
            direction=g_lo.direction,
            sign=g_lo.sign,
            window=LatticeWindow(0, 3, 0, 3),
            step=np.zeros((4, 4), dtype=np.int8),
        )
        with pytest.raises(ValueError, match="one window"):
            island_components(g_lo, other)


class TestFlow:
    def test_mass_is_conserved_at_interior_dual_sites(self, bracket_pair):
        rep = flow_check(*bracket_pair)
        assert rep.n_sites == 400
        assert rep.max_residual < 1e-9
        assert rep.min_out_mass > -1e-9
        assert rep.diag_max_residual < 1e-9
        assert rep.ok()

    def test_rejects_uncoupled(self, bracket_pair):
        lone = horizon_busemann_field(
            bracket_pair[0].window, [(Direction(0.40), Sign.NONE)], 512, 5
        )[0]
        with pytest.raises(ValueError, match="not coupled"):
            flow_check(lone, bracket_pair[1])


class TestEdgeListFiles:
    def test_geodesic_round_trip(self, bracket_pair, tmp_path):
        g = geodesic_graph(bracket_pair[0])
        p = tmp_path / "geo.tsv"
        write_edges_tsv(g, p)
        back = read_edges_tsv(p)
        assert isinstance(back, GeodesicGraph)
        assert np.array_equal(back.step, g.step)
        assert back.direction.alpha == g.direction.alpha
        assert back.sign == g.sign
        assert back.window == g.window

    def test_dual_round_trip(self, bracket_pair, tmp_path):
        d = dual_graph(geodesic_graph(bracket_pair[1]))
        p = tmp_path / "dual.tsv"
        write_edges_tsv(d, p)
        back = read_edges_tsv(p)
        assert isinstance(back, DualGraph)
        assert np.array_equal(back.step, d.step)

    def test_instability_round_trip_keeps_masses_exactly(
        self, bracket_pair, tmp_path
    ):
        ig = instability_graph(*bracket_pair)
        p = tmp_path / "inst.tsv"
        write_edges_tsv(ig, p)
        back = read_edges_tsv(p)
        assert isinstance(back, InstabilityGraph)
        assert back.interval == ig.interval
        assert back.window == ig.window
        # 17 significant digits round-trip doubles exactly; unknown margins
        # come back as zero
        assert np.array_equal(
            back.south_mass, np.where(ig.south_mass > 0, ig.south_mass, 0.0)
        )
        assert np.array_equal(
            back.west_mass, np.where(ig.west_mass > 0, ig.west_mass, 0.0)
        )
        assert back.n_edges == ig.n_edges

    def test_rejects_foreign_files(self, tmp_path):
        p = tmp_path / "bad.tsv"
        p.write_text("just some text\n1\t2\n")
        with pytest.raises(ValueError, match="not an edge-list export"):
            read_edges_tsv(p)
        q = tmp_path / "kind.tsv"
        q.write_text("# lppgeo-edges kind=mystery window=0,1,0,1\ncols\n")
        with pytest.raises(ValueError, match="unknown edge-list kind"):
            read_edges_tsv(q)

    def test_only_graph_objects_export(self, tmp_path):
        with pytest.raises(TypeError, match="cannot export"):
            write_edges_tsv(object(), tmp_path / "x.tsv")
