import json
import random
from pathlib import Path

import pytest

from isovolcano.classgroup import form_order, prime_form
from isovolcano.curve import curve_from_j, point_count, solve_norm_equation
from isovolcano.errors import InvalidArgument, SupersingularError
from isovolcano.ff_poly import PrimeField, field
from isovolcano.hilbert import find_curve_with_trace
from isovolcano.volcano import (Navigator, VolcanoChart, depth_from_norm_equation, find_floor,
                                is_supersingular, level_of, map_volcano,
                                shortest_path_to_floor, walk_surface_gcd, walk_surface_path)

DATA = Path(__file__).parent / "data"
P = 4451
SURFACE = [351, 701, 901, 1582, 2215, 2501, 2872]


@pytest.fixture(scope="module")
def chart(phis):
    return map_volcano(phis[5], PrimeField(P), 901, random.Random(0))


def test_figure_surface_and_children(chart):
    assert chart.surface == SURFACE
    assert chart.depth == 1 and len(chart.levels) == 35
    assert set(chart.children(901)) == {3188, 2970, 1478, 3328}
    assert set(chart.children(351)) == {3508, 2464, 2976, 2566}
    assert set(chart.children(2215)) == {3341, 1868, 2434, 676}
    kids = set(chart.children(2501))
    assert {3147, 1180, 3144} <= kids and len(kids) == 4
    assert chart.definition_violations() == []


def test_chart_matches_golden_json(chart):
    golden = (DATA / "chart_4451_5.json").read_text()
    assert chart.to_json() == golden
    again = VolcanoChart.from_json(golden)
    assert again.levels == chart.levels and again.surface == chart.surface


def test_dot_export_counts(chart):
    dot = chart.to_dot()
    assert dot.count("->") == len(chart.edges)
    for j in chart.levels:
        assert f'"{j}"' in dot


def test_single_vertex_chart_json():
    c = VolcanoChart(11, 411751, {5: 0}, [], 0, [5])
    data = json.loads(c.to_json())
    assert data["vertices"] == [{"j": 5, "level": 0}] and data["edges"] == []
    assert VolcanoChart.from_json(c.to_json()).levels == {5: 0}


def test_floor_and_levels(phis):
    ctx = PrimeField(P)
    rng = random.Random(1)
    for seed in range(10):
        path = find_floor(phis[5], ctx, 901, random.Random(seed))
        assert path.vertices[0] == 901 and path.end not in SURFACE
        assert len(path.vertices) >= 2
    assert shortest_path_to_floor(phis[5], ctx, 901, rng).delta == 1
    assert shortest_path_to_floor(phis[5], ctx, 3188, rng).delta == 0
    assert level_of(phis[5], ctx, 901, 1, rng) == 0
    assert level_of(phis[5], ctx, 3188, 1, rng) == 1


def test_depth_from_norm_equation():
    ne = solve_norm_equation(P, 52)
    assert depth_from_norm_equation(ne, -151, 5) == 1
    assert depth_from_norm_equation(ne, -151, 2) == 1
    assert depth_from_norm_equation(ne, -604, 2) == 0
    with pytest.raises(InvalidArgument):
        depth_from_norm_equation(ne, -7, 5)


def test_supersingular_detection_over_fp2(phis):
    ctx = PrimeField(P)
    ctx2 = field(P, 2)
    traces = {j: P + 1 - point_count(curve_from_j(ctx, j)) for j in range(P)}
    ss = [j for j, t in traces.items() if t == 0]
    assert len(ss) > 10
    for j in ss:
        assert is_supersingular(phis[2], ctx2, j, random.Random(j))
    rng = random.Random(3)
    ordinary = rng.sample([j for j, t in traces.items() if t], 60)
    for j in ordinary + [901]:
        assert not is_supersingular(phis[2], ctx2, j, rng)
    with pytest.raises(SupersingularError):
        shortest_path_to_floor(phis[2], ctx2, ctx2(ss[0]), rng)


def test_surface_walk_closes_after_surface_size(phis):
    ctx = PrimeField(P)
    for seed in range(5):
        path = walk_surface_path(phis[5], ctx, 901, 7, 1, random.Random(seed))
        assert path[0] == path[-1] == 901
        assert sorted(path[:-1]) == SURFACE
    with pytest.raises(InvalidArgument):
        walk_surface_path(phis[5], ctx, 901, 9, 1, random.Random(0))


def test_surface_walk_in_a_depth_two_volcano(phis):
    # the isogeny class of trace 52 mod 411751 has 3-volcanoes of depth 2 and |V0| = 12
    p = 411751
    ctx = PrimeField(p)
    rng = random.Random(8)
    nav = Navigator(phis[3], ctx, rng)
    E = find_curve_with_trace(ctx, 52, rng)
    chart = map_volcano(phis[3], ctx, E.j, nav=nav)
    assert chart.depth == 2
    v0 = chart.surface[0]
    path = walk_surface_path(phis[3], ctx, v0, chart.surface_size, 2, nav=nav)
    assert path[-1] == v0 and set(path) == set(chart.surface)


def test_gcd_transport_between_parallel_surfaces(phis):
    ctx = PrimeField(P)
    rng = random.Random(2)
    path = walk_surface_path(phis[5], ctx, 901, 7, 1, rng)
    # a 2-neighbour of 901 that is on a 5-surface of its own
    for w in sorted(set(phis[2].neighbors(ctx, 901))):
        if shortest_path_to_floor(phis[5], ctx, w, rng).delta == 1:
            moved = walk_surface_gcd(phis[5], phis[2], ctx, path, w)
            for a, b in zip(moved, moved[1:]):
                assert b in phis[5].neighbors(ctx, a)
            for a, b in zip(path, moved):
                assert b in phis[2].neighbors(ctx, a)
            assert moved[0] == moved[-1]
            return
    pytest.fail("no parallel 5-surface found")


def _prime_order(D, ell):
    f = prime_form(D, ell)
    return form_order(f) if f is not None else None
