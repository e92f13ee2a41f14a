import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dtmint import build_space
from dtmint.grid_space import (
    GridFunction,
    Region,
    RegionSpecError,
    Side,
    SpaceMismatch,
    connected_components,
    distance_to,
    function_from_spec,
    is_solid,
    level_set,
    oscillation,
    region_from_spec,
    separated,
    urysohn_ramp,
)
from dtmint.scenarios import builtin

import oracles

SPACE = build_space(9, 7, (0, 8, 0, 6))
PLANE = build_space(9, 7, (0, 8, 0, 6), "plane_window")
masks = arrays(bool, SPACE.shape)


def region(mask, space=SPACE):
    return Region(space, mask)


@pytest.fixture(scope="module")
def ex30():
    return builtin("example30", 200)


# ------------------------------------------------------------------ spaces


def test_example_spaces():
    s = build_space(400, 400, (-4, 0, 0, 4))
    assert s.shape == (400, 400) and not s.plane
    assert s.xs[0] == -4 and s.xs[-1] == 0 and s.ys[-1] == 4
    line = build_space(1200, 1, (-6, 6), "plane_window")
    assert line.one_dimensional and line.plane and line.size == 1200


def test_one_cell_space():
    s = build_space(1, 1, (0, 1, 0, 1))
    assert s.size == 1
    r = Region(s, [True])
    assert r == s.full()
    assert is_solid(s, r)


@pytest.mark.parametrize(
    "args",
    [(0, 1, (0, 1)), (3, 0, (0, 1, 0, 1)), (3, 1, (1, 1)), (3, 3, (0, 1, 2, 2)), (3, 3, (0, 1, 0, 1), "torus")],
)
def test_bad_spaces_rejected(args):
    with pytest.raises(ValueError):
        build_space(*args)


def test_cell_centers_are_affine():
    s = build_space(5, 3, (0, 4, 10, 12))
    assert np.allclose(s.xs, [0, 1, 2, 3, 4])
    assert np.allclose(s.ys, [10, 11, 12])
    assert s.cell_of((3, 11)) == (1, 3)
    with pytest.raises(ValueError):
        s.cell_of((5, 11))


# ----------------------------------------------------------------- regions


def test_region_algebra_and_keys():
    a = region_from_spec(SPACE, {"rect": [0, 3, 0, 3]})
    b = region_from_spec(SPACE, {"rect": [2, 5, 2, 5]})
    assert len(a) == 16 and len(b) == 16
    assert (a & b) == region_from_spec(SPACE, {"rect": [2, 3, 2, 3]})
    assert len(a | b) == 28
    assert (a - b).isdisjoint(b)
    assert (~a).isdisjoint(a) and len(~a) == SPACE.size - 16
    assert hash(a) == hash(Region(SPACE, a.mask))
    with pytest.raises(SpaceMismatch):
        a & PLANE.full()


def test_triangle_k_of_example30(ex30):
    K = ex30.regions["K"]
    X, Y = ex30.space.grid
    # the closed triangle below the anti-diagonal: centers strictly inside must be in K,
    # centers clearly outside must not
    inside = (X + Y < -0.05) & (X > -4) & (Y > 0)
    outside = X + Y > 0.05
    assert K.mask[inside].all()
    assert not K.mask[outside].any()
    # cover rule keeps the hypotenuse closed: every cell it crosses is in
    assert K.mask[np.isclose(X + Y, 0, atol=1e-12)].all()


def test_interval_on_line():
    line = build_space(1200, 1, (-6, 6), "plane_window")
    D = region_from_spec(line, {"interval": [1, 4]})
    hx = line.dx / 2
    xs = line.xs
    assert np.array_equal(D.mask[0], (xs + hx >= 1) & (xs - hx <= 4))
    assert D.mask[0][(xs >= 1) & (xs <= 4)].all()


def test_center_rule_polygon():
    tri = {"polygon": [[0, 0], [8, 0], [0, 6]], "rule": "center"}
    R = region_from_spec(SPACE, tri)
    X, Y = SPACE.grid
    # closed polygon: centers on the edges count as inside
    assert np.array_equal(R.mask, X / 8 + Y / 6 <= 1 + 1e-12)


@pytest.mark.parametrize(
    "spec",
    [{"polygon": [[0, 0], [1, 1]]}, {"predicate": "x >"}, {"predicate": "x + 1"}, {"bogus": 1}, "nope", {"interval": [3, 1]}],
)
def test_bad_region_specs(spec):
    with pytest.raises(RegionSpecError):
        region_from_spec(SPACE, spec)


def test_trivial_region_specs():
    assert region_from_spec(SPACE, {"cells": []}).is_empty()
    assert region_from_spec(SPACE, "X").is_full()
    assert region_from_spec(SPACE, {"cells": [[0, 0], [6, 8]]}) == Region.from_cells(SPACE, [0, 62])
    u = region_from_spec(SPACE, {"union": [{"cells": [0]}, {"cells": [1]}]})
    assert len(u) == 2
    assert region_from_spec(SPACE, {"difference": ["X", {"complement": {"cells": [3]}}]}) == Region.from_cells(SPACE, [3])


def test_expression_grammar():
    f = function_from_spec(SPACE, "max(0, 2 - hypot(x - 4, y - 3)) + min(abs(x - 1), 1) * 2 / 4")
    X, Y = SPACE.grid
    want = np.maximum(0, 2 - np.hypot(X - 4, Y - 3)) + np.minimum(np.abs(X - 1), 1) * 2 / 4
    assert np.allclose(f.values, want)
    assert function_from_spec(SPACE, 2.5) == SPACE.constant(2.5)
    with pytest.raises(Exception):
        function_from_spec(SPACE, "__import__('os')")
    with pytest.raises(Exception):
        function_from_spec(SPACE, "z + 1")


def test_function_values_must_be_finite():
    with pytest.raises(ValueError):
        GridFunction(SPACE, np.full(SPACE.shape, np.nan))


# ------------------------------------------------------------ connectivity


def test_two_separated_squares():
    sq = region_from_spec(SPACE, {"union": [{"rect": [0, 1, 0, 1]}, {"rect": [4, 5, 4, 5]}]})
    assert len(connected_components(SPACE, sq)) == 2


def test_full_space_single_component():
    assert len(connected_components(SPACE, SPACE.full())) == 1


def test_complement_of_c_has_two_pieces(ex30):
    C = ex30.regions["C"]
    comps = connected_components(ex30.space, ~C, Side.BACKGROUND)
    assert len(comps) == 2
    assert {ex30.regions["U"], ex30.regions["V"]} == set(comps)
    assert not is_solid(ex30.space, C)
    for comp in comps:
        assert is_solid(ex30.space, comp)


@pytest.mark.parametrize("side", [Side.FOREGROUND, Side.BACKGROUND])
@given(mask=masks)
def test_components_partition(side, mask):
    R = region(mask)
    comps = connected_components(SPACE, R, side)
    total = SPACE.empty()
    for c in comps:
        assert total.isdisjoint(c)
        total = total | c
        assert len(connected_components(SPACE, c, side)) == 1
    assert total == R
    want, _ = oracles.components(mask, side.connectivity)
    assert {frozenset(map(tuple, np.argwhere(c.mask))) for c in comps} == {frozenset(c) for c in want}


@given(mask=masks)
def test_plane_background_has_unbounded_component(mask):
    R = region(mask, PLANE)
    comps, idx = connected_components(PLANE, ~R, Side.BACKGROUND, with_unbounded=True)
    want, _ = oracles.components(~mask, 8, exterior=True)
    assert len(comps) == len(want)
    assert idx is not None
    assert set(map(tuple, np.argwhere(comps[idx].mask))) == want[0]


@given(mask=masks)
def test_is_solid_matches_oracle(mask):
    assert is_solid(SPACE, region(mask)) == oracles.solid(mask)
    assert is_solid(PLANE, region(mask, PLANE)) == oracles.solid(mask, plane=True)


@given(mask=masks)
def test_solid_implies_single_components(mask):
    R = region(mask)
    if is_solid(SPACE, R):
        assert len(connected_components(SPACE, R)) == 1
        assert len(connected_components(SPACE, ~R, Side.BACKGROUND)) <= 1


def test_solid_examples():
    rect = region_from_spec(SPACE, {"rect": [2, 5, 2, 4]})
    assert is_solid(SPACE, rect)
    annulus = rect - region_from_spec(SPACE, {"rect": [3, 4, 3, 3]})
    assert not is_solid(SPACE, annulus)
    assert not is_solid(SPACE, SPACE.empty())
    assert is_solid(SPACE, SPACE.full())
    # a thin diagonal line still separates the background
    diag = Region(SPACE, np.eye(7, 9, dtype=bool) | np.eye(7, 9, 1, dtype=bool))
    assert len(connected_components(SPACE, ~diag, Side.BACKGROUND)) == 2


def test_plane_window_band_is_solid_through_exterior():
    # a horizontal band across the window splits the compact grid but not the plane
    band = region_from_spec(PLANE, {"predicate": "y == 3"})
    assert is_solid(PLANE, band)
    band_c = region_from_spec(SPACE, {"predicate": "y == 3"})
    assert not is_solid(SPACE, band_c)


def test_line_window_merges_both_ends():
    line = build_space(10, 1, (0, 9), "plane_window")
    mid = region_from_spec(line, {"interval": [3, 5]})
    assert is_solid(line, mid)
    compact = build_space(10, 1, (0, 9))
    assert not is_solid(compact, region_from_spec(compact, {"interval": [3, 5]}))


@given(a=masks, b=masks)
def test_separated_means_no_touching(a, b):
    A, B = region(a), region(b)
    dist = oracles.bfs_distance(a, np.ones_like(a), 8)
    want = not a.any() or not b.any() or bool((dist[b] >= 2).all())
    assert separated(A, B) == want


def test_distance_to_is_bfs():
    target = np.zeros(SPACE.shape, bool)
    target[3, 4] = True
    d = distance_to(SPACE, target)
    assert np.array_equal(d, oracles.bfs_distance(target, np.ones_like(target), 4))
    assert np.isinf(distance_to(SPACE, np.zeros_like(target))).all()


# -------------------------------------------------------------- level sets


def test_level_set_examples(ex30):
    z = SPACE.constant(0.0)
    assert level_set(z, 0.0, "strict").is_empty()
    g = ex30.functions["g"]
    assert level_set(g, -4, "weak").is_full()
    line = build_space(1200, 1, (-6, 6), "plane_window")
    f = function_from_spec(line, "min(abs(x) - 2, 0)")
    for t in (-0.999, -0.5, -0.25, 0.0):
        want = np.minimum(np.abs(line.xs) - 2, 0) >= t
        assert np.array_equal(level_set(f, t, "weak").mask[0], want)
    with pytest.raises(ValueError):
        level_set(z, 0, "open")


values = arrays(float, SPACE.shape, elements=st.sampled_from([-1.0, -0.5, 0.0, 0.25, 1.0, 2.0]))


@given(v=values, t1=st.floats(-2, 3), t2=st.floats(-2, 3))
def test_level_sets_are_antitone(v, t1, t2):
    f = GridFunction(SPACE, v)
    lo, hi = min(t1, t2), max(t1, t2)
    for variant in ("strict", "weak"):
        assert level_set(f, hi, variant).issubset(level_set(f, lo, variant))
    assert level_set(f, lo, "strict").issubset(level_set(f, lo, "weak"))
    above = np.unique(v)[np.unique(v) > lo]
    if above.size:
        assert level_set(f, lo, "strict") == level_set(f, float(above[0]), "weak")


# ------------------------------------------------------------------- ramps


def test_urysohn_k_equal_u_is_indicator():
    U = region_from_spec(SPACE, {"rect": [2, 5, 1, 4]})
    f = urysohn_ramp(SPACE, U, U, 3)
    assert np.array_equal(f.values, U.mask.astype(float))


def test_urysohn_five_by_five():
    s = build_space(9, 9, (0, 8, 0, 8))
    U = region_from_spec(s, {"rect": [2, 6, 2, 6]})
    K = Region.from_cells(s, [4 * 9 + 4])
    f = urysohn_ramp(s, K, U, 2)
    inner = region_from_spec(s, {"rect": [3, 5, 3, 5]})
    assert np.all(f.on(inner) == 1.0)
    assert np.all(f.on(U - inner) == 0.5)
    assert np.all(f.on(~U) == 0.0)


@given(k=masks, u=masks, margin=st.integers(1, 4))
def test_urysohn_bounds(k, u, margin):
    U = region(k | u)
    K = region(k)
    f = urysohn_ramp(SPACE, K, U, margin)
    assert np.all(f.values >= K.mask) and np.all(f.values <= 1)
    assert f.coz().issubset(U)


def test_urysohn_rejects_k_outside_u():
    with pytest.raises(ValueError):
        urysohn_ramp(SPACE, SPACE.full(), region_from_spec(SPACE, {"rect": [0, 1, 0, 1]}), 1)


# ------------------------------------------------------------- oscillation


def test_oscillation_examples():
    assert oscillation(SPACE.constant(3.0), SPACE.full()) == 0
    sc = builtin("example32b", 40)
    assert oscillation(sc.functions["g"], sc.space.full()) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        oscillation(SPACE.constant(1.0), SPACE.empty())


@given(v=values, m=masks, c=st.floats(-3, 3))
def test_oscillation_properties(v, m, c):
    if not m.any():
        return
    f, A = GridFunction(SPACE, v), region(m)
    vals = [v[i] for i in zip(*np.nonzero(m))]
    assert oscillation(f, A) == max(vals) - min(vals) >= 0
    assert oscillation(f * c, A) == pytest.approx(abs(c) * oscillation(f, A))
