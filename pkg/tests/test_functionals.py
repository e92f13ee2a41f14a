import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dtmint import build_space, sampling
from dtmint.functionals import (
    DLawError,
    Functional,
    RampParams,
    as_functional,
    check_d_laws,
    inner_ramp,
    measure_of_functional,
    mu_hat,
    outer_ramp,
    roundtrip_records,
    theorem40_records,
    zero_functional,
)
from dtmint.grid_space import GridFunction, Region, dilate, erode, region_from_spec
from dtmint.measures import CellMass, Containment, SignedMeasureError, SimpleSolid
from dtmint.quasi_integral import derived_measure, integrate
from dtmint.scenarios import builtin

import oracles

SPACE = build_space(16, 12, (0, 15, 0, 11))
seeds = st.integers(0, 2**32 - 1)


@pytest.fixture(scope="module")
def ex30():
    return builtin("example30", 120)


def members():
    D = region_from_spec(SPACE, {"rect": [4, 10, 3, 8]})
    w = np.random.default_rng(9).uniform(0, 1, SPACE.shape)
    return {
        "tm": SimpleSolid(SPACE, [(2, 2), (12, 3), (7, 9)]),
        "dtm": SimpleSolid(SPACE, [(2, 2), (12, 3), (7, 9)], "dtm_inner_solid"),
        "contain": Containment(SPACE, D),
        "mass": CellMass(SPACE, w),
    }


MEMBERS = members()
NAMES = sorted(MEMBERS)


def test_as_functional_example43():
    sc = builtin("example43")
    rho = as_functional(sc.measures["mu"])
    assert rho(sc.functions["f"]) == pytest.approx(-1, abs=0.02)
    assert rho(sc.space.constant(0.0)) == 0
    assert rho.provenance.startswith("from_measure")


def test_as_functional_rejects_signed():
    nu = derived_measure(MEMBERS["mass"], SPACE.constant(-1.0))
    with pytest.raises(SignedMeasureError):
        as_functional(nu)


@given(seed=seeds, a=st.floats(-3, 3), b=st.floats(-3, 3))
def test_cell_mass_functional_is_linear(seed, a, b):
    m = MEMBERS["mass"]
    rho = as_functional(m)
    f = sampling.random_function(SPACE, seed)
    g = sampling.random_function(SPACE, seed + 1)
    h = f * a + g * b
    assert rho(h) == pytest.approx(a * rho(f) + b * rho(g), abs=1e-9)
    assert rho(h) == pytest.approx(oracles.weighted_sum(m.weights, h.values), abs=1e-9)


@pytest.mark.parametrize("name", NAMES)
@given(seed=seeds)
def test_d_laws_hold_for_zoo(name, seed):
    recs = check_d_laws(as_functional(MEMBERS[name]), seed, cases=2)
    assert all(r.passed for r in recs), [r.to_dict() for r in recs if not r.passed]


def test_d_law_violation_detected():
    # squaring breaks positive homogeneity
    bad = Functional(SPACE, lambda f: float(np.sum(f.values**2)))
    with pytest.raises(DLawError):
        measure_of_functional(bad)


def test_zero_functional_gives_zero_set_function():
    fm = measure_of_functional(zero_functional(SPACE))
    for seed in range(5):
        assert fm.eval(sampling.random_region(SPACE, seed)) == 0


def test_ramp_params_validation():
    assert RampParams().margins == (8, 4, 2, 1)
    assert RampParams(margin=3, shrink_schedule=()).margins == (3,)
    for bad in [dict(margin=0), dict(shrink_schedule=(4, 4, 1)), dict(shrink_schedule=(1, 2)), dict(shrink_schedule=(2, 0))]:
        with pytest.raises(ValueError):
            RampParams(**bad)


@given(seed=seeds, margin=st.integers(1, 6))
def test_ramps_bracket_the_indicator(seed, margin):
    A = sampling.random_region(SPACE, seed)
    lo, hi = inner_ramp(A, margin), outer_ramp(A, margin)
    ind = A.mask.astype(float)
    assert np.all(lo.values <= ind) and np.all(ind <= hi.values)
    assert lo.min() >= 0 and hi.max() <= 1
    assert not np.any(lo.values[~A.mask])
    # the outer ramp vanishes beyond `margin` rings
    assert not np.any(hi.values[~dilate(A, margin - 1).mask]) if margin > 1 else np.array_equal(hi.values, ind)
    if margin == 1:
        assert np.array_equal(lo.values, ind)


def test_ramp_nesting_along_schedule():
    A = region_from_spec(SPACE, {"rect": [3, 12, 2, 9]})
    prev_in, prev_out = None, None
    for mg in (8, 4, 2, 1):
        i, o = inner_ramp(A, mg), outer_ramp(A, mg)
        if prev_in is not None:
            assert np.all(i.values >= prev_in.values) and np.all(o.values <= prev_out.values)
        prev_in, prev_out = i, o
    assert np.all(inner_ramp(A, 4).values[erode(A, 4).mask] == 1)


@pytest.mark.parametrize("name", NAMES)
@given(seed=seeds)
def test_roundtrip_on_random_regions(name, seed):
    m = MEMBERS[name]
    fm = measure_of_functional(as_functional(m), check=False)
    A = sampling.random_region(SPACE, seed)
    br = fm.bracket(A)
    assert br.monotone
    assert br.lower - 1e-9 <= m.eval(A) <= br.upper + 1e-9
    assert fm.eval(A) == pytest.approx(m.eval(A), abs=1e-9)


def test_cell_mass_bracket_is_ring_weights():
    m = MEMBERS["mass"]
    A = region_from_spec(SPACE, {"rect": [4, 11, 3, 8]})
    fm = measure_of_functional(as_functional(m), RampParams(margin=2, shrink_schedule=()))
    br = fm.bracket(A)
    ring_out = dilate(A, 1) - A
    ring_in = A - erode(A, 1)
    assert m.eval(A) - m.eval(ring_in) <= br.lower + 1e-9
    assert br.upper <= m.eval(A) + m.eval(ring_out) + 1e-9
    assert br.lower <= m.eval(A) <= br.upper


def test_example30_roundtrip_and_mu_hat(ex30):
    mu = ex30.measures["mu"]
    names = ["K", "U", "V", "top_band", "disk"]
    regions = {k: ex30.regions[k] for k in names}
    recs = roundtrip_records(mu, regions)
    assert all(r.passed for r in recs), [r.to_dict() for r in recs]
    K = ex30.regions["K"]
    br = measure_of_functional(as_functional(mu)).bracket(K)
    assert br.lower == pytest.approx(1) and br.upper == pytest.approx(1)
    recs = theorem40_records(mu, ex30.functions["g_pos"], regions)
    assert all(r.passed for r in recs), [r.to_dict() for r in recs]


def test_mu_hat_with_unit_g_is_compact_value(ex30):
    mu, K = ex30.measures["mu"], ex30.regions["K"]
    rho = as_functional(mu)
    one = ex30.space.constant(1.0)
    assert mu_hat(rho, one, K).value == measure_of_functional(rho, check=False).bracket(K).upper


@given(seed=seeds)
def test_mu_hat_cell_mass(seed):
    m = MEMBERS["mass"]
    g = sampling.random_function(SPACE, seed, nonnegative=True)
    A = sampling.random_region(SPACE, seed)
    res = mu_hat(as_functional(m), g, A)
    assert res.nonincreasing
    assert res.value == pytest.approx(oracles.weighted_sum(m.weights * A.mask, g.values), abs=1e-9)


def test_mu_hat_rejects_negative_g():
    with pytest.raises(ValueError):
        mu_hat(as_functional(MEMBERS["tm"]), SPACE.constant(-1.0), SPACE.full())


@pytest.mark.parametrize("name", ["tm", "dtm"])
@given(seed=seeds)
def test_mu_hat_approaches_derived_from_above(name, seed):
    m = MEMBERS[name]
    g = sampling.random_function(SPACE, seed, nonnegative=True)
    A = sampling.random_region(SPACE, seed)
    exact = integrate(m, g, A).value
    res = mu_hat(as_functional(m), g, A)
    assert all(s["value"] >= exact - 1e-9 for s in res.steps)
    assert res.value == pytest.approx(exact, abs=1e-9)


def test_composed_functional():
    rho = as_functional(MEMBERS["mass"])
    g = GridFunction(SPACE, np.full(SPACE.shape, 2.0))
    f = sampling.random_function(SPACE, 3)
    assert rho.composed(g)(f) == pytest.approx(2 * rho(f))
    assert "composed" in rho.composed(g).provenance
