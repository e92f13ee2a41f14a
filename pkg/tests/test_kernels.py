import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dtmint import kernels

import oracles

BACKENDS = sorted(kernels.BACKENDS.items())
masks = st.integers(1, 9).flatmap(lambda h: st.integers(1, 9).flatmap(lambda w: arrays(bool, (h, w))))


def partition(labels):
    """Cells grouped by label, as a set of frozensets (label values ignored)."""
    groups = {}
    for idx, v in np.ndenumerate(labels):
        if v:
            groups.setdefault(int(v), set()).add(idx)
    return {frozenset(g) for g in groups.values()}


def test_compiled_backend_is_active():
    assert kernels.BACKEND in ("cython", "fallback")
    assert "fallback" in kernels.BACKENDS


@pytest.mark.parametrize("name,impl", BACKENDS)
@pytest.mark.parametrize("conn", [4, 8])
@given(mask=masks)
def test_label_matches_bfs(name, impl, conn, mask):
    labels, count = kernels.label(mask, conn, impl=impl)
    comps, _ = oracles.components(mask, conn)
    assert count == len(comps)
    assert partition(labels) == {frozenset(c) for c in comps}
    assert labels.dtype == np.int32
    assert not labels[~mask].any()


@pytest.mark.parametrize("name,impl", BACKENDS)
@given(mask=masks)
def test_labels_in_raster_order(name, impl, mask):
    labels, count = kernels.label(mask, 8, impl=impl)
    seen = [int(v) for v in labels.ravel() if v]
    first = list(dict.fromkeys(seen))
    assert first == list(range(1, count + 1))


@pytest.mark.parametrize("name,impl", BACKENDS)
@pytest.mark.parametrize("conn", [4, 8])
@given(data=st.data())
def test_geodesic_matches_bfs(name, impl, conn, data):
    allowed = data.draw(masks)
    sources = data.draw(arrays(bool, allowed.shape))
    got = kernels.geodesic_distance(sources, allowed, conn, impl=impl)
    assert np.array_equal(got, oracles.bfs_distance(sources, allowed, conn))


@pytest.mark.parametrize("name,impl", BACKENDS)
def test_empty_and_full(name, impl):
    z = np.zeros((5, 7), bool)
    assert kernels.label(z, 4, impl=impl)[1] == 0
    assert kernels.label(~z, 4, impl=impl)[1] == 1
    d = kernels.geodesic_distance(z, None, 4, impl=impl)
    assert (d == -1).all()


def test_backends_agree_on_large_random_masks(rng):
    if len(kernels.BACKENDS) < 2:
        pytest.skip("compiled kernels not built")
    c, f = kernels.BACKENDS["cython"], kernels.BACKENDS["fallback"]
    for _ in range(5):
        m = rng.random((120, 90)) < 0.5
        for conn in (4, 8):
            assert np.array_equal(kernels.label(m, conn, impl=c)[0], kernels.label(m, conn, impl=f)[0])
            src = np.zeros_like(m)
            src[60, 45] = True
            assert np.array_equal(
                kernels.geodesic_distance(src, m | src, conn, impl=c),
                kernels.geodesic_distance(src, m | src, conn, impl=f),
            )
