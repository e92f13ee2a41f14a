"""Seeded random regions and functions for property checks and classifiers."""
from __future__ import annotations

import numpy as np
from scipy import ndimage

from .grid_space import GridFunction, Region, SpaceModel

_EIGHT = ndimage.generate_binary_structure(2, 2)


def rng_for(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _rect_mask(space: SpaceModel, rng) -> np.ndarray:
    h, w = space.shape
    r0 = rng.integers(0, h)
    c0 = rng.integers(0, w)
    r1 = min(h, r0 + 1 + rng.integers(0, max(1, h // 2)))
    c1 = min(w, c0 + 1 + rng.integers(0, max(1, w // 2)))
    m = np.zeros(space.shape, dtype=bool)
    m[r0:r1, c0:c1] = True
    return m


def _blob_mask(space: SpaceModel, rng) -> np.ndarray:
    """Thresholded smoothed noise: irregular shapes with holes and several pieces."""
    noise = rng.standard_normal(space.shape)
    sigma = rng.uniform(0.8, 2.5)
    sm = ndimage.gaussian_filter(noise, sigma, mode="nearest")
    q = rng.uniform(0.3, 0.8)
    return sm > np.quantile(sm, q)


def _walk_mask(space: SpaceModel, rng) -> np.ndarray:
    """A 4-connected random walk (thin curves, often non-solid)."""
    h, w = space.shape
    m = np.zeros(space.shape, dtype=bool)
    r, c = rng.integers(0, h), rng.integers(0, w)
    steps = rng.integers(1, 3 * (h + w))
    moves = np.array([[0, 1], [0, -1], [1, 0], [-1, 0]])
    for k in rng.integers(0, 4, size=steps):
        m[r, c] = True
        r = min(max(r + moves[k, 0], 0), h - 1)
        c = min(max(c + moves[k, 1], 0), w - 1)
    m[r, c] = True
    return m


def random_region(space: SpaceModel, seed, nonempty: bool = True) -> Region:
    rng = rng_for(seed)
    while True:
        kind = rng.integers(0, 6)
        if kind == 0:
            m = _rect_mask(space, rng)
        elif kind == 1:
            m = _rect_mask(space, rng) | _rect_mask(space, rng)
        elif kind == 2:
            m = _blob_mask(space, rng)
        elif kind == 3:
            m = _walk_mask(space, rng)
        elif kind == 4:
            m = rng.random(space.shape) < rng.uniform(0.05, 0.6)
        else:
            m = _rect_mask(space, rng) & ~_rect_mask(space, rng)
        if m.any() or not nonempty:
            return Region(space, m)


def random_subregion(A: Region, seed) -> Region:
    rng = rng_for(seed)
    if A.is_empty():
        return A
    kind = rng.integers(0, 3)
    if kind == 0:
        return A & random_region(A.space, rng)
    if kind == 1:
        return A - random_region(A.space, rng)
    keep = rng.random(A.space.shape) < rng.uniform(0.3, 1.0)
    return Region(A.space, A.mask & keep)


def random_superregion(A: Region, seed) -> Region:
    return A | random_region(A.space, rng_for(seed))


def separate_from(A: Region, B: Region) -> Region:
    """Cells of ``B`` that neither belong to nor touch ``A``."""
    grown = ndimage.binary_dilation(A.mask, structure=_EIGHT)
    return Region(A.space, B.mask & ~grown)


def random_separated_pair(space: SpaceModel, seed, within: Region | None = None) -> tuple[Region, Region]:
    rng = rng_for(seed)
    A = random_region(space, rng)
    if within is not None:
        A = A & within
    B = random_region(space, rng)
    if within is not None:
        B = B & within
    return A, separate_from(A, B)


def random_separated_family(space: SpaceModel, seed, within: Region | None = None, size: int = 3) -> list[Region]:
    rng = rng_for(seed)
    fam: list[Region] = []
    taken = space.empty()
    for _ in range(size):
        B = random_region(space, rng)
        if within is not None:
            B = B & within
        B = separate_from(taken, B)
        if not B.is_empty():
            fam.append(B)
            taken = taken | B
    return fam


def random_function(space: SpaceModel, seed, nonnegative: bool = False, levels: int | None = None) -> GridFunction:
    """Smooth-ish random function, quantized so that level sets tie often."""
    rng = rng_for(seed)
    sm = ndimage.gaussian_filter(rng.standard_normal(space.shape), rng.uniform(0.5, 3.0), mode="nearest")
    span = np.ptp(sm) or 1.0
    sm = (sm - sm.min()) / span
    k = levels or int(rng.integers(2, 12))
    vals = np.round(sm * k) / k
    scale = float(rng.choice([0.5, 1.0, 2.0, 3.0]))
    if nonnegative:
        vals = vals * scale
    else:
        vals = (vals - float(rng.choice([0.0, 0.25, 0.5]))) * scale
    return GridFunction(space, vals)


def split_support(space: SpaceModel, seed) -> tuple[GridFunction, GridFunction]:
    """Two nonnegative functions with separated supports.

    A band of zero cells keeps the supports from touching, the grid analogue
    of two continuous functions with ``f * g = 0`` whose positive sets are at
    positive distance.
    """
    rng = rng_for(seed)
    f = random_function(space, rng, nonnegative=True)
    g = random_function(space, rng, nonnegative=True)
    cut = random_region(space, rng)
    other = separate_from(cut, ~cut)
    return (
        GridFunction(space, np.where(cut.mask, f.values, 0.0)),
        GridFunction(space, np.where(other.mask, g.values, 0.0)),
    )
