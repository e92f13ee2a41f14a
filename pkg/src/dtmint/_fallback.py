"""scipy/numpy implementations of the grid kernels.

Same contracts as the compiled ``_kernels`` module; used when the extension
is unavailable or when ``DTMINT_PURE_PYTHON=1`` is set.
"""
import numpy as np
from scipy import ndimage

_STRUCTURES = {
    4: ndimage.generate_binary_structure(2, 1),
    8: ndimage.generate_binary_structure(2, 2),
}


def label(mask, connectivity):
    labels, count = ndimage.label(mask, structure=_STRUCTURES[connectivity])
    return labels.astype(np.int32, copy=False), int(count)


def geodesic_distance(sources, allowed, connectivity):
    sources = np.asarray(sources, dtype=bool)
    allowed = np.asarray(allowed, dtype=bool)
    dist = np.full(sources.shape, -1, dtype=np.int32)
    if not sources.any():
        return dist
    if connectivity == 4 and allowed.all():
        # unobstructed 4-adjacency BFS distance is the taxicab distance
        d = ndimage.distance_transform_cdt(~sources, metric="taxicab")
        return d.astype(np.int32)
    structure = _STRUCTURES[connectivity]
    dist[sources] = 0
    reached = sources.copy()
    frontier = sources
    step = 0
    while True:
        step += 1
        grown = ndimage.binary_dilation(frontier, structure=structure)
        frontier = grown & allowed & ~reached
        if not frontier.any():
            return dist
        dist[frontier] = step
        reached |= frontier
