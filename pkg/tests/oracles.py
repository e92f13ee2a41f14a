"""Independent reference implementations used to freeze expected values.

Nothing here imports the package's algorithms: components and distances are
plain-Python breadth-first searches, and the integral oracle sums over the
sorted cell values instead of using breakpoint quadrature.
"""
from collections import deque
import math

import numpy as np

N4 = [(-1, 0), (1, 0), (0, -1), (0, 1)]
N8 = N4 + [(-1, -1), (-1, 1), (1, -1), (1, 1)]


def neighbours(conn):
    return N4 if conn == 4 else N8


def components(mask, conn, exterior=False):
    """List of cell sets; with ``exterior`` the border touches one extra node.

    The component that reaches the exterior node is returned first and
    flagged by the second return value.
    """
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    seen = np.zeros_like(mask)
    comps = []
    unbounded = None

    def border(r, c):
        if h == 1:
            return c == 0 or c == w - 1
        return r in (0, h - 1) or c in (0, w - 1)

    def flood(seeds):
        q = deque(seeds)
        cells = set(seeds)
        for s in seeds:
            seen[s] = True
        while q:
            r, c = q.popleft()
            for dr, dc in neighbours(conn):
                rr, cc = r + dr, c + dc
                if 0 <= rr < h and 0 <= cc < w and mask[rr, cc] and not seen[rr, cc]:
                    seen[rr, cc] = True
                    cells.add((rr, cc))
                    q.append((rr, cc))
        return cells

    if exterior:
        seeds = [(r, c) for r in range(h) for c in range(w) if mask[r, c] and border(r, c)]
        comps.append(flood(seeds))
        unbounded = 0
    for r in range(h):
        for c in range(w):
            if mask[r, c] and not seen[r, c]:
                comps.append(flood([(r, c)]))
    return comps, unbounded


def bfs_distance(sources, allowed, conn):
    sources = np.asarray(sources, dtype=bool)
    allowed = np.asarray(allowed, dtype=bool)
    h, w = sources.shape
    dist = np.full((h, w), -1, dtype=int)
    q = deque()
    for r in range(h):
        for c in range(w):
            if sources[r, c]:
                dist[r, c] = 0
                q.append((r, c))
    while q:
        r, c = q.popleft()
        for dr, dc in neighbours(conn):
            rr, cc = r + dr, c + dc
            if 0 <= rr < h and 0 <= cc < w and dist[rr, cc] < 0 and allowed[rr, cc]:
                dist[rr, cc] = dist[r, c] + 1
                q.append((rr, cc))
    return dist


def solid(mask, plane=False):
    """Connected under 4-adjacency, complement connected under 8-adjacency."""
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        return False
    fg, _ = components(mask, 4)
    if len(fg) != 1:
        return False
    bg, _ = components(~mask, 8, exterior=plane)
    bg = [c for c in bg if c] if not plane else bg
    return len(bg) <= 1


def choquet(measure, values, region_mask):
    """``a m(E) + sum over sorted distinct values`` with ``a = min(min f, 0)``.

    For ascending distinct values ``v_1 < ... < v_n`` of ``f`` on ``E`` and
    ``v_0 = a``, the level-set integral is
    ``a m(E) + sum_k (v_k - v_{k-1}) m(E & {f >= v_k})``.
    """
    region_mask = np.asarray(region_mask, dtype=bool)
    if not region_mask.any():
        return 0.0
    vals = sorted(set(np.asarray(values)[region_mask].tolist()))
    a = min(vals[0], 0.0)
    terms = [a * measure(region_mask)]
    prev = a
    for v in vals:
        if v <= prev:
            continue
        terms.append((v - prev) * measure(region_mask & (np.asarray(values) >= v)))
        prev = v
    return math.fsum(terms)


def weighted_sum(weights, values, region_mask=None):
    w = np.asarray(weights, dtype=float)
    v = np.asarray(values, dtype=float)
    if region_mask is not None:
        w = np.where(region_mask, w, 0.0)
    return math.fsum((w * v).ravel().tolist())


def parliamentary_tm(mask, points, plane=False):
    """Additive extension of a majority vote on solid sets (compact 2-D grids).

    A connected region is worth one minus the number of complement pieces
    that hold a majority; a general region is the sum over its components.
    """
    mask = np.asarray(mask, dtype=bool)
    need = len(points) // 2 + 1
    total = 0
    for comp in components(mask, 4)[0]:
        cm = np.zeros_like(mask)
        for cell in comp:
            cm[cell] = True
        pieces, _ = components(~cm, 8, exterior=plane)
        big = sum(1 for p in pieces if sum(1 for q in points if q in p) >= need)
        total += 1 - big
    return total
