"""Set functions on grid regions and classifiers for their axioms.

Families: parliamentary (simple solid) measures, containment measures,
additive cell masses, restrictions and nonnegative linear combinations.
Derived integrals and functional-induced set functions live in
:mod:`dtmint.quasi_integral` and :mod:`dtmint.functionals`.
"""
from __future__ import annotations

import itertools
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import ndimage

from . import kernels, sampling
from .grid_space import (
    Region,
    Side,
    SpaceMismatch,
    SpaceModel,
    count_complement_components,
    dilate8,
    label_components,
    level_set,
    separated,
)

TOL = 1e-9

TM_ADDITIVE = "tm_additive"
DTM_INNER_SOLID = "dtm_inner_solid"
EXTENSION_MODES = (TM_ADDITIVE, DTM_INNER_SOLID)

_EIGHT = ndimage.generate_binary_structure(2, 2)


class StructuralError(RuntimeError):
    """An internal consistency assertion of a set-function family failed."""


class SignedMeasureError(ValueError):
    """An operation that needs a nonnegative set function got a signed one."""


class SetFunction:
    """Base class: a pure map from regions of one space to reals."""

    family = "abstract"
    signed = False

    def __init__(self, space: SpaceModel):
        self.space = space

    def eval(self, A: Region) -> float:
        if A.space != self.space:
            raise SpaceMismatch("region belongs to a different space")
        if A.is_empty():
            return 0.0
        return float(self._eval(A))

    __call__ = eval

    def _eval(self, A: Region) -> float:
        raise NotImplementedError

    def total(self) -> float:
        return self.eval(self.space.full())

    def levels(self, f, thresholds: np.ndarray, strict: bool = True, within: Region | None = None) -> np.ndarray:
        """Values on ``within & {f > t}`` (or ``>=``) for increasing thresholds.

        The generic version assumes the values are nonincreasing in ``t`` and
        fills constant stretches by bisection; families override it with
        closed forms.
        """
        variant = "strict" if strict else "weak"

        def at(i):
            return self.eval(level_set(f, thresholds[i], variant, within))

        return monotone_profile(at, len(thresholds))

    def require_unsigned(self):
        if self.signed:
            raise SignedMeasureError(f"{self.family} set function is signed")

    def describe(self) -> dict:
        return {"family": self.family}

    def __repr__(self):
        return f"{type(self).__name__}({self.describe()})"


def monotone_profile(at: Callable[[int], float], n: int) -> np.ndarray:
    """Evaluate a nonincreasing sequence ``at(0..n-1)`` with few distinct values.

    Stretches whose two endpoints agree are filled without evaluation.
    """
    out = np.empty(n)
    if n == 0:
        return out
    out[0] = at(0)
    if n == 1:
        return out
    out[n - 1] = at(n - 1)
    stack = [(0, n - 1)]
    while stack:
        lo, hi = stack.pop()
        if hi - lo < 2:
            continue
        if out[lo] == out[hi]:
            out[lo + 1 : hi] = out[lo]
            continue
        mid = (lo + hi) // 2
        out[mid] = at(mid)
        stack.append((lo, mid))
        stack.append((mid, hi))
    return out


class _RegionCache:
    """Small thread-safe LRU keyed by region bytes."""

    def __init__(self, size: int = 4096):
        self._data: OrderedDict = OrderedDict()
        self._size = size
        self._lock = threading.Lock()

    def get(self, key):
        with self._lock:
            v = self._data.get(key)
            if v is not None:
                self._data.move_to_end(key)
            return v

    def put(self, key, value):
        with self._lock:
            self._data[key] = value
            if len(self._data) > self._size:
                self._data.popitem(last=False)


# --------------------------------------------------------------- cell masses


class CellMass(SetFunction):
    """Additive measure: sum of nonnegative per-cell weights."""

    family = "cell_mass"

    def __init__(self, space: SpaceModel, weights=1.0):
        super().__init__(space)
        w = np.broadcast_to(np.asarray(weights, dtype=float), space.shape).copy()
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("cell weights must be finite and nonnegative")
        w.setflags(write=False)
        self.weights = w

    def _eval(self, A):
        return float(np.sum(self.weights[A.mask]))

    def levels(self, f, thresholds, strict=True, within=None):
        w = self.weights if within is None else np.where(within.mask, self.weights, 0.0)
        vals = f.values.ravel()
        order = np.argsort(vals, kind="stable")
        sv = vals[order]
        # tail[k] = total weight of the cells ranked k.. in increasing f
        tail = np.concatenate([np.cumsum(w.ravel()[order][::-1])[::-1], [0.0]])
        side = "right" if strict else "left"
        return tail[np.searchsorted(sv, np.asarray(thresholds), side=side)]

    def describe(self):
        return {"family": self.family, "total": float(self.weights.sum())}


# --------------------------------------------------------------- containment


class Containment(SetFunction):
    """``1`` on regions containing a fixed connected region ``D``, else ``0``."""

    family = "containment"

    def __init__(self, space: SpaceModel, D: Region):
        super().__init__(space)
        if D.space != space:
            raise SpaceMismatch("D belongs to a different space")
        if D.is_empty():
            raise ValueError("containment region D must be nonempty")
        if kernels.label(D.mask, 4)[1] != 1:
            raise ValueError("containment region D must be connected")
        self.D = D

    def _eval(self, A):
        return 1.0 if self.D.issubset(A) else 0.0

    def levels(self, f, thresholds, strict=True, within=None):
        t = np.asarray(thresholds, dtype=float)
        if within is not None and not self.D.issubset(within):
            return np.zeros(len(t))
        lo = f.min(self.D)
        return (t < lo if strict else t <= lo).astype(float)

    def describe(self):
        return {"family": self.family, "D_cells": len(self.D)}


# ------------------------------------------------------- simple solid measures


class SimpleSolid(SetFunction):
    """Parliamentary measure from an odd set of points.

    A solid region is worth 1 when it holds a strict majority of the points.
    Non-solid regions are valued per 4-connected component, either through
    the additive complement formula (``tm_additive``) or by searching for a
    solid majority subset (``dtm_inner_solid``).
    """

    family = "simple_solid"

    def __init__(self, space: SpaceModel, points: Sequence[Sequence[float]], extension_mode: str = TM_ADDITIVE):
        super().__init__(space)
        if extension_mode not in EXTENSION_MODES:
            raise ValueError(f"extension_mode must be one of {EXTENSION_MODES}")
        pts = [tuple(float(c) for c in p) for p in points]
        if len(pts) == 0 or len(pts) % 2 == 0:
            raise ValueError(f"need an odd number of points, got {len(pts)}")
        cells = [space.cell_of(p) for p in pts]
        if len(set(cells)) != len(cells):
            raise ValueError("points must fall in distinct cells")
        self.points = pts
        self.extension_mode = extension_mode
        self.rows = np.array([c[0] for c in cells])
        self.cols = np.array([c[1] for c in cells])
        self.need = len(pts) // 2 + 1
        self._cache = _RegionCache()

    def with_mode(self, extension_mode: str) -> "SimpleSolid":
        return SimpleSolid(self.space, self.points, extension_mode)

    def count(self, mask: np.ndarray) -> int:
        return int(np.count_nonzero(mask[self.rows, self.cols]))

    def majority(self, mask: np.ndarray) -> int:
        return 1 if self.count(mask) >= self.need else 0

    def _eval(self, A):
        hit = self._cache.get(A.key)
        if hit is not None:
            return hit
        labels, n, _ = label_components(self.space, A.mask, Side.FOREGROUND)
        point_labels = labels[self.rows, self.cols]
        total = 0
        for k, sl in self._candidates(labels):
            inside = int(np.count_nonzero(point_labels == k))
            if self.extension_mode == DTM_INNER_SOLID and inside < self.need:
                continue
            total += self._connected(labels, k, sl, inside)
        value = float(total)
        self._cache.put(A.key, value)
        return value

    def _candidates(self, labels):
        """Components that can carry value: a point lies in their grown box,
        or the box spans a compact grid (so the outside may be split)."""
        slices = ndimage.find_objects(labels)
        if not slices:
            return []
        h, w = self.space.shape
        box = np.array([[s[0].start, s[0].stop, s[1].start, s[1].stop] for s in slices])
        R0 = np.maximum(box[:, 0] - 1, 0)
        R1 = np.minimum(box[:, 1] + 1, h)
        C0 = np.maximum(box[:, 2] - 1, 0)
        C1 = np.minimum(box[:, 3] + 1, w)
        keep = np.zeros(len(slices), dtype=bool)
        for r, c in zip(self.rows, self.cols):
            keep |= (R0 <= r) & (r < R1) & (C0 <= c) & (c < C1)
        if h == 1:
            keep[:] = True
        elif not self.space.plane:
            keep |= ((R0 == 0) & (R1 == h)) | ((C0 == 0) & (C1 == w))
        return [(int(k) + 1, slices[k]) for k in np.flatnonzero(keep)]

    def _piece_counts(self, labels, k, sl) -> np.ndarray | None:
        """Number of points in each complement piece of component ``k``.

        Works on the bounding box grown by one cell.  Its frame lies in the
        complement and, unless the box spans the whole grid in some direction
        of a compact space, joins everything outside the box.  Returns None
        when no point lies in the box (all points share the outer piece).
        """
        h, w = self.space.shape
        rs, cs = sl
        r0, r1, c0, c1 = rs.start - 1, rs.stop + 1, cs.start - 1, cs.stop + 1
        R0, R1, C0, C1 = max(r0, 0), min(r1, h), max(c0, 0), min(c1, w)
        spans = (R0 == 0 and R1 == h) or (C0 == 0 and C1 == w)
        local = h > 1 and (self.space.plane or not spans)
        if not local:
            comp, n, _ = label_components(self.space, labels != k, Side.BACKGROUND)
            return np.bincount(comp[self.rows, self.cols], minlength=n + 1)[1:]
        inside = (self.rows >= R0) & (self.rows < R1) & (self.cols >= C0) & (self.cols < C1)
        if not inside.any():
            return None
        crop = labels[R0:R1, C0:C1] == k
        if self.space.plane:
            # missing frame sides are replaced by the exterior
            crop = np.pad(crop, ((R0 - r0, r1 - R1), (C0 - c0, c1 - C1)))
            oy, ox = r0, c0
        else:
            oy, ox = R0, C0
        comp, n = kernels.label(~crop, 8)
        # any surviving frame cell identifies the outer piece
        if self.space.plane or r0 >= 0 or c0 >= 0:
            outer = comp[0, 0]
        elif r1 <= h:
            outer = comp[-1, 0]
        else:
            outer = comp[0, -1]
        counts = np.zeros(n + 1, dtype=int)
        np.add.at(counts, comp[self.rows[inside] - oy, self.cols[inside] - ox], 1)
        counts[outer] += int(np.count_nonzero(~inside))
        return counts[1:]

    def _connected(self, labels, k, sl, inside) -> int:
        counts = self._piece_counts(labels, k, sl)
        if counts is None:
            return 0
        if len(counts) <= 1:
            return 1 if inside >= self.need else 0
        if self.extension_mode == TM_ADDITIVE:
            # complement pieces of a connected set are themselves solid, so
            # additivity over X = C + pieces fixes the value
            value = (1 if len(self.points) >= self.need else 0) - int(np.sum(counts >= self.need))
            if value not in (0, 1):
                raise StructuralError(f"complement formula produced {value}")
            return value
        return 1 if find_solid_witness(self, labels == k) is not None else 0

    def describe(self):
        return {"family": self.family, "points": [list(p) for p in self.points], "extension_mode": self.extension_mode}


def _trace_back(dist: np.ndarray, start: tuple[int, int], conn: int) -> list[tuple[int, int]]:
    """Walk down a BFS distance field from ``start`` to a source cell."""
    h, w = dist.shape
    nbrs = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    if conn == 8:
        nbrs += [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    path = [start]
    r, c = start
    while dist[r, c] > 0:
        for dr, dc in nbrs:
            rr, cc = r + dr, c + dc
            if 0 <= rr < h and 0 <= cc < w and dist[rr, cc] == dist[r, c] - 1:
                r, c = rr, cc
                break
        else:
            raise StructuralError("broken distance field")
        path.append((r, c))
    return path


def _holes_inside(space: SpaceModel, T: np.ndarray, allowed: np.ndarray) -> np.ndarray:
    """``T`` plus every complement piece of ``T`` lying entirely in ``allowed``."""
    labels, n, ext = label_components(space, ~T, Side.BACKGROUND)
    if n <= 1:
        return T
    out = T.copy()
    outside = np.bincount(labels[~allowed & ~T].ravel(), minlength=n + 1)
    for k in range(1, n + 1):
        if k != ext and outside[k] == 0:
            out |= labels == k
    return out


def _is_solid_mask(space: SpaceModel, mask: np.ndarray) -> bool:
    return kernels.label(mask, 4)[1] == 1 and count_complement_components(space, mask) <= 1


def _geodesic_tree(space, allowed, subset):
    root = subset[0]
    src = np.zeros(space.shape, bool)
    src[root] = True
    dist = kernels.geodesic_distance(src, allowed, 4)
    T = np.zeros(space.shape, bool)
    for p in subset:
        if dist[p] < 0:
            return None
        for cell in _trace_back(dist, p, 4):
            T[cell] = True
    return T


def _cut_holes(space, comp, keep_cells, max_rounds=16):
    """Open the holes of ``comp`` into one complement piece by deleting 8-paths."""
    S = comp.copy()
    keep = np.zeros(space.shape, bool)
    for p in keep_cells:
        keep[p] = True
    for _ in range(max_rounds):
        labels, n, ext = label_components(space, ~S, Side.BACKGROUND)
        if n <= 1:
            return S
        sizes = np.bincount(labels.ravel(), minlength=n + 1)
        main = ext if ext is not None else int(np.argmax(sizes[1:]) + 1)
        others = [k for k in range(1, n + 1) if k != main]
        src = labels == main
        dist = kernels.geodesic_distance(src, src | (S & ~keep), 8)
        # smallest remaining piece first; connect it to the main piece
        target = min(others, key=lambda k: sizes[k])
        # cells of S next to the target piece that the search reached
        ring = ndimage.binary_dilation(labels == target, structure=_EIGHT) & S & (dist >= 0)
        if not ring.any():
            if ext is not None and not (labels == target).any():
                return None
            return None
        cand = np.argwhere(ring)
        best = min(map(tuple, cand), key=lambda rc: (dist[rc], rc))
        for cell in _trace_back(dist, best, 8):
            S[cell] = False
        # keep only the 4-piece holding the kept points
        lab, _ = kernels.label(S, 4)
        ids = {int(lab[p]) for p in keep_cells}
        if 0 in ids or len(ids) != 1:
            return None
        S = lab == ids.pop()
    return None


def find_solid_witness(m: SimpleSolid, mask: np.ndarray) -> np.ndarray | None:
    """A solid subset of a connected ``mask`` holding a majority, or None.

    Sound but not complete: every returned set is verified solid, while the
    search only tries geodesic trees (with enclosed pockets filled) and
    hole-cutting along shortest 8-paths.
    """
    space = m.space
    inside = [(int(r), int(c)) for r, c in zip(m.rows, m.cols) if mask[r, c]]
    if len(inside) < m.need:
        return None
    border = np.zeros(space.shape, bool)
    if not space.plane:
        border[0, :] = border[-1, :] = border[:, 0] = border[:, -1] = True
    for subset in itertools.combinations(inside, m.need):
        S = _cut_holes(space, mask, subset)
        if S is not None and _is_solid_mask(space, S):
            return S
        allowed_sets = [mask]
        if border.any():
            inner = mask & ~border
            for p in subset:
                inner[p] = True
            allowed_sets.append(inner)
        for allowed in allowed_sets:
            T = _geodesic_tree(space, allowed, list(subset))
            if T is None:
                continue
            for cand in (_holes_inside(space, T, mask), T):
                if _is_solid_mask(space, cand):
                    return cand
    return None


# ------------------------------------------------------- derived combinators


class Restricted(SetFunction):
    """``B -> base(A & B)``."""

    family = "restricted"

    def __init__(self, base: SetFunction, A: Region):
        super().__init__(base.space)
        if A.space != base.space:
            raise SpaceMismatch("restriction region belongs to a different space")
        self.base = base
        self.A = A
        self.signed = base.signed

    def _eval(self, B):
        return self.base.eval(self.A & B)

    def levels(self, f, thresholds, strict=True, within=None):
        region = self.A if within is None else self.A & within
        return self.base.levels(f, thresholds, strict, region)

    def describe(self):
        return {"family": self.family, "base": self.base.describe(), "A_cells": len(self.A)}


class LinearCombo(SetFunction):
    """``sum_i c_i m_i`` with nonnegative coefficients."""

    family = "linear_combo"

    def __init__(self, terms: Sequence[tuple[float, SetFunction]]):
        terms = [(float(c), m) for c, m in terms]
        if not terms:
            raise ValueError("linear combination needs at least one term")
        space = terms[0][1].space
        for c, m in terms:
            if c < 0:
                raise ValueError("coefficients must be nonnegative")
            if m.space != space:
                raise SpaceMismatch("terms belong to different spaces")
        super().__init__(space)
        self.terms = terms
        self.signed = any(m.signed for _, m in terms)

    def _eval(self, A):
        return float(sum(c * m.eval(A) for c, m in self.terms))

    def levels(self, f, thresholds, strict=True, within=None):
        out = np.zeros(len(thresholds))
        for c, m in self.terms:
            out += c * m.levels(f, thresholds, strict, within)
        return out

    def describe(self):
        return {"family": self.family, "terms": [[c, m.describe()] for c, m in self.terms]}


def restrict(m: SetFunction, A: Region) -> SetFunction:
    return Restricted(m, A)


def linear_combo(*terms: tuple[float, SetFunction]) -> SetFunction:
    return LinearCombo(terms)


def evaluate(m: SetFunction, A: Region) -> float:
    return m.eval(A)


# ----------------------------------------------------- norms and variation


def norm(m: SetFunction, budget: int = 64, named: Sequence[Region] = (), seed=0) -> float:
    """Exact for nonnegative set functions; a sampled lower bound otherwise."""
    if budget < 1:
        raise ValueError("budget must be at least 1")
    if not m.signed:
        return m.total()
    rng = sampling.rng_for(seed)
    cands = [m.space.full(), *named]
    cands += [sampling.random_region(m.space, rng) for _ in range(budget)]
    return max(abs(m.eval(R)) for R in cands)


def _neighbourhood(mask: np.ndarray) -> np.ndarray:
    return ndimage.binary_dilation(mask, structure=_EIGHT)


def total_variation_lb(m: SetFunction, U: Region, budget: int = 64, seed=0, named: Sequence[Region] = ()) -> float:
    """Lower bound on the largest ``sum |m(K_i)|`` over separated ``K_i`` in ``U``.

    Exhaustive when ``U`` has at most 12 cells.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    space = m.space
    if len(U) <= 12:
        return _variation_exhaustive(m, U)
    rng = sampling.rng_for(seed)
    best = abs(m.eval(U))
    comps = [c for c in _components(U)]
    best = max(best, sum(abs(m.eval(c)) for c in _separated_greedy(comps)))
    for R in named:
        best = max(best, abs(m.eval(R & U)))
    for _ in range(budget):
        fam = sampling.random_separated_family(space, rng, within=U, size=int(rng.integers(1, 5)))
        best = max(best, sum(abs(m.eval(K)) for K in fam))
    return float(best)


def _components(U: Region) -> list[Region]:
    labels, n = kernels.label(U.mask, 4)
    return [Region(U.space, labels == k) for k in range(1, n + 1)]


def _separated_greedy(regions: list[Region]) -> list[Region]:
    chosen: list[Region] = []
    for R in regions:
        if all(separated(R, Q) for Q in chosen):
            chosen.append(R)
    return chosen


def _variation_exhaustive(m: SetFunction, U: Region) -> float:
    cells = [tuple(rc) for rc in np.argwhere(U.mask)]
    n = len(cells)
    if n == 0:
        return 0.0
    idx = {c: i for i, c in enumerate(cells)}
    # bitmask of cells that must be dropped once cell i is used (itself + 8-neighbours)
    block = []
    for r, c in cells:
        b = 0
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                j = idx.get((r + dr, c + dc))
                if j is not None:
                    b |= 1 << j
        block.append(b)
    value = {}
    for sub in range(1, 1 << n):
        mask = np.zeros(m.space.shape, bool)
        for i in range(n):
            if sub >> i & 1:
                mask[cells[i]] = True
        value[sub] = abs(m.eval(Region(m.space, mask)))
    blocked = {}

    def nb(sub):
        b = blocked.get(sub)
        if b is None:
            b = 0
            for i in range(n):
                if sub >> i & 1:
                    b |= block[i]
            blocked[sub] = b
        return b

    best = {0: 0.0}
    for S in range(1, 1 << n):
        low = S & -S
        rest = S ^ low
        top = best[rest]
        sub = rest
        while True:
            K = sub | low
            cand = value[K] + best[S & ~nb(K)]
            if cand > top:
                top = cand
            if sub == 0:
                break
            sub = (sub - 1) & rest
        best[S] = top
    return float(best[(1 << n) - 1])


# ------------------------------------------------------------ classification


@dataclass
class Verdict:
    name: str
    passed: bool
    checked: int
    witness: dict | None = None

    def to_dict(self) -> dict:
        out = {"name": self.name, "pass": self.passed, "checked": self.checked}
        if self.witness is not None:
            out["witness"] = {
                k: (v.cells.tolist() if isinstance(v, Region) else v) for k, v in self.witness.items()
            }
        return out


@dataclass
class ClassificationReport:
    dtm: Verdict
    tm: Verdict
    measure: Verdict
    notes: list[str] = field(default_factory=list)

    @property
    def label(self) -> str:
        if not self.dtm.passed:
            return "not DTM"
        if not self.tm.passed:
            return "DTM, not TM"
        if not self.measure.passed:
            return "TM, not measure"
        return "measure"

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "dtm": self.dtm.to_dict(),
            "tm": self.tm.to_dict(),
            "measure": self.measure.to_dict(),
        }


def _candidate_pairs(space, named, rng, cases):
    """Named regions and their components first, then random ones."""
    base = [space.full(), *named]
    pool = list(base)
    for R in base:
        pool.extend(c for c in _components(R) if c != R)
    seen = set()
    uniq = []
    for R in pool:
        if R.key not in seen and not R.is_empty():
            seen.add(R.key)
            uniq.append(R)
    return uniq


def _unambiguous(R: Region) -> bool:
    """Same pieces under 4- and 8-adjacency.

    A region used as an open difference ``U - C`` is connected through corners
    in the continuum picture, yet regions are valued by their 4-components.
    Pairs where the two readings differ would report digitization artefacts
    rather than failures of the additivity criterion, so they are skipped.
    """
    if R.space.one_dimensional:
        return True
    return kernels.label(R.mask, 4)[1] == kernels.label(R.mask, 8)[1]


def _interior(U: Region) -> Region:
    """Cells of ``U`` none of whose 8-neighbours leave ``U``."""
    return U - dilate8(~U)


def _tm_pair_ok(C: Region, U: Region) -> bool:
    # a compact set inside an open one keeps a collar of U around it; every
    # grid region is both open and compact, so without this the criterion
    # would demand plain additivity
    return C.issubset(_interior(U)) and _unambiguous(C) and _unambiguous(U - C)


def _tm_pairs(space, pool, rng, cases):
    for U in pool:
        for C in pool:
            if C != U and _tm_pair_ok(C, U):
                yield C, U
    for _ in range(cases):
        for _attempt in range(8):
            U = pool[int(rng.integers(0, len(pool)))] if rng.random() < 0.5 else sampling.random_region(space, rng)
            C = sampling.random_subregion(_interior(U), rng)
            if not C.is_empty() and _tm_pair_ok(C, U):
                yield C, U
                break


def find_tm_violation(m: SetFunction, seed=0, cases: int = 200, named: Sequence[Region] = (), tol: float = TOL):
    """A pair ``C <= U`` with ``m(U) > m(C) + m(U - C)``, or None."""
    rng = sampling.rng_for(seed)
    pool = _candidate_pairs(m.space, named, rng, cases)
    for C, U in _tm_pairs(m.space, pool, rng, cases):
        if m.eval(U) > m.eval(C) + m.eval(U - C) + tol:
            return C, U
    return None


def classify(m: SetFunction, seed=0, cases: int = 200, named: Sequence[Region] = (), tol: float = TOL) -> ClassificationReport:
    """Sampled verdicts for the DTM axioms, the TM criterion and subadditivity."""
    m.require_unsigned()
    space = m.space
    rng = sampling.rng_for(seed)
    pool = _candidate_pairs(space, named, rng, cases)

    dtm = Verdict("dtm", True, 0)
    # additivity on separated pairs, monotonicity, superadditivity
    for i in range(cases):
        A, B = sampling.random_separated_pair(space, rng)
        dtm.checked += 1
        lhs, rhs = m.eval(A | B), m.eval(A) + m.eval(B)
        if abs(lhs - rhs) > tol:
            dtm.passed, dtm.witness = False, {"axiom": "additivity", "A": A, "B": B, "m(A+B)": lhs, "m(A)+m(B)": rhs}
            break
        S = sampling.random_region(space, rng)
        T = sampling.random_superregion(S, rng)
        if m.eval(S) > m.eval(T) + tol:
            dtm.passed, dtm.witness = False, {"axiom": "monotonicity", "A": S, "B": T}
            break
        fam = sampling.random_separated_family(space, rng, within=T, size=3)
        tot = sum(m.eval(K) for K in fam)
        if tot > m.eval(T) + tol:
            dtm.passed, dtm.witness = False, {"axiom": "superadditivity", "A": T, "sum": tot}
            break

    tm = Verdict("tm", True, 0)
    for C, U in _tm_pairs(space, pool, rng, cases):
        tm.checked += 1
        mu, mc, mr = m.eval(U), m.eval(C), m.eval(U - C)
        if mu > mc + mr + tol:
            tm.passed = False
            tm.witness = {"C": C, "U": U, "U-C": U - C, "m(U)": mu, "m(C)": mc, "m(U-C)": mr}
            break

    meas = Verdict("measure", True, 0)
    sub_pairs = [(A, B) for A in pool for B in pool if A != B]
    for _ in range(cases):
        sub_pairs.append((sampling.random_region(space, rng), sampling.random_region(space, rng)))
    for A, B in sub_pairs:
        meas.checked += 1
        lhs, rhs = m.eval(A | B), m.eval(A) + m.eval(B)
        if lhs > rhs + tol:
            meas.passed = False
            meas.witness = {"C": A, "K": B, "m(C+K)": lhs, "m(C)+m(K)": rhs}
            break
    if not tm.passed and meas.passed:
        meas.passed = False
        meas.witness = tm.witness
    return ClassificationReport(dtm, tm, meas)
