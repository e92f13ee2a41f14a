"""Discretized spaces: cells, regions, digital connectivity and ramps.

A :class:`SpaceModel` is a ``height x width`` array of cells whose centers
are the affine image of the cell indices onto ``bounds``.  Regions are
boolean masks over the cells and play both the open and the compact role.

Connectivity follows the usual digital-topology pairing: regions use
4-adjacency, complements use 8-adjacency.  In ``plane_window`` mode a single
virtual exterior node, adjacent to every border cell, stands in for the
unbounded part of the plane; it is never part of a region.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
import shapely
from scipy import ndimage

from . import expr as _expr
from . import kernels

COMPACT = "compact"
PLANE_WINDOW = "plane_window"
BOUNDARY_MODES = (COMPACT, PLANE_WINDOW)

# relative slack for "closed" cell-box tests, so that a shape edge lying
# exactly on a cell boundary selects both neighbours deterministically
_CLOSED_EPS = 1e-9

_EIGHT = ndimage.generate_binary_structure(2, 2)


class SpaceMismatch(ValueError):
    """Objects from two different spaces were combined."""


class Side(enum.Enum):
    FOREGROUND = "foreground"
    BACKGROUND = "background"

    @property
    def connectivity(self) -> int:
        return 4 if self is Side.FOREGROUND else 8


@dataclass(frozen=True)
class SpaceModel:
    width: int
    height: int
    bounds: tuple[float, float, float, float]
    boundary_mode: str = COMPACT

    def __post_init__(self):
        if int(self.width) != self.width or int(self.height) != self.height:
            raise ValueError("width and height must be integers")
        if self.width < 1 or self.height < 1:
            raise ValueError(f"grid must have at least one cell, got {self.width}x{self.height}")
        x0, x1, y0, y1 = self.bounds
        if not all(math.isfinite(v) for v in self.bounds):
            raise ValueError("bounds must be finite")
        if not x0 < x1:
            raise ValueError(f"degenerate x bounds [{x0}, {x1}]")
        if self.height > 1 and not y0 < y1:
            raise ValueError(f"degenerate y bounds [{y0}, {y1}]")
        if self.boundary_mode not in BOUNDARY_MODES:
            raise ValueError(f"boundary_mode must be one of {BOUNDARY_MODES}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    @property
    def size(self) -> int:
        return self.width * self.height

    @property
    def plane(self) -> bool:
        return self.boundary_mode == PLANE_WINDOW

    @property
    def one_dimensional(self) -> bool:
        return self.height == 1

    @property
    def dx(self) -> float:
        x0, x1 = self.bounds[:2]
        return (x1 - x0) / (self.width - 1) if self.width > 1 else x1 - x0

    @property
    def dy(self) -> float:
        y0, y1 = self.bounds[2:]
        if self.height == 1:
            return 0.0
        return (y1 - y0) / (self.height - 1)

    @cached_property
    def xs(self) -> np.ndarray:
        x0, x1 = self.bounds[:2]
        if self.width == 1:
            return np.array([(x0 + x1) / 2])
        return x0 + np.arange(self.width) * self.dx

    @cached_property
    def ys(self) -> np.ndarray:
        y0, y1 = self.bounds[2:]
        if self.height == 1:
            return np.array([(y0 + y1) / 2])
        return y0 + np.arange(self.height) * self.dy

    @cached_property
    def grid(self) -> tuple[np.ndarray, np.ndarray]:
        X, Y = np.meshgrid(self.xs, self.ys)
        X.setflags(write=False)
        Y.setflags(write=False)
        return X, Y

    def full(self) -> "Region":
        return Region(self, np.ones(self.shape, dtype=bool))

    def empty(self) -> "Region":
        return Region(self, np.zeros(self.shape, dtype=bool))

    def region(self, mask) -> "Region":
        return Region(self, mask)

    def function(self, values) -> "GridFunction":
        return GridFunction(self, values)

    def constant(self, c: float) -> "GridFunction":
        return GridFunction(self, np.full(self.shape, float(c)))

    def cell_of(self, point: Sequence[float]) -> tuple[int, int]:
        """(row, col) of the cell nearest to a physical point inside the bounds."""
        x = float(point[0])
        y = float(point[1]) if len(point) > 1 else 0.0
        x0, x1, y0, y1 = self.bounds
        tol = 1e-9 * max(abs(x1 - x0), abs(y1 - y0), 1.0)
        if not (x0 - tol <= x <= x1 + tol) or (self.height > 1 and not (y0 - tol <= y <= y1 + tol)):
            raise ValueError(f"point {tuple(point)} lies outside the bounds {self.bounds}")
        col = 0 if self.width == 1 else int(math.floor((x - x0) / self.dx + 0.5 + 1e-9))
        row = 0 if self.height == 1 else int(math.floor((y - y0) / self.dy + 0.5 + 1e-9))
        return min(max(row, 0), self.height - 1), min(max(col, 0), self.width - 1)

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "bounds": list(self.bounds),
            "boundary_mode": self.boundary_mode,
        }


def build_space(width: int, height: int = 1, bounds=(0.0, 1.0, 0.0, 0.0), boundary_mode: str = COMPACT) -> SpaceModel:
    """Create a space; ``bounds`` is ``(x0, x1)`` for lines or ``(x0, x1, y0, y1)``."""
    bounds = tuple(float(b) for b in bounds)
    if len(bounds) == 2:
        bounds = bounds + (0.0, 0.0)
    if len(bounds) != 4:
        raise ValueError("bounds must have 2 or 4 entries")
    return SpaceModel(int(width), int(height), bounds, boundary_mode)


class Region:
    """An immutable set of cells of one space."""

    __slots__ = ("space", "mask", "_key", "_count")

    def __init__(self, space: SpaceModel, mask):
        mask = np.array(mask, dtype=bool, copy=True)
        if mask.size != space.size:
            raise ValueError(f"mask has {mask.size} cells, space has {space.size}")
        mask = mask.reshape(space.shape)
        mask.setflags(write=False)
        self.space = space
        self.mask = mask
        self._key = None
        self._count = None

    @classmethod
    def from_cells(cls, space: SpaceModel, cells) -> "Region":
        mask = np.zeros(space.size, dtype=bool)
        cells = np.asarray(list(cells), dtype=np.int64)
        if cells.size:
            if cells.min() < 0 or cells.max() >= space.size:
                raise ValueError("cell index out of range")
            mask[cells] = True
        return cls(space, mask)

    @property
    def key(self) -> bytes:
        if self._key is None:
            self._key = np.packbits(self.mask, axis=None).tobytes()
        return self._key

    @property
    def cells(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def __len__(self) -> int:
        if self._count is None:
            self._count = int(np.count_nonzero(self.mask))
        return self._count

    def is_empty(self) -> bool:
        return len(self) == 0

    def is_full(self) -> bool:
        return len(self) == self.space.size

    def _other(self, other: "Region") -> np.ndarray:
        if not isinstance(other, Region):
            return NotImplemented
        if other.space != self.space:
            raise SpaceMismatch("regions belong to different spaces")
        return other.mask

    def __and__(self, other):
        return Region(self.space, self.mask & self._other(other))

    def __or__(self, other):
        return Region(self.space, self.mask | self._other(other))

    def __sub__(self, other):
        return Region(self.space, self.mask & ~self._other(other))

    def __invert__(self):
        return Region(self.space, ~self.mask)

    def complement(self) -> "Region":
        return ~self

    def __eq__(self, other):
        return isinstance(other, Region) and other.space == self.space and other.key == self.key

    def __hash__(self):
        return hash((self.space, self.key))

    def issubset(self, other: "Region") -> bool:
        return not np.any(self.mask & ~self._other(other))

    def isdisjoint(self, other: "Region") -> bool:
        return not np.any(self.mask & self._other(other))

    def __repr__(self):
        return f"Region({len(self)}/{self.space.size} cells)"


class GridFunction:
    """Real values on the cells of a space (0 on the exterior node)."""

    __slots__ = ("space", "values")

    def __init__(self, space: SpaceModel, values):
        values = np.array(values, dtype=float, copy=True)
        if values.ndim == 0:
            values = np.full(space.shape, float(values))
        if values.size != space.size:
            raise ValueError(f"got {values.size} values for {space.size} cells")
        values = values.reshape(space.shape)
        if not np.all(np.isfinite(values)):
            raise ValueError("grid function values must be finite")
        values.setflags(write=False)
        self.space = space
        self.values = values

    @classmethod
    def from_expression(cls, space: SpaceModel, text: str) -> "GridFunction":
        X, Y = space.grid
        out = np.broadcast_to(_expr.parse(text)(X, Y), space.shape)
        return cls(space, out)

    def _coerce(self, other):
        if isinstance(other, GridFunction):
            if other.space != self.space:
                raise SpaceMismatch("functions belong to different spaces")
            return other.values
        return float(other)

    def __add__(self, other):
        return GridFunction(self.space, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.space, self.values - self._coerce(other))

    def __rsub__(self, other):
        return GridFunction(self.space, self._coerce(other) - self.values)

    def __mul__(self, other):
        return GridFunction(self.space, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.space, -self.values)

    def clip(self, lo=None, hi=None) -> "GridFunction":
        return GridFunction(self.space, np.clip(self.values, lo, hi))

    def supnorm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def coz(self) -> Region:
        return Region(self.space, self.values != 0)

    def zero_set(self) -> Region:
        return Region(self.space, self.values == 0)

    def on(self, region: Region) -> np.ndarray:
        if region.space != self.space:
            raise SpaceMismatch("region and function belong to different spaces")
        return self.values[region.mask]

    def min(self, region: Region | None = None) -> float:
        return float(self.values.min() if region is None else self.on(region).min())

    def max(self, region: Region | None = None) -> float:
        return float(self.values.max() if region is None else self.on(region).max())

    def __eq__(self, other):
        return isinstance(other, GridFunction) and other.space == self.space and np.array_equal(self.values, other.values)

    __hash__ = None

    def __repr__(self):
        return f"GridFunction(min={self.values.min():g}, max={self.values.max():g})"


def _check_space(space: SpaceModel, *objs):
    for o in objs:
        if o is not None and o.space != space:
            raise SpaceMismatch("object belongs to a different space")


# ---------------------------------------------------------------- connectivity


def _pad_exterior(mask: np.ndarray, value: bool) -> np.ndarray:
    if mask.shape[0] == 1:
        return np.pad(mask, ((0, 0), (1, 1)), constant_values=value)
    return np.pad(mask, 1, constant_values=value)


def _crop(a: np.ndarray, one_d: bool) -> np.ndarray:
    return a[:, 1:-1] if one_d else a[1:-1, 1:-1]


def label_components(space: SpaceModel, mask: np.ndarray, side: Side):
    """Label ``mask`` under the side's adjacency.

    Returns ``(labels, count, unbounded)``.  On the background side of a
    plane window the exterior node is included; its component label is
    ``unbounded`` (it may hold no cells, in which case it is still counted).
    Otherwise ``unbounded`` is None.
    """
    mask = np.asarray(mask, dtype=bool)
    conn = side.connectivity
    if side is Side.FOREGROUND or not space.plane:
        labels, count = kernels.label(mask, conn)
        return labels, count, None
    one_d = space.one_dimensional
    padded, count = kernels.label(_pad_exterior(mask, True), conn)
    ext = int(padded[0, 0])
    if one_d:
        right = int(padded[0, -1])
        if right != ext:
            # both ends of a line window touch the same exterior node
            lo, hi = min(ext, right), max(ext, right)
            padded[padded == hi] = lo
            padded[padded > hi] -= 1
            count -= 1
            ext = lo
    return _crop(padded, one_d), count, ext


def connected_components(space: SpaceModel, region: Region, side: Side = Side.FOREGROUND, with_unbounded: bool = False):
    """Partition ``region`` into maximal connected pieces.

    With ``with_unbounded=True`` returns ``(components, index)`` where
    ``index`` points at the component joined to the exterior node (plane
    windows, background side) or is None.
    """
    _check_space(space, region)
    labels, count, ext = label_components(space, region.mask, side)
    comps = [Region(space, labels == k) for k in range(1, count + 1)]
    if with_unbounded:
        return comps, (None if ext is None else ext - 1)
    return comps


def is_solid(space: SpaceModel, region: Region) -> bool:
    """Connected (4-adjacency) with connected complement (8-adjacency)."""
    _check_space(space, region)
    if region.is_empty():
        return False
    _, n_fg = kernels.label(region.mask, 4)
    if n_fg != 1:
        return False
    return count_complement_components(space, region.mask) <= 1


def count_complement_components(space: SpaceModel, mask: np.ndarray) -> int:
    comp = ~np.asarray(mask, dtype=bool)
    if not space.plane and not comp.any():
        return 0
    return label_components(space, comp, Side.BACKGROUND)[1]


def separated(A: Region, B: Region) -> bool:
    """No cell of ``A`` equals or touches (8-adjacency) a cell of ``B``."""
    if A.is_empty() or B.is_empty():
        return True
    grown = ndimage.binary_dilation(A.mask, structure=_EIGHT)
    return not np.any(grown & A._other(B))


# ------------------------------------------------------------------- distances


def distance_to(space: SpaceModel, target: np.ndarray, through_exterior: bool = False) -> np.ndarray:
    """4-adjacency cell-graph distance from every cell to ``target``.

    With ``through_exterior`` (plane windows) the exterior node counts as part
    of the target.  Unreachable cells (empty target) get ``inf``.
    """
    target = np.asarray(target, dtype=bool)
    if through_exterior and space.plane:
        one_d = space.one_dimensional
        d = kernels.geodesic_distance(_pad_exterior(target, True))
        d = _crop(d, one_d)
    else:
        if not target.any():
            return np.full(space.shape, np.inf)
        d = kernels.geodesic_distance(target)
    return d.astype(float)


def distance_to_complement(space: SpaceModel, U: Region) -> np.ndarray:
    return distance_to(space, ~U.mask, through_exterior=True)


def dilate8(region: Region) -> Region:
    """The region together with every cell touching it (8-adjacency)."""
    return Region(region.space, ndimage.binary_dilation(region.mask, structure=_EIGHT))


def dilate(region: Region, rings: int) -> Region:
    """Cells within 4-distance ``rings`` of the region (stays inside the grid)."""
    if rings <= 0 or region.is_empty():
        return region
    d = distance_to(region.space, region.mask)
    return Region(region.space, d <= rings)


def erode(region: Region, rings: int) -> Region:
    """Cells at 4-distance more than ``rings`` from the complement.

    The grid edge erodes only in plane windows, where it borders the exterior.
    """
    if rings <= 0 or region.is_empty():
        return region
    d = distance_to_complement(region.space, region)
    return Region(region.space, d > rings)


# -------------------------------------------------------------- level sets etc.


def level_set(f: GridFunction, t: float, variant: str = "strict", region: Region | None = None) -> Region:
    """``{f > t}`` (strict) or ``{f >= t}`` (weak), optionally intersected with ``region``."""
    if variant == "strict":
        mask = f.values > t
    elif variant == "weak":
        mask = f.values >= t
    else:
        raise ValueError(f"variant must be 'strict' or 'weak', not {variant!r}")
    if region is not None:
        _check_space(f.space, region)
        mask = mask & region.mask
    return Region(f.space, mask)


def urysohn_ramp(space: SpaceModel, K: Region, U: Region, margin: int) -> GridFunction:
    """Ramp equal to 1 on ``K``, 0 off ``U``, linear in the distance to ``X - U``."""
    _check_space(space, K, U)
    if margin < 1:
        raise ValueError("margin must be a positive number of cells")
    if not K.issubset(U):
        raise ValueError("K must be contained in U")
    d = distance_to_complement(space, U)
    m = float(margin)
    if not K.is_empty():
        m = min(m, float(d[K.mask].min()))
    with np.errstate(invalid="ignore"):
        vals = np.where(np.isinf(d), 1.0, np.clip(d / m, 0.0, 1.0))
    return GridFunction(space, vals)


def oscillation(f: GridFunction, A: Region) -> float:
    """``max f - min f`` over the cells of a nonempty region."""
    if A.is_empty():
        raise ValueError("oscillation over an empty region")
    v = f.on(A)
    return float(v.max() - v.min())


# -------------------------------------------------------------- region specs


class RegionSpecError(ValueError):
    pass


def _cell_boxes(space: SpaceModel):
    X, Y = space.grid
    hx = space.dx / 2 * (1 + _CLOSED_EPS) if space.width > 1 else space.dx / 2
    hy = space.dy / 2 * (1 + _CLOSED_EPS)
    hx += _CLOSED_EPS * abs(space.dx)
    hy += _CLOSED_EPS * abs(space.dy)
    return X, Y, hx, hy


def _cover(space: SpaceModel, geom) -> np.ndarray:
    """Cells whose closed cell box meets ``geom``."""
    X, Y, hx, hy = _cell_boxes(space)
    gx0, gy0, gx1, gy1 = geom.bounds
    cand = (X + hx >= gx0) & (X - hx <= gx1) & (Y + hy >= gy0) & (Y - hy <= gy1)
    out = np.zeros(space.shape, dtype=bool)
    if not cand.any():
        return out
    cx, cy = X[cand], Y[cand]
    boxes = shapely.box(cx - hx, cy - hy, cx + hx, cy + hy)
    shapely.prepare(geom)
    out[cand] = shapely.intersects(geom, boxes)
    return out


def _center(space: SpaceModel, geom) -> np.ndarray:
    X, Y = space.grid
    shapely.prepare(geom)
    return shapely.intersects_xy(geom, X.ravel(), Y.ravel()).reshape(space.shape)


def _points(spec, name, minimum):
    try:
        pts = [tuple(float(c) for c in p) for p in spec]
    except (TypeError, ValueError):
        raise RegionSpecError(f"{name} vertices must be coordinate pairs") from None
    if len(pts) < minimum or any(len(p) != 2 for p in pts):
        raise RegionSpecError(f"{name} needs at least {minimum} (x, y) vertices")
    return pts


def region_from_spec(space: SpaceModel, spec, named: dict | None = None) -> Region:
    """Build a region from a declarative spec.

    Supported forms (JSON-shaped): a name of a region in ``named`` (``"X"`` is
    the whole space), ``{"polygon": [[x, y], ...], "rule": "cover"|"center"}``,
    ``{"segment": [[x, y], ...]}``, ``{"interval": [a, b]}``,
    ``{"rect": [x0, x1, y0, y1]}``, ``{"predicate": "expr"}``,
    ``{"cells": [i, ...] | [[row, col], ...]}``, ``{"points": [[x, y], ...]}``,
    ``{"all": true}``, ``{"empty": true}``, set algebra via ``complement``,
    ``union``, ``intersection``, ``difference``, and
    ``{"component": spec, "containing": [x, y], "side": ...}``.
    """
    named = named or {}
    if isinstance(spec, Region):
        _check_space(space, spec)
        return spec
    if isinstance(spec, str):
        if spec in named:
            return named[spec]
        if spec == "X":
            return space.full()
        raise RegionSpecError(f"unknown region {spec!r}")
    if not isinstance(spec, dict):
        raise RegionSpecError(f"region spec must be a name or an object, got {type(spec).__name__}")
    sub = lambda s: region_from_spec(space, s, named)  # noqa: E731

    if "polygon" in spec:
        pts = _points(spec["polygon"], "polygon", 3)
        geom = shapely.Polygon(pts)
        if geom.area == 0:
            raise RegionSpecError("polygon has zero area")
        rule = spec.get("rule", "cover")
        if rule == "cover":
            return Region(space, _cover(space, geom))
        if rule == "center":
            return Region(space, _center(space, geom))
        raise RegionSpecError(f"unknown polygon rule {rule!r}")
    if "segment" in spec:
        pts = _points(spec["segment"], "segment", 1)
        geom = shapely.LineString(pts) if len(pts) > 1 else shapely.Point(pts[0])
        return Region(space, _cover(space, geom))
    if "rect" in spec:
        x0, x1, *ys = (float(v) for v in spec["rect"])
        y0, y1 = ys if ys else (space.bounds[2], space.bounds[3])
        if x1 < x0 or y1 < y0:
            raise RegionSpecError("rect bounds out of order")
        return Region(space, _cover(space, shapely.box(x0, y0, x1, y1)))
    if "interval" in spec:
        a, b = (float(v) for v in spec["interval"])
        if b < a:
            raise RegionSpecError("interval bounds out of order")
        X, _, hx, _ = _cell_boxes(space)
        return Region(space, (X + hx >= a) & (X - hx <= b))
    if "predicate" in spec:
        try:
            X, Y = space.grid
            val = _expr.parse(spec["predicate"])(X, Y)
        except _expr.ExpressionError as exc:
            raise RegionSpecError(str(exc)) from None
        val = np.broadcast_to(np.asarray(val), space.shape)
        if val.dtype != bool:
            raise RegionSpecError("predicate must evaluate to a comparison")
        return Region(space, val)
    if "cells" in spec:
        cells = list(spec["cells"])
        if cells and isinstance(cells[0], (list, tuple)):
            cells = [int(r) * space.width + int(c) for r, c in cells]
        return Region.from_cells(space, cells)
    if "points" in spec:
        mask = np.zeros(space.shape, dtype=bool)
        for p in spec["points"]:
            mask[space.cell_of(p)] = True
        return Region(space, mask)
    if spec.get("all"):
        return space.full()
    if spec.get("empty"):
        return space.empty()
    if "complement" in spec:
        return ~sub(spec["complement"])
    if "union" in spec:
        out = space.empty()
        for s in spec["union"]:
            out = out | sub(s)
        return out
    if "intersection" in spec:
        out = space.full()
        for s in spec["intersection"]:
            out = out & sub(s)
        return out
    if "difference" in spec:
        first, *rest = spec["difference"]
        out = sub(first)
        for s in rest:
            out = out - sub(s)
        return out
    if "component" in spec:
        base = sub(spec["component"])
        side = Side(spec.get("side", "foreground"))
        cell = space.cell_of(spec["containing"])
        for comp in connected_components(space, base, side):
            if comp.mask[cell]:
                return comp
        raise RegionSpecError(f"no component of the region contains {spec['containing']}")
    raise RegionSpecError(f"unrecognised region spec keys: {sorted(spec)}")


def function_from_spec(space: SpaceModel, spec, named: dict | None = None) -> GridFunction:
    """``"expr"`` string, ``{"expr": ...}``, ``{"csv": path}``, ``{"values": [...]}`` or a named function."""
    named = named or {}
    if isinstance(spec, GridFunction):
        return spec
    if isinstance(spec, str):
        if spec in named:
            return named[spec]
        return GridFunction.from_expression(space, spec)
    if isinstance(spec, (int, float)):
        return space.constant(spec)
    if not isinstance(spec, dict):
        raise ValueError(f"function spec must be a string or object, got {type(spec).__name__}")
    if "expr" in spec:
        return GridFunction.from_expression(space, spec["expr"])
    if "values" in spec:
        return GridFunction(space, np.asarray(spec["values"], dtype=float))
    if "csv" in spec:
        vals = np.loadtxt(spec["csv"], delimiter=",", ndmin=2)
        return GridFunction(space, vals)
    raise ValueError(f"unrecognised function spec keys: {sorted(spec)}")
