"""Functionals on grid functions and the set functions they induce.

A set function gives a functional through its quasi-integral; a functional
gives back a set function by testing it on ramp functions squeezed around a
region.  Ramps are the grid stand-in for Urysohn functions: with a margin of
one cell both the inner and the outer ramp are the indicator of the region,
so the bracket closes exactly at the end of a shrinking schedule.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import sampling
from .grid_space import GridFunction, Region, SpaceMismatch, SpaceModel, distance_to, distance_to_complement
from .measures import TOL, SetFunction
from .quasi_integral import integrate
from .report import Record, close


class DLawError(ValueError):
    """A functional failed the homogeneity/monotonicity/orthogonality smoke test."""


@dataclass(frozen=True)
class Functional:
    """A map from grid functions of one space to reals."""

    space: SpaceModel
    evaluate: Callable[[GridFunction], float]
    provenance: str = "user"

    def __call__(self, f: GridFunction) -> float:
        if f.space != self.space:
            raise SpaceMismatch("function belongs to a different space")
        return float(self.evaluate(f))

    def composed(self, g: GridFunction) -> "Functional":
        """``f -> rho(f * g)``."""
        return Functional(self.space, lambda f: self(f * g), f"composed({self.provenance})")


def as_functional(m: SetFunction) -> Functional:
    m.require_unsigned()
    return Functional(m.space, lambda f: integrate(m, f).value, f"from_measure({m.family})")


def zero_functional(space: SpaceModel) -> Functional:
    return Functional(space, lambda f: 0.0, "zero")


def check_d_laws(rho: Functional, seed=0, cases: int = 3, tol: float = TOL) -> list[Record]:
    """Homogeneity, monotonicity and orthogonal additivity on random inputs."""
    rng = sampling.rng_for(seed)
    space = rho.space
    out = []
    for _ in range(cases):
        f = sampling.random_function(space, rng, nonnegative=True)
        a = float(rng.uniform(0.1, 3.0))
        out.append(close("d1", rho(f * a), a * rho(f), tol * max(1.0, abs(a * rho(f)))))
        g = GridFunction(space, f.values * rng.uniform(0, 1, size=space.shape))
        out.append(Record("d2", rho(g) <= rho(f) + tol, rho(f), rho(g), tol))
        p, q = sampling.split_support(space, rng)
        out.append(close("d3", rho(p + q), rho(p) + rho(q), tol))
    return out


@dataclass(frozen=True)
class RampParams:
    margin: int = 1
    shrink_schedule: tuple[int, ...] = (8, 4, 2, 1)

    def __post_init__(self):
        sched = tuple(int(s) for s in self.shrink_schedule)
        object.__setattr__(self, "shrink_schedule", sched)
        if self.margin < 1 or any(s < 1 for s in sched):
            raise ValueError("margins must be at least one cell")
        if any(b >= a for a, b in zip(sched, sched[1:])):
            raise ValueError("shrink schedule must be strictly decreasing")

    @property
    def margins(self) -> tuple[int, ...]:
        return self.shrink_schedule or (self.margin,)


def inner_ramp(A: Region, margin: int) -> GridFunction:
    """``0 <= f <= 1`` supported in ``A``, equal to 1 at depth ``margin``."""
    d = distance_to_complement(A.space, A)
    with np.errstate(invalid="ignore"):
        vals = np.where(np.isinf(d), 1.0, np.clip(d / margin, 0.0, 1.0))
    return GridFunction(A.space, vals)


def outer_ramp(A: Region, margin: int) -> GridFunction:
    """``f >= 1_A``, decaying to 0 within ``margin`` rings around ``A``."""
    if A.is_empty():
        return A.space.constant(0.0)
    d = distance_to(A.space, A.mask)
    return GridFunction(A.space, np.clip(1.0 - d / margin, 0.0, 1.0))


@dataclass
class Bracket:
    lower: float
    upper: float
    steps: list[dict] = field(default_factory=list)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def monotone(self) -> bool:
        lo = [s["inner"] for s in self.steps]
        hi = [s["outer"] for s in self.steps]
        return all(b >= a - TOL for a, b in zip(lo, lo[1:])) and all(b <= a + TOL for a, b in zip(hi, hi[1:]))


class FunctionalMeasure(SetFunction):
    """Set function recovered from a functional through ramp families."""

    family = "functional_measure"

    def __init__(self, rho: Functional, ramps: RampParams | None = None):
        super().__init__(rho.space)
        self.rho = rho
        self.ramps = ramps or RampParams()

    def bracket(self, A: Region) -> Bracket:
        """Inner-ramp sup (open role) and outer-ramp inf (compact role) per margin."""
        if A.space != self.space:
            raise SpaceMismatch("region belongs to a different space")
        if A.is_empty():
            return Bracket(0.0, 0.0, [])
        lo, hi = -np.inf, np.inf
        steps = []
        for mg in self.ramps.margins:
            inner = self.rho(inner_ramp(A, mg))
            outer = self.rho(outer_ramp(A, mg))
            lo, hi = max(lo, inner), min(hi, outer)
            steps.append({"margin": mg, "inner": inner, "outer": outer, "lower": lo, "upper": hi})
        return Bracket(float(lo), float(hi), steps)

    def _eval(self, A):
        return self.bracket(A).upper

    def describe(self):
        return {"family": self.family, "provenance": self.rho.provenance, "schedule": list(self.ramps.margins)}


def measure_of_functional(rho: Functional, ramps: RampParams | None = None, check: bool = True, seed=0) -> FunctionalMeasure:
    if check:
        bad = [r for r in check_d_laws(rho, seed) if not r.passed]
        if bad:
            raise DLawError(f"functional fails {bad[0].name}: expected {bad[0].expected}, got {bad[0].actual}")
    return FunctionalMeasure(rho, ramps)


@dataclass
class MuHatResult:
    value: float
    steps: list[dict]

    @property
    def nonincreasing(self) -> bool:
        vals = [s["value"] for s in self.steps]
        return all(b <= a + TOL for a, b in zip(vals, vals[1:]))


def mu_hat(rho: Functional, g: GridFunction, A: Region, ramps: RampParams | None = None) -> MuHatResult:
    """Infimum of ``rho(f g)`` over outer ramps ``f >= 1_A`` along the schedule."""
    if g.min() < 0:
        raise ValueError("g must be nonnegative")
    ramps = ramps or RampParams()
    steps = []
    best = np.inf
    for mg in ramps.margins:
        v = rho(outer_ramp(A, mg) * g)
        best = min(best, v)
        steps.append({"margin": mg, "value": v})
    return MuHatResult(float(best), steps)


def roundtrip_records(m: SetFunction, regions: dict[str, Region], ramps: RampParams | None = None, tol: float = 0.05) -> list[Record]:
    """Ramp brackets of ``as_functional(m)`` against the true values."""
    fm = measure_of_functional(as_functional(m), ramps, check=False)
    out = []
    for name, A in regions.items():
        br = fm.bracket(A)
        truth = m.eval(A)
        ok = br.monotone and br.lower - tol <= truth <= br.upper + tol and br.width <= tol
        out.append(Record(f"roundtrip {name}", ok, truth, [br.lower, br.upper], tol, detail={"steps": br.steps}))
    return out


def theorem40_records(m: SetFunction, g: GridFunction, regions: dict[str, Region], ramps: RampParams | None = None, tol: float = 0.05) -> list[Record]:
    """``mu_hat`` from the functional against the derived integral on each region."""
    rho = as_functional(m)
    out = []
    for name, A in regions.items():
        exact = integrate(m, g, A).value
        mh = mu_hat(rho, g, A, ramps)
        above = all(s["value"] >= exact - TOL for s in mh.steps)
        ok = abs(mh.value - exact) <= tol and mh.nonincreasing and above
        out.append(Record(f"mu_hat {name}", ok, exact, mh.value, tol, detail={"steps": mh.steps}))
    return out
