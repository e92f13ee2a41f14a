"""Quasi-integrals over grid set functions by exact breakpoint quadrature.

Level sets of a grid function only change at its distinct values, so the
integral of the distribution function over ``t`` is a finite sum.  Both the
strict and the weak distribution functions are evaluated independently on
every call and must agree to ``1e-12``.
"""
from __future__ import annotations

import csv
import math
import threading
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import sampling
from .grid_space import (
    GridFunction,
    Region,
    SpaceMismatch,
    dilate,
    dilate8,
    erode,
    oscillation,
    separated,
    urysohn_ramp,
)
from .measures import (
    TOL,
    CellMass,
    LinearCombo,
    Restricted,
    SetFunction,
    SignedMeasureError,
    _RegionCache,
    find_tm_violation,
)
from .report import PropertyReport, Record, at_most, close

AGREEMENT_TOL = 1e-12


class QuadratureMismatch(ArithmeticError):
    """The strict and weak distribution functions integrated differently."""


class NoWitnessError(RuntimeError):
    """No violation of the topological-measure criterion could be found."""


class _AgreementStats:
    """Process-wide record of every strict/weak comparison made."""

    def __init__(self):
        self._lock = threading.Lock()
        self.count = 0
        self.max_gap = 0.0

    def record(self, gap: float):
        with self._lock:
            self.count += 1
            if gap > self.max_gap:
                self.max_gap = gap

    def reset(self):
        with self._lock:
            self.count = 0
            self.max_gap = 0.0


agreement_stats = _AgreementStats()


@dataclass(frozen=True)
class StepFunction:
    """Piecewise constant on ``[t_i, t_{i+1})``; ``len(values) == len(breakpoints) - 1``.

    Below ``a`` the distribution equals ``below`` (the mass of the region); at
    and above ``b`` it vanishes.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    below: float = 0.0

    @property
    def a(self) -> float:
        return float(self.breakpoints[0]) if len(self.breakpoints) else 0.0

    @property
    def b(self) -> float:
        return float(self.breakpoints[-1]) if len(self.breakpoints) else 0.0

    def integral(self) -> float:
        widths = np.diff(self.breakpoints)
        return math.fsum((widths * self.values).tolist())

    def __call__(self, t: float) -> float:
        i = int(np.searchsorted(self.breakpoints, t, side="right")) - 1
        if i < 0:
            return float(self.below)
        if i >= len(self.values):
            return 0.0
        return float(self.values[i])

    def rows(self):
        for i, v in enumerate(self.values):
            yield float(self.breakpoints[i]), float(self.breakpoints[i + 1]), float(v)

    def write_csv(self, path_or_file, label: str | None = None):
        own = isinstance(path_or_file, str)
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh)
            w.writerow(["t_start", "t_end", "value"] + (["series"] if label else []))
            for row in self.rows():
                w.writerow([repr(x) for x in row] + ([label] if label else []))
        finally:
            if own:
                fh.close()


@dataclass(frozen=True)
class IntegralResult:
    value: float
    r1: StepFunction
    r2: StepFunction
    bounds_used: tuple[float, float]
    region: Region
    mass: float

    def __float__(self):
        return self.value


def _region_or_full(m: SetFunction, A: Region | None) -> Region:
    if A is None:
        return m.space.full()
    if A.space != m.space:
        raise SpaceMismatch("region belongs to a different space")
    return A


def _breakpoints(f: GridFunction, E: Region, bounds) -> np.ndarray:
    vals = np.unique(f.on(E))
    lo = min(float(vals[0]), 0.0)
    hi = float(vals[-1])
    if bounds is not None:
        a, b = (float(v) for v in bounds)
        if a > vals[0] or b < vals[-1]:
            raise ValueError(f"bounds [{a}, {b}] do not cover the range of f on the region")
        lo, hi = a, b
    pts = vals[vals > lo]
    bp = np.concatenate([[lo], pts])
    if hi > bp[-1]:
        bp = np.concatenate([bp, [hi]])
    return bp


def distribution(m: SetFunction, f: GridFunction, A: Region | None = None, variant: str = "strict", bounds=None) -> StepFunction:
    """Distribution function of ``f`` under ``m`` restricted to ``A``.

    ``strict`` pieces hold ``m(A & {f > t_i})`` (right-continuous form);
    ``weak`` pieces hold ``m(A & {f >= t_{i+1}})`` (left-continuous form).
    """
    m.require_unsigned()
    if f.space != m.space:
        raise SpaceMismatch("function belongs to a different space")
    E = _region_or_full(m, A)
    if E.is_empty():
        return StepFunction(np.zeros(0), np.zeros(0))
    bp = _breakpoints(f, E, bounds)
    mE = Restricted(m, E)
    if variant == "strict":
        vals = mE.levels(f, bp[:-1], strict=True)
    elif variant == "weak":
        vals = mE.levels(f, bp[1:], strict=False)
    else:
        raise ValueError(f"variant must be 'strict' or 'weak', not {variant!r}")
    return StepFunction(bp, np.asarray(vals, dtype=float), float(mE.total()))


def integrate(m: SetFunction, f: GridFunction, A: Region | None = None, bounds=None) -> IntegralResult:
    """``a m(A) + integral of t -> m(A & {f > t})`` over ``[a, b]``.

    ``a`` is the minimum of ``f`` on ``A`` when negative and 0 otherwise;
    ``bounds`` may widen ``[a, b]`` without changing the value.
    """
    m.require_unsigned()
    E = _region_or_full(m, A)
    if E.is_empty():
        empty = StepFunction(np.zeros(0), np.zeros(0))
        return IntegralResult(0.0, empty, empty, (0.0, 0.0), E, 0.0)
    r1 = distribution(m, f, E, "strict", bounds)
    r2 = distribution(m, f, E, "weak", bounds)
    mass = Restricted(m, E).total()
    base = r1.a * mass
    v1 = base + r1.integral()
    v2 = base + r2.integral()
    gap = abs(v1 - v2)
    agreement_stats.record(gap)
    if gap > AGREEMENT_TOL:
        raise QuadratureMismatch(f"strict/weak integrals differ by {gap:.3e}")
    return IntegralResult(v1, r1, r2, (r1.a, r1.b), E, mass)


def write_steps_csv(result: IntegralResult, path: str):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t_start", "t_end", "value", "series"])
        for name, sf in (("R1", result.r1), ("R2", result.r2)):
            for row in sf.rows():
                w.writerow([repr(x) for x in row] + [name])


# ------------------------------------------------------------ derived measures


class DerivedIntegral(SetFunction):
    """``A -> integral over A of g`` with respect to a nonnegative base."""

    family = "derived_integral"

    def __init__(self, base: SetFunction, g: GridFunction):
        base.require_unsigned()
        if g.space != base.space:
            raise SpaceMismatch("function belongs to a different space")
        super().__init__(base.space)
        self.base = base
        self.g = g
        self.signed = bool(g.min() < 0)
        self._cache = _RegionCache()

    def _eval(self, A):
        hit = self._cache.get(A.key)
        if hit is None:
            hit = integrate(self.base, self.g, A).value
            self._cache.put(A.key, hit)
        return hit

    def describe(self):
        return {"family": self.family, "base": self.base.describe(), "g_range": [self.g.min(), self.g.max()]}


def derived_measure(m: SetFunction, g: GridFunction) -> DerivedIntegral:
    return DerivedIntegral(m, g)


# --------------------------------------------------------- property checks


def _eq(name, a, b, tol=TOL, **detail):
    return close(name, a, b, tol, detail=detail or None)


def theorem33_suite(
    m: SetFunction,
    g: GridFunction,
    h: GridFunction | None = None,
    seed=0,
    cases: int = 20,
    named: Sequence[Region] = (),
    companion: SetFunction | None = None,
    tol: float = TOL,
) -> PropertyReport:
    """Algebraic and order properties of derived set functions.

    Every item is checked on the named regions and on ``cases`` random
    regions/functions.  ``companion`` is a second nonnegative set function
    for the linear-combination and domination items (a uniform cell mass by
    default).
    """
    m.require_unsigned()
    space = m.space
    rng = sampling.rng_for(seed)
    rep = PropertyReport("theorem33")
    lam = companion or CellMass(space, 1.0 / space.size)
    regions = [space.full(), *named]
    regions += [sampling.random_region(space, rng) for _ in range(cases)]
    h = h if h is not None else sampling.random_function(space, rng)

    def I(fn, A):
        return integrate(m, fn, A).value

    fails = {k: [] for k in ("b1", "b2", "b3", "b4", "b5", "b6", "b7", "b9", "b10", "b13", "b14", "i", "ii", "iii")}

    def check(key, rec):
        if not rec.passed:
            fails[key].append(rec)

    for k, A in enumerate(regions):
        gk = g if k % 2 == 0 else sampling.random_function(space, rng)
        hk = h if k % 3 == 0 else sampling.random_function(space, rng)
        muA = m.eval(A)
        vg = I(gk, A)
        # (b1) positive homogeneity and the zero function
        a = float(rng.choice([0.0, 0.5, 2.0, 3.0]))
        check("b1", _eq("b1", I(gk * a, A), a * vg, tol * max(1, abs(a * vg)), A=A))
        check("b1", _eq("b1-zero", I(space.constant(0.0), A), 0.0, tol, A=A))
        # (b2) disjointly supported pieces
        p, q = sampling.split_support(space, rng)
        check("b2", _eq("b2", I(p + q, A), I(p, A) + I(q, A), tol, A=A))
        check("b2", _eq("b2-signed", I(p - q, A), I(p, A) + I(-q, A), tol, A=A))
        # (b3) monotone in the integrand
        bump = sampling.random_function(space, rng, nonnegative=True)
        check("b3", at_most("b3", vg, I(gk + bump, A), tol, detail={"A": A}))
        if not A.is_empty():
            lo, hi = gk.min(A), gk.max(A)
            # (b4) bounds by inf/sup times the mass
            check("b4", at_most("b4-lower", muA * lo, vg, tol, detail={"A": A}))
            check("b4", at_most("b4-upper", vg, muA * hi, tol, detail={"A": A}))
            # (b5) locality
            other = GridFunction(space, np.where(A.mask, gk.values, hk.values))
            check("b5", _eq("b5", I(other, A), vg, tol, A=A))
            # (b7) integrand equal to one on A
            one_on_A = GridFunction(space, np.where(A.mask, 1.0, hk.values))
            check("b7", _eq("b7", I(one_on_A, A), muA, tol, A=A))
        # (b6) Lipschitz for nonnegative functions supported in A
        fa = GridFunction(space, np.where(A.mask, np.abs(gk.values), 0.0))
        fb = GridFunction(space, np.where(A.mask, np.abs(hk.values), 0.0))
        gap = abs(I(fa, A) - I(fb, A))
        check("b6", at_most("b6", gap, (fa - fb).supnorm() * muA, tol, detail={"A": A}))
        # (b9) linear combinations of base set functions
        c, d = float(rng.uniform(0, 2)), float(rng.uniform(0, 2))
        combo = LinearCombo([(c, m), (d, lam)])
        lhs = integrate(combo, gk, A).value
        rhs = c * vg + d * integrate(lam, gk, A).value
        check("b9", _eq("b9", lhs, rhs, tol * max(1.0, abs(rhs)), A=A))
        # (b10) domination of bases, nonnegative integrand
        gp = gk.clip(0.0)
        dom = LinearCombo([(1.0, m), (1.0, lam)])
        check("b10", at_most("b10", I(gp, A), integrate(dom, gp, A).value, tol, detail={"A": A}))
        # (b14) null sets and the absolute-continuity bound
        sup_abs = float(np.max(np.abs(gk.on(A)))) if not A.is_empty() else 0.0
        check("b14", at_most("b14-bound", abs(vg), muA * sup_abs, tol, detail={"A": A}))
        if muA == 0:
            check("b14", _eq("b14-null", vg, 0.0, tol, A=A))
        # (i) constants and constant shifts
        cst = float(rng.uniform(-2, 2))
        check("i", _eq("i-constant", I(space.constant(cst), A), cst * muA, tol, A=A))
        check("i", _eq("i-shift", I(gk + cst, A), vg + cst * muA, tol * 10, A=A))
        # (ii) g <= c with g = c around the support of a nonnegative h
        cap = float(rng.uniform(0, 2))
        S = sampling.random_region(space, rng)
        near = dilate8(S)
        gc = GridFunction(space, np.where(near.mask, cap, np.minimum(gk.values, cap)))
        hs = GridFunction(space, np.where(S.mask, np.abs(hk.values), 0.0))
        check("ii", _eq("ii", I(gc + hs, A), I(gc, A) + I(hs, A), tol * 10, A=A))
        # (iii) Lipschitz in the sup norm
        check("iii", at_most("iii", abs(vg - I(hk, A)), muA * (gk - hk).supnorm(), tol, detail={"A": A}))

    # (b13) cozero reduction for nonnegative integrands
    for k in range(max(1, cases // 4)):
        gp = (g if k == 0 else sampling.random_function(space, rng)).clip(0.0)
        check("b13", _eq("b13", I(gp, None), I(gp, gp.coz()), tol))

    for key, bad in fails.items():
        if bad:
            rec = bad[0]
            rec.detail = dict(rec.detail or {}, failures=len(bad))
            rep.add(Record(key, False, rec.expected, rec.actual, rec.tolerance, detail=rec.detail))
        else:
            rep.add(Record(key, True, tolerance=tol))
    return rep


@dataclass
class DefectReport:
    lhs: float
    rhs: float
    slack: float
    terms: dict

    @property
    def passed(self) -> bool:
        return self.slack >= -TOL


def subadditivity_defect(m: SetFunction, g: GridFunction, A: Region, B: Region, require_separated: bool = True) -> DefectReport:
    """Both sides of the oscillation bound on the derived set function of a union.

    By default ``A`` and ``B`` must be separated; with
    ``require_separated=False`` merely disjoint regions are accepted.
    """
    m.require_unsigned()
    if require_separated:
        if not separated(A, B):
            raise ValueError("regions must be separated (no shared or touching cells)")
    elif not A.isdisjoint(B):
        raise ValueError("regions must be disjoint")
    AB = A | B
    lhs = integrate(m, g, AB).value
    ia, ib = integrate(m, g, A).value, integrate(m, g, B).value
    osc = max(oscillation(g, A) if not A.is_empty() else 0.0, oscillation(g, B) if not B.is_empty() else 0.0)
    mass = m.eval(AB)
    rhs = ia + ib + mass * osc
    terms = {"int_A": ia, "int_B": ib, "mass_AB": mass, "oscillation": osc}
    return DefectReport(lhs, rhs, rhs - lhs, terms)


@dataclass
class CriterionReport:
    integral: float
    mass_V: float
    mass_cozero: float
    mass_zero: float
    nonnegative: bool
    nonpositive: bool
    records: list[Record] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def applicable(self) -> list[str]:
        return [r.name for r in self.records]


def cozero_test(m: SetFunction, f: GridFunction, V: Region | None = None, tol: float = TOL) -> CriterionReport:
    """Check every vanishing criterion that the sign pattern of ``f`` licenses."""
    m.require_unsigned()
    V = _region_or_full(m, V)
    I = integrate(m, f, V).value
    mV = m.eval(V)
    mc = m.eval(V & f.coz())
    mz = m.eval(V & f.zero_set())
    vals = f.on(V) if not V.is_empty() else np.zeros(0)
    nonneg = bool(np.all(vals >= 0))
    nonpos = bool(np.all(vals <= 0))
    rep = CriterionReport(I, mV, mc, mz, nonneg, nonpos)
    zero = abs(I) <= tol
    if mV <= tol:
        rep.records.append(_eq("null-set", I, 0.0, tol))
    if nonneg:
        rep.records.append(Record("y1-equivalence", zero == (mc <= tol), "int=0 iff m(V&Coz)=0", {"int": I, "m(V&Coz)": mc}))
        rep.records.append(_eq("y1-cozero-restriction", I, integrate(m, f, V & f.coz()).value, tol))
    if abs(mz - mV) <= tol:
        rep.records.append(_eq("y2", I, 0.0, tol))
    if nonpos:
        rep.records.append(Record("y3-equivalence", zero == (abs(mz - mV) <= tol), "int=0 iff m(V&Z)=m(V)", {"int": I, "m(V&Z)": mz, "m(V)": mV}))
    return rep


@dataclass
class Lemma45Result:
    f: GridFunction
    C: Region
    U: Region
    B: Region
    W: Region
    K: Region
    delta: float
    integral: float
    integral_neg: float
    outer_exact: bool = True


def lemma45_witness(m: SetFunction, seed=0, cases: int = 200, named: Sequence[Region] = (), max_rings: int = 64) -> Lemma45Result:
    """Nonnegative ``f`` with zero integral whose negative has negative integral.

    Starts from a pair ``C <= U`` with ``m(U) > m(C) + m(U - C)``; raises
    :class:`NoWitnessError` when none is found.
    """
    m.require_unsigned()
    space = m.space
    found = find_tm_violation(m, seed=seed, cases=cases, named=named)
    if found is None:
        raise NoWitnessError("no violation of the topological-measure criterion found")
    C, U = found
    X = space.full()
    rest = U - C
    target = m.eval(rest)
    candidates = []
    if target == 0:
        candidates.append(space.empty())
    r = 1
    while r <= max_rings:
        Bc = erode(rest, r)
        if Bc.is_empty() and target != 0:
            break
        candidates.append(Bc)
        r *= 2
    last_error = "no inner set with the right value leaves room for a ramp"
    for B in candidates:
        if abs(m.eval(B) - target) > TOL:
            continue
        G = (X - U) | B | C
        mG = m.eval(G)
        outer = []
        for s in (1, 2, 3, 4, 6, 8):
            W = dilate(G, s)
            if W.is_full():
                break
            delta = m.total() - m.eval(W)
            if delta <= TOL:
                last_error = "outer set carries the full mass"
                continue
            outer.append((abs(m.eval(W) - mG) > TOL, s, W, delta))
        if not outer:
            continue
        # prefer an outer set with m(W) = m(G); otherwise the bound on the
        # integral of -f still holds with delta = m(X) - m(W) > 0
        approx, s, W, delta = min(outer, key=lambda o: (o[0], o[1]))
        K = X - W
        f = urysohn_ramp(space, K, X - G, s)
        i_pos = integrate(m, f).value
        i_neg = integrate(m, -f).value
        if abs(i_pos) > TOL or i_neg > -delta + TOL:
            raise AssertionError(f"witness post-check failed: {i_pos}, {i_neg}, delta={delta}")
        return Lemma45Result(f, C, U, B, W, K, delta, i_pos, i_neg, outer_exact=not approx)
    raise NoWitnessError(last_error)


@dataclass
class ConvergenceReport:
    rows: list[dict]
    records: list[Record]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)


def schedule_functions(f: GridFunction, schedule: str = "down", n_max: int = 64, seed=0):
    """``(n, f_n)`` pairs converging uniformly to ``f``."""
    norm = f.supnorm()
    rng = sampling.rng_for(seed)
    for n in range(1, n_max + 1):
        if schedule == "down":
            yield n, f - norm / n
        elif schedule == "up":
            yield n, (f + norm / n).clip(0.0)
        elif schedule == "perturb":
            noise = rng.uniform(-1, 1, size=f.space.shape)
            yield n, f + GridFunction(f.space, noise * norm / n)
        elif schedule == "constant":
            yield n, f
        else:
            raise ValueError(f"unknown schedule {schedule!r}")


def convergence_probe(m: SetFunction, f: GridFunction, schedule: str = "down", n_max: int = 64, seed=0, tol: float = TOL) -> ConvergenceReport:
    """Integrals along a uniformly convergent sequence against the Lipschitz bound."""
    m.require_unsigned()
    target = integrate(m, f).value
    total = m.total()
    rows, recs = [], []
    prev = None
    monotone_ok = True
    for n, fn in schedule_functions(f, schedule, n_max, seed):
        val = integrate(m, fn).value
        dist = (fn - f).supnorm()
        delta = abs(val - target)
        bound = total * dist
        rows.append({"n": n, "integral": val, "delta": delta, "bound": bound})
        recs.append(at_most(f"lipschitz n={n}", delta, bound, tol))
        if prev is not None:
            if schedule == "down" and val < prev - tol:
                monotone_ok = False
            if schedule == "up" and val > prev + tol:
                monotone_ok = False
        prev = val
    if schedule in ("down", "up"):
        recs.append(Record("monotone approach", monotone_ok))
    return ConvergenceReport(rows, recs)
