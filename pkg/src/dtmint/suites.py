"""Example reproductions and property suites producing :class:`Report` objects."""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

from . import sampling
from .functionals import RampParams, as_functional, check_d_laws, roundtrip_records, theorem40_records
from .grid_space import GridFunction, Region, is_solid, oscillation
from .measures import (
    DTM_INNER_SOLID,
    TM_ADDITIVE,
    CellMass,
    LinearCombo,
    Restricted,
    SetFunction,
    SimpleSolid,
    classify,
)
from .quasi_integral import (
    NoWitnessError,
    convergence_probe,
    cozero_test,
    derived_measure,
    integrate,
    lemma45_witness,
    subadditivity_defect,
    theorem33_suite,
)
from .report import Record, Report, at_most, close
from .scenarios import Scenario, builtin

DISCREPANCY = "dual-extension discrepancy"


# ----------------------------------------------------------- reproductions


def _reproduce_example30(resolution=None) -> list[Record]:
    sc = builtin("example30", resolution)
    tol = sc.tol("continuum")
    mu, g, R = sc.measure("mu"), sc.function("g"), sc.regions
    nu = sc.measure("nu_g")
    recs = [
        close("nu_g(K)", nu.eval(R["K"]), -4.0, tol),
        close("nu_g(X)", nu.eval(sc.space.full()), -4.0, tol),
        close("nu_g(U)", nu.eval(R["U"]), 0.0, tol),
        close("nu_g(V)", nu.eval(R["V"]), 0.0, tol),
        Record("C is not solid", not is_solid(sc.space, R["C"]), False, is_solid(sc.space, R["C"])),
        Record("K is solid", is_solid(sc.space, R["K"]), True, is_solid(sc.space, R["K"])),
        close("mu(K)", mu.eval(R["K"]), 1.0, 0.0),
        close("mu(C) [dtm_inner_solid]", mu.eval(R["C"]), 0.0, 0.0),
        close("nu_g(C) [dtm_inner_solid]", nu.eval(R["C"]), 0.0, tol),
        close("nu_g(K) = inf_K g * mu(K)", nu.eval(R["K"]), g.min(R["K"]) * mu.eval(R["K"]), tol),
    ]
    tm = SimpleSolid(sc.space, mu.points, TM_ADDITIVE)
    tm_nu = derived_measure(tm, g)
    recs.append(close("mu(C) [tm_additive]", tm.eval(R["C"]), 1.0, 0.0, flag=DISCREPANCY))
    recs.append(close("nu_g(C) [tm_additive]", tm_nu.eval(R["C"]), -4.0, tol, flag=DISCREPANCY))
    return recs


def _reproduce_example32a(resolution=None) -> list[Record]:
    sc = builtin("example32a", resolution)
    tol = sc.tol("continuum")
    mg, R = sc.measure("mu_g"), sc.regions
    return [
        close("mu_g(X)", mg.eval(sc.space.full()), 1.0, tol),
        close("mu_g(K)", mg.eval(R["K"]), 0.0, tol),
        close("mu_g(V)", mg.eval(R["V"]), 0.0, tol),
    ]


def _reproduce_example32b(resolution=None, seed=0, cases=50) -> list[Record]:
    sc = builtin("example32b", resolution)
    tol = sc.tol("continuum")
    mu, mg, g, R = sc.measure("mu"), sc.measure("mu_g"), sc.function("g"), sc.regions
    X = sc.space.full()
    recs = [
        close("mu_g(X)", mg.eval(X), 2.0, tol),
        close("mu_g(K)", mg.eval(R["K"]), 1.0, tol),
        close("mu_g(V)", mg.eval(R["V"]), 0.0, tol),
        close("osc(g, X)", oscillation(g, X), 2.0, tol),
    ]
    rep = classify(mg, seed=seed, cases=cases, named=[R["K"], R["V"]])
    w = rep.tm.witness or {}
    is_kv = bool(w) and w["C"] == R["K"] and w["U"] == X
    recs.append(Record("classifier: DTM, not TM", rep.label == "DTM, not TM", "DTM, not TM", rep.label, detail=rep.tm.to_dict()))
    recs.append(Record("TM witness is (K, V)", is_kv, "C=K, U=X, U-C=V", {k: w[k] for k in ("m(U)", "m(C)", "m(U-C)")} if w else None))
    d = subadditivity_defect(mu, g, R["K"], R["V"], require_separated=False)
    recs.append(Record("oscillation bound on K + V", d.passed, d.rhs, d.lhs, detail={"slack": d.slack, **d.terms}))
    return recs


def _reproduce_example43(resolution=None) -> list[Record]:
    sc = builtin("example43", resolution)
    tol = sc.tol("continuum")
    mu, f = sc.measure("mu"), sc.function("f")
    X = sc.space.full()
    i_f, i_nf = integrate(mu, f).value, integrate(mu, -f).value
    r2 = integrate(mu, f).r2
    recs = [
        close("int f", i_f, -1.0, tol),
        close("int -f", i_nf, 0.0, tol),
        close("mu(Coz f)", mu.eval(f.coz()), 0.0, 0.0),
        close("R2(-1.5)", r2(-1.5), 1.0, 0.0),
        close("R2(-0.5)", r2(-0.5), 0.0, 0.0),
        close("mu(X) - mu(C) - mu(X - C)", mu.eval(X) - mu.eval(sc.regions["C"]) - mu.eval(X - sc.regions["C"]), 1.0, 0.0),
    ]
    cz = cozero_test(mu, f)
    recs.append(Record("sign-free cozero criterion fails", "y1-equivalence" not in cz.applicable and abs(cz.integral) > tol and cz.mass_cozero == 0,
                       "int f != 0 with m(Coz f) = 0", {"int": cz.integral, "m(Coz)": cz.mass_cozero}))
    recs.extend(r for r in cozero_test(mu, -f).records)
    return recs


def _reproduce_lemma45(resolution=None, seed=0, cases=200) -> list[Record]:
    recs = []
    sc43 = builtin("example43", resolution)
    sc32 = builtin("example32b", resolution and max(20, resolution // 2))
    targets = [
        ("containment", sc43.measure("mu"), list(sc43.regions.values())),
        ("mu_g (32b)", sc32.measure("mu_g"), [sc32.regions["K"], sc32.regions["V"]]),
    ]
    for name, m, named in targets:
        try:
            w = lemma45_witness(m, seed=seed, cases=cases, named=named)
        except NoWitnessError as exc:
            recs.append(Record(f"{name}: witness", False, "witness", str(exc)))
            continue
        recs.append(close(f"{name}: int f", w.integral, 0.0, 0.02, detail={"K_cells": len(w.K)}))
        recs.append(at_most(f"{name}: int -f <= -0.5", w.integral_neg, -0.5, 0.0, detail={"delta": w.delta, "outer_exact": w.outer_exact}))
        recs.append(Record(f"{name}: f >= 0", bool(w.f.values.min() >= 0), 0.0, float(w.f.values.min())))
    mass = CellMass(sc43.space, 1.0)
    try:
        lemma45_witness(mass, seed=seed, cases=cases)
        recs.append(Record("cell_mass: no witness", False, "no witness", "witness"))
    except NoWitnessError:
        recs.append(Record("cell_mass: no witness", True, "no witness", "no witness"))
    return recs


REPRODUCTIONS: dict[str, Callable[..., list[Record]]] = {
    "example30": _reproduce_example30,
    "example32a": _reproduce_example32a,
    "example32b": _reproduce_example32b,
    "example43": _reproduce_example43,
    "lemma45_demo": _reproduce_lemma45,
}


def reproduce(name: str, resolution: int | None = None) -> Report:
    if name not in REPRODUCTIONS:
        raise KeyError(name)
    rep = Report({"command": "reproduce", "name": name, "resolution": resolution})
    t0 = time.perf_counter()
    rep.extend(REPRODUCTIONS[name](resolution))
    rep.timing["seconds"] = time.perf_counter() - t0
    return rep


# ----------------------------------------------------------------- suites


def _members(sc: Scenario, unsigned=True) -> list[tuple[str, SetFunction]]:
    items = sc.unsigned_measures() if unsigned else sc.measures
    return sorted(items.items())


def _round_robin(sc: Scenario, cases: int):
    members = _members(sc)
    if not members:
        raise ValueError("scenario has no nonnegative measures")
    for i in range(cases):
        yield i, *members[i % len(members)]


def _named(sc: Scenario) -> list[Region]:
    return list(sc.regions.values())


def _fold(name: str, recs: list[Record]) -> Record:
    """Collapse many records of one property into one, keeping the first failure."""
    bad = [r for r in recs if not r.passed]
    if bad:
        r = bad[0]
        return Record(name, False, r.expected, r.actual, r.tolerance, detail={"failures": len(bad), "checked": len(recs), **(r.detail or {})})
    return Record(name, True, tolerance=recs[0].tolerance if recs else None, detail={"checked": len(recs)})


def _parallel(fn, items):
    # numpy and the compiled kernels release the GIL for the heavy parts;
    # results come back in input order
    with ThreadPoolExecutor(max_workers=4) as ex:
        return list(ex.map(fn, items))


def suite_axioms(sc: Scenario, seed: int, cases: int) -> list[Record]:
    tol = sc.tol("identity")
    named = _named(sc)
    X = sc.space.full()

    def case(args):
        i, name, m = args
        rng = np.random.default_rng([seed, i])
        out = {}
        A, B = sampling.random_separated_pair(sc.space, rng)
        if i < len(named) * 2:
            A = named[i % len(named)]
            B = sampling.separate_from(A, sampling.random_region(sc.space, rng))
        out["additivity"] = close(f"{name}", m.eval(A | B), m.eval(A) + m.eval(B), tol, detail={"A": A, "B": B})
        S = sampling.random_region(sc.space, rng)
        T = sampling.random_superregion(S, rng)
        out["monotonicity"] = at_most(f"{name}", m.eval(S), m.eval(T), tol, detail={"A": S, "B": T})
        fam = sampling.random_separated_family(sc.space, rng, within=T, size=int(rng.integers(2, 5)))
        out["superadditivity"] = at_most(f"{name}", sum(m.eval(K) for K in fam), m.eval(T), tol, detail={"A": T})
        out["range"] = Record(f"{name}", -tol <= m.eval(S) <= m.eval(X) + tol and m.eval(sc.space.empty()) == 0, [0, m.eval(X)], m.eval(S))
        if isinstance(m, SimpleSolid):
            comp = sampling.random_region(sc.space, rng)
            if is_solid(sc.space, comp):
                out["solid base rule"] = close(f"{name}", m.eval(comp), float(m.majority(comp.mask)), 0.0)
        return out

    results = _parallel(case, list(_round_robin(sc, cases)))
    keys = ["additivity", "monotonicity", "superadditivity", "range", "solid base rule"]
    return [_fold(f"axioms: {k}", [r[k] for r in results if k in r]) for k in keys if any(k in r for r in results)]


def suite_restriction(sc: Scenario, seed: int, cases: int) -> list[Record]:
    tol = sc.tol("identity")
    X = sc.space.full()

    def case(args):
        i, name, m = args
        rng = np.random.default_rng([seed, i])
        out = {}
        A = sampling.random_region(sc.space, rng)
        B = sampling.random_region(sc.space, rng)
        Bs = sampling.separate_from(A, B)
        probe = sampling.random_region(sc.space, rng)
        mA = Restricted(m, A)
        out["v7"] = close(name, mA.eval(X), m.eval(A), tol)
        out["definition"] = close(name, mA.eval(probe), m.eval(A & probe), tol)
        out["v3"] = close(name, Restricted(m, A | Bs).eval(probe), mA.eval(probe) + Restricted(m, Bs).eval(probe), tol, detail={"A": A, "B": Bs, "probe": probe})
        big = A | B
        out["v5"] = at_most(name, mA.eval(probe), Restricted(m, big).eval(probe), tol)
        n = LinearCombo([(1.0, m), (1.0, CellMass(sc.space, rng.uniform(0, 0.1, size=sc.space.shape)))])
        out["v4"] = at_most(name, mA.eval(probe), Restricted(n, A).eval(probe), tol)
        a, b = float(rng.uniform(0, 2)), float(rng.uniform(0, 2))
        other = CellMass(sc.space, rng.uniform(0, 1, size=sc.space.shape))
        lhs = Restricted(LinearCombo([(a, m), (b, other)]), A).eval(probe)
        rhs = a * mA.eval(probe) + b * Restricted(other, A).eval(probe)
        out["v6"] = close(name, lhs, rhs, tol * max(1.0, abs(rhs)))
        out["whole space"] = close(name, Restricted(m, X).eval(probe), m.eval(probe), tol)
        return out

    results = _parallel(case, list(_round_robin(sc, cases)))
    return [_fold(f"restriction: {k}", [r[k] for r in results]) for k in results[0]]


def suite_theorem33(sc: Scenario, seed: int, cases: int) -> list[Record]:
    tol = sc.tol("identity")
    members = _members(sc)
    per = max(1, cases // len(members))
    named = _named(sc)
    g = next(iter(sc.functions.values())) if sc.functions else sampling.random_function(sc.space, seed)

    def run(item):
        k, (name, m) = item
        return name, theorem33_suite(m, g, None, seed=np.random.default_rng([seed, k]), cases=per, named=named, tol=tol)

    out = []
    by_item: dict[str, list[Record]] = {}
    for name, rep in _parallel(run, list(enumerate(members))):
        for r in rep.records:
            by_item.setdefault(r.name, []).append(Record(f"{name}", r.passed, r.expected, r.actual, r.tolerance, detail=r.detail))
    for item, recs in by_item.items():
        out.append(_fold(f"theorem33: {item}", recs))
    out.extend(_integral_laws(sc, seed, cases))
    return out


def _integral_laws(sc: Scenario, seed: int, cases: int) -> list[Record]:
    """Homogeneity, monotonicity, bounds, orthogonal additivity, trimming, null sets."""
    tol = sc.tol("identity")

    def case(args):
        i, name, m = args
        rng = np.random.default_rng([seed, i, 33])
        f = sampling.random_function(sc.space, rng)
        A = sampling.random_region(sc.space, rng)
        If = integrate(m, f).value
        c = float(rng.uniform(0, 3))
        out = {"homogeneity": close(name, integrate(m, f * c).value, c * If, tol * max(1.0, abs(c * If)))}
        bump = sampling.random_function(sc.space, rng, nonnegative=True)
        out["monotonicity"] = at_most(name, If, integrate(m, f + bump).value, tol)
        tot = m.total()
        out["bounds"] = Record(name, tot * f.min() - tol <= If <= tot * f.max() + tol, [tot * f.min(), tot * f.max()], If)
        p, q = sampling.split_support(sc.space, rng)
        out["orthogonal additivity"] = close(name, integrate(m, p + q).value, integrate(m, p).value + integrate(m, q).value, tol)
        out["locality"] = close(name, integrate(m, GridFunction(sc.space, np.where(A.mask, f.values, bump.values)), A).value, integrate(m, f, A).value, tol)
        lo = min(f.min(), 0.0) - float(rng.uniform(0, 2))
        hi = f.max() + float(rng.uniform(0, 2))
        out["endpoint trim"] = close(name, integrate(m, f, bounds=(lo, hi)).value, If, tol)
        if m.eval(A) == 0:
            out["null set"] = close(name, integrate(m, f, A).value, 0.0, tol)
        # increasing chain exhausting A
        gp = f.clip(0.0)
        chain = [A & sampling.random_region(sc.space, rng) for _ in range(3)]
        acc, vals = sc.space.empty(), []
        for piece in chain + [A]:
            acc = acc | piece
            vals.append(integrate(m, gp, acc).value)
        out["exhaustion"] = Record(name, all(b >= a - tol for a, b in zip(vals, vals[1:])) and abs(vals[-1] - integrate(m, gp, A).value) <= tol, "nondecreasing", vals)
        return out

    results = _parallel(case, list(_round_robin(sc, cases)))
    keys = ["homogeneity", "monotonicity", "bounds", "orthogonal additivity", "locality", "endpoint trim", "null set", "exhaustion"]
    return [_fold(f"integral: {k}", [r[k] for r in results if k in r]) for k in keys if any(k in r for r in results)]


def suite_theorem35(sc: Scenario, seed: int, cases: int) -> list[Record]:
    def case(args):
        i, name, m = args
        rng = np.random.default_rng([seed, i, 35])
        A, B = sampling.random_separated_pair(sc.space, rng)
        g = sampling.random_function(sc.space, rng, nonnegative=True)
        d = subadditivity_defect(m, g, A, B)
        return Record(name, d.passed, d.rhs, d.lhs, 1e-9, detail={"A": A, "B": B, "slack": d.slack})

    recs = _parallel(case, list(_round_robin(sc, cases)))
    return [_fold("theorem35: oscillation bound", recs)]


def suite_theorem44(sc: Scenario, seed: int, cases: int) -> list[Record]:
    tol = sc.tol("identity")

    def case(args):
        i, name, m = args
        rng = np.random.default_rng([seed, i, 44])
        f = sampling.random_function(sc.space, rng)
        kind = i % 3
        if kind == 0:
            f = f.clip(0.0)
        elif kind == 1:
            f = f.clip(None, 0.0)
        V = sampling.random_region(sc.space, rng) if rng.random() < 0.7 else sc.space.full()
        rep = cozero_test(m, f, V, tol)
        return [Record(f"{name}: {r.name}", r.passed, r.expected, r.actual, r.tolerance, detail={"V": V}) for r in rep.records]

    results = _parallel(case, list(_round_robin(sc, cases)))
    by: dict[str, list[Record]] = {}
    for recs in results:
        for r in recs:
            by.setdefault(r.name.split(": ", 1)[1], []).append(r)
    return [_fold(f"theorem44: {k}", v) for k, v in sorted(by.items())]


def suite_functional_roundtrip(sc: Scenario, seed: int, cases: int) -> list[Record]:
    tol = sc.tol("continuum")
    out = []
    for k, (name, m) in enumerate(_members(sc)):
        rho = as_functional(m)
        laws = check_d_laws(rho, seed=np.random.default_rng([seed, k]), cases=max(1, cases // 20), tol=sc.tol("identity"))
        out.append(_fold(f"d-laws: {name}", laws))
        out.append(_fold(f"roundtrip: {name}", roundtrip_records(m, sc.regions, RampParams(), tol)))
    return out


def suite_theorem40(sc: Scenario, seed: int, cases: int) -> list[Record]:
    tol = sc.tol("continuum")
    out = []
    g = _nonnegative_function(sc)
    for name, m in _members(sc):
        out.append(_fold(f"theorem40: {name}", theorem40_records(m, g, sc.regions, RampParams(), tol)))
    return out


def _nonnegative_function(sc: Scenario) -> GridFunction:
    for f in sc.functions.values():
        if f.min() >= 0 and f.max() > 0:
            return f
    f = next(iter(sc.functions.values()), sc.space.constant(1.0))
    return f - f.min() + 1.0 if f.min() < 0 else f


def suite_convergence(sc: Scenario, seed: int, cases: int) -> list[Record]:
    f = next(iter(sc.functions.values()), sc.space.constant(1.0))
    n_max = max(1, min(64, cases * 4))

    def run(item):
        name, m = item
        recs = []
        for schedule, fn in (("down", f), ("up", f.clip(0.0)), ("perturb", f)):
            rep = convergence_probe(m, fn, schedule, n_max=n_max, seed=seed)
            recs.append(_fold(f"convergence {schedule}: {name}", rep.records))
        return recs

    return [r for recs in _parallel(run, _members(sc)) for r in recs]


SUITES = {
    "axioms": suite_axioms,
    "restriction": suite_restriction,
    "theorem33": suite_theorem33,
    "theorem35": suite_theorem35,
    "theorem44": suite_theorem44,
    "functional_roundtrip": suite_functional_roundtrip,
    "theorem40": suite_theorem40,
    "convergence": suite_convergence,
}


def run_suite(name: str, sc: Scenario, seed: int | None = None, cases: int = 200) -> Report:
    if name not in SUITES:
        raise KeyError(name)
    seed = sc.seed if seed is None else int(seed)
    rep = Report({"command": "suite", "name": name, "scenario": sc.name, "seed": seed, "cases": cases})
    t0 = time.perf_counter()
    rep.extend(SUITES[name](sc, seed, cases))
    rep.timing["seconds"] = time.perf_counter() - t0
    return rep


def classify_measure(sc: Scenario, name: str, seed: int | None = None, cases: int = 200) -> Report:
    """Classifier verdicts for one named measure of a scenario."""
    seed = sc.seed if seed is None else int(seed)
    m = sc.measure(name)
    rep = Report({"command": "classify", "scenario": sc.name, "measure": name, "seed": seed, "cases": cases})
    t0 = time.perf_counter()
    res = classify(m, seed=seed, cases=cases, named=_named(sc))
    for v in (res.dtm, res.tm, res.measure):
        rep.records.append(Record(v.name, True, None, v.passed, detail=v.to_dict()))
    rep.records.append(Record("label", res.dtm.passed, "DTM", res.label))
    rep.timing["seconds"] = time.perf_counter() - t0
    return rep
