"""Declarative scenarios: a space plus named measures, functions and regions."""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field

from .expr import ExpressionError
from .grid_space import GridFunction, Region, RegionSpecError, SpaceModel, build_space, function_from_spec, region_from_spec
from .measures import EXTENSION_MODES, CellMass, Containment, LinearCombo, Restricted, SetFunction, SimpleSolid
from .quasi_integral import DerivedIntegral

DEFAULT_TOLERANCES = {"continuum": 0.05, "identity": 1e-9}


class ScenarioError(ValueError):
    """The scenario is malformed or refers to something undefined."""


@dataclass
class Scenario:
    name: str
    space: SpaceModel
    measures: dict[str, SetFunction]
    functions: dict[str, GridFunction]
    regions: dict[str, Region]
    tolerances: dict[str, float]
    seed: int
    raw: dict = field(repr=False, default_factory=dict)

    def measure(self, name: str) -> SetFunction:
        try:
            return self.measures[name]
        except KeyError:
            raise ScenarioError(f"unknown measure {name!r}") from None

    def function(self, name: str) -> GridFunction:
        if name in self.functions:
            return self.functions[name]
        try:
            return function_from_spec(self.space, name)
        except (ExpressionError, ValueError):
            raise ScenarioError(f"unknown function {name!r}") from None

    def region(self, name: str | None) -> Region | None:
        if name is None:
            return None
        try:
            return region_from_spec(self.space, name, self.regions)
        except RegionSpecError:
            raise ScenarioError(f"unknown region {name!r}") from None

    def unsigned_measures(self) -> dict[str, SetFunction]:
        return {k: m for k, m in self.measures.items() if not m.signed}

    def tol(self, kind: str) -> float:
        return float(self.tolerances.get(kind, DEFAULT_TOLERANCES[kind]))


def _measure(space, name, specs, built, regions, functions, stack):
    if name in built:
        return built[name]
    if name not in specs:
        raise ScenarioError(f"unknown measure {name!r}")
    if name in stack:
        raise ScenarioError(f"measure {name!r} refers to itself")
    spec = specs[name]
    ref = lambda other: _measure(space, other, specs, built, regions, functions, stack | {name})  # noqa: E731
    fam = spec.get("family")
    try:
        if fam == "simple_solid":
            m = SimpleSolid(space, spec["points"], spec.get("extension_mode", "tm_additive"))
        elif fam == "containment":
            m = Containment(space, region_from_spec(space, spec["region"], regions))
        elif fam == "cell_mass":
            w = spec.get("weights", 1.0)
            if isinstance(w, (str, dict)):
                w = function_from_spec(space, w, functions).values
            m = CellMass(space, w)
        elif fam == "restricted":
            m = Restricted(ref(spec["base"]), region_from_spec(space, spec["region"], regions))
        elif fam == "linear_combo":
            m = LinearCombo([(c, ref(n)) for c, n in spec["terms"]])
        elif fam == "derived_integral":
            m = DerivedIntegral(ref(spec["base"]), function_from_spec(space, spec["function"], functions))
        else:
            raise ScenarioError(f"measure {name!r}: unknown family {fam!r}")
    except KeyError as exc:
        raise ScenarioError(f"measure {name!r}: missing field {exc.args[0]!r}") from None
    except (ValueError, RegionSpecError) as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"measure {name!r}: {exc}") from None
    built[name] = m
    return m


def load_scenario(source, extension_mode: str | None = None, name: str | None = None) -> Scenario:
    """Build a scenario from a JSON path or an already parsed dict."""
    if isinstance(source, dict):
        raw = copy.deepcopy(source)
    else:
        try:
            with open(source) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ScenarioError(f"cannot read scenario: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"scenario is not valid JSON: {exc}") from None
    if not isinstance(raw, dict) or "space" not in raw:
        raise ScenarioError("scenario needs a 'space' section")
    if extension_mode is not None and extension_mode not in EXTENSION_MODES:
        raise ScenarioError(f"extension mode must be one of {EXTENSION_MODES}")
    sp = raw["space"]
    try:
        space = build_space(sp["width"], sp.get("height", 1), sp["bounds"], sp.get("boundary_mode", "compact"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"bad space: {exc}") from None

    sections = {k: raw.get(k, {}) or {} for k in ("measures", "functions", "regions")}
    seen: dict[str, str] = {}
    for sec, items in sections.items():
        if not isinstance(items, dict):
            raise ScenarioError(f"section {sec!r} must be an object")
        for key in items:
            if key in seen:
                raise ScenarioError(f"name {key!r} is used in both {seen[key]} and {sec}")
            seen[key] = sec

    try:
        functions = {k: function_from_spec(space, v) for k, v in sections["functions"].items()}
    except (ExpressionError, ValueError, OSError) as exc:
        raise ScenarioError(f"bad function: {exc}") from None
    regions: dict[str, Region] = {}
    for k, v in sections["regions"].items():
        try:
            regions[k] = region_from_spec(space, v, regions)
        except (RegionSpecError, ExpressionError, ValueError) as exc:
            raise ScenarioError(f"region {k!r}: {exc}") from None

    mspecs = copy.deepcopy(sections["measures"])
    if extension_mode is not None:
        for spec in mspecs.values():
            if spec.get("family") == "simple_solid" and not spec.get("pin_mode"):
                spec["extension_mode"] = extension_mode
    built: dict[str, SetFunction] = {}
    for k in mspecs:
        _measure(space, k, mspecs, built, regions, functions, frozenset())
    measures = {k: built[k] for k in mspecs}

    tolerances = dict(DEFAULT_TOLERANCES)
    tolerances.update(raw.get("tolerances", {}) or {})
    if any(not (float(v) > 0) for v in tolerances.values()):
        raise ScenarioError("tolerances must be positive")
    return Scenario(name or raw.get("name", "scenario"), space, measures, functions, regions, tolerances, int(raw.get("seed", 0)), raw)


# ------------------------------------------------------------------ built-ins


def example30(resolution: int | None = None) -> dict:
    n = resolution or 400
    tri_c = {"polygon": [[-4, 0], [-2, 4], [0, 0]]}
    return {
        "name": "example30",
        "space": {"width": n, "height": n, "bounds": [-4, 0, 0, 4], "boundary_mode": "compact"},
        "measures": {
            "mu": {"family": "simple_solid", "points": [[-4, 0], [-4, 4], [0, 4]], "extension_mode": "dtm_inner_solid"},
            "nu_g": {"family": "derived_integral", "base": "mu", "function": "g"},
        },
        "functions": {"g": "x", "g_pos": "y + 1"},
        "regions": {
            "K": {"polygon": [[-4, 0], [-4, 4], [0, 0]]},
            "C": tri_c,
            "U": {"component": {"complement": tri_c}, "containing": [-4, 4], "side": "background"},
            "V": {"component": {"complement": tri_c}, "containing": [0, 4], "side": "background"},
            "top_band": {"predicate": "y >= 3"},
            "disk": {"predicate": "hypot(x + 1, y - 3) <= 0.8"},
        },
        "tolerances": {"continuum": 0.1},
        "seed": 30,
    }


def example32a(resolution: int | None = None) -> dict:
    n = resolution or 400
    return {
        "name": "example32a",
        "space": {"width": n, "height": n, "bounds": [-3, 5, -4, 4], "boundary_mode": "plane_window"},
        "measures": {
            "mu": {"family": "simple_solid", "points": [[0, 0], [1, 0], [4, 0]]},
            "mu_g": {"family": "derived_integral", "base": "mu", "function": "g"},
        },
        "functions": {"g": "max(0, 2 - hypot(x, y))"},
        "regions": {"K": {"segment": [[1, 0], [4, 0]]}, "V": {"complement": {"segment": [[1, 0], [4, 0]]}}},
        "tolerances": {"continuum": 0.05},
        "seed": 32,
    }


def example32b(resolution: int | None = None) -> dict:
    n = resolution or 400
    return {
        "name": "example32b",
        "space": {"width": n, "height": max(2, n // 2), "bounds": [1, 3, 0, 1], "boundary_mode": "compact"},
        "measures": {
            "mu": {"family": "simple_solid", "points": [[2, 0], [1, 1], [3, 1]]},
            "mu_g": {"family": "derived_integral", "base": "mu", "function": "g"},
        },
        "functions": {"g": "x"},
        "regions": {"K": {"polygon": [[1, 1], [1, 0], [3, 0]]}, "V": {"complement": {"polygon": [[1, 1], [1, 0], [3, 0]]}}},
        "tolerances": {"continuum": 0.05},
        "seed": 32,
    }


def example43(resolution: int | None = None) -> dict:
    n = resolution or 1200
    return {
        "name": "example43",
        "space": {"width": n, "height": 1, "bounds": [-6, 6], "boundary_mode": "plane_window"},
        "measures": {"mu": {"family": "containment", "region": "D"}},
        "functions": {"f": "min(abs(x) - 2, 0)", "neg_f": "-min(abs(x) - 2, 0)"},
        "regions": {"D": {"interval": [1, 4]}, "C": {"interval": [0, 2]}},
        "tolerances": {"continuum": 0.02},
        "seed": 43,
    }


def zoo(resolution: int | None = None) -> dict:
    """Small compact grid carrying one member of every family."""
    n = resolution or 10
    hi = n - 1
    pts3 = [[1, 1], [hi - 1, 2], [n // 2, hi - 1]]
    return {
        "name": "zoo",
        "space": {"width": n, "height": n, "bounds": [0, hi, 0, hi], "boundary_mode": "compact"},
        "measures": {
            "solid_tm": {"family": "simple_solid", "points": pts3, "extension_mode": "tm_additive", "pin_mode": True},
            "solid_dtm": {"family": "simple_solid", "points": pts3, "extension_mode": "dtm_inner_solid", "pin_mode": True},
            "solid5": {"family": "simple_solid", "points": [[0, 0], [hi, 0], [0, hi], [hi, hi], [n // 2, n // 2]]},
            "contain": {"family": "containment", "region": "D"},
            "mass": {"family": "cell_mass", "weights": "1 + (x + y) / 10"},
            "combo": {"family": "linear_combo", "terms": [[0.5, "solid_tm"], [0.02, "mass"]]},
            "restricted": {"family": "restricted", "base": "solid_tm", "region": "left"},
            "derived": {"family": "derived_integral", "base": "solid_tm", "function": "bump"},
        },
        "functions": {"f": "min(x, y) / 3 - 1", "bump": "max(0, 3 - hypot(x - 4, y - 4) / 2)", "h": "x - y"},
        "regions": {
            "D": {"rect": [3, 5, 3, 4]},
            "left": {"predicate": f"x <= {n // 2}"},
            "ring": {"difference": [{"rect": [1, hi - 1, 1, hi - 1]}, {"rect": [3, hi - 3, 3, hi - 3]}]},
            "block": {"rect": [0, n // 2, 0, n // 2]},
            "bar": {"predicate": "y <= 1"},
        },
        "seed": 0,
    }


BUILTINS = {
    "example30": example30,
    "example32a": example32a,
    "example32b": example32b,
    "example43": example43,
    "zoo": zoo,
}


def builtin(name: str, resolution: int | None = None, extension_mode: str | None = None) -> Scenario:
    if name not in BUILTINS:
        raise ScenarioError(f"unknown built-in scenario {name!r}")
    return load_scenario(BUILTINS[name](resolution), extension_mode=extension_mode, name=name)


def resolve(source: str | None, resolution: int | None = None, extension_mode: str | None = None, default: str = "zoo") -> Scenario:
    """A built-in name, a JSON path, or the default built-in."""
    if source is None:
        return builtin(default, resolution, extension_mode)
    if source in BUILTINS:
        return builtin(source, resolution, extension_mode)
    return load_scenario(source, extension_mode=extension_mode)


def dump_builtin(name: str, resolution: int | None = None) -> str:
    return json.dumps(BUILTINS[name](resolution), indent=2)

