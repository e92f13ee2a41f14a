"""Check records and reports with a stable JSON schema."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .grid_space import Region


def _plain(v):
    if isinstance(v, Region):
        return v.cells.tolist()
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


@dataclass
class Record:
    name: str
    passed: bool
    expected: Any = None
    actual: Any = None
    tolerance: float | None = None
    flag: str | None = None
    detail: dict | None = None

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "expected": _plain(self.expected),
            "actual": _plain(self.actual),
            "tolerance": self.tolerance,
            "pass": bool(self.passed),
        }
        if self.flag:
            out["flag"] = self.flag
        if self.detail:
            out["detail"] = _plain(self.detail)
        return out


def close(name: str, actual: float, expected: float, tol: float, **kw) -> Record:
    return Record(name, abs(actual - expected) <= tol, expected, actual, tol, **kw)


def at_most(name: str, lhs: float, rhs: float, tol: float, **kw) -> Record:
    """``lhs <= rhs`` with slack floor ``-tol``."""
    return Record(name, lhs <= rhs + tol, rhs, lhs, tol, **kw)


@dataclass
class Report:
    command: dict
    records: list[Record] = field(default_factory=list)
    counterexamples: list[dict] = field(default_factory=list)
    timing: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def add(self, rec: Record) -> Record:
        self.records.append(rec)
        if not rec.passed and rec.detail:
            self.counterexamples.append({"record": rec.name, **_plain(rec.detail)})
        return rec

    def extend(self, recs):
        for r in recs:
            self.add(r)

    def failures(self) -> list[Record]:
        return [r for r in self.records if not r.passed]

    def body(self) -> dict:
        return {
            "command": _plain(self.command),
            "pass": self.passed,
            "records": [r.to_dict() for r in self.records],
            "counterexamples": self.counterexamples,
        }

    def to_dict(self) -> dict:
        out = self.body()
        out["timing"] = self.timing
        return out

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict() if timing else self.body(), indent=2, sort_keys=False)


@dataclass
class PropertyReport:
    """Per-item pass/fail records of a property suite."""

    suite: str
    records: list[Record] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def add(self, rec: Record):
        self.records.append(rec)

    def failures(self):
        return [r for r in self.records if not r.passed]
