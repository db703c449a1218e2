"""Suite reports: ordered check records serialized to deterministic JSON."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction

from ..algebra import Polynomial, format_poly


def jsonable(v):
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        return v if v == v and abs(v) != float("inf") else str(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, Polynomial):
        return format_poly(v)
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    if hasattr(v, "item"):  # numpy scalars
        return jsonable(v.item())
    return str(v)


@dataclass
class Check:
    name: str
    inputs: dict
    expected_provenance: str
    passed: bool
    residual: object = None
    margin: object = None
    witness: object = None

    def to_dict(self) -> dict:
        d = {"name": self.name, "inputs": jsonable(self.inputs),
             "expected_provenance": self.expected_provenance}
        if self.residual is not None:
            d["residual"] = jsonable(self.residual)
        if self.margin is not None:
            d["margin"] = jsonable(self.margin)
        if self.witness is not None:
            d["witness"] = jsonable(self.witness)
        d["pass"] = bool(self.passed)
        return d


@dataclass
class Report:
    suite: str
    checks: list = field(default_factory=list)
    wall_ms: float = 0.0
    _start: float = field(default_factory=time.perf_counter, repr=False)

    def add(self, name, inputs, provenance, passed, *, residual=None, margin=None, witness=None) -> Check:
        c = Check(name, inputs, provenance, bool(passed), residual, margin, witness)
        self.checks.append(c)
        return c

    def extend(self, other: "Report", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.inputs, c.expected_provenance, c.passed,
                                     c.residual, c.margin, c.witness))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def finish(self) -> "Report":
        self.wall_ms = (time.perf_counter() - self._start) * 1000.0
        return self

    def to_dict(self, timings: bool = True) -> dict:
        return {
            "suite": self.suite,
            "checks": [c.to_dict() for c in self.checks],
            "pass": self.passed,
            "wall_ms": round(self.wall_ms, 3) if timings else 0,
        }

    def to_json(self, timings: bool = True) -> str:
        return json.dumps(self.to_dict(timings), indent=2, sort_keys=False)
