"""Check reports: named quantities, signed margins and a pass/fail verdict.

A margin is a linear combination of recorded quantities, optionally taken
in absolute value (then negated) and divided by the absolute value of a
scale quantity.  Storing the recipe next to the value lets anyone recompute
every margin from the report alone.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Quantity:
    label: str
    value: float
    error: float = 0.0


@dataclass(frozen=True)
class Margin:
    label: str
    value: float
    terms: tuple[tuple[float, str], ...]
    scale: str | None = None
    absolute: bool = False


def evaluate_margin(terms, scale, absolute, values: dict[str, float]) -> float:
    s = math.fsum(c * values[label] for c, label in terms)
    if absolute:
        s = -abs(s)
    if scale is not None:
        s = s / abs(values[scale])
    return s


@dataclass
class CheckReport:
    name: str
    statement: str
    inputs: dict[str, Any]
    quantities: list[Quantity]
    margins: list[Margin]
    tolerance: float
    passed: bool
    seed: int
    runtime_ms: int = 0
    notes: list[str] = field(default_factory=list)

    def quantity(self, label: str) -> float:
        for q in self.quantities:
            if q.label == label:
                return q.value
        raise KeyError(label)

    def recompute_margins(self) -> list[float]:
        values = {q.label: q.value for q in self.quantities}
        return [evaluate_margin(m.terms, m.scale, m.absolute, values) for m in self.margins]

    @property
    def worst_margin(self) -> float:
        return min((m.value for m in self.margins), default=math.inf)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "statement": self.statement,
            "inputs": self.inputs,
            "quantities": [{"label": q.label, "value": q.value, "error": q.error} for q in self.quantities],
            "margins": [{"label": m.label, "value": m.value,
                         "terms": [[c, lab] for c, lab in m.terms],
                         "scale": m.scale, "absolute": m.absolute} for m in self.margins],
            "tolerance": self.tolerance,
            "passed": self.passed,
            "seed": self.seed,
            "notes": list(self.notes),
            "timing": {"runtime_ms": self.runtime_ms},
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "CheckReport":
        return cls(
            name=d["name"], statement=d["statement"], inputs=d["inputs"],
            quantities=[Quantity(q["label"], float(q["value"]), float(q["error"])) for q in d["quantities"]],
            margins=[Margin(m["label"], float(m["value"]), tuple((float(c), lab) for c, lab in m["terms"]),
                            m["scale"], bool(m["absolute"])) for m in d["margins"]],
            tolerance=float(d["tolerance"]), passed=bool(d["passed"]), seed=int(d["seed"]),
            runtime_ms=int(d.get("timing", {}).get("runtime_ms", 0)), notes=list(d.get("notes", [])),
        )


class ReportBuilder:
    """Accumulates quantities and margins, then seals a :class:`CheckReport`."""

    def __init__(self, name: str, statement: str, inputs: dict[str, Any],
                 tolerance: float, seed: int = 0):
        self.name = name
        self.statement = statement
        self.inputs = inputs
        self.tolerance = float(tolerance)
        self.seed = int(seed)
        self.quantities: list[Quantity] = []
        self.margins: list[Margin] = []
        self.notes: list[str] = []
        self._values: dict[str, float] = {}
        self._failed = False
        self._t0 = time.perf_counter()

    def q(self, label: str, value: float, error: float = 0.0) -> str:
        if label in self._values:
            raise ValueError(f"duplicate quantity label {label!r}")
        value, error = float(value), float(error)
        self.quantities.append(Quantity(label, value, error))
        self._values[label] = value
        return label

    def margin(self, label: str, terms, scale: str | None = None, absolute: bool = False) -> float:
        terms = tuple((float(c), lab) for c, lab in terms)
        value = evaluate_margin(terms, scale, absolute, self._values)
        self.margins.append(Margin(label, value, terms, scale, absolute))
        return value

    def at_least(self, label: str, lhs: str, rhs: str, scale: str | None = None) -> float:
        """Margin ``(lhs - rhs) / scale``; nonnegative when ``lhs >= rhs``."""
        return self.margin(label, [(1.0, lhs), (-1.0, rhs)], scale)

    def close(self, label: str, a: str, b: str, scale: str | None = None) -> float:
        """Margin ``-|a - b| / scale``."""
        return self.margin(label, [(1.0, a), (-1.0, b)], scale, absolute=True)

    def note(self, text: str) -> None:
        self.notes.append(text)

    def fail(self, text: str) -> None:
        """Mark the check failed regardless of margins (delegated error)."""
        self._failed = True
        self.notes.append(text)

    def absorb(self, report: CheckReport, prefix: str) -> None:
        """Copy another report's quantities and margins under ``prefix``."""
        for q in report.quantities:
            self.q(f"{prefix}.{q.label}", q.value, q.error)
        for m in report.margins:
            self.margin(f"{prefix}.{m.label}", [(c, f"{prefix}.{lab}") for c, lab in m.terms],
                        None if m.scale is None else f"{prefix}.{m.scale}", m.absolute)
        self.notes.extend(f"{prefix}: {n}" for n in report.notes)

    def build(self) -> CheckReport:
        passed = not self._failed and all(
            math.isfinite(m.value) and m.value >= -self.tolerance for m in self.margins)
        return CheckReport(
            name=self.name, statement=self.statement, inputs=self.inputs,
            quantities=list(self.quantities), margins=list(self.margins),
            tolerance=self.tolerance, passed=passed, seed=self.seed,
            runtime_ms=int(round(1000 * (time.perf_counter() - self._t0))), notes=list(self.notes),
        )
