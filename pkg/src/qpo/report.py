"""Property reports: one record per checked property, nothing omitted."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field


@dataclass(frozen=True)
class PropertyRecord:
    name: str
    passed: bool | None      # None = informational, no pass bound
    measured: float
    bound: float | None = None
    worst_location: float | None = None
    note: str = ""
    flags: tuple = ()

    def line(self):
        status = {True: "PASS", False: "FAIL", None: "INFO"}[self.passed]
        parts = [f"{status:4s} {self.name}: measured={_fmt(self.measured)}"]
        if self.bound is not None:
            parts.append(f"bound={_fmt(self.bound)}")
        if self.worst_location is not None:
            parts.append(f"at t={_fmt(self.worst_location)}")
        if self.note:
            parts.append(f"({self.note})")
        return " ".join(parts)


def _fmt(x):
    if x is None:
        return "-"
    if isinstance(x, float) and (math.isinf(x) or math.isnan(x)):
        return str(x)
    return f"{x:.6g}"


@dataclass
class PropertyReport:
    records: list = field(default_factory=list)
    flags: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def add(self, name, passed, measured, bound=None, worst_location=None, note="",
            flags=()):
        rec = PropertyRecord(name, None if passed is None else bool(passed),
                             float(measured), None if bound is None else float(bound),
                             None if worst_location is None else float(worst_location),
                             note, tuple(flags))
        self.records.append(rec)
        return rec

    def __getitem__(self, name):
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    def names(self):
        return [r.name for r in self.records]

    @property
    def all_passed(self):
        return all(r.passed is not False for r in self.records)

    def failures(self):
        return [r for r in self.records if r.passed is False]

    def lines(self):
        return [r.line() for r in self.records]

    def __str__(self):
        return "\n".join(self.lines())

    def to_dict(self):
        return {"records": [_clean(asdict(r)) for r in self.records],
                "flags": list(self.flags), "all_passed": self.all_passed}

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def _clean(d):
    # JSON has no inf/nan
    out = {}
    for k, v in d.items():
        if isinstance(v, float) and not math.isfinite(v):
            v = str(v)
        elif isinstance(v, tuple):
            v = list(v)
        out[k] = v
    return out
