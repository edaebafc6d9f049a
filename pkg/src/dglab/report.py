"""Check results, reports and their JSON form."""

import json
from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpq


class InputError(ValueError):
    """Malformed or inconsistent input (as opposed to a failed check)."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


def jsonable(obj):
    """Convert nested results to JSON-compatible data, rationals as "p/q"."""
    if isinstance(obj, (bool, str, type(None))):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, type(mpq(0))):
        return str(obj)
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: dict | None = None
    detail: str = ""

    def __bool__(self):
        return self.passed

    def to_dict(self):
        out = {"name": self.name, "passed": self.passed}
        if self.witness is not None:
            out["witness"] = jsonable(self.witness)
        if self.detail:
            out["detail"] = self.detail
        return out

    @classmethod
    def from_dict(cls, data):
        return cls(data["name"], data["passed"], data.get("witness"),
                   data.get("detail", ""))


@dataclass
class Report:
    """An ordered list of named checks plus free-form payload data."""

    title: str
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)
    verdict: str | None = None

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def __bool__(self):
        return self.passed

    def add(self, name, passed, witness=None, detail=""):
        res = CheckResult(name, bool(passed), witness, detail)
        self.checks.append(res)
        return res

    def extend(self, other, prefix=""):
        for c in other.checks:
            self.checks.append(CheckResult(prefix + c.name, c.passed,
                                           c.witness, c.detail))

    def get(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def first_failure(self):
        for c in self.checks:
            if not c.passed:
                return c
        return None

    def to_dict(self):
        out = {
            "title": self.title,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "data": jsonable(self.data),
        }
        if self.verdict is not None:
            out["verdict"] = self.verdict
        return out

    @classmethod
    def from_dict(cls, data):
        return cls(
            data["title"],
            [CheckResult.from_dict(c) for c in data["checks"]],
            data.get("data", {}),
            data.get("verdict"),
        )

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def render(self, verbosity=1):
        """0: title, verdict and failures; 1: every check; 2: also the data."""
        lines = [self.title]
        if self.verdict is not None:
            lines.append(f"verdict: {self.verdict}")
        width = max((len(c.name) for c in self.checks), default=0)
        for c in self.checks:
            if verbosity < 1 and c.passed:
                continue
            mark = "PASS" if c.passed else "FAIL"
            line = f"  {c.name.ljust(width)}  {mark}"
            if c.detail:
                line += f"  {c.detail}"
            lines.append(line)
            if not c.passed and c.witness is not None:
                lines.append(f"  {'':{width}}  witness: {json.dumps(jsonable(c.witness), sort_keys=True)}")
        if verbosity >= 2 and self.data:
            lines.append("data: " + json.dumps(jsonable(self.data), sort_keys=True, indent=2))
        return "\n".join(lines)
