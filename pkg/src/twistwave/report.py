"""Verification reports and byte-stable JSON output."""
from __future__ import annotations

import math
import time
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


@dataclass
class VerificationReport:
    check_name: str
    parameters: dict
    metrics: dict
    tolerance: float
    passed: bool
    runtime_ms: float = 0.0
    kind: str = "deviation"

    @classmethod
    def deviation(cls, name, parameters, max_deviation, tolerance, **metrics):
        metrics = {"max_deviation": float(max_deviation), **metrics}
        ok = bool(np.isfinite(max_deviation) and max_deviation <= tolerance)
        return cls(name, parameters, metrics, float(tolerance), ok)

    @classmethod
    def inequality(cls, name, parameters, lhs, rhs, tolerance, **metrics):
        metrics = {"lhs": float(lhs), "rhs": float(rhs), "slack": float(rhs - lhs), **metrics}
        return cls(name, parameters, metrics, float(tolerance), bool(lhs <= rhs + tolerance),
                   kind="inequality")

    def to_dict(self, with_runtime: bool = True) -> dict:
        d = {
            "check_name": self.check_name,
            "parameters": self.parameters,
            "metrics": self.metrics,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }
        if with_runtime:
            d["runtime_ms"] = self.runtime_ms
        return d

    def to_json(self, with_runtime: bool = True) -> str:
        return dumps(self.to_dict(with_runtime))

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        if self.kind == "inequality":
            m = self.metrics
            body = f"lhs={m['lhs']:.6g} rhs={m['rhs']:.6g}"
        else:
            body = f"dev={self.metrics['max_deviation']:.3e}"
        return f"[{tag}] {self.check_name:<40s} {body} tol={self.tolerance:.1e}"


@contextmanager
def timed(store: list):
    t0 = time.perf_counter()
    yield
    store.append((time.perf_counter() - t0) * 1e3)


def _fmt(v) -> str:
    if isinstance(v, bool) or v is None:
        return {True: "true", False: "false", None: "null"}[v]
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating, Fraction)):
        x = float(v)
        if math.isnan(x) or math.isinf(x):
            return '"' + repr(x) + '"'
        return format(x, ".17g")
    if isinstance(v, complex):
        return "[" + _fmt(v.real) + ", " + _fmt(v.imag) + "]"
    if isinstance(v, str):
        import json
        return json.dumps(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{_fmt(str(k))}: {_fmt(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    raise TypeError(f"cannot serialise {type(v)}")


def dumps(obj) -> str:
    """JSON with every float written to 17 significant digits."""
    return _fmt(obj) + "\n"
