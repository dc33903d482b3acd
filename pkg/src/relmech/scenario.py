"""Scenario files: a serialised mechanical system plus run settings.

A scenario is a UTF-8 JSON object::

    {
      "dim": 4,
      "metric": "minkowski",                       # or "euclidean", or an n x n
                                                   # matrix of expression strings
      "force": {"type": "lorentz", "F": {"F12": "0.5"}},
      "correct_relativistic": false,
      "initial": {"x": [0, 1, 0, 0], "xdot": [1.414, 0, 1, 0]},
      "t_span": [0, 3.14159],
      "tolerances": {"rel": 1e-10, "abs": 1e-12},
      "outputs": ["trajectory_csv", "summary_json"]
    }

Force variants: ``{"type": "zero"}``, ``{"type": "exact", "potential": expr}``,
``{"type": "lorentz", "F": {"Fij": expr, ...}}`` (``i < j``, missing entries are
zero) and ``{"type": "custom", "components": [expr, ...]}``.  Only custom
force components may mention the velocities ``xdot0..``.  An optional
``"sample_box": {"x": [[lo, hi], ...], "xdot": [[lo, hi], ...]}`` bounds the
random tangent points used by ``relmech check``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from . import expr as E
from .errors import ParseError, ScenarioError
from .forces import ForceForm, ScalarField, TwoForm, conservative_force, custom_force, lorentz_force, relativistic_correction, zero_force
from .geometry import MetricField, TangentPoint

BUILTIN_METRICS = ("minkowski", "euclidean")
FORCE_TYPES = ("zero", "exact", "lorentz", "custom")
OUTPUTS = ("trajectory_csv", "summary_json")
_F_KEY = re.compile(r"F(\d+)_?(\d+)$")


def format_float(v) -> str:
    return format(float(v), ".17g")


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        return format_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_encode(v, indent, level + 1)}" for k, v in sorted(obj.items())]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent=2) -> str:
    """Deterministic JSON: sorted keys, floats with 17 significant digits."""
    return _encode(obj, indent, 0) + "\n"


def _expr_text(v, what):
    if isinstance(v, bool):
        raise ScenarioError(f"{what}: expected an expression, got a boolean")
    if isinstance(v, (int, float)):
        return format_float(v) if isinstance(v, float) else str(v)
    if not isinstance(v, str):
        raise ScenarioError(f"{what}: expected an expression string")
    return v


def _reals(v, n, what):
    if not isinstance(v, list) or len(v) != n or any(isinstance(a, bool) or not isinstance(a, (int, float)) for a in v):
        raise ScenarioError(f"{what}: expected a list of {n} numbers")
    return [float(a) for a in v]


def _parse(src, dim, allow_velocity, what):
    try:
        return E.parse(src, dim, allow_velocity)
    except ParseError as exc:
        raise ScenarioError(f"{what}: {exc}") from exc


@dataclass
class Scenario:
    dim: int
    metric: Any
    force: dict
    initial_x: list
    initial_xdot: list
    t_span: tuple
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    correct_relativistic: bool = False
    outputs: list = field(default_factory=lambda: list(OUTPUTS))
    sample_box: Optional[dict] = None

    @classmethod
    def from_dict(cls, d) -> "Scenario":
        if not isinstance(d, dict):
            raise ScenarioError("scenario must be a JSON object")
        known = {"dim", "metric", "force", "correct_relativistic", "initial", "t_span", "tolerances", "outputs", "sample_box"}
        extra = set(d) - known
        if extra:
            raise ScenarioError(f"unknown scenario keys: {sorted(extra)}")
        metric = d.get("metric")
        dim = d.get("dim")
        if metric == "minkowski" and dim is None:
            dim = 4
        if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
            raise ScenarioError("dim must be a positive integer")
        if isinstance(metric, str):
            if metric not in BUILTIN_METRICS:
                raise ScenarioError(f"unknown builtin metric {metric!r}")
        elif isinstance(metric, list):
            if len(metric) != dim or any(not isinstance(r, list) or len(r) != dim for r in metric):
                raise ScenarioError(f"metric must be a {dim}x{dim} matrix of expressions")
            metric = [[_expr_text(v, f"metric[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(metric)]
        else:
            raise ScenarioError("metric must be a builtin name or a matrix of expressions")

        force = d.get("force", {"type": "zero"})
        if not isinstance(force, dict) or force.get("type") not in FORCE_TYPES:
            raise ScenarioError(f"force.type must be one of {FORCE_TYPES}")
        kind = force["type"]
        if kind == "zero":
            force = {"type": "zero"}
        elif kind == "exact":
            force = {"type": "exact", "potential": _expr_text(force.get("potential"), "force.potential")}
        elif kind == "lorentz":
            entries = force.get("F")
            if not isinstance(entries, dict):
                raise ScenarioError("force.F must map 'Fij' (i < j) to expressions")
            canon = {}
            for key, v in entries.items():
                m = _F_KEY.match(key)
                if m is None:
                    raise ScenarioError(f"bad 2-form key {key!r}")
                i, j = int(m.group(1)), int(m.group(2))
                if not i < j < dim:
                    raise ScenarioError(f"2-form key {key!r} must satisfy i < j < {dim}")
                canon[f"F{i}{j}" if dim <= 10 else f"F{i}_{j}"] = _expr_text(v, f"force.F.{key}")
            force = {"type": "lorentz", "F": canon}
        else:
            comps = force.get("components")
            if not isinstance(comps, list) or len(comps) != dim:
                raise ScenarioError(f"force.components must list {dim} expressions")
            force = {"type": "custom", "components": [_expr_text(v, f"force.components[{i}]") for i, v in enumerate(comps)]}

        initial = d.get("initial")
        if not isinstance(initial, dict):
            raise ScenarioError("initial must be an object with x and xdot")
        x = _reals(initial.get("x"), dim, "initial.x")
        xdot = _reals(initial.get("xdot"), dim, "initial.xdot")
        t_span = _reals(d.get("t_span"), 2, "t_span")
        if not t_span[1] > t_span[0]:
            raise ScenarioError("t_span must satisfy t1 > t0")
        tols = d.get("tolerances", {})
        if not isinstance(tols, dict):
            raise ScenarioError("tolerances must be an object")
        rel = _reals([tols.get("rel", 1e-10)], 1, "tolerances.rel")[0]
        abs_ = _reals([tols.get("abs", 1e-12)], 1, "tolerances.abs")[0]
        if rel <= 0 or abs_ <= 0:
            raise ScenarioError("tolerances must be positive")
        correct = d.get("correct_relativistic", False)
        if not isinstance(correct, bool):
            raise ScenarioError("correct_relativistic must be a boolean")
        outputs = d.get("outputs", list(OUTPUTS))
        if not isinstance(outputs, list) or any(o not in OUTPUTS for o in outputs):
            raise ScenarioError(f"outputs must be a list drawn from {OUTPUTS}")
        box = d.get("sample_box")
        if box is not None:
            if not isinstance(box, dict) or set(box) != {"x", "xdot"}:
                raise ScenarioError("sample_box must have keys x and xdot")
            box = {k: [_reals(b, 2, f"sample_box.{k}") for b in box[k]] for k in ("x", "xdot")}
            if any(len(box[k]) != dim for k in box):
                raise ScenarioError(f"sample_box entries must list {dim} intervals")
        sc = cls(dim, metric, force, x, xdot, tuple(t_span), rel, abs_, correct, list(outputs), box)
        sc.build()  # surface expression errors at load time
        return sc

    @classmethod
    def from_json(cls, text) -> "Scenario":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(d)

    @classmethod
    def load(cls, path) -> "Scenario":
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ScenarioError(f"cannot read scenario: {exc}") from exc
        return cls.from_json(text)

    def to_dict(self) -> dict:
        d = {
            "dim": self.dim,
            "metric": self.metric,
            "force": self.force,
            "correct_relativistic": self.correct_relativistic,
            "initial": {"x": list(self.initial_x), "xdot": list(self.initial_xdot)},
            "t_span": list(self.t_span),
            "tolerances": {"rel": self.rel_tol, "abs": self.abs_tol},
            "outputs": list(self.outputs),
        }
        if self.sample_box is not None:
            d["sample_box"] = self.sample_box
        return d

    def to_json(self) -> str:
        return dumps(self.to_dict())

    # -- construction of the mechanical system --------------------------------

    def build_metric(self) -> MetricField:
        n = self.dim
        if self.metric == "minkowski":
            return MetricField.minkowski(n)
        if self.metric == "euclidean":
            return MetricField.euclidean(n)
        trees = [[_parse(self.metric[i][j], n, False, f"metric[{i}][{j}]") if j >= i else None for j in range(n)] for i in range(n)]
        if all(t is None or E.is_constant(t) for r in trees for t in r):
            return MetricField.constant([[E.eval_expr(trees[i][j], ()) if j >= i else 0.0 for j in range(n)] for i in range(n)])

        def components(x):
            g = np.zeros((n, n))
            for i in range(n):
                for j in range(i, n):
                    g[i, j] = E.eval_expr(trees[i][j], x)
            return g

        return MetricField(n, components, name="expression")

    def build_base_force(self) -> ForceForm:
        n = self.dim
        kind = self.force["type"]
        if kind == "zero":
            return zero_force(n)
        if kind == "exact":
            tree = _parse(self.force["potential"], n, False, "force.potential")
            return conservative_force(ScalarField(n, lambda x: E.eval_expr(tree, x)))
        if kind == "lorentz":
            entries = {}
            for key, src in self.force["F"].items():
                m = _F_KEY.match(key)
                entries[(int(m.group(1)), int(m.group(2)))] = _parse(src, n, False, f"force.F.{key}")

            def components(x):
                F = np.zeros((n, n))
                for (i, j), tree in entries.items():
                    F[i, j] = E.eval_expr(tree, x)
                return F

            return lorentz_force(TwoForm(n, components))
        trees = [_parse(src, n, True, f"force.components[{i}]") for i, src in enumerate(self.force["components"])]
        return custom_force(n, lambda x, xdot: np.array([E.eval_expr(t, x, xdot) for t in trees]))

    def build_force(self, metric=None) -> ForceForm:
        f = self.build_base_force()
        if self.correct_relativistic:
            f = relativistic_correction(f, metric or self.build_metric())
        return f

    def build(self):
        metric = self.build_metric()
        return metric, self.build_force(metric)

    @property
    def initial(self) -> TangentPoint:
        return TangentPoint(self.initial_x, self.initial_xdot)

    def box(self):
        """``(lo, hi)`` arrays over the 2n coordinates ``(x, xdot)`` for random sampling."""
        if self.sample_box is not None:
            b = np.array(self.sample_box["x"] + self.sample_box["xdot"], dtype=float)
        else:
            c = np.array(self.initial_x + self.initial_xdot, dtype=float)
            b = np.stack([c - 1.0, c + 1.0], axis=1)
        return b[:, 0], b[:, 1]
