"""Command-line front end: ``relmech <command> ...``.

Exit codes: 0 success, 1 scenario/usage error, 2 numerical failure.  On
failure a JSON object ``{"error", "message", "exit_code"}`` goes to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import paradox as P
from .dynamics import energy_drift, integrate, newton_equation
from .errors import DomainError, ParseError, RelmechError, ScenarioError, ZeroSectionOrLightlike
from .forces import is_contact
from .geometry import LIGHTLIKE_TOL, TangentPoint, kinetic_energy, theta_dot
from .scenario import Scenario, dumps, format_float
from .timeflow import CanonicalTheta, cumulative_proper_time, duration, is_strictly_relativistic, proper_time

STRICT_TOL = 1e-9


def write_atomic(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cell(v):
    return "" if v is None or (isinstance(v, float) and math.isnan(v)) else format_float(v)


def trajectory_csv(tr, metric) -> str:
    """Columns ``t, x0.., xdot0.., T, theta_dot, tau_cum``."""
    n = tr.dim
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t"] + [f"x{i}" for i in range(n)] + [f"xdot{i}" for i in range(n)] + ["T", "theta_dot", "tau_cum"])
    tau = cumulative_proper_time(tr, metric)
    for k, (t, x, v) in enumerate(zip(tr.t, tr.x, tr.xdot)):
        p = TangentPoint(x, v)
        row = [t, *x, *v, kinetic_energy(metric, p), theta_dot(metric, p), tau[k]]
        w.writerow([_cell(float(c)) for c in row])
    return buf.getvalue()


def summarize(tr, metric) -> dict:
    strict, dev = is_strictly_relativistic(tr, metric, STRICT_TOL)
    out = {
        "energy_drift": energy_drift(tr, metric),
        "strictly_relativistic": strict,
        "strict_deviation": dev,
        "t_span": [tr.t0, tr.t1],
        "steps": tr.stats.get("steps"),
        "rejected_steps": tr.stats.get("rejected"),
        "final_x": list(tr.x[-1]),
        "final_xdot": list(tr.xdot[-1]),
    }
    try:
        out["duration"] = duration(tr, CanonicalTheta(metric))
        out["proper_time"] = proper_time(tr, metric)
    except ZeroSectionOrLightlike as exc:
        out["duration"] = None
        out["proper_time"] = None
        out["lightlike"] = str(exc)
    return out


def _run(scenario):
    metric, force = scenario.build()
    eq = newton_equation(metric, force)
    t0, t1 = scenario.t_span
    return metric, force, integrate(eq, scenario.initial, t0, t1, scenario.rel_tol, scenario.abs_tol)


def run_integrate(scenario: Scenario, out_dir=None, stem="trajectory") -> dict:
    metric, _, tr = _run(scenario)
    summary = summarize(tr, metric)
    if out_dir is not None:
        if "trajectory_csv" in scenario.outputs:
            write_atomic(Path(out_dir) / f"{stem}.csv", trajectory_csv(tr, metric))
        if "summary_json" in scenario.outputs:
            write_atomic(Path(out_dir) / f"{stem}_summary.json", dumps(summary))
    return summary


def sample_points(scenario: Scenario, samples, seed=0):
    lo, hi = scenario.box()
    rng = np.random.default_rng(seed)
    z = rng.uniform(lo, hi, size=(samples, lo.size))
    n = scenario.dim
    return [TangentPoint(r[:n], r[n:]) for r in z]


def run_check(scenario: Scenario, samples=1000, tol=1e-12, seed=0) -> dict:
    _, force = scenario.build()
    ok, worst = is_contact(force, sample_points(scenario, samples, seed), tol)
    return {"is_contact": ok, "max_alpha_dot": worst, "samples": samples, "tol": tol, "force_kind": force.kind}


def run_correct(scenario: Scenario, samples=1000, tol=1e-12, seed=0, integrate_too=True) -> dict:
    metric = scenario.build_metric()
    base = scenario.build_base_force()
    corrected = Scenario(**{**scenario.__dict__, "correct_relativistic": True}).build_force(metric)
    pts = [v for v in sample_points(scenario, samples, seed) if abs(theta_dot(metric, v)) > LIGHTLIKE_TOL]
    before_ok, before = is_contact(base, pts, tol)
    after_ok, after = is_contact(corrected, pts, tol)
    change = max(float(np.max(np.abs(corrected.at(v) - base.at(v)))) for v in pts)
    out = {
        "force_kind": base.kind,
        "original": {"is_contact": before_ok, "max_alpha_dot": before},
        "corrected": {"is_contact": after_ok, "max_alpha_dot": after},
        "max_component_change": change,
        "noop": bool(change <= tol * 10 or base.kind in ("zero",)),
        "samples": len(pts),
        "tol": tol,
    }
    if integrate_too:
        t0, t1 = scenario.t_span
        drifts = {}
        for label, f in (("before", base), ("after", corrected)):
            tr = integrate(newton_equation(metric, f), scenario.initial, t0, t1, scenario.rel_tol, scenario.abs_tol)
            drifts[label] = energy_drift(tr, metric)
        out["energy_drift"] = drifts
    return out


def curves_csv(eta, s=None) -> str:
    """All twin-paradox curves on one sheet: ``curve, t, x0..x3, xdot0..xdot3``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["curve", "t"] + [f"x{i}" for i in range(4)] + [f"xdot{i}" for i in range(4)])
    curves = [("gamma_prime", P.gamma_prime(eta)), ("gamma_doubleprime", P.gamma_doubleprime(eta))]
    if s is not None:
        curves.append(("gamma_c", P.gamma_c(eta, s)[0]))
    for name, tr in curves:
        for t, x, v in zip(tr.t, tr.x, tr.xdot):
            w.writerow([name] + [format_float(c) for c in (t, *x, *v)])
    return buf.getvalue()


def run_paradox(eta, mode="closed", out_dir=None, s=None) -> dict:
    report = P.paradox_report(eta, mode).to_dict()
    if s is not None:
        report["s"] = s
        report["k_c"] = P.k_c(eta, s)
    if out_dir is not None:
        write_atomic(Path(out_dir) / "paradox.json", dumps(report))
        write_atomic(Path(out_dir) / "curves.csv", curves_csv(eta, s))
    return report


def demo_scenarios(eta=1.0):
    lam, mu = P.appendix_constants(eta)
    prime = {
        "dim": 4,
        "metric": "minkowski",
        "force": {"type": "lorentz", "F": {"F12": "0.5"}},
        "correct_relativistic": False,
        "initial": {"x": list(P.point_a(eta)), "xdot": [lam, 0.0, eta, 0.0]},
        "t_span": [0.0, math.pi],
        "tolerances": {"rel": 1e-10, "abs": 1e-12},
        "outputs": ["trajectory_csv", "summary_json"],
    }
    dprime = dict(prime)
    dprime["force"] = {"type": "zero"}
    dprime["initial"] = {"x": list(P.point_a(eta)), "xdot": list(P.doubleprime_velocity(eta))}
    dprime["t_span"] = [0.0, lam * math.pi / mu]
    return {"gamma_prime": Scenario.from_dict(prime), "gamma_doubleprime": Scenario.from_dict(dprime)}


def run_demo(out_dir, eta=1.0) -> dict:
    out_dir = Path(out_dir)
    result = {}
    for name, sc in demo_scenarios(eta).items():
        write_atomic(out_dir / f"{name}.json", sc.to_json())
        result[name] = run_integrate(sc, out_dir, stem=name)
    result["paradox"] = run_paradox(eta, "integrated", out_dir, s=math.pi)
    write_atomic(out_dir / "demo_summary.json", dumps(result))
    return result


def _parser():
    p = argparse.ArgumentParser(prog="relmech", description="Mechanical systems, relativistic criteria and the twin-paradox example.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, scenario=True):
        if scenario:
            sp.add_argument("--scenario", required=True, help="scenario JSON file")
        sp.add_argument("--out-dir", help="directory for output files")

    sp = sub.add_parser("integrate", help="integrate a scenario, write CSV + summary JSON")
    common(sp)
    for name in ("check", "correct"):
        sp = sub.add_parser(name, help="contact-system check" if name == "check" else "apply the relativistic correction")
        common(sp)
        sp.add_argument("--samples", type=int, default=1000)
        sp.add_argument("--tol", type=float, default=1e-12)
        sp.add_argument("--seed", type=int, default=0)
        if name == "correct":
            sp.add_argument("--no-integrate", action="store_true", help="skip the before/after energy drift integration")
    sp = sub.add_parser("paradox", help="twin-paradox report")
    common(sp, scenario=False)
    sp.add_argument("--eta", type=float, default=1.0)
    sp.add_argument("--mode", choices=("closed", "integrated"), default="closed")
    sp.add_argument("--s", type=float, help="also build the line to gamma_prime(s) and report k_C")
    sp = sub.add_parser("demo", help="write and run the eta=1 example scenarios")
    common(sp, scenario=False)
    sp.add_argument("--eta", type=float, default=1.0)
    return p


def _fail(code, exc):
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}) + "\n")
    return code


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 1
    try:
        if args.command == "integrate":
            result = run_integrate(Scenario.load(args.scenario), args.out_dir)
        elif args.command == "check":
            result = run_check(Scenario.load(args.scenario), args.samples, args.tol, args.seed)
        elif args.command == "correct":
            result = run_correct(Scenario.load(args.scenario), args.samples, args.tol, args.seed, not args.no_integrate)
        elif args.command == "paradox":
            result = run_paradox(args.eta, args.mode, args.out_dir, args.s)
        else:
            result = run_demo(args.out_dir or "relmech-demo", args.eta)
        if args.out_dir is not None and args.command in ("check", "correct"):
            write_atomic(Path(args.out_dir) / f"{args.command}.json", dumps(result))
    except (ScenarioError, ParseError, DomainError) as exc:
        return _fail(1, exc)
    except (RelmechError, ArithmeticError, np.linalg.LinAlgError) as exc:
        return _fail(2, exc)
    sys.stdout.write(dumps(result))
    return 0


if __name__ == "__main__":
    sys.exit(main())
