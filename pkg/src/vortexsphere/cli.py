"""Command-line interface: ``vortexsphere <command> [options]``.

Exit codes: 0 success, 1 numerical failure, 2 invalid input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import diagnostics, energy, equilibria, global_orbits, integrator
from . import dynamics as dyn
from .charts import ChartState, Chart
from .errors import DomainError, NoOrbit, NonzeroAngularMomentum, NotColliding, VortexSphereError
from .geometry import Params

CHARTS = ("plane", "sphere-north", "sphere-equator", "sphere-geodesic", "meridian",
          "mcgehee-tau", "angular-sigma", "collision")

DEFAULTS = {
    "radius": 1.0,
    "gamma": 1.0,
    "energy": None,
    "chart": "plane",
    "ic": None,
    "t_end": 10.0,
    "rel_tol": 1e-10,
    "abs_tol": 1e-12,
    "output": None,
    "format": "csv",
    "samples": 8,
    "psi": 0.0,
    "u0": math.pi / 2,
    "theta_bar": 2.0 * math.pi / 3.0,
}


class InputError(Exception):
    pass


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    return "%.17g" % v


def _csv(header, rows) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return out.getvalue()


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


class Report:
    """Collected output of one command: CSV table plus a JSON summary."""

    def __init__(self, command: str, params: Params):
        self.command = command
        self.params = params
        self.header: list[str] = []
        self.rows: list[list] = []
        self.results: dict = {}
        self.diagnostics: dict = {}
        self.extra_csv: dict[str, str] = {}
        self.failed = False

    def render(self, fmt: str) -> str:
        if fmt == "json":
            doc = {
                "params": {"R": self.params.R, "Gamma": self.params.Gamma},
                "command": self.command,
                "results": self.results,
                "diagnostics": self.diagnostics,
            }
            return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"
        return _csv(self.header, self.rows)


# --- commands ---------------------------------------------------------------------------

def cmd_thresholds(cfg, P: Params) -> Report:
    h1, h2 = energy.thresholds(P)
    rep = Report("thresholds", P)
    rep.header = ["name", "value"]
    rep.rows = [["h1", h1], ["h2", h2]]
    rep.results = {"h1": h1, "h2": h2}
    return rep


def energy_value(text):
    """Float, or one of the symbolic thresholds ``h1`` / ``h2`` (optionally ``h2+0.01``)."""
    if isinstance(text, (int, float)):
        return float(text)
    t = str(text).strip().lower().replace(" ", "")
    for name in ("h1", "h2"):
        if t.startswith(name):
            rest = t[len(name):]
            try:
                return (name, float(rest) if rest else 0.0)
            except ValueError:
                break
    try:
        return float(t)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid energy {text!r}") from exc


def _resolve_energy(cfg, P: Params) -> None:
    v = cfg["energy"]
    if v is None:
        return
    v = energy_value(v) if isinstance(v, str) else v
    if isinstance(v, tuple):
        h1, h2 = energy.thresholds(P)
        v = (h1 if v[0] == "h1" else h2) + v[1]
    cfg["energy"] = float(v)


def _need_energy(cfg) -> float:
    if cfg["energy"] is None:
        raise InputError("--energy is required for this command")
    return float(cfg["energy"])


def cmd_classify(cfg, P: Params) -> Report:
    h = _need_energy(cfg)
    reg = energy.classify(h, P)
    rep = Report("classify", P)
    rep.header = ["h", "h1", "h2", "regime", "descriptor"]
    rep.rows = [[h, reg.h1, reg.h2, reg.kind.value, reg.describe()]]
    disk = None
    if reg.disk is not None and reg.disk.kind == "circle":
        disk = {"center": list(reg.disk.center), "radius": reg.disk.radius}
    rep.results = {"h": h, "h1": reg.h1, "h2": reg.h2, "regime": reg.kind.value,
                   "descriptor": reg.describe(), "disk": disk}
    return rep


def _parse_ic(cfg) -> list[float]:
    ic = cfg["ic"]
    if ic is None:
        raise InputError("--ic is required for simulate")
    if isinstance(ic, str):
        try:
            return [float(v) for v in ic.split(",") if v.strip()]
        except ValueError as exc:
            raise InputError(f"cannot parse --ic {ic!r}") from exc
    return [float(v) for v in ic]


def build_simulation(cfg, P: Params):
    """(field, initial state, events) for ``simulate``."""
    chart = cfg["chart"]
    if chart not in CHARTS:
        raise InputError(f"unknown chart {chart!r}")
    ic = _parse_ic(cfg)
    h = cfg["energy"]
    if chart == "plane":
        vf = dyn.plane_field(P)
    elif chart == "sphere-north":
        vf = dyn.sphere_field(P, dyn.VortexAt.NORTH_POLE)
    elif chart == "sphere-equator":
        vf = dyn.sphere_field(P, dyn.VortexAt.EQUATOR)
    elif chart == "sphere-geodesic":
        vf = dyn.geodesic_field(P)
    elif chart == "meridian":
        vf = dyn.meridian_field(P)
        if len(ic) == 1:
            if h is None:
                raise InputError("a one-value meridian --ic needs --energy")
            ic = [ic[0], global_orbits.meridian_momentum(ic[0], float(h), P, -1.0)]
    elif chart == "mcgehee-tau":
        vf = dyn.tau_field(P)
    elif chart == "angular-sigma":
        if h is None:
            raise InputError("--chart angular-sigma needs --energy")
        vf = dyn.sigma_field(P, float(h))
        ic = ChartState(Chart.SIGMA, ic, h=float(h))
    else:
        vf = dyn.collision_field(P)
    events = []
    if chart != "collision" and chart != "sphere-geodesic":
        events.append(integrator.collision_event(vf))
    if chart in ("meridian", "sphere-north", "sphere-equator", "plane"):
        events.append(integrator.zero_velocity_event(vf))
    if chart == "meridian":
        events.append(integrator.antipodal_event(vf))
    return vf, ic, events


def cmd_simulate(cfg, P: Params) -> Report:
    vf, ic, events = build_simulation(cfg, P)
    opts = integrator.IntegratorOptions(rel_tol=cfg["rel_tol"], abs_tol=cfg["abs_tol"])
    tr = integrator.integrate(vf, ic, (0.0, float(cfg["t_end"])), opts, events=events)
    rep = Report("simulate", P)
    text = integrator.trajectory_csv(tr)
    lines = text.splitlines()
    rep.header = lines[0].split(",")
    rep.rows = [ln.split(",") for ln in lines[1:]]
    rep.extra_csv["events"] = integrator.events_csv(tr)
    rep.results = {
        "chart": vf.name,
        "status": tr.status,
        "message": tr.message,
        "samples": len(tr),
        "final_time": tr.t[-1],
        "final_state": tr.final,
        "events": [{"time": e.time, "kind": e.kind.value, "state": e.state} for e in tr.events],
    }
    if vf.energy is not None:
        drift = np.nanmax(np.abs(tr.monitors["energy"] - tr.monitors["energy"][0]))
        rep.diagnostics["energy_drift"] = drift
    rep.failed = tr.status == "failed"
    return rep


def cmd_zvm(cfg, P: Params) -> Report:
    h = _need_energy(cfg)
    n = int(cfg["samples"]) if cfg["samples"] and int(cfg["samples"]) > 8 else 256
    curve = energy.zvm_curve(h, P, n)
    cert = energy.certify_zvm_restpoints(h, P)
    rep = Report("zvm", P)
    rep.header = ["r", "alpha", "x", "y"]
    rep.rows = [[r, a, xy[0], xy[1]] for r, a, xy in zip(curve.r, curve.alpha, curve.xy)]
    rep.results = {"h": h, "topology": curve.topology.value, "points": len(curve.r),
                   "restpoint": list(cert.point) if cert.point else None}
    rep.diagnostics = {"min_grad_log_b": cert.min_grad_log_b}
    return rep


def cmd_restpoints(cfg, P: Params) -> Report:
    n = int(cfg["samples"])
    if n < 1:
        raise InputError("--samples must be >= 1")
    rps = equilibria.restpoint_curves(P, n)
    rep = Report("restpoints", P)
    rep.header = ["family", "r", "alpha", "psi", "lambda1", "lambda2", "lambda3", "classification",
                  "within_collision", "residual"]
    for rp in rps:
        ev = [e.real for e in rp.eigenvalues]
        rep.rows.append([rp.family.value, *rp.location, *ev, rp.classification.value,
                         rp.within_collision.value, rp.residual])
    rep.results = {"count": len(rps), "nonzero_eigenvalue": P.Gamma / (4.0 * math.pi)}
    rep.diagnostics = {"max_residual": max(rp.residual for rp in rps),
                       "manifold_dimensions_P1": rps[0].manifold_dimensions(),
                       "manifold_dimensions_P2": rps[-1].manifold_dimensions()}
    return rep


def cmd_heteroclinic(cfg, P: Params) -> Report:
    ho = equilibria.verify_heteroclinic(float(cfg["psi"]), float(cfg["u0"]), P)
    rep = Report("heteroclinic", P)
    rep.header = ["sigma", "alpha", "psi"]
    rep.rows = [[s, a, ho.psi] for s, a in zip(ho.sigma, ho.alpha)]
    rep.results = {"psi": ho.psi, "source": ho.source, "sink": ho.sink}
    rep.diagnostics = {"max_closed_form_error": ho.max_error, "psi_drift": ho.psi_drift}
    return rep


def cmd_parallel(cfg, P: Params) -> Report:
    pp = global_orbits.vortex_parallel(float(cfg["theta_bar"]), P)
    rep = Report("parallel", P)
    rep.header = ["theta_bar", "p_phi", "period", "residual", "closing_error", "p_phi_printed"]
    rep.rows = [[pp.theta_bar, pp.p_phi, pp.period, pp.residual, pp.closing_error, pp.p_phi_printed]]
    rep.results = {"theta_bar": pp.theta_bar, "p_phi": pp.p_phi, "period": pp.period,
                   "p_phi_printed": pp.p_phi_printed}
    rep.diagnostics = {"residual": pp.residual, "closing_error": pp.closing_error}
    return rep


def cmd_transmit(cfg, P: Params) -> Report:
    ic = _parse_ic(cfg) if cfg["ic"] is not None else [math.pi / 2, 0.0]
    if len(ic) != 2:
        raise InputError("transmit takes a meridian --ic theta,p_theta")
    mo = global_orbits.meridian_orbit(0.0, ic[0], ic[1], P, float(cfg["t_end"]) if cfg["t_end"] else 100.0)
    tp = global_orbits.transmit(mo.traj, P)
    rep = Report("transmit", P)
    rep.header = ["time", "theta", "p_theta", "segment"]
    for t, y in zip(mo.traj.t, mo.traj.y):
        rep.rows.append([t, y[0], y[1], "pre"])
    for t in reversed(tp.interior_post_times(50)):
        y = tp.post_state(t)
        rep.rows.append([t, y[0], y[1], "post"])
    rep.results = {"T_s": tp.T_s, "theta_V": tp.theta_V, "phi_V": tp.phi_V, "h": tp.h}
    rep.diagnostics = {"eom_residual": tp.eom_residual(), "continuity_gap": tp.continuity_gap()}
    return rep


def cmd_field_check(cfg, P: Params) -> Report:
    checks = diagnostics.field_check(P)
    rep = Report("field-check", P)
    rep.header = ["check", "value", "tolerance", "ok"]
    rep.rows = [[c.name, c.value, c.tol, "pass" if c.ok else "FAIL"] for c in checks]
    rep.results = {"all_ok": all(c.ok for c in checks), "e_hat_limit": energy.e_hat_limit(P)}
    rep.diagnostics = {c.name: c.value for c in checks}
    rep.rows.append(["E_hat collision limit 2*Gamma*R^2/pi", energy.e_hat_limit(P), 0.0, "pass"])
    rep.failed = not rep.results["all_ok"]
    return rep


COMMANDS = {
    "thresholds": cmd_thresholds,
    "classify": cmd_classify,
    "simulate": cmd_simulate,
    "zvm": cmd_zvm,
    "restpoints": cmd_restpoints,
    "heteroclinic": cmd_heteroclinic,
    "parallel": cmd_parallel,
    "transmit": cmd_transmit,
    "field-check": cmd_field_check,
}


# --- argument handling ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--radius", type=float, help="sphere radius R (default 1)")
    common.add_argument("--gamma", type=float, help="vortex strength Gamma (default 1)")
    common.add_argument("--energy", type=energy_value, help="energy level h, or h1 / h2 / h2+0.01")
    common.add_argument("--chart", choices=CHARTS, help="chart for simulate")
    common.add_argument("--ic", help="initial state as a comma-separated list")
    common.add_argument("--t-end", dest="t_end", type=float, help="end of the integration span")
    common.add_argument("--rel-tol", dest="rel_tol", type=float)
    common.add_argument("--abs-tol", dest="abs_tol", type=float)
    common.add_argument("--output", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--config", help="JSON file with option values; flags override it")
    common.add_argument("--samples", type=int, help="sample count (restpoints, zvm)")
    common.add_argument("--psi", type=float, help="psi of the heteroclinic orbit")
    common.add_argument("--u0", type=float, help="initial alpha - psi of the heteroclinic orbit")
    common.add_argument("--theta-bar", dest="theta_bar", type=float, help="colatitude of the vortex parallel")

    parser = argparse.ArgumentParser(prog="vortexsphere", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "thresholds": "print the critical energies h1 and h2",
        "classify": "energy regime and disk descriptor for --energy",
        "simulate": "integrate a chart field and export the trajectory",
        "zvm": "zero velocity manifold at --energy",
        "restpoints": "rest points on the collision manifold with eigenvalues",
        "heteroclinic": "collision-manifold connection against its closed form",
        "parallel": "periodic orbit on a vortex parallel",
        "transmit": "meridian collision orbit continued through the vortex",
        "field-check": "consistency checks of the vector fields",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def resolve_config(ns: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if ns.config:
        try:
            with open(ns.config) as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {ns.config!r}: {exc}") from exc
        for k, v in file_cfg.items():
            key = k.replace("-", "_")
            if key not in cfg:
                raise InputError(f"unknown config key {k!r}")
            cfg[key] = v
    for k in DEFAULTS:
        v = getattr(ns, k, None)
        if v is not None:
            cfg[k] = v
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = resolve_config(ns)
        P = Params(float(cfg["radius"]), float(cfg["gamma"]))
        _resolve_energy(cfg, P)
        rep = COMMANDS[ns.command](cfg, P)
    except (InputError, DomainError, NoOrbit, NotColliding, NonzeroAngularMomentum) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (VortexSphereError, ArithmeticError, RuntimeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    text = rep.render(cfg["format"])
    if cfg["output"]:
        with open(cfg["output"], "w") as fh:
            fh.write(text)
        for name, extra in rep.extra_csv.items():
            with open(f"{cfg['output']}.{name}.csv", "w") as fh:
                fh.write(extra)
    else:
        sys.stdout.write(text)
        for name, extra in rep.extra_csv.items():
            if cfg["format"] == "csv" and extra.count("\n") > 1:
                sys.stderr.write(f"# {name}\n{extra}")
    return 1 if rep.failed else 0


if __name__ == "__main__":
    sys.exit(main())
