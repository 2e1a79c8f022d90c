"""Command-line entry point: ``ermakov COMMAND --config FILE [--out DIR]``.

Exit status: 0 success, 1 configuration error, 2 numerical failure,
3 a check ran but exceeded its tolerance.
"""
from __future__ import annotations

import argparse
import configparser
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import CheckFailed, ConfigError, ErmakovError, NumericalError
from .expr import ExprAst, parse
from .invariants import drift_report, ermakov_lewis_I, hamiltonian_H, rayreid_J
from .ode import IntegratorConfig, State, integrate, uniform_grid
from .pinney import solve_pinney
from .quasi import quasi_transform, sl2_chain_residuals, sl2_residuals, solve_tdho
from .reduction import reduce_rayreid
from .svg import series_svg, trajectory_svg
from .symmetry import GroupParams, is_symmetric_frequency, solution_map_check
from .systems import (
    F_VARS, G_VARS, OMEGA2_VARS, SIGMA_VARS, TIME_VARS, GeneralizedErmakov, RayReidSpec,
    RhoSpec, SymmetricFrequency, TimeFunction, g_VARS, omega_from_rho,
    rayreid_system, rhs_generalized, rhs_rayreid, symmetric_system, traditional_system,
)

log = logging.getLogger("ermakov")

FORMS = ("generalized", "symmetric", "rayreid", "traditional")
COMMANDS = ("simulate", "invariants", "symmetry", "reduce", "quasi", "pinney", "compare")
EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_CHECK = 0, 1, 2, 3


# --- scenario -------------------------------------------------------------------


@dataclass
class Scenario:
    form: str
    system: GeneralizedErmakov
    s0: State
    t_end: float
    n_out: int
    cfg: IntegratorConfig
    tol: float | None
    eps: list
    r_ref: float = 1.0
    q_ref: float = 1.0
    rho: object = None
    spec: RayReidSpec | None = None
    omega: ExprAst | None = None
    f: ExprAst | None = None
    g: ExprAst | None = None
    sections: dict = field(default_factory=dict)

    @property
    def grid(self):
        return uniform_grid(self.s0.t, self.t_end, self.n_out)

    def rhs(self):
        if self.spec is not None:
            return lambda s: rhs_rayreid(self.spec, s)
        return lambda s: rhs_generalized(self.system, s)


class _Section:
    def __init__(self, cp, name, params):
        self.name = name
        self.data = cp[name] if cp.has_section(name) else {}
        self.params = params

    def has(self, key):
        return key in self.data

    def text(self, key, default=None):
        if key in self.data:
            return self.data[key].strip()
        if default is None:
            raise ConfigError(f"[{self.name}] missing required key {key!r}")
        return default

    def number(self, key, default=None):
        if default is not None and key not in self.data:
            return default
        raw = self.text(key)
        try:
            value = float(raw)
        except ValueError:
            try:
                value = self.expr(key, (), raw)(*())
            except ConfigError:
                raise ConfigError(f"[{self.name}] {key}: not a number: {raw!r}") from None
        if not math.isfinite(value):
            raise ConfigError(f"[{self.name}] {key}: must be finite")
        return value

    def expr(self, key, variables, source=None):
        src = self.text(key) if source is None else source
        names = tuple(variables) + tuple(n for n in self.params if n not in variables)
        try:
            ast = parse(src, names)
        except ConfigError as exc:
            raise ConfigError(f"[{self.name}] {key}: {exc}") from exc
        if self.params:
            ast = ast.substitute(self.params, tuple(variables))
        return ast

    def floats(self, key, default):
        raw = self.text(key, default)
        try:
            return [float(v) for v in raw.replace(",", " ").split()]
        except ValueError:
            raise ConfigError(f"[{self.name}] {key}: expected a list of numbers") from None


def load_scenario(path, tol_override=None) -> Scenario:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"config syntax: {exc}") from exc

    params = {}
    for name, raw in (cp["params"].items() if cp.has_section("params") else ()):
        try:
            params[name] = float(raw)
        except ValueError:
            raise ConfigError(f"[params] {name}: not a number: {raw!r}") from None
    sysec = _Section(cp, "system", {})
    for k in ("c1", "c2", "c3", "c4"):
        if sysec.has(k):
            params[k] = sysec.number(k)
    sysec.params = params

    form = sysec.text("form")
    if form not in FORMS:
        raise ConfigError(f"[system] form: expected one of {FORMS}, got {form!r}")

    ini = _Section(cp, "initial_state", params)
    s0 = State(ini.number("t0", 0.0), ini.number("x"), ini.number("y"),
               ini.number("xdot", 0.0), ini.number("ydot", 0.0))

    integ = _Section(cp, "integration", params)
    rtol = integ.number("rtol", 1e-10)
    try:
        cfg = IntegratorConfig(
            method=integ.text("method", "dp45"),
            rtol=rtol,
            atol=integ.number("atol", 1e-12),
            h_init=integ.number("h_init", 1e-3),
            h_min=integ.number("h_min", 1e-14),
            h_max=integ.number("h_max", math.inf),
            max_steps=int(integ.number("max_steps", 1_000_000)),
        )
    except ValueError as exc:
        raise ConfigError(f"[integration] {exc}") from exc
    t_end = integ.number("t_end")
    if not t_end > s0.t:
        raise ConfigError("[integration] t_end must exceed [initial_state] t0")
    n_out = int(integ.number("n_out", 201))
    if n_out < 2:
        raise ConfigError("[integration] n_out must be at least 2")

    check = _Section(cp, "check", params)
    tol = tol_override if tol_override is not None else (check.number("tol") if check.has("tol") else None)
    if tol is not None and not tol > 0:
        raise ConfigError("[check] tol must be positive")
    eps = check.floats("eps", "0.1 0.5 1.0")

    sc = Scenario(form, None, s0, t_end, n_out, cfg, tol, eps,
                  r_ref=sysec.number("r_ref", 1.0), q_ref=sysec.number("q_ref", 1.0),
                  sections={n: _Section(cp, n, params) for n in ("quasi", "pinney", "check")})
    window = (s0.t, t_end)

    if sysec.has("rho"):
        sc.rho = RhoSpec(sysec.expr("rho", TIME_VARS), window if form != "rayreid" else None)

    if form == "generalized":
        sc.system = GeneralizedErmakov(sysec.expr("F", F_VARS, sysec.text("F", "0")),
                                       sysec.expr("Omega2", OMEGA2_VARS))
    elif form == "symmetric":
        if sc.rho is None:
            raise ConfigError("[system] symmetric form needs rho")
        sf = SymmetricFrequency(sc.rho, sysec.expr("sigma", SIGMA_VARS))
        sc.system = symmetric_system(sf, sysec.expr("F", F_VARS, sysec.text("F", "0")))
    elif form == "traditional":
        sc.omega = sysec.expr("omega", TIME_VARS)
        sc.f = sysec.expr("f", F_VARS, sysec.text("f", "0"))
        sc.g = sysec.expr("g", g_VARS, sysec.text("g", "0"))
        sc.system = traditional_system(sc.omega, sc.f, sc.g)
    else:
        G = sysec.expr("G", G_VARS)
        if sysec.has("omega"):
            sc.omega = sysec.expr("omega", TIME_VARS)
            omega2 = TimeFunction(sc.omega).squared()
        elif sc.rho is not None:
            omega2 = omega_from_rho(sc.rho, sysec.number("Omega0", 1.0))
        else:
            raise ConfigError("[system] rayreid form needs omega or rho")
        if sc.rho is None:
            sc.rho = solve_pinney(sc.omega, sysec.number("rho0"), sysec.number("rhodot0", 0.0),
                                  s0.t, t_end)
        sc.spec = RayReidSpec(omega2, G, sc.rho, window=window)
        sc.system = rayreid_system(sc.spec)
    return sc


# --- output helpers -------------------------------------------------------------


def _fmt(v):
    return repr(float(v))


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            if len(row) != len(header):
                raise ValueError("row length does not match header")
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_json(path, data):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


class Run:
    def __init__(self, sc: Scenario, out: Path, quiet: bool, svg: bool):
        self.sc = sc
        self.out = out
        self.quiet = quiet
        self.svg = svg
        self.summary = {"version": __version__, "form": sc.form}

    def say(self, msg):
        if not self.quiet:
            print(msg)

    def check(self, name, value, tol):
        value = float(value)
        ok = bool(value <= tol)
        self.summary.setdefault("checks", {})[name] = {"value": value, "tol": tol, "pass": ok}
        self.say(f"{name}: {value:.3e} (tol {tol:.1e}) {'PASS' if ok else 'FAIL'}")
        return ok

    def trajectory(self):
        sc = self.sc
        traj = integrate(sc.rhs(), sc.s0, sc.t_end, sc.cfg, sc.grid, system_id=sc.form)
        self.summary["steps"] = {"accepted": traj.metadata["accepted_steps"],
                                 "rejected": traj.metadata["rejected_steps"]}
        return traj


def cmd_simulate(run: Run):
    traj = run.trajectory()
    write_csv(run.out / "trajectory.csv", ["t", "x", "y", "xdot", "ydot"],
              [s.as_tuple() for s in traj])
    if run.svg:
        (run.out / "trajectory.svg").write_text(
            trajectory_svg(traj.t, traj.column("x"), traj.column("y"), run.sc.form))
    run.say(f"wrote {len(traj)} samples to {run.out / 'trajectory.csv'}")
    return True


def cmd_invariants(run: Run):
    sc = run.sc
    traj = run.trajectory()
    cols = {"I": drift_report(traj, lambda s: ermakov_lewis_I(sc.system.F, s, sc.r_ref), "I")}
    if sc.spec is not None:
        cols["J"] = drift_report(traj, lambda s: rayreid_J(sc.spec, s, sc.q_ref), "J")
        cols["H"] = drift_report(traj, lambda s: hamiltonian_H(sc.spec, s, sc.q_ref), "H")
    write_csv(run.out / "invariants.csv", ["t", "x", "y", "xdot", "ydot", *cols],
              [(*s.as_tuple(), *(r.values[i] for r in cols.values())) for i, s in enumerate(traj)])
    tol = sc.tol if sc.tol is not None else 100 * sc.cfg.rtol
    ok = True
    run.summary["drift"] = {}
    for name, rep in cols.items():
        run.summary["drift"][name] = {"max_abs": rep.max_abs_drift, "max_rel": rep.max_rel_drift}
        if name != "H":  # H is not a constant of motion
            ok &= run.check(f"drift {name}", rep.max_rel_drift, tol)
        else:
            run.say(f"H range: {rep.max_abs_drift:.3e} (H is conserved only for time-independent w and rho)")
    return ok


def cmd_symmetry(run: Run):
    sc = run.sc
    if sc.rho is None:
        raise ConfigError("[system] symmetry needs rho")
    traj = integrate(sc.rhs(), sc.s0, sc.t_end, sc.cfg, sc.grid, dense=True, system_id=sc.form)
    tol = sc.tol if sc.tol is not None else 1e-6
    picks = list(traj)[:: max(1, len(traj) // 40)]
    verdict, witness = is_symmetric_frequency(sc.system.Omega2, sc.rho, picks, sc.eps)
    dev = dict(witness.table)
    rows = []
    run.say(f"{'eps':>8} {'sigma* dev':>12} {'map residual':>13}")
    for eps in sc.eps:
        res = solution_map_check(sc.system, traj, GroupParams(sc.rho, sc.s0.t, eps)).max_residual
        rows.append((eps, dev.get(eps, math.nan), res))
        run.say(f"{eps:8.3g} {dev.get(eps, math.nan):12.3e} {res:13.3e}")
    write_csv(run.out / "symmetry.csv", ["eps", "sigma_star_deviation", "map_residual"], rows)
    run.summary["symmetric"] = bool(verdict)
    run.summary["witness"] = {"eps": witness.eps, "deviation": witness.deviation,
                              "state": None if witness.state is None else witness.state.as_tuple()}
    run.say(f"verdict: {'admissible' if verdict else 'not admissible'} frequency")
    ok = verdict
    for eps, _, res in rows:
        ok &= run.check(f"map residual eps={eps:g}", res, tol)
    return ok


def cmd_reduce(run: Run, compare=False):
    sc = run.sc
    if sc.spec is None:
        raise ConfigError("[system] form must be rayreid for reduce/compare")
    sol, qtraj = reduce_rayreid(sc.spec, sc.s0, sc.grid, sc.q_ref)
    run.summary["I"], run.summary["J"] = sol.I, sol.J
    run.summary["turning_points"] = sol.turning_points
    if not compare:
        write_csv(run.out / "reduced.csv", ["T", "q", "s", "t", "x", "y", "L_residual", "P_residual"],
                  [(T, q, s, st.t, st.x, st.y, r1, r2) for T, q, s, st, r1, r2 in
                   zip(sol.T, sol.q, sol.s, qtraj, sol.L_residual, sol.P_residual)])
        tol = sc.tol if sc.tol is not None else 1e-6
        ok = run.check("L residual", float(np.max(np.abs(sol.L_residual))), tol)
        ok &= run.check("P residual", float(np.max(np.abs(sol.P_residual))), tol)
        return ok
    direct = run.trajectory()
    dx = [abs(a.x - b.x) for a, b in zip(qtraj, direct)]
    dy = [abs(a.y - b.y) for a, b in zip(qtraj, direct)]
    write_csv(run.out / "compare.csv", ["t", "x_quad", "y_quad", "x_direct", "y_direct", "dx", "dy"],
              [(b.t, a.x, a.y, b.x, b.y, ex, ey) for a, b, ex, ey in zip(qtraj, direct, dx, dy)])
    if run.svg:
        (run.out / "compare.svg").write_text(series_svg(
            direct.t, [("x direct", direct.column("x")), ("x quadrature", qtraj.column("x"))],
            "quadrature vs direct", "t"))
    tol = sc.tol if sc.tol is not None else 1e-5
    ok = run.check("max |dx|", max(dx), tol)
    ok &= run.check("max |dy|", max(dy), tol)
    return ok


def cmd_quasi(run: Run):
    sc = run.sc
    if sc.form != "traditional":
        raise ConfigError("[system] form must be traditional for quasi")
    q = sc.sections["quasi"]
    cpath = solve_tdho(sc.omega, q.number("C0", 1.0), q.number("Cdot0", 0.0), sc.s0.t, sc.t_end)
    t_ref = q.number("t_ref", sc.s0.t)
    traj = run.trajectory()
    lo, hi = cpath.window
    kept = [s for s in traj if lo <= s.t <= hi]
    bars = [quasi_transform(cpath, s, t_ref) for s in kept]
    res = sl2_residuals(sc.f, sc.g, bars)
    chain = sl2_chain_residuals(sc.f, sc.g, cpath, kept, t_ref)
    write_csv(run.out / "quasi.csv",
              ["t", "tbar", "xbar", "ybar", "xbar_prime", "ybar_prime", "residual", "chain_residual"],
              [(s.t, b.t, b.x, b.y, b.xdot, b.ydot, r, c) for s, b, r, c in zip(kept, bars, res, chain)])
    run.summary["window"] = [lo, hi]
    run.summary["max_chain_residual"] = float(np.max(chain))
    tol = sc.tol if sc.tol is not None else 1e-6
    return run.check("sl2 residual", float(np.max(res)), tol)


def cmd_pinney(run: Run):
    sc = run.sc
    p = sc.sections["pinney"]
    if p.has("omega"):
        omega = p.expr("omega", TIME_VARS)
    elif sc.omega is not None:
        omega = sc.omega
    else:
        raise ConfigError("[pinney] omega missing")
    t0 = p.number("t0", sc.s0.t)
    t1 = p.number("t_end", sc.t_end)
    path = solve_pinney(omega, p.number("rho0", 1.0), p.number("rhodot0", 0.0), t0, t1)
    ts = np.array(uniform_grid(t0, t1, int(p.number("n_out", sc.n_out))))
    rho, rhodot = path.samples(ts)
    res = path.residuals(ts)
    write_csv(run.out / "pinney.csv", ["t", "rho", "rhodot", "residual"], zip(ts, rho, rhodot, res))
    if run.svg:
        (run.out / "pinney.svg").write_text(series_svg(ts, [("rho", rho)], "Pinney solution", "t"))
    tol = sc.tol if sc.tol is not None else 1e-7
    return run.check("Pinney residual", float(np.max(np.abs(res))), tol)


HANDLERS = {
    "simulate": cmd_simulate,
    "invariants": cmd_invariants,
    "symmetry": cmd_symmetry,
    "reduce": cmd_reduce,
    "quasi": cmd_quasi,
    "pinney": cmd_pinney,
    "compare": lambda run: cmd_reduce(run, compare=True),
}


def run(command, config_path, out_dir, tol=None, quiet=False, svg=False) -> int:
    """Execute one command; returns the process exit status."""
    try:
        sc = load_scenario(config_path, tol)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        r = Run(sc, out, quiet, svg)
        ok = HANDLERS[command](r)
        r.summary["command"] = command
        r.summary["pass"] = bool(ok)
        write_json(out / f"{command}_summary.json", r.summary)
        if not ok:
            raise CheckFailed(f"{command}: check failed")
        return EXIT_OK
    except CheckFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ErmakovError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def build_parser():
    ap = argparse.ArgumentParser(prog="ermakov", description="Generalized Ermakov systems toolkit")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, metavar="PATH")
    ap.add_argument("--out", default="out", metavar="DIR")
    ap.add_argument("--tol", type=float, default=None, help="override the check tolerance")
    ap.add_argument("--quiet", action="store_true")
    ap.add_argument("--svg", action="store_true", help="also write SVG plots where available")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = os.environ.get("ERMAKOV_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    return run(args.command, args.config, args.out, args.tol, args.quiet, args.svg)


if __name__ == "__main__":
    sys.exit(main())
