"""Command-line front end.

Exit codes: 0 success, 2 infeasible protocol, 3 numerical failure, 64 usage error.
All quantities are in atomic units.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .errors import InfeasibleProtocol, RevPulseError
from .integrate import LAB, RWA, simulate
from .model import NoiseParams, SystemParams
from .profile import ControlTarget, source_term, steady_state_feasibility, time_grid
from .pulse import default_dt, field_from_trajectory, synthesize
from .svg import render_grid
from .sweep import feasibility_map, max_feasible_nbar

EXIT_OK, EXIT_INFEASIBLE, EXIT_NUMERIC, EXIT_USAGE = 0, 2, 3, 64
COMMANDS = ("synth", "simulate", "map", "steady", "nbar-bound")


@dataclass
class RunConfig:
    command: str = "synth"
    omega: float = 2e-2
    mu: float = 6.0
    omega_p: float | None = None
    gamma: float = 0.0
    Gamma: float = 0.0
    nbar: float = 0.0
    a_i: float = 0.8
    a_f: float = 0.3
    alpha: float = 1e-2
    t0: float | None = None
    phi0: float = 0.0
    dt: float | None = None
    t1: float | None = None
    horizon: float | None = None
    h_floor: float = 1e-9
    a_max: float | None = None
    u_seed: float = 0.0
    out: str | None = None
    axis: str = "af"
    min: float | None = None
    max: float | None = None
    steps: int | None = None
    rwa: bool = False
    verify: bool = False
    svg: str | None = None

    def resolve(self) -> "RunConfig":
        """Fill derived defaults; raises ValueError on invalid physics."""
        if self.t0 is None:
            self.t0 = -8.0 / self.alpha
        if self.t1 is None:
            self.t1 = 8.0 / self.alpha
        if not self.t1 > self.t0:
            raise ValueError("t1 must exceed t0")
        if self.dt is None:
            self.dt = default_dt(self.system(), self.noise())
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.horizon is None:
            self.horizon = self.t0 + 16.0 / self.alpha
        if self.axis not in ("af", "nbar"):
            raise ValueError("--axis must be 'af' or 'nbar'")
        self.target()
        return self

    def system(self) -> SystemParams:
        return SystemParams(self.omega, self.mu, self.omega_p)

    def noise(self) -> NoiseParams:
        return NoiseParams(self.gamma, self.Gamma, self.nbar)

    def target(self) -> ControlTarget:
        return ControlTarget(self.a_i, self.a_f, self.alpha, self.t0, self.phi0)

    def header(self) -> list[str]:
        return ["# " + json.dumps({k: v for k, v in asdict(self).items()}, sort_keys=True)]


# flag -> RunConfig field
FLAGS = {
    "omega": "omega", "mu": "mu", "omega-p": "omega_p", "gamma": "gamma", "big-gamma": "Gamma",
    "nbar": "nbar", "ai": "a_i", "af": "a_f", "alpha": "alpha", "t0": "t0", "t1": "t1",
    "dt": "dt", "phi0": "phi0", "horizon": "horizon", "h-floor": "h_floor", "a-max": "a_max",
    "u-seed": "u_seed", "min": "min", "max": "max", "steps": "steps",
}
STR_FLAGS = {"out": "out", "axis": "axis", "svg": "svg"}
BOOL_FLAGS = {"rwa": "rwa", "verify": "verify"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="revpulse", description="Reverse-engineered pulses for a noisy two-level system")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="key=value file; command-line flags take precedence")
    for flag in FLAGS:
        ap.add_argument(f"--{flag}", type=int if flag == "steps" else float, default=None)
    for flag in STR_FLAGS:
        ap.add_argument(f"--{flag}", default=None)
    for flag in BOOL_FLAGS:
        ap.add_argument(f"--{flag}", action="store_true", default=None)
    return ap


def _read_config_file(path: str) -> dict:
    known = {**FLAGS, **STR_FLAGS, **BOOL_FLAGS}
    known.update({v: v for v in known.values()})
    types = {f.name: f.type for f in fields(RunConfig)}
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        k = k.lstrip("-").replace("_", "-") if k.lstrip("-").replace("_", "-") in known else k
        if k not in known:
            raise UsageError(f"{path}:{lineno}: unknown key {k!r}")
        name = known[k]
        if name in BOOL_FLAGS.values():
            out[name] = v.lower() in ("1", "true", "yes", "on")
        elif name in STR_FLAGS.values():
            out[name] = v
        else:
            out[name] = int(v) if "int" in str(types[name]) else float(v)
    return out


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    values = {}
    if ns.config:
        values.update(_read_config_file(ns.config))
    for table in (FLAGS, STR_FLAGS, BOOL_FLAGS):
        for flag, name in table.items():
            v = getattr(ns, flag.replace("-", "_"))
            if v is not None:
                values[name] = v
    cfg = RunConfig(command=ns.command, **values)
    try:
        return cfg.resolve()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    return format(float(x), ".17g")


def _write(path: str | None, lines: list[str]):
    text = "\n".join(lines) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_synth(cfg: RunConfig) -> int:
    sysp, noise, target = cfg.system(), cfg.noise(), cfg.target()
    pulse = synthesize(target, noise, sysp, t1=cfg.t1, dt=cfg.dt, u_seed=cfg.u_seed,
                       h_floor=cfg.h_floor, a_max=cfg.a_max)
    prof = pulse.profile
    grid = time_grid(target.t0, cfg.t1, cfg.dt)
    lines = cfg.header() + [f"# t_start={_fmt(pulse.t_start)}", "t,E,f,fdot,u,h,feasible"]
    tv = pulse.divergence_time
    for t in grid:
        if tv is not None and t >= tv:
            break
        u = float(prof.u_at(t))
        E = pulse.field_at(t) if t >= pulse.t_start - 1e-9 else 0.0
        f = float(prof.f_at(t))
        fd = float(target.alpha * (target.a_f - target.a_i) * _g1g(t, target))
        lines.append(",".join(_fmt(x) for x in (t, E, f, fd, u, math.sqrt(max(u, 0.0)), u >= -1e-12)))
    if tv is not None:
        lines.append(f"# first_violation_time={_fmt(tv)}")
    _write(cfg.out, lines)
    if cfg.verify:
        if cfg.out in (None, "-"):
            raise UsageError("--verify needs --out FILE")
        dev = verify_synth_csv(cfg.out, cfg)
        print(f"verify: max |E - E_reconstructed| / max|E| = {dev:.3e}", file=sys.stderr)
        if dev > 1e-6:
            return EXIT_NUMERIC
    if tv is not None:
        print(f"infeasible: first_violation_time={tv:.6g}", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def _g1g(t, target):
    from .profile import g_sigmoid

    g = g_sigmoid(t, target.alpha)
    return g * (1.0 - g)


def read_csv(path: str) -> dict:
    rows = [ln for ln in Path(path).read_text().splitlines() if ln and not ln.startswith("#")]
    head = rows[0].split(",")
    data = np.array([[float(x) for x in r.split(",")] for r in rows[1:]])
    return {k: data[:, i] for i, k in enumerate(head)}


def verify_synth_csv(path: str, cfg: RunConfig) -> float:
    """Rebuild E from the written (f, fdot, u) columns via the general inverse-field formula."""
    d = read_csv(path)
    sysp, noise, target = cfg.system(), cfg.noise(), cfg.target()
    t, f, u, h, E = d["t"], d["f"], d["u"], d["h"], d["E"]
    s = source_term(t, target, noise)
    udot = -2 * noise.gamma_total * u + s
    keep = (h > cfg.h_floor) & (np.abs(2 * f - 1) > 1e-9)
    keep &= t >= _t_start(path)
    phase = np.exp(1j * target.phi0)
    hdot = np.where(keep, udot / (2 * np.where(keep, h, 1.0)), 0.0)
    rec, singular = field_from_trajectory(t, f, h * phase, hdot * phase, target.t0, sysp, noise)
    keep &= ~singular
    if not keep.any():
        return 0.0
    scale = max(float(np.max(np.abs(E[keep]))), 1e-300)
    return float(np.max(np.abs(rec[keep] - E[keep]))) / scale


def _t_start(path: str) -> float:
    for ln in Path(path).read_text().splitlines():
        if ln.startswith("# t_start="):
            return float(ln.split("=", 1)[1])
    return -math.inf


def cmd_simulate(cfg: RunConfig) -> int:
    sysp, noise, target = cfg.system(), cfg.noise(), cfg.target()
    pulse = synthesize(target, noise, sysp, t1=cfg.t1, dt=cfg.dt, u_seed=cfg.u_seed,
                       h_floor=cfg.h_floor, a_max=cfg.a_max)
    kind = RWA if cfg.rwa else LAB
    traj, rep = simulate(pulse, kind=kind, t1=cfg.t1, dt=cfg.dt)
    prof = pulse.profile
    lines = cfg.header() + ["t,E,rho_gg,rho_ee,re_rho_ge,im_rho_ge,abs_rho_ge,f,h"]
    for k, t in enumerate(traj.t):
        u = float(prof.u_at(t))
        c = traj.rho_ge[k]
        lines.append(",".join(_fmt(x) for x in (
            t, traj.field[k], traj.rho_gg[k], 1.0 - traj.rho_gg[k], c.real, c.imag, abs(c),
            prof.f_at(t), math.sqrt(max(u, 0.0)))))
    clips = 0
    if pulse.a_max is not None:
        clips = sum(1 for t in traj.t if pulse.in_window(t) and pulse.clipped(float(t)))
    report = [f"rhs={kind}", *rep.lines(), f"clip_events={clips}",
              f"peak_amplitude={pulse.peak_amplitude:.6e}",
              f"divergence_time={'none' if pulse.divergence_time is None else f'{pulse.divergence_time:.9g}'}"]
    lines += ["# " + r for r in report]
    _write(cfg.out, lines)
    print("\n".join(report), file=sys.stderr if cfg.out in (None, "-") else sys.stdout)
    return EXIT_INFEASIBLE if pulse.divergence_time is not None else EXIT_OK


def cmd_map(cfg: RunConfig) -> int:
    noise, target = cfg.noise(), cfg.target()
    axis = "a_f" if cfg.axis == "af" else "nbar"
    lo = 0.0 if cfg.min is None else cfg.min
    hi = 1.0 if cfg.max is None else cfg.max
    steps = (201 if axis == "a_f" else 101) if cfg.steps is None else cfg.steps
    if steps < 2:
        raise UsageError("--steps must be >= 2")
    grid = feasibility_map(axis, (lo, hi, steps), target, noise, cfg.horizon, dt=cfg.dt, workers=4)
    head = cfg.header()
    lines = head + [f"{axis},t,u,accessible"]
    for i, v in enumerate(grid.values):
        acc = grid.accessible[i]
        lines.extend(f"{_fmt(v)},{_fmt(t)},{_fmt(u)},{_fmt(acc)}" for t, u in zip(grid.t, grid.u[i]))
    _write(cfg.out, lines)
    if cfg.out not in (None, "-"):
        matrix = ["# " + json.dumps(grid.params, sort_keys=True),
                  "# rows: " + axis + " values; columns: t; first row holds t, first column the swept value",
                  ",".join(["nan"] + [_fmt(t) for t in grid.t])]
        matrix += [",".join([_fmt(v)] + [_fmt(u) for u in grid.u[i]]) for i, v in enumerate(grid.values)]
        Path(cfg.out).with_suffix(".matrix.csv").write_text("\n".join(matrix) + "\n")
    if cfg.svg:
        Path(cfg.svg).write_text(render_grid(grid, title=f"Im h(t) vs {axis}"))
    bands = grid.bands()
    summary = f"accessible {axis}: " + (
        " ".join(f"[{a:.6g},{b:.6g}]" for a, b in bands) if bands else "none")
    if axis == "nbar":
        try:
            bound = max_feasible_nbar(target, noise, cfg.horizon, dt=cfg.dt)
            summary += f"; nbar bound={bound:.6g}"
        except InfeasibleProtocol:
            summary += "; nbar bound=none (infeasible at nbar=0)"
    summary += f"; horizon={cfg.horizon:.6g}"
    print(summary, file=sys.stderr if cfg.out in (None, "-") else sys.stdout)
    return EXIT_OK


def cmd_steady(cfg: RunConfig) -> int:
    noise, sysp = cfg.noise(), cfg.system()
    rep = steady_state_feasibility(cfg.a_f, noise, sysp)
    band = ";".join(f"{a:.17g},{b:.17g}" for a, b in rep.a_f_band)
    print(f"band: {' '.join(f'[{a:.6g}, {b:.6g}]' for a, b in rep.a_f_band) or 'empty'}")
    if rep.degenerate:
        print(rep.message)
    elif rep.feasible:
        print(f"h_inf({cfg.a_f:g}) = {rep.h_inf:.6f}")
        if rep.steady_field_amplitude is not None:
            print(f"steady field amplitude = {rep.steady_field_amplitude:.6e}")
    else:
        print(f"infeasible: {rep.message}")
    print("a_f,h_inf,feasible,band,steady_field_amplitude")
    print(",".join([_fmt(cfg.a_f), "" if rep.h_inf is None else _fmt(rep.h_inf), _fmt(rep.feasible),
                    f'"{band}"', "" if rep.steady_field_amplitude is None else _fmt(rep.steady_field_amplitude)]))
    return EXIT_OK if rep.feasible else EXIT_INFEASIBLE


def cmd_nbar_bound(cfg: RunConfig) -> int:
    bound = max_feasible_nbar(cfg.target(), cfg.noise(), cfg.horizon, dt=cfg.dt)
    print(f"nbar bound={bound:.6g} (horizon={cfg.horizon:.6g})")
    return EXIT_OK


DISPATCH = {"synth": cmd_synth, "simulate": cmd_simulate, "map": cmd_map, "steady": cmd_steady,
            "nbar-bound": cmd_nbar_bound}


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
        return DISPATCH[cfg.command](cfg)
    except UsageError as exc:
        print(f"revpulse: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RevPulseError as exc:
        print(f"revpulse: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
