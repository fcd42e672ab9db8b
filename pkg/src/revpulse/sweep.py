"""Accessibility maps: sign of ``u = h**2`` over time for a swept parameter.

Feasibility depends only on the sign of ``u``, so no field is synthesised and no
master equation is integrated here.  Negative cells are the regions where the
coherence magnitude would have to be imaginary.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import NoFeasibleBaseline, NonMonotoneBracket
from .model import NoiseParams
from .profile import (TOL_U, ControlTarget, dissipation_drive, solve_coherence, time_grid)

AXES = ("a_f", "nbar")
INFINITE_HOLD = 10.0  # decay times 1/(2 G) appended to the transition in infinite-horizon mode


@dataclass(frozen=True, eq=False)
class FeasibilityGrid:
    axis: str
    values: np.ndarray
    t: np.ndarray
    u: np.ndarray  # shape (len(values), len(t))
    accessible: np.ndarray
    first_violation: np.ndarray  # NaN where never violated
    horizon: float
    params: dict = field(default_factory=dict)

    @property
    def imag_h(self) -> np.ndarray:
        """Imaginary part of h: ``-sqrt(|u|)`` where ``u < 0``, else 0."""
        return np.where(self.u < 0, -np.sqrt(np.abs(self.u)), 0.0)

    def bands(self) -> list[tuple[float, float]]:
        return _runs(self.values, self.accessible)


def _runs(values, flags):
    out = []
    start = None
    for v, ok in zip(values, flags):
        if ok and start is None:
            start = v
        if not ok and start is not None:
            out.append((float(start), float(prev)))
            start = None
        prev = v
    if start is not None:
        out.append((float(start), float(prev)))
    return out


def _column(target: ControlTarget, noise: NoiseParams, grid: np.ndarray):
    prof = solve_coherence(target, noise, grid, strict=False)
    fv = prof.first_violation_time
    return prof.u, fv is None, (math.nan if fv is None else fv)


def _apply(axis: str, v: float, target: ControlTarget, noise: NoiseParams):
    if axis == "a_f":
        return target.replace(a_f=float(v)), noise
    if axis == "nbar":
        return target, noise.with_(nbar=float(v))
    raise ValueError(f"axis must be one of {AXES}, got {axis!r}")


def feasibility_map(axis: str, values, target: ControlTarget, noise: NoiseParams,
                    horizon: float | None = None, *, dt: float = 1.0,
                    workers: int | None = None) -> FeasibilityGrid:
    """Solve ``u(t)`` for each swept value on ``[t0, horizon]``.

    ``values`` is an array or a ``(min, max, steps)`` triple.  Columns are independent
    and may be evaluated on a thread pool; results are assembled in index order.
    """
    if isinstance(values, tuple) and len(values) == 3:
        lo, hi, steps = values
        if steps < 2:
            raise ValueError("steps must be >= 2")
        values = np.linspace(lo, hi, int(steps))
    values = np.asarray(values, dtype=float)
    if horizon is None:
        horizon = target.default_horizon
    grid = time_grid(target.t0, horizon, dt)

    def work(v):
        tg, nz = _apply(axis, v, target, noise)
        return _column(tg, nz, grid)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            cols = list(ex.map(work, values))
    else:
        cols = [work(v) for v in values]
    u = np.vstack([c[0] for c in cols])
    params = {
        "a_i": target.a_i, "a_f": target.a_f, "alpha": target.alpha, "t0": target.t0,
        "phi0": target.phi0, "gamma": noise.gamma, "Gamma": noise.Gamma, "nbar": noise.nbar,
        "horizon": float(horizon), "dt": dt, "axis": axis,
    }
    return FeasibilityGrid(axis, values, grid, u, np.array([c[1] for c in cols]),
                           np.array([c[2] for c in cols]), float(horizon), params)


def is_accessible(target: ControlTarget, noise: NoiseParams, horizon: float, dt: float = 1.0) -> bool:
    """u >= 0 on ``[t0, horizon]``; ``horizon=inf`` also requires 0 <= u_inf <= 1/4."""
    if math.isinf(horizon):
        G = noise.gamma_total
        if G <= 0:
            raise ValueError("infinite-horizon feasibility needs a non-zero decoherence rate")
        a = target.a_f
        u_inf = (2 * a - 1) * float(dissipation_drive(a, noise)) / (2 * G)
        if not (-TOL_U <= u_inf <= 0.25 + TOL_U):
            return False
        horizon = target.default_horizon + INFINITE_HOLD / (2 * G)
    prof = solve_coherence(target, noise, time_grid(target.t0, horizon, dt), strict=False)
    return prof.all_feasible


def _refine_edge(pred, good: float, bad: float, tol: float) -> float:
    while abs(bad - good) > tol:
        mid = 0.5 * (good + bad)
        if pred(mid):
            good = mid
        else:
            bad = mid
    return good


def _band_from_predicate(pred, resolution: int, tol: float, lo: float = 0.0, hi: float = 1.0):
    if resolution < 50:
        raise ValueError("resolution must be >= 50")
    xs = np.linspace(lo, hi, resolution)
    flags = [pred(float(x)) for x in xs]
    bands = []
    for a, b in _runs(xs, flags):
        i, j = int(np.searchsorted(xs, a)), int(np.searchsorted(xs, b))
        left = a if i == 0 else _refine_edge(pred, a, float(xs[i - 1]), tol)
        right = b if j == xs.size - 1 else _refine_edge(pred, b, float(xs[j + 1]), tol)
        bands.append((left, right))
    return bands


def accessible_band(a_i: float, noise: NoiseParams, horizon: float | None = None,
                    resolution: int = 201, *, alpha: float = 1e-2, t0: float | None = None,
                    dt: float = 1.0, tol: float = 1e-4) -> list[tuple[float, float]]:
    """Maximal intervals of reachable ``a_f`` from ``a_i``, edges bisected to ``tol``."""
    base = ControlTarget(a_i, a_i, alpha, t0)
    if horizon is None:
        horizon = base.default_horizon
    return _band_from_predicate(
        lambda a: is_accessible(base.replace(a_f=a), noise, horizon, dt), resolution, tol)


def steady_band_numeric(noise: NoiseParams, resolution: int = 201, *, alpha: float = 1e-2,
                        dt: float = 1.0, tol: float = 1e-4) -> list[tuple[float, float]]:
    """Targets whose coherence can be held indefinitely, found by integration.

    Each candidate is started already at its target population (``a_i = a_f``) and
    ``u`` is integrated for many decay times; it must stay within ``[0, 1/4]``.
    """
    G = noise.gamma_total
    if noise.Gamma <= 0 or G <= 0:
        raise ValueError("steady band scan needs Gamma > 0")

    def pred(a):
        tg = ControlTarget(a, a, alpha)
        horizon = tg.default_horizon + 2 * INFINITE_HOLD / (2 * G)
        prof = solve_coherence(tg, noise, time_grid(tg.t0, horizon, dt), strict=False)
        return prof.all_feasible and prof.u.max() <= 0.25 + TOL_U

    return _band_from_predicate(pred, resolution, tol)


def max_feasible_nbar(target: ControlTarget, noise: NoiseParams, horizon: float | None = None,
                      tol: float = 1e-3, *, cap: float = 64.0, dt: float = 1.0,
                      probes: int = 8) -> float:
    """Largest thermal occupation for which the protocol stays feasible up to ``horizon``.

    Bisection on ``[0, nbar_hi]`` with ``nbar_hi`` doubled from 1 until infeasible.  Returns
    ``inf`` if still feasible at ``cap``.  Feasibility is assumed monotone in nbar; the
    bracket is probed at ``probes`` interior points and NonMonotoneBracket raised otherwise.
    """
    if horizon is None:
        horizon = target.default_horizon

    def ok(nb):
        return is_accessible(target, noise.with_(nbar=nb), horizon, dt)

    if not ok(0.0):
        raise NoFeasibleBaseline("protocol infeasible already at nbar = 0")
    hi = 1.0
    while ok(hi):
        if hi >= cap:
            return math.inf
        hi = min(2 * hi, cap)
    flags = [ok(x) for x in np.linspace(0.0, hi, probes + 2)]
    first_bad = flags.index(False)
    if any(flags[first_bad:]):
        raise NonMonotoneBracket(f"feasibility flips more than once on [0, {hi}]: {flags}")
    lo = float(np.linspace(0.0, hi, probes + 2)[first_bad - 1])
    hi = float(np.linspace(0.0, hi, probes + 2)[first_bad])
    return _refine_edge(ok, lo, hi, tol)
