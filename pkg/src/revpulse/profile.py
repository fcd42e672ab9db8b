"""Prescribed population path and the coherence it forces.

The ground population is pinned to a logistic interpolation ``f(t)`` from
``a_i`` to ``a_f``.  Keeping the coherence phase fixed, the coherence
magnitude ``h`` obeys a Bernoulli equation

    h' = (2f - 1) / (2h) * [2 Gamma D(f) - f'] - G h,   D(f) = 1 + nbar - (2 nbar + 1) f

with ``G`` the total decoherence rate.  Multiplying by ``2h`` linearises it
exactly in ``u = h**2``:

    u' = -2 G u + s(t),   s(t) = (2f - 1) [2 Gamma D(f) - f']

so the 1/h singularity disappears and an unphysical trajectory shows up as
``u < 0``.  With ``u(t0) = 0`` the sign of ``s(t0)`` decides whether the
protocol can start at all.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq
from scipy.special import expit

from .errors import DegenerateNoiseless, InfeasibleAtOnset, NegativeRadicand
from .model import NoiseParams, SystemParams

TOL_U = 1e-12
DELTA_G = 1e-3


@dataclass(frozen=True)
class ControlTarget:
    a_i: float = 0.8
    a_f: float = 0.3
    alpha: float = 1e-2
    t0: float | None = None
    phi0: float = 0.0
    tail_tol: float = DELTA_G

    def __post_init__(self):
        if self.t0 is None:
            object.__setattr__(self, "t0", -8.0 / self.alpha if self.alpha > 0 else -1.0)
        for name in ("a_i", "a_f"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.t0 < 0:
            raise ValueError(f"t0 must be negative (transition is centred at t=0), got {self.t0}")
        if self.alpha * abs(self.t0) < math.log(1.0 / self.tail_tol - 1.0):
            raise ValueError(
                f"alpha*|t0| = {self.alpha * abs(self.t0):.3g} leaves g(t0) above {self.tail_tol}")

    def replace(self, **kw) -> "ControlTarget":
        d = dict(a_i=self.a_i, a_f=self.a_f, alpha=self.alpha, t0=self.t0, phi0=self.phi0,
                 tail_tol=self.tail_tol)
        d.update(kw)
        return ControlTarget(**d)

    @property
    def default_horizon(self) -> float:
        return self.t0 + 16.0 / self.alpha


def g_sigmoid(t, alpha):
    """Logistic switch ``1 / (1 + exp(-alpha t))``, overflow-safe."""
    return expit(alpha * np.asarray(t, dtype=float)) if np.ndim(t) else float(expit(alpha * t))


def f_profile(t, target: ControlTarget):
    g = g_sigmoid(t, target.alpha)
    return (1.0 - g) * target.a_i + target.a_f * g


def f_dot(t, target: ControlTarget):
    # d/dt g = alpha g (1 - g)
    g = g_sigmoid(t, target.alpha)
    return target.alpha * (target.a_f - target.a_i) * g * (1.0 - g)


def dissipation_drive(f, noise: NoiseParams):
    """``2 Gamma D(f)``: population rate the field has to cancel to hold ``f``."""
    return 2.0 * noise.Gamma * (1.0 + noise.nbar - (2.0 * noise.nbar + 1.0) * f)


def source_term(t, target: ControlTarget, noise: NoiseParams):
    """Inhomogeneous term of the linear ODE for ``u = h**2``."""
    f = f_profile(t, target)
    return (2.0 * f - 1.0) * (dissipation_drive(f, noise) - f_dot(t, target))


def time_grid(t0: float, t1: float, dt: float) -> np.ndarray:
    """Uniform grid ``t0, t0+dt, ...`` that ends exactly on ``t1`` (last step never longer than dt)."""
    n = int(math.ceil((t1 - t0) / dt - 1e-9))
    grid = t0 + (t1 - t0) * np.arange(n + 1) / n
    grid[-1] = t1
    return grid


@dataclass(frozen=True, eq=False)
class CoherenceProfile:
    """Solved ``u(t) = h(t)**2`` on a time grid together with its feasibility flags."""

    t: np.ndarray
    u: np.ndarray
    udot: np.ndarray
    target: ControlTarget
    noise: NoiseParams
    u_seed: float = 0.0
    feasible: np.ndarray = field(init=False)
    first_violation_time: float | None = field(init=False)

    def __post_init__(self):
        feas = self.u >= -TOL_U
        object.__setattr__(self, "feasible", feas)
        object.__setattr__(self, "first_violation_time", self._find_violation(feas))
        for arr in (self.t, self.u, self.udot, feas):
            arr.setflags(write=False)

    def _find_violation(self, feas):
        bad = np.flatnonzero(~feas)
        if bad.size == 0:
            return None
        k = int(bad[0])
        if k == 0:
            return float(self.t[0])
        # zero crossing of the Hermite interpolant between the last good and first bad node
        spline = self.spline
        a, b = float(self.t[k - 1]), float(self.t[k])
        if spline(a) > 0 > spline(b):
            return float(brentq(spline, a, b, xtol=1e-12))
        # u was sitting on zero at the last good node (diagonal start with s(t0) < 0)
        return a

    @property
    def spline(self) -> CubicHermiteSpline:
        sp = self.__dict__.get("_spline")
        if sp is None:
            sp = CubicHermiteSpline(self.t, self.u, self.udot)
            object.__setattr__(self, "_spline", sp)
        return sp

    @property
    def h(self) -> np.ndarray:
        return np.sqrt(np.clip(self.u, 0.0, None))

    @property
    def all_feasible(self) -> bool:
        return self.first_violation_time is None

    def u_at(self, t):
        return self.spline(t)

    def udot_at(self, t):
        """``u'`` from the ODE right-hand side (exact given u), not from the interpolant."""
        return -2.0 * self.noise.gamma_total * self.spline(t) + source_term(t, self.target, self.noise)

    def f_at(self, t):
        return f_profile(t, self.target)

    def min_u(self) -> float:
        return float(self.u.min())


def _rk4_linear(t: np.ndarray, k: float, s_fn, u0: float) -> np.ndarray:
    """Classical RK4 for ``u' = -k u + s(t)`` on an arbitrary monotone grid."""
    dt = np.diff(t)
    s_node = s_fn(t)
    s_mid = s_fn(t[:-1] + 0.5 * dt)
    u = np.empty_like(t)
    u[0] = u0
    for n in range(dt.size):
        h = dt[n]
        un = u[n]
        k1 = -k * un + s_node[n]
        k2 = -k * (un + 0.5 * h * k1) + s_mid[n]
        k3 = -k * (un + 0.5 * h * k2) + s_mid[n]
        k4 = -k * (un + h * k3) + s_node[n + 1]
        u[n + 1] = un + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return u


def solve_coherence(target: ControlTarget, noise: NoiseParams, grid=None, *, u_seed: float = 0.0,
                    t1: float | None = None, dt: float = 0.5, strict: bool = True) -> CoherenceProfile:
    """Integrate the linear ``u`` equation on ``grid`` (default: ``t0 .. horizon`` at step ``dt``).

    Raises InfeasibleAtOnset when the protocol starts from a diagonal state but the
    source term is already negative at ``t0``; ``strict=False`` returns the (flagged)
    profile instead.
    """
    if u_seed < 0:
        raise ValueError("u_seed must be >= 0")
    if grid is None:
        grid = time_grid(target.t0, target.default_horizon if t1 is None else t1, dt)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be a strictly increasing 1-D array with at least 2 points")
    if not math.isclose(grid[0], target.t0, rel_tol=0, abs_tol=1e-9 * max(1.0, abs(target.t0))):
        raise ValueError(f"grid must start at t0={target.t0}, got {grid[0]}")
    s0 = source_term(target.t0, target, noise)
    if strict and u_seed == 0.0 and s0 < 0.0:
        raise InfeasibleAtOnset(f"source term s(t0) = {s0:.3e} < 0 with zero initial coherence")
    k = 2.0 * noise.gamma_total
    s_fn = lambda tt: source_term(tt, target, noise)  # noqa: E731
    u = _rk4_linear(grid, k, s_fn, u_seed)
    udot = -k * u + s_fn(grid)
    return CoherenceProfile(grid, u, udot, target, noise, u_seed)


def coherence_quadrature(target: ControlTarget, noise: NoiseParams, times, *, u_seed: float = 0.0):
    """Closed-form ``u(t) = e^{-2G(t-t0)} u_seed + int_{t0}^t e^{-2G(t-tau)} s(tau) dtau``.

    Evaluated piecewise with adaptive Gauss-Kronrod quadrature; independent of the RK path.
    """
    times = np.asarray(times, dtype=float)
    k = 2.0 * noise.gamma_total
    out = np.empty_like(times)
    acc = u_seed
    prev = target.t0
    for i, t in enumerate(times):
        piece, _ = integrate.quad(
            lambda tau: math.exp(-k * (t - tau)) * source_term(tau, target, noise),
            prev, t, epsabs=1e-15, epsrel=1e-13, limit=200)
        acc = acc * math.exp(-k * (t - prev)) + piece
        out[i] = acc
        prev = t
    return out


# -- steady state ---------------------------------------------------------------------------

def _steady_product(a_f: float, noise: NoiseParams) -> float:
    return (2 * a_f - 1) * (1 + noise.nbar - (2 * noise.nbar + 1) * a_f)


def steady_state_coherence(a_f: float, noise: NoiseParams) -> float:
    """Asymptotic coherence ``h_inf`` once ``f`` has settled on ``a_f``."""
    if noise.Gamma == 0 and noise.gamma == 0:
        raise DegenerateNoiseless("Gamma = gamma = 0: steady coherence is 0/0")
    p = _steady_product(a_f, noise)
    if p < 0 and noise.Gamma > 0:
        raise NegativeRadicand(f"(2a_f-1)(1+n-(2n+1)a_f) = {p:.6g} < 0")
    return math.sqrt(max(p * noise.Gamma / noise.gamma_total, 0.0))


def steady_band(noise: NoiseParams) -> list[tuple[float, float]]:
    """Closed ``a_f`` intervals satisfying ``0 <= P(a_f) <= G / (4 Gamma)``.

    ``P(a) = (2a-1)(1+n-(2n+1)a)`` is a concave parabola with roots ``1/2`` and
    ``(1+n)/(2n+1)``; the upper bound may carve a hole around its apex.
    """
    if noise.Gamma == 0:
        return [(0.0, 1.0)]
    n = noise.nbar
    lo, hi = 0.5, min((1 + n) / (2 * n + 1), 1.0)
    bound = noise.gamma_total / (4 * noise.Gamma)
    # P(a) - bound = -A a^2 + B a - C
    A = 2 * (2 * n + 1)
    B = 4 * n + 3
    C = (1 + n) + bound
    disc = B * B - 4 * A * C
    if disc <= 0:
        return [(lo, hi)]
    sq = math.sqrt(disc)
    r1, r2 = (B - sq) / (2 * A), (B + sq) / (2 * A)
    out = []
    if r1 >= lo:
        out.append((lo, min(r1, hi)))
    if r2 <= hi:
        out.append((max(r2, lo), hi))
    return [iv for iv in out if iv[0] <= iv[1]]


@dataclass(frozen=True)
class SteadyStateReport:
    a_f: float | None
    h_inf: float | None
    feasible: bool
    a_f_band: tuple
    steady_field_amplitude: float | None
    degenerate: bool = False
    message: str = ""


def steady_state_feasibility(a_f: float | None, noise: NoiseParams,
                             sys: SystemParams | None = None) -> SteadyStateReport:
    """Steady-state check for one target (or only the admissible band when ``a_f`` is None)."""
    band = tuple(steady_band(noise))
    if noise.Gamma == 0:
        h_inf = 0.0 if noise.gamma > 0 else None
        return SteadyStateReport(a_f, h_inf, True, band, 0.0, degenerate=True,
                                 message="degenerate: steady coherence 0")
    if a_f is None:
        return SteadyStateReport(None, None, bool(band), band, None)
    ok = any(lo <= a_f <= hi for lo, hi in band)
    if not ok:
        return SteadyStateReport(a_f, None, False, band, None,
                                 message=f"a_f={a_f} outside the steady-state band")
    h_inf = steady_state_coherence(a_f, noise)
    amp = None
    if sys is not None and h_inf > 0:
        amp = abs(float(dissipation_drive(a_f, noise))) / (abs(sys.mu) * h_inf)
    return SteadyStateReport(a_f, h_inf, True, band, amp)
