"""Fixed-step RK4 propagation of the two-level equations and tracking checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatch, PositivityViolation, StepTooLarge
from .model import (NoiseParams, SystemParams, TwoLevelState, field_from_envelope, lab_frame_rhs,
                    rwa_rhs, to_lab)
from .profile import CoherenceProfile, time_grid

LAB = "lab-frame"
RWA = "rwa"
POS_ABORT = 1e-7


@dataclass(frozen=True, eq=False)
class Trajectory:
    t: np.ndarray
    rho_gg: np.ndarray
    rho_ge: np.ndarray
    field: np.ndarray
    dt: float
    kind: str
    sys: SystemParams
    noise: NoiseParams
    t0: float
    meta: dict = field(default_factory=dict)

    @property
    def rho_ee(self) -> np.ndarray:
        return 1.0 - self.rho_gg

    @property
    def coherence(self) -> np.ndarray:
        return np.abs(self.rho_ge)

    def positivity_margin(self) -> np.ndarray:
        return self.rho_gg * (1.0 - self.rho_gg) - np.abs(self.rho_ge) ** 2

    def purity(self) -> np.ndarray:
        return self.rho_gg**2 + (1.0 - self.rho_gg) ** 2 + 2.0 * np.abs(self.rho_ge) ** 2

    def final_state(self) -> TwoLevelState:
        return TwoLevelState(float(self.rho_gg[-1]), complex(self.rho_ge[-1]), check=False)


def _rk4_step(rhs, t, y, h, d0, dmid, d1):
    gg, ge = y
    a1, b1 = rhs(gg, ge, d0, t)
    a2, b2 = rhs(gg + 0.5 * h * a1, ge + 0.5 * h * b1, dmid, t + 0.5 * h)
    a3, b3 = rhs(gg + 0.5 * h * a2, ge + 0.5 * h * b2, dmid, t + 0.5 * h)
    a4, b4 = rhs(gg + h * a3, ge + h * b3, d1, t + h)
    return (gg + h / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4),
            ge + h / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4))


def integrate(initial: TwoLevelState, kind: str, drive, sys: SystemParams, noise: NoiseParams,
              t0: float, t1: float, dt: float, *, frame_t0: float | None = None,
              self_check_steps: int = 100, self_check_tol: float = 1e-8,
              pos_abort: float = POS_ABORT) -> Trajectory:
    """Propagate ``initial`` from ``t0`` to ``t1`` with classical RK4 at fixed step ``dt``.

    ``drive(t)`` returns the real field E (``kind='lab-frame'``) or the complex envelope eps
    (``kind='rwa'``) and is sampled at the RK substage times.  ``frame_t0`` is the reference
    time of the interaction picture (defaults to ``t0``).
    """
    if not dt > 0 or not t1 > t0:
        raise ValueError("need dt > 0 and t1 > t0")
    if kind not in (LAB, RWA):
        raise ValueError(f"unknown rhs kind {kind!r}")
    if kind == LAB and dt > sys.period / 50.0:
        raise StepTooLarge(f"dt={dt} does not resolve the carrier (limit {sys.period / 50.0:.4g})")
    ft0 = t0 if frame_t0 is None else frame_t0

    if kind == LAB:
        def rhs(gg, ge, d, t):
            return lab_frame_rhs(gg, ge, d, sys, noise)
    else:
        def rhs(gg, ge, d, t):
            return rwa_rhs(gg, ge, d, t, ft0, sys, noise)

    grid = time_grid(t0, t1, dt)
    n = grid.size
    gg = np.empty(n)
    ge = np.empty(n, dtype=complex)
    drv = np.empty(n, dtype=complex)
    y = (float(initial.rho_gg), complex(initial.rho_ge))
    gg[0], ge[0] = y
    d_prev = drive(grid[0])
    drv[0] = d_prev
    for k in range(n - 1):
        t = grid[k]
        h = grid[k + 1] - t
        d_mid = drive(t + 0.5 * h)
        d_next = drive(grid[k + 1])
        y_new = _rk4_step(rhs, t, y, h, d_prev, d_mid, d_next)
        if k < self_check_steps:
            q = 0.25 * h
            half = _rk4_step(rhs, t, y, 0.5 * h, d_prev, drive(t + q), d_mid)
            half = _rk4_step(rhs, t + 0.5 * h, half, 0.5 * h, d_mid, drive(t + 3 * q), d_next)
            # error per unit step, so the check does not depend on where the window starts
            err = max(abs(half[0] - y_new[0]), abs(half[1] - y_new[1])) / h
            if err > self_check_tol:
                raise StepTooLarge(f"step-doubling error {err:.3e}/a.u. > {self_check_tol:g} at t={t:.6g}")
        y = y_new
        margin = y[0] * (1.0 - y[0]) - abs(y[1]) ** 2
        if margin < -pos_abort:
            raise PositivityViolation(
                f"det(rho) = {margin:.3e} at t={grid[k + 1]:.6g} "
                f"(rho_gg={y[0]:.9g}, |rho_ge|={abs(y[1]):.9g}, drive={d_next:.4g})")
        gg[k + 1], ge[k + 1] = y
        drv[k + 1] = d_next
        d_prev = d_next

    if kind == LAB:
        E = drv.real.copy()
    else:
        E = np.array([field_from_envelope(e, t, sys) for e, t in zip(drv, grid)])
    return Trajectory(grid, gg, ge, E, dt, kind, sys, noise, ft0,
                      meta={"t_start": float(t0), "t_end": float(t1)})


@dataclass(frozen=True)
class TrackingReport:
    max_pop_dev: float
    max_coh_dev: float
    t_max_dev: float
    window_end: float
    post_loss_pop_drift: float | None
    trace_drift: float
    max_positivity_violation: float
    purity_drift: float

    def lines(self) -> list[str]:
        out = [
            f"max_pop_dev={self.max_pop_dev:.6e}",
            f"max_coh_dev={self.max_coh_dev:.6e}",
            f"t_max_dev={self.t_max_dev:.6g}",
            f"window_end={self.window_end:.6g}",
            f"trace_drift={self.trace_drift:.1e}",
            f"max_positivity_violation={self.max_positivity_violation:.3e}",
            f"purity_drift={self.purity_drift:.3e}",
        ]
        if self.post_loss_pop_drift is not None:
            out.append(f"post_loss_pop_drift={self.post_loss_pop_drift:.6e}")
        return out


def reference_on(traj_t: np.ndarray, profile: CoherenceProfile):
    """Profile ``(f, h)`` at the trajectory times; every time must be a profile node."""
    pt = profile.t
    idx = np.searchsorted(pt, traj_t)
    idx = np.clip(idx, 0, pt.size - 1)
    lower = np.clip(idx - 1, 0, pt.size - 1)
    pick = np.where(np.abs(pt[lower] - traj_t) < np.abs(pt[idx] - traj_t), lower, idx)
    scale = max(1.0, float(np.max(np.abs(pt))))
    if np.any(np.abs(pt[pick] - traj_t) > 1e-9 * scale):
        raise GridMismatch("trajectory times are not nodes of the coherence profile grid")
    f = profile.f_at(pt[pick])
    h = profile.h[pick]
    return f, h


def verify_tracking(traj: Trajectory, profile: CoherenceProfile,
                    divergence_time: float | None = None) -> TrackingReport:
    """Compare realised ``(rho_gg, |rho_ge|)`` with the prescribed ``(f, h)``.

    Deviations are taken only up to ``divergence_time``; later samples go into
    ``post_loss_pop_drift``.
    """
    inside = traj.t <= profile.t[-1] + 1e-9
    t_in = traj.t[inside]
    f, h = reference_on(t_in, profile)
    end = traj.t[-1] if divergence_time is None else min(divergence_time, traj.t[-1])
    win = t_in <= end
    if divergence_time is not None:
        h_mask = win
    else:
        h_mask = win & profile.feasible[np.searchsorted(profile.t, t_in).clip(0, profile.t.size - 1)]
    pop = np.abs(traj.rho_gg[inside] - f)
    coh = np.abs(traj.coherence[inside] - h)
    pw = np.where(win, pop, -1.0)
    k = int(np.argmax(pw))
    post = None
    if divergence_time is not None:
        after = traj.t > divergence_time
        if after.any():
            f_after = profile.f_at(traj.t[after])
            post = float(np.max(np.abs(traj.rho_gg[after] - f_after)))
    pur = traj.purity()
    return TrackingReport(
        max_pop_dev=float(pop[win].max()),
        max_coh_dev=float(coh[h_mask].max()) if h_mask.any() else 0.0,
        t_max_dev=float(t_in[k]),
        window_end=float(end),
        post_loss_pop_drift=post,
        trace_drift=0.0,
        max_positivity_violation=float(max(0.0, -traj.positivity_margin().min())),
        purity_drift=float(np.max(np.abs(pur - pur[0]))),
    )


def simulate(pulse, *, kind: str = LAB, t1: float | None = None, dt: float | None = None,
             pos_abort: float = POS_ABORT, self_check_tol: float = 1e-8):
    """Drive the system with a synthesized pulse and report how well it tracks ``(f, h)``.

    The run starts at ``pulse.t_start`` from the state the construction prescribes there.
    If the protocol breaks down the field is switched off one step before the coherence
    reaches zero and the run continues, so the loss of the target population is visible.
    Returns ``(trajectory, report)``.
    """
    from .pulse import default_dt

    sys, noise, target = pulse.sys, pulse.noise, pulse.target
    prof = pulse.profile
    if t1 is None:
        t1 = float(prof.t[-1])
    if dt is None:
        dt = default_dt(sys, noise)
    t_cut = pulse.t_valid_end
    if pulse.divergence_time is not None:
        t_cut = pulse.divergence_time - dt
    # grid arithmetic may land an ulp past the window end
    t_cut += 1e-9 * max(1.0, abs(t_cut))
    start = pulse.initial_state()

    if kind == LAB:
        def drive(t):
            return pulse.field_at(t) if t <= t_cut else 0.0
        init = TwoLevelState(start.rho_gg, to_lab(start.rho_ge, pulse.t_start, target.t0, sys))
    else:
        def drive(t):
            return pulse.envelope_at(t) if t <= t_cut else 0j
        init = start
    traj = integrate(init, kind, drive, sys, noise, pulse.t_start, t1, dt, frame_t0=target.t0,
                     pos_abort=pos_abort, self_check_tol=self_check_tol)
    report = verify_tracking(traj, prof, pulse.divergence_time)
    return traj, report
