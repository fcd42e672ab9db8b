"""Closed-form control field that makes the populations follow ``f(t)``.

At resonance the field is

    E(t) = [f'(t) - 2 Gamma D(f)] sin(theta) / (mu h(t)),   theta = omega (t - t0) + phi0

which keeps ``rho_gg = f`` and ``rho_ge = h e^{i phi0}`` (interaction picture)
exactly under the rotating-wave approximation.  The field is a pure function of
the solved coherence profile; nothing is optimised.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergentField, OutsideValidity, PopulationNodeSingularity, SingularSample
from .model import NoiseParams, SystemParams, TwoLevelState
from .profile import (CoherenceProfile, ControlTarget, dissipation_drive, f_dot, f_profile,
                      solve_coherence, time_grid)

log = logging.getLogger(__name__)

H_FLOOR = 1e-9
P_FLOOR = 1e-9


@dataclass(frozen=True, eq=False)
class SynthesizedPulse:
    target: ControlTarget
    noise: NoiseParams
    sys: SystemParams
    profile: CoherenceProfile
    t_start: float
    t_valid_end: float
    divergence_time: float | None = None
    a_max: float | None = None
    h_floor: float = H_FLOOR
    eps_num: float = 1.0
    peak_amplitude: float = field(default=0.0)

    @property
    def approximate(self) -> bool:
        """Clipping breaks exactness, so any finite cap marks the pulse approximate."""
        return self.a_max is not None

    def in_window(self, t: float) -> bool:
        return self.t_start - 1e-9 <= t <= self.t_valid_end + 1e-9

    def initial_state(self) -> TwoLevelState:
        """Interaction-picture state the construction assumes at ``t_start``."""
        t = self.t_start
        h = math.sqrt(max(float(self.profile.u_at(t)), 0.0))
        return TwoLevelState(float(f_profile(t, self.target)), h * cmath.exp(1j * self.target.phi0))

    def _parts(self, t: float):
        f = float(f_profile(t, self.target))
        fd = float(f_dot(t, self.target))
        num = fd - float(dissipation_drive(f, self.noise))
        h = math.sqrt(max(float(self.profile.u_at(t)), 0.0))
        return f, fd, num, h

    def amplitude(self, t: float) -> float:
        """Slowly varying prefactor ``[f' - 2 Gamma D] / (mu h)`` (unclipped)."""
        if not self.in_window(t):
            raise OutsideValidity(f"t={t} outside [{self.t_start}, {self.t_valid_end}]")
        _, _, num, h = self._parts(t)
        if num == 0.0:
            return 0.0
        if h < self.h_floor:
            if abs(num) > self.h_floor * self.eps_num:
                raise DivergentField(f"h({t}) = {h:.3e} below floor with numerator {num:.3e}")
            return 0.0
        return num / (self.sys.mu * h)

    def clipped(self, t: float) -> bool:
        return self.a_max is not None and abs(self.amplitude(t)) > self.a_max

    def field_at(self, t: float) -> float:
        amp = self.amplitude(t)
        if self.a_max is not None and abs(amp) > self.a_max:
            log.debug("clip at t=%g: |amplitude| %.3e > %.3e", t, abs(amp), self.a_max)
            amp = math.copysign(self.a_max, amp)
        if amp == 0.0:
            return 0.0
        theta = self.sys.omega * (t - self.target.t0) + self.target.phi0
        return amp * math.sin(theta)

    def envelope_at(self, t: float, form: str = "auto") -> complex:
        """Complex envelope ``eps(t)`` of ``E = eps e^{-i w t} + c.c.``.

        ``form='direct'`` uses ``(h' + G h) e^{-i phi0} / (i mu (2f - 1))`` and fails on the
        population node f = 1/2; ``'auto'`` switches to the equivalent nonsingular form there.
        """
        if not self.in_window(t):
            raise OutsideValidity(f"t={t} outside [{self.t_start}, {self.t_valid_end}]")
        f, fd, num, h = self._parts(t)
        phase = cmath.exp(1j * (self.sys.delta * t + self.sys.omega * self.target.t0 - self.target.phi0))
        p = 2.0 * f - 1.0
        if abs(p) > P_FLOOR and h >= self.h_floor:
            hdot = float(self.profile.udot_at(t)) / (2.0 * h)
            eps_rot = (hdot + self.noise.gamma_total * h) / (1j * self.sys.mu * p)
        elif form == "direct":
            raise PopulationNodeSingularity(f"|2f-1| = {abs(p):.3e} at t={t}")
        else:
            # limit form: (h' + G h) / (2f-1) = (2 Gamma D - f') / (2h)
            eps_rot = -self.amplitude(t) / 2j
        if self.a_max is not None and abs(2 * eps_rot) > self.a_max:
            eps_rot *= self.a_max / abs(2 * eps_rot)
        return eps_rot * phase

    def field_samples(self, times) -> np.ndarray:
        return np.array([self.field_at(float(t)) for t in times])


def synthesize(target: ControlTarget, noise: NoiseParams, sys: SystemParams, *, t1: float | None = None,
               dt: float | None = None, refine: int = 4, u_seed: float = 0.0,
               h_floor: float = H_FLOOR, a_max: float | None = None,
               onset_ratio: float = 0.1) -> SynthesizedPulse:
    """Solve the coherence profile and wrap it as an evaluable pulse.

    The profile grid is the integration grid ``t0, t0+dt, ...`` refined ``refine`` times so
    trajectories sampled at step ``dt`` land on profile nodes.  With a diagonal start the
    field is formally infinite at ``t0`` (h grows like sqrt(t - t0)).  The pulse then starts
    at the first step ``t0 + k dt`` where ``u`` changes by at most ``onset_ratio`` per step,
    which keeps the fixed-step integration of the 1/h field accurate.
    """
    if t1 is None:
        t1 = -target.t0
    if dt is None:
        dt = default_dt(sys, noise)
    coarse = time_grid(target.t0, t1, dt)
    fine = np.concatenate([
        np.linspace(a, b, refine, endpoint=False) for a, b in zip(coarse[:-1], coarse[1:])
    ] + [coarse[-1:]])
    prof = solve_coherence(target, noise, fine, u_seed=u_seed)
    t_start = float(target.t0)
    if u_seed == 0.0 and np.any(prof.u[1:] > 0):
        nodes = prof.u[::refine]
        rates = np.abs(prof.udot[::refine]) * dt
        ok = np.flatnonzero((nodes > 0) & (rates <= onset_ratio * nodes))
        ok = ok[ok >= 1]
        t_start = float(coarse[ok[0]]) if ok.size else float(coarse[1])
    t_end = float(t1)
    div = prof.first_violation_time
    if div is not None:
        t_end = min(t_end, div)
    pulse = SynthesizedPulse(target, noise, sys, prof, t_start, t_end, div, a_max, h_floor)
    peak = 0.0
    for t in fine[(fine >= t_start) & (fine < t_end)]:
        try:
            peak = max(peak, abs(pulse.amplitude(float(t))))
        except DivergentField:
            break
    object.__setattr__(pulse, "peak_amplitude", peak)
    return pulse


def default_dt(sys: SystemParams, noise: NoiseParams) -> float:
    """Resolve both the carrier (64 points per period) and the fastest decay."""
    dt = sys.period / 64.0
    if noise.gamma_total > 0:
        dt = min(dt, 1.0 / (50.0 * noise.gamma_total))
    return dt


def field_from_trajectory(t, rho_gg, rho_ge, rho_ge_dot, t0: float, sys: SystemParams,
                          noise: NoiseParams, *, p_floor: float = P_FLOOR, strict: bool = False):
    """Field that realises an arbitrary interaction-picture trajectory under the RWA.

    ``E = 2 Im[(rho_eg' + G rho_eg) e^{-i w (t - t0)}] / (mu (2 rho_gg - 1))``, written with
    ``rho_eg = conj(rho_ge)``.  Returns ``(E, singular)``; singular samples (rho_gg = 1/2)
    carry NaN, or raise SingularSample when ``strict``.
    """
    t = np.asarray(t, dtype=float)
    rho_gg = np.asarray(rho_gg, dtype=float)
    rho_eg = np.conj(np.asarray(rho_ge, dtype=complex))
    rho_eg_dot = np.conj(np.asarray(rho_ge_dot, dtype=complex))
    denom = sys.mu * (2.0 * rho_gg - 1.0)
    singular = np.abs(2.0 * rho_gg - 1.0) <= p_floor
    rot = np.exp(-1j * sys.omega * (t - t0))
    num = 2.0 * np.imag((rho_eg_dot + noise.gamma_total * rho_eg) * rot)
    with np.errstate(divide="ignore", invalid="ignore"):
        E = np.where(singular, np.nan, num / np.where(singular, 1.0, denom))
    if strict and singular.any():
        raise SingularSample(f"rho_gg = 1/2 at t = {t[singular][0]}")
    return E, singular
