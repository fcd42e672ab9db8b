"""Two-level system parameters and equations of motion.

Basis ordering is (g, e) with the ground state lower in energy, so the
Pauli operator in ``H = -(omega/2) sigma_z - mu E sigma_x`` is taken as
``sigma_z = |g><g| - |e><e|``.  With ``sigma_+ = |e><g|`` the interaction
picture removes a phase ``exp(i omega (t - t0))`` from the lab coherence::

    rho_ge(interaction) = rho_ge(lab) * exp(-i omega (t - t0))

Only ``rho_gg`` and ``rho_ge`` are stored.  ``rho_ee = 1 - rho_gg`` and
``rho_eg = conj(rho_ge)``, so trace and hermiticity cannot drift.

Both dissipators are the same in the lab and interaction pictures.  The
frame change is a rotation generated by sigma_z: the dephasing term
``sigma_z rho sigma_z - rho`` commutes with it, and in every product of the
thermal term the phases picked up by sigma_+ and sigma_- cancel.  The lab
frame equations therefore reuse the interaction-picture decay rates.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

TOL_POS = 1e-9


@dataclass(frozen=True)
class SystemParams:
    """Transition frequency, dipole projection and carrier frequency (atomic units)."""

    omega: float = 2e-2
    mu: float = 6.0
    omega_p: float | None = None

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.mu == 0 or not math.isfinite(self.mu):
            raise ValueError(f"mu must be finite and non-zero, got {self.mu}")
        if self.omega_p is None:
            object.__setattr__(self, "omega_p", self.omega)

    @property
    def delta(self) -> float:
        return self.omega_p - self.omega

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega


@dataclass(frozen=True)
class NoiseParams:
    """Dephasing rate ``gamma``, thermal rate ``Gamma`` and thermal occupation ``nbar``."""

    gamma: float = 0.0
    Gamma: float = 0.0
    nbar: float = 0.0

    def __post_init__(self):
        for name in ("gamma", "Gamma", "nbar"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be finite and >= 0, got {v}")

    @property
    def gamma_total(self) -> float:
        """Decay rate of the coherence: gamma + (2 nbar + 1) Gamma."""
        return self.gamma + (2 * self.nbar + 1) * self.Gamma

    @property
    def thermal_ground(self) -> float:
        """Ground population at the fixed point of the thermal dissipator."""
        return (self.nbar + 1) / (2 * self.nbar + 1)

    def with_(self, **kw) -> "NoiseParams":
        d = dict(gamma=self.gamma, Gamma=self.Gamma, nbar=self.nbar)
        d.update(kw)
        return NoiseParams(**d)


@dataclass(frozen=True)
class TwoLevelState:
    rho_gg: float
    rho_ge: complex = 0j
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "rho_ge", complex(self.rho_ge))
        if self.check:
            if not (-TOL_POS <= self.rho_gg <= 1 + TOL_POS):
                raise ValueError(f"rho_gg out of [0, 1]: {self.rho_gg}")
            if self.positivity_margin() < -TOL_POS:
                raise ValueError(f"state is not positive: margin {self.positivity_margin()}")

    @property
    def rho_ee(self) -> float:
        return 1.0 - self.rho_gg

    @property
    def rho_eg(self) -> complex:
        return self.rho_ge.conjugate()

    def positivity_margin(self) -> float:
        """Determinant of the density matrix; negative means unphysical."""
        return self.rho_gg * (1.0 - self.rho_gg) - abs(self.rho_ge) ** 2

    def purity(self) -> float:
        return self.rho_gg**2 + self.rho_ee**2 + 2 * abs(self.rho_ge) ** 2

    def matrix(self):
        import numpy as np

        return np.array([[self.rho_gg, self.rho_ge], [self.rho_eg, self.rho_ee]], dtype=complex)

    @classmethod
    def diagonal(cls, rho_gg: float) -> "TwoLevelState":
        return cls(rho_gg, 0j)


def _thermal_population_rate(rho_gg: float, noise: NoiseParams) -> float:
    return 2 * noise.Gamma * ((noise.nbar + 1) * (1.0 - rho_gg) - noise.nbar * rho_gg)


def lab_frame_rhs(rho_gg: float, rho_ge: complex, E: float, sys: SystemParams, noise: NoiseParams):
    """Time derivative of ``(rho_gg, rho_ge)`` under the full Hamiltonian, no RWA.

    Returns a tuple ``(d rho_gg/dt, d rho_ge/dt)``; ``d rho_ee/dt`` is minus the
    first entry by construction.
    """
    drive = sys.mu * E
    dgg = 2 * drive * rho_ge.imag + _thermal_population_rate(rho_gg, noise)
    dge = (1j * sys.omega - noise.gamma_total) * rho_ge - 1j * drive * (2 * rho_gg - 1)
    return dgg, dge


def rwa_rhs(rho_gg: float, rho_ge: complex, envelope: complex, t: float, t0: float,
            sys: SystemParams, noise: NoiseParams):
    """Interaction-picture derivative under the rotating-wave approximation.

    ``envelope`` is the complex amplitude eps(t) of ``E = eps e^{-i w_p t} + c.c.``.
    Written for rho_ge; the coherence equation is the conjugate of the
    rho_eg form ``-G rho_eg + i mu (2 rho_gg - 1) eps e^{-i(Dt + w t0)}``.
    """
    drive = envelope * cmath.exp(-1j * (sys.delta * t + sys.omega * t0))
    dgg = 2 * sys.mu * (rho_ge * drive).imag + _thermal_population_rate(rho_gg, noise)
    dge = -noise.gamma_total * rho_ge - 1j * sys.mu * (2 * rho_gg - 1) * drive.conjugate()
    return dgg, dge


def field_from_envelope(envelope: complex, t: float, sys: SystemParams) -> float:
    """Real lab field ``eps e^{-i w_p t} + c.c.``."""
    return 2.0 * (envelope * cmath.exp(-1j * sys.omega_p * t)).real


def to_interaction(rho_ge_lab: complex, t: float, t0: float, sys: SystemParams) -> complex:
    return rho_ge_lab * cmath.exp(-1j * sys.omega * (t - t0))


def to_lab(rho_ge_int: complex, t: float, t0: float, sys: SystemParams) -> complex:
    return rho_ge_int * cmath.exp(1j * sys.omega * (t - t0))
