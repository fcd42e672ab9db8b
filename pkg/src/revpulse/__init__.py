"""Reverse-engineered control pulses for a two-level system under dephasing and thermal noise."""
from .errors import *  # noqa: F401,F403
from .integrate import LAB, RWA, Trajectory, TrackingReport, integrate, simulate, verify_tracking
from .model import (NoiseParams, SystemParams, TwoLevelState, field_from_envelope, lab_frame_rhs,
                    rwa_rhs)
from .profile import (CoherenceProfile, ControlTarget, SteadyStateReport, coherence_quadrature,
                      f_dot, f_profile, g_sigmoid, solve_coherence, source_term, steady_band,
                      steady_state_coherence, steady_state_feasibility)
from .pulse import SynthesizedPulse, field_from_trajectory, synthesize
from .sweep import (FeasibilityGrid, accessible_band, feasibility_map, max_feasible_nbar,
                    steady_band_numeric)

__version__ = "0.1.0"
