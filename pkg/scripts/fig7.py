"""Steady state with finite coherence under dephasing plus a warm bath (a_f=0.6)."""
import numpy as np

from _common import outdir, parser, save_trajectory
from revpulse import (ControlTarget, NoiseParams, SystemParams, simulate, steady_state_feasibility,
                      synthesize)


def main():
    ap = parser(__doc__)
    ap.add_argument("--af", type=float, default=0.6)
    ap.add_argument("--hold", type=float, default=10.0, help="hold time in units of 1/(2 Gamma_tot)")
    args = ap.parse_args()
    out = outdir(args.out)

    noise = NoiseParams(gamma=1e-3, Gamma=1e-4, nbar=0.3)
    sys_ = SystemParams()
    rep = steady_state_feasibility(args.af, noise, sys_)
    print(f"steady band {rep.a_f_band}, h_inf={rep.h_inf}, amplitude={rep.steady_field_amplitude}")

    target = ControlTarget(0.8, args.af)
    t1 = target.default_horizon + args.hold / (2 * noise.gamma_total)
    pulse = synthesize(target, noise, sys_, t1=t1)
    traj, _ = simulate(pulse)
    save_trajectory(out / "fig7_lab.csv", traj, pulse.profile)
    tail = traj.t >= traj.t[-1] - sys_.period
    print(f"tail |rho_ge| in [{traj.coherence[tail].min():.5f}, {traj.coherence[tail].max():.5f}], "
          f"tail max|E|={np.max(np.abs(traj.field[tail])):.4e}")


if __name__ == "__main__":
    main()
