"""Thermal dissipation at zero temperature: the field diverges once the coherence runs out."""
from _common import outdir, parser, save_trajectory
from revpulse import LAB, RWA, ControlTarget, NoiseParams, SystemParams, simulate, synthesize


def main():
    ap = parser(__doc__)
    ap.add_argument("--Gamma", type=float, default=1e-4)
    ap.add_argument("--t1", type=float, default=2400.0)
    args = ap.parse_args()
    out = outdir(args.out)

    pulse = synthesize(ControlTarget(0.8, 0.3), NoiseParams(Gamma=args.Gamma), SystemParams(), t1=args.t1)
    print(f"onset at t={pulse.t_start:.2f}, peak |E|={pulse.peak_amplitude:.4e}")
    if pulse.divergence_time is None:
        print("no divergence inside the window; extend --t1")
    else:
        print(f"h reaches zero at t={pulse.divergence_time:.2f}")
    for kind in (LAB, RWA):
        traj, rep = simulate(pulse, kind=kind)
        save_trajectory(out / f"fig5_{kind}.csv", traj, pulse.profile)
        print(f"[{kind}] " + "  ".join(rep.lines()))


if __name__ == "__main__":
    main()
