"""How far the RWA-derived pulse holds in the lab frame as dephasing grows."""
from _common import parser
from revpulse import LAB, ControlTarget, NoiseParams, SystemParams, simulate, synthesize


def main():
    ap = parser(__doc__)
    ap.add_argument("--af", type=float, default=0.6)
    args = ap.parse_args()
    sys_ = SystemParams()
    for g in (1e-4, 1e-3, 1e-2, 5e-2, 1e-1, 5e-1):
        pulse = synthesize(ControlTarget(0.8, args.af), NoiseParams(gamma=g), sys_)
        _, rep = simulate(pulse, kind=LAB)
        ratio = sys_.mu * pulse.peak_amplitude / sys_.omega
        print(f"gamma={g:<7g} peak mu|E|/omega={ratio:.3f}  max|rho_gg-f|={rep.max_pop_dev:.4f}")


if __name__ == "__main__":
    main()
