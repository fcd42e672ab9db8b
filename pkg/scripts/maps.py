"""Accessibility maps over (time, a_f) for a dephasing ladder and a Gamma pair, plus the nbar map."""
import numpy as np

from _common import outdir, parser
from revpulse import ControlTarget, NoiseParams, feasibility_map, max_feasible_nbar
from revpulse.svg import render_grid


def dump(grid, path):
    rows = np.column_stack([np.repeat(grid.values, grid.t.size), np.tile(grid.t, grid.values.size),
                            grid.u.ravel(), np.repeat(grid.accessible, grid.t.size)])
    np.savetxt(path.with_suffix(".csv"), rows, delimiter=",", header=f"{grid.axis},t,u,accessible",
               comments="")
    path.with_suffix(".svg").write_text(render_grid(grid, title=path.stem))


def main():
    ap = parser(__doc__)
    ap.add_argument("--steps", type=int, default=101)
    args = ap.parse_args()
    out = outdir(args.out)
    base = ControlTarget(0.8, 0.3)

    cases = {f"gamma_{g:g}": NoiseParams(gamma=g) for g in (1e-4, 1e-3, 1e-2)}
    cases.update({f"Gamma_{G:g}": NoiseParams(Gamma=G) for G in (1e-4, 1e-3)})
    for name, noise in cases.items():
        grid = feasibility_map("a_f", (0.0, 1.0, args.steps), base, noise)
        dump(grid, out / f"map_{name}")
        print(f"{name:>12}: accessible a_f {grid.bands()}")

    target = base.replace(a_f=0.4)
    noise = NoiseParams(Gamma=1e-4)
    grid = feasibility_map("nbar", (0.0, 1.0, args.steps), target, noise, horizon=800.0)
    dump(grid, out / "map_nbar")
    for h in (800.0, 2400.0, 3000.0):
        print(f"nbar bound (T_h={h:g}) = {max_feasible_nbar(target, noise, horizon=h):.4f}")


if __name__ == "__main__":
    main()
