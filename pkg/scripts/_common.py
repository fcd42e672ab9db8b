"""Small helpers shared by the experiment scripts."""
import argparse
from pathlib import Path

import numpy as np


def parser(desc, out="results"):
    ap = argparse.ArgumentParser(description=desc)
    ap.add_argument("--out", default=out, help="output directory")
    return ap


def outdir(path):
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


def save_trajectory(path, traj, profile):
    f = profile.f_at(traj.t)
    h = np.sqrt(np.clip(profile.u_at(traj.t), 0, None))
    cols = np.column_stack([traj.t, traj.field, traj.rho_gg, traj.coherence, f, h])
    np.savetxt(path, cols, delimiter=",", header="t,E,rho_gg,abs_rho_ge,f,h", comments="")
