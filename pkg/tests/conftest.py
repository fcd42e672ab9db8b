import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("ci", max_examples=60, deadline=None)
settings.register_profile("fast", max_examples=10, deadline=None)
settings.load_profile("ci")

np.seterr(all="raise", under="ignore")


@pytest.fixture
def mepenna():
    from revpulse import SystemParams

    return SystemParams(omega=2e-2, mu=6.0)


# operator-level oracle shared by several modules: basis (g, e), ground lower in energy
G = np.array([1.0, 0.0])
E = np.array([0.0, 1.0])
SZ = np.outer(G, G) - np.outer(E, E)
SX = np.outer(G, E) + np.outer(E, G)
SP = np.outer(E, G)  # sigma_+ = |e><g|
SM = SP.T.copy()


def dissipators(rho, noise):
    deph = SZ @ rho @ SZ - rho
    anti = lambda a, r: a @ r + r @ a  # noqa: E731
    therm = noise.nbar * (2 * SP @ rho @ SM - anti(SM @ SP, rho)) + \
        (noise.nbar + 1) * (2 * SM @ rho @ SP - anti(SP @ SM, rho))
    return noise.gamma / 2 * deph + noise.Gamma * therm


def matrix_rhs(rho, H, noise):
    return -1j * (H @ rho - rho @ H) + dissipators(rho, noise)


def density(rho_gg, rho_ge):
    return np.array([[rho_gg, rho_ge], [np.conj(rho_ge), 1 - rho_gg]], dtype=complex)
