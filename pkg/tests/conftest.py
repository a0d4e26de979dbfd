import numpy as np
import pytest

from dickesim.evolve import diagonalize, entropy_series
from dickesim.hilbert import ModelParams, build_basis, build_hamiltonian
from dickesim.states import (
    energy_matched_field_point,
    phase_point_to_parameters,
    product_state,
)

E_TOTAL = 21.0

# (label, Gp, normalized section coordinates)  -- Poincare-section seeds used
# throughout: two on integrable tori/separatrix, two in the mixed chaotic case
CONDITIONS = {
    "I1": (0.0, (0.0, 0.55)),
    "I2": (0.0, (0.1, 0.95)),
    "N1": (0.2, (0.0, 0.54)),
    "N2": (0.2, (0.0, -0.28)),
}


def paper_model(gp: float, n_max: int = 120) -> ModelParams:
    return ModelParams(omega0=1.0, omega_a=1.0, G=0.5, Gp=gp, J=10.5, n_max=n_max)


@pytest.fixture(scope="session")
def decomps():
    """Spectral decompositions for both coupling cases, built once."""
    out = {}
    for gp in (0.0, 0.2):
        pars = paper_model(gp)
        out[gp] = (pars, build_basis(pars), diagonalize(build_hamiltonian(pars)))
    return out


@pytest.fixture(scope="session")
def initial_states(decomps):
    """psi0, coherent parameters and phase point for the four conditions."""
    out = {}
    for label, (gp, (qa_n, pa_n)) in CONDITIONS.items():
        pars, basis, dec = decomps[gp]
        scale = np.sqrt(4.0 * pars.J)
        pt = energy_matched_field_point((qa_n * scale, pa_n * scale), E_TOTAL, pars)
        w, nu = phase_point_to_parameters(pt, pars.J)
        out[label] = {
            "params": pars,
            "basis": basis,
            "decomp": dec,
            "point": pt,
            "w": w,
            "nu": nu,
            "psi0": product_state(w, nu, pars),
        }
    return out


@pytest.fixture(scope="session")
def ale_times():
    return np.round(np.arange(0, 2001) * 0.05, 10)


@pytest.fixture(scope="session")
def ale_series(initial_states, ale_times):
    """Entropy series for all four conditions on the shared time grid."""
    out = {}
    for label, st in initial_states.items():
        out[label] = entropy_series(
            st["params"], st["psi0"], ale_times, dec=st["decomp"]
        )
    return out
