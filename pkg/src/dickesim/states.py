"""Coherent states and energy-matched initial conditions.

Field coherent states |nu> = D(nu)|0> and atomic (spin) coherent states
|w> = (1+|w|^2)^(-J) exp(w J+)|J,-J>, together with the classical
parametrization

    w  = (p_a + i q_a) / sqrt(4J - (p_a^2 + q_a^2)),
    nu = (p_f + i q_f) / sqrt(2).

The quantum initial conditions used throughout live on the classical
energy shell: the atomic point is given and the field point is placed on
the Poincare section plane q_f = 0, p_f > 0 at the requested energy.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass

import numpy as np

from .hilbert import ModelParams
from .specfun import ln_factorial

log = logging.getLogger(__name__)


class CutoffError(RuntimeError):
    """Fock truncation leaks more probability than tolerated."""


class EnergyInfeasibleError(ValueError):
    """No positive field momentum reaches the requested energy."""


@dataclass(frozen=True)
class PhasePoint:
    """Canonical coordinates (q_a, p_a) atomic and (q_f, p_f) field."""

    q_a: float
    p_a: float
    q_f: float
    p_f: float

    def atomic_radius_sq(self) -> float:
        return self.q_a * self.q_a + self.p_a * self.p_a

    def as_array(self) -> np.ndarray:
        return np.array([self.q_a, self.p_a, self.q_f, self.p_f])


def spin_coherent_amplitudes(w: complex, J: float) -> np.ndarray:
    """Amplitudes of |w> over m = -J..J (unit norm in closed form).

    Amplitude on |J,m> is (1+|w|^2)^(-J) w^(m+J) sqrt(C(2J, m+J)).
    """
    two_j = int(round(2 * J))
    if abs(2 * J - two_j) > 1e-9 or two_j < 1:
        raise ValueError("J must be a positive half-integer")
    k = np.arange(two_j + 1)
    if w == 0:
        amps = np.zeros(two_j + 1, dtype=complex)
        amps[0] = 1.0
        return amps
    ln_binom = np.array(
        [ln_factorial(two_j) - ln_factorial(i) - ln_factorial(two_j - i) for i in k]
    )
    ln_mag = k * math.log(abs(w)) + 0.5 * ln_binom - J * math.log1p(abs(w) ** 2)
    phase = k * cmath.phase(w)
    return np.exp(ln_mag + 1j * phase)


def field_coherent_amplitudes(nu: complex, n_max: int) -> np.ndarray:
    """Amplitudes of |nu> over n = 0..n_max, computed in log space.

    Raises CutoffError when the truncated tail exceeds 1e-8; otherwise the
    (tiny) deficit is logged and the truncated vector is returned as is.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if nu == 0:
        amps = np.zeros(n_max + 1, dtype=complex)
        amps[0] = 1.0
        return amps
    n = np.arange(n_max + 1)
    ln_fact = np.array([ln_factorial(i) for i in n])
    ln_mag = -0.5 * abs(nu) ** 2 + n * math.log(abs(nu)) - 0.5 * ln_fact
    amps = np.exp(ln_mag + 1j * n * cmath.phase(nu))
    deficit = 1.0 - float(np.sum(np.abs(amps) ** 2))
    if deficit > 1e-8:
        raise CutoffError(
            f"coherent state |nu|^2={abs(nu)**2:.3f} loses {deficit:.3e} "
            f"probability at n_max={n_max}"
        )
    log.debug("field coherent truncation deficit %.3e at n_max=%d", deficit, n_max)
    return amps


def phase_point_to_parameters(pt: PhasePoint, J: float) -> tuple[complex, complex]:
    """Map a phase point to the coherent parameters (w, nu)."""
    r2 = pt.atomic_radius_sq()
    if r2 >= 4.0 * J:
        raise ValueError(
            f"atomic point outside the Bloch sphere: q_a^2+p_a^2={r2:.6f} >= 4J={4*J}"
        )
    w = (pt.p_a + 1j * pt.q_a) / math.sqrt(4.0 * J - r2)
    nu = (pt.p_f + 1j * pt.q_f) / math.sqrt(2.0)
    return w, nu


def energy_matched_field_point(
    atomic: tuple[float, float], E: float, params: ModelParams
) -> PhasePoint:
    """Place the field on the section plane q_f=0, p_f>0 at energy E.

    Solves H_cl(q_a, p_a, 0, p_f) = E for the positive root by bisection
    on p_f in (0, sqrt(4E/omega0)); the bracket is doubled if the energy
    is not yet reached at the nominal upper end.
    """
    from .classical import classical_hamiltonian

    q_a, p_a = atomic

    def shell(p_f: float) -> float:
        return classical_hamiltonian(PhasePoint(q_a, p_a, 0.0, p_f), params) - E

    f_lo = shell(0.0)
    if f_lo >= 0.0:
        raise EnergyInfeasibleError(
            f"H_cl at p_f=0 already {f_lo + E:.6f} >= E={E}; no positive root"
        )
    if E <= 0:
        raise EnergyInfeasibleError("bracket construction needs E > 0")
    hi = math.sqrt(4.0 * E / params.omega0)
    grow = 0
    while shell(hi) < 0.0:
        hi *= 2.0
        grow += 1
        if grow > 60:
            raise EnergyInfeasibleError(f"no root below p_f={hi:.3e}")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if shell(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15 * max(1.0, hi):
            break
    p_f = 0.5 * (lo + hi)
    return PhasePoint(q_a, p_a, 0.0, p_f)


def product_state(w: complex, nu: complex, params: ModelParams) -> np.ndarray:
    """Product of field and atomic coherent states in the flat basis ordering.

    The state is renormalized after Fock truncation; the renormalization
    factor is logged so truncation effects stay visible.
    """
    field = field_coherent_amplitudes(nu, params.n_max)
    spin = spin_coherent_amplitudes(w, params.J)
    psi = np.kron(field, spin)
    norm = float(np.linalg.norm(psi))
    if norm <= 0:
        raise ValueError("product state has zero norm")
    if abs(norm - 1.0) > 1e-15:
        log.debug("product state renormalized by factor %.17g", 1.0 / norm)
    return psi / norm
