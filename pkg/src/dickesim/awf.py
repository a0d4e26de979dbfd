"""Atomic (spin) Wigner function on the Bloch sphere.

The reduced atomic state is expanded over the orthonormal multipole
operators T_KQ,

    (T_KQ)_{M, M-Q} = (-1)^(J-M) sqrt(2K+1) * 3j(J K J; -M Q M-Q),

whose coefficients rho_KQ = Tr[rho_a T_KQ] define

    W(theta, phi) = sqrt((2J+1)/4pi) sum_KQ rho_KQ e^(i Q phi0) Y_KQ

on a Gauss-Legendre (cos theta) x uniform (phi) grid. The e^(i Q phi0)
factor rotates the display frame about z so the initial packet center sits
at phi = 0; it is fixed once per run from the t=0 packet. Negativity,
feature-size (sub-Planck) and mirror-asymmetry diagnostics operate on the
sampled grid with its quadrature weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .specfun import ThreeJArgs, assoc_legendre, wigner_3j


@dataclass(frozen=True)
class SphereGrid:
    """Quadrature grid: Gauss-Legendre in cos(theta), uniform periodic phi."""

    thetas: np.ndarray
    phis: np.ndarray
    theta_weights: np.ndarray

    @property
    def n_theta(self) -> int:
        return len(self.thetas)

    @property
    def n_phi(self) -> int:
        return len(self.phis)

    @property
    def weights(self) -> np.ndarray:
        """Solid-angle weight per node, shape (n_theta, n_phi); sums to 4pi."""
        dphi = 2.0 * math.pi / self.n_phi
        return np.outer(self.theta_weights, np.full(self.n_phi, dphi))


@dataclass(frozen=True)
class MultipoleCoeffs:
    """Characteristic function rho_KQ, K = 0..2J, Q = -K..K.

    Stored as a dense (2J+1) x (4J+1) array padded with zeros; column
    index is Q + 2J.
    """

    two_j: int
    c: np.ndarray

    def coeff(self, K: int, Q: int) -> complex:
        if not (0 <= K <= self.two_j) or abs(Q) > K:
            raise ValueError(f"(K={K}, Q={Q}) outside the multipole range")
        return complex(self.c[K, Q + self.two_j])


@dataclass(frozen=True)
class WignerGrid:
    thetas: np.ndarray
    phis: np.ndarray
    values: np.ndarray   # (n_theta, n_phi), real
    weights: np.ndarray  # same shape, solid-angle quadrature weights


@dataclass(frozen=True)
class NegativityMetrics:
    min_value: float
    depth_fraction: float        # |min W| / max W (0 when W is non-negative)
    negative_solid_angle: float  # quadrature weight of the W < 0 region


@dataclass(frozen=True)
class StructureMetrics:
    n_components: int
    smallest_solid_angle: float
    reference_solid_angle: float  # same measurement on the t=0 grid (nan if absent)


def make_grid(n_theta: int = 128, n_phi: int = 256) -> SphereGrid:
    """Build the quadrature grid; exact for the bandlimited K <= 2J expansion."""
    if n_theta < 2 or n_phi < 2:
        raise ValueError("grid needs at least 2 nodes per axis")
    x, wx = np.polynomial.legendre.leggauss(n_theta)
    thetas = np.arccos(x[::-1])           # ascending theta in (0, pi)
    weights = wx[::-1].copy()
    phis = -math.pi + 2.0 * math.pi * np.arange(n_phi) / n_phi
    return SphereGrid(thetas=thetas, phis=phis, theta_weights=weights)


@lru_cache(maxsize=4096)
def _multipole_cached(K: int, Q: int, two_j: int) -> np.ndarray:
    j = two_j / 2.0
    width = two_j + 1
    t = np.zeros((width, width))
    root = math.sqrt(2.0 * K + 1.0)
    for row in range(width):
        m_row = row - j  # this is M
        col = row - Q    # column holds M - Q
        if not 0 <= col < width:
            continue
        sym = wigner_3j(ThreeJArgs(j, K, j, -m_row, Q, m_row - Q))
        if sym != 0.0:
            sign = -1.0 if int(round(j - m_row)) % 2 else 1.0
            t[row, col] = sign * root * sym
    t.setflags(write=False)
    return t


def multipole_operator(K: int, Q: int, J: float) -> np.ndarray:
    """Multipole (irreducible tensor) operator T_KQ on the spin-J space."""
    two_j = int(round(2 * J))
    if abs(2 * J - two_j) > 1e-9 or two_j < 1:
        raise ValueError("J must be a positive half-integer")
    if K < 0 or K > two_j:
        raise ValueError(f"K={K} outside 0..2J={two_j}")
    if abs(Q) > K:
        raise ValueError(f"|Q|={abs(Q)} exceeds K={K}")
    return _multipole_cached(K, Q, two_j)


def multipole_coeffs(rho: np.ndarray) -> MultipoleCoeffs:
    """rho_KQ = Tr[rho_a T_KQ] for every K = 0..2J, Q = -K..K."""
    width = rho.shape[0]
    if rho.shape != (width, width):
        raise ValueError("density matrix must be square")
    two_j = width - 1
    c = np.zeros((two_j + 1, 2 * two_j + 1), dtype=complex)
    for K in range(two_j + 1):
        for Q in range(-K, K + 1):
            t = _multipole_cached(K, Q, two_j)
            c[K, Q + two_j] = np.sum(rho * t.T)  # Tr(rho T)
    return MultipoleCoeffs(two_j=two_j, c=c)


def wigner_on_grid(
    coeffs: MultipoleCoeffs, grid: SphereGrid, phi0: float = 0.0
) -> WignerGrid:
    """Evaluate W(theta, phi) on the grid, frame-rotated by phi0 about z.

    The multipole sum factorizes: for each Q the theta profile
    g_Q(theta) = sum_K rho_KQ e^(i Q phi0) Y_KQ(theta, 0) is accumulated,
    then the phi dependence enters as a small Fourier synthesis. Hermiticity
    of rho_a makes the result real; the imaginary residue is checked
    against 1e-10 before being discarded.
    """
    two_j = coeffs.two_j
    x = np.cos(grid.thetas)
    pref = math.sqrt((two_j + 1) / (4.0 * math.pi))

    g = np.zeros((2 * two_j + 1, grid.n_theta), dtype=complex)
    for q in range(-two_j, two_j + 1):
        aq = abs(q)
        profile = np.zeros(grid.n_theta, dtype=complex)
        any_term = False
        for K in range(aq, two_j + 1):
            c_kq = coeffs.c[K, q + two_j]
            if c_kq == 0:
                continue
            any_term = True
            norm = math.sqrt(
                (2 * K + 1)
                / (4.0 * math.pi)
                * math.exp(
                    math.lgamma(K - aq + 1) - math.lgamma(K + aq + 1)
                )
            )
            y_theta = ((-1) ** aq) * norm * assoc_legendre(K, aq, x)
            if q < 0:
                y_theta = ((-1) ** aq) * y_theta  # Y_{K,-|q|}(theta,0) is real
            profile += c_kq * y_theta
        if any_term:
            g[q + two_j] = profile * np.exp(1j * q * phi0)

    q_vals = np.arange(-two_j, two_j + 1)
    fourier = np.exp(1j * np.outer(q_vals, grid.phis))
    w = pref * (g.T @ fourier)

    resid = float(np.max(np.abs(w.imag)))
    if resid > 1e-10:
        raise RuntimeError(f"Wigner grid imaginary residue {resid:.3e} too large")
    return WignerGrid(
        thetas=grid.thetas, phis=grid.phis, values=w.real, weights=grid.weights
    )


def negativity_metrics(grid: WignerGrid) -> NegativityMetrics:
    w = grid.values
    w_min = float(np.min(w))
    w_max = float(np.max(w))
    depth = abs(w_min) / w_max if (w_min < 0 and w_max > 0) else 0.0
    neg = float(np.sum(grid.weights[w < 0]))
    return NegativityMetrics(
        min_value=w_min, depth_fraction=depth, negative_solid_angle=neg
    )


def _component_areas(grid: WignerGrid, alpha: float) -> list[float]:
    """Quadrature areas of the connected components of |W| > alpha max|W|.

    4-neighbor adjacency; the phi axis wraps around, theta does not.
    """
    mask = np.abs(grid.values) > alpha * np.max(np.abs(grid.values))
    n_t, n_p = mask.shape
    seen = np.zeros_like(mask, dtype=bool)
    areas: list[float] = []
    for i0 in range(n_t):
        for j0 in range(n_p):
            if not mask[i0, j0] or seen[i0, j0]:
                continue
            area = 0.0
            stack = [(i0, j0)]
            seen[i0, j0] = True
            while stack:
                i, j = stack.pop()
                area += grid.weights[i, j]
                for ii, jj in (
                    (i - 1, j),
                    (i + 1, j),
                    (i, (j - 1) % n_p),
                    (i, (j + 1) % n_p),
                ):
                    if 0 <= ii < n_t and mask[ii, jj] and not seen[ii, jj]:
                        seen[ii, jj] = True
                        stack.append((ii, jj))
            areas.append(area)
    return areas


def structure_metrics(
    grid: WignerGrid, alpha: float = 0.5, reference: WignerGrid | None = None
) -> StructureMetrics:
    """Connected-component census of the |W| > alpha max|W| region.

    The reference solid angle is the same measurement applied to the t=0
    grid of the run (the initial coherent packet); ratios of smallest
    component to reference quantify sub-Planck structure.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    areas = _component_areas(grid, alpha)
    ref_area = math.nan
    if reference is not None:
        ref_areas = _component_areas(reference, alpha)
        ref_area = min(ref_areas) if ref_areas else math.nan
    return StructureMetrics(
        n_components=len(areas),
        smallest_solid_angle=min(areas) if areas else 0.0,
        reference_solid_angle=ref_area,
    )


def mirror_asymmetry(grid: WignerGrid) -> float:
    """max |W(theta, phi) - W(theta, -phi)| / max|W|.

    Requires a phi grid closed under negation modulo 2pi (the uniform grid
    starting at -pi is); otherwise raises.
    """
    n_p = len(grid.phis)
    mapped = (-grid.phis + math.pi) % (2.0 * math.pi) - math.pi
    idx = np.rint((mapped - grid.phis[0]) * n_p / (2.0 * math.pi)).astype(int) % n_p
    if np.max(np.abs(grid.phis[idx] - mapped)) > 1e-9:
        raise ValueError("phi grid is not symmetric about 0")
    reflected = grid.values[:, idx]
    scale = float(np.max(np.abs(grid.values)))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(grid.values - reflected)) / scale)
