"""Product basis |n> x |J,m> and the generalized Dicke Hamiltonian.

H = w0 a'a + wa Jz + (G/sqrt(2J)) (a J+ + a' J-) + (G'/sqrt(2J)) (a' J+ + a J-)

with hbar = 1. The rotating (G) and counter-rotating (G') couplings are
independent; G' = 0 recovers the rotating wave approximation, where the
total excitation number a'a + Jz + J is conserved. Parity
exp[i pi (a'a + Jz + J)] is conserved for any couplings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ModelParams:
    """Physical constants plus the Fock cutoff.

    omega0  : field frequency
    omega_a : atomic frequency
    G       : rotating coupling
    Gp      : counter-rotating coupling
    J       : total spin (half-integer, N = 2J atoms)
    n_max   : highest retained photon number
    """

    omega0: float
    omega_a: float
    G: float
    Gp: float
    J: float
    n_max: int = 120

    def __post_init__(self):
        if self.omega0 <= 0 or self.omega_a <= 0:
            raise ValueError("frequencies must be positive")
        if self.J <= 0:
            raise ValueError("J must be positive")
        if abs(2 * self.J - round(2 * self.J)) > 1e-9:
            raise ValueError("2J must be an integer")
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")

    @property
    def g_plus(self) -> float:
        return self.G + self.Gp

    @property
    def g_minus(self) -> float:
        return self.G - self.Gp

    @property
    def two_j(self) -> int:
        return int(round(2 * self.J))

    @property
    def width(self) -> int:
        """Number of Jz levels, 2J+1."""
        return self.two_j + 1

    @property
    def n_levels(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return self.n_levels * self.width


@dataclass(frozen=True)
class BasisIndex:
    """Field-major flat indexing of the product basis.

    flat = n * (2J+1) + (m + J). This ordering is the partial-trace
    contract: reshaping a state vector to (n_max+1, 2J+1) puts photon
    number on rows and Jz on columns.
    """

    two_j: int
    n_max: int
    n: np.ndarray        # photon number per flat index
    m: np.ndarray        # Jz eigenvalue per flat index
    m_index: np.ndarray  # m + J per flat index (integer column offset)

    @property
    def width(self) -> int:
        return self.two_j + 1

    @property
    def n_levels(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return self.n_levels * self.width

    def flat(self, n: int, m: float) -> int:
        """Flat index of |n> x |J,m>."""
        k = round(m + self.two_j / 2.0)
        if not (0 <= n <= self.n_max) or not (0 <= k <= self.two_j):
            raise ValueError(f"(n={n}, m={m}) outside the basis")
        return n * self.width + int(k)

    def unflat(self, idx: int) -> tuple[int, float]:
        n, k = divmod(int(idx), self.width)
        return n, k - self.two_j / 2.0


def build_basis(params: ModelParams) -> BasisIndex:
    width = params.width
    j = params.two_j / 2.0
    m_vals = np.arange(width) - j
    n = np.repeat(np.arange(params.n_levels), width)
    m = np.tile(m_vals, params.n_levels)
    k = np.tile(np.arange(width), params.n_levels)
    return BasisIndex(two_j=params.two_j, n_max=params.n_max, n=n, m=m, m_index=k)


def build_hamiltonian(params: ModelParams) -> np.ndarray:
    """Dense real-symmetric Hamiltonian in the BasisIndex ordering.

    The rotating term couples (n, m) with (n-1, m+1); the counter-rotating
    term couples (n, m) with (n+1, m+1). Matrix elements follow
    a|n> = sqrt(n)|n-1> and J+|J,m> = sqrt(J(J+1)-m(m+1))|J,m+1>.
    The strictly upper triangle is assembled first and mirrored, so the
    result is symmetric by construction.
    """
    basis = build_basis(params)
    j = params.J
    d = basis.dim
    width = basis.width
    h = np.zeros((d, d))

    n = basis.n
    m = basis.m
    lam = np.sqrt(np.maximum(j * (j + 1) - m * (m + 1), 0.0))  # J+ ladder factor

    g_jc = params.G / math.sqrt(2.0 * j)
    if g_jc != 0.0:
        sel = (n >= 1) & (basis.m_index <= basis.two_j - 1)
        rows = np.nonzero(sel)[0] - width + 1        # flat(n-1, m+1)
        cols = np.nonzero(sel)[0]                    # flat(n, m)
        h[rows, cols] = g_jc * np.sqrt(n[sel]) * lam[sel]

    g_ajc = params.Gp / math.sqrt(2.0 * j)
    if g_ajc != 0.0:
        sel = (n <= params.n_max - 1) & (basis.m_index <= basis.two_j - 1)
        rows = np.nonzero(sel)[0]                    # flat(n, m)
        cols = np.nonzero(sel)[0] + width + 1        # flat(n+1, m+1)
        h[rows, cols] = g_ajc * np.sqrt(n[sel] + 1.0) * lam[sel]

    h += h.T
    h[np.arange(d), np.arange(d)] = params.omega0 * n + params.omega_a * m
    return h


def parity_operator(params: ModelParams) -> np.ndarray:
    """Diagonal of the parity operator exp[i pi (a'a + Jz + J)].

    The operator is diagonal in the product basis with entries
    (-1)^(n + m + J); only the diagonal is returned. It commutes with the
    Hamiltonian for any couplings.
    """
    basis = build_basis(params)
    return np.where((basis.n + basis.m_index) % 2 == 0, 1.0, -1.0)


def excitation_number(params: ModelParams) -> np.ndarray:
    """Diagonal of the total excitation operator a'a + Jz + J.

    Conserved only when one of the couplings vanishes.
    """
    basis = build_basis(params)
    return (basis.n + basis.m_index).astype(float)


def parity_sectors(basis: BasisIndex) -> tuple[np.ndarray, np.ndarray]:
    """Flat indices of the even and odd parity sectors.

    Restricting H to each sector block-diagonalizes it; the spectrum union
    over sectors must match the full dense spectrum. This is the optional
    reduced eigensolve path.
    """
    k = (basis.n + basis.m_index) % 2
    return np.nonzero(k == 0)[0], np.nonzero(k == 1)[0]
