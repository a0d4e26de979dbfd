"""Special functions needed by the spin Wigner machinery.

Log-factorials, Wigner 3j symbols (Racah single-sum form, safe for large
angular momenta), associated Legendre functions and spherical harmonics up
to degree 2J. Everything here is a pure function; memo tables are built
once and never mutated afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def ln_factorial(n: int) -> float:
    """Return ln(n!) for integer n >= 0."""
    if n < 0:
        raise ValueError(f"ln_factorial needs n >= 0, got {n}")
    return math.lgamma(n + 1)


def _as_twice(x, name: str) -> int:
    """Convert a half-integer to its doubled integer representation."""
    t = 2.0 * x
    r = round(t)
    if abs(t - r) > 1e-9:
        raise ValueError(f"{name}={x} is not a half-integer")
    return int(r)


@dataclass(frozen=True)
class ThreeJArgs:
    """Arguments (j1 j2 j3; m1 m2 m3) of a Wigner 3j symbol.

    Angular momenta and projections may be integers or half-integers.
    Construction validates |m_i| <= j_i and that each j_i + m_i is an
    integer (m has the same half-integer character as its j).
    """

    j1: float
    j2: float
    j3: float
    m1: float
    m2: float
    m3: float

    def __post_init__(self):
        for jn, mn in (("j1", "m1"), ("j2", "m2"), ("j3", "m3")):
            tj = _as_twice(getattr(self, jn), jn)
            tm = _as_twice(getattr(self, mn), mn)
            if tj < 0:
                raise ValueError(f"{jn} must be non-negative")
            if abs(tm) > tj:
                raise ValueError(f"|{mn}| exceeds {jn}")
            if (tj + tm) % 2:
                raise ValueError(f"{jn}+{mn} is not an integer")

    def doubled(self) -> tuple[int, int, int, int, int, int]:
        return (
            _as_twice(self.j1, "j1"),
            _as_twice(self.j2, "j2"),
            _as_twice(self.j3, "j3"),
            _as_twice(self.m1, "m1"),
            _as_twice(self.m2, "m2"),
            _as_twice(self.m3, "m3"),
        )


def wigner_3j(args: ThreeJArgs) -> float:
    """Wigner 3j symbol via the Racah single-sum closed form.

    Factorials are handled as log-factorials with the largest exponent
    subtracted before summing, so symbols stay accurate up to the K ~ 2J
    range used by the multipole expansion (and far beyond). Selection-rule
    failures (m1+m2+m3 != 0, triangle violation, non-integer perimeter)
    return exactly 0.0.
    """
    tj1, tj2, tj3, tm1, tm2, tm3 = args.doubled()

    if tm1 + tm2 + tm3 != 0:
        return 0.0
    if (tj1 + tj2 + tj3) % 2:
        return 0.0
    if tj3 < abs(tj1 - tj2) or tj3 > tj1 + tj2:
        return 0.0

    # All the factorial arguments below are guaranteed even, so halving is exact.
    def f(tx: int) -> float:
        return ln_factorial(tx // 2)

    ln_delta = 0.5 * (
        f(tj1 + tj2 - tj3)
        + f(tj1 - tj2 + tj3)
        + f(-tj1 + tj2 + tj3)
        - f(tj1 + tj2 + tj3 + 2)
    )
    ln_pref = ln_delta + 0.5 * (
        f(tj1 + tm1) + f(tj1 - tm1)
        + f(tj2 + tm2) + f(tj2 - tm2)
        + f(tj3 + tm3) + f(tj3 - tm3)
    )

    t_min = max(0, (tj2 - tj3 - tm1) // 2, (tj1 - tj3 + tm2) // 2)
    t_max = min((tj1 + tj2 - tj3) // 2, (tj1 - tm1) // 2, (tj2 + tm2) // 2)
    if t_max < t_min:
        return 0.0

    ln_terms = []
    signs = []
    for t in range(t_min, t_max + 1):
        ln_den = (
            ln_factorial(t)
            + f(tj1 + tj2 - tj3 - 2 * t)
            + f(tj1 - tm1 - 2 * t)
            + f(tj2 + tm2 - 2 * t)
            + f(tj3 - tj2 + tm1 + 2 * t)
            + f(tj3 - tj1 - tm2 + 2 * t)
        )
        ln_terms.append(-ln_den)
        signs.append(-1.0 if t % 2 else 1.0)

    ln_peak = max(ln_terms)
    total = 0.0
    for s, lt in zip(signs, ln_terms):
        total += s * math.exp(lt - ln_peak)

    phase = -1.0 if ((tj1 - tj2 - tm3) // 2) % 2 else 1.0
    return phase * total * math.exp(ln_pref + ln_peak)


def assoc_legendre(l: int, m: int, x):
    """Associated Legendre function P_l^m(x) without the Condon-Shortley phase.

    Uses P_m^m = (2m-1)!! (1-x^2)^(m/2) followed by the stable upward
    recurrence in l. Accepts a scalar or an ndarray for x.

    Parameters
    ----------
    l, m : int
        Degree and order, 0 <= m <= l.
    x : float or ndarray
        Argument(s) in [-1, 1].
    """
    if m < 0 or m > l:
        raise ValueError(f"assoc_legendre requires 0 <= m <= l, got l={l}, m={m}")
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) > 1.0):
        raise ValueError("assoc_legendre argument outside [-1, 1]")

    # (2m-1)!! stays below overflow for every order this package uses (m <= 2J).
    dfact = 1.0
    for k in range(1, m + 1):
        dfact *= 2 * k - 1
    pmm = dfact * (1.0 - xa * xa) ** (0.5 * m)
    if l == m:
        return pmm if pmm.ndim else float(pmm)

    pm1 = xa * (2 * m + 1) * pmm          # P_{m+1}^m
    if l == m + 1:
        return pm1 if pm1.ndim else float(pm1)

    for ll in range(m + 2, l + 1):
        pm2 = (xa * (2 * ll - 1) * pm1 - (ll + m - 1) * pmm) / (ll - m)
        pmm, pm1 = pm1, pm2
    return pm1 if pm1.ndim else float(pm1)


def spherical_harmonic(K: int, Q: int, theta, phi):
    """Spherical harmonic Y_KQ(theta, phi), quantum-mechanics convention.

    Condon-Shortley phase included here (not in assoc_legendre), so that
    Y_{K,-Q} = (-1)^Q conj(Y_KQ). Accepts scalars or broadcastable arrays.
    """
    if K < 0:
        raise ValueError("degree K must be non-negative")
    if abs(Q) > K:
        raise ValueError(f"|Q| <= K required, got K={K}, Q={Q}")
    if Q < 0:
        y = spherical_harmonic(K, -Q, theta, phi)
        return (-1) ** (-Q) * np.conj(y)

    th = np.asarray(theta, dtype=float)
    ph = np.asarray(phi, dtype=float)
    norm = math.sqrt(
        (2 * K + 1) / (4.0 * math.pi)
        * math.exp(ln_factorial(K - Q) - ln_factorial(K + Q))
    )
    val = ((-1) ** Q) * norm * assoc_legendre(K, Q, np.cos(th)) * np.exp(1j * Q * ph)
    return val if np.ndim(val) else complex(val)
