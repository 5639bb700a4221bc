"""Benchmark Hamiltonian families and parameter schedules.

Both families are affine in their parameters, ``H(lam) = H0 + sum_c lam_c A_c``,
so the gradient is constant and the linearity invariant holds exactly. The
p-spin model is built directly in the (N+1)-dimensional maximal-spin (Dicke)
sector, basis ``|k>`` = k spins flipped from all-up.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize

from .linalg import SpectralDecomposition, spectral_decompose

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]])


@dataclass(frozen=True, eq=False)
class HamiltonianFamily:
    """Parameterized Hamiltonian ``lam -> H0 + sum_c lam_c * terms[c]``."""

    offset: np.ndarray
    terms: tuple[np.ndarray, ...]
    label: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.offset.shape[0]

    @property
    def n_params(self) -> int:
        return len(self.terms)

    def _params(self, lam) -> np.ndarray:
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        if lam.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} parameter(s), got shape {lam.shape}")
        if not np.all(np.isfinite(lam)):
            raise ValueError("parameters must be finite")
        return lam

    def hamiltonian_at(self, lam) -> np.ndarray:
        lam = self._params(lam)
        h = self.offset.copy()
        for c, term in zip(lam, self.terms):
            h = h + c * term
        return h

    def gradient_at(self, lam) -> list[np.ndarray]:
        self._params(lam)
        return [t.copy() for t in self.terms]

    def directional_gradient(self, lam, dlam) -> np.ndarray:
        """``dlam . grad H(lam)``."""
        grads = self.gradient_at(lam)
        dlam = np.atleast_1d(np.asarray(dlam, dtype=float))
        if dlam.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} displacement component(s)")
        out = np.zeros_like(self.offset)
        for d, g in zip(dlam, grads):
            out = out + d * g
        return out

    def decompose(self, lam) -> SpectralDecomposition:
        return spectral_decompose(self.hamiltonian_at(lam))


@dataclass(frozen=True)
class Schedule:
    """Path ``s -> lam(s)`` on ``s in [0, 1]`` with a uniform L-slice grid."""

    path: Callable[[float], np.ndarray]
    L: int

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 1:
            raise ValueError(f"slice count L must be a positive integer, got {self.L!r}")

    def __call__(self, s: float) -> np.ndarray:
        return np.atleast_1d(np.asarray(self.path(float(s)), dtype=float))

    @property
    def slices(self) -> np.ndarray:
        return np.array([self(l / self.L) for l in range(self.L + 1)])

    def with_slices(self, L: int) -> "Schedule":
        return Schedule(self.path, L)


# -- two-level spin flip ----------------------------------------------------


def two_level_family(hx0: float, hz0: float) -> HamiltonianFamily:
    """``H(hx, hz) = -hx X - hz Z`` with ``lam = (hx, hz)``."""
    if hx0 <= 0 or hz0 <= 0:
        raise ValueError("field amplitudes hx0 and hz0 must be positive")
    if hx0 / hz0 > 1:
        raise ValueError("two-level model requires hx0/hz0 <= 1")
    return HamiltonianFamily(
        offset=np.zeros((2, 2)),
        terms=(-PAULI_X, -PAULI_Z),
        label={"model": "two-level", "hx0": hx0, "hz0": hz0},
    )


def _two_level_path(hx0: float, hz0: float, s: float) -> np.ndarray:
    return np.array([hx0 * math.sin(math.pi * s), hz0 * math.cos(math.pi * s)])


def two_level_schedule(hx0: float, hz0: float, L: int) -> Schedule:
    return Schedule(functools.partial(_two_level_path, hx0, hz0), L)


# -- p-spin model in the Dicke sector ---------------------------------------


def dicke_operators(N: int) -> tuple[np.ndarray, np.ndarray]:
    """Collective ``sum_i Z_i`` and ``sum_i X_i`` in the maximal-spin sector."""
    k = np.arange(N + 1)
    sz = np.diag((N - 2 * k).astype(float))
    c = np.sqrt((k[:-1] + 1.0) * (N - k[:-1]))
    sx = np.diag(c, 1) + np.diag(c, -1)
    return sz, sx


def pspin_family(N: int, p: int, J: float = 1.0, gamma: float = 1.0) -> HamiltonianFamily:
    """``H(lam) = -lam J/N^(p-1) (sum Z)^p - (1 - lam) Gamma sum X``."""
    if int(N) != N or N < 2:
        raise ValueError("N must be an integer >= 2")
    if p not in (2, 3):
        raise ValueError("only p = 2 and p = 3 are supported")
    sz, sx = dicke_operators(N)
    zp = J / N ** (p - 1) * np.diag(np.diag(sz) ** p)
    return HamiltonianFamily(
        offset=-gamma * sx,
        terms=(-zp + gamma * sx,),
        label={"model": "pspin", "N": N, "p": p, "J": J, "Gamma": gamma},
    )


def _linear_path(s: float) -> np.ndarray:
    return np.array([s])


def pspin_schedule(L: int) -> Schedule:
    return Schedule(_linear_path, L)


def reference_gap(N: int, p: int) -> float:
    """Asymptotic gap scaling law: ``N^(2/3)`` for p = 2, ``N 2^(-0.126 N)`` for p = 3.

    These are the literature scaling forms, not computed gaps; ``N * N**(-1/3)``
    is also the energy scale used for the p-spin regularizer grid.
    """
    if p == 2:
        return N * N ** (-1.0 / 3.0)
    if p == 3:
        return N * 2.0 ** (-0.126 * N)
    raise ValueError("only p = 2 and p = 3 are supported")


def gap_at(family: HamiltonianFamily, lam) -> float:
    e = np.linalg.eigvalsh(family.hamiltonian_at(lam))
    return float(e[1] - e[0])


def min_gap(family: HamiltonianFamily, schedule: Schedule, grid: int = 1001) -> float:
    """Minimum of ``E1 - E0`` along the schedule.

    Uniform s-grid followed by golden-section refinement inside the bracketing
    grid cell pair. Resolution-limited when the minimum is sharper than the grid.
    """
    if grid < 2:
        raise ValueError("grid must have at least 2 points")
    s = np.linspace(0.0, 1.0, grid)
    gaps = np.array([gap_at(family, schedule(x)) for x in s])
    i = int(np.argmin(gaps))
    best = float(gaps[i])
    if 0 < i < grid - 1 and gaps[i - 1] > gaps[i] < gaps[i + 1]:
        res = optimize.minimize_scalar(
            lambda x: gap_at(family, schedule(x)),
            bracket=(s[i - 1], s[i], s[i + 1]),
            method="golden",
            tol=1e-10,
        )
        if 0.0 <= res.x <= 1.0:
            best = min(best, float(res.fun))
    return best
