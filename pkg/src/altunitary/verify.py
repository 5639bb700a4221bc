"""Limit and property checks for the AGP constructions.

Each check compares a construction against an independent route (finite
differences of eigenvectors, the closed-form regularized AGP, brute-force
``2^N`` operators) and returns a :class:`Check`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import agp, models
from .linalg import fidelity, spectral_decompose, unitary


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def _slope(x, y) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def _aligned_eigvecs(family, lam, ref: np.ndarray) -> np.ndarray:
    v = family.decompose(lam).eigenvectors.astype(complex)
    ov = np.sum(ref.conj() * v, axis=0)
    return v * (np.abs(ov) / ov)


def finite_difference_agp(family, lam, h: float = 1e-6) -> list[np.ndarray]:
    """AGP from central differences of parallel-gauge eigenvectors."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    v0 = family.decompose(lam).eigenvectors.astype(complex)
    out = []
    for c in range(family.n_params):
        e = np.zeros_like(lam)
        e[c] = h
        dv = (_aligned_eigvecs(family, lam + e, v0) - _aligned_eigvecs(family, lam - e, v0)) / (2 * h)
        a = np.zeros((family.dim, family.dim), dtype=complex)
        for n in range(family.dim):
            n_vec = v0[:, n]
            d = dv[:, n] - n_vec * np.vdot(n_vec, dv[:, n])
            a += 1j * np.outer(d, n_vec.conj())
        out.append(a)
    return out


def _max_dev(a, b) -> float:
    return max(float(np.max(np.abs(x - y))) for x, y in zip(a, b))


def check_hermitian(family, points, eta: float, M: int = 64, tol: float = 1e-10) -> Check:
    worst = 0.0
    for lam in points:
        for c in (agp.exact_agp(family, lam), agp.regularized_agp(family, lam, eta),
                  agp.discretized_agp(family, lam, eta, M)):
            for a in c.components:
                worst = max(worst, float(np.max(np.abs(a - a.conj().T))))
    return Check("hermiticity", worst <= tol, f"max |A - A^dag| = {worst:.2e} (tol {tol:g})")


def check_exact_vs_finite_difference(family, lam, tol: float = 1e-5) -> Check:
    dev = _max_dev(agp.exact_agp(family, lam).components, finite_difference_agp(family, lam))
    return Check("exact AGP vs eigenvector finite differences", dev <= tol,
                 f"max entry deviation {dev:.2e} (tol {tol:g})")


def check_regularized_slope(family, lam, target: float = 2.0, tol: float = 0.2) -> Check:
    gap = float(np.min(np.diff(family.decompose(lam).eigenvalues)))
    etas = np.logspace(-3, -1, 7) * gap
    exact = agp.exact_agp(family, lam).components
    devs = [_max_dev(agp.regularized_agp(family, lam, e).components, exact) for e in etas]
    s = _slope(etas, devs)
    return Check("regularized -> exact as eta^2", abs(s - target) <= tol,
                 f"log-log slope {s:.3f} (target {target} +/- {tol})")


def check_discretized_convergence(family, lam, eta: float, Ms=(10, 100, 1000)) -> Check:
    reg = agp.regularized_agp(family, lam, eta).components
    devs = [_max_dev(agp.discretized_agp(family, lam, eta, M).components, reg) for M in Ms]
    ok = all(b < a for a, b in zip(devs, devs[1:]))
    txt = ", ".join(f"M={M}: {d:.2e}" for M, d in zip(Ms, devs))
    return Check("discretized -> regularized as M grows", ok, txt)


def transport_errors(family, lam, direction, steps, level: int = 0) -> list[float]:
    """``sqrt(1 - F)`` between AGP-transported and exact eigenstates."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    direction = np.atleast_1d(np.asarray(direction, dtype=float))
    a = agp.exact_agp(family, lam)
    n0 = family.decompose(lam).eigenvectors[:, level].astype(complex)
    errs = []
    for d in steps:
        gen = spectral_decompose(a.along(d * direction))
        moved = unitary(gen, 1.0) @ n0
        target = family.decompose(lam + d * direction).eigenvectors[:, level].astype(complex)
        errs.append(float(np.sqrt(max(1e-300, 1.0 - fidelity(moved, target)))))
    return errs


def check_transport_order(family, lam, direction, h0: float = 0.02, tol: float = 0.25) -> Check:
    steps = h0 / 2.0 ** np.arange(4)
    errs = transport_errors(family, lam, direction, steps)
    s = _slope(steps, errs)
    return Check("exact AGP parallel transport is second order", abs(s - 2.0) <= tol,
                 f"slope of sqrt(1-F) vs |dlam| = {s:.3f}")


# -- Dicke sector oracle --------------------------------------------------------


def full_space_operators(N: int) -> tuple[np.ndarray, np.ndarray]:
    """``sum Z_i`` and ``sum X_i`` on the full ``2^N`` space (bit 1 = spin down)."""
    dim = 2**N
    idx = np.arange(dim)
    bits = (idx[:, None] >> np.arange(N)) & 1
    sz = np.diag((N - 2 * bits.sum(axis=1)).astype(float))
    sx = np.zeros((dim, dim))
    for i in range(N):
        sx[idx, idx ^ (1 << i)] += 1.0
    return sz, sx


def symmetric_basis(N: int) -> np.ndarray:
    """Columns are normalized Dicke states with k = 0..N spins down."""
    dim = 2**N
    weights = np.array([bin(b).count("1") for b in range(dim)])
    basis = np.zeros((dim, N + 1))
    for k in range(N + 1):
        basis[weights == k, k] = 1.0
        basis[:, k] /= np.linalg.norm(basis[:, k])
    return basis


def dicke_oracle_deviation(N: int, p: int, lams=(0.0, 0.37, 1.0)) -> float:
    sz, sx = full_space_operators(N)
    P = symmetric_basis(N)
    zp = np.linalg.matrix_power(sz, p) / N ** (p - 1)
    fam = models.pspin_family(N, p)
    dev = 0.0
    dz, dx = models.dicke_operators(N)
    dev = max(dev, float(np.max(np.abs(P.T @ sz @ P - dz))))
    dev = max(dev, float(np.max(np.abs(P.T @ sx @ P - dx))))
    for lam in lams:
        full = -lam * zp - (1 - lam) * sx
        dev = max(dev, float(np.max(np.abs(P.T @ full @ P - fam.hamiltonian_at([lam])))))
    return dev


def check_dicke_oracle(max_N: int = 10, tol: float = 1e-10) -> Check:
    worst = max(dicke_oracle_deviation(N, p) for N, p in itertools.product(range(2, max_N + 1), (2, 3)))
    return Check("Dicke sector matches brute-force 2^N projection", worst <= tol,
                 f"N <= {max_N}, p in (2, 3): max deviation {worst:.2e}")


def agp_suite(family=None, lam=None, eta=None) -> list[Check]:
    """Run every AGP property on a nondegenerate point of ``family``.

    Defaults to the two-level model with hx0 = 0.2 at an off-axis point.
    """
    if family is None:
        family = models.two_level_family(0.2, 1.0)
    if lam is None:
        lam = np.full(family.n_params, 0.3)
        if family.label.get("model") == "two-level":
            lam = np.array([0.2, 0.3])
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    gap = float(np.min(np.diff(family.decompose(lam).eigenvalues)))
    if eta is None:
        eta = gap
    direction = np.ones(family.n_params) / np.sqrt(family.n_params)
    points = [lam, lam + 0.05 * direction]
    return [
        check_hermitian(family, points, eta),
        check_exact_vs_finite_difference(family, lam),
        check_regularized_slope(family, lam),
        check_discretized_convergence(family, lam, eta),
        check_transport_order(family, lam, direction),
        check_dicke_oracle(),
    ]
