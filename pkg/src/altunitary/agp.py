"""Adiabatic gauge potential (AGP) constructions.

All three are evaluated in the eigenbasis of ``H(lam)`` and rotated back to the
computational basis. With ``w_mn = E_n - E_m`` and ``g = <m|dH|n>``:

* exact:        ``i g / w``                      (diagonal fixed to zero)
* regularized:  ``i g w / (eta^2 + w^2)``
* discretized:  trapezoidal sum over ``u = m/M`` of the regularized integral
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import SpectralDecomposition
from .models import HamiltonianFamily

DEGENERACY_ATOL = 1e-8


class DegenerateSpectrumError(ValueError):
    """The exact AGP is singular for degenerate level pairs."""


@dataclass(frozen=True)
class AgpComponents:
    components: tuple[np.ndarray, ...]
    kind: str
    eta: float | None = None
    M: int | None = None

    def along(self, dlam) -> np.ndarray:
        """``dlam . A``."""
        dlam = np.atleast_1d(np.asarray(dlam, dtype=float))
        return sum(d * a for d, a in zip(dlam, self.components))


def _eigen_gradients(family: HamiltonianFamily, lam):
    decomp = family.decompose(lam)
    v = decomp.eigenvectors
    grads = [v.conj().T @ g @ v for g in family.gradient_at(lam)]
    e = decomp.eigenvalues
    # w[m, n] = E_n - E_m
    w = e[None, :] - e[:, None]
    return decomp, grads, w


def _to_computational(decomp: SpectralDecomposition, a: np.ndarray) -> np.ndarray:
    v = decomp.eigenvectors
    out = v @ a @ v.conj().T
    return 0.5 * (out + out.conj().T)


def exact_agp(family: HamiltonianFamily, lam) -> AgpComponents:
    decomp, grads, w = _eigen_gradients(family, lam)
    dim = w.shape[0]
    off = ~np.eye(dim, dtype=bool)
    if dim > 1:
        gaps = np.where(off, np.abs(w), np.inf)
        m, n = np.unravel_index(int(np.argmin(gaps)), gaps.shape)
        if gaps[m, n] <= DEGENERACY_ATOL:
            raise DegenerateSpectrumError(
                f"levels {min(m, n)} and {max(m, n)} are degenerate "
                f"(|E_n - E_m| = {gaps[m, n]:.3e}); exact AGP undefined"
            )
    inv = np.zeros_like(w)
    inv[off] = 1.0 / w[off]
    comps = tuple(_to_computational(decomp, 1j * g * inv) for g in grads)
    return AgpComponents(comps, "exact")


def regularized_agp(family: HamiltonianFamily, lam, eta: float) -> AgpComponents:
    if not eta > 0:
        raise ValueError("regularizer eta must be positive")
    decomp, grads, w = _eigen_gradients(family, lam)
    factor = w / (eta**2 + w**2)
    comps = tuple(_to_computational(decomp, 1j * g * factor) for g in grads)
    return AgpComponents(comps, "regularized", eta=eta)


def discretized_agp(family: HamiltonianFamily, lam, eta: float, M: int) -> AgpComponents:
    """Trapezoidal discretization with ``M`` steps of the regularized AGP.

    Equal to ``-1/(2 eta M) sum_{m=-M+1, m!=0}^{M-1} sgn(m) e^{-i a_m H} dH e^{i a_m H}``
    with ``a_m = sgn(m) ln|m/M| / eta``. The overall minus sign comes from the
    ``u: 1 -> 0`` orientation of the substituted integral; without it the sum
    converges to minus the regularized AGP.
    """
    if not eta > 0:
        raise ValueError("regularizer eta must be positive")
    if int(M) != M or M < 2:
        raise ValueError("M must be an integer >= 2 (the sum is empty otherwise)")
    decomp, grads, w = _eigen_gradients(family, lam)
    # conjugation e^{-iaH} G e^{iaH} multiplies element (m, n) by e^{i a w_mn}
    a = np.log(np.arange(1, M) / M) / eta
    kernel = np.zeros_like(w, dtype=complex)
    for am in a:
        kernel += np.exp(1j * am * w) - np.exp(-1j * am * w)
    kernel *= -1.0 / (2.0 * eta * M)
    comps = tuple(_to_computational(decomp, g * kernel) for g in grads)
    return AgpComponents(comps, "discretized", eta=eta, M=int(M))


def discretized_agp_direct(family: HamiltonianFamily, lam, eta: float, M: int) -> AgpComponents:
    """Same sum assembled from dense conjugations (slow; for cross-checks)."""
    from .linalg import unitary

    if int(M) != M or M < 2:
        raise ValueError("M must be an integer >= 2")
    decomp = family.decompose(lam)
    comps = []
    for g in family.gradient_at(lam):
        acc = np.zeros(g.shape, dtype=complex)
        for m in range(-M + 1, M):
            if m == 0:
                continue
            sgn = 1.0 if m > 0 else -1.0
            a = sgn * math.log(abs(m) / M) / eta
            acc += sgn * unitary(decomp, a) @ g @ unitary(decomp, -a)
        comps.append(-acc / (2.0 * eta * M))
    return AgpComponents(tuple(comps), "discretized", eta=eta, M=int(M))
