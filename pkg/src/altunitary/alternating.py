"""Alternating-unitary approximation of parallel transport.

One step ``U = u . Ubar . u`` interleaves exponentials of ``H(lam)`` and of
``dlam . grad H(lam)``. Working in the eigenbasis of ``H(lam)`` every H-factor
is a diagonal phase and every gradient factor is the same dense unitary ``W``,
so the step reduces to the kernel in :mod:`altunitary.kernels`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .linalg import SpectralDecomposition, spectral_decompose, unitary
from .models import HamiltonianFamily, Schedule

VARIANTS = ("standard", "reduced")


@dataclass(frozen=True)
class AlternatingParams:
    eta: float
    M: int
    L: int
    variant: str = "standard"

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if int(self.M) != self.M or self.M < 2:
            raise ValueError("M must be an integer >= 2")
        if int(self.L) != self.L or self.L < 1:
            raise ValueError("L must be an integer >= 1")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")


@dataclass(frozen=True, eq=False)
class TransferResult:
    """Final state, per-slice states (index 0 = initial) and effective time."""

    final_state: np.ndarray
    slice_states: tuple[np.ndarray, ...]
    effective_time: float
    norm_drift: float = 0.0
    converged: bool = True


def effective_time(eta: float, M: int, L: int) -> float:
    """Summed exponent magnitudes of a standard transfer (natural log)."""
    return 4.0 * L / eta * math.log(M) + L / eta * (1.0 - 1.0 / M)


def effective_time_reduced(eta: float, M: int, L: int) -> float:
    """Effective time of the reduced (paired) transfer; ``L`` must be even."""
    if L % 2:
        raise ValueError(f"reduced variant needs an even slice count, got L = {L}")
    return (3.0 * L - 1.0) / eta * math.log(M) + L / eta * (1.0 - 1.0 / M)


def _phase_table(energies: np.ndarray, eta: float, M: int) -> np.ndarray:
    m = np.arange(1, M)
    theta = np.log(m / (m + 1.0)) / eta
    return np.exp(-1j * np.outer(theta, energies))


def _gradient_unitary(decomp: SpectralDecomposition, a: np.ndarray, coeff: float) -> np.ndarray:
    """``exp(+i coeff A)`` expressed in the eigenbasis of ``decomp``."""
    ua = unitary(spectral_decompose(a), -coeff)
    v = decomp.eigenvectors
    return np.ascontiguousarray(v.conj().T @ ua @ v, dtype=complex)


class _StepFrame:
    """Eigenbasis data for one step: decomposition, W, phase table."""

    def __init__(self, family, lam, dlam, eta, M, midpoint=False):
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        dlam = np.atleast_1d(np.asarray(dlam, dtype=float))
        where = lam + 0.5 * dlam if midpoint else lam
        self.decomp = family.decompose(where)
        self.grad = family.directional_gradient(where, dlam)
        self.w = _gradient_unitary(self.decomp, self.grad, 1.0 / (2.0 * eta * M))
        self.w_adj = np.ascontiguousarray(self.w.conj().T)
        self.phases = _phase_table(self.decomp.eigenvalues, eta, M)
        self.u_phase = np.exp(1j * math.log(1.0 / M) / eta * self.decomp.eigenvalues)

    def to_eigen(self, psi):
        return np.ascontiguousarray(self.decomp.eigenvectors.conj().T @ psi, dtype=complex)

    def from_eigen(self, phi):
        return self.decomp.eigenvectors @ phi


def _renormalize(psi: np.ndarray) -> tuple[np.ndarray, float]:
    nrm = float(np.linalg.norm(psi))
    return psi / nrm, abs(nrm - 1.0)


def _check_state(family: HamiltonianFamily, psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (family.dim,):
        raise ValueError(f"dimension mismatch: state {psi.shape}, family dim {family.dim}")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-6:
        raise ValueError("input state must be normalized")
    return psi


def _standard_step(family, lam, dlam, eta, M, psi, midpoint=False, kernel=None):
    kernel = kernel or kernels.alternate
    frame = _StepFrame(family, lam, dlam, eta, M, midpoint)
    phi = frame.u_phase * frame.to_eigen(psi)
    phi = kernel(phi, frame.w, frame.w_adj, frame.phases)
    phi = frame.u_phase * phi
    return _renormalize(frame.from_eigen(phi))


def apply_parallel_step(
    family: HamiltonianFamily,
    lam,
    dlam,
    eta: float,
    M: int,
    psi,
    midpoint: bool = False,
) -> np.ndarray:
    """Apply one alternating-unitary transport step ``u Ubar u`` to ``psi``.

    H and its gradient are taken at ``lam`` (or ``lam + dlam/2`` with
    ``midpoint=True``). The output is renormalized.
    """
    if not eta > 0:
        raise ValueError("eta must be positive")
    if int(M) != M or M < 2:
        raise ValueError("M must be an integer >= 2")
    psi = _check_state(family, psi)
    out, _ = _standard_step(family, lam, dlam, eta, int(M), psi, midpoint)
    return out


def step_operator(family: HamiltonianFamily, lam, dlam, eta: float, M: int) -> np.ndarray:
    """Dense step unitary multiplied factor by factor (reference, small dims only)."""
    h = spectral_decompose(family.hamiltonian_at(lam))
    g = spectral_decompose(family.directional_gradient(lam, dlam))
    c = 1.0 / (2.0 * eta * M)
    u = unitary(h, -math.log(1.0 / M) / eta)
    ubar = np.eye(family.dim, dtype=complex)
    # rightmost factor acts first: positive block m = 1 .. M-1
    for m in range(1, M):
        ubar = unitary(h, math.log(m / (m + 1)) / eta) @ unitary(g, -c) @ ubar
    for m in range(-M + 1, 0):
        ubar = unitary(g, c) @ unitary(h, math.log(m / (m - 1)) / eta) @ ubar
    return u @ ubar @ u


def initial_state(family: HamiltonianFamily, lam, level: int = 0) -> np.ndarray:
    decomp = family.decompose(lam)
    return decomp.eigenvectors[:, level].astype(complex)


def _reduced_transfer(family, slices, eta, M, psi, midpoint, kernel):
    L = len(slices) - 1
    log_inv_m = math.log(1.0 / M)
    states = [psi]
    drift = 0.0
    for n in range(L // 2):
        a, b, c = slices[2 * n], slices[2 * n + 1], slices[2 * n + 2]
        if n > 0:
            # u(lam_{2n}) u^dag(lam_{2n-1}) ~ exp(+i ln(1/M)/eta dlam.gradH)
            prev = slices[2 * n - 1]
            g = family.directional_gradient(prev, a - prev)
            psi = unitary(spectral_decompose(g), -log_inv_m / eta) @ psi
        fa = _StepFrame(family, a, b - a, eta, M, midpoint)
        phi = kernel(fa.to_eigen(psi), fa.w, fa.w_adj, fa.phases)
        psi = fa.from_eigen(phi)
        # u^dag(lam_{2n+1}) u(lam_{2n}) ~ exp(-i ln(1/M)/eta dlam.gradH)
        psi = unitary(spectral_decompose(fa.grad), log_inv_m / eta) @ psi
        psi, d = _renormalize(psi)
        drift = max(drift, d)
        states.append(psi)
        # adjoint of Ubar(lam_{2n+1}, -dlam): same structure, W -> W^dag, conj phases
        fb = _StepFrame(family, b, c - b, eta, M, midpoint)
        phi = kernel(fb.to_eigen(psi), fb.w_adj, fb.w, np.ascontiguousarray(fb.phases.conj()))
        psi, d = _renormalize(fb.from_eigen(phi))
        drift = max(drift, d)
        states.append(psi)
    return states, drift


def run_transfer(
    family: HamiltonianFamily,
    schedule: Schedule,
    params: AlternatingParams,
    level: int = 0,
    midpoint: bool = False,
    kernel=None,
) -> TransferResult:
    """Transport eigenstate ``level`` of ``H(lam_i)`` along ``params.L`` slices.

    In the reduced variant the recorded odd-slice states carry the merged
    gradient factor in place of the dropped boundary phases.
    """
    if params.variant == "reduced" and params.L % 2:
        raise ValueError(f"reduced variant needs an even slice count, got L = {params.L}")
    kernel = kernel or kernels.alternate
    slices = schedule.with_slices(params.L).slices
    psi = initial_state(family, slices[0], level)
    if params.variant == "reduced":
        states, drift = _reduced_transfer(
            family, slices, params.eta, params.M, psi, midpoint, kernel
        )
        t_eff = effective_time_reduced(params.eta, params.M, params.L)
    else:
        states, drift = [psi], 0.0
        for l in range(params.L):
            psi, d = _standard_step(
                family, slices[l], slices[l + 1] - slices[l], params.eta, params.M, psi,
                midpoint, kernel,
            )
            drift = max(drift, d)
            states.append(psi)
        t_eff = effective_time(params.eta, params.M, params.L)
    return TransferResult(states[-1], tuple(states), t_eff, norm_drift=drift)
