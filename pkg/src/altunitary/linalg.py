"""Dense Hermitian linear algebra and state-vector primitives.

Operators are plain ``numpy`` arrays; :func:`as_hermitian` validates them.
Every matrix exponential in the package goes through :func:`spectral_decompose`
so that long exponents (``ln(M)/eta * H`` with ``|H| ~ 100``) stay exact to
roundoff. Units: energies in model units, hbar = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_RTOL = 1e-12
NORM_ATOL = 1e-6


class HermiticityError(ValueError):
    """Raised when an operator is not Hermitian within tolerance."""


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and paired orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def ground_space(self, window: float = 1e-8) -> np.ndarray:
        """Eigenvector columns within ``window`` (absolute energy) of the ground level."""
        mask = self.eigenvalues - self.eigenvalues[0] <= window
        return self.eigenvectors[:, mask]


def as_hermitian(h, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    """Return ``h`` as a square array after checking ``h == h^dagger``.

    The tolerance is relative to the largest entry magnitude. The error names the
    worst offending entry pair.
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] < 1:
        raise HermiticityError(f"expected a non-empty square matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise HermiticityError("operator has non-finite entries")
    scale = float(np.max(np.abs(h))) or 1.0
    dev = np.abs(h - h.conj().T)
    worst = float(dev.max())
    if worst > rtol * scale:
        i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
        raise HermiticityError(
            f"operator not Hermitian: |H[{i},{j}] - conj(H[{j},{i}])| = {worst:.3e} "
            f"exceeds {rtol:g} * max|H| = {rtol * scale:.3e}"
        )
    return h


def _fix_phases(v: np.ndarray) -> np.ndarray:
    # first component with non-negligible magnitude made real positive
    mags = np.abs(v)
    first = np.argmax(mags > 1e-10 * mags.max(axis=0), axis=0)
    pivot = v[first, np.arange(v.shape[1])]
    return v * (pivot.conj() / np.abs(pivot))


def spectral_decompose(h) -> SpectralDecomposition:
    """Eigendecomposition with deterministic ordering and phase convention.

    Real symmetric input keeps real eigenvectors.
    """
    h = as_hermitian(h)
    if np.iscomplexobj(h) and not np.any(h.imag):
        h = h.real
    evals, evecs = np.linalg.eigh(h)
    return SpectralDecomposition(evals, _fix_phases(evecs))


def _as_state(psi, dim: int | None = None) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ValueError(f"state must be a 1-d vector, got shape {psi.shape}")
    if dim is not None and psi.shape[0] != dim:
        raise ValueError(f"dimension mismatch: state has {psi.shape[0]}, operator has {dim}")
    return psi


def normalize(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    nrm = np.linalg.norm(psi)
    if nrm == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return psi / nrm


def evolve_decomposed(decomp: SpectralDecomposition, theta: float, psi) -> np.ndarray:
    """``exp(-i H theta) psi`` for an already decomposed ``H``."""
    psi = _as_state(psi, decomp.dim)
    v = decomp.eigenvectors
    return v @ (np.exp(-1j * theta * decomp.eigenvalues) * (v.conj().T @ psi))


def evolve(h, theta: float, psi) -> np.ndarray:
    """Apply ``exp(-i H theta)`` to ``psi`` (theta may be negative)."""
    if not np.isfinite(theta):
        raise ValueError("evolution time must be finite")
    h = as_hermitian(h)
    _as_state(psi, h.shape[0])
    return evolve_decomposed(spectral_decompose(h), theta, psi)


def unitary(decomp: SpectralDecomposition, theta: float) -> np.ndarray:
    """Dense ``exp(-i H theta)``."""
    v = decomp.eigenvectors
    return (v * np.exp(-1j * theta * decomp.eigenvalues)) @ v.conj().T


def _check_normalized(psi: np.ndarray, name: str) -> None:
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > NORM_ATOL:
        raise ValueError(f"{name} is not normalized (norm = {nrm:.9g})")


def fidelity(psi, phi) -> float:
    """Squared overlap ``|<phi|psi>|^2`` of two normalized states."""
    psi = _as_state(psi)
    phi = _as_state(phi, psi.shape[0])
    _check_normalized(psi, "psi")
    _check_normalized(phi, "phi")
    return float(min(1.0, abs(np.vdot(phi, psi)) ** 2))


def subspace_fidelity(basis: np.ndarray, psi) -> float:
    """Total population of ``psi`` on the span of orthonormal columns ``basis``."""
    psi = _as_state(psi, basis.shape[0])
    return float(min(1.0, np.sum(np.abs(basis.conj().T @ psi) ** 2)))


def populations(decomp: SpectralDecomposition, psi) -> np.ndarray:
    """Populations ``|<E_k|psi>|^2`` on the eigenbasis, ascending energy."""
    psi = _as_state(psi, decomp.dim)
    return np.abs(decomp.eigenvectors.conj().T @ psi) ** 2


def phase_distance(psi, phi) -> float:
    """``min_phi ||psi - e^{i phi} phi||``; first order in the amplitude error."""
    ov = abs(np.vdot(np.asarray(phi), np.asarray(psi)))
    return float(np.sqrt(max(0.0, 2.0 * (1.0 - ov))))


def shannon_entropy(p) -> float:
    """Shannon entropy (natural log) of a probability vector; zero entries skipped."""
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return max(0.0, float(-np.sum(p * np.log(p))))
