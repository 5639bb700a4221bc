"""Reference adiabatic driving: time-dependent Schroedinger evolution under H(lam(t/T)).

Piecewise-constant midpoint exponentials on a uniform grid of K steps; K is
doubled until successive resolutions agree (infidelity <= tolerance). Many
operation times T can be propagated together: the eigendecomposition at each
grid point is shared and only the phases depend on T.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla

from .alternating import TransferResult, initial_state
from .linalg import phase_distance
from .models import HamiltonianFamily, Schedule

log = logging.getLogger(__name__)


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, deviation: float, steps: int):
        super().__init__(message)
        self.deviation = deviation
        self.steps = steps


@dataclass(frozen=True)
class PropagationConfig:
    T: float
    initial_steps: int = 8
    tolerance: float = 1e-8
    max_doublings: int = 20

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("operation time T must be positive")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.initial_steps < 8:
            raise ValueError("initial_steps must be >= 8")
        if self.max_doublings < 1:
            raise ValueError("max_doublings must be >= 1")


@dataclass
class BatchResult:
    """Propagation of one initial state for several operation times."""

    times: np.ndarray
    final_states: np.ndarray  # (dim, nT)
    slice_states: np.ndarray | None  # (L+1, dim, nT)
    converged: np.ndarray
    steps: np.ndarray
    deviations: list[list[float]] = field(default_factory=list)
    norm_drift: np.ndarray | None = None


def _is_tridiagonal(family: HamiltonianFamily) -> bool:
    mats = (family.offset, *family.terms)
    if any(np.iscomplexobj(m) and np.any(m.imag) for m in mats):
        return False
    band = np.abs(np.subtract.outer(np.arange(family.dim), np.arange(family.dim))) > 1
    return all(not np.any(m[band]) for m in mats)


def _eigh_fn(family: HamiltonianFamily):
    if family.dim > 2 and _is_tridiagonal(family):

        def eigh(h):
            h = h.real
            return sla.eigh_tridiagonal(np.diag(h).copy(), np.diag(h, 1).copy())

        return eigh
    return np.linalg.eigh


def propagate(
    family: HamiltonianFamily,
    schedule: Schedule,
    times,
    steps: int,
    psi0=None,
    record_slices: bool = False,
) -> tuple[np.ndarray, np.ndarray | None]:
    """Fixed-resolution midpoint propagation for every T in ``times``.

    Returns final states ``(dim, nT)`` and, with ``record_slices``, states at the
    schedule's L+1 slice times (``steps`` must then be a multiple of L).
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    L = schedule.L
    if record_slices and steps % L:
        raise ValueError(f"step count {steps} is not a multiple of L = {L}")
    if psi0 is None:
        psi0 = initial_state(family, schedule(0.0))
    eigh = _eigh_fn(family)
    psi = np.tile(np.asarray(psi0, dtype=complex)[:, None], (1, times.size))
    dts = times / steps
    slices = [psi.copy()] if record_slices else None
    per_slice = steps // L
    for i in range(steps):
        e, v = eigh(family.hamiltonian_at(schedule((i + 0.5) / steps)))
        psi = v @ (np.exp(-1j * np.outer(e, dts)) * (v.conj().T @ psi))
        if record_slices and (i + 1) % per_slice == 0:
            slices.append(psi.copy())
    return psi, (np.array(slices) if record_slices else None)


def doubling_ratios(
    family: HamiltonianFamily, schedule: Schedule, T: float, steps: int = 16, doublings: int = 5
) -> np.ndarray:
    """Ratios of successive phase-aligned distances under step doubling.

    For the second-order midpoint rule the distance between the K and 2K
    final states falls by ~4 per doubling (the infidelity by ~16).
    """
    psi0 = initial_state(family, schedule(0.0))
    finals = [propagate(family, schedule, [T], steps * 2**i, psi0)[0][:, 0] for i in range(doublings + 1)]
    d = np.array([phase_distance(a, b) for a, b in zip(finals, finals[1:])])
    return d[:-1] / d[1:]


def _infidelity(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return 1.0 - np.abs(np.sum(a.conj() * b, axis=0)) ** 2


def propagate_converged(
    family: HamiltonianFamily,
    schedule: Schedule,
    times,
    initial_steps: int = 8,
    tolerance: float = 1e-8,
    max_doublings: int = 20,
    record_slices: bool = False,
    level: int = 0,
) -> BatchResult:
    """Step-doubling propagation until each T's final state is converged.

    Converged operation times are frozen and dropped from later doublings.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times <= 0):
        raise ValueError("operation times must be positive")
    if max_doublings < 1:
        raise ValueError("max_doublings must be >= 1")
    psi0 = initial_state(family, schedule(0.0), level)
    k0 = schedule.L * math.ceil(initial_steps / schedule.L)
    n = times.size
    final = np.empty((family.dim, n), dtype=complex)
    sl = np.empty((schedule.L + 1, family.dim, n), dtype=complex) if record_slices else None
    converged = np.zeros(n, dtype=bool)
    steps = np.zeros(n, dtype=int)
    devs: list[list[float]] = [[] for _ in range(n)]

    active = np.arange(n)
    prev, prev_sl = propagate(family, schedule, times, k0, psi0, record_slices)
    k = k0
    for _ in range(max_doublings):
        k *= 2
        cur, cur_sl = propagate(family, schedule, times[active], k, psi0, record_slices)
        dev = _infidelity(prev, cur)
        for col, idx in enumerate(active):
            devs[idx].append(float(dev[col]))
        done = dev <= tolerance
        for col in np.flatnonzero(done):
            idx = active[col]
            final[:, idx] = cur[:, col]
            if record_slices:
                sl[:, :, idx] = cur_sl[:, :, col]
            converged[idx] = True
            steps[idx] = k
        keep = ~done
        active = active[keep]
        if active.size == 0:
            break
        prev = cur[:, keep]
        prev_sl = cur_sl[:, :, keep] if record_slices else None
        log.debug("adiabatic: %d of %d times unconverged at K=%d", active.size, n, k)
    else:
        for col, idx in enumerate(active):
            final[:, idx] = cur[:, keep][:, col]
            if record_slices:
                sl[:, :, idx] = cur_sl[:, :, keep][:, :, col]
            steps[idx] = k
    drift = np.abs(np.linalg.norm(final, axis=0) - 1.0)
    return BatchResult(times, final, sl, converged, steps, devs, drift)


def evolve_adiabatic(
    family: HamiltonianFamily, schedule: Schedule, config: PropagationConfig
) -> TransferResult:
    """Adiabatic driving for operation time ``config.T``; states recorded at slice times.

    Raises :class:`ConvergenceError` when step doubling does not reach the tolerance.
    """
    res = propagate_converged(
        family,
        schedule,
        [config.T],
        initial_steps=config.initial_steps,
        tolerance=config.tolerance,
        max_doublings=config.max_doublings,
        record_slices=True,
    )
    if not res.converged[0]:
        last = res.deviations[0][-2:]
        raise ConvergenceError(
            f"adiabatic propagation for T={config.T:g} not converged after "
            f"{config.max_doublings} doublings (last deviations {last})",
            deviation=last[-1],
            steps=int(res.steps[0]),
        )
    states = tuple(res.slice_states[l, :, 0] for l in range(schedule.L + 1))
    return TransferResult(
        res.final_states[:, 0], states, config.T, norm_drift=float(res.norm_drift[0])
    )
