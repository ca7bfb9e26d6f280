"""Dense Hermitian linear algebra: eigendecomposition and unitary propagation.

All propagators work through an exact eigendecomposition, which is cheap for
the chain sizes used here (tens to a few hundred sites).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NonHermitianError, ValidationError

HERMITIAN_ATOL = 1e-12


def hermitian_asymmetry(H: np.ndarray) -> float:
    """Largest entry of ``|H - H^dagger|``."""
    H = np.asarray(H)
    if H.size == 0:
        return 0.0
    return float(np.max(np.abs(H - H.conj().T)))


def check_hermitian(H, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Return ``H`` as a square complex/real array, or raise NonHermitianError.

    The tolerance scales with ``max(1, max|H_ij|)`` so that large couplings do
    not trip the check through rounding alone.
    """
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {H.shape}")
    scale = max(1.0, float(np.max(np.abs(H)))) if H.size else 1.0
    asym = hermitian_asymmetry(H)
    if asym > atol * scale:
        raise NonHermitianError(asym, atol * scale)
    return H


def check_state(psi, dim: int | None = None, atol: float = 1e-10) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ValidationError(f"state must be a 1-d amplitude array, got shape {psi.shape}")
    if dim is not None and psi.shape[0] != dim:
        raise ValidationError(f"state has dimension {psi.shape[0]}, expected {dim}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > atol:
        raise ValidationError(f"state is not normalized (norm={norm:.12g})")
    return psi


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues and matching column eigenvectors of a Hermitian matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T

    def propagator(self, t: float) -> np.ndarray:
        V = self.eigenvectors
        return (V * np.exp(-1j * self.eigenvalues * t)) @ V.conj().T


def eigh(H) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix.

    Raises NonHermitianError when ``H`` deviates from its conjugate transpose
    by more than the tolerance; the message carries the largest asymmetry.
    Degenerate eigenspaces get whatever orthonormal basis LAPACK returns.
    """
    H = check_hermitian(H)
    E, V = np.linalg.eigh(H)
    return EigenSystem(E, V)


def evolve_spectral(H, psi, t: float) -> np.ndarray:
    """Apply ``exp(-i H t)`` to ``psi`` through the spectral decomposition of ``H``."""
    H = check_hermitian(H)
    psi = check_state(psi, H.shape[0])
    if t == 0:
        return psi.copy()
    eig = eigh(H)
    return _apply(eig, psi, t)


def _apply(eig: EigenSystem, psi: np.ndarray, t: float) -> np.ndarray:
    V = eig.eigenvectors
    return V @ (np.exp(-1j * eig.eigenvalues * t) * (V.conj().T @ psi))


def evolve_times(H, psi, times) -> np.ndarray:
    """States ``exp(-i H t) psi`` for every ``t`` in ``times``, shape ``(len(times), dim)``.

    One diagonalization serves the whole time grid. Rows at ``t == 0`` are
    exact copies of ``psi``.
    """
    H = check_hermitian(H)
    psi = check_state(psi, H.shape[0])
    times = np.asarray(times, dtype=float)
    eig = eigh(H)
    V = eig.eigenvectors
    coeffs = V.conj().T @ psi
    phases = np.exp(-1j * np.outer(times, eig.eigenvalues))
    out = (phases * coeffs) @ V.T
    out[times == 0] = psi
    return out


def evolve_schedule(
    H_of_t: Callable,
    psi0,
    t0: float,
    t1: float,
    steps: int,
    vectorized: bool = False,
) -> np.ndarray:
    """Propagate ``psi0`` from ``t0`` to ``t1`` under a time-dependent Hamiltonian.

    Piecewise-constant midpoint rule: on each of ``steps`` equal sub-intervals
    the exact propagator of ``H`` at the sub-interval midpoint is applied. The
    scheme is second order in the step width.

    Parameters
    ----------
    H_of_t : callable
        Returns the Hermitian matrix at time ``t``. With ``vectorized=True`` it
        is called once with the array of all midpoints and must return the
        stacked matrices, shape ``(steps, dim, dim)``.
    psi0 : array_like
        Normalized initial state.
    t0, t1 : float
        Start and end time; ``t1 < t0`` propagates backwards.
    steps : int
        Number of sub-intervals, at least 1.
    vectorized : bool
        Diagonalize all midpoint Hamiltonians in one batched call.
    """
    if int(steps) != steps or steps < 1:
        raise ValidationError(f"steps must be a positive integer, got {steps!r}")
    steps = int(steps)
    psi = check_state(psi0)
    dt = (t1 - t0) / steps
    mids = t0 + (np.arange(steps) + 0.5) * dt
    if vectorized:
        Hs = np.asarray(H_of_t(mids))
        if Hs.shape != (steps, psi.shape[0], psi.shape[0]):
            raise ValidationError(
                f"expected a Hamiltonian stack of shape {(steps, psi.shape[0], psi.shape[0])}, "
                f"got {Hs.shape}"
            )
        scale = max(1.0, float(np.max(np.abs(Hs))))
        asym = float(np.max(np.abs(Hs - np.swapaxes(Hs, -1, -2).conj())))
        if asym > HERMITIAN_ATOL * scale:
            raise NonHermitianError(asym, HERMITIAN_ATOL * scale)
        E, V = np.linalg.eigh(Hs)
        phases = np.exp(-1j * E * dt)
        for i in range(steps):
            psi = V[i] @ (phases[i] * (V[i].conj().T @ psi))
        return psi
    for t in mids:
        H = check_hermitian(H_of_t(t))
        if H.shape[0] != psi.shape[0]:
            raise ValidationError(
                f"Hamiltonian dimension {H.shape[0]} does not match state dimension {psi.shape[0]}"
            )
        E, V = np.linalg.eigh(H)
        psi = V @ (np.exp(-1j * E * dt) * (V.conj().T @ psi))
    return psi


@dataclass(frozen=True)
class ConvergenceReport:
    steps: int
    coarse: np.ndarray
    fine: np.ndarray
    max_difference: float


def schedule_convergence(H_of_t, psi0, t0: float, t1: float, steps: int) -> ConvergenceReport:
    """Run ``evolve_schedule`` at ``steps`` and ``2*steps`` and compare amplitudes."""
    coarse = evolve_schedule(H_of_t, psi0, t0, t1, steps)
    fine = evolve_schedule(H_of_t, psi0, t0, t1, 2 * steps)
    return ConvergenceReport(steps, coarse, fine, float(np.max(np.abs(fine - coarse))))
