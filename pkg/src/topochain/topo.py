"""Band structures and topological invariants.

Winding numbers for the two-site chain, and per-band Chern numbers on the
synthetic torus spanned by the cell quasimomentum ``q`` and the phase ``theta``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CriticalPointError, GapClosedError, ValidationError
from .model import ChainSpec, bloch_hamiltonian_grid, coupling_law

CRITICAL_ATOL = 1e-12
MIN_GAP = 1e-8


def _periodic_grid(n: int) -> np.ndarray:
    return 2 * np.pi * np.arange(n) / n


@dataclass(frozen=True)
class BandSpectrum:
    """Bloch bands on a ``(q, theta)`` grid.

    ``energies`` has shape ``(nq, ntheta, p)``, ascending along the last axis;
    ``states[i, j, :, n]`` is the Bloch vector of band ``n`` at ``(qs[i], thetas[j])``.
    """

    qs: np.ndarray
    thetas: np.ndarray
    energies: np.ndarray
    states: np.ndarray

    @property
    def n_bands(self) -> int:
        return self.energies.shape[-1]

    def gaps(self) -> np.ndarray:
        """Gap between bands n and n+1 at every grid point, shape ``(nq, ntheta, p-1)``."""
        return np.diff(self.energies, axis=-1)

    def min_gap(self) -> float:
        return float(self.gaps().min()) if self.n_bands > 1 else np.inf


def band_spectrum(spec: ChainSpec, nq: int = 64, ntheta: int | None = None) -> BandSpectrum:
    """Diagonalize the Bloch Hamiltonian on a uniform periodic grid.

    With ``ntheta=None`` only ``spec.theta`` is used; otherwise ``theta`` runs over
    ``2 pi j / ntheta``.
    """
    if nq < 2 or (ntheta is not None and ntheta < 2):
        raise ValidationError("grid sizes must be >= 2")
    qs = _periodic_grid(nq)
    thetas = np.array([spec.theta]) if ntheta is None else _periodic_grid(ntheta)
    h = bloch_hamiltonian_grid(spec, qs, thetas)
    E, U = np.linalg.eigh(h)
    return BandSpectrum(qs, thetas, E, U)


@dataclass(frozen=True)
class ChernSet:
    """Per-band Chern numbers, bottom band first, plus the smallest gap met on the grid."""

    values: tuple[int, ...]
    min_gap: float
    raw: tuple[float, ...]

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, n):
        return self.values[n]


def winding_number_analytic(g0: float, g1: float, theta: float) -> int:
    """Winding number of the two-site chain: 1 if ``g0 g1 cos(theta) > 0`` else 0.

    Raises CriticalPointError when ``g0 g1 cos(theta)`` vanishes (gap closed).
    """
    s = g0 * g1 * np.cos(theta)
    if abs(s) <= CRITICAL_ATOL * max(1.0, abs(g0 * g1)):
        raise CriticalPointError(
            f"g0*g1*cos(theta) = {s:.3e}: gap closed, winding number undefined"
        )
    return 1 if s > 0 else 0


def _winding_sum(J1: float, J2: float, nk: int) -> float:
    q = _periodic_grid(nk)
    # n x dn/dq = (d_x d_y' - d_y d_x') / |d|^2 with d_x' = -J2 sin q, d_y' = J2 cos q
    num = J1 * J2 * np.cos(q) + J2 * J2
    den = J1 * J1 + J2 * J2 + 2 * J1 * J2 * np.cos(q)
    # the periodic trapezoid rule is the plain mean over the grid
    return float(np.mean(num / den))


def winding_number_integral(
    J1: float, J2: float, nk: int = 256, tol: float = 1e-10, max_nk: int = 2**22
) -> float:
    """Winding of ``(d_x, d_y)`` by quadrature of ``n x dn/dq`` over the zone.

    ``nk`` is the starting grid; it is doubled until two successive estimates
    agree within ``tol``, which keeps near-critical inputs accurate.
    """
    if nk < 16:
        raise ValidationError(f"nk must be >= 16, got {nk}")
    if abs(abs(J1) - abs(J2)) <= CRITICAL_ATOL * max(1.0, abs(J1), abs(J2)):
        raise CriticalPointError(f"|J1| == |J2| ({J1}, {J2}): gap closed")
    if J2 == 0:
        return 0.0
    prev = _winding_sum(J1, J2, nk)
    while nk < max_nk:
        nk *= 2
        cur = _winding_sum(J1, J2, nk)
        if abs(cur - prev) <= tol:
            return cur
        prev = cur
    return prev


def ssh_couplings(g0: float, g1: float, theta: float) -> tuple[float, float]:
    """``(J1, J2)`` of the two-site chain."""
    J1, J2 = coupling_law(np.array([1, 2]), 2, g0, g1, theta)
    return float(J1), float(J2)


def _link(u: np.ndarray, axis: int) -> np.ndarray:
    """Normalized overlaps ``<u(k)|u(k + e_axis)>`` on a periodic grid."""
    ov = np.sum(u.conj() * np.roll(u, -1, axis=axis), axis=-1)
    mag = np.abs(ov)
    return ov / np.where(mag == 0, 1.0, mag)


def chern_numbers(
    spec: ChainSpec,
    nq: int = 24,
    ntheta: int = 24,
    phase_rng: np.random.Generator | None = None,
) -> ChernSet:
    """Chern number of every band on the ``(q, theta)`` torus.

    Lattice field-strength construction: with link variables ``U_q``, ``U_theta``
    built from overlaps of neighbouring Bloch vectors, each plaquette contributes
    ``Arg[U_q(k) U_theta(k + q) / (U_q(k + theta) U_theta(k))]`` and the sum over
    plaquettes is ``2 pi`` times an integer. Arbitrary eigenvector phases cancel
    around each plaquette.

    ``phase_rng`` multiplies every Bloch vector by a random phase before the
    evaluation; the result must not change.
    """
    if nq < 12 or ntheta < 12:
        raise ValidationError("chern_numbers needs nq, ntheta >= 12")
    bands = band_spectrum(spec, nq, ntheta)
    gaps = bands.gaps()
    min_gap = float(gaps.min())
    if min_gap <= MIN_GAP:
        i, j, n = np.unravel_index(np.argmin(gaps), gaps.shape)
        raise GapClosedError(bands.qs[i], bands.thetas[j], float(gaps[i, j, n]), int(n) + 1)

    states = bands.states
    if phase_rng is not None:
        phases = np.exp(2j * np.pi * phase_rng.random(states.shape[:2] + (1, spec.p)))
        states = states * phases

    raw = []
    for n in range(spec.p):
        u = states[..., n]
        Uq = _link(u, 0)
        Ut = _link(u, 1)
        F = np.angle(Uq * np.roll(Ut, -1, axis=0) / (np.roll(Uq, -1, axis=1) * Ut))
        raw.append(float(F.sum() / (2 * np.pi)))
    values = tuple(int(round(c)) for c in raw)
    return ChernSet(values, min_gap, tuple(raw))
