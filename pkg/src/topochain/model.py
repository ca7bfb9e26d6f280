"""Chain definitions, the cosine coupling law, coupling disorder and Hamiltonians.

Sites are numbered ``i = p*(x-1) + s`` (1-based) for cell ``x`` in ``1..N`` and
sublattice ``s`` in ``1..p``. Bond ``k`` joins site ``k`` to site ``k+1``; on a
periodic chain bond ``L`` closes the ring. Energies are in units of ``g1``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ValidationError

OPEN = "open"
PERIODIC = "periodic"
UINT64_MAX = 2**64 - 1

DISORDER_STREAM = (
    "Philox(SeedSequence([seed, sample_index])); bond k (1-based) takes the k-th "
    "uniform draw on [-0.5, 0.5); offset = W * draw"
)


@dataclass(frozen=True)
class ChainSpec:
    """Static definition of a generalized SSH chain.

    ``p`` sites per cell, ``N`` cells, bond law ``J_k = g0 + g1 cos(2 pi k / p + theta)``.
    """

    p: int
    N: int
    g0: float = 1.0
    g1: float = 1.0
    theta: float = 0.0
    boundary: str = OPEN

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 2:
            raise ValidationError(f"p must be an integer >= 2, got {self.p!r}")
        if int(self.N) != self.N or self.N < 1:
            raise ValidationError(f"N must be an integer >= 1, got {self.N!r}")
        if self.boundary not in (OPEN, PERIODIC):
            raise ValidationError(f"boundary must be 'open' or 'periodic', got {self.boundary!r}")
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "N", int(self.N))
        for name in ("g0", "g1", "theta"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ValidationError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

    @property
    def L(self) -> int:
        return self.p * self.N

    @property
    def n_bonds(self) -> int:
        return self.L - 1 if self.boundary == OPEN else self.L

    def with_theta(self, theta: float) -> ChainSpec:
        return replace(self, theta=theta)

    def site_index(self, cell: int, sublattice: int) -> int:
        """1-based site index of ``(cell, sublattice)``."""
        if not 1 <= cell <= self.N:
            raise ValidationError(f"cell must be in 1..{self.N}, got {cell}")
        if not 1 <= sublattice <= self.p:
            raise ValidationError(f"sublattice must be in 1..{self.p}, got {sublattice}")
        return self.p * (cell - 1) + sublattice

    def cell_positions(self) -> np.ndarray:
        """Cell index ``x`` of every site, in site order."""
        return np.repeat(np.arange(1, self.N + 1), self.p)


@dataclass(frozen=True)
class CouplingProfile:
    """Concrete bond strengths; ``bonds[k-1]`` is ``J_k``."""

    bonds: np.ndarray
    boundary: str = OPEN

    def __post_init__(self):
        bonds = np.array(self.bonds, dtype=float)
        if bonds.ndim != 1:
            raise ValidationError("bonds must be one-dimensional")
        bonds.setflags(write=False)
        object.__setattr__(self, "bonds", bonds)
        if self.boundary not in (OPEN, PERIODIC):
            raise ValidationError(f"unknown boundary {self.boundary!r}")

    @property
    def L(self) -> int:
        n = self.bonds.shape[0]
        return n + 1 if self.boundary == OPEN else n

    def __len__(self):
        return self.bonds.shape[0]


@dataclass(frozen=True)
class DisorderSpec:
    """Static bond disorder ``J_k -> J_k + W * delta_k`` with ``delta_k`` uniform on [-0.5, 0.5)."""

    W: float = 0.0
    seed: int = 0
    samples: int = 1

    def __post_init__(self):
        W = float(self.W)
        if not np.isfinite(W) or W < 0:
            raise ValidationError(f"W must be >= 0, got {self.W!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed <= UINT64_MAX:
            raise ValidationError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if int(self.samples) != self.samples or self.samples < 1:
            raise ValidationError(f"samples must be >= 1, got {self.samples!r}")
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "samples", int(self.samples))

    def manifest(self) -> dict:
        return {"W": self.W, "seed": self.seed, "samples": self.samples, "stream": DISORDER_STREAM}


def coupling_law(k, p: int, g0: float, g1: float, theta: float):
    """``g0 + g1 cos(2 pi k / p + theta)``, vectorized over ``k``."""
    k = np.asarray(k)
    # reduce k mod p first so that J_{k+p} == J_k bit for bit
    return g0 + g1 * np.cos(2 * np.pi * (k % p) / p + theta)


def build_couplings(spec: ChainSpec) -> CouplingProfile:
    k = np.arange(1, spec.n_bonds + 1)
    return CouplingProfile(coupling_law(k, spec.p, spec.g0, spec.g1, spec.theta), spec.boundary)


def disorder_deltas(seed: int, sample_index: int, n_bonds: int) -> np.ndarray:
    """Uniform draws on [-0.5, 0.5) for bonds ``1..n_bonds`` of one realization.

    The stream is keyed on ``(seed, sample_index)`` and bond ``k`` always takes
    the ``k``-th draw, so a realization does not depend on sample execution
    order or on how many bonds were requested.
    """
    bitgen = np.random.Philox(np.random.SeedSequence([int(seed), int(sample_index)]))
    return np.random.Generator(bitgen).uniform(-0.5, 0.5, size=n_bonds)


def disorder_offsets(disorder: DisorderSpec, sample_index: int, n_bonds: int) -> np.ndarray:
    if not 0 <= sample_index < disorder.samples:
        raise ValidationError(
            f"sample_index must be in 0..{disorder.samples - 1}, got {sample_index}"
        )
    if disorder.W == 0:
        return np.zeros(n_bonds)
    return disorder.W * disorder_deltas(disorder.seed, sample_index, n_bonds)


def apply_disorder(
    profile: CouplingProfile, disorder: DisorderSpec, sample_index: int
) -> CouplingProfile:
    offsets = disorder_offsets(disorder, sample_index, len(profile))
    if disorder.W == 0:
        return profile
    return CouplingProfile(profile.bonds + offsets, profile.boundary)


def realspace_hamiltonian(profile: CouplingProfile, L: int) -> np.ndarray:
    """Single-excitation hopping matrix (real symmetric, zero diagonal)."""
    expected = L - 1 if profile.boundary == OPEN else L
    if len(profile) != expected:
        raise ValidationError(
            f"{profile.boundary} chain of {L} sites needs {expected} bonds, got {len(profile)}"
        )
    return _hopping_matrix(profile.bonds, L, profile.boundary == PERIODIC)


def _hopping_matrix(bonds: np.ndarray, L: int, periodic: bool) -> np.ndarray:
    """Hopping matrix from bonds along the last axis; leading axes are batch axes."""
    bonds = np.asarray(bonds)
    H = np.zeros(bonds.shape[:-1] + (L, L))
    idx = np.arange(L - 1)
    H[..., idx, idx + 1] = bonds[..., : L - 1]
    H[..., idx + 1, idx] = bonds[..., : L - 1]
    if periodic:
        # L == 2 would double-count the single pair; add instead of overwrite
        H[..., L - 1, 0] += bonds[..., L - 1]
        H[..., 0, L - 1] += bonds[..., L - 1]
    return H


def chain_hamiltonian(spec: ChainSpec, offsets: np.ndarray | None = None) -> np.ndarray:
    """Real-space Hamiltonian of ``spec``, optionally with additive bond offsets."""
    bonds = build_couplings(spec).bonds
    if offsets is not None:
        bonds = bonds + offsets
    return _hopping_matrix(bonds, spec.L, spec.boundary == PERIODIC)


def chain_hamiltonian_stack(
    spec: ChainSpec, thetas, offsets: np.ndarray | None = None
) -> np.ndarray:
    """Real-space Hamiltonians of ``spec`` at every phase in ``thetas``, shape ``(n, L, L)``.

    Entry ``i`` equals ``chain_hamiltonian(spec.with_theta(thetas[i]), offsets)``.
    """
    thetas = np.asarray(thetas, dtype=float).reshape(-1, 1)
    k = np.arange(1, spec.n_bonds + 1)
    bonds = coupling_law(k, spec.p, spec.g0, spec.g1, thetas)
    if offsets is not None:
        bonds = bonds + offsets
    return _hopping_matrix(bonds, spec.L, spec.boundary == PERIODIC)


def bloch_hamiltonian(spec: ChainSpec, q: float, theta: float | None = None) -> np.ndarray:
    """``p x p`` Bloch matrix at cell quasimomentum ``q``.

    Intra-cell bonds sit on the first off-diagonal; the inter-cell bond ``J_p``
    carries the phase ``exp(+iq)`` on entry ``(p, 1)``. For ``p = 2`` this is
    ``d_x tau_x + d_y tau_y`` with ``d_x = J1 + J2 cos q`` and ``d_y = J2 sin q``.
    """
    if theta is None:
        theta = spec.theta
    p = spec.p
    J = coupling_law(np.arange(1, p + 1), p, spec.g0, spec.g1, theta)
    h = np.zeros((p, p), dtype=complex)
    idx = np.arange(p - 1)
    h[idx, idx + 1] = J[: p - 1]
    h[idx + 1, idx] = J[: p - 1]
    corner = J[p - 1] * np.exp(1j * q)
    h[p - 1, 0] += corner
    h[0, p - 1] += np.conj(corner)
    return h


def bloch_hamiltonian_grid(spec: ChainSpec, qs, thetas) -> np.ndarray:
    """Bloch matrices on the product grid, shape ``(len(qs), len(thetas), p, p)``."""
    qs = np.asarray(qs, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    p = spec.p
    s = np.arange(1, p + 1)
    J = coupling_law(s[None, :], p, spec.g0, spec.g1, thetas[:, None])  # (nt, p)
    h = np.zeros((qs.size, thetas.size, p, p), dtype=complex)
    for i in range(p - 1):
        h[:, :, i, i + 1] = J[None, :, i]
        h[:, :, i + 1, i] = J[None, :, i]
    corner = J[None, :, p - 1] * np.exp(1j * qs)[:, None]
    h[:, :, p - 1, 0] += corner
    h[:, :, 0, p - 1] += np.conj(corner)
    return h


PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)


def gell_mann() -> np.ndarray:
    """The eight Gell-Mann matrices, ``result[i-1]`` is ``lambda_i``."""
    lam = np.zeros((8, 3, 3), dtype=complex)
    lam[0][0, 1] = lam[0][1, 0] = 1
    lam[1][0, 1], lam[1][1, 0] = -1j, 1j
    lam[2][0, 0], lam[2][1, 1] = 1, -1
    lam[3][0, 2] = lam[3][2, 0] = 1
    lam[4][0, 2], lam[4][2, 0] = -1j, 1j
    lam[5][1, 2] = lam[5][2, 1] = 1
    lam[6][1, 2], lam[6][2, 1] = -1j, 1j
    lam[7] = np.diag([1, 1, -2]) / np.sqrt(3)
    return lam
