import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topochain.errors import NonHermitianError, ValidationError
from topochain.model import ChainSpec, chain_hamiltonian, chain_hamiltonian_stack
from topochain.numerics import (
    eigh,
    evolve_schedule,
    evolve_spectral,
    evolve_times,
    schedule_convergence,
)

from conftest import random_hermitian, random_state


def test_eigh_zero_matrix():
    eig = eigh(np.zeros((2, 2)))
    np.testing.assert_array_equal(eig.eigenvalues, [0.0, 0.0])
    np.testing.assert_allclose(eig.eigenvectors, np.eye(2))


def test_eigh_pauli_x_times_two():
    eig = eigh(2 * np.array([[0, 1], [1, 0]]))
    np.testing.assert_allclose(eig.eigenvalues, [-2, 2], atol=1e-14)


def test_eigh_single_trimer():
    J = 1.5
    H = J * np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    eig = eigh(H)
    np.testing.assert_allclose(eig.eigenvalues, [-np.sqrt(2) * J, 0, np.sqrt(2) * J], atol=1e-12)
    np.testing.assert_allclose(eig.eigenvalues, [-2.12132, 0, 2.12132], atol=1e-5)


def test_eigh_rejects_non_hermitian():
    H = np.array([[0, 1], [0.5, 0]])
    with pytest.raises(NonHermitianError) as info:
        eigh(H)
    assert info.value.max_asymmetry == pytest.approx(0.5)
    assert "0.5" in str(info.value) or "5.000e-01" in str(info.value)


@pytest.mark.parametrize("n", [1, 3, 8, 40])
def test_eigensystem_invariants(rng, n):
    H = random_hermitian(rng, n)
    eig = eigh(H)
    assert np.all(np.diff(eig.eigenvalues) >= 0)
    V = eig.eigenvectors
    np.testing.assert_allclose(V.conj().T @ V, np.eye(n), atol=1e-10)
    assert np.max(np.abs(H - eig.reconstruct())) <= 1e-10 * np.max(np.abs(H))


def test_eigh_is_deterministic(rng):
    H = random_hermitian(rng, 6)
    a, b = eigh(H), eigh(H)
    np.testing.assert_array_equal(a.eigenvalues, b.eigenvalues)
    np.testing.assert_array_equal(a.eigenvectors, b.eigenvectors)


def test_evolve_spectral_identity_cases(rng):
    H = random_hermitian(rng, 5)
    psi = random_state(rng, 5)
    out = evolve_spectral(H, psi, 0.0)
    assert np.max(np.abs(out - psi)) <= 1e-14
    out = evolve_spectral(np.zeros((5, 5)), psi, 3.7)
    np.testing.assert_allclose(out, psi, atol=1e-14)


def test_rabi_transfer():
    # two coupled sites: psi(t) = cos(Jt) |a> - i sin(Jt) |b>
    J = 1.0
    H = np.array([[0, J], [J, 0]])
    out = evolve_spectral(H, [1, 0], np.pi / 2)
    np.testing.assert_allclose(out, [0, -1j], atol=1e-14)
    for t in (0.3, 1.1, 2.9):
        np.testing.assert_allclose(
            evolve_spectral(H, [1, 0], t), [np.cos(J * t), -1j * np.sin(J * t)], atol=1e-14
        )


def test_evolve_spectral_dimension_mismatch(rng):
    with pytest.raises(ValidationError):
        evolve_spectral(np.eye(3), random_state(rng, 2), 1.0)


def test_evolve_times_matches_single_time(rng):
    H = random_hermitian(rng, 6)
    psi = random_state(rng, 6)
    times = np.linspace(0, 5, 7)
    states = evolve_times(H, psi, times)
    for t, s in zip(times, states):
        np.testing.assert_allclose(s, evolve_spectral(H, psi, t), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    n=st.integers(1, 12),
    t=st.floats(-20, 20, allow_nan=False),
)
def test_unitarity_and_energy_conservation(seed, n, t):
    rng = np.random.default_rng(seed)
    H = random_hermitian(rng, n)
    psi = random_state(rng, n)
    out = evolve_spectral(H, psi, t)
    assert abs(np.linalg.norm(out) - 1) <= 1e-9
    e0 = np.vdot(psi, H @ psi).real
    e1 = np.vdot(out, H @ out).real
    assert abs(e1 - e0) <= 1e-9 * max(1.0, np.max(np.abs(H)))


def test_schedule_constant_generator(rng):
    H = random_hermitian(rng, 4)
    psi = random_state(rng, 4)
    exact = evolve_spectral(H, psi, 2.5)
    for steps in (1, 3, 17):
        out = evolve_schedule(lambda t: H, psi, 0.5, 3.0, steps)
        np.testing.assert_allclose(out, exact, atol=1e-10)


def test_schedule_single_step_is_midpoint(rng):
    A, B = random_hermitian(rng, 3), random_hermitian(rng, 3)
    psi = random_state(rng, 3)

    def H(t):
        return A + t * B

    out = evolve_schedule(H, psi, 1.0, 2.0, 1)
    np.testing.assert_allclose(out, evolve_spectral(H(1.5), psi, 1.0), atol=1e-14)


@pytest.mark.parametrize("steps", [0, -3, 2.5])
def test_schedule_rejects_bad_steps(rng, steps):
    with pytest.raises(ValidationError):
        evolve_schedule(lambda t: np.eye(2), random_state(rng, 2), 0, 1, steps)


def _ramp(N=4):
    spec = ChainSpec(3, N, 1.0, 1.0, np.pi)
    return lambda t: chain_hamiltonian(spec.with_theta(np.pi + 0.39 * t))


def test_schedule_norm_preserved():
    psi0 = np.zeros(12, dtype=complex)
    psi0[3:6] = [0.5, -np.sqrt(2) / 2, 0.5]
    out = evolve_schedule(_ramp(), psi0, 0.0, 2 * np.pi / 0.39, 512)
    assert abs(np.linalg.norm(out) - 1) <= 1e-9


def test_schedule_second_order_convergence():
    # error against a fine reference should drop ~4x per halving of dt
    H = _ramp()
    psi0 = np.zeros(12, dtype=complex)
    psi0[3:6] = [0.5, -np.sqrt(2) / 2, 0.5]
    t1 = 4.0
    ref = evolve_schedule(H, psi0, 0.0, t1, 8192)
    errors = [np.max(np.abs(evolve_schedule(H, psi0, 0.0, t1, s) - ref)) for s in (32, 64, 128)]
    ratios = [errors[i] / errors[i + 1] for i in range(2)]
    for r in ratios:
        assert 3 <= r <= 5, ratios


def test_schedule_vectorized_matches_loop():
    spec = ChainSpec(3, 4, 1.0, 1.0, np.pi)
    psi0 = np.zeros(12, dtype=complex)
    psi0[3:6] = [0.5, -np.sqrt(2) / 2, 0.5]
    looped = evolve_schedule(_ramp(), psi0, 0.3, 5.0, 200)
    batched = evolve_schedule(
        lambda t: chain_hamiltonian_stack(spec, np.pi + 0.39 * t), psi0, 0.3, 5.0, 200, vectorized=True
    )
    np.testing.assert_allclose(batched, looped, atol=1e-12)


def test_schedule_vectorized_checks(rng):
    psi0 = random_state(rng, 3)
    with pytest.raises(ValidationError):
        evolve_schedule(lambda t: np.zeros((len(t), 4, 4)), psi0, 0, 1, 5, vectorized=True)
    A = rng.normal(size=(3, 3))
    with pytest.raises(NonHermitianError):
        evolve_schedule(lambda t: np.broadcast_to(A, (len(t), 3, 3)), psi0, 0, 1, 5, vectorized=True)


def test_schedule_convergence_report():
    psi0 = np.zeros(12, dtype=complex)
    psi0[4] = 1
    rep = schedule_convergence(_ramp(), psi0, 0.0, 3.0, 64)
    assert rep.steps == 64
    assert rep.max_difference == pytest.approx(np.max(np.abs(rep.fine - rep.coarse)))
    assert rep.max_difference < 1e-2
