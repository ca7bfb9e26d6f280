import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topochain.errors import ValidationError
from topochain.model import (
    PAULI_X,
    PAULI_Y,
    ChainSpec,
    CouplingProfile,
    DisorderSpec,
    apply_disorder,
    bloch_hamiltonian,
    build_couplings,
    chain_hamiltonian,
    chain_hamiltonian_stack,
    coupling_law,
    disorder_deltas,
    gell_mann,
    realspace_hamiltonian,
)

COS_01PI = math.cos(0.1 * math.pi)  # 0.9510565162951535


class TestChainSpec:
    def test_sizes(self):
        s = ChainSpec(3, 6)
        assert s.L == 18
        assert s.n_bonds == 17
        assert ChainSpec(3, 6, boundary="periodic").n_bonds == 18

    @pytest.mark.parametrize(
        "kwargs",
        [dict(p=1, N=3), dict(p=2, N=0), dict(p=2.5, N=2), dict(p=2, N=2, boundary="ring"),
         dict(p=2, N=2, theta=float("nan"))],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValidationError):
            ChainSpec(**kwargs)

    def test_site_index_convention(self):
        s = ChainSpec(3, 6)
        assert s.site_index(3, 2) == 8
        assert s.site_index(1, 1) == 1
        assert s.site_index(6, 3) == 18
        with pytest.raises(ValidationError):
            s.site_index(7, 1)
        with pytest.raises(ValidationError):
            s.site_index(1, 4)


class TestCouplings:
    def test_p2_theta0(self):
        prof = build_couplings(ChainSpec(2, 3, 1.0, 1.0, 0.0))
        np.testing.assert_array_equal(prof.bonds, [0, 2, 0, 2, 0])

    def test_p3_theta_pi(self):
        prof = build_couplings(ChainSpec(3, 2, 1.0, 1.0, math.pi))
        np.testing.assert_allclose(prof.bonds, [1.5, 1.5, 0, 1.5, 1.5], atol=1e-15)

    def test_p2_theta_01pi(self):
        prof = build_couplings(ChainSpec(2, 2, 1.0, 1.0, 0.1 * math.pi))
        J1, J2 = 1 - COS_01PI, 1 + COS_01PI
        np.testing.assert_allclose(prof.bonds, [J1, J2, J1], atol=1e-15)
        np.testing.assert_allclose(prof.bonds, [0.048943, 1.951057, 0.048943], atol=1e-6)

    @pytest.mark.parametrize("theta", [0.0, 0.3, 1.7, math.pi])
    def test_two_site_form(self, theta):
        # J_i = g0 + (-1)^i g1 cos(theta)
        g0, g1 = 0.7, 1.3
        J = build_couplings(ChainSpec(2, 1, g0, g1, theta, "periodic")).bonds
        np.testing.assert_allclose(J, [g0 - g1 * math.cos(theta), g0 + g1 * math.cos(theta)],
                                   atol=1e-14)

    @settings(max_examples=50, deadline=None)
    @given(p=st.integers(2, 7), theta=st.floats(-10, 10), g0=st.floats(-3, 3), g1=st.floats(-3, 3))
    def test_periodicity_exact(self, p, theta, g0, g1):
        k = np.arange(1, 3 * p + 1)
        J = coupling_law(k, p, g0, g1, theta)
        np.testing.assert_array_equal(J[p:], J[:-p])


class TestDisorder:
    def test_zero_w_is_identity(self):
        prof = build_couplings(ChainSpec(2, 4, theta=0.3))
        out = apply_disorder(prof, DisorderSpec(0.0, seed=123, samples=3), 2)
        np.testing.assert_array_equal(out.bonds, prof.bonds)

    def test_deterministic(self):
        prof = build_couplings(ChainSpec(3, 4))
        d = DisorderSpec(0.2, seed=99, samples=5)
        a = apply_disorder(prof, d, 3)
        b = apply_disorder(prof, d, 3)
        np.testing.assert_array_equal(a.bonds, b.bonds)
        c = apply_disorder(prof, d, 4)
        assert not np.array_equal(a.bonds, c.bonds)

    def test_bond_key_independent_of_length(self):
        short = disorder_deltas(7, 2, 5)
        long = disorder_deltas(7, 2, 50)
        np.testing.assert_array_equal(short, long[:5])

    def test_offsets_bounded(self):
        prof = build_couplings(ChainSpec(2, 10))
        d = DisorderSpec(0.2, seed=1, samples=1)
        diff = apply_disorder(prof, d, 0).bonds - prof.bonds
        assert np.all(np.abs(diff) <= 0.1 + 1e-15)

    def test_uniform_statistics(self):
        draws = np.concatenate([disorder_deltas(11, i, 1000) for i in range(100)])
        assert draws.size == 10**5
        assert abs(draws.mean()) <= 0.005
        assert draws.min() >= -0.5 and draws.max() <= 0.5
        # variance of U(-1/2, 1/2) is 1/12
        assert draws.var() == pytest.approx(1 / 12, rel=0.02)

    def test_sample_index_range(self):
        prof = build_couplings(ChainSpec(2, 2))
        with pytest.raises(ValidationError):
            apply_disorder(prof, DisorderSpec(0.1, 0, 3), 3)
        with pytest.raises(ValidationError):
            apply_disorder(prof, DisorderSpec(0.1, 0, 3), -1)

    @pytest.mark.parametrize("kw", [dict(W=-0.1), dict(samples=0), dict(seed=-1), dict(seed=2**64)])
    def test_invalid_spec(self, kw):
        with pytest.raises(ValidationError):
            DisorderSpec(**kw)


class TestRealSpace:
    def test_single_bond(self):
        H = realspace_hamiltonian(CouplingProfile([1.0]), 2)
        np.testing.assert_array_equal(H, [[0, 1], [1, 0]])

    def test_tridiagonal(self):
        prof = build_couplings(ChainSpec(2, 2, 1, 1, 0.1 * math.pi))
        H = realspace_hamiltonian(prof, 4)
        np.testing.assert_allclose(np.diag(H, 1), [1 - COS_01PI, 1 + COS_01PI, 1 - COS_01PI])
        np.testing.assert_array_equal(np.diag(H), 0)
        np.testing.assert_array_equal(H, H.T)
        assert np.count_nonzero(H) == 6

    def test_ring_spectrum(self):
        # cycle graph C_3: eigenvalues 2 cos(2 pi m / 3)
        H = realspace_hamiltonian(CouplingProfile([1, 1, 1], "periodic"), 3)
        oracle = np.sort([2 * math.cos(2 * math.pi * m / 3) for m in range(3)])
        np.testing.assert_allclose(np.linalg.eigvalsh(H), oracle, atol=1e-12)
        np.testing.assert_allclose(np.linalg.eigvalsh(H), [-1, -1, 2], atol=1e-12)

    @pytest.mark.parametrize("boundary", ["open", "periodic"])
    def test_stack_matches_single(self, boundary, rng):
        spec = ChainSpec(3, 4, 0.7, 1.0, 0.0, boundary)
        thetas = rng.uniform(0, 2 * math.pi, 9)
        offsets = rng.uniform(-0.1, 0.1, spec.n_bonds)
        stack = chain_hamiltonian_stack(spec, thetas, offsets)
        assert stack.shape == (9, 12, 12)
        for th, H in zip(thetas, stack):
            np.testing.assert_allclose(H, chain_hamiltonian(spec.with_theta(th), offsets), atol=1e-15)

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            realspace_hamiltonian(CouplingProfile([1.0, 2.0]), 4)
        with pytest.raises(ValidationError):
            realspace_hamiltonian(CouplingProfile([1.0, 2.0], "periodic"), 3)


class TestBloch:
    def test_gap_closes_at_critical_point(self):
        # J1 = J2 = 1: g0 = 1, g1 cos(theta) = 0
        spec = ChainSpec(2, 1, 1.0, 1.0, math.pi / 2)
        h = bloch_hamiltonian(spec, math.pi)
        np.testing.assert_allclose(np.linalg.eigvalsh(h), [0, 0], atol=1e-15)

    def test_q0_gap(self):
        spec = ChainSpec(2, 1, 1.0, 1.0, 0.1 * math.pi)
        np.testing.assert_allclose(np.linalg.eigvalsh(bloch_hamiltonian(spec, 0.0)), [-2, 2],
                                   atol=1e-14)

    @pytest.mark.parametrize("q", [0.0, 0.7, 2.0, 4.4])
    def test_isolated_trimer_flat(self, q):
        spec = ChainSpec(3, 1, 1.0, 1.0, math.pi)
        E = np.linalg.eigvalsh(bloch_hamiltonian(spec, q))
        np.testing.assert_allclose(E, [-1.5 * math.sqrt(2), 0, 1.5 * math.sqrt(2)], atol=1e-12)

    def test_theta_argument_overrides_spec(self):
        spec = ChainSpec(3, 1, 1.0, 1.0, 0.0)
        np.testing.assert_array_equal(
            bloch_hamiltonian(spec, 0.4, math.pi), bloch_hamiltonian(spec.with_theta(math.pi), 0.4)
        )

    def test_pauli_form(self, rng):
        for _ in range(100):
            g0, g1 = rng.uniform(-2, 2, 2)
            theta, q = rng.uniform(0, 2 * math.pi, 2)
            spec = ChainSpec(2, 1, g0, g1, theta)
            J1 = g0 - g1 * math.cos(theta)
            J2 = g0 + g1 * math.cos(theta)
            dx, dy = J1 + J2 * math.cos(q), J2 * math.sin(q)
            np.testing.assert_allclose(
                bloch_hamiltonian(spec, q), dx * PAULI_X + dy * PAULI_Y, atol=1e-12, rtol=0
            )

    def test_gell_mann_form(self, rng):
        # h1 S1 + h4 S4 + h5 S5 + h6 S6 with h4 = J3 cos k, h5 = -J3 sin k; k = -q
        S = gell_mann()
        for _ in range(100):
            g0, g1 = rng.uniform(-2, 2, 2)
            theta, q = rng.uniform(0, 2 * math.pi, 2)
            J1, J2, J3 = (g0 + g1 * math.cos(2 * math.pi * s / 3 + theta) for s in (1, 2, 3))
            k = -q
            h = J1 * S[0] + J3 * math.cos(k) * S[3] - J3 * math.sin(k) * S[4] + J2 * S[5]
            np.testing.assert_allclose(
                bloch_hamiltonian(ChainSpec(3, 1, g0, g1, theta), q), h, atol=1e-12, rtol=0
            )

    def test_gell_mann_algebra(self):
        S = gell_mann()
        for i in range(8):
            np.testing.assert_allclose(S[i], S[i].conj().T)
            assert abs(np.trace(S[i])) < 1e-15
            for j in range(8):
                assert np.trace(S[i] @ S[j]) == pytest.approx(2.0 * (i == j), abs=1e-14)

    @pytest.mark.parametrize("p,N", [(2, 5), (3, 6), (4, 3), (5, 4)])
    def test_bloch_matches_periodic_realspace(self, rng, p, N):
        g0, g1, theta = rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0, 6.28)
        spec = ChainSpec(p, N, g0, g1, theta, "periodic")
        real = np.linalg.eigvalsh(realspace_hamiltonian(build_couplings(spec), spec.L))
        bloch = np.sort(
            np.concatenate(
                [np.linalg.eigvalsh(bloch_hamiltonian(spec, 2 * np.pi * m / N)) for m in range(N)]
            )
        )
        np.testing.assert_allclose(bloch, real, atol=1e-9)
