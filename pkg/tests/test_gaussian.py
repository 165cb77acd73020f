"""Moments formalism: symplectic algebra, characteristic functions, witnesses."""

import math

import numpy as np
import pytest
import scipy.linalg

from conftest import random_density
from nongauss import conv, gaussian
from nongauss import lincore as lc
from nongauss.errors import CutoffError


def random_symplectic(rng, n_modes):
    """exp(Omega H) with symmetric H is symplectic."""
    n2 = 2 * n_modes
    h = rng.normal(size=(n2, n2)) * 0.4
    h = h + h.T
    return scipy.linalg.expm(gaussian.omega(n_modes) @ h)


def random_moments(rng, n_modes):
    n2 = 2 * n_modes
    m = rng.normal(size=(n2, n2)) * 0.5
    cov = m @ m.T + 0.5 * np.eye(n2)
    return gaussian.GaussianMoments(rng.normal(size=n2), cov)


def random_channel(rng, n_modes):
    n2 = 2 * n_modes
    t = 0.6 * rng.normal(size=(n2, n2))
    w = gaussian.omega(n_modes)
    # N must absorb the symplectic defect of T: take the worst eigenvalue
    h = 0.5j * (t @ w @ t.T) - 0.5j * w
    lam = float(np.linalg.eigvalsh(0.5 * (h + h.conj().T)).max())
    m = 0.3 * rng.normal(size=(n2, n2))
    nmat = m @ m.T + (abs(lam) + 0.1) * np.eye(n2)
    return gaussian.GaussianChannelParams(t, rng.normal(size=n2), nmat)


class TestOmega:
    def test_single_mode(self):
        assert np.array_equal(gaussian.omega(1), np.array([[0.0, 1.0], [-1.0, 0.0]]))

    def test_square_is_minus_identity(self):
        w = gaussian.omega(3)
        assert np.abs(w @ w + np.eye(6)).max() == 0.0

    def test_antisymmetric(self):
        w = gaussian.omega(2)
        assert np.abs(w + w.T).max() == 0.0


class TestMomentsFromState:
    def test_vacuum(self):
        m = gaussian.moments_from_state(lc.fock_state(0, 8))
        assert np.abs(m.mean).max() < 1e-12
        assert np.abs(m.cov - 0.5 * np.eye(2)).max() < 1e-12

    def test_coherent_real(self):
        m = gaussian.moments_from_state(lc.coherent_state(1.0, 20))
        assert abs(m.mean[0] - math.sqrt(2.0)) < 1e-9
        assert abs(m.mean[1]) < 1e-9
        assert np.abs(m.cov - 0.5 * np.eye(2)).max() < 1e-8

    def test_fock_one(self):
        m = gaussian.moments_from_state(lc.fock_state(1, 8))
        assert np.abs(m.mean).max() < 1e-12
        assert np.abs(m.cov - 1.5 * np.eye(2)).max() < 1e-12

    def test_leakage_gate(self):
        psi = lc.coherent_state(1.0, 13)
        with pytest.raises(lc.LeakageError):
            gaussian.moments_from_state(psi, tol_trunc=1e-12)


class TestSymplectic:
    def test_identity_map(self, rng):
        m = random_moments(rng, 1)
        g = gaussian.SymplecticMap(np.eye(2), np.zeros(2))
        out = gaussian.apply_symplectic(m, g)
        assert np.abs(out.mean - m.mean).max() == 0.0

    def test_pure_displacement(self, rng):
        m = random_moments(rng, 1)
        g = gaussian.SymplecticMap(np.eye(2), np.array([0.3, -0.7]))
        out = gaussian.apply_symplectic(m, g)
        assert np.abs(out.mean - (m.mean + g.d)).max() < 1e-14
        assert np.abs(out.cov - m.cov).max() == 0.0

    def test_balanced_splitter_means(self, rng):
        ma, mb = random_moments(rng, 1), random_moments(rng, 1)
        joint = gaussian.tensor_moments(ma, mb)
        bs = gaussian.beamsplitter_symplectic(math.pi / 4.0, 1)
        out = gaussian.apply_symplectic(joint, bs)
        want_a = (ma.mean + mb.mean) / math.sqrt(2.0)
        want_b = (mb.mean - ma.mean) / math.sqrt(2.0)
        assert np.abs(out.mean[:2] - want_a).max() < 1e-12
        assert np.abs(out.mean[2:] - want_b).max() < 1e-12

    def test_theta_zero_identity(self):
        bs = gaussian.beamsplitter_symplectic(0.0, 2)
        assert np.abs(bs.s - np.eye(8)).max() == 0.0

    def test_rotation_composition(self, rng):
        m = random_moments(rng, 2)
        quarter = gaussian.beamsplitter_symplectic(math.pi / 4.0, 1)
        half = gaussian.beamsplitter_symplectic(math.pi / 2.0, 1)
        twice = gaussian.apply_symplectic(gaussian.apply_symplectic(m, quarter), quarter)
        once = gaussian.apply_symplectic(m, half)
        assert np.abs(twice.mean - once.mean).max() < 1e-12
        assert np.abs(twice.cov - once.cov).max() < 1e-12

    def test_symplectic_condition_on_grid(self):
        for theta in np.arange(0.1, 1.6, 0.2):
            gaussian.beamsplitter_symplectic(float(theta), 1)  # validates in ctor

    def test_nonsymplectic_rejected(self):
        with pytest.raises(ValueError, match="symplectic"):
            gaussian.SymplecticMap(np.diag([2.0, 2.0]), np.zeros(2))

    def test_uncertainty_preserved(self, rng):
        for _ in range(10):
            m = random_moments(rng, 2)
            s = random_symplectic(rng, 2)
            gaussian.apply_symplectic(m, gaussian.SymplecticMap(s, np.zeros(4)))


class TestCharacteristicFunction:
    def test_xi_zero_is_trace(self, rng):
        rho = random_density(rng, 6)
        assert abs(gaussian.characteristic_function(rho, [0.0, 0.0]) - 1.0) < 1e-12

    def test_vacuum_closed_form(self):
        vac = lc.fock_state(0, 25)
        for xi in ([1.0, 0.0], [0.4, -0.8], [0.0, 1.3]):
            got = gaussian.characteristic_function(vac, xi)
            want = math.exp(-0.25 * float(np.dot(xi, xi)))
            assert abs(got - want) < 1e-10

    def test_gaussian_form_plugin(self):
        m = gaussian.GaussianMoments(np.zeros(2), 0.5 * np.eye(2))
        assert abs(gaussian.gaussian_char_fn(m, [1.0, 0.0]) - math.exp(-0.25)) < 1e-14

    def test_mean_shift_is_phase(self, rng):
        cov = 0.5 * np.eye(2)
        xi = np.array([0.7, -0.2])
        base = gaussian.gaussian_char_fn(gaussian.GaussianMoments(np.zeros(2), cov), xi)
        shifted = gaussian.gaussian_char_fn(
            gaussian.GaussianMoments(np.array([1.1, 0.4]), cov), xi)
        assert abs(abs(shifted) - abs(base)) < 1e-14

    def test_matches_fock_route_on_coherent(self):
        psi = lc.coherent_state(0.8 + 0.3j, 25)
        m = gaussian.moments_from_state(psi)
        for xi in ([0.5, 0.1], [-0.3, 0.9]):
            got = gaussian.characteristic_function(psi, xi)
            want = gaussian.gaussian_char_fn(m, xi)
            assert abs(got - want) < 1e-8

    def test_inadequate_cutoff(self):
        with pytest.raises(CutoffError):
            gaussian.characteristic_function(lc.fock_state(0, 4), [6.0, 0.0])

    def test_convolution_identities(self, rng):
        # char fn of the sum arm factorizes; of the difference arm mirrors.
        # random low-dim states are embedded with headroom so the truncated
        # displacement operators act exactly on their support
        xi_list = rng.normal(size=(20, 2)) * 0.8
        for _ in range(5):
            rho = conv.embed_dm(random_density(rng, 5), (14,))
            big = conv.boxplus(rho, rho)
            small = conv.boxminus(rho, rho)
            for xi in xi_list:
                base_p = gaussian.characteristic_function(rho, xi / math.sqrt(2))
                base_m = gaussian.characteristic_function(rho, -xi / math.sqrt(2))
                assert abs(gaussian.characteristic_function(big, xi)
                           - base_p * base_p) < 1e-7
                assert abs(gaussian.characteristic_function(small, xi)
                           - base_p * base_m) < 1e-7


class TestGaussianChannels:
    def test_loss_vacuum_fixed_point(self):
        gamma = 0.37
        p = gaussian.GaussianChannelParams(
            math.sqrt(1 - gamma) * np.eye(2), np.zeros(2), (gamma / 2) * np.eye(2))
        m = gaussian.GaussianMoments(np.zeros(2), 0.5 * np.eye(2))
        out = gaussian.gaussian_channel_on_moments(m, p)
        assert np.abs(out.cov - 0.5 * np.eye(2)).max() < 1e-14

    def test_zero_loss_identity(self, rng):
        m = random_moments(rng, 1)
        p = gaussian.GaussianChannelParams(np.eye(2), np.zeros(2), np.zeros((2, 2)))
        out = gaussian.gaussian_channel_on_moments(m, p)
        assert np.abs(out.cov - m.cov).max() == 0.0

    def test_matches_fock_route_on_fock_two(self):
        from nongauss import channels
        gamma = 0.3
        rho = channels.loss_channel(gamma).apply(lc.fock_state(2, 12))
        fock_m = gaussian.moments_from_state(rho)
        p = gaussian.GaussianChannelParams(
            math.sqrt(1 - gamma) * np.eye(2), np.zeros(2), (gamma / 2) * np.eye(2))
        want = gaussian.gaussian_channel_on_moments(
            gaussian.moments_from_state(lc.fock_state(2, 12)), p)
        assert np.abs(fock_m.mean - want.mean).max() < 1e-9
        assert np.abs(fock_m.cov - want.cov).max() < 1e-9

    def test_cp_violation_rejected(self):
        with pytest.raises(ValueError, match="positivity"):
            gaussian.GaussianChannelParams(2.0 * np.eye(2), np.zeros(2),
                                           np.zeros((2, 2)))


class TestCommutationWitnesses:
    def test_zero_displacement_trivial(self, rng):
        s = random_symplectic(rng, 1)
        g = gaussian.SymplecticMap(s, np.zeros(2))
        g1, g2 = gaussian.commutation_witness_unitary(g)
        assert np.abs(g1.s - s).max() == 0.0
        assert np.abs(g1.d).max() == 0.0 and np.abs(g2.d).max() == 0.0

    def test_pure_displacement(self):
        d = np.array([0.4, -0.9])
        g = gaussian.SymplecticMap(np.eye(2), d)
        g1, g2 = gaussian.commutation_witness_unitary(g)
        assert np.abs(g1.d - math.sqrt(2) * d).max() < 1e-14
        assert np.abs(g2.d).max() == 0.0

    def test_unitary_identity_random(self, rng):
        bs = gaussian.beamsplitter_symplectic(math.pi / 4.0, 1)
        for _ in range(100):
            s = random_symplectic(rng, 1)
            g = gaussian.SymplecticMap(s, rng.normal(size=2))
            g1, g2 = gaussian.commutation_witness_unitary(g)
            joint = random_moments(rng, 2)
            both = gaussian.SymplecticMap(scipy.linalg.block_diag(g.s, g.s),
                                          np.concatenate([g.d, g.d]))
            lhs = gaussian.apply_symplectic(gaussian.apply_symplectic(joint, both), bs)
            arms = gaussian.SymplecticMap(scipy.linalg.block_diag(g1.s, g2.s),
                                          np.concatenate([g1.d, g2.d]))
            rhs = gaussian.apply_symplectic(gaussian.apply_symplectic(joint, bs), arms)
            assert np.abs(lhs.mean - rhs.mean).max() < 1e-9
            assert np.abs(lhs.cov - rhs.cov).max() < 1e-9

    def test_channel_identity_random(self, rng):
        bs = gaussian.beamsplitter_symplectic(math.pi / 4.0, 1)
        for _ in range(100):
            p = random_channel(rng, 1)
            p1, p2 = gaussian.commutation_witness_channel(p)
            joint = random_moments(rng, 2)
            after_both = gaussian.apply_channels_to_joint(joint, p, p)
            lhs = gaussian.apply_symplectic(after_both, bs)
            rhs = gaussian.apply_channels_to_joint(
                gaussian.apply_symplectic(joint, bs), p1, p2)
            assert np.abs(lhs.mean - rhs.mean).max() < 1e-9
            assert np.abs(lhs.cov - rhs.cov).max() < 1e-9

    def test_loss_commutes_with_splitter(self, rng):
        gamma = 0.25
        p = gaussian.GaussianChannelParams(
            math.sqrt(1 - gamma) * np.eye(2), np.zeros(2), (gamma / 2) * np.eye(2))
        p1, p2 = gaussian.commutation_witness_channel(p)
        assert np.abs(p1.t - p.t).max() == 0.0
        assert np.abs(p1.d).max() == 0.0  # sqrt(2) * 0


class TestFockGaussianConsistency:
    def test_displacement_moments(self):
        alpha = 0.6 - 0.4j
        d = 30
        disp = lc.displacement_operator(alpha, d)
        psi = lc.fock_state(1, d)
        moved = lc.PureState(lc.single_mode(d), disp @ psi.amplitudes, leakage=0.0)
        got = gaussian.moments_from_state(moved)
        g = gaussian.SymplecticMap(
            np.eye(2), math.sqrt(2) * np.array([alpha.real, alpha.imag]))
        want = gaussian.apply_symplectic(gaussian.moments_from_state(psi), g)
        assert np.abs(got.mean - want.mean).max() < 1e-7
        assert np.abs(got.cov - want.cov).max() < 1e-7

    def test_beamsplitter_moments(self):
        a = lc.coherent_state(0.7, 18)
        b = lc.coherent_state(-0.2 + 0.5j, 18)
        cp = conv.convolved_pair(a, b)
        joint_after = gaussian.tensor_moments(
            gaussian.moments_from_state(cp.marginal_a()),
            gaussian.moments_from_state(cp.marginal_b()))
        joint_before = gaussian.tensor_moments(
            gaussian.moments_from_state(a), gaussian.moments_from_state(b))
        bs = gaussian.beamsplitter_symplectic(math.pi / 4.0, 1)
        want = gaussian.apply_symplectic(joint_before, bs)
        # coherent inputs stay product, so comparing block moments is exact
        assert np.abs(joint_after.mean - want.mean).max() < 1e-7
        assert np.abs(joint_after.cov - want.cov).max() < 1e-7
