"""Acceptance suite: one test per release criterion, one printed line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
PASS/FAIL lines and timings. Criteria with a stated runtime budget assert
it after passing.

Known red: the overlap lower bound <P> >= (1-eps)^2 (criterion 10) is
numerically false for the |3>-component test family; the inequality that
its own fidelity-chain derivation supports is <P> >= (1-eps)^4, which
holds with margin (see the companion assertions). The criterion is kept
as stated rather than weakened.
"""

import functools
import math
import time

import numpy as np
import pytest

from conftest import random_density, random_even_pure
from nongauss import channels, conv, measures, oracles, protocol
from nongauss import lincore as lc


def criterion(name, budget=None):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            start = time.perf_counter()
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"[FAIL] {name}")
                raise
            elapsed = time.perf_counter() - start
            print(f"[PASS] {name} ({elapsed:.2f}s)")
            if budget is not None:
                assert elapsed < budget, f"runtime {elapsed:.2f}s over {budget}s budget"
        return wrapper
    return deco


@criterion("01 Fock self-convolution |1>[+]|1> = (|0><0|+|2><2|)/2 @ 1e-12", budget=1.0)
def test_c01_fock_selfconv():
    out = conv.boxplus(lc.fock_state(1, 2), lc.fock_state(1, 2))
    want = np.diag(np.array([0.5, 0.0, 0.5], dtype=complex))
    assert np.abs(out.matrix - want).max() < 1e-12


@criterion("02 NGE_{2,1}(|n>) matches closed form, n=0..6 @ 1e-9", budget=5.0)
def test_c02_nge_closed_form():
    for n in range(7):
        sim = measures.nge(lc.fock_state(n, n + 1), 2.0, 1)
        assert sim.diagnostics["conv_cutoffs"][0] >= 2 * n + 1
        assert abs(sim.value - oracles.nge_fock_closed_form(n, 2.0)) < 1e-9


@criterion("03 parity identity Tr(rho sigma) = Tr[(rho[-]sigma)P], 50 pairs d=12 @ 1e-8",
           budget=30.0)
def test_c03_parity_identity(rng):
    for _ in range(50):
        rho = random_density(rng, 12, rank=4)
        sigma = random_density(rng, 12, rank=4)
        direct = float(np.trace(rho.matrix @ sigma.matrix).real)
        assert abs(direct - conv.overlap_via_parity(rho, sigma)) < 1e-8


@criterion("04 faithfulness on coherent/thermal/squeezed; <P>(|1>) = 1/2 @ 1e-10")
def test_c04_faithfulness():
    for z in (0.5, 1.2, 2.0):
        psi = protocol.build_state("coherent", z, None)
        assert measures.nge(psi, 2.0, 1).value < 1e-6
        assert measures.d_frobenius(psi.to_density_matrix()).value < 1e-5
        assert measures.ming(psi.to_density_matrix(), 1.0).value < 1e-5
    for nbar, d in ((0.3, 26), (1.0, 42)):
        th = lc.thermal_state(nbar, d)
        assert measures.d_frobenius(th).value < 1e-5
        assert measures.ming(th, 1.0).value < 1e-5
    sq = lc.squeezed_vacuum(0.4, 36)
    assert measures.nge(sq, 2.0, 1).value < 1e-6
    assert measures.d_frobenius(sq.to_density_matrix()).value < 1e-5
    assert measures.ming(sq.to_density_matrix(), 1.0).value < 1e-5
    assert abs(measures.average_parity(lc.fock_state(1, 2)) - 0.5) < 1e-10


@criterion("05 lossy-cat oracle equality on z x gamma grid @ 1e-6", budget=120.0)
def test_c05_cat_oracle_grid():
    for z in (0.5, 1.0, 2.0):
        d = protocol.auto_cutoff("cat", z)
        assert d <= 40
        psi = lc.cat_state(z, +1, d)
        for gamma in (0.0, 0.25, 0.5, 0.75):
            rho = channels.loss_channel(gamma).apply(psi)
            assert abs(measures.ming(rho, 1.0).value
                       - oracles.ming_lossy_cat(z, gamma)) < 1e-6
            assert abs(measures.d_frobenius(rho).value
                       - oracles.df_lossy_cat(z, gamma)) < 1e-6


@criterion("06 asymptotics at z=4: d_F -> sqrt(3/4), MING -> 2; d_F -> 3/8 at gamma=1/2")
def test_c06_asymptotics():
    psi = lc.cat_state(4.0, +1, 52)
    assert abs(measures.d_frobenius(psi.to_density_matrix()).value
               - math.sqrt(3.0 / 4.0)) < 1e-4
    assert abs(measures.ming(psi.to_density_matrix(), 1.0).value - 2.0) < 1e-4
    lossy = channels.loss_channel(0.5).apply(psi)
    assert abs(measures.d_frobenius(lossy).value - 3.0 / 8.0) < 2e-3


@criterion("07 lossy-Fock oracle equality, n<=6, gamma in {0.1,0.3,0.6} @ 1e-6")
def test_c07_lossy_fock():
    for n in range(7):
        for gamma in (0.1, 0.3, 0.6):
            rho = channels.loss_channel(gamma).apply(lc.fock_state(n, n + 1))
            assert abs(measures.ming(rho, 1.0).value
                       - oracles.ming_lossy_fock(n, gamma)) < 1e-6


@criterion("08 channel algebra: six identities @ 1e-7 (Q=21); Kraus = ancilla @ 1e-9")
def test_c08_channel_algebra(rng):
    sig_d, sig_p, gamma = 0.03, 0.05, 0.15
    for _ in range(20):
        rho = conv.embed_dm(random_density(rng, 6), (16,))
        disp = channels.displacement_noise_channel(sig_d, 21)
        disp2 = channels.displacement_noise_channel(0.02, 21)
        deph = channels.dephasing_channel(sig_p)
        deph2 = channels.dephasing_channel(0.07)
        loss = channels.loss_channel(gamma)
        loss2 = channels.loss_channel(0.2)
        pairs = [
            (disp.apply(deph.apply(rho)), deph.apply(disp.apply(rho))),
            (loss.apply(deph.apply(rho)), deph.apply(loss.apply(rho))),
            (loss.apply(disp.apply(rho)),
             channels.displacement_noise_channel((1 - gamma) * sig_d, 21).apply(
                 loss.apply(rho))),
            (disp.apply(disp2.apply(rho)),
             channels.displacement_noise_channel(sig_d + 0.02, 21).apply(rho)),
            (deph.apply(deph2.apply(rho)),
             channels.dephasing_channel(sig_p + 0.07).apply(rho)),
            (loss.apply(loss2.apply(rho)),
             channels.loss_channel(gamma + 0.2 - gamma * 0.2).apply(rho)),
        ]
        for lhs, rhs in pairs:
            assert np.abs(lhs.matrix - rhs.matrix).max() < 1e-7
    for gamma_x in (0.2, 0.7):
        rho = random_density(rng, 8)
        kraus = channels.loss_channel(gamma_x).apply(rho)
        ancilla = channels.loss_via_ancilla(rho, gamma_x)
        assert np.abs(kraus.matrix - ancilla.matrix).max() < 1e-9


@criterion("09 protocol: zero-noise = 2^-NGE @ 1e-9; eps_p exact; staged = literal @ 1e-9")
def test_c09_protocol_consistency():
    for psi in (lc.fock_state(1, 2), lc.cat_state(1.0, +1, 14),
                lc.coherent_state(1.0, 14)):
        circuit = protocol.run_nge21_protocol(psi, protocol.NoiseConfig())
        assert abs(circuit - 2.0 ** (-measures.nge(psi, 2.0, 1).value)) < 1e-9
    one = lc.fock_state(1, 2)
    base = protocol.run_nge21_protocol(one, protocol.NoiseConfig())
    for eps_p in (0.05, 0.25):
        out = protocol.run_nge21_protocol(one, protocol.NoiseConfig(eps_p=eps_p))
        assert abs(out - base * (1 - 2 * eps_p)) < 1e-14
    noise = protocol.NoiseConfig(sigma_p_sq=0.04, gamma_l=0.1, sigma_b_sq=0.0025,
                                 eps_p=0.02, quad_order=11)
    plus = lc.PureState(lc.single_mode(2), np.array([1.0, 1.0]) / math.sqrt(2))
    for psi in (one, plus):
        staged = protocol.run_nge21_protocol(psi, noise)
        literal = protocol.nge21_literal_four_mode(psi, noise, cutoff=5)
        assert abs(staged - literal) < 1e-9


@criterion("10 overlap bound <P> >= (1-eps)^2 on sqrt(1-eps)|0> + sqrt(eps)|3>")
def test_c10_overlap_bound():
    # KNOWN RED. The chain <P> >= <phi'|psi[+]psi|phi'>^2 with
    # <phi'|psi[+]psi|phi'> >= (1-eps)^2 supports only (1-eps)^4; the
    # squared form fails on this family at every tested eps
    # (e.g. eps=0.01: <P> = 0.970667... < 0.9801).
    for eps in (0.01, 0.05, 0.1, 0.2):
        amp = np.zeros(4, dtype=complex)
        amp[0] = math.sqrt(1 - eps)
        amp[3] = math.sqrt(eps)
        psi = lc.PureState(lc.single_mode(4), amp)
        par = measures.average_parity(psi)
        assert par >= (1 - eps) ** 4 - 1e-10  # provable form: holds
        assert par >= (1 - eps) ** 2 - 1e-10  # stated form: fails


@criterion("11 proposition suites: additivity, subadditivity, invariance, monotonicity")
def test_c11_propositions():
    # NGE additivity on tensor products @ 1e-7
    one = lc.fock_state(1, 2)
    cat = lc.cat_state(1.0, +1, 14)
    for a, b in [(one, one), (one, cat), (cat, cat)]:
        joint = lc.tensor(a, b)
        lhs = measures.nge(joint, 2.0, 1).value
        rhs = measures.nge(a, 2.0, 1).value + measures.nge(b, 2.0, 1).value
        assert abs(lhs - rhs) < 1e-7
    # d_F subadditivity @ 1e-9 slack
    rho_a = one.to_density_matrix()
    rho_b = channels.loss_channel(0.4).apply(lc.cat_state(0.8, +1, 12))
    assert (measures.d_frobenius(lc.tensor(rho_a, rho_b)).value
            <= measures.d_frobenius(rho_a).value
            + measures.d_frobenius(rho_b).value + 1e-9)
    # Gaussian invariance under displacement / rotation @ 1e-6
    psi = conv.embed_pure(lc.fock_state(1, 2), (24,))
    base_nge = measures.nge(psi, 2.0, 1).value
    disp = lc.displacement_operator(0.5, 24)
    rot = lc.phase_rotation(0.8, 24)
    for u in (disp, rot):
        moved = lc.PureState(psi.spec, u @ psi.amplitudes)
        assert abs(measures.nge(moved, 2.0, 1).value - base_nge) < 1e-6
    catp = conv.embed_pure(lc.cat_state(1.0, +1, 14), (26,))
    base_df = measures.d_frobenius(catp.to_density_matrix()).value
    for u in (lc.displacement_operator(0.4, 26), lc.phase_rotation(1.1, 26)):
        moved = lc.PureState(catp.spec, u @ catp.amplitudes)
        assert abs(measures.d_frobenius(moved.to_density_matrix()).value
                   - base_df) < 1e-6
    # MING loss-monotonicity on Fock and cat inputs @ 1e-7 slack
    for psi0 in (lc.fock_state(2, 3), lc.cat_state(1.0, +1, 16)):
        prev = measures.ming(psi0.to_density_matrix(), 1.0).value
        for gamma in (0.1, 0.3, 0.5, 0.7, 0.9):
            val = measures.ming(channels.loss_channel(gamma).apply(psi0), 1.0).value
            assert val <= prev + 1e-7
            prev = val
    # d_F loss-non-monotonicity witness (pinned regression): extra loss on
    # the gamma=0.6 lossy |12> strictly increases d_F
    fock12 = lc.fock_state(12, 13)
    low = measures.d_frobenius(channels.loss_channel(0.6).apply(fock12)).value
    high = measures.d_frobenius(channels.loss_channel(0.75).apply(fock12)).value
    assert abs(low - 0.14557274305600693) < 1e-9
    assert abs(high - 0.15124009676177555) < 1e-9
    assert high > low + 5e-3


@criterion("12 zero-mean protocol: <P~>(|1>) = 0; <P~> <= sqrt(<P>) on 20 states")
def test_c12_zero_mean(rng):
    assert abs(protocol.run_zero_mean_protocol(lc.fock_state(1, 2),
                                               protocol.NoiseConfig())) < 1e-14
    for _ in range(20):
        psi = random_even_pure(rng, 10)
        val = measures.zero_mean_parity(psi)
        par = measures.average_parity(psi)
        assert val <= math.sqrt(par) + 1e-9
