# -*- coding: utf-8 -*-
"""Test group channel estimation and RAR beamforming."""

import math
import unittest

import numpy as np
import numpy.testing as npt

from app.config import settings
from app.services.beamformer import (
    GroupChannelEstimate,
    SinrComponents,
    cir_to_frequency,
    contributing_energy,
    decompose_worst_case,
    estimate_group_cir,
    group_signal_energy,
    long_term_sinr,
    measure_instantaneous_sinr,
    precode,
    receive_downlink,
    upsilon,
)
from app.services.channel import UserRealization, draw_cir, synthesize_uplink
from app.services.detector import DetectedGroup, correlate
from app.services.preamble import build_frame, root_zc
from app.services.sysparams import derive

NOISELESS = {"power": {"pu_db": -16.9, "pt_db": -16.9, "noiseless": True}}


def uplink_bank(params, users, root):
    frames = [build_frame(root, params.shift(u.preamble_idx), params.guard) for u in users]
    rng = None if params.noiseless else np.random.default_rng(0)
    return correlate(synthesize_uplink(users, frames, params, rng), root, params.guard)


class TestFrequencyResponse(unittest.TestCase):

    def test_single_tap(self) -> None:
        cir = np.zeros((2, 6), dtype=complex)
        cir[:, 0] = [1.0, 2.0j]
        H = cir_to_frequency(cir, 72)

        self.assertEqual(H.shape, (2, 72))
        npt.assert_allclose(H[0], np.full(72, 1.0 / math.sqrt(72)))
        npt.assert_allclose(H[1], np.full(72, 2.0j / math.sqrt(72)))

    def test_energy_per_subcarrier(self) -> None:
        """E|H[n]|^2 equals alpha = sum(pdp) / N_RS."""

        params = derive({})
        rng = np.random.default_rng(15)
        H = np.stack([cir_to_frequency(draw_cir(params, rng), 72) for _ in range(500)])
        self.assertAlmostEqual(np.mean(np.abs(H) ** 2), params.alpha, delta=0.05 * params.alpha)


class TestGroupEnergy(unittest.TestCase):
    """Beam normalizer inputs."""

    def setUp(self) -> None:
        self.params = derive({})
        self.user = UserRealization(preamble_idx=4, tau=10, cir=np.zeros((20, 6), dtype=complex))

    def test_contributing_energy(self) -> None:
        p = self.params

        self.assertAlmostEqual(contributing_energy(10, self.user, p), 1.0 / 72)
        self.assertAlmostEqual(contributing_energy(13, self.user, p), 1.0 / 144)
        self.assertEqual(contributing_energy(16, self.user, p), 0.0)
        self.assertEqual(contributing_energy(4, self.user, p), 0.0)

    def test_group_signal_energy(self) -> None:
        p = self.params
        other = UserRealization(preamble_idx=4, tau=12, cir=self.user.cir)
        stranger = UserRealization(preamble_idx=5, tau=10, cir=self.user.cir)
        group = DetectedGroup(preamble_idx=4, ta_hat=10)

        self.assertAlmostEqual(group_signal_energy(group, [self.user, other, stranger], p), (1 + 4 / 6) / 72)
        self.assertAlmostEqual(group_signal_energy(group, None, p), p.alpha)

    def test_upsilon(self) -> None:
        p = self.params
        expected = 20 * (p.pu * 2 / 72 + 6 / (864 * 72))
        self.assertAlmostEqual(upsilon(p, 2 / 72), expected)


class TestEstimation(unittest.TestCase):
    """Least-squares group CIR from the correlation bank."""

    def setUp(self) -> None:
        self.params = derive(NOISELESS)
        self.root = root_zc(864, 25)
        self.user = UserRealization(preamble_idx=3, tau=20, cir=draw_cir(self.params, np.random.default_rng(16)))
        self.bank = uplink_bank(self.params, [self.user], self.root)

    def test_noiseless_estimate(self) -> None:
        est = estimate_group_cir(self.bank, DetectedGroup(3, 20), self.params, [self.user])

        npt.assert_allclose(est.cir_hat, math.sqrt(self.params.pu) * self.user.cir, atol=1e-9)
        npt.assert_allclose(est.fd_gain, cir_to_frequency(est.cir_hat, 72))
        self.assertAlmostEqual(est.upsilon, 20 * self.params.pu / 72)

    def test_empirical_upsilon(self) -> None:
        est = estimate_group_cir(self.bank, DetectedGroup(3, 20), self.params, upsilon_mode="empirical")
        expected = np.mean(np.sum(np.abs(est.fd_gain) ** 2, axis=0))
        self.assertAlmostEqual(est.upsilon, expected)

    def test_rejects_bad_arguments(self) -> None:
        with self.assertRaises(ValueError):
            estimate_group_cir(self.bank, DetectedGroup(3, 45), self.params)
        with self.assertRaises(ValueError):
            estimate_group_cir(self.bank, DetectedGroup(3, 20), self.params, upsilon_mode="oracle")


class TestPrecoding(unittest.TestCase):
    """Precoder, downlink reception and the SINR decomposition."""

    def setUp(self) -> None:
        self.params = derive({})
        self.root = root_zc(864, 25)
        rng = np.random.default_rng(17)
        self.users = [
            UserRealization(preamble_idx=6, tau=15, cir=draw_cir(self.params, rng), ue_id=i)
            for i in range(2)
        ]
        self.bank = uplink_bank(self.params, self.users, self.root)
        self.est = estimate_group_cir(self.bank, DetectedGroup(6, 15), self.params, self.users)
        self.symbols = np.where(rng.random(24) < 0.5, 1.0, -1.0).astype(complex)

    def test_skips_zero_normalizer(self) -> None:
        est = estimate_group_cir(self.bank, DetectedGroup(6, 15), self.params, [])
        self.assertEqual(est.upsilon, upsilon(self.params, 0.0))
        est.upsilon = 0.0
        with self.assertLogs("app.services.beamformer", level="WARNING"):
            X = precode([est], [self.symbols], self.params, 1)
        npt.assert_allclose(X, 0)

    def test_argument_checks(self) -> None:
        with self.assertRaises(ValueError):
            precode([self.est, self.est], [self.symbols, self.symbols], self.params, 1)
        with self.assertRaises(ValueError):
            precode([self.est], [], self.params, 1)
        with self.assertRaises(ValueError):
            precode([self.est], [self.symbols[:10]], self.params, 1)

    def test_decomposition_matches_received_signal(self) -> None:
        """DS + EN reproduces precode followed by reception with the same noise."""

        X = precode([self.est], [self.symbols], self.params, 1)
        rx = receive_downlink(X, self.users, self.params, np.random.default_rng(18))
        parts = decompose_worst_case(self.est, self.users, self.symbols, self.params, 1, np.random.default_rng(18))

        self.assertEqual(rx.ue_ids, [0, 1])
        npt.assert_allclose(parts.y, rx.y, atol=1e-10)

    def test_exact_csi_noiseless(self) -> None:
        """With a perfect estimate of one user only hardening is left in EN."""

        params = derive(NOISELESS)
        user = self.users[0]
        bank = uplink_bank(params, [user], self.root)
        est = estimate_group_cir(bank, DetectedGroup(6, 15), params, [user])
        parts = decompose_worst_case(est, [user], self.symbols, params)

        npt.assert_allclose(parts.mui, 0, atol=1e-12)
        npt.assert_allclose(parts.estimation_noise, 0, atol=1e-9)
        npt.assert_allclose(parts.awgn, 0)
        npt.assert_allclose(parts.en, parts.hardening, atol=1e-9)

    def test_instantaneous_sinr(self) -> None:
        parts = SinrComponents(
            ds=np.array([[2.0, 1.0]]),
            hardening=np.array([[1.0, 0.0]]),
            mui=np.array([[0.0, 0.5]]),
            estimation_noise=np.zeros((1, 2)),
            awgn=np.zeros((1, 2)),
        )
        npt.assert_allclose(measure_instantaneous_sinr(parts), [[4.0, 4.0]])
        self.assertAlmostEqual(long_term_sinr([parts, parts]), 5.0 / 1.25)

    def test_zero_symbols_give_zero_output(self) -> None:
        X = precode([self.est], [np.zeros(24, dtype=complex)], self.params, 1)
        self.assertEqual(X.shape, (20, 24))
        npt.assert_array_equal(X, 0)


def perfect_estimate(params, user):
    cir_hat = math.sqrt(params.pu) * user.cir
    return GroupChannelEstimate(
        group=DetectedGroup(user.preamble_idx, user.tau),
        cir_hat=cir_hat,
        fd_gain=cir_to_frequency(cir_hat, params.n_rs),
        upsilon=upsilon(params, params.alpha),
    )


def mean_beam_power(params, draws, rng):
    """Average of sum_m |X_m[n]|^2 for two groups (ta 5 and 30) on one preamble."""

    root = root_zc(864, 25)
    frame = build_frame(root, params.shift(6), params.guard)
    total = 0.0
    for _ in range(draws):
        users = [
            UserRealization(preamble_idx=6, tau=tau, cir=draw_cir(params, rng), ue_id=i)
            for i, tau in enumerate((5, 30))
        ]
        bank = correlate(synthesize_uplink(users, [frame, frame], params, rng), root, params.guard)
        estimates = [estimate_group_cir(bank, DetectedGroup(6, u.tau), params, users) for u in users]
        symbols = [np.where(rng.random(24) < 0.5, 1.0, -1.0).astype(complex) for _ in users]
        X = precode(estimates, symbols, params, 2)
        total += float(np.mean(np.sum(np.abs(X) ** 2, axis=0)))
    return total / draws


class TestBeamInvariants(unittest.TestCase):
    """Transform, power and hardening properties of the precoder."""

    def test_inverse_transform_recovers_cir(self) -> None:
        rng = np.random.default_rng(22)
        cir = rng.standard_normal((3, 6)) + 1j * rng.standard_normal((3, 6))
        back = np.fft.ifft(cir_to_frequency(cir, 72) * math.sqrt(72), axis=-1)

        padded = np.zeros((3, 72), dtype=complex)
        padded[:, :6] = cir
        npt.assert_allclose(back, padded, atol=1e-9)

    def test_power_per_group(self) -> None:
        """Each served group radiates P_d on average."""

        params = derive({})
        power = mean_beam_power(params, 400, np.random.default_rng(23))
        self.assertAlmostEqual(power / (2 * params.downlink_power(2)), 1.0, delta=0.05)

    def test_received_signal_hardens(self) -> None:
        """At M=512 the received symbol sits at its expected value."""

        params = derive({**NOISELESS, "array": {"num_antennas": 512}})
        rng = np.random.default_rng(24)
        ones = np.ones(24, dtype=complex)
        expected = (
            math.sqrt(params.n_rs * params.downlink_power(1) / upsilon(params, params.alpha))
            * math.sqrt(params.pu) * 512 * params.alpha
        )
        ratios = []
        for _ in range(1000):
            user = UserRealization(preamble_idx=1, tau=0, cir=draw_cir(params, rng))
            X = precode([perfect_estimate(params, user)], [ones], params, 1)
            ratios.append(receive_downlink(X, [user], params, None).y[0] / expected)
        ratios = np.array(ratios)

        npt.assert_allclose(ratios.imag, 0, atol=1e-9)
        self.assertAlmostEqual(float(np.mean(ratios.real)), 1.0, delta=0.02)
        self.assertLess(float(np.std(ratios.real)), 0.1)


@unittest.skipUnless(settings.RUN_SLOW_TESTS, "set RUN_SLOW_TESTS=1 to run long campaigns")
class TestBeamPowerLongRun(unittest.TestCase):

    def test_power_per_group(self) -> None:
        params = derive({})
        power = mean_beam_power(params, 10000, np.random.default_rng(25))
        self.assertAlmostEqual(power / (2 * params.downlink_power(2)), 1.0, delta=0.02)


if __name__ == '__main__':
    unittest.main()
