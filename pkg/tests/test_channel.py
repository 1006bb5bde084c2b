# -*- coding: utf-8 -*-
"""Test user placement, multipath draws and uplink synthesis."""

import math
import unittest

import numpy as np
import numpy.testing as npt

from app.services.channel import (
    UserRealization,
    delay_from_round_trip,
    delay_samples,
    draw_cir,
    draw_distance,
    draw_users,
    pathloss_amplitude,
    redraw_attempt,
    synthesize_uplink,
)
from app.services.preamble import build_frame, root_zc
from app.services.sysparams import derive


class TestDelays(unittest.TestCase):
    """Round-trip delay quantization."""

    def setUp(self) -> None:
        self.params = derive({})

    def test_cell_edge(self) -> None:
        """6 km at 6.7 us/km and 1.08 MHz is 43.4 channel uses, floored."""

        self.assertEqual(delay_samples(6.0, self.params), 43)
        self.assertEqual(delay_samples(0.0, self.params), 0)

    def test_clamped(self) -> None:
        self.assertEqual(delay_from_round_trip(100.0, self.params), 44)
        self.assertEqual(delay_from_round_trip(-1.0, self.params), 0)

    def test_distance_within_cell(self) -> None:
        d = draw_distance(self.params, np.random.default_rng(1), 10000)
        self.assertTrue(np.all((d >= 0) & (d <= 6.0)))
        # uniform over the disc: P(d < R/2) = 1/4
        self.assertAlmostEqual(np.mean(d < 3.0), 0.25, delta=0.02)


class TestMultipath(unittest.TestCase):
    """Rayleigh CIR draws and pathloss."""

    def test_tap_power(self) -> None:
        """Per-tap second moment follows the power delay profile."""

        params = derive({"channel": {"pdp_profile": "exponential"}})
        rng = np.random.default_rng(2)
        taps = np.stack([draw_cir(params, rng) for _ in range(2000)])

        self.assertEqual(taps.shape, (2000, 20, 6))
        npt.assert_allclose(np.mean(np.abs(taps) ** 2, axis=(0, 1)), params.pdp_array, rtol=0.05)

    def test_pathloss(self) -> None:
        params = derive({"channel": {"pathloss_enabled": True}})

        self.assertEqual(pathloss_amplitude(6.0, derive({})), 1.0)
        self.assertAlmostEqual(pathloss_amplitude(6.0, params), 1.0)
        self.assertAlmostEqual(pathloss_amplitude(3.0, params), 2 ** 1.85)
        self.assertEqual(pathloss_amplitude(0.0, params), pathloss_amplitude(0.035, params))


class TestUsers(unittest.TestCase):
    """Poisson arrivals and retries."""

    def setUp(self) -> None:
        self.params = derive({})
        self.rng = np.random.default_rng(3)

    def test_draw_users(self) -> None:
        counts = []
        for _ in range(200):
            users = draw_users(self.params, 11.0, self.rng)
            counts.append(len(users))
            for idx, u in enumerate(users):
                self.assertTrue(1 <= u.preamble_idx <= 17)
                self.assertTrue(0 <= u.tau <= 44)
                self.assertEqual(u.cir.shape, (20, 6))
                self.assertEqual(u.ue_id, idx)
        self.assertAlmostEqual(np.mean(counts), 11.0, delta=1.0)

    def test_draw_users_rejects_zero_load(self) -> None:
        with self.assertRaises(ValueError):
            draw_users(self.params, 0.0, self.rng)

    def test_redraw_attempt(self) -> None:
        user = draw_users(self.params, 20.0, self.rng)[0]
        retry = redraw_attempt(user, self.params, self.rng)

        self.assertEqual(retry.tau, user.tau)
        self.assertEqual(retry.distance_km, user.distance_km)
        self.assertEqual(retry.ue_id, user.ue_id)
        self.assertFalse(np.array_equal(retry.cir, user.cir))


class TestUplink(unittest.TestCase):
    """Received PRACH signal."""

    def setUp(self) -> None:
        self.params = derive({"power": {"pu_db": -10, "pt_db": -10, "noiseless": True}})
        self.root = root_zc(864, 25)

    def test_single_tap_delay(self) -> None:
        """A one-tap user appears as the scaled frame delayed by tau."""

        p = self.params
        frame = build_frame(self.root, p.shift(3), p.guard)
        cir = np.zeros((20, 6), dtype=complex)
        cir[:, 0] = 1.0
        user = UserRealization(preamble_idx=3, tau=7, cir=cir)
        rx = synthesize_uplink([user], [frame], p, None)

        self.assertEqual(rx.samples.shape, (20, 964))
        npt.assert_allclose(rx.samples[:, :7], 0)
        npt.assert_allclose(rx.samples[0, 7:], math.sqrt(0.1) * frame.samples[:964 - 7], atol=1e-12)

    def test_noise_variance(self) -> None:
        p = derive({})
        rx = synthesize_uplink([], [], p, np.random.default_rng(4))
        self.assertAlmostEqual(np.mean(np.abs(rx.samples) ** 2), 1.0, delta=0.05)

    def test_frame_mismatch(self) -> None:
        p = self.params
        user = UserRealization(preamble_idx=2, tau=0, cir=np.ones((20, 6), dtype=complex))
        with self.assertRaises(ValueError):
            synthesize_uplink([user], [build_frame(self.root, p.shift(3), p.guard)], p, None)
        with self.assertRaises(ValueError):
            synthesize_uplink([user], [], p, None)

    def test_superposition(self) -> None:
        """Noiseless uplink of several users is the sum of their single-user signals."""

        p = self.params
        rng = np.random.default_rng(5)
        users = [
            UserRealization(preamble_idx=k, tau=tau, cir=draw_cir(p, rng))
            for k, tau in ((3, 7), (3, 30), (9, 44))
        ]
        frames = [build_frame(self.root, p.shift(u.preamble_idx), p.guard) for u in users]

        joint = synthesize_uplink(users, frames, p, None).samples
        parts = sum(synthesize_uplink([u], [f], p, None).samples for u, f in zip(users, frames))
        npt.assert_allclose(joint, parts, atol=1e-12)

        scaled = UserRealization(preamble_idx=3, tau=7, cir=2.5 * users[0].cir)
        npt.assert_allclose(
            synthesize_uplink([scaled], frames[:1], p, None).samples,
            2.5 * synthesize_uplink(users[:1], frames[:1], p, None).samples,
            atol=1e-12,
        )


if __name__ == '__main__':
    unittest.main()
