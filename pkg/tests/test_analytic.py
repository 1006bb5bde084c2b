# -*- coding: utf-8 -*-
"""Test the closed-form SINR, threshold and dimensioning expressions."""

import math
import unittest

from app.services.analytic import (
    ScaledPowerParams,
    SinrParams,
    closed_form_table,
    db_to_linear,
    gamma_u,
    kappa_for_target_pf,
    linear_to_db,
    min_antennas,
    pf_bound,
    pf_gaussian,
    required_pt,
    sinr_closed_form,
    sinr_scaled,
)

ALPHA = 1.0 / 72
SCALED = ScaledPowerParams(e_u=0.0913, e_t=0.0913, epsilon=db_to_linear(-3.0))


class TestThreshold(unittest.TestCase):
    """False-alarm law of the spatially averaged detector."""

    def test_kappa_for_target(self) -> None:
        self.assertAlmostEqual(kappa_for_target_pf(1e-3, 50, "bound"), 223.6, delta=0.2)
        self.assertAlmostEqual(kappa_for_target_pf(1e-3, 50, "gaussian"), 4.107, delta=0.01)
        self.assertEqual(kappa_for_target_pf(1.0, 50), 0.0)
        with self.assertRaises(ValueError):
            kappa_for_target_pf(0.0, 50)
        with self.assertRaises(ValueError):
            kappa_for_target_pf(1e-3, 50, "empirical")

    def test_inverse_consistency(self) -> None:
        for target in (1e-4, 1e-3, 0.05):
            self.assertAlmostEqual(pf_bound(kappa_for_target_pf(target, 50, "bound"), 50), target, delta=1e-9)
            self.assertAlmostEqual(pf_gaussian(kappa_for_target_pf(target, 50, "gaussian"), 50), target, delta=1e-9)

    def test_pf_bound_values(self) -> None:
        self.assertAlmostEqual(pf_bound(5.0, 50), 0.8701, delta=1e-3)
        self.assertAlmostEqual(pf_bound(8.0, 50), 0.5450, delta=2e-3)
        self.assertLess(pf_bound(20.0, 50), pf_bound(8.0, 50))
        for kappa in (1.0, 0.5):
            with self.assertRaises(ValueError):
                pf_bound(kappa, 50)
        with self.assertRaises(ValueError):
            pf_bound(5.0, 0)


class TestSinr(unittest.TestCase):
    """Worst-case long-term SINR."""

    def test_reference_point(self) -> None:
        """M = 20, two users, E_u = E_T = 0.0913 gives about -3 dB."""

        sinr = sinr_scaled(SCALED, 20, [ALPHA, ALPHA])
        self.assertAlmostEqual(linear_to_db(sinr), -3.07, delta=0.5)

    def test_more_antennas_help(self) -> None:
        values = [sinr_scaled(SCALED, m, [ALPHA] * 2) for m in (10, 20, 80, 320)]
        self.assertEqual(values, sorted(values))

    def test_larger_groups_hurt(self) -> None:
        self.assertLess(sinr_scaled(SCALED, 80, [ALPHA] * 10), sinr_scaled(SCALED, 80, [ALPHA] * 2))

    def test_asymptote(self) -> None:
        limit = gamma_u(SCALED, ALPHA)
        self.assertAlmostEqual(limit, 3.601, delta=0.01)
        for k_g in (2, 10):
            self.assertAlmostEqual(sinr_scaled(SCALED, 1e9, [ALPHA] * k_g) / limit, 1.0, delta=0.01)

    def test_single_user_large_powers(self) -> None:
        """Interference-free, noise-free limit is M."""

        p = SinrParams(M=64, gamma=1e12, gamma_d=1e12, alphas=[ALPHA])
        self.assertAlmostEqual(sinr_closed_form(p), 64.0, delta=1e-6)

    def test_validation(self) -> None:
        bad = (
            SinrParams(M=0, gamma=1, gamma_d=1, alphas=[ALPHA]),
            SinrParams(M=8, gamma=1, gamma_d=1, alphas=[]),
            SinrParams(M=8, gamma=1, gamma_d=1, alphas=[ALPHA, -1.0]),
            SinrParams(M=8, gamma=1, gamma_d=1, alphas=[ALPHA], i=2),
        )
        for p in bad:
            with self.assertRaises(ValueError):
                sinr_closed_form(p)

    def test_table(self) -> None:
        rows = closed_form_table(SCALED, [20, 80], [2, 10], ALPHA)
        self.assertEqual(len(rows), 4)
        self.assertEqual({(r["m"], r["k_g"]) for r in rows}, {(20, 2), (80, 2), (20, 10), (80, 10)})

    def test_db_helpers(self) -> None:
        self.assertAlmostEqual(db_to_linear(-16.9), 10 ** (-1.69))
        self.assertAlmostEqual(linear_to_db(100.0), 20.0)
        self.assertEqual(linear_to_db(0.0), float("-inf"))


class TestDimensioning(unittest.TestCase):
    """Required downlink power and minimum antenna count."""

    def test_min_antennas(self) -> None:
        result = min_antennas(SCALED, [ALPHA, ALPHA])

        self.assertTrue(result.feasible)
        self.assertAlmostEqual(result.m_star, 20.71, delta=0.05)
        self.assertEqual(result.m_ceil, 21)
        self.assertAlmostEqual(sinr_scaled(SCALED, result.m_star, [ALPHA] * 2), SCALED.epsilon, delta=1e-9)

    def test_min_antennas_grows_with_group(self) -> None:
        two = min_antennas(SCALED, [ALPHA] * 2).m_star
        ten = min_antennas(SCALED, [ALPHA] * 10).m_star
        self.assertGreater(ten, two)
        self.assertAlmostEqual(ten, 465, delta=5)

    def test_min_antennas_infeasible(self) -> None:
        target = ScaledPowerParams(e_u=0.0913, e_t=0.0913, epsilon=db_to_linear(10.0))
        result = min_antennas(target, [ALPHA, ALPHA])

        self.assertFalse(result.feasible)
        self.assertIsNone(result.m_star)
        self.assertIn("asymptotic", result.reason)

    def test_required_pt_round_trip(self) -> None:
        epsilon = db_to_linear(-3.0)
        base = SinrParams(M=20, gamma=0.0913 / math.sqrt(20), gamma_d=1.0, alphas=[ALPHA, ALPHA])
        power = required_pt(epsilon, base)

        self.assertTrue(power.feasible)
        reached = sinr_closed_form(SinrParams(**{**base.__dict__, "gamma_d": power.value}))
        self.assertAlmostEqual(reached, epsilon, delta=1e-9)
        self.assertAlmostEqual(power.extras["pt_over_sigma2"], power.value * 24 / 72)

    def test_required_pt_infeasible(self) -> None:
        base = SinrParams(M=20, gamma=0.0913 / math.sqrt(20), gamma_d=1.0, alphas=[ALPHA, ALPHA])
        power = required_pt(db_to_linear(10.0), base)

        self.assertFalse(power.feasible)
        self.assertIsNone(power.value)
        self.assertTrue(power.reason)
        with self.assertRaises(ValueError):
            required_pt(0.0, base)


if __name__ == '__main__':
    unittest.main()
