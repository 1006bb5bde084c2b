# -*- coding: utf-8 -*-
"""Test the HTTP API end to end with an in-process client."""

import unittest

from fastapi.testclient import TestClient

from app.main import app


class TestApi(unittest.TestCase):

    @classmethod
    def setUpClass(cls) -> None:
        cls.client_cm = TestClient(app)
        cls.client = cls.client_cm.__enter__()

    @classmethod
    def tearDownClass(cls) -> None:
        cls.client_cm.__exit__(None, None, None)

    def test_health(self) -> None:
        body = self.client.get("/health").json()
        self.assertEqual(body["status"], "healthy")
        self.assertTrue(body["simulator_initialized"])
        self.assertEqual(body["profile"], "default")

    def test_root(self) -> None:
        response = self.client.get("/")
        self.assertEqual(response.status_code, 200)
        self.assertTrue(response.json()["ready"])

    def test_params(self) -> None:
        body = self.client.get("/api/params").json()

        self.assertTrue(body["success"])
        self.assertEqual(body["params"]["num_preambles"], 17)
        self.assertEqual(body["params"]["max_round_trip"], 44)

    def test_analytic(self) -> None:
        body = self.client.post("/api/analytic", json={"m": 20, "k_g": 2}).json()

        self.assertTrue(body["success"])
        self.assertAlmostEqual(body["sinr_db"], -3.07, delta=0.5)
        self.assertEqual(body["min_antennas_ceil"], 21)
        self.assertIsNotNone(body["required_pt_db"])
        self.assertEqual(body["notes"], [])

    def test_analytic_infeasible_target(self) -> None:
        body = self.client.post("/api/analytic", json={"epsilon_db": 10}).json()

        self.assertTrue(body["success"])
        self.assertIsNone(body["min_antennas"])
        self.assertIsNone(body["required_pt_db"])
        self.assertEqual(len(body["notes"]), 2)

    def test_codec(self) -> None:
        encoded = self.client.post("/api/codec/encode", json={"ta": 0}).json()
        self.assertEqual(encoded["hex"], "FE0000")
        self.assertEqual(encoded["bits"], "1" * 7 + "0" * 17)

        decoded = self.client.post("/api/codec/decode", json={"frame_hex": encoded["hex"]}).json()
        self.assertEqual(decoded["status"], "success")
        self.assertEqual((decoded["ta"], decoded["rb_start"], decoded["num_rb"]), (0, 0, 1))

    def test_codec_errors(self) -> None:
        self.assertEqual(self.client.post("/api/codec/encode", json={"ta": 45}).status_code, 422)
        response = self.client.post("/api/codec/decode", json={"frame_hex": "nothex"})
        self.assertEqual(response.status_code, 400)

        corrupted = self.client.post("/api/codec/decode", json={"frame_hex": "FE0001"}).json()
        self.assertEqual(corrupted["status"], "crc_fail")
        self.assertIsNone(corrupted["ta"])

    def test_simulate(self) -> None:
        request = {"num_frames": 3, "mean_requests": 2.0, "seed": 7}
        first = self.client.post("/api/simulate", json=request).json()
        second = self.client.post("/api/simulate", json=request).json()

        self.assertTrue(first["success"])
        self.assertEqual(first["seed"], 7)
        self.assertEqual(first["row"]["m"], 20)
        self.assertEqual(first["row"], second["row"])

    def test_simulate_rejections(self) -> None:
        too_long = self.client.post("/api/simulate", json={"num_frames": 10_000})
        self.assertEqual(too_long.status_code, 400)

        bad_override = self.client.post("/api/simulate", json={"num_frames": 2, "overrides": ["array.size=3"]})
        self.assertEqual(bad_override.status_code, 400)

    def test_pf_pd(self) -> None:
        body = self.client.post("/api/pf-pd", json={"trials": 10, "m": 40, "seed": 3}).json()

        self.assertTrue(body["success"])
        self.assertEqual(body["m"], 40)
        self.assertEqual(body["trials"], 10)
        self.assertTrue(0.0 <= body["pf"] <= 1.0)

        self.assertEqual(self.client.post("/api/pf-pd", json={"trials": 10 ** 6}).status_code, 400)


if __name__ == '__main__':
    unittest.main()
