# -*- coding: utf-8 -*-
"""Test CSV and JSON output."""

import json
import tempfile
import unittest
from pathlib import Path

import numpy as np
import numpy.testing as npt
import pandas as pd

from app import __version__
from app.services.channel import RxUplink, UserRealization
from app.services.detector import CorrelationProfile, DetectedGroup
from app.services.export import (
    CAMPAIGN_COLUMNS,
    campaign_row,
    groups_rows,
    profiles_rows,
    read_uplink_csv,
    to_csv_text,
    users_frame,
    write_csv,
    write_preamble_csv,
    write_sidecar,
    write_uplink_csv,
)
from app.services.harness import CampaignMetrics
from app.services.sysparams import derive


class TestCsv(unittest.TestCase):

    def setUp(self) -> None:
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self) -> None:
        self.tmp.cleanup()

    def test_fixed_columns(self) -> None:
        text = to_csv_text([{"b": 1.0, "a": 2}], columns=["a", "b"])
        self.assertEqual(text, "a,b\n2,1\n")

    def test_campaign_row(self) -> None:
        metrics = CampaignMetrics(
            avg_repeat_attempts=1.5, ra_failure_prob=0.01, pf=0.001, pd=0.99, pd_exact_ta=0.98,
            finished_ues=100, failed_ues=1, censored_ues=3, ci_halfwidth=0.1, fail_ci_halfwidth=0.02,
        )
        row = campaign_row(derive({}), 11.0, metrics)

        self.assertEqual(list(row), CAMPAIGN_COLUMNS)
        self.assertEqual(row["m"], 20)
        self.assertAlmostEqual(row["pu_db"], -16.9)

        path = write_csv([row], self.dir / "nested" / "campaign.csv", CAMPAIGN_COLUMNS)
        frame = pd.read_csv(path)
        self.assertEqual(list(frame.columns), CAMPAIGN_COLUMNS)
        self.assertAlmostEqual(frame.loc[0, "avg_repeats"], 1.5)
        self.assertEqual(frame.loc[0, "mean_k_t"], 0.0)
        self.assertEqual(frame.loc[0, "noncontrib_frac"], 0.0)

    def test_sidecar(self) -> None:
        csv_path = self.dir / "run.csv"
        sidecar = write_sidecar(csv_path, {"array": {"num_antennas": 20}}, 42, command="simulate")
        payload = json.loads(sidecar.read_text(encoding="utf-8"))

        self.assertEqual(sidecar, self.dir / "run.json")
        self.assertEqual(payload["seed"], 42)
        self.assertEqual(payload["version"], __version__)
        self.assertEqual(payload["command"], "simulate")
        self.assertEqual(payload["config"]["array"]["num_antennas"], 20)

    def test_uplink_round_trip(self) -> None:
        rng = np.random.default_rng(22)
        rx = RxUplink(samples=rng.standard_normal((3, 7)) + 1j * rng.standard_normal((3, 7)))
        path = write_uplink_csv(rx, self.dir / "uplink.csv")

        # row order does not matter on read
        frame = pd.read_csv(path).sample(frac=1.0, random_state=1)
        frame.to_csv(path, index=False)
        npt.assert_allclose(read_uplink_csv(path).samples, rx.samples, rtol=1e-15)

    def test_uplink_missing_columns(self) -> None:
        path = self.dir / "bad.csv"
        path.write_text("antenna,t,re\n0,0,1.0\n", encoding="utf-8")
        with self.assertRaises(ValueError):
            read_uplink_csv(path)

    def test_preamble_csv(self) -> None:
        samples = np.exp(1j * np.arange(5))
        frame = pd.read_csv(write_preamble_csv(samples, self.dir / "pre.csv"))

        self.assertEqual(list(frame.columns), ["t", "re", "im"])
        npt.assert_allclose(frame["re"] + 1j * frame["im"], samples)


class TestRows(unittest.TestCase):

    def test_profiles_and_groups(self) -> None:
        profiles = {
            2: CorrelationProfile(2, np.array([0.5, 2.0]), np.array([0.0, 2.0]), 1.0),
            1: CorrelationProfile(1, np.array([0.1, 0.2]), np.zeros(2), 1.0),
        }
        rows = profiles_rows(profiles)
        self.assertEqual([(r["k"], r["t"]) for r in rows], [(1, 0), (1, 1), (2, 0), (2, 1)])
        self.assertEqual(rows[3]["p"], 2.0)

        groups = [DetectedGroup(1, 3), DetectedGroup(1, 20), DetectedGroup(4, 0)]
        self.assertEqual(
            [(r["k"], r["group"], r["ta_hat"]) for r in groups_rows(groups)],
            [(1, 1, 3), (1, 2, 20), (4, 1, 0)],
        )

    def test_users_frame(self) -> None:
        users = [UserRealization(preamble_idx=3, tau=12, cir=np.zeros((1, 6)), distance_km=1.5, ue_id=0)]
        frame = users_frame(users)
        self.assertEqual(list(frame.columns), ["ue_id", "preamble_idx", "tau", "distance_km"])
        self.assertEqual(frame.loc[0, "tau"], 12)
        self.assertEqual(len(users_frame([])), 0)


if __name__ == '__main__':
    unittest.main()
