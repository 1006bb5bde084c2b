# -*- coding: utf-8 -*-
"""Test YAML profile loading and command-line overrides."""

import tempfile
import unittest
from pathlib import Path

from app.schemas import ConfigError, ParamsConfigLoader, apply_overrides, build_profile

BUNDLED = ParamsConfigLoader()


class TestBundledProfiles(unittest.TestCase):

    def test_list_profiles(self) -> None:
        names = BUNDLED.list_profiles()
        self.assertIn("default", names)
        self.assertIn("high_density", names)
        self.assertTrue(BUNDLED.profile_exists("default"))
        self.assertFalse(BUNDLED.profile_exists("nope"))

    def test_default_profile(self) -> None:
        profile = BUNDLED.load("default")

        self.assertEqual(profile.name, "default")
        self.assertEqual(profile.prach.n_zc, 864)
        self.assertEqual(profile.prach.guard, 50)
        self.assertEqual(profile.array.num_antennas, 20)
        self.assertAlmostEqual(profile.power.linear_pu(), 10 ** (-1.69))
        self.assertEqual(profile.campaign.mean_requests, 11.0)

    def test_high_density_profile(self) -> None:
        profile = BUNDLED.load("high_density")
        self.assertEqual(profile.array.num_antennas, 80)
        self.assertAlmostEqual(profile.campaign.mean_requests, 31.42)
        # sections absent from the file fall back to the defaults
        self.assertEqual(profile.prach.n_zc, 864)


class TestLoaderFiles(unittest.TestCase):
    """Loading from an explicit directory or path."""

    def setUp(self) -> None:
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)
        self.loader = ParamsConfigLoader(self.dir)

    def tearDown(self) -> None:
        self.tmp.cleanup()

    def test_missing_profile(self) -> None:
        with self.assertRaises(FileNotFoundError):
            self.loader.load_raw("absent")

    def test_path_and_name(self) -> None:
        path = self.dir / "small.yml"
        path.write_text("name: small\narray:\n  num_antennas: 8\n", encoding="utf-8")

        self.assertEqual(self.loader.load(str(path)).array.num_antennas, 8)
        self.assertEqual(self.loader.load("small").name, "small")
        self.assertEqual(self.loader.list_profiles(), ["small"])

    def test_empty_file(self) -> None:
        (self.dir / "empty.yaml").write_text("", encoding="utf-8")
        self.assertEqual(self.loader.load_raw("empty"), {})
        self.assertEqual(self.loader.load("empty").name, "default")

    def test_malformed_yaml(self) -> None:
        (self.dir / "broken.yaml").write_text("array: [1, 2\n", encoding="utf-8")
        with self.assertRaises(ValueError):
            self.loader.load_raw("broken")

    def test_not_a_mapping(self) -> None:
        (self.dir / "listy.yaml").write_text("- 1\n- 2\n", encoding="utf-8")
        with self.assertRaises(ValueError):
            self.loader.load_raw("listy")

    def test_unknown_key(self) -> None:
        (self.dir / "typo.yaml").write_text("array:\n  num_antenas: 8\n", encoding="utf-8")
        with self.assertRaises(ConfigError) as ctx:
            self.loader.load("typo")
        self.assertIn("num_antenas", str(ctx.exception))


class TestOverrides(unittest.TestCase):
    """section.key=value overrides."""

    def setUp(self) -> None:
        self.raw = BUNDLED.load_raw("default")

    def test_typed_values(self) -> None:
        merged = apply_overrides(self.raw, ["array.num_antennas=80", "channel.pdp=[1, 1, 1, 1, 1, 1]", "name=custom"])

        self.assertEqual(merged["array"]["num_antennas"], 80)
        self.assertEqual(merged["channel"]["pdp"], [1, 1, 1, 1, 1, 1])
        self.assertEqual(merged["name"], "custom")
        self.assertEqual(self.raw["array"]["num_antennas"], 20)
        self.assertEqual(build_profile(merged).array.num_antennas, 80)

    def test_power_pair_replaced(self) -> None:
        merged = apply_overrides(self.raw, ["power.pu_over_sigma2=0.05"])

        self.assertNotIn("pu_db", merged["power"])
        self.assertAlmostEqual(build_profile(merged).power.linear_pu(), 0.05)

    def test_creates_missing_section(self) -> None:
        merged = apply_overrides({}, ["detection.kappa=3.5"])
        self.assertEqual(build_profile(merged).detection.kappa, 3.5)

    def test_rejects_bad_overrides(self) -> None:
        for item in ("array.num_antennas", "antennas=4", "radio.power=1", "array.size=4", "a.b.c=1"):
            with self.assertRaises(ConfigError, msg=item):
                apply_overrides(self.raw, [item])

    def test_invalid_value(self) -> None:
        merged = apply_overrides(self.raw, ["array.num_antennas=-3"])
        with self.assertRaises(ConfigError):
            build_profile(merged)

    def test_both_members_of_a_pair(self) -> None:
        with self.assertRaises(ConfigError):
            build_profile({"power": {"pu_db": -10, "pu_over_sigma2": 0.1, "pt_db": -10}})


if __name__ == '__main__':
    unittest.main()
