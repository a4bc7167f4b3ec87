"""Unittest module for input validators."""

import math
import sys
import unittest

sys.path.append("..")  # Adds higher directory to python modules path.
from utils.errors import ConfigError
from utils.validators import (
    K_B_MEV_PER_K,
    energy_to_kelvin,
    kelvin_to_energy,
    parse_axis,
    validate_positive,
    validate_sites,
    validate_unit_system,
)


class ValidatorsTestCase(unittest.TestCase):
    def test_parse_axis(self):
        self.assertEqual(parse_axis("0:1:3"), (0.0, 0.5, 1.0))
        self.assertEqual(parse_axis("2.5"), (2.5,))
        self.assertEqual(parse_axis("3:3:1"), (3.0,))
        self.assertEqual(len(parse_axis("0.1:6:30")), 30)

    def test_parse_axis_rejects(self):
        for text in ("1:0:3", "0:1:1", "0:1", "a:b:c", "0:inf:3", "nan"):
            with self.assertRaises(ConfigError, msg=text):
                parse_axis(text)
        with self.assertRaises(ConfigError):
            parse_axis(3)

    def test_validate_positive(self):
        self.assertEqual(validate_positive("1.5", "temp"), 1.5)
        for value in (0, -1, "x", math.inf, math.nan, None):
            with self.assertRaises(ConfigError):
                validate_positive(value, "temp")

    def test_validate_sites(self):
        self.assertEqual(validate_sites("8"), 8)
        self.assertEqual(validate_sites(2), 2)
        for value in (1, 13, 2.5, "two"):
            with self.assertRaises(ConfigError):
                validate_sites(value)

    def test_validate_unit_system(self):
        self.assertEqual(validate_unit_system("Physical"), "physical")
        with self.assertRaises(ConfigError):
            validate_unit_system("imperial")

    def test_kelvin_energy_conversion(self):
        self.assertAlmostEqual(kelvin_to_energy(1.0), K_B_MEV_PER_K)
        self.assertAlmostEqual(energy_to_kelvin(kelvin_to_energy(5.0)), 5.0)
        # 0.44 meV gap of copper nitrate
        self.assertAlmostEqual(energy_to_kelvin(0.44), 5.106, places=3)
