"""Unittest module for correlations and decay classification."""

import math
import sys
import unittest

import numpy as np
import pytest

sys.path.append("..")  # Adds higher directory to python modules path.
from thermowit.models import ChainSpec, build
from thermowit.order import (
    CorrelationSeries,
    DecayClass,
    DecayClassification,
    OpKind,
    classify_decay,
    correlation_series,
    correlator,
)
from thermowit.thermal import ThermalEnsemble
from utils.errors import ConfigError


class CorrelatorTestCase(unittest.TestCase):
    def test_dimer_full_dot(self):
        ops = build(ChainSpec.dimer())
        expected = (-3 * math.e**3 + 3 * math.e**-1) / (math.e**3 + 3 * math.e**-1)
        self.assertAlmostEqual(correlator(ops, 1.0, "full_dot", 0, 1), expected, places=10)
        self.assertAlmostEqual(correlator(ops, 1.0, OpKind.ZZ, 0, 1), expected / 3.0, places=10)

    def test_decoupled_singlets(self):
        ops = build(ChainSpec(num_sites=4, model="alternating", j1=1.0, j2=0.0))
        self.assertAlmostEqual(correlator(ops, 0.01, "zz", 0, 1), -1.0, places=8)
        self.assertAlmostEqual(correlator(ops, 0.01, "full_dot", 0, 1), -3.0, places=8)
        # different dimers are uncorrelated
        self.assertAlmostEqual(correlator(ops, 0.01, "full_dot", 1, 2), 0.0, places=8)

    def test_high_temperature_connected_is_zero(self):
        ops = build(ChainSpec(num_sites=4, field=1.0))
        self.assertAlmostEqual(correlator(ops, 1e9, "zz", 0, 2, connected=True), 0.0, places=8)

    def test_saturated_field(self):
        ops = build(ChainSpec(num_sites=3, field=50.0))
        self.assertAlmostEqual(correlator(ops, 0.05, "zz", 0, 2), 1.0, places=8)
        self.assertAlmostEqual(correlator(ops, 0.05, "zz", 0, 2, connected=True), 0.0, places=8)

    def test_errors(self):
        ops = build(ChainSpec(num_sites=3))
        with self.assertRaises(ConfigError):
            correlator(ops, 1.0, "zz", 1, 1)
        with self.assertRaises(ConfigError):
            correlator(ops, 1.0, "xy", 0, 1)
        with self.assertRaises(ConfigError):
            correlator(ops, 1.0, "full_dot", 0, 1, connected=True)
        with self.assertRaises(ConfigError):
            correlator(ops, 1.0, "zz", 0, 3)


class CorrelationSeriesTestCase(unittest.TestCase):
    def test_default_separations(self):
        ring = ThermalEnsemble(build(ChainSpec(num_sites=6, boundary="periodic")))
        self.assertEqual(correlation_series(ring, 1.0).separations, (1, 2, 3))
        chain = build(ChainSpec(num_sites=6))
        self.assertEqual(correlation_series(chain, 1.0, reference_site=2).separations, (1, 2, 3))

    def test_ring_symmetry(self):
        ring = ThermalEnsemble(build(ChainSpec(num_sites=6, boundary="periodic")))
        series = correlation_series(ring, 0.5, separations=(1, 5))
        self.assertAlmostEqual(series.values[0], series.values[1], places=10)

    def test_invalid_separation(self):
        chain = build(ChainSpec(num_sites=4))
        with self.assertRaises(ConfigError):
            correlation_series(chain, 1.0, separations=(1, 4))
        with self.assertRaises(ConfigError):
            correlation_series(chain, 1.0, reference_site=4)
        with self.assertRaises(ConfigError):
            CorrelationSeries((2, 1), (0.1, 0.2))


class ClassifyDecayTestCase(unittest.TestCase):
    r = tuple(range(1, 11))

    def test_constant_is_lro(self):
        result = classify_decay(CorrelationSeries(self.r, (0.7,) * 10))
        self.assertIs(result.decay_class, DecayClass.LRO)
        self.assertEqual(result.window, (1, 10))
        self.assertAlmostEqual(result.fit_quality, 1.0, places=12)

    def test_power_law(self):
        result = classify_decay(CorrelationSeries(self.r, tuple(r**-0.5 for r in self.r)))
        self.assertIs(result.decay_class, DecayClass.POWER_LAW)
        self.assertAlmostEqual(result.eta, 0.5, delta=0.01)
        self.assertIsNone(result.xi)

    def test_exponential(self):
        result = classify_decay(CorrelationSeries(self.r, tuple(math.exp(-r / 3.0) for r in self.r)))
        self.assertIs(result.decay_class, DecayClass.EXPONENTIAL)
        self.assertAlmostEqual(result.xi, 3.0, delta=0.06)

    def test_staggered_sign_is_detected(self):
        values = tuple((-1) ** r * math.exp(-r / 2.0) for r in self.r)
        result = classify_decay(CorrelationSeries(self.r, values))
        self.assertIs(result.decay_class, DecayClass.EXPONENTIAL)
        self.assertTrue(result.staggered)

    def test_zero_points_dropped(self):
        values = [r**-1.0 for r in self.r]
        values[3] = 0.0
        with self.assertLogs("thermowit.order", level="WARNING"):
            result = classify_decay(CorrelationSeries(self.r, tuple(values)))
        self.assertEqual(result.dropped_points, 1)
        self.assertIs(result.decay_class, DecayClass.POWER_LAW)

    def test_plateau_with_transient_is_lro(self):
        for plateau, transient in ((0.6, 0.4), (0.5, 0.05)):
            values = tuple(plateau + transient * math.exp(-r) for r in self.r)
            result = classify_decay(CorrelationSeries(self.r, values))
            self.assertIs(result.decay_class, DecayClass.LRO)
            self.assertLessEqual(result.scores["tail_spread"], 0.01)
            self.assertEqual(
                set(result.scores), {"constant", "power_law", "exponential", "tail_spread"}
            )

    def test_decay_to_zero_is_not_lro(self):
        values = tuple(0.6 * math.exp(-r / 8.0) for r in self.r)
        result = classify_decay(CorrelationSeries(self.r, values))
        self.assertIs(result.decay_class, DecayClass.EXPONENTIAL)
        self.assertAlmostEqual(result.xi, 8.0, delta=0.16)
        self.assertLess(result.scores["exponential"], result.scores["constant"])

    def test_growing_series_is_inconclusive(self):
        result = classify_decay(CorrelationSeries(self.r, tuple(float(r) for r in self.r)))
        self.assertIs(result.decay_class, DecayClass.INCONCLUSIVE)

    def test_too_few_points(self):
        with self.assertRaises(ConfigError):
            classify_decay(CorrelationSeries((1, 2, 3, 4), (1.0, 0.5, 0.25, 0.125)))
        with self.assertRaises(ConfigError):
            classify_decay(CorrelationSeries((1, 2, 3, 4, 5), (1.0, 0.0, 0.0, 0.5, 0.2)))

    def test_record_round_trip(self):
        result = classify_decay(CorrelationSeries(self.r, tuple(r**-0.5 for r in self.r)))
        self.assertEqual(DecayClassification.from_record(result.to_record()), result)

    def test_classification_consistency(self):
        with self.assertRaises(ConfigError):
            DecayClassification(DecayClass.LRO, 0.5, None, 1.0, (1, 5))


@pytest.mark.slow
class HighTemperatureDecayTestCase(unittest.TestCase):
    def test_hot_ring_decays_exponentially(self):
        ops = build(ChainSpec(num_sites=12, boundary="periodic"))
        series = correlation_series(ops, 10.0, "zz", connected=True)
        self.assertEqual(series.separations, (1, 2, 3, 4, 5, 6))
        result = classify_decay(series)
        self.assertIs(result.decay_class, DecayClass.EXPONENTIAL)
        self.assertLess(result.xi, 1.0)
        self.assertTrue(result.staggered)
