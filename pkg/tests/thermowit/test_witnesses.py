"""Unittest module for thermodynamic entanglement witnesses."""

import itertools
import math
import sys
import unittest
from unittest import mock

import numpy as np
import pytest
from scipy.ndimage import label

sys.path.append("..")  # Adds higher directory to python modules path.
from thermowit.core import DensityMatrix, expectation, negativity, product_state_vector
from thermowit.models import ChainSpec, build, exchange_axes, separable_energy_bound
from thermowit.oracle import coupling_matrix, product_energy
from thermowit.thermal import ThermalEnsemble
from thermowit.witnesses import (
    PhaseCell,
    PhaseDiagram,
    Verdict,
    WitnessId,
    WitnessVerdict,
    energy_witness,
    evaluate_point,
    gap_transition_estimate,
    susceptibility_witness,
    sweep,
)
from utils.errors import ConfigError, NumericalError, SweepCellError
from utils.validators import K_B_MEV_PER_K

ENERGY_CROSSING = 4.0 / math.log(9.0)
SUSCEPTIBILITY_CROSSING = 4.0 / math.log(3.0)


class WitnessTestCase(unittest.TestCase):
    def test_energy_witness_dimer_ground_state(self):
        verdict = energy_witness(u=-3.0, field=0.0, m=0.0, num_sites=2, j=1.0)
        self.assertTrue(verdict.entangled)
        self.assertEqual(verdict.value, 3.0)
        self.assertEqual(verdict.bound, 2.0)
        self.assertEqual(verdict.margin, 1.0)
        self.assertEqual(verdict.normalized, 1.5)

    def test_energy_witness_adds_back_zeeman_term(self):
        verdict = energy_witness(u=-5.0, field=2.0, m=1.0, num_sites=2, j=1.0)
        self.assertEqual(verdict.value, 3.0)

    def test_energy_witness_errors(self):
        with self.assertRaises(ConfigError):
            energy_witness(-3.0, 0.0, 0.0, 1, 1.0)
        with self.assertRaises(ConfigError):
            energy_witness(-3.0, 0.0, 0.0, 2, 0.0)

    def test_susceptibility_witness(self):
        verdict = susceptibility_witness(chi=0.1, temperature=1.0, num_sites=2)
        self.assertAlmostEqual(verdict.bound, 4.0 / 3.0)
        self.assertTrue(verdict.entangled)
        self.assertFalse(susceptibility_witness(2.0, 1.0, 2).entangled)
        with self.assertRaises(ConfigError):
            susceptibility_witness(0.1, 0.0, 2)

    def test_zero_margin_is_unknown(self):
        verdict = energy_witness(u=-2.0, field=0.0, m=0.0, num_sites=2, j=1.0)
        self.assertIs(verdict.verdict, Verdict.UNKNOWN)

    def test_verdict_must_match_margin(self):
        with self.assertRaises(ConfigError):
            WitnessVerdict(WitnessId.ENERGY, 1.0, 2.0, -1.0, Verdict.ENTANGLED)

    def test_record_round_trip(self):
        cell = evaluate_point(ChainSpec(num_sites=3, field=0.5), 0.7)
        self.assertEqual(PhaseCell.from_record(cell.to_record()), cell)

    def test_gap_transition_estimate(self):
        self.assertAlmostEqual(gap_transition_estimate(0.44, K_B_MEV_PER_K), 5.106, places=3)
        self.assertEqual(gap_transition_estimate(2.0), 2.0)
        with self.assertRaises(ConfigError):
            gap_transition_estimate(0.0)


class WitnessInvariantTestCase(unittest.TestCase):
    def test_flags_do_not_return_on_heating(self):
        t_axis = tuple(np.linspace(0.1, 8.0, 25))
        b_axis = tuple(np.linspace(0.0, 8.0, 9))
        for spec in (
            ChainSpec.dimer(),
            ChainSpec(num_sites=4),
            ChainSpec(num_sites=6, boundary="periodic"),
            ChainSpec(num_sites=4, model="alternating", j1=1.0, j2=0.5),
        ):
            diagram = sweep(spec, t_axis, b_axis)
            for witness_id in WitnessId:
                for field, row in zip(b_axis, diagram.entangled_mask(witness_id)):
                    flagged = np.flatnonzero(row)
                    if flagged.size:
                        # one contiguous run of flagged temperatures
                        self.assertEqual(
                            flagged[-1] - flagged[0] + 1, flagged.size,
                            f"{spec.model.value} N={spec.num_sites} {witness_id.value} B={field:g}",
                        )

    def test_zero_field_energy_margin_shrinks_on_heating(self):
        t_axis = tuple(np.geomspace(0.05, 20.0, 30))
        for spec in (ChainSpec.dimer(), ChainSpec(num_sites=5), ChainSpec(num_sites=6, boundary="periodic")):
            (row,) = sweep(spec, t_axis, (0.0,)).cells
            margins = [cell.energy.margin for cell in row]
            self.assertTrue(all(b <= a + 1e-12 for a, b in zip(margins, margins[1:])), margins)

    def test_single_cell_sweep_matches_point(self):
        spec = ChainSpec(num_sites=4, model="xx", boundary="periodic")
        ((cell,),) = sweep(spec, (0.7,), (1.5,)).cells
        self.assertEqual(cell.to_record(), evaluate_point(spec.with_field(1.5), 0.7).to_record())

    def test_hot_grid_is_unknown(self):
        for spec in (ChainSpec(num_sites=4), ChainSpec(num_sites=4, model="xx", boundary="periodic")):
            diagram = sweep(spec, (50.0, 100.0, 200.0), (0.0, 1.0, 2.0))
            for cell in diagram.rows():
                self.assertIs(cell.energy.verdict, Verdict.UNKNOWN)
                self.assertIs(cell.susceptibility.verdict, Verdict.UNKNOWN)

    def test_product_states_never_flag_energy(self):
        rng = np.random.default_rng(2024)
        for spec in (
            ChainSpec(num_sites=4),
            ChainSpec(num_sites=5, boundary="periodic"),
            ChainSpec(num_sites=6, model="xx", boundary="periodic"),
            ChainSpec(num_sites=6, model="alternating", j1=1.0, j2=0.7),
        ):
            coupling, axes = coupling_matrix(spec), exchange_axes(spec)
            vectors = rng.standard_normal((10_000, spec.num_sites, 3))
            vectors /= np.linalg.norm(vectors, axis=2, keepdims=True)
            energies = product_energy(coupling, axes, vectors)
            num_sites, j = separable_energy_bound(spec)
            self.assertLessEqual(np.abs(energies).max(), num_sites * j + 1e-12)
            for u in (energies.min(), energies.max()):
                verdict = energy_witness(u=u, field=0.0, m=0.0, num_sites=num_sites, j=j)
                self.assertIs(verdict.verdict, Verdict.UNKNOWN)
            # the Bloch-vector energy is the expectation in the product state
            state = DensityMatrix.from_pure(product_state_vector(vectors[0]))
            self.assertAlmostEqual(expectation(state, build(spec).h_exchange), energies[0], places=10)


class DimerCrossingTestCase(unittest.TestCase):
    def test_energy_witness_flips_at_closed_form(self):
        spec = ChainSpec.dimer()
        self.assertTrue(evaluate_point(spec, 0.999 * ENERGY_CROSSING).energy.entangled)
        self.assertFalse(evaluate_point(spec, 1.001 * ENERGY_CROSSING).energy.entangled)

    def test_susceptibility_witness_flips_at_closed_form(self):
        spec = ChainSpec.dimer()
        self.assertTrue(evaluate_point(spec, 0.999 * SUSCEPTIBILITY_CROSSING).susceptibility.entangled)
        self.assertFalse(
            evaluate_point(spec, 1.001 * SUSCEPTIBILITY_CROSSING).susceptibility.entangled
        )

    def test_susceptibility_uses_zero_field(self):
        spec = ChainSpec.dimer()
        at_zero = evaluate_point(spec, 1.0).susceptibility
        at_field = evaluate_point(spec.with_field(3.0), 1.0).susceptibility
        self.assertEqual(at_zero, at_field)


class SweepTestCase(unittest.TestCase):
    def test_shape_and_order(self):
        diagram = sweep(ChainSpec(num_sites=4), (0.5, 1.0, 2.0), (0.0, 2.0))
        self.assertEqual(diagram.shape, (2, 3))
        rows = list(diagram.rows())
        self.assertEqual([cell.point.field for cell in rows], [0.0] * 3 + [2.0] * 3)
        self.assertEqual(diagram.entangled_mask(WitnessId.ENERGY).shape, (2, 3))

    def test_workers_do_not_change_result(self):
        spec = ChainSpec(num_sites=4, model="xx", boundary="periodic")
        t_axis, b_axis = (0.3, 0.9, 2.7), (0.0, 0.5, 1.0, 1.5, 2.0)
        serial = sweep(spec, t_axis, b_axis, max_workers=1)
        parallel = sweep(spec, t_axis, b_axis, max_workers=3)
        self.assertEqual(
            [cell.to_record() for cell in serial.rows()],
            [cell.to_record() for cell in parallel.rows()],
        )

    def test_axis_validation(self):
        spec = ChainSpec.dimer()
        for t_axis, b_axis in (((0.0, 1.0), (0.0,)), ((2.0, 1.0), (0.0,)), ((1.0,), ()), ((1.0,), (1.0, 1.0))):
            with self.assertRaises(ConfigError):
                sweep(spec, t_axis, b_axis)
        with self.assertRaises(ConfigError):
            sweep(spec, (1.0,), (0.0,), max_workers=0)

    def test_incomplete_grid(self):
        cell = evaluate_point(ChainSpec.dimer(), 1.0)
        with self.assertRaises(ConfigError):
            PhaseDiagram(ChainSpec.dimer(), (1.0, 2.0), (0.0,), ((cell,),))

    @mock.patch("thermowit.witnesses.evaluate_cell", side_effect=NumericalError("non-finite Gibbs weights"))
    def test_cell_failure_carries_coordinates(self, _):
        with self.assertRaises(SweepCellError) as context:
            sweep(ChainSpec.dimer(), (0.5, 1.0), (2.0,))
        self.assertEqual(context.exception.temperature, 0.5)
        self.assertEqual(context.exception.field, 2.0)
        self.assertIn("non-finite Gibbs weights", str(context.exception))

    @mock.patch("thermowit.witnesses.evaluate_cell", side_effect=ConfigError("coupling must be nonzero"))
    def test_cell_precondition_stays_config_error(self, _):
        with self.assertRaises(ConfigError) as context:
            sweep(ChainSpec.dimer(), (0.5, 1.0), (2.0,))
        self.assertNotIsInstance(context.exception, SweepCellError)
        self.assertEqual(context.exception.exit_code, 2)
        self.assertEqual(context.exception.context, {"temperature": 0.5, "field": 2.0})


def _bipartitions(num_sites):
    sites = range(num_sites)
    for size in range(1, num_sites // 2 + 1):
        yield from itertools.combinations(sites, size)


def _npt(ensemble, temperature):
    rho = ensemble.state(temperature)
    return any(negativity(rho, part) > 0 for part in _bipartitions(ensemble.num_sites))


@pytest.mark.slow
class WitnessSoundnessTestCase(unittest.TestCase):
    """Every entangled verdict is backed by a negative partial transpose."""

    def test_small_chains(self):
        t_axis = tuple(np.linspace(0.1, 6.0, 20))
        b_axis = tuple(np.linspace(0.0, 12.0, 20))
        for spec in (
            ChainSpec.dimer(),
            ChainSpec(num_sites=4),
            ChainSpec(num_sites=4, model="xx", boundary="periodic"),
            ChainSpec(num_sites=4, model="alternating", j1=1.0, j2=0.5),
        ):
            diagram = sweep(spec, t_axis, b_axis)
            zero_field = ThermalEnsemble(build(spec.with_field(0.0)), with_transverse=False)
            for b_index, field in enumerate(b_axis):
                ensemble = ThermalEnsemble(build(spec.with_field(field)), with_transverse=False)
                for t_index, temperature in enumerate(t_axis):
                    cell = diagram.cells[b_index][t_index]
                    msg = f"{spec.model.value} N={spec.num_sites} T={temperature:g} B={field:g}"
                    if cell.energy.entangled:
                        self.assertTrue(_npt(ensemble, temperature), msg)
                    # the susceptibility verdict describes the zero-field state
                    if cell.susceptibility.entangled:
                        self.assertTrue(_npt(zero_field, temperature), msg)


@pytest.mark.slow
class PhaseLobeTestCase(unittest.TestCase):
    """Energy-witness lobe of the eight-site chain."""

    def test_single_shrinking_lobe(self):
        t_axis = tuple(np.linspace(0.1, 6.0, 12))
        b_axis = tuple(np.linspace(0.0, 14.0, 15))
        mask = sweep(ChainSpec(num_sites=8), t_axis, b_axis).entangled_mask(WitnessId.ENERGY)
        extents = []
        for t_index in range(len(t_axis)):
            column = mask[:, t_index]
            extent = int(np.count_nonzero(column))
            # entangled fields form a prefix starting at B = 0
            self.assertTrue(np.all(column[:extent]), t_index)
            self.assertFalse(np.any(column[extent:]), t_index)
            extents.append(extent)
        self.assertTrue(all(a >= b for a, b in zip(extents, extents[1:])), extents)
        self.assertGreater(extents[0], 0)
        self.assertLess(extents[0], len(b_axis))
        self.assertEqual(extents[-1], 0)
        _, lobes = label(mask)
        self.assertEqual(lobes, 1)
