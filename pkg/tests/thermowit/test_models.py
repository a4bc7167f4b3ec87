"""Unittest module for spin-chain models."""

import sys
import unittest

import numpy as np
import pytest

sys.path.append("..")  # Adds higher directory to python modules path.
from thermowit.core import PAULI_X, HermitianOperator, embed_local, eigh
from thermowit.models import (
    Boundary,
    ChainSpec,
    ModelKind,
    ModelOperators,
    bonds,
    build,
    ground_state_overlap,
    separable_energy_bound,
    spectral_gap,
    spin_exchange_to_pauli,
)
from utils.errors import ConfigError, NumericalError


def site_rotation(num_sites, shift):
    """Permutation matrix moving site i to site i + shift on a ring."""
    dim = 2**num_sites
    perm = np.zeros((dim, dim))
    for index in range(dim):
        bits = [(index >> (num_sites - 1 - site)) & 1 for site in range(num_sites)]
        rotated = [bits[(site - shift) % num_sites] for site in range(num_sites)]
        perm[int("".join(map(str, rotated)), 2), index] = 1.0
    return perm


def global_flip(num_sites):
    flip = np.ones((1, 1))
    for _ in range(num_sites):
        flip = np.kron(flip, PAULI_X)
    return flip


class ChainSpecTestCase(unittest.TestCase):
    def test_validation(self):
        for kwargs in (
            {"num_sites": 1},
            {"num_sites": 13},
            {"num_sites": 2.5},
            {"num_sites": 5, "model": "alternating"},
            {"num_sites": 4, "model": "alternating", "j1": 0.0},
            {"num_sites": 4, "model": "alternating", "j2": -0.1},
            {"num_sites": 4, "model": "ising"},
            {"num_sites": 4, "boundary": "twisted"},
            {"num_sites": 4, "field": float("nan")},
        ):
            with self.assertRaises(ConfigError, msg=str(kwargs)):
                ChainSpec(**kwargs)

    def test_zero_coupling_allowed(self):
        self.assertEqual(ChainSpec(num_sites=3, j=0.0).j, 0.0)

    def test_strings_become_enums(self):
        spec = ChainSpec(num_sites=4, model="xx", boundary="periodic")
        self.assertIs(spec.model, ModelKind.XX)
        self.assertIs(spec.boundary, Boundary.PERIODIC)

    def test_record_round_trip(self):
        spec = ChainSpec(num_sites=6, model="alternating", j1=1.0, j2=0.25, field=0.5)
        self.assertEqual(ChainSpec.from_record(spec.to_record()), spec)


class BondsTestCase(unittest.TestCase):
    def test_open_and_periodic(self):
        self.assertEqual(len(bonds(ChainSpec(num_sites=4))), 3)
        self.assertEqual(len(bonds(ChainSpec(num_sites=4, boundary="periodic"))), 4)
        # two sites on a ring keep a single bond
        self.assertEqual(len(bonds(ChainSpec(num_sites=2, boundary="periodic"))), 1)

    def test_alternating_couplings(self):
        spec = ChainSpec(num_sites=4, model="alternating", j1=1.0, j2=0.3, boundary="periodic")
        self.assertEqual(bonds(spec), [(0, 1, 1.0), (1, 2, 0.3), (2, 3, 1.0), (3, 0, 0.3)])
        self.assertEqual(separable_energy_bound(spec), (4, 1.0))

    def test_spin_convention(self):
        self.assertAlmostEqual(spin_exchange_to_pauli(0.44), 0.11, places=15)


class BuildTestCase(unittest.TestCase):
    def test_dimer_spectrum(self):
        ops = build(ChainSpec.dimer())
        np.testing.assert_allclose(
            eigh(ops.h_exchange).eigenvalues, [-3.0, 1.0, 1.0, 1.0], atol=1e-12
        )

    def test_dimer_level_crossing(self):
        at_crossing = spectral_gap(build(ChainSpec.dimer(field=4.0)))
        self.assertTrue(at_crossing.degenerate)
        self.assertEqual(at_crossing.ground_degeneracy, 2)
        below = spectral_gap(build(ChainSpec.dimer(field=4.0 - 1e-6)))
        above = spectral_gap(build(ChainSpec.dimer(field=4.0 + 1e-6)))
        self.assertAlmostEqual(below.gap, 1e-6, delta=1e-9)
        self.assertAlmostEqual(above.gap, 1e-6, delta=1e-9)

    def test_ground_state_overlap(self):
        spec = ChainSpec.dimer()
        self.assertAlmostEqual(ground_state_overlap(spec, 1.0, 3.0), 1.0, places=10)
        self.assertAlmostEqual(ground_state_overlap(spec, 3.5, 4.5), 0.0, places=10)
        with self.assertRaises(NumericalError):
            ground_state_overlap(spec, 4.0, 1.0)

    def test_magnetization_conserved(self):
        for spec in (
            ChainSpec(num_sites=5, model="xxx", boundary="periodic"),
            ChainSpec(num_sites=5, model="xx"),
            ChainSpec(num_sites=6, model="alternating", j2=0.4, boundary="periodic"),
        ):
            ops = build(spec)
            self.assertLess(ops.h_exchange.commutator_norm(ops.magnetization), 1e-10)

    def test_xxx_su2_symmetry(self):
        ops = build(ChainSpec(num_sites=5, boundary="periodic"))
        self.assertLess(ops.h_exchange.commutator_norm(ops.transverse_magnetization()), 1e-10)
        xx = build(ChainSpec(num_sites=4, model="xx"))
        self.assertGreater(xx.h_exchange.commutator_norm(xx.transverse_magnetization()), 1e-3)

    def test_alternating_decoupled_dimers_gap(self):
        ops = build(ChainSpec(num_sites=4, model="alternating", j1=1.0, j2=0.0))
        gap = spectral_gap(ops)
        self.assertFalse(gap.degenerate)
        self.assertAlmostEqual(gap.gap, 4.0, places=10)

    def test_alternating_gap_close_to_dimer(self):
        ops = build(ChainSpec(num_sites=8, model="alternating", j1=1.0, j2=0.1))
        self.assertAlmostEqual(spectral_gap(ops).gap / 4.0, 1.0, delta=0.35)

    def test_total_hamiltonian_consistency(self):
        ops = build(ChainSpec(num_sites=3, field=0.7))
        with self.assertRaises(ConfigError):
            ModelOperators(ops.spec, ops.h_exchange, ops.magnetization, ops.h_exchange)

    def test_transverse_magnetization(self):
        ops = build(ChainSpec(num_sites=2))
        expected = 0.5 * (embed_local(PAULI_X, 0, 2).entries + embed_local(PAULI_X, 1, 2).entries)
        np.testing.assert_allclose(ops.transverse_magnetization().entries, expected)


class SymmetryTestCase(unittest.TestCase):
    def test_ring_translation(self):
        for spec, shift in (
            (ChainSpec(num_sites=6, boundary="periodic", field=0.7), 1),
            (ChainSpec(num_sites=5, model="xx", boundary="periodic", field=1.1), 1),
            (ChainSpec(num_sites=6, model="alternating", j2=0.3, boundary="periodic"), 2),
        ):
            ops = build(spec)
            perm = site_rotation(spec.num_sites, shift)
            rotated = perm @ ops.h_total.entries @ perm.T
            np.testing.assert_allclose(rotated, ops.h_total.entries, atol=1e-12, err_msg=spec.model.value)
            np.testing.assert_allclose(
                eigh(HermitianOperator(rotated)).eigenvalues,
                eigh(ops.h_total).eigenvalues,
                atol=1e-10,
            )

    def test_open_chain_is_not_translation_invariant(self):
        ops = build(ChainSpec(num_sites=4))
        perm = site_rotation(4, 1)
        self.assertGreater(np.abs(perm @ ops.h_exchange.entries @ perm.T - ops.h_exchange.entries).max(), 0.5)

    def test_global_spin_flip(self):
        for spec in (
            ChainSpec(num_sites=4),
            ChainSpec(num_sites=5, model="xx", boundary="periodic"),
            ChainSpec(num_sites=4, model="alternating", j2=0.6),
        ):
            ops = build(spec.with_field(0.9))
            flip = global_flip(spec.num_sites)
            np.testing.assert_allclose(flip @ ops.h_exchange.entries @ flip, ops.h_exchange.entries, atol=1e-12)
            np.testing.assert_allclose(
                flip @ ops.magnetization.entries @ flip, -ops.magnetization.entries, atol=1e-12
            )
            # only the zero-field Hamiltonian is flip symmetric
            zero = build(spec.with_field(0.0))
            np.testing.assert_allclose(flip @ zero.h_total.entries @ flip, zero.h_total.entries, atol=1e-12)

    def test_decoupled_dimers_spectrum(self):
        ops = build(ChainSpec(num_sites=4, model="alternating", j1=1.0, j2=0.0))
        dimer = np.array([-3.0, 1.0, 1.0, 1.0])
        expected = np.sort(np.add.outer(dimer, dimer).ravel())
        np.testing.assert_allclose(eigh(ops.h_exchange).eigenvalues, expected, atol=1e-10)


@pytest.mark.slow
class ExtensivityTestCase(unittest.TestCase):
    def test_ground_energy_per_bond(self):
        per_bond = []
        for n in (8, 12):
            spec = ChainSpec(num_sites=n, boundary="periodic")
            per_bond.append(eigh(build(spec).h_exchange).ground_energy / len(bonds(spec)))
        self.assertLess(abs(per_bond[1] / per_bond[0] - 1.0), 0.1, per_bond)
