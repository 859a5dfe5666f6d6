# Lint as: python3
# Copyright 2019 Google LLC
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Tests for gkp_prep_tool.protocols."""

import math
import unittest

from absl.testing import parameterized
import numpy as np
from scipy import integrate

from gkp_prep_tool import circuit
from gkp_prep_tool import constants
from gkp_prep_tool import errors
from gkp_prep_tool import protocols
from gkp_prep_tool import sim
from gkp_prep_tool import states

_GAUSS = constants.Backend.GAUSS
_GRID = constants.Backend.GRID


def _comb(length, delta):
  return states.build_state(states.StateSpec.comb(length, delta))


def _rows(report):
  return {row.name: row for row in report.rows}


def _ancilla(x, kappa):
  """S(log kappa)|vac> in closed form."""
  return math.sqrt(kappa) * math.pi**-0.25 * np.exp(-(kappa * x)**2 / 2)


def _quadrature_gaussification(branches, kappa, length, target, delta):
  """Acceptance probability and fidelity by direct numerical integration.

  The outcome integral runs through scipy quadrature cell by cell; the inner
  integrals over the input position are dense Riemann sums.
  """
  half = length // 8
  reach = length / 2 + half + 2
  step = delta / 8
  y = np.arange(-reach, reach + step, step)
  target_values = np.conj(target(y)) / math.sqrt(target.norm_sq())
  densities = [np.abs(b(y))**2 for b in branches]

  def density(x):
    weight = _ancilla(x - y, kappa)**2
    return sum(np.sum(weight * d) for d in densities) * step

  p_acc = numerator = 0.0
  for k in range(-half, half + 1):
    shifted = [target_values * b(y + k) for b in branches]

    def overlap_sq(x, k=k, shifted=shifted):
      kernel = _ancilla(x - k - y, kappa)
      return sum(abs(np.sum(kernel * s) * step)**2 for s in shifted)

    p_acc += integrate.quad(density, k - 0.5, k + 0.5, epsrel=1e-9)[0]
    numerator += integrate.quad(overlap_sq, k - 0.5, k + 0.5, epsrel=1e-9)[0]
  return p_acc, numerator / p_acc


class HelpersTest(parameterized.TestCase):

  @parameterized.parameters((0.5, 0), (-0.5, 0), (1.5, 1), (-1.5, -1),
                            (1.6, 2), (-1.6, -2), (0.2, 0), (3.0, 3))
  def testRoundHalfToZero(self, x, expected):
    self.assertEqual(protocols.round_half_to_zero(x), expected)

  def testUnitCells(self):
    cells = list(protocols.unit_cells(*protocols.acceptance_region(8)))
    self.assertEqual(cells, [(-1.5, -0.5, -1), (-0.5, 0.5, 0),
                             (0.5, 1.5, 1)])

  def testUnitCellsClipToRegion(self):
    cells = list(protocols.unit_cells(-0.2, 1.7))
    self.assertEqual(cells, [(-0.2, 0.5, 0), (0.5, 1.5, 1), (1.5, 1.7, 2)])

  @parameterized.parameters((0.05, 0.01), (0.2, 0.02), (0.01, 0.002))
  def testOutcomeResolution(self, kappa, expected):
    self.assertAlmostEqual(protocols.outcome_resolution(kappa), expected)


class CombTest(parameterized.TestCase):

  def testDoublingCircuitShape(self):
    doubling = protocols.build_v()
    self.assertLen(doubling, 4)
    self.assertEqual(circuit.op_count(doubling).unitaries, 4)

  @parameterized.parameters((1 / 32, 3, 23), (0.01, 3, 24), (0.04, 5, 33))
  def testOpCountIsExact(self, delta, rounds, expected):
    counts = circuit.op_count(protocols.comb_circuit(delta, rounds))
    self.assertEqual(counts.total, expected)
    self.assertEqual(counts.total, protocols.comb_op_bound(delta, rounds))

  def testCombFidelity(self):
    _, report = protocols.run_comb(0.04, 3, _GAUSS)
    self.assertGreaterEqual(report.fidelity, 0.99)
    self.assertGreaterEqual(report.extras['plus_weight'], 0.99)
    self.assertEqual(report.params['length'], 8)
    self.assertFalse(report.violated)
    self.assertEqual(_rows(report)['comb.op_count'].verdict,
                     constants.Verdict.HOLDS)

  def testGridAgreesWithAnalytic(self):
    _, analytic = protocols.run_comb(0.1, 2, _GAUSS)
    _, grid = protocols.run_comb(0.1, 2, _GRID)
    self.assertAlmostEqual(grid.fidelity, analytic.fidelity, places=5)
    self.assertAlmostEqual(grid.delta_p, analytic.delta_p, places=4)
    self.assertEqual(grid.backend, _GRID)

  def testRejectsBadParameters(self):
    with self.assertRaises(errors.ParameterError):
      protocols.run_comb(0.0, 3)
    with self.assertRaises(errors.ParameterError):
      protocols.comb_circuit(0.1, 0)

  @parameterized.parameters(*[(delta, rounds)
                              for delta in (0.01, 0.04)
                              for rounds in (1, 2, 3, 4)])
  def testGridStateMatchesAnalyticState(self, delta, rounds):
    analytic, _ = protocols.run_comb(delta, rounds, _GAUSS)
    grid, _ = protocols.run_comb(delta, rounds, _GRID)
    amplitude = sim.overlap_with(grid, analytic.branches)
    self.assertGreaterEqual(abs(amplitude)**2, 1 - 1e-6)

  @parameterized.parameters(*[(delta, rounds)
                              for delta in (0.01, 0.04)
                              for rounds in (1, 2, 3, 4)])
  def testGridFidelityConvergedInSpacing(self, delta, rounds):
    axis = protocols.comb_axis(delta, rounds)
    finer = sim.GridAxis(axis.x_min, axis.dx / 2, 2 * axis.n_points)
    _, coarse = protocols.run_comb(delta, rounds, _GRID)
    _, fine = protocols.run_comb(delta, rounds, _GRID, axis=finer)
    self.assertEqual(fine.extras['grid'], finer.describe())
    self.assertAlmostEqual(coarse.fidelity, fine.fidelity, delta=1e-4)

  def testGridRunIsReproducible(self):
    first, first_report = protocols.run_comb(0.04, 3, _GRID)
    second, second_report = protocols.run_comb(0.04, 3, _GRID)
    np.testing.assert_array_equal(first.branches, second.branches)
    self.assertEqual(first_report.fidelity, second_report.fidelity)
    self.assertEqual(first_report.delta_p, second_report.delta_p)

  def testDoubling(self):
    rows = protocols.doubling_check(0.05, 0.1)
    self.assertEqual([r.name for r in rows],
                     ['doubling.overlap', 'doubling.distance'])
    for row in rows:
      self.assertNotEqual(row.verdict, constants.Verdict.VIOLATED)

  def testDoublingRejectsLargeEpsilon(self):
    with self.assertRaises(errors.ParameterError):
      protocols.doubling_check(0.05, 0.25)

  def testIteratedDoubling(self):
    rows = protocols.iterated_doubling_check(0.05, 0.01, 3)
    self.assertLen(rows, 3)
    self.assertEqual([r.params['rounds'] for r in rows], [1, 2, 3])
    for row in rows:
      self.assertNotEqual(row.verdict, constants.Verdict.VIOLATED)
    with self.assertRaises(errors.ParameterError):
      protocols.iterated_doubling_check(0.05, 0.07, 3)


class InstrumentTest(parameterized.TestCase):

  def setUp(self):
    super(InstrumentTest, self).setUp()
    self.ancilla = protocols._ancilla_branch(0.2)
    self.comb = _comb(8, 0.05)

  def testAcceptanceMatchesConvolution(self):
    region = protocols.acceptance_region(8)
    profile = protocols.instrument_profile(self.ancilla, self.comb, region)
    self.assertAlmostEqual(profile.total, 1.0, places=6)
    self.assertGreater(profile.p_region, 0.0)
    self.assertLess(profile.p_region, 1.0)
    self.assertGreater(profile.conditional_overlap, 0.0)
    self.assertLessEqual(profile.conditional_overlap, 1.0 + 1e-6)

  def testSamplesFollowDensity(self):
    profile = protocols.instrument_profile(
        self.ancilla, self.comb, (-0.5, 0.5), outcomes=[0.0, 0.25])
    self.assertAlmostEqual(profile.p[0], profile.p_zero)
    self.assertGreater(profile.p[0], profile.p[1])

  def testRejectsOddAncilla(self):
    with self.assertRaises(errors.PreconditionError):
      protocols.instrument_profile(self.ancilla.translated(0.3), self.comb,
                                   (-0.5, 0.5))

  def testRejectsEmptyRegion(self):
    with self.assertRaises(errors.ParameterError):
      protocols.instrument_profile(self.ancilla, self.comb, (0.5, 0.5))

  def testGridSweepMatchesClosedForm(self):
    kappa, delta, length = 0.3, 0.05, 8
    comb = _comb(length, delta)
    state = protocols.sample_branches(
        [comb], protocols.gaussification_input_axis(length, delta))
    sweep = protocols.measurement_sweep(state, kappa, length,
                                        protocols.outcome_resolution(kappa))
    points = sweep.outcome_axis.points
    inside = np.abs(points) <= 2.0
    region = protocols.acceptance_region(length)
    ancilla = protocols._ancilla_branch(kappa)
    profile = protocols.instrument_profile(
        ancilla, comb, region, outcomes=points[inside])
    self.assertLess(np.max(np.abs(sweep.pdf[inside] - profile.p)), 1e-6)

    ensemble, report = protocols.run_gaussification(
        state, kappa, length, delta, with_stabilizers=False)
    self.assertAlmostEqual(report.p_acc, profile.p_region, delta=1e-4)
    product = ancilla.multiplied(comb)
    product = product.scaled(1 / math.sqrt(product.norm_sq()))
    overlap = float(
        np.real(ensemble.average(lambda s: sim.reduce_fidelity(s, product))))
    self.assertAlmostEqual(overlap, profile.conditional_overlap, delta=1e-4)


class GaussificationTest(parameterized.TestCase):

  @parameterized.parameters(12, 4, 0)
  def testRejectsLength(self, length):
    with self.assertRaises(errors.ParameterError):
      protocols.run_gaussification(_comb(8, 0.05), 0.2, length, 0.05)

  def testCircuitCounts(self):
    counts = circuit.op_count(
        protocols.gaussification_circuit(0.2), constants.CountMode.HERALDED,
        circuit.correction_counts(8).raw)
    self.assertEqual(counts.unitaries, 3)
    self.assertEqual(counts.measurements, 1)
    self.assertEqual(counts.total, 11)

  def testExactCombInput(self):
    ensemble, report = protocols.run_gaussification(
        _comb(8, 0.05), 0.2, 8, 0.05, _GAUSS, exact_input=True)
    self.assertAlmostEqual(report.extras['p_total'], 1.0, places=5)
    self.assertAlmostEqual(report.p_acc, ensemble.p_acc)
    self.assertAlmostEqual(
        report.p_acc, report.extras['instrument_p_acc'], places=4)
    self.assertGreater(report.fidelity, 0.0)
    self.assertLessEqual(report.fidelity, 1.0 + 1e-9)
    self.assertIsNotNone(report.delta_p)
    names = set(_rows(report))
    self.assertContainsSubset(
        {'gaussify.acceptance', 'gaussify.error_statement',
         'gaussify.error_derived', 'gaussify.exact_acceptance',
         'gaussify.closeness', 'gaussify.conditional_overlap'}, names)
    self.assertFalse(report.violated)

  def testCorrectionRecentresOutput(self):
    ensemble, _ = protocols.run_gaussification(
        _comb(8, 0.05), 0.2, 8, 0.05, _GAUSS, completeness=False,
        with_stabilizers=False)
    for entry in ensemble.entries:
      _, tr_sq = protocols.stabilizer_values(entry.state)
      self.assertLessEqual(abs(np.angle(tr_sq)) / (2 * math.pi), 0.05)

  def testCustomTargetHasNoRows(self):
    target = states.build_state(states.StateSpec.gkp_peakwise(0.3, 0.05))
    _, report = protocols.run_gaussification(
        _comb(8, 0.05), 0.2, 8, 0.05, _GAUSS, target=target,
        completeness=False, with_stabilizers=False)
    self.assertEmpty(report.rows)

  def testGridAgreesWithAnalytic(self):
    comb = _comb(8, 0.1)
    _, analytic = protocols.run_gaussification(
        comb, 0.4, 8, 0.1, _GAUSS, completeness=False, with_stabilizers=False)
    _, grid = protocols.run_gaussification(
        comb, 0.4, 8, 0.1, _GRID, with_stabilizers=False)
    self.assertEqual(grid.backend, _GRID)
    self.assertAlmostEqual(grid.extras['p_total'], 1.0, places=4)
    self.assertAlmostEqual(grid.p_acc, analytic.p_acc, places=3)
    self.assertAlmostEqual(grid.fidelity, analytic.fidelity, places=3)


class GkpTest(parameterized.TestCase):

  @parameterized.parameters((0.2, 3), (0.1, 4), (0.05, 5))
  def testRounds(self, kappa, expected):
    self.assertEqual(protocols.gkp_rounds(kappa), expected)

  @parameterized.parameters((0.2, 0.01, 35), (0.1, 0.0025, 42))
  def testOpCount(self, kappa, delta, expected):
    counts = circuit.op_count(
        protocols.gkp_circuit(kappa, delta), constants.CountMode.HERALDED,
        circuit.correction_counts(2**protocols.gkp_rounds(kappa)).raw)
    self.assertEqual(counts.total, expected)
    self.assertLessEqual(counts.total, protocols.gkp_op_bound(kappa, delta))

  def testRejectsShortComb(self):
    with self.assertRaises(errors.ParameterError):
      protocols.run_gkp(0.3, 0.05)

  @parameterized.parameters((0.2, 0.01), (0.1, 0.0025))
  def testAgreesWithQuadrature(self, kappa, delta):
    _, report = protocols.run_gkp(kappa, delta, _GAUSS)
    self.assertIsNotNone(report.delta_p)
    self.assertIsNotNone(report.delta_q)
    comb, _ = protocols.run_comb(delta, report.params['rounds'], _GAUSS)
    target = states.build_state(states.StateSpec.gkp_peakwise(kappa, delta))
    p_acc, fidelity = _quadrature_gaussification(
        comb.branches, kappa, report.params['length'], target, delta)
    self.assertAlmostEqual(report.p_acc, p_acc, delta=1e-3)
    self.assertAlmostEqual(report.fidelity, fidelity, delta=1e-3)
    self.assertFalse(report.violated)

  def testReportIsReproducible(self):
    _, first = protocols.run_gkp(0.2, 0.05, _GAUSS, with_stabilizers=False)
    _, second = protocols.run_gkp(0.2, 0.05, _GAUSS, with_stabilizers=False)
    self.assertEqual(first.p_acc, second.p_acc)
    self.assertEqual(first.fidelity, second.fidelity)
    self.assertEqual([r.measured for r in first.rows],
                     [r.measured for r in second.rows])

  def testEndToEnd(self):
    _, report = protocols.run_gkp(0.2, 0.05, _GAUSS)
    self.assertEqual(report.params['rounds'], 3)
    self.assertEqual(report.params['length'], 8)
    self.assertEqual(report.op_counts.total, 33)
    self.assertGreater(report.p_acc, 0.0)
    self.assertLess(report.p_acc, 1.0)
    self.assertGreater(report.extras['comb_fidelity'], 0.9)
    names = set(_rows(report))
    self.assertContainsSubset(
        {'comb.fidelity', 'gaussify.acceptance', 'gkp.acceptance',
         'gkp.error', 'gkp.op_count', 'gkp.complexity_lower'}, names)
    self.assertFalse(report.violated)
    as_dict = report.as_dict()
    self.assertEqual(as_dict['protocol'], 'gkp')
    self.assertEqual(as_dict['backend'], 'gauss')


class StabilityTest(parameterized.TestCase):

  def testIdenticalInputs(self):
    comb = _comb(8, 0.1)
    report = protocols.stability_audit([comb], [comb], 0.2, 8, 0.1)
    self.assertAlmostEqual(report.delta, 0.0, places=6)
    self.assertAlmostEqual(report.p_reference, report.p_perturbed)
    self.assertFalse(report.violated)

  @parameterized.parameters('shift', 'width', 'leakage')
  def testPerturbations(self, name):
    inputs = protocols.perturbed_inputs(8, 0.1)
    report = protocols.stability_audit([_comb(8, 0.1)], inputs[name], 0.2, 8,
                                       0.1, name=name)
    self.assertGreater(report.delta, 0.0)
    self.assertLessEqual(report.delta, 2.0 + 1e-9)
    self.assertFalse(report.violated)
    self.assertEqual(report.as_dict()['name'], name)

  def testLeakageIsMixed(self):
    leakage = protocols.perturbed_inputs(8, 0.1)['leakage']
    self.assertLen(leakage, 2)
    total = sum(b.norm_sq() for b in leakage)
    self.assertAlmostEqual(total, 1.0, places=8)


if __name__ == '__main__':
  unittest.main()
