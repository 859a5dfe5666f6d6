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
"""Tests for gkp_prep_tool.suites."""

import unittest
from unittest import mock

from absl.testing import parameterized
import numpy as np

from gkp_prep_tool import bounds
from gkp_prep_tool import circuit
from gkp_prep_tool import constants
from gkp_prep_tool import suites

_VIOLATED = constants.Verdict.VIOLATED


class FormulasTest(parameterized.TestCase):

  def _assertNoViolation(self, rows):
    self.assertNotEmpty(rows)
    for row in rows:
      self.assertNotEqual(row.verdict, _VIOLATED, row)

  def testPeakOverlaps(self):
    rows = suites.peak_overlap_rows()
    self.assertLen(rows, len(constants.OVERLAP_DELTAS))
    for row in rows:
      self.assertEqual(row.verdict, constants.Verdict.HOLDS, row)

  def testSeriesBracketing(self):
    rows = suites.series_rows(points=12)
    # CENTERED is bracketed on both sides, the others on one.
    self.assertLen(rows, 5)
    self._assertNoViolation(rows)

  def testNormalization(self):
    rows = suites.normalization_rows(grid=(0.05, 0.2))
    self.assertLen(rows, 4 * 6)
    self._assertNoViolation(rows)

  def testTruncation(self):
    self._assertNoViolation(
        suites.truncation_rows(deltas=(0.01,), lengths=(8,)))

  def testStabilizers(self):
    rows = suites.stabilizer_rows()
    self.assertEqual([r.name for r in rows],
                     ['formulas.stabilizer_shift', 'formulas.stabilizer_phase'])
    for row in rows:
      self.assertEqual(row.verdict, constants.Verdict.HOLDS, row)

  def testConvolution(self):
    rows = suites.convolution_rows(lengths=(8,))
    self.assertLen(rows, 2)
    self._assertNoViolation(rows)


class TailsTest(parameterized.TestCase):

  def testSmallGrid(self):
    options = suites.SuiteOptions(
        kappas=(0.1,), deltas=(0.005,), radii=(1.0, 5.0))
    rows = suites.tails_suite(options)
    self.assertLen(rows, 8)
    for row in rows:
      self.assertNotEqual(row.verdict, _VIOLATED, row)
      self.assertNotEqual(row.verdict, constants.Verdict.PRECONDITION_UNMET)

  def testPreconditionOutsideRange(self):
    options = suites.SuiteOptions(kappas=(0.1,), deltas=(0.05,), radii=(1.0,))
    rows = suites.tails_suite(options)
    for row in rows:
      self.assertEqual(row.verdict, constants.Verdict.PRECONDITION_UNMET)
      self.assertIn('delta', row.note)


class MomentsTest(parameterized.TestCase):

  def testRandomGatesAreBounded(self):
    rng = np.random.Generator(np.random.Philox(7))
    for _ in range(100):
      self.assertIsNone(circuit.validate_bounded(suites.random_gate(rng)))

  def testFewTrials(self):
    rows = suites.moments_suite(suites.SuiteOptions(gates=4, trials=3))
    names = {r.name for r in rows}
    self.assertIn('moments.energy_limit', names)
    self.assertIn('moments.markov_window', names)
    for row in rows:
      self.assertNotEqual(row.verdict, _VIOLATED, row)

  def testDeterministic(self):
    options = suites.SuiteOptions(gates=3, trials=2, seed=11)
    first = [r.measured for r in suites.moments_suite(options)]
    second = [r.measured for r in suites.moments_suite(options)]
    self.assertEqual(first, second)


class RunSuiteTest(parameterized.TestCase):

  def testAllRunsEverySuite(self):
    row = bounds.judge('x', {}, 1.0, 0.5, constants.Relation.AT_MOST)
    fakes = {suite: (lambda options: [row]) for suite in suites.SUITES}
    with mock.patch.dict(suites.SUITES, fakes):
      results = suites.run_suite(constants.Suite.ALL, suites.SuiteOptions())
    self.assertEqual(
        sorted(results), ['formulas', 'moments', 'stability', 'tails'])

  def testSingleSuiteByName(self):
    with mock.patch.dict(suites.SUITES,
                         {constants.Suite.TAILS: lambda options: []}):
      results = suites.run_suite('tails', suites.SuiteOptions())
    self.assertEqual(results, {'tails': []})


if __name__ == '__main__':
  unittest.main()
