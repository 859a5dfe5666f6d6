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
"""Tests for gkp_prep_tool.preconditions."""

import unittest

from absl.testing import parameterized

from gkp_prep_tool import preconditions


class PreconditionsTest(parameterized.TestCase):

  @parameterized.parameters((0.1, True), (0.25, False), (0.0, False),
                            (-1.0, False))
  def testRangeIsExclusive(self, kappa, expected):
    self.assertEqual(
        preconditions.SMALL_KAPPA.is_satisfied({'kappa': kappa}), expected)

  def testMissingParameterDoesNotMatch(self):
    self.assertFalse(preconditions.SMALL_KAPPA.is_satisfied({}))
    self.assertFalse(preconditions.HERALDED_LOWER.is_satisfied({'kappa': 0.1}))

  @parameterized.parameters((8, True), (64, True), (12, False), (0, False),
                            (8.5, False))
  def testMultipleOfEight(self, length, expected):
    params = {'kappa': 0.2, 'delta': 0.01, 'length': length}
    self.assertEqual(
        preconditions.GAUSSIFICATION.is_satisfied(params), expected)

  def testUnmetListsEveryFailure(self):
    unmet = preconditions.GAUSSIFICATION.unmet({
        'kappa': 0.3,
        'delta': 0.01,
        'length': 12
    })
    self.assertEqual(unmet, ['kappa in (0, 0.25)', 'length in 8N'])

  def testLowerBoundConditions(self):
    self.assertTrue(
        preconditions.UNITARY_LOWER.is_satisfied({
            'kappa': 1e-4,
            'delta': 1e-4
        }))
    self.assertFalse(
        preconditions.UNITARY_LOWER.is_satisfied({
            'kappa': 0.01,
            'delta': 0.01
        }))
    self.assertFalse(
        preconditions.HERALDED_LOWER.is_satisfied({
            'kappa': 1e-4,
            'delta': 1e-4,
            'p': 0.1,
            'epsilon': 0.2
        }))

  def testEmptyPreconditionsAlwaysHold(self):
    self.assertTrue(preconditions.NONE.is_satisfied({}))


if __name__ == '__main__':
  unittest.main()
