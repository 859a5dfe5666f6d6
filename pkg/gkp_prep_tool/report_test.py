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
"""Tests for gkp_prep_tool.report."""

import contextlib
import csv
import io
import os
import tempfile
import unittest

from absl.testing import parameterized

from gkp_prep_tool import bounds
from gkp_prep_tool import constants
from gkp_prep_tool import report

_AT_MOST = constants.Relation.AT_MOST


def _row(name, measured, rhs=0.5, **params):
  return bounds.judge(name, params or {'delta': 0.1}, rhs, measured, _AT_MOST,
                      trivial=2.0)


class ReportBucketTest(parameterized.TestCase):

  def setUp(self):
    super(ReportBucketTest, self).setUp()
    self.bucket = report.ReportBucket()

  def testAddRows(self):
    self.bucket.add_row('comb', _row('a', 0.1))
    self.bucket.add_row('comb', _row('b', 0.2))
    self.bucket.add_rows('gkp', [_row('c', 0.3)])

    current_bucket = self.bucket.bucket
    self.assertLen(current_bucket, 2)
    self.assertEqual([r.name for r in current_bucket['comb']], ['a', 'b'])
    self.assertEqual([s for s, _ in self.bucket.rows()],
                     ['comb', 'comb', 'gkp'])

  def testViolatedAndCounts(self):
    self.bucket.add_row('x', _row('ok', 0.1))
    self.assertFalse(self.bucket.violated)
    self.bucket.add_row('x', _row('bad', 0.9))
    self.bucket.add_row('y', _row('empty', 0.9, rhs=3.0))
    self.assertTrue(self.bucket.violated)
    self.assertEqual(self.bucket.counts(), {
        'holds': 1,
        'violated': 1,
        'vacuous': 1
    })

  def testPrintBuckets(self):
    self.bucket.add_row('z', _row('bad', 0.9))
    self.bucket.add_row('a', _row('ok', 0.1))
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
      self.bucket.print_buckets()
    text = out.getvalue()
    self.assertLess(text.index('Section: a'), text.index('Section: z'))
    self.assertIn('VIOLATED', text)
    self.assertIn('ACTION', text)

  def testWriteCsv(self):
    self.bucket.add_row('tails', _row('t', 0.1, kappa=0.05, radius=2.0))
    self.bucket.add_row('formulas', _row('f', None, delta=0.1))
    path = os.path.join(tempfile.mkdtemp(), 'rows.csv')
    self.bucket.write_csv(path)
    with open(path, newline='') as f:
      lines = list(csv.DictReader(f))
    self.assertLen(lines, 2)
    self.assertEqual(lines[0]['suite'], 'formulas')
    self.assertEqual(lines[0]['measured'], '')
    self.assertEqual(lines[1]['kappa'], '0.05')
    self.assertEqual(lines[1]['delta'], '')
    self.assertEqual(lines[1]['verdict'], 'holds')


class FormatTest(parameterized.TestCase):

  @parameterized.parameters((None, '-'), (0.5, '0.5'), (float('inf'), 'inf'),
                            (3, '3'))
  def testFormatValue(self, value, expected):
    self.assertEqual(report.format_value(value), expected)

  def testFormatRowListsParameters(self):
    text = report.format_row(_row('comb.fidelity', 0.1, kappa=0.2, delta=0.1))
    self.assertIn('HOLDS', text)
    self.assertIn('delta=0.1, kappa=0.2', text)


if __name__ == '__main__':
  unittest.main()
