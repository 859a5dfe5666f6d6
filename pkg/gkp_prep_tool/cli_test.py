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
"""Tests for gkp_prep_tool.cli."""

import csv
import json
import math
import os
import unittest
from unittest import mock

from absl import flags
from absl.testing import flagsaver
from absl.testing import parameterized
import numpy as np

import circuitparse
from gkp_prep_tool import bounds
from gkp_prep_tool import cli
from gkp_prep_tool import constants
from gkp_prep_tool import errors
from gkp_prep_tool import sim
from gkp_prep_tool import suites

FLAGS = flags.FLAGS

_EXIT = constants.ExitCode


class CliTest(parameterized.TestCase):

  def setUp(self):
    super(CliTest, self).setUp()
    if not FLAGS.is_parsed():
      FLAGS.mark_as_parsed()
    self.tmp = self.create_tempdir().full_path
    self.out = os.path.join(self.tmp, 'report.json')

  def _document(self):
    with open(self.out) as f:
      return json.load(f)

  def testMainNeedsCommand(self):
    self.assertEqual(cli.main(['gkp_prep']), _EXIT.USAGE)
    self.assertEqual(cli.main(['gkp_prep', 'bogus']), _EXIT.USAGE)

  def testBadFlagExitsWithUsageCode(self):
    with self.assertRaises(SystemExit) as raised:
      cli.parse_flags(['gkp_prep', '--backend=bogus'])
    self.assertEqual(raised.exception.code, _EXIT.USAGE)

  @flagsaver.flagsaver
  def testHyphenatedFlagNames(self):
    dump = os.path.join(self.tmp, 'comb.npz')
    rest = cli.parse_flags([
        'gkp_prep', 'comb', '--dump-state=' + dump, '--grid-half-width', '9',
        '--', '--not-a-flag'
    ])
    self.assertEqual(rest, ['gkp_prep', 'comb', '--not-a-flag'])
    self.assertEqual(FLAGS.dump_state, dump)
    self.assertEqual(FLAGS.grid_half_width, 9.0)

  def testUnknownHyphenatedFlagExitsWithUsageCode(self):
    with self.assertRaises(SystemExit) as raised:
      cli.parse_flags(['gkp_prep', '--dump-stat=x'])
    self.assertEqual(raised.exception.code, _EXIT.USAGE)

  def testDumpDocument(self):
    text = cli.dump_document(
        dict(a=np.float64(1.5), b=float('inf'), c=constants.Backend.GRID,
             d=np.arange(2)))
    self.assertEqual(json.loads(text), dict(a=1.5, b='inf', c='grid',
                                            d=[0, 1]))

  @flagsaver.flagsaver(displacement=['100', '0'], quiet=True)
  def testCompileDisplacement(self):
    FLAGS.out = self.out
    self.assertEqual(cli.run_command('compile', []), _EXIT.OK)
    document = self._document()
    self.assertEqual(document['schema_version'],
                     constants.REPORT_SCHEMA_VERSION)
    self.assertEqual(document['command'], 'compile')
    self.assertEqual(document['defaults']['opcount_c1'], 20)
    steps = math.ceil(math.log(100))
    self.assertEqual(document['report']['count'], 2 * steps + 1)
    self.assertEqual(document['report']['upper'], 2 * steps + 3)
    names = [row['name'] for row in document['bounds']]
    self.assertEqual(names,
                     ['compile.upper', 'compile.lower', 'compile.symplectic'])
    for row in document['bounds']:
      self.assertEqual(row['verdict'], 'holds', row)

  @flagsaver.flagsaver(quiet=True)
  def testCompileNeedsOneTarget(self):
    self.assertEqual(cli.run_command('compile', []), _EXIT.USAGE)
    FLAGS.displacement = ['1', '2']
    FLAGS.squeeze = 1.0
    self.assertEqual(cli.run_command('compile', []), _EXIT.USAGE)

  @flagsaver.flagsaver(displacement=['1', '2', '3'], quiet=True)
  def testCompileRejectsBadPair(self):
    self.assertEqual(cli.run_command('compile', []), _EXIT.USAGE)

  @flagsaver.flagsaver(squeeze=2.5, quiet=True)
  def testCompileSqueezeWritesCircuit(self):
    path = os.path.join(self.tmp, 'squeeze.txt')
    FLAGS.circuit_out = path
    self.assertEqual(cli.run_command('compile', []), _EXIT.OK)
    parsed = circuitparse.CircuitParser(path).parse()
    self.assertLen(parsed, 3)

  @flagsaver.flagsaver(displacement=['3', '4'], target_displacement=['3', '4'],
                       quiet=True)
  def testSimulateCompiledDisplacement(self):
    path = os.path.join(self.tmp, 'displacement.txt')
    dump = os.path.join(self.tmp, 'state.npz')
    FLAGS.circuit_out = path
    self.assertEqual(cli.run_command('compile', []), _EXIT.OK)
    FLAGS.displacement = None
    FLAGS.circuit = path
    FLAGS.out = self.out
    FLAGS.dump_state = dump
    self.assertEqual(cli.run_command('simulate', []), _EXIT.OK)
    summary = self._document()['report']
    self.assertAlmostEqual(summary['fidelity'], 1.0, places=8)
    self.assertAlmostEqual(summary['mean'][0], 3.0, places=6)
    self.assertAlmostEqual(summary['mean'][1], 4.0, places=6)
    self.assertAlmostEqual(summary['energy'], 26.0, places=5)
    self.assertAlmostEqual(sim.load_state(dump).norm_sq(), 1.0, places=9)

  @flagsaver.flagsaver(quiet=True)
  def testSimulateNeedsCircuit(self):
    self.assertEqual(cli.run_command('simulate', []), _EXIT.USAGE)

  @flagsaver.flagsaver(delta=0.1, rounds=2, backend='gauss', quiet=True)
  def testComb(self):
    FLAGS.out = self.out
    self.assertEqual(cli.run_command('comb', []), _EXIT.OK)
    document = self._document()
    self.assertEqual(document['report']['protocol'], 'comb')
    self.assertEqual(document['report']['op_counts']['total'],
                     5 * 2 + math.ceil(math.log(10)) + 4)
    self.assertEqual(document['config']['delta'], 0.1)
    self.assertNotIn('violated', [row['verdict'] for row in
                                  document['bounds']])

  @flagsaver.flagsaver(delta=0.1, rounds=2, quiet=True)
  def testCombDumpState(self):
    dump = os.path.join(self.tmp, 'comb.npz')
    FLAGS.dump_state = dump
    self.assertEqual(cli.run_command('comb', []), _EXIT.OK)
    state = sim.load_state(dump)
    self.assertEqual(state.n_qubits, 1)
    self.assertAlmostEqual(state.norm_sq(), 1.0, places=6)

  @flagsaver.flagsaver(delta=0.1, quiet=True)
  def testCombNeedsRounds(self):
    self.assertEqual(cli.run_command('comb', []), _EXIT.USAGE)

  @flagsaver.flagsaver(kappa=0.3, L=8, delta=0.1, quiet=True)
  def testGaussifyOutsideRangeNeedsForce(self):
    self.assertEqual(cli.run_command('gaussify', []), _EXIT.USAGE)

  @parameterized.parameters(12, 4, 0)
  def testGaussifyRejectsLength(self, length):
    with flagsaver.flagsaver(kappa=0.2, L=length, delta=0.1, quiet=True):
      self.assertEqual(cli.run_command('gaussify', []), _EXIT.USAGE)

  @flagsaver.flagsaver(quiet=True)
  def testVerifyArguments(self):
    self.assertEqual(cli.run_command('verify', []), _EXIT.USAGE)
    self.assertEqual(cli.run_command('verify', ['bogus']), _EXIT.USAGE)

  @flagsaver.flagsaver(quiet=True)
  def testVerifyViolationExitCode(self):
    violated = bounds.judge('fake', {}, 1.0, 2.0, constants.Relation.AT_MOST)
    holds = bounds.judge('fake', {}, 1.0, 0.5, constants.Relation.AT_MOST)
    csv_path = os.path.join(self.tmp, 'rows.csv')
    FLAGS.csv = csv_path
    with mock.patch.dict(suites.SUITES,
                         {constants.Suite.FORMULAS: lambda _: [holds]}):
      self.assertEqual(cli.run_command('verify', ['formulas']), _EXIT.OK)
    with open(csv_path) as f:
      self.assertLen(list(csv.reader(f)), 2)
    with mock.patch.dict(suites.SUITES,
                         {constants.Suite.TAILS: lambda _: [holds, violated]}):
      self.assertEqual(cli.run_command('verify', ['tails']), _EXIT.VIOLATED)

  @flagsaver.flagsaver(quiet=True)
  def testNumericErrorExitCode(self):

    def fail(_):
      raise errors.ResolutionError('grid too coarse')

    with mock.patch.dict(cli.COMMANDS, {'comb': fail}):
      self.assertEqual(cli.run_command('comb', []), _EXIT.NUMERIC)

  @flagsaver.flagsaver(
      protocol='comb', deltas=['0.05', '0.1'], rounds_list=['1'],
      backend='gauss', quiet=True)
  def testSweepTable(self):
    csv_path = os.path.join(self.tmp, 'sweep.csv')
    FLAGS.csv = csv_path
    FLAGS.out = self.out
    self.assertEqual(cli.run_command('sweep', []), _EXIT.OK)
    with open(csv_path) as f:
      rows = list(csv.DictReader(f))
    self.assertEqual([float(r['delta']) for r in rows], [0.05, 0.1])
    for row in rows:
      self.assertEqual(row['error'], '')
      self.assertEqual(row['protocol'], 'comb')
      self.assertGreater(float(row['fidelity']), 0.9)
    self.assertEqual(self._document()['report']['cells'], 2)

  @flagsaver.flagsaver(protocol='gkp', kappas=['0.2'], quiet=True)
  def testSweepNeedsDeltas(self):
    self.assertEqual(cli.run_command('sweep', []), _EXIT.USAGE)

  def testSweepCellRecordsError(self):
    row, rows = cli.sweep_cell('gkp', dict(kappa=0.3, delta=0.1),
                               constants.Backend.GAUSS, constants.DEFAULT_TOL)
    self.assertStartsWith(row['error'], 'ParameterError')
    self.assertEmpty(rows)

  def testSweepCells(self):
    with flagsaver.flagsaver(
        kappas=['0.1', '0.2'], deltas=['0.01', '0.05', '0.1']):
      cells = cli.sweep_cells('gkp')
    self.assertLen(cells, 6)
    self.assertEqual(cells[0], dict(kappa=0.1, delta=0.01))
    self.assertEqual(cells[-1], dict(kappa=0.2, delta=0.1))


if __name__ == '__main__':
  unittest.main()
