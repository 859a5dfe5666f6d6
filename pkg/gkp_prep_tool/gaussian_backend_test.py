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
"""Tests for gkp_prep_tool.gaussian_backend."""

import cmath
import math
import unittest

from absl.testing import parameterized
import numpy as np

from gkp_prep_tool import circuit
from gkp_prep_tool import errors
from gkp_prep_tool import gaussian_backend
from gkp_prep_tool import sim
from gkp_prep_tool import states

_VACUUM = states.StateSpec.vacuum()


def _vacuum(qubit=None):
  return gaussian_backend.GaussianHybridState.from_state(_VACUUM, qubit)


def _single(state):
  return gaussian_backend.to_gaussian_sum(state)


class SingleModeTest(parameterized.TestCase):

  def testDisplacementGivesCoherentState(self):
    state = gaussian_backend.apply(circuit.displacement(0, 1.0, 0.5), _vacuum())
    coherent = states.build_state(states.StateSpec.coherent(1.0, 0.5))
    value = states.overlap(coherent, _single(state))
    self.assertAlmostEqual(value.real, 1.0, places=12)
    self.assertAlmostEqual(value.imag, 0.0, places=12)

  def testSqueezeNarrowsVacuum(self):
    state = gaussian_backend.apply(circuit.squeeze(0, math.log(2)), _vacuum())
    target = states.build_state(states.StateSpec.squeezed_vacuum(0.5))
    self.assertAlmostEqual(
        abs(states.overlap(target, _single(state))), 1.0, places=12)

  def testQuarterTurnIsFourierTransform(self):
    state = gaussian_backend.apply(circuit.displacement(0, 1.0, 0), _vacuum())
    state = gaussian_backend.apply(circuit.rotation(0, math.pi / 2), state)
    coherent = states.build_state(states.StateSpec.coherent(0.0, -1.0))
    value = states.overlap(coherent, _single(state))
    self.assertAlmostEqual(value, cmath.exp(-0.25j * math.pi), places=12)

  def testHalfTurnIsParity(self):
    state = gaussian_backend.apply(circuit.displacement(0, 1.0, 0.5), _vacuum())
    state = gaussian_backend.apply(circuit.phase_shift(0, math.pi), state)
    coherent = states.build_state(states.StateSpec.coherent(-1.0, -0.5))
    value = states.overlap(coherent, _single(state))
    self.assertAlmostEqual(value, -1j, places=12)

  def testGeneralRotationUnsupported(self):
    with self.assertRaises(errors.CapabilityError):
      gaussian_backend.apply(circuit.rotation(0, math.pi / 3), _vacuum())

  def testTruncatedQuarterTurnUnsupported(self):
    state = gaussian_backend.GaussianHybridState.from_state(
        states.StateSpec.truncated_gaussian(0.2, 0.5))
    with self.assertRaises(errors.CapabilityError):
      gaussian_backend.apply(circuit.rotation(0, math.pi / 2), state)

  def testMeasurementIsNotAGate(self):
    with self.assertRaises(errors.CapabilityError):
      gaussian_backend.apply(circuit.measure_qubit(0), _vacuum([1, 0]))


class QubitTest(parameterized.TestCase):

  def testControlledDisplacementActsOnOneBranch(self):
    state = gaussian_backend.apply(
        circuit.ctrl_displacement(0, 0, 2.0, 0), _vacuum([1, 1]))
    moved = states.build_state(states.StateSpec.coherent(2.0, 0))
    self.assertAlmostEqual(
        abs(states.overlap(moved, state.branches[1]))**2, 0.5, places=12)
    self.assertAlmostEqual(
        gaussian_backend.reduce_fidelity(state, states.build_state(_VACUUM)),
        0.5 + 0.5 * math.exp(-2),
        places=12)

  def testHadamardTwiceMergesTerms(self):
    state = _vacuum([1, 0])
    for _ in range(2):
      state = gaussian_backend.apply(circuit.hadamard(0), state)
    self.assertEqual(state.term_count, 1)
    self.assertAlmostEqual(state.branches[0].norm_sq(), 1.0, places=12)

  def testTwoQubitGateOrdering(self):
    state = gaussian_backend.GaussianHybridState(
        [states.build_state(_VACUUM)] +
        [states.GaussianSum.empty()] * 3)
    flip_second = np.kron(np.eye(2), circuit.PAULI_X)
    swapped = gaussian_backend.apply(
        circuit.qubit_unitary((1, 0), flip_second), state)
    self.assertEqual([len(b) for b in swapped.branches], [0, 0, 1, 0])

  def testTermCap(self):
    with self.assertRaises(errors.CapacityError):
      gaussian_backend.GaussianHybridState.from_state(
          states.StateSpec.gkp_peakwise(0.1, 0.1), term_cap=5)


class TwoModeTest(parameterized.TestCase):

  def setUp(self):
    super(TwoModeTest, self).setUp()
    self.vacuum = states.build_state(_VACUUM)
    self.coherent = states.build_state(states.StateSpec.coherent(1.0, 0))
    self.joint = gaussian_backend.tensor(
        self.vacuum, gaussian_backend.GaussianHybridState([self.coherent]))

  def _check(self, state, expected):
    for x0, x1 in ((0.0, 0.0), (0.7, 1.2), (-0.4, 2.1), (1.5, -0.3)):
      self.assertAlmostEqual(
          states.eval_amplitude(state.branches[0], [x0, x1]),
          expected(x0, x1),
          places=12)

  def testShearDisplaceSqueezeFirstMode(self):
    state = self.joint
    for gate in (circuit.shear(0, 1, 1.0), circuit.displacement(0, 0.5, 0.2),
                 circuit.squeeze(0, 0.3)):
      state = gaussian_backend.apply(gate, state)

    def expected(x0, x1):
      y0 = math.exp(0.3) * x0
      return (math.exp(0.15) * cmath.exp(-0.05j) * cmath.exp(0.2j * y0) *
              self.vacuum(y0 - 0.5 - x1) * self.coherent(x1))

    self._check(state, expected)

  def testShearDisplaceSqueezeSecondMode(self):
    state = self.joint
    for gate in (circuit.shear(0, 1, 1.0), circuit.displacement(1, 0.5, 0.2),
                 circuit.squeeze(1, 0.3)):
      state = gaussian_backend.apply(gate, state)

    def expected(x0, x1):
      y1 = math.exp(0.3) * x1
      return (math.exp(0.15) * cmath.exp(-0.05j) * cmath.exp(0.2j * y1) *
              self.vacuum(x0 - y1 + 0.5) * self.coherent(y1 - 0.5))

    self._check(state, expected)

  def testOnlyForwardShear(self):
    with self.assertRaises(errors.CapabilityError):
      gaussian_backend.apply(circuit.shear(1, 0, 1.0), self.joint)

  def testOutcomeDensity(self):
    self.assertAlmostEqual(
        gaussian_backend.outcome_density(self.joint, 0.0),
        1 / math.sqrt(math.pi),
        places=12)
    sheared = gaussian_backend.apply(circuit.shear(0, 1, 1.0), self.joint)
    self.assertAlmostEqual(
        gaussian_backend.outcome_density(sheared, 1.0),
        1 / math.sqrt(2 * math.pi),
        places=10)

  def testSliceNeedsTwoModes(self):
    with self.assertRaises(errors.UsageError):
      gaussian_backend.slice_outcome(_vacuum(), 0.0)


class CrossBackendTest(parameterized.TestCase):

  def testGridAgreesWithAnalyticBackend(self):
    gates = [
        circuit.displacement(0, 0.7, -0.3),
        circuit.squeeze(0, 0.4),
        circuit.hadamard(0),
        circuit.ctrl_displacement(0, 0, 0.0, math.pi),
        circuit.rotation(0, math.pi / 2),
        circuit.ctrl_shift(0, 0, 1.0),
        circuit.hadamard(0),
    ]
    analytic = gaussian_backend.run(gates, _vacuum(sim.QUBIT_ZERO))
    axis = sim.GridAxis.covering(16, 1 / 32)
    grid = sim.run(gates, sim.prepare(_VACUUM, [axis], sim.QUBIT_ZERO))
    value = sim.overlap_with(grid, analytic.branches)
    self.assertAlmostEqual(abs(value), 1.0, places=8)
    self.assertAlmostEqual(value.real, 1.0, places=7)


if __name__ == '__main__':
  unittest.main()
