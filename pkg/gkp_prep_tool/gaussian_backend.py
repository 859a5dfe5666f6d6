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
"""Closed-form simulation of hybrid circuits on sums of Gaussians.

Every qubit basis state carries one oscillator wavefunction (a branch). A
branch is a GaussianSum for one mode or a TwoModeGaussianSum for two. Gates
act exactly on the Gaussian parameters; measurements are not gates here,
homodyne detection is exposed through slice_outcome.
"""

import math
from typing import List

from absl import logging
import numpy as np

from gkp_prep_tool import circuit
from gkp_prep_tool import constants
from gkp_prep_tool import errors
from gkp_prep_tool import states

_SWAP = np.eye(4)[[0, 2, 1, 3]]


class GaussianHybridState:
  """Branch decomposition of a hybrid state.

  Attributes:
    branches: one oscillator wavefunction per qubit basis state, qubit 0
      being the most significant bit of the branch index.
    term_cap: largest number of Gaussian terms allowed after a gate.
  """

  def __init__(self, branches, term_cap=constants.DEFAULT_TERM_CAP):
    self.branches = list(branches)
    self.term_cap = term_cap
    count = len(self.branches)
    if count < 1 or count & (count - 1):
      raise errors.UsageError('branch count must be a power of two')
    modes = {b.modes for b in self.branches}
    if len(modes) != 1:
      raise errors.UsageError('branches act on different numbers of modes')
    self._check_cap()

  @classmethod
  def from_state(cls, state, qubit=None, term_cap=constants.DEFAULT_TERM_CAP):
    """Wraps an analytic state, optionally next to one qubit."""
    if isinstance(state, states.StateSpec):
      state = states.build_state(state)
    if qubit is None:
      return cls([state], term_cap)
    qubit = np.asarray(qubit, dtype=complex)
    qubit = qubit / np.linalg.norm(qubit)
    return cls([state.scaled(c) for c in qubit], term_cap)

  @property
  def n_modes(self):
    return self.branches[0].modes

  @property
  def n_qubits(self):
    return len(self.branches).bit_length() - 1

  @property
  def term_count(self):
    return sum(len(b) for b in self.branches)

  def norm_sq(self) -> float:
    return sum(b.norm_sq() for b in self.branches)

  def _check_cap(self):
    if self.term_count > self.term_cap:
      raise errors.CapacityError(
          '%d Gaussian terms exceed the cap of %d' %
          (self.term_count, self.term_cap))

  def __repr__(self):
    return 'GaussianHybridState(modes=%d, qubits=%d, terms=%d)' % (
        self.n_modes, self.n_qubits, self.term_count)


def tensor(first, second: GaussianHybridState) -> GaussianHybridState:
  """Places a qubit-free single-mode state in front of a hybrid state."""
  if isinstance(first, GaussianHybridState):
    if first.n_qubits:
      raise errors.UsageError('the first factor must be qubit free')
    first = first.branches[0]
  if first.modes != 1 or second.n_modes != 1:
    raise errors.UsageError('tensor joins two single-mode states')
  return GaussianHybridState(
      [_fold(states.TwoModeGaussianSum.product(first, b))
       for b in second.branches], second.term_cap)


def _fold(joint):
  """Moves factor amplitudes into the term amplitudes."""
  amplitude = joint.amplitude * joint.first.amplitude * joint.second.amplitude
  ones = np.ones(len(joint), dtype=complex)
  return joint.replace(
      amplitude=amplitude,
      first=joint.first.replace(amplitude=ones),
      second=joint.second.replace(amplitude=ones))


def _displace_single(branch, dq, dp):
  return branch.translated(dq).kicked(dp).scaled(np.exp(-0.5j * dq * dp))


def _displace_joint(branch, mode, dq, dp):
  s = branch.shear
  if mode == 0:
    first = branch.first.translated(dq).kicked(dp)
    second = branch.second.replace(
        linear_phase=branch.second.linear_phase + dp * s)
  else:
    # f(x0 - s x1) picks up the shift of x1.
    first = _translate_terms(branch.first, -s * dq)
    second = branch.second.translated(dq).kicked(dp)
  moved = branch.replace(
      amplitude=branch.amplitude * np.exp(-0.5j * dq * dp),
      first=first,
      second=second)
  return _fold(moved)


def _translate_terms(factor, shifts):
  """Translates term i of factor by shifts[i]."""
  return factor.replace(
      amplitude=factor.amplitude * np.exp(-1j * factor.linear_phase * shifts),
      center=factor.center + shifts,
      lower=factor.lower + shifts,
      upper=factor.upper + shifts)


def _squeeze_joint(branch, mode, z):
  if mode == 0:
    squeezed = branch.replace(
        first=branch.first.squeezed(z), shear=branch.shear * math.exp(-z))
  else:
    squeezed = branch.replace(
        second=branch.second.squeezed(z), shear=branch.shear * math.exp(z))
  return _fold(squeezed)


def _quarter_turns(theta):
  turns = theta / (math.pi / 2)
  nearest = round(turns)
  if abs(turns - nearest) > 1e-12:
    return None
  return int(nearest) % 4


def _rotate_single(branch, theta):
  """U(theta) for theta a multiple of pi / 2."""
  turns = _quarter_turns(theta)
  if turns is None:
    raise errors.CapabilityError(
        'analytic backend rotates by multiples of pi/2 only, got %g' % theta)
  if turns % 2:
    branch = branch.fourier().replace(domain=constants.Domain.POSITION)
    branch = branch.scaled(np.exp(-0.25j * math.pi))
  if turns >= 2:
    branch = branch.reflected().scaled(-1j)
  return branch


def _apply_gaussian(gate, branch):
  name = gate.name
  if branch.modes == 1:
    if name == 'squeeze':
      return branch.squeezed(gate.param)
    if name == 'rotation':
      return _rotate_single(branch, gate.param)
    if name == 'phase_shift':
      return _rotate_single(branch, -gate.param)
  else:
    if name == 'squeeze':
      return _squeeze_joint(branch, gate.modes[0], gate.param)
    if name == 'shear' and gate.modes == (0, 1):
      return branch.replace(shear=branch.shear + gate.param)
  raise errors.CapabilityError('analytic backend does not implement %r' %
                               (gate,))


def _qubit_matrix(gate, n_qubits):
  """The gate's matrix on the full qubit register."""
  if len(gate.qubits) == 1:
    (qubit,) = gate.qubits
    return np.kron(
        np.kron(np.eye(2**qubit), gate.matrix), np.eye(2**(n_qubits - 1 -
                                                           qubit)))
  if n_qubits != 2:
    raise errors.CapabilityError('two-qubit gates need exactly two qubits')
  if gate.qubits == (0, 1):
    return gate.matrix
  return _SWAP @ gate.matrix @ _SWAP


def _combine(coefficients, branches):
  total = None
  for c, branch in zip(coefficients, branches):
    if abs(c) < 1e-15 or not len(branch):
      continue
    term = branch.scaled(c)
    total = term if total is None else total + term
  if total is None:
    return branches[0].scaled(0.0)
  return total


def _tidy(branch):
  if branch.modes == 1:
    return branch.merged().pruned()
  return branch


def apply(gate: circuit.Gate,
          state: GaussianHybridState) -> GaussianHybridState:
  """Applies one unitary gate exactly.

  Raises:
    CapabilityError: for gates without a closed form on Gaussian sums.
    CapacityError: if the result has more terms than the cap.
  """
  kind = constants.GateKind
  for mode in gate.modes:
    if mode >= state.n_modes:
      raise errors.UsageError('mode %d outside the state' % mode)
  for qubit in gate.qubits:
    if qubit >= state.n_qubits:
      raise errors.UsageError('qubit %d outside the state' % qubit)
  branches = state.branches
  if gate.kind == kind.QUBIT_UNITARY:
    matrix = _qubit_matrix(gate, state.n_qubits)
    branches = [_combine(row, branches) for row in matrix]
  elif gate.kind in (kind.DISPLACEMENT, kind.CTRL_DISPLACEMENT):
    dq, dp = gate.vector
    mode = gate.modes[0]
    targets = range(len(branches))
    if gate.kind == kind.CTRL_DISPLACEMENT:
      bit = state.n_qubits - 1 - gate.qubits[0]
      targets = [i for i in targets if (i >> bit) & 1]
    branches = list(branches)
    for i in targets:
      if state.n_modes == 1:
        branches[i] = _displace_single(branches[i], dq, dp)
      else:
        branches[i] = _displace_joint(branches[i], mode, dq, dp)
  elif gate.kind == kind.GAUSSIAN_UNITARY:
    branches = [_apply_gaussian(gate, b) for b in branches]
  else:
    raise errors.CapabilityError('%r is not a unitary gate' % (gate,))
  result = GaussianHybridState([_tidy(b) for b in branches], state.term_cap)
  logging.debug('analytic backend applied %r, %d terms', gate,
                result.term_count)
  return result


def run(gates, state: GaussianHybridState) -> GaussianHybridState:
  for gate in gates:
    state = apply(gate, state)
  return state


def slice_outcome(state: GaussianHybridState,
                  outcome: float) -> List[states.GaussianSum]:
  """Unnormalized branches of mode 1 after measuring Q = outcome on mode 0.

  The squared norms summed over branches give the outcome density.
  """
  if state.n_modes != 2:
    raise errors.UsageError('homodyne slicing needs a two-mode state')
  return [b.slice(outcome) for b in state.branches]


def outcome_density(state: GaussianHybridState, outcome: float) -> float:
  return float(sum(b.norm_sq() for b in slice_outcome(state, outcome)))


def to_gaussian_sum(state: GaussianHybridState) -> states.GaussianSum:
  """The oscillator wavefunction of a qubit-free single-mode state."""
  if state.n_qubits or state.n_modes != 1:
    raise errors.UsageError('state is not a qubit-free single-mode state')
  return state.branches[0]


def reduce_fidelity(state: GaussianHybridState, target) -> float:
  """<target| tr_qubits |state><state| |target>."""
  if state.n_modes != target.modes:
    raise errors.UsageError('target acts on a different number of modes')
  return float(
      sum(abs(states.overlap(target, b))**2 for b in state.branches))
