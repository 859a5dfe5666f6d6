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
"""Grid simulation of hybrid oscillator-qubit pure states.

A HybridGridState stores one complex amplitude array per qubit basis state
over a tensor grid of oscillator positions. Position-diagonal operations act
pointwise, momentum-diagonal ones through the FFT, squeezers by band-limited
resampling and rotations by Q-chirp / P-chirp / Q-chirp triples. The grid is
periodic; every gate first checks that the wavefunction stays away from the
boundary in position and momentum.

Typical usage example:

  axis = sim.GridAxis.covering(half_width=12, max_dx=0.01)
  state = sim.prepare(states.StateSpec.vacuum(), [axis])
  state = sim.apply(circuit.squeeze(0, 0.5), state)
"""

import dataclasses
import math
from typing import Sequence

from absl import logging
import numpy as np
from scipy import linalg

from gkp_prep_tool import circuit
from gkp_prep_tool import constants
from gkp_prep_tool import errors
from gkp_prep_tool import states

QUBIT_ZERO = np.array([1.0, 0.0], dtype=complex)
QUBIT_PLUS = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2)

# Fraction of the points on each side of an axis treated as its boundary.
_EDGE_FRACTION = 1 / 32
# Fixed-point resolution of exactly reduced chirp phases.
_TURN_BITS = 1 << 20
# Two-mode mean maps are factored in (q0, q1, p0, p1) order.
_XXPP = [0, 2, 1, 3]


@dataclasses.dataclass(frozen=True)
class GridAxis:
  """Uniform periodic position grid of one mode.

  Attributes:
    x_min: first grid point.
    dx: spacing.
    n_points: number of points, a power of two.
  """
  x_min: float
  dx: float
  n_points: int

  def __post_init__(self):
    if not self.dx > 0:
      raise errors.ParameterError('grid spacing must be positive')
    if self.n_points < 2 or self.n_points & (self.n_points - 1):
      raise errors.ParameterError('grid size must be a power of two, got %d' %
                                  self.n_points)
    if not self.x_min < 0 < self.x_max:
      raise errors.ParameterError('grid must straddle the origin')

  @classmethod
  def covering(cls, half_width: float, max_dx: float):
    """Smallest grid with power-of-two spacing <= max_dx covering +-half_width.

    Power-of-two spacings put every half-integer on a grid point.
    """
    dx = 2.0**math.floor(math.log2(max_dx))
    n = 1 << max(1, int(math.ceil(math.log2(2 * half_width / dx))))
    return cls(-n * dx / 2, dx, n)

  @classmethod
  def default_for(cls, kappa=None, delta=None, length=0):
    """Default grid for a state with envelope kappa, peaks delta and L peaks."""
    widths = [w for w in (kappa, delta) if w]
    finest = min(widths) if widths else 1.0
    margin = constants.GRID_MARGIN_WIDTHS * max(1.0, 1 / kappa if kappa else 1)
    return cls.covering(length / 2 + margin,
                        min(finest, 1.0) / constants.GRID_SAMPLES_PER_WIDTH)

  @property
  def x_max(self):
    return self.x_min + (self.n_points - 1) * self.dx

  @property
  def extent(self):
    return self.n_points * self.dx

  @property
  def points(self) -> np.ndarray:
    return self.x_min + self.dx * np.arange(self.n_points)

  @property
  def momenta(self) -> np.ndarray:
    """Angular frequencies in FFT order."""
    return 2 * np.pi * np.fft.fftfreq(self.n_points, self.dx)

  @property
  def p_max(self):
    return np.pi / self.dx

  def describe(self):
    return dict(x_min=self.x_min, dx=self.dx, n_points=self.n_points)


class HybridGridState:
  """Pure state of one or two modes and at most one qubit.

  Attributes:
    axes: one GridAxis per mode.
    branches: complex array of shape (2**qubits, n_1[, n_2]).
  """

  def __init__(self, axes: Sequence[GridAxis], branches: np.ndarray):
    self.axes = tuple(axes)
    self.branches = np.asarray(branches, dtype=complex)
    if len(self.axes) not in (1, 2):
      raise errors.UsageError('grid states hold one or two modes')
    expected = tuple(a.n_points for a in self.axes)
    if self.branches.shape[1:] != expected or self.branches.shape[0] not in (
        1, 2):
      raise errors.UsageError('branch array shape %r does not match grid %r' %
                              (self.branches.shape, expected))

  @property
  def n_modes(self):
    return len(self.axes)

  @property
  def n_qubits(self):
    return self.branches.shape[0] // 2

  @property
  def cell(self):
    return float(np.prod([a.dx for a in self.axes]))

  def norm_sq(self) -> float:
    return float(np.sum(np.abs(self.branches)**2) * self.cell)

  def branch_weights(self) -> np.ndarray:
    return np.sum(
        np.abs(self.branches)**2,
        axis=tuple(range(1, self.branches.ndim))) * self.cell

  def qubit_weight(self, vector) -> float:
    """Squared norm of the component along the given qubit state."""
    projected = np.tensordot(np.conj(vector), self.branches, axes=(0, 0))
    return float(np.sum(np.abs(projected)**2) * self.cell)

  def with_branches(self, branches):
    return HybridGridState(self.axes, branches)

  def __repr__(self):
    return 'HybridGridState(modes=%d, qubits=%d, shape=%r)' % (
        self.n_modes, self.n_qubits, self.branches.shape[1:])


def _sample(state, axes):
  if state.modes == 1:
    return state(axes[0].points)
  x0, x1 = np.meshgrid(axes[0].points, axes[1].points, indexing='ij')
  return state(x0, x1)


def _narrowest_width(state):
  sums = [state] if state.modes == 1 else [state.first, state.second]
  return min(float(np.min(1 / np.sqrt(s.inverse_variance))) for s in sums)


def prepare(state, axes: Sequence[GridAxis], qubit=None) -> HybridGridState:
  """Samples an analytic state on a grid.

  Args:
    state: StateSpec, GaussianSum or TwoModeGaussianSum.
    axes: one GridAxis per mode.
    qubit: optional qubit state vector, e.g. QUBIT_ZERO or QUBIT_PLUS.

  Returns:
    Normalized HybridGridState.

  Raises:
    ResolutionError: if the grid is too coarse or too small for the state.
  """
  if isinstance(state, states.StateSpec):
    state = states.build_state(state)
  if state.modes == 1 and state.domain != constants.Domain.POSITION:
    state = state.fourier()
  axes = tuple(axes)
  if len(axes) != state.modes:
    raise errors.UsageError('need one axis per mode')
  width = _narrowest_width(state)
  for axis in axes:
    if axis.dx > width / 4:
      raise errors.ResolutionError(
          'grid spacing %.3g does not resolve width %.3g' % (axis.dx, width))
  values = _sample(state, axes)
  cell = float(np.prod([a.dx for a in axes]))
  sampled = float(np.sum(np.abs(values)**2) * cell)
  expected = state.norm_sq()
  if abs(sampled - expected) > constants.GRID_ALIAS_TOL * max(1.0, expected):
    raise errors.ResolutionError(
        'sampled norm %.12g differs from analytic norm %.12g' %
        (sampled, expected))
  values = values / math.sqrt(sampled)
  if qubit is None:
    branches = values[None]
  else:
    qubit = np.asarray(qubit, dtype=complex)
    qubit = qubit / np.linalg.norm(qubit)
    branches = qubit.reshape((2,) + (1,) * values.ndim) * values[None]
  return HybridGridState(axes, branches)


def tensor(first: HybridGridState, second: HybridGridState) -> HybridGridState:
  """Joins a qubit-free single-mode state with a single-mode state."""
  if first.n_modes != 1 or second.n_modes != 1 or first.n_qubits:
    raise errors.UsageError('tensor joins a qubit-free mode with one mode')
  size = first.axes[0].n_points * second.axes[0].n_points
  if size > constants.GRID_MAX_POINTS:
    raise errors.CapacityError(
        'two-mode grid of %d points exceeds the limit of %d' %
        (size, constants.GRID_MAX_POINTS))
  branches = first.branches[0][None, :, None] * second.branches[:, None, :]
  return HybridGridState(first.axes + second.axes, branches)


def regrid(state: HybridGridState, axis: GridAxis) -> HybridGridState:
  """Moves a single-mode state onto a coarser sub-grid of its own grid.

  The target spacing must be a power-of-two multiple of the current one and
  every target point must be a current grid point, so that the move is a
  plain subsampling.

  Raises:
    DomainOverflowError: if the state has mass outside the target grid.
    ResolutionError: if its momentum content exceeds the target grid.
  """
  if state.n_modes != 1:
    raise errors.UsageError('only single-mode states can be regridded')
  (old,) = state.axes
  stride = int(round(axis.dx / old.dx))
  offset = (axis.x_min - old.x_min) / old.dx
  if (stride < 1 or stride & (stride - 1) or
      abs(axis.dx - stride * old.dx) > 1e-12 * axis.dx or
      abs(offset - round(offset)) > 1e-9):
    raise errors.UsageError('%r is not a dyadic sub-grid of %r' %
                            (axis.describe(), old.describe()))
  offset = int(round(offset))
  if offset < 0 or offset + (axis.n_points - 1) * stride >= old.n_points:
    raise errors.DomainOverflowError('target grid leaves the source grid')
  _check_position(state.branches, 1, old, axis.x_min, axis.x_max,
                  'regridding')
  p_edge = axis.p_max * (1 - 2 * _EDGE_FRACTION)
  _check_momentum(state.branches, 1, old, -p_edge, p_edge, 'regridding')
  branches = state.branches[:, offset:offset + axis.n_points * stride:stride]
  norm_sq = float(np.sum(np.abs(branches)**2) * axis.dx)
  return HybridGridState([axis], branches / math.sqrt(norm_sq))


def _mass_fraction(density, mask):
  total = np.sum(density)
  if not total > 0:
    return 0.0
  return float(np.sum(np.where(mask, density, 0)) / total)


def _marginal(arr, axis_index):
  """|psi|^2 summed over every array axis except axis_index."""
  density = np.abs(arr)**2
  others = tuple(i for i in range(arr.ndim) if i != axis_index)
  return np.sum(density, axis=others)


def _momentum_marginal(arr, axis_index):
  return _marginal(np.fft.fft(arr, axis=axis_index), axis_index)


def _check_position(arr, axis_index, axis, lo, hi, what):
  fraction = _mass_fraction(
      _marginal(arr, axis_index), (axis.points < lo) | (axis.points > hi))
  if fraction > constants.GRID_EDGE_MASS:
    raise errors.DomainOverflowError(
        '%s moves %.3g of the probability off the grid [%g, %g]' %
        (what, fraction, axis.x_min, axis.x_max))


def _check_momentum(arr, axis_index, axis, lo, hi, what):
  p = axis.momenta
  fraction = _mass_fraction(
      _momentum_marginal(arr, axis_index), (p < lo) | (p > hi))
  if fraction > constants.GRID_EDGE_MASS:
    raise errors.ResolutionError(
        '%s moves %.3g of the probability beyond the grid momentum %g' %
        (what, fraction, axis.p_max))


def _check_edges(arr, axes, what):
  for i, axis in enumerate(axes):
    band = max(1, int(axis.n_points * _EDGE_FRACTION))
    inner_lo = axis.points[band]
    inner_hi = axis.points[-band - 1]
    _check_position(arr, i + 1, axis, inner_lo, inner_hi, what)
    p_edge = axis.p_max * (1 - 2 * _EDGE_FRACTION)
    _check_momentum(arr, i + 1, axis, -p_edge, p_edge, what)


def _expand(values, ndim, axis_index):
  shape = [1] * ndim
  shape[axis_index] = -1
  return np.reshape(values, shape)


def _translate(arr, axis_index, axis, amount):
  _check_position(arr, axis_index, axis, axis.x_min - amount,
                  axis.x_max - amount, 'translation by %g' % amount)
  phase = _expand(np.exp(-1j * axis.momenta * amount), arr.ndim, axis_index)
  return np.fft.ifft(np.fft.fft(arr, axis=axis_index) * phase, axis=axis_index)


def _kick(arr, axis_index, axis, momentum):
  _check_momentum(arr, axis_index, axis, -axis.p_max - momentum,
                  axis.p_max - momentum, 'momentum kick by %g' % momentum)
  return arr * _expand(np.exp(1j * momentum * axis.points), arr.ndim,
                       axis_index)


def _displace(arr, axis_index, axis, dq, dp):
  if dq:
    arr = _translate(arr, axis_index, axis, dq)
  if dp:
    arr = _kick(arr, axis_index, axis, dp)
  return arr * np.exp(-0.5j * dq * dp)


def _turns(c, m):
  """(c * m) mod 1 for integer arrays m, accurate for |m| up to 2**31.

  c is split into a part with _TURN_BITS fractional bits, whose product with
  m is exact in integer arithmetic, and a remainder below 2**-20.
  """
  c = c - math.floor(c)
  high = math.floor(c * _TURN_BITS)
  low = c - high / _TURN_BITS
  m = np.asarray(m, dtype=np.int64)
  return ((m * high) % _TURN_BITS / _TURN_BITS + m * low) % 1.0


def _unit(turns):
  return np.exp(2j * np.pi * turns)


def _scaled_dft(spectrum, scale):
  """u_j = sum_k spectrum_k exp(2 pi i scale k j / n) along the last axis.

  Bluestein's identity kj = (k^2 + j^2 - (j - k)^2) / 2 turns the sum into
  a convolution with the chirp exp(i pi scale m^2 / n). The chirp phases are
  reduced modulo one turn before exponentiation, so every factor has unit
  modulus however large n is.
  """
  n = spectrum.shape[-1]
  m = np.arange(n, dtype=np.int64)
  whole, rest = np.divmod(m * m, 2 * n)
  chirp = _unit(_turns(scale, whole) + scale * rest / (2 * n))
  kernel = np.zeros(2 * n, dtype=complex)
  kernel[:n] = np.conj(chirp)
  kernel[n + 1:] = np.conj(chirp[1:][::-1])
  convolved = np.fft.ifft(
      np.fft.fft(spectrum * chirp, 2 * n, axis=-1) * np.fft.fft(kernel),
      axis=-1)
  return chirp * convolved[..., :n]


def _squeeze(arr, axis_index, axis, z):
  """psi(x) -> exp(z/2) psi(exp(z) x) by band-limited interpolation."""
  scale = math.exp(z)
  _check_position(arr, axis_index, axis, scale * axis.x_min,
                  scale * axis.x_max, 'squeeze by %g' % z)
  _check_momentum(arr, axis_index, axis, -axis.p_max / scale,
                  axis.p_max / scale, 'squeeze by %g' % z)
  n = axis.n_points
  moved = np.moveaxis(arr, axis_index, -1)
  spectrum = np.fft.fftshift(np.fft.fft(moved, axis=-1), axes=-1)
  index = np.arange(n) - n // 2
  # Frequency index * dp * (scale - 1) * x_min, in turns.
  spectrum = spectrum * _unit(
      _turns((scale - 1) * axis.x_min / (n * axis.dx), index))
  values = _scaled_dft(spectrum, scale)
  values = values * _unit(-_turns(scale * (n // 2) / n, np.arange(n))) / n
  values = values * math.exp(z / 2)
  mapped = scale * axis.points
  values = np.where((mapped < axis.x_min) | (mapped > axis.x_max), 0, values)
  return np.moveaxis(values, -1, axis_index)


def _rotate(arr, axis_index, axis, theta):
  """U(theta) = exp(-i theta (Q^2 + P^2) / 2) by chirp triples."""
  pieces = int(math.ceil(abs(theta) / constants.GRID_ROTATION_PIECE))
  if not pieces:
    return arr
  piece = theta / pieces
  t = math.tan(piece / 2)
  s = math.sin(piece)
  q_chirp = _expand(np.exp(-0.5j * t * axis.points**2), arr.ndim, axis_index)
  p_chirp = _expand(np.exp(-0.5j * s * axis.momenta**2), arr.ndim, axis_index)
  for _ in range(pieces):
    arr = arr * q_chirp
    arr = np.fft.ifft(np.fft.fft(arr, axis=axis_index) * p_chirp,
                      axis=axis_index)
    arr = arr * q_chirp
  return arr


def _shear(arr, axes, first, second, strength):
  """Translates mode `first` by strength times the position of `second`."""
  ndim = arr.ndim
  a, b = first + 1, second + 1
  axis_a, axis_b = axes[first], axes[second]
  x_a = _expand(axis_a.points, ndim, a)
  shift = strength * _expand(axis_b.points, ndim, b)
  outside = (x_a + shift < axis_a.x_min) | (x_a + shift > axis_a.x_max)
  density = np.abs(arr)**2
  # The image of x lies off the grid when x + shift does.
  fraction = _mass_fraction(density, np.broadcast_to(outside, arr.shape))
  if fraction > constants.GRID_EDGE_MASS:
    raise errors.DomainOverflowError(
        'shear moves %.3g of the probability off the grid' % fraction)
  phase = np.exp(-1j * _expand(axis_a.momenta, ndim, a) * shift)
  return np.fft.ifft(np.fft.fft(arr, axis=a) * phase, axis=a)


def _decompose_single_mode(gate):
  """Rotation, squeeze, rotation realising a single-mode Gaussian unitary.

  The factors reproduce the symplectic action; the global phase of the
  unitary is not tracked.
  """
  mean_map = linalg.expm(-circuit.symplectic_form(1) @ gate.matrix)
  left, sigma, right_t = np.linalg.svd(mean_map)
  if np.linalg.det(left) < 0:
    left[:, 1] *= -1
    right_t[1, :] *= -1
  first = math.atan2(right_t[0, 1], right_t[0, 0])
  last = math.atan2(left[0, 1], left[0, 0])
  return first, -math.log(sigma[0]), last


def _passive_unitary(block):
  """Mode unitary of an orthogonal symplectic map in (q0, q1, p0, p1) order."""
  return block[:2, :2] + 1j * block[2:, :2]


def _decompose_two_mode(mean_map):
  """Passive, squeeze, passive factors of a two-mode symplectic mean map.

  Returns (first, z, last) with mean_map = last . diag squeeze(z) . first,
  first and last given as 2x2 mode unitaries acting on q + i p.
  """
  m = mean_map[np.ix_(_XXPP, _XXPP)]
  form = np.block([[np.zeros((2, 2)), np.eye(2)],
                   [-np.eye(2), np.zeros((2, 2))]])
  gram = m.T @ m
  values, vectors = np.linalg.eigh(gram)
  chosen = []
  for j in np.argsort(values)[::-1]:
    v = vectors[:, j].copy()
    for w in chosen:
      for u in (w, form @ w):
        v -= (u @ v) * u
    if np.linalg.norm(v) > 1e-6:
      chosen.append(v / np.linalg.norm(v))
    if len(chosen) == 2:
      break
  k = np.column_stack(chosen + [-form @ v for v in chosen])
  d = np.sqrt([v @ gram @ v for v in chosen])
  outer = m @ k / np.concatenate([d, 1 / d])
  return _passive_unitary(k.T), -np.log(d), _passive_unitary(outer)


def _passive_angles(unitary):
  """Phases a, mixing angle theta and phases b with U = e^{ia} R(theta) e^{ib}.

  R(theta) = [[cos, -sin], [sin, cos]] and theta lies in [0, pi / 2].
  """
  c, s = abs(unitary[0, 0]), abs(unitary[1, 0])
  theta = math.atan2(s, c)
  if s < 1e-12:
    return (np.angle(unitary[0, 0]), np.angle(unitary[1, 1])), 0.0, (0.0, 0.0)
  if c < 1e-12:
    return (np.angle(-unitary[0, 1]), np.angle(unitary[1, 0])), theta, (0.0,
                                                                        0.0)
  a = (np.angle(unitary[0, 0]), np.angle(unitary[1, 0]))
  return a, theta, (0.0, np.angle(unitary[1, 1]) - a[1])


def _phases(arr, axes, angles):
  for mode, phi in enumerate(angles):
    if abs(phi) > 1e-15:
      arr = _rotate(arr, mode + 1, axes[mode], -phi)
  return arr


def _apply_passive(arr, axes, unitary):
  """Two-mode passive unitary as phases, three shears and phases."""
  a, theta, b = _passive_angles(unitary)
  arr = _phases(arr, axes, b)
  if theta > 1e-15:
    t = math.tan(theta / 2)
    arr = _shear(arr, axes, 0, 1, -t)
    arr = _shear(arr, axes, 1, 0, math.sin(theta))
    arr = _shear(arr, axes, 0, 1, -t)
  return _phases(arr, axes, a)


def _apply_two_mode(gate, arr, axes):
  first, z, last = _decompose_two_mode(
      circuit.gaussian_mean_map(gate, len(axes)))
  arr = _apply_passive(arr, axes, first)
  _check_edges(arr, axes, 'two-mode gaussian')
  for mode, amount in enumerate(z):
    if abs(amount) > 1e-14:
      arr = _squeeze(arr, mode + 1, axes[mode], amount)
  arr = _apply_passive(arr, axes, last)
  _check_edges(arr, axes, 'two-mode gaussian')
  return arr


def apply(gate: circuit.Gate, state: HybridGridState) -> HybridGridState:
  """Applies one unitary gate and returns the new state.

  Raises:
    DomainOverflowError: if the wavefunction would leave the grid.
    ResolutionError: if its momentum content would exceed the grid, or if the
      gate changes the norm by more than GRID_NORM_TOL relative.
    CapabilityError: for gates the grid backend does not implement.
  """
  kind = constants.GateKind
  arr = state.branches
  axes = state.axes
  for mode in gate.modes:
    if mode >= state.n_modes:
      raise errors.UsageError('mode %d outside the state' % mode)
  for qubit in gate.qubits:
    if qubit >= state.n_qubits:
      raise errors.UsageError('qubit %d outside the state' % qubit)
  if gate.kind == kind.DISPLACEMENT:
    mode = gate.modes[0]
    arr = _displace(arr, mode + 1, axes[mode], *gate.vector)
  elif gate.kind == kind.CTRL_DISPLACEMENT:
    mode = gate.modes[0]
    arr = arr.copy()
    arr[1] = _displace(arr[1:], mode + 1, axes[mode], *gate.vector)[0]
  elif gate.kind == kind.QUBIT_UNITARY:
    if len(gate.qubits) != 1:
      raise errors.CapabilityError('grid states carry a single qubit')
    arr = np.tensordot(gate.matrix, arr, axes=(1, 0))
  elif gate.kind == kind.GAUSSIAN_UNITARY:
    arr = _apply_gaussian(gate, arr, axes)
  else:
    raise errors.CapabilityError('%r is not a unitary gate' % gate)
  before = state.norm_sq()
  after = float(np.sum(np.abs(arr)**2) * state.cell)
  if abs(after - before) > constants.GRID_NORM_TOL * before:
    raise errors.ResolutionError('%r changed the grid norm by %.3g' %
                                 (gate, after - before))
  logging.debug('grid applied %r', gate)
  return HybridGridState(axes, arr)


def _apply_gaussian(gate, arr, axes):
  if gate.name == 'shear':
    first, second = gate.modes
    return _shear(arr, axes, first, second, gate.param)
  if len(gate.modes) == 2:
    return _apply_two_mode(gate, arr, axes)
  mode = gate.modes[0]
  index, axis = mode + 1, axes[mode]
  if gate.name == 'squeeze':
    return _squeeze(arr, index, axis, gate.param)
  if gate.name == 'rotation':
    arr = _rotate(arr, index, axis, gate.param)
  elif gate.name == 'phase_shift':
    arr = _rotate(arr, index, axis, -gate.param)
  else:
    first, z, last = _decompose_single_mode(gate)
    arr = _rotate(arr, index, axis, first)
    _check_edges(arr, axes, 'rotation')
    arr = _squeeze(arr, index, axis, z)
    arr = _rotate(arr, index, axis, last)
  _check_edges(arr, axes, 'rotation')
  return arr


def run(gates, state: HybridGridState) -> HybridGridState:
  """Applies every gate of a circuit (or gate sequence) in order."""
  for gate in gates:
    state = apply(gate, state)
  return state


@dataclasses.dataclass
class HomodyneSweep:
  """Outcome-resolved position measurement of one mode.

  Attributes:
    outcome_axis: grid of the measured mode.
    pdf: outcome density on the outcome grid.
    conditional_states: array (n_outcomes, branches, n_other) of normalized
      post-measurement states of the other mode.
    state_axis: grid of the unmeasured mode.
  """
  outcome_axis: GridAxis
  pdf: np.ndarray
  conditional_states: np.ndarray
  state_axis: GridAxis

  def conditional(self, index: int) -> HybridGridState:
    return HybridGridState([self.state_axis], self.conditional_states[index])


def homodyne_sweep(state: HybridGridState, mode: int = 0) -> HomodyneSweep:
  """Outcome density and conditional states of a Q measurement on `mode`."""
  if state.n_modes != 2:
    raise errors.UsageError('measuring the only mode leaves no state')
  other = 1 - mode
  outcome_axis, state_axis = state.axes[mode], state.axes[other]
  _check_position(state.branches, mode + 1, outcome_axis,
                  outcome_axis.points[1], outcome_axis.points[-2],
                  'homodyne measurement')
  # (outcomes, branches, other mode).
  slices = np.moveaxis(state.branches, mode + 1, 0)
  density = np.sum(np.abs(slices)**2, axis=(1, 2)) * state_axis.dx
  safe = np.where(density > 0, np.sqrt(density), 1.0)
  conditionals = slices / safe[:, None, None]
  return HomodyneSweep(outcome_axis, density, conditionals, state_axis)


def sample_outcomes(sweep: HomodyneSweep, count: int, seed: int) -> np.ndarray:
  """Draws homodyne outcomes from the swept density."""
  rng = np.random.Generator(np.random.Philox(seed))
  weights = sweep.pdf / np.sum(sweep.pdf)
  index = rng.choice(sweep.pdf.shape[0], size=count, p=weights)
  return sweep.outcome_axis.points[index]


def overlap_with(state: HybridGridState, branches) -> complex:
  """Coherent overlap sum_b <branches[b], state_b> with analytic branches."""
  if state.n_modes != 1:
    raise errors.UsageError('overlaps are taken on single-mode states')
  if len(branches) != state.branches.shape[0]:
    raise errors.UsageError('branch count mismatch')
  total = 0j
  for analytic, values in zip(branches, state.branches):
    total += np.sum(np.conj(_sample(analytic, state.axes)) * values)
  return complex(total * state.axes[0].dx)


def reduce_fidelity(state: HybridGridState, target) -> float:
  """<target| tr_qubit |state><state| |target> on a single-mode state."""
  if state.n_modes != 1 or target.modes != 1:
    raise errors.UsageError('fidelity needs a single-mode state and target')
  sampled = np.conj(_sample(target, state.axes))
  amplitudes = np.sum(sampled[None] * state.branches, axis=1) * state.axes[0].dx
  return float(np.sum(np.abs(amplitudes)**2))


def expectation(state: HybridGridState,
                observable: constants.Observable,
                mode: int = 0) -> complex:
  """tr(O rho) of a single-mode observable on the qubit-traced state."""
  if mode >= state.n_modes:
    raise errors.UsageError('mode %d outside the state' % mode)
  axis = state.axes[mode]
  index = mode + 1
  arr = state.branches
  obs = constants.Observable
  position = {
      obs.POSITION: axis.points,
      obs.STABILIZER_Q: np.exp(2j * np.pi * axis.points),
  }
  momentum = {
      obs.MOMENTUM: axis.momenta,
      obs.STABILIZER_P: np.exp(-1j * axis.momenta),
  }
  density = _marginal(arr, index)
  norm = np.sum(density)
  if observable in position:
    return complex(np.sum(position[observable] * density) / norm)
  spectral = _momentum_marginal(arr, index)
  p_edge = axis.p_max * (1 - 2 * _EDGE_FRACTION)
  if _mass_fraction(spectral, np.abs(axis.momenta) > p_edge) > (
      constants.GRID_EDGE_MASS):
    raise errors.ResolutionError('momentum content reaches the grid limit')
  spectral = spectral / np.sum(spectral)
  if observable in momentum:
    return complex(np.sum(momentum[observable] * spectral))
  if observable == obs.ENERGY:
    return complex(
        np.sum(axis.points**2 * density) / norm +
        np.sum(axis.momenta**2 * spectral))
  raise errors.UsageError('unknown observable %r' % (observable,))


def dump_state(state: HybridGridState, path: str):
  """Writes a state to a versioned .npz archive."""
  with open(path, 'wb') as fp:
    np.savez(
        fp,
        version=constants.STATE_DUMP_VERSION,
        x_min=[a.x_min for a in state.axes],
        dx=[a.dx for a in state.axes],
        n_points=[a.n_points for a in state.axes],
        qubits=state.n_qubits,
        branches=state.branches)


def load_state(path: str) -> HybridGridState:
  with np.load(path) as archive:
    version = int(archive['version'])
    if version != constants.STATE_DUMP_VERSION:
      raise errors.UsageError('unsupported state dump version %d' % version)
    axes = [
        GridAxis(float(x), float(d), int(n)) for x, d, n in zip(
            archive['x_min'], archive['dx'], archive['n_points'])
    ]
    return HybridGridState(axes, archive['branches'])
