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
"""Elementary operations, circuits, compiler passes and operation counts.

Gaussian unitaries are U(A) = exp(i R^T A R / 2) for a symmetric matrix A over
the quadratures R = (Q_1, P_1, Q_2, P_2, ...). Their action on first moments
is the symplectic matrix exp(-J A), J the canonical form. Displacements are
D(d) = exp(i (d_p Q - d_q P)), which shift the mean (Q, P) by (d_q, d_p).

A gate is bounded when ||A||_op <= 2 pi or ||d|| <= 2 pi. Strict circuits
reject unbounded gates at construction time.
"""

import dataclasses
import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from absl import logging
import numpy as np
from scipy import linalg

from gkp_prep_tool import constants
from gkp_prep_tool import errors

_UNITARY_KINDS = (constants.GateKind.QUBIT_UNITARY,
                  constants.GateKind.GAUSSIAN_UNITARY,
                  constants.GateKind.DISPLACEMENT,
                  constants.GateKind.CTRL_DISPLACEMENT)
_PREP_KINDS = (constants.GateKind.PREP_VACUUM, constants.GateKind.PREP_QUBIT0)
_MEASURE_KINDS = (constants.GateKind.HOMODYNE_Q,
                  constants.GateKind.QUBIT_MEASURE)

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclasses.dataclass(frozen=True, eq=False)
class Gate:
  """One elementary operation.

  Attributes:
    kind: the GateKind.
    modes: oscillator modes the gate acts on.
    qubits: qubits the gate acts on (the control for controlled gates).
    matrix: symmetric A for Gaussian unitaries, the unitary for qubit gates.
    vector: displacement (d_q, d_p).
    name: shorthand the gate was built from, e.g. 'squeeze'.
    param: scalar parameter of the shorthand.
  """
  kind: constants.GateKind
  modes: Tuple[int, ...] = ()
  qubits: Tuple[int, ...] = ()
  matrix: Optional[np.ndarray] = None
  vector: Optional[Tuple[float, float]] = None
  name: str = ''
  param: Optional[float] = None

  @property
  def is_unitary(self):
    return self.kind in _UNITARY_KINDS

  @property
  def strength(self) -> float:
    """||A||_op for Gaussian unitaries, ||d|| for displacements, else 0."""
    if self.kind == constants.GateKind.GAUSSIAN_UNITARY:
      return float(np.max(np.abs(np.linalg.eigvalsh(self.matrix))))
    if self.kind in (constants.GateKind.DISPLACEMENT,
                     constants.GateKind.CTRL_DISPLACEMENT):
      return float(np.hypot(*self.vector))
    return 0.0

  def __repr__(self):
    label = self.name or self.kind.value
    if self.param is not None:
      label = '%s(%.6g)' % (label, self.param)
    elif self.vector is not None:
      label = '%s(%.6g, %.6g)' % ((label,) + tuple(self.vector))
    return 'Gate(%s, modes=%s, qubits=%s)' % (label, self.modes, self.qubits)


def _gaussian(modes, matrix, name='', param=None):
  matrix = np.array(matrix, dtype=float)
  if matrix.shape != (2 * len(modes),) * 2:
    raise errors.UsageError('A must be %dx%d' % ((2 * len(modes),) * 2))
  if not np.allclose(matrix, matrix.T, atol=1e-14):
    raise errors.ParameterError('A must be symmetric')
  if len(set(modes)) != len(modes):
    raise errors.UsageError('repeated mode in %r' % (modes,))
  return Gate(
      constants.GateKind.GAUSSIAN_UNITARY,
      modes=tuple(modes),
      matrix=matrix,
      name=name,
      param=param)


def gaussian(modes: Sequence[int], matrix) -> Gate:
  """Generic Gaussian unitary U(A) on the given modes."""
  return _gaussian(tuple(modes), matrix)


def squeeze(mode: int, z: float) -> Gate:
  """S(z), acting as psi(x) -> exp(z/2) psi(exp(z) x)."""
  return _gaussian((mode,), [[0, z], [z, 0]], 'squeeze', z)


def phase_shift(mode: int, phi: float) -> Gate:
  """exp(i phi (Q^2 + P^2) / 2), a counterclockwise phase-space rotation."""
  return _gaussian((mode,), phi * np.eye(2), 'phase_shift', phi)


def rotation(mode: int, theta: float) -> Gate:
  """U(theta) = exp(-i theta (Q^2 + P^2) / 2), the inverse phase shift."""
  return _gaussian((mode,), -theta * np.eye(2), 'rotation', theta)


def beamsplitter(first: int, second: int, omega: float) -> Gate:
  matrix = np.zeros((4, 4))
  matrix[0, 2] = matrix[2, 0] = matrix[1, 3] = matrix[3, 1] = omega
  return _gaussian((first, second), matrix, 'beamsplitter', omega)


def shear(first: int, second: int, strength: float = 1.0) -> Gate:
  """exp(-i strength P_first Q_second): translates first by strength * Q_second."""
  matrix = np.zeros((4, 4))
  matrix[1, 2] = matrix[2, 1] = -strength
  return _gaussian((first, second), matrix, 'shear', strength)


def displacement(mode: int, dq: float, dp: float) -> Gate:
  return Gate(
      constants.GateKind.DISPLACEMENT,
      modes=(mode,),
      vector=(float(dq), float(dp)),
      name='displacement')


def shift(mode: int, a: float) -> Gate:
  """exp(i a P), translating positions by -a."""
  return dataclasses.replace(displacement(mode, -a, 0.0), name='shift', param=a)


def pos_phase(mode: int, a: float) -> Gate:
  """exp(i a Q)."""
  return dataclasses.replace(
      displacement(mode, 0.0, a), name='pos_phase', param=a)


def ctrl_displacement(qubit: int, mode: int, dq: float, dp: float) -> Gate:
  """Applies D((dq, dp)) to the mode on the |1> branch of the qubit."""
  return Gate(
      constants.GateKind.CTRL_DISPLACEMENT,
      modes=(mode,),
      qubits=(qubit,),
      vector=(float(dq), float(dp)),
      name='ctrl_displacement')


def ctrl_shift(qubit: int, mode: int, a: float) -> Gate:
  return dataclasses.replace(
      ctrl_displacement(qubit, mode, -a, 0.0), name='ctrl_shift', param=a)


def ctrl_pos_phase(qubit: int, mode: int, a: float) -> Gate:
  return dataclasses.replace(
      ctrl_displacement(qubit, mode, 0.0, a), name='ctrl_pos_phase', param=a)


def qubit_unitary(qubits: Sequence[int], matrix, name: str = '') -> Gate:
  qubits = tuple(qubits)
  matrix = np.array(matrix, dtype=complex)
  size = 2**len(qubits)
  if len(qubits) not in (1, 2) or matrix.shape != (size, size):
    raise errors.UsageError('qubit unitaries act on one or two qubits')
  if not np.allclose(matrix.conj().T @ matrix, np.eye(size), atol=1e-10):
    raise errors.ParameterError('qubit gate matrix is not unitary')
  return Gate(
      constants.GateKind.QUBIT_UNITARY, qubits=qubits, matrix=matrix, name=name)


def hadamard(qubit: int) -> Gate:
  return qubit_unitary((qubit,), HADAMARD, 'hadamard')


def prep_vacuum(mode: int) -> Gate:
  return Gate(constants.GateKind.PREP_VACUUM, modes=(mode,))


def prep_qubit0(qubit: int) -> Gate:
  return Gate(constants.GateKind.PREP_QUBIT0, qubits=(qubit,))


def homodyne(mode: int) -> Gate:
  return Gate(constants.GateKind.HOMODYNE_Q, modes=(mode,))


def measure_qubit(qubit: int) -> Gate:
  return Gate(constants.GateKind.QUBIT_MEASURE, qubits=(qubit,))


@dataclasses.dataclass(frozen=True)
class Violation:
  norm: float
  limit: float


def validate_bounded(gate: Gate) -> Optional[Violation]:
  """Returns None for a bounded gate and the offending norm otherwise."""
  norm = gate.strength
  if norm > constants.STRENGTH_LIMIT + constants.STRENGTH_SLACK:
    return Violation(norm, constants.STRENGTH_LIMIT)
  return None


class Circuit:
  """Ordered list of gates on m+1 modes and m' qubits.

  Attributes:
    n_modes: number of oscillator modes.
    n_qubits: number of qubits.
    gates: list of Gate in time order.
    labels: free-form metadata.
    strict: whether unbounded gates are rejected.
  """

  def __init__(self, n_modes=1, n_qubits=0, gates=(), labels=None,
               strict=True):
    if n_modes < 1 or n_qubits < 0:
      raise errors.UsageError('a circuit needs at least one mode')
    self.n_modes = n_modes
    self.n_qubits = n_qubits
    self.strict = strict
    self.labels: Dict[str, str] = dict(labels or {})
    self.gates: List[Gate] = []
    self.extend(gates)

  def append(self, gate: Gate):
    for mode in gate.modes:
      if not 0 <= mode < self.n_modes:
        raise errors.UsageError('mode %d outside register of %d modes' %
                                (mode, self.n_modes))
    for qubit in gate.qubits:
      if not 0 <= qubit < self.n_qubits:
        raise errors.UsageError('qubit %d outside register of %d qubits' %
                                (qubit, self.n_qubits))
    if self.strict:
      violation = validate_bounded(gate)
      if violation:
        raise errors.ParameterError(
            '%r has strength %.6g above the limit %.6g' %
            (gate, violation.norm, violation.limit))
    self.gates.append(gate)
    return self

  def extend(self, gates: Iterable[Gate]):
    for gate in gates:
      self.append(gate)
    return self

  def __iter__(self):
    return iter(self.gates)

  def __len__(self):
    return len(self.gates)

  def __repr__(self):
    return 'Circuit(modes=%d, qubits=%d, gates=%d)' % (
        self.n_modes, self.n_qubits, len(self.gates))


def symplectic_form(n_modes: int) -> np.ndarray:
  return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _embed(gate: Gate, n_modes: int) -> np.ndarray:
  index = [2 * m + k for m in gate.modes for k in (0, 1)]
  full = np.zeros((2 * n_modes, 2 * n_modes))
  full[np.ix_(index, index)] = gate.matrix
  return full


def gaussian_mean_map(gate: Gate, n_modes: int) -> np.ndarray:
  """exp(-J A) of a Gaussian unitary embedded into n_modes modes."""
  return linalg.expm(-symplectic_form(n_modes) @ _embed(gate, n_modes))


@dataclasses.dataclass(frozen=True)
class SymplecticAction:
  """First-moment action s -> S s + displacement."""
  S: np.ndarray  # pylint: disable=invalid-name
  displacement: np.ndarray

  def is_symplectic(self, atol=1e-10):
    form = symplectic_form(self.S.shape[0] // 2)
    return np.allclose(self.S @ form @ self.S.T, form, atol=atol)


def symplectic_of(circuit: Circuit) -> SymplecticAction:
  """Composes the first-moment action of a Gaussian circuit.

  Raises:
    CapabilityError: if the circuit contains a non-Gaussian operation.
  """
  n = circuit.n_modes
  s_matrix = np.eye(2 * n)
  shift_vector = np.zeros(2 * n)
  for gate in circuit:
    if gate.kind == constants.GateKind.GAUSSIAN_UNITARY:
      mean_map = gaussian_mean_map(gate, n)
      s_matrix = mean_map @ s_matrix
      shift_vector = mean_map @ shift_vector
    elif gate.kind == constants.GateKind.DISPLACEMENT:
      mode = gate.modes[0]
      shift_vector[2 * mode:2 * mode + 2] += gate.vector
    else:
      raise errors.CapabilityError('%r is not a Gaussian operation' % gate)
  return SymplecticAction(s_matrix, shift_vector)


def compile_displacement(d: Sequence[float],
                         strict: bool = True,
                         mode: int = 0,
                         n_modes: int = 1) -> Tuple[Circuit, int]:
  """Factors D(d) into bounded-strength gates.

  For ||d|| <= 2 pi the displacement itself is bounded. Otherwise, with
  c = ||d||, N = ceil(log c) and z = log(c) / N,

    D(d) = U(theta) S(-z)^N exp(-iP) S(z)^N U(-theta)

  where U(theta) rotates (c, 0) onto d. Rotations by zero are omitted.

  Args:
    d: displacement (d_q, d_p).
    strict: when False the single unbounded displacement is emitted.
    mode: target mode.
    n_modes: register size of the returned circuit.

  Returns:
    (circuit, gate count).
  """
  dq, dp = (float(v) for v in d)
  norm = math.hypot(dq, dp)
  circuit = Circuit(n_modes, strict=strict, labels={'compiled': 'displacement'})
  if norm == 0:
    return circuit, 0
  if norm <= constants.STRENGTH_LIMIT or not strict:
    circuit.append(displacement(mode, dq, dp))
    return circuit, 1
  steps = int(math.ceil(math.log(norm)))
  z = math.log(norm) / steps
  theta = math.atan2(-dp, dq) % (2 * math.pi)
  if theta:
    circuit.append(rotation(mode, -theta))
  circuit.extend(squeeze(mode, z) for _ in range(steps))
  circuit.append(displacement(mode, 1.0, 0.0))
  circuit.extend(squeeze(mode, -z) for _ in range(steps))
  if theta:
    circuit.append(rotation(mode, theta))
  logging.debug('compiled D(%g, %g) into %d gates', dq, dp, len(circuit))
  return circuit, len(circuit)


def compile_squeeze(z_total: float, mode: int = 0,
                    n_modes: int = 1) -> Tuple[Circuit, int]:
  """S(z_total) as ceil(|z_total|) squeezers of equal strength <= 1."""
  circuit = Circuit(n_modes, labels={'compiled': 'squeeze'})
  steps = int(math.ceil(abs(z_total)))
  if steps:
    circuit.extend(squeeze(mode, z_total / steps) for _ in range(steps))
  return circuit, steps


def compile_squeeze_split(rounds: int, delta: float, mode: int = 0,
                          n_modes: int = 1,
                          n_qubits: int = 0) -> Tuple[Circuit, int]:
  """S(log 2)^rounds S(z_delta)^ceil(log 1/delta), preparing Psi_{2^-n delta}.

  Applied to the vacuum this yields a squeezed vacuum of width
  2^-rounds * delta with rounds + ceil(log 1/delta) gates.
  """
  if not delta > 0 or rounds < 0:
    raise errors.ParameterError('need delta > 0 and rounds >= 0')
  circuit = Circuit(n_modes, n_qubits, labels={'compiled': 'squeeze_split'})
  circuit.extend(squeeze(mode, math.log(2)) for _ in range(rounds))
  rest = math.log(1 / delta)
  steps = int(math.ceil(abs(rest)))
  circuit.extend(squeeze(mode, rest / steps) for _ in range(steps))
  return circuit, len(circuit)


@dataclasses.dataclass(frozen=True)
class OpCountReport:
  """Elementary-operation counts of a protocol.

  Attributes:
    preps: state preparations, one per register plus explicit re-preparations.
    unitaries: unitary gates T (T_1 for heralded protocols).
    measurements: measurements counted by the accounting mode.
    correction_budget: worst-case gates T_2 of the classically controlled
      correction.
    total: T + (m+1) + m' for unitary protocols and
      T_1 + T_2 + (2m+1) + 2m' for heralded ones.
    mode: the CountMode used.
  """
  preps: int
  unitaries: int
  measurements: int
  correction_budget: int
  total: int
  mode: constants.CountMode

  def as_dict(self):
    return dict(
        preps=self.preps,
        unitaries=self.unitaries,
        measurements=self.measurements,
        correction_budget=self.correction_budget,
        total=self.total,
        mode=self.mode.value)


def op_count(circuit: Circuit,
             mode: constants.CountMode = constants.CountMode.UNITARY,
             correction_budget: int = 0) -> OpCountReport:
  """Counts the elementary operations of a circuit."""
  unitaries = sum(1 for g in circuit if g.kind in _UNITARY_KINDS)
  preps = circuit.n_modes + circuit.n_qubits + sum(
      1 for g in circuit if g.kind in _PREP_KINDS)
  explicit = sum(1 for g in circuit if g.kind in _MEASURE_KINDS)
  if mode == constants.CountMode.HERALDED:
    # Every register except the output mode is measured once.
    measurements = max(explicit, circuit.n_modes - 1 + circuit.n_qubits)
    budget = correction_budget
  else:
    measurements = explicit
    budget = 0
  return OpCountReport(preps, unitaries, measurements, budget,
                       unitaries + budget + preps + measurements, mode)


@dataclasses.dataclass(frozen=True)
class ComplexityLower:
  f: float
  simplified: float


def displacement_complexity_lower(d: Sequence[float]) -> ComplexityLower:
  """Moment-limit lower bound on the gates needed to prepare |d>.

  Returns:
    f(||d||) = (2 log||d|| + log(1 + 1/||d||^2)) / (8 pi); the circuit
    complexity is at least f - 1, which is at least the simplified
    log||d|| / (4 pi) - 1.
  """
  norm = math.hypot(*d)
  if norm == 0:
    raise errors.ParameterError('the complexity bound needs d != 0')
  f = (2 * math.log(norm) + math.log1p(1 / norm**2)) / (8 * math.pi)
  return ComplexityLower(f, math.log(norm) / (4 * math.pi) - 1)


@dataclasses.dataclass(frozen=True)
class CorrectionBudget:
  raw: int
  compiled: int


def correction_counts(length: int) -> CorrectionBudget:
  """Worst-case gate counts of the correction exp(i round(x) P).

  Returns:
    raw = 2 ceil(log(L/8 + 1/2)) + 3 and the largest compiled count over all
    corrections an accepted outcome can require.
  """
  raw = 2 * int(math.ceil(math.log(length / 8 + 0.5))) + 3
  largest = length // 8
  compiled = max(
      [compile_displacement((sign * k, 0.0))[1]
       for k in range(1, largest + 1)
       for sign in (-1, 1)] or [0])
  return CorrectionBudget(raw, compiled)
