# Lint as: python3
"""Module for reading and writing the line-oriented circuit text format.

A circuit file starts with header lines and lists one gate per line:

  # peak doubling
  MODES 1
  QUBITS 1
  LABEL compiled peak_doubling
  SQUEEZE 0 -0.6931471805599453
  CSHIFT 0 0 -1.0
  HADAMARD 0
  CPOS_PHASE 0 0 3.141592653589793

Blank lines and text after '#' are ignored. Mode and qubit indices come
first, real parameters last.
"""

import numpy as np

from gkp_prep_tool import circuit
from gkp_prep_tool import constants
from gkp_prep_tool import errors

STATE_HEADER, STATE_GATES = range(2)

# Opcode => (constructor, number of integer indices, number of parameters).
_SIMPLE = {
    'SQUEEZE': (circuit.squeeze, 1, 1),
    'ROTATION': (circuit.rotation, 1, 1),
    'PHASE_SHIFT': (circuit.phase_shift, 1, 1),
    'BEAMSPLITTER': (circuit.beamsplitter, 2, 1),
    'SHEAR': (circuit.shear, 2, 1),
    'DISPLACE': (circuit.displacement, 1, 2),
    'SHIFT': (circuit.shift, 1, 1),
    'POS_PHASE': (circuit.pos_phase, 1, 1),
    'CDISPLACE': (circuit.ctrl_displacement, 2, 2),
    'CSHIFT': (circuit.ctrl_shift, 2, 1),
    'CPOS_PHASE': (circuit.ctrl_pos_phase, 2, 1),
    'HADAMARD': (circuit.hadamard, 1, 0),
    'PREP_VAC': (circuit.prep_vacuum, 1, 0),
    'PREP_Q0': (circuit.prep_qubit0, 1, 0),
    'MEASURE_Q': (circuit.homodyne, 1, 0),
    'MEASURE_QUBIT': (circuit.measure_qubit, 1, 0),
}

# Gate shorthand name => opcode.
_NAMES = {
    'squeeze': 'SQUEEZE',
    'rotation': 'ROTATION',
    'phase_shift': 'PHASE_SHIFT',
    'beamsplitter': 'BEAMSPLITTER',
    'shear': 'SHEAR',
    'displacement': 'DISPLACE',
    'shift': 'SHIFT',
    'pos_phase': 'POS_PHASE',
    'ctrl_displacement': 'CDISPLACE',
    'ctrl_shift': 'CSHIFT',
    'ctrl_pos_phase': 'CPOS_PHASE',
    'hadamard': 'HADAMARD',
}

_KIND_OPCODES = {
    constants.GateKind.PREP_VACUUM: 'PREP_VAC',
    constants.GateKind.PREP_QUBIT0: 'PREP_Q0',
    constants.GateKind.HOMODYNE_Q: 'MEASURE_Q',
    constants.GateKind.QUBIT_MEASURE: 'MEASURE_QUBIT',
}


class CircuitParser:
  """Class that parses a circuit file into a circuit.Circuit.

  Attributes:
    file: A string represents path to the circuit file.
    strict: whether gates above the strength limit are rejected.
  """

  def __init__(self, file, strict=True):
    self.file = file
    self.strict = strict

  def load(self):
    with open(self.file, 'r') as fp:
      return fp.read()

  def parse(self):
    """Parses the file.

    Returns:
      circuit.Circuit with the header's register sizes and labels.

    Raises:
      UsageError: for malformed lines, naming the line number.
    """
    return parse_text(self.load(), self.strict)


def _fail(line_num, message):
  raise errors.UsageError('line %d: %s' % (line_num, message))


def _parse_gate(opcode, args, line_num):
  if opcode == 'GAUSSIAN':
    if not args:
      _fail(line_num, 'GAUSSIAN needs a mode count')
    count = int(args[0])
    modes = [int(a) for a in args[1:1 + count]]
    values = [float(a) for a in args[1 + count:]]
    if len(values) != (2 * count)**2:
      _fail(line_num, 'GAUSSIAN on %d modes needs %d matrix entries' %
            (count, (2 * count)**2))
    return circuit.gaussian(modes,
                            np.reshape(values, (2 * count, 2 * count)))
  if opcode == 'QUBIT':
    # QUBIT q re00 im00 re01 im01 re10 im10 re11 im11
    if len(args) != 9:
      _fail(line_num, 'QUBIT needs a qubit and 8 matrix entries')
    parts = np.array([float(a) for a in args[1:]])
    matrix = (parts[0::2] + 1j * parts[1::2]).reshape(2, 2)
    return circuit.qubit_unitary((int(args[0]),), matrix)
  if opcode not in _SIMPLE:
    _fail(line_num, 'unknown gate %r' % opcode)
  constructor, indices, params = _SIMPLE[opcode]
  if len(args) != indices + params:
    _fail(line_num, '%s takes %d arguments, got %d' %
          (opcode, indices + params, len(args)))
  return constructor(*([int(a) for a in args[:indices]] +
                       [float(a) for a in args[indices:]]))


def parse_text(text, strict=True):
  """Parses circuit text; see the module docstring for the format."""
  n_modes, n_qubits = 1, 0
  labels = {}
  gates = []
  state = STATE_HEADER
  for line_num, line in enumerate(text.splitlines(), start=1):
    line = line.split('#', 1)[0].strip()
    if not line:
      continue
    opcode, *args = line.split()
    opcode = opcode.upper()
    if opcode in ('MODES', 'QUBITS', 'LABEL'):
      if state != STATE_HEADER:
        _fail(line_num, '%s after the first gate' % opcode)
      if opcode == 'LABEL':
        if len(args) < 2:
          _fail(line_num, 'LABEL needs a key and a value')
        labels[args[0]] = ' '.join(args[1:])
      elif len(args) != 1:
        _fail(line_num, '%s takes one integer' % opcode)
      elif opcode == 'MODES':
        n_modes = int(args[0])
      else:
        n_qubits = int(args[0])
      continue
    state = STATE_GATES
    try:
      gates.append(_parse_gate(opcode, args, line_num))
    except ValueError as e:
      if isinstance(e, errors.Error):
        raise
      _fail(line_num, str(e))
  result = circuit.Circuit(n_modes, n_qubits, labels=labels, strict=strict)
  result.extend(gates)
  return result


def format_gate(gate):
  """One text line for a gate."""
  opcode = _KIND_OPCODES.get(gate.kind) or _NAMES.get(gate.name)
  if opcode in _SIMPLE:
    _, _, params = _SIMPLE[opcode]
    indices = list(gate.qubits) + list(gate.modes)
    if params == 1:
      values = [gate.param]
    elif params == 2:
      values = list(gate.vector)
    else:
      values = []
    return ' '.join([opcode] + [str(i) for i in indices] +
                    [repr(float(v)) for v in values])
  if gate.kind == constants.GateKind.GAUSSIAN_UNITARY:
    return ' '.join(['GAUSSIAN', str(len(gate.modes))] +
                    [str(m) for m in gate.modes] +
                    [repr(float(v)) for v in gate.matrix.ravel()])
  if gate.kind == constants.GateKind.QUBIT_UNITARY and len(gate.qubits) == 1:
    entries = []
    for value in gate.matrix.ravel():
      entries += [repr(float(value.real)), repr(float(value.imag))]
    return ' '.join(['QUBIT', str(gate.qubits[0])] + entries)
  raise errors.CapabilityError('%r has no text form' % gate)


def dumps(circ):
  lines = ['MODES %d' % circ.n_modes, 'QUBITS %d' % circ.n_qubits]
  lines += ['LABEL %s %s' % item for item in sorted(circ.labels.items())]
  lines += [format_gate(gate) for gate in circ]
  return '\n'.join(lines) + '\n'


def write(circ, path):
  with open(path, 'w') as fp:
    fp.write(dumps(circ))
