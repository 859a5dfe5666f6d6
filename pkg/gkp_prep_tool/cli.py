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
"""Command line surface: protocol runs, verification suites and sweeps.

Usage:

  gkp_prep.py <command> [--flags]

Commands are comb, gaussify, gkp, verify <suite>, sweep, compile and
simulate. Flags may also come from an absl flagfile (--flagfile=path); flags
given later on the command line override it.

Exit codes: 0 when no verdict is violated, 2 for usage and parameter errors,
3 when a bound verdict is violated and 4 for numerical capability failures.
"""

import collections
import concurrent.futures
import csv
import dataclasses
import enum
import itertools
import json
import math
import sys
import time
from typing import Any, Dict, List, Optional

from absl import flags
from absl import logging
import numpy as np

import circuitparse
from gkp_prep_tool import bounds
from gkp_prep_tool import circuit
from gkp_prep_tool import constants
from gkp_prep_tool import errors
from gkp_prep_tool import preconditions
from gkp_prep_tool import protocols
from gkp_prep_tool import report
from gkp_prep_tool import sim
from gkp_prep_tool import states
from gkp_prep_tool import suites

FLAGS = flags.FLAGS

_BACKENDS = [b.value for b in constants.Backend]

flags.DEFINE_enum('backend', constants.Backend.AUTO.value, _BACKENDS,
                  'Simulation backend.')
flags.DEFINE_float('tol', constants.DEFAULT_TOL,
                   'Discarded weight when truncating infinite peak sums.')
flags.DEFINE_integer('seed', 0, 'Seed of randomized suites.')
flags.DEFINE_string('out', None, 'Path of the JSON report.')
flags.DEFINE_string('csv', None, 'Path of the CSV table (verify, sweep).')
flags.DEFINE_integer('workers', 1, 'Concurrent sweep cells.', lower_bound=1)
flags.DEFINE_bool('force', False,
                  'Run outside the proven parameter ranges; the affected '
                  'verdicts are reported as precondition_unmet.')
flags.DEFINE_bool('quiet', False, 'Do not print the verdict table.')

flags.DEFINE_float('kappa', None, 'Envelope parameter kappa.')
flags.DEFINE_float('delta', None, 'Peak width Delta.')
flags.DEFINE_integer('rounds', None, 'Peak-doubling rounds n of the comb.')
flags.DEFINE_integer('L', None, 'Comb length of the Gaussification input.')
flags.DEFINE_enum('input', 'comb', ['comb', 'truncated_comb'],
                  'Gaussification input state.')
flags.DEFINE_float('epsilon', None,
                   'Truncation of the truncated_comb input, default sqrt(Delta).')
flags.DEFINE_float('resolution', None,
                   'Homodyne outcome spacing, default min(0.02, kappa / 5).')
flags.DEFINE_string('dump_state', None, 'Path of a .npz grid state dump.')

flags.DEFINE_list('R', None, 'Window radii of the tails suite.')
flags.DEFINE_integer('gates', constants.MOMENT_GATES,
                     'Gates per random circuit of the moments suite.')
flags.DEFINE_integer('trials', constants.MOMENT_TRIALS,
                     'Random circuits of the moments suite.')

flags.DEFINE_enum('protocol', 'gkp', ['comb', 'gaussify', 'gkp'],
                  'Protocol swept by the sweep command.')
flags.DEFINE_list('kappas', None, 'kappa values of a sweep.')
flags.DEFINE_list('deltas', None, 'Delta values of a sweep.')
flags.DEFINE_list('rounds_list', None, 'Round counts of a comb sweep.')
flags.DEFINE_list('lengths', None, 'Comb lengths of a Gaussification sweep.')

flags.DEFINE_list('displacement', None, 'Displacement dq,dp to compile.')
flags.DEFINE_float('squeeze', None, 'Squeezing parameter z to compile.')
flags.DEFINE_string('circuit', None, 'Circuit file to simulate.')
flags.DEFINE_string('circuit_out', None, 'Where compile writes the circuit.')
flags.DEFINE_list('target_displacement', None,
                  'Coherent state dq,dp the simulated state is compared with.')
flags.DEFINE_float('grid_half_width', 32.0, 'Half-width of simulate grids.')
flags.DEFINE_float('grid_dx', 1 / 32, 'Largest spacing of simulate grids.')
flags.DEFINE_bool('loose', False,
                  'Accept gates above the strength limit in circuit files.')

# Flags echoed into the config section of every report.
_CONFIG_FLAGS = ('backend', 'tol', 'seed', 'force', 'kappa', 'delta',
                 'rounds', 'L', 'input', 'epsilon', 'resolution', 'R', 'gates',
                 'trials', 'protocol', 'kappas', 'deltas', 'rounds_list',
                 'lengths', 'displacement', 'squeeze', 'circuit',
                 'target_displacement', 'grid_half_width', 'grid_dx', 'loose',
                 'workers')

_NUMERIC_ERRORS = (errors.ResolutionError, errors.DomainOverflowError,
                   errors.CapabilityError, errors.CapacityError,
                   errors.NumericError, errors.PreconditionError)


@dataclasses.dataclass
class Outcome:
  """What a command hands back to main for reporting."""
  summary: Dict[str, Any]
  bucket: report.ReportBucket = dataclasses.field(
      default_factory=report.ReportBucket)
  table: Optional[List[Dict[str, Any]]] = None


def _underscored(argv):
  """Accepts --dump-state style spellings of underscored flag names."""
  result = list(argv[:1])
  for i, arg in enumerate(argv[1:], 1):
    if arg == '--':
      return result + list(argv[i:])
    if arg.startswith('--') and '-' in arg[2:].split('=', 1)[0]:
      name, sep, value = arg[2:].partition('=')
      if name.replace('-', '_') in FLAGS:
        arg = '--%s%s%s' % (name.replace('-', '_'), sep, value)
    result.append(arg)
  return result


def parse_flags(argv):
  """Flags parser for app.run; flag errors exit with the usage code."""
  try:
    return FLAGS(_underscored(argv))
  except flags.Error as e:
    report.print_error(str(e), 'Run with --helpfull for the flag list.')
    sys.exit(constants.ExitCode.USAGE)


def defaults():
  return dict(
      default_tol=constants.DEFAULT_TOL,
      term_cap=constants.DEFAULT_TERM_CAP,
      outcome_dx=constants.OUTCOME_DX,
      outcome_kappa_ratio=constants.OUTCOME_KAPPA_RATIO,
      grid_samples_per_width=constants.GRID_SAMPLES_PER_WIDTH,
      grid_margin_widths=constants.GRID_MARGIN_WIDTHS,
      grid_edge_mass=constants.GRID_EDGE_MASS,
      grid_max_points=constants.GRID_MAX_POINTS,
      quad_epsabs=constants.QUAD_EPSABS,
      quad_epsrel=constants.QUAD_EPSREL,
      even_tol=constants.EVEN_TOL,
      state_dump_version=constants.STATE_DUMP_VERSION,
      opcount_c1=constants.OPCOUNT_C1,
      opcount_c2=constants.OPCOUNT_C2)


def _jsonable(value):
  if isinstance(value, np.generic):
    return value.item()
  if isinstance(value, np.ndarray):
    return value.tolist()
  if isinstance(value, enum.Enum):
    return value.value
  raise TypeError('%r is not JSON serializable' % (value,))


def _clean(value):
  """Replaces non-finite floats, which JSON cannot hold, by strings."""
  if isinstance(value, float) and not math.isfinite(value):
    return str(value)
  if isinstance(value, dict):
    return {k: _clean(v) for k, v in value.items()}
  if isinstance(value, (list, tuple)):
    return [_clean(v) for v in value]
  return value


def dump_document(document) -> str:
  return json.dumps(
      _clean(json.loads(json.dumps(document, default=_jsonable))),
      sort_keys=True,
      indent=2)


def _require(*names):
  missing = [name for name in names if FLAGS[name].value is None]
  if missing:
    raise errors.UsageError('missing flags: ' +
                            ', '.join('--' + name for name in missing))


def _floats(values, name):
  try:
    return [float(v) for v in values]
  except ValueError:
    raise errors.UsageError('--%s takes numbers, got %r' % (name, values))


def _pair(values, name):
  pair = _floats(values, name)
  if len(pair) != 2:
    raise errors.UsageError('--%s takes two numbers dq,dp' % name)
  return pair


def _gate_preconditions(conditions, params):
  unmet = conditions.unmet(params)
  if not unmet:
    return
  if not FLAGS.force:
    raise errors.UsageError(
        'parameters outside the proven range (%s); rerun with --force to '
        'report precondition_unmet verdicts' % '; '.join(unmet))
  logging.warning('forced outside the proven range: %s', '; '.join(unmet))


def _backend():
  return constants.Backend(FLAGS.backend)


def _protocol_outcome(section, protocol_report):
  outcome = Outcome(protocol_report.as_dict())
  outcome.bucket.add_rows(section, protocol_report.rows)
  return outcome


# Protocol commands.


def cmd_comb(args):
  del args
  _require('delta', 'rounds')
  _gate_preconditions(preconditions.COMB, dict(delta=FLAGS.delta))
  backend = _backend()
  if FLAGS.dump_state and backend == constants.Backend.AUTO:
    backend = constants.Backend.GRID
  state, protocol_report = protocols.run_comb(
      FLAGS.delta, FLAGS.rounds, backend, tol=FLAGS.tol)
  if FLAGS.dump_state:
    if not isinstance(state, sim.HybridGridState):
      state = protocols.sample_branches(
          state.branches, protocols.comb_axis(FLAGS.delta, FLAGS.rounds))
    sim.dump_state(state, FLAGS.dump_state)
    protocol_report.extras['dump_state'] = FLAGS.dump_state
  return _protocol_outcome('comb', protocol_report)


def cmd_gaussify(args):
  del args
  _require('kappa', 'L', 'delta')
  kappa, length, delta = FLAGS.kappa, FLAGS.L, FLAGS.delta
  if length <= 0 or length % 8:
    raise errors.ParameterError('L must be a positive multiple of 8, got %d' %
                                length)
  _gate_preconditions(preconditions.GAUSSIFICATION,
                      dict(kappa=kappa, delta=delta, length=length))
  exact = FLAGS.input == 'truncated_comb'
  if exact:
    epsilon = FLAGS.epsilon or math.sqrt(delta)
    spec = states.StateSpec.truncated_comb(length, delta, epsilon)
  else:
    spec = states.StateSpec.comb(length, delta)
  _, protocol_report = protocols.run_gaussification(
      states.build_state(spec, FLAGS.tol),
      kappa,
      length,
      delta,
      _backend(),
      FLAGS.resolution,
      exact_input=exact,
      tol=FLAGS.tol)
  protocol_report.extras['input'] = spec.describe()
  return _protocol_outcome('gaussify', protocol_report)


def cmd_gkp(args):
  del args
  _require('kappa', 'delta')
  _gate_preconditions(preconditions.GKP_DERIVED,
                      dict(kappa=FLAGS.kappa, delta=FLAGS.delta))
  _, protocol_report = protocols.run_gkp(
      FLAGS.kappa, FLAGS.delta, _backend(), FLAGS.resolution, tol=FLAGS.tol)
  return _protocol_outcome('gkp', protocol_report)


# Verification suites.


def suite_options():
  options = suites.SuiteOptions(
      gates=FLAGS.gates, trials=FLAGS.trials, seed=FLAGS.seed, tol=FLAGS.tol)
  if FLAGS.kappa is not None:
    options.kappas = (FLAGS.kappa,)
  if FLAGS.delta is not None:
    options.deltas = (FLAGS.delta,)
  if FLAGS.R:
    options.radii = tuple(_floats(FLAGS.R, 'R'))
  return options


def cmd_verify(args):
  if len(args) != 1:
    raise errors.UsageError('verify takes one suite: ' +
                            ', '.join(s.value for s in constants.Suite))
  try:
    suite = constants.Suite(args[0])
  except ValueError:
    raise errors.UsageError('unknown suite %r' % args[0])
  results = suites.run_suite(suite, suite_options())
  outcome = Outcome({})
  for name, rows in results.items():
    outcome.bucket.add_rows(name, rows)
  outcome.summary = dict(
      suite=suite.value,
      verdicts={
          name: dict(collections.Counter(r.verdict.value for r in rows))
          for name, rows in results.items()
      })
  return outcome


# Sweeps.


def sweep_cell(protocol, params, backend, tol):
  """Runs one sweep cell; errors become part of the row."""
  row = dict(protocol=protocol, **params)
  try:
    if protocol == 'comb':
      _, result = protocols.run_comb(params['delta'], params['rounds'],
                                     backend, tol=tol)
    elif protocol == 'gaussify':
      comb = states.build_state(
          states.StateSpec.comb(params['length'], params['delta']), tol)
      _, result = protocols.run_gaussification(
          comb, params['kappa'], params['length'], params['delta'], backend,
          completeness=False, tol=tol)
    else:
      _, result = protocols.run_gkp(params['kappa'], params['delta'], backend,
                                    tol=tol)
  except errors.Error as e:
    row['error'] = '%s: %s' % (type(e).__name__, e)
    return row, []
  counts = {v.value: 0 for v in constants.Verdict}
  for r in result.rows:
    counts[r.verdict.value] += 1
  row.update(
      p_acc=result.p_acc,
      fidelity=result.fidelity,
      delta_p=result.delta_p,
      delta_q=result.delta_q,
      op_total=result.op_counts.total,
      error='',
      **counts)
  row.update({
      k: v for k, v in result.params.items() if k not in row
  })
  return row, result.rows


def sweep_cells(protocol):
  if protocol == 'comb':
    _require('deltas', 'rounds_list')
    axes = dict(
        delta=_floats(FLAGS.deltas, 'deltas'),
        rounds=[int(v) for v in _floats(FLAGS.rounds_list, 'rounds_list')])
  elif protocol == 'gaussify':
    _require('kappas', 'deltas', 'lengths')
    axes = dict(
        kappa=_floats(FLAGS.kappas, 'kappas'),
        delta=_floats(FLAGS.deltas, 'deltas'),
        length=[int(v) for v in _floats(FLAGS.lengths, 'lengths')])
  else:
    _require('kappas', 'deltas')
    axes = dict(
        kappa=_floats(FLAGS.kappas, 'kappas'),
        delta=_floats(FLAGS.deltas, 'deltas'))
  names = list(axes)
  return [dict(zip(names, values)) for values in itertools.product(*axes.values())]


def _log_trend(rows):
  """Logs cells where the fidelity grows with Delta at fixed kappa."""
  by_kappa = {}
  for row in rows:
    if row.get('error') or 'kappa' not in row:
      continue
    by_kappa.setdefault(row['kappa'], []).append((row['delta'], row['fidelity']))
  for kappa, points in sorted(by_kappa.items()):
    points.sort()
    for (d0, f0), (d1, f1) in zip(points, points[1:]):
      if f1 > f0 + 1e-3:
        logging.info('fidelity grows from %.6f to %.6f as Delta goes %g -> %g '
                     'at kappa=%g', f0, f1, d0, d1, kappa)


def cmd_sweep(args):
  del args
  protocol = FLAGS.protocol
  cells = sweep_cells(protocol)
  backend = _backend()
  logging.info('sweep: %d %s cells on %d workers', len(cells), protocol,
               FLAGS.workers)
  if FLAGS.workers > 1:
    with concurrent.futures.ProcessPoolExecutor(FLAGS.workers) as pool:
      futures = [
          pool.submit(sweep_cell, protocol, cell, backend, FLAGS.tol)
          for cell in cells
      ]
      results = [f.result() for f in futures]
  else:
    results = [sweep_cell(protocol, cell, backend, FLAGS.tol) for cell in cells]
  outcome = Outcome({})
  table = []
  for index, (row, rows) in enumerate(results):
    table.append(row)
    for r in rows:
      r.parameters['cell'] = index
    outcome.bucket.add_rows('%s.%03d' % (protocol, index), rows)
  _log_trend(table)
  outcome.summary = dict(protocol=protocol, cells=len(cells), rows=table)
  outcome.table = table
  return outcome


# Circuits.


def cmd_compile(args):
  del args
  if (FLAGS.displacement is None) == (FLAGS.squeeze is None):
    raise errors.UsageError('compile takes exactly one of --displacement and '
                            '--squeeze')
  outcome = Outcome({})
  if FLAGS.squeeze is not None:
    compiled, count = circuit.compile_squeeze(FLAGS.squeeze)
    expected = int(math.ceil(abs(FLAGS.squeeze)))
    outcome.bucket.add_row(
        'compile',
        bounds.judge('compile.squeeze_count', dict(z=FLAGS.squeeze), expected,
                     count, constants.Relation.AT_MOST, tolerance=0.0))
    outcome.summary = dict(squeeze=FLAGS.squeeze, count=count)
  else:
    d = _pair(FLAGS.displacement, 'displacement')
    compiled, count = circuit.compile_displacement(d)
    norm = math.hypot(*d)
    params = dict(dq=d[0], dp=d[1])
    rows = []
    if norm > 0:
      upper = 2 * math.ceil(abs(math.log(norm))) + 3
      lower = circuit.displacement_complexity_lower(d)
      action = circuit.symplectic_of(compiled)
      deviation = max(
          float(np.max(np.abs(action.S - np.eye(2)))),
          float(np.max(np.abs(action.displacement - d))) / max(1.0, norm))
      rows = [
          bounds.judge('compile.upper', params, upper, count,
                       constants.Relation.AT_MOST, tolerance=0.0),
          bounds.judge('compile.lower', params, lower.f - 1, count,
                       constants.Relation.AT_LEAST, tolerance=0.0),
          bounds.judge('compile.symplectic', params, 1e-9, deviation,
                       constants.Relation.AT_MOST, tolerance=0.0),
      ]
      outcome.summary = dict(
          displacement=d,
          count=count,
          upper=upper,
          lower=lower.f - 1,
          lower_simplified=lower.simplified)
    else:
      outcome.summary = dict(displacement=d, count=0)
    outcome.bucket.add_rows('compile', rows)
  text = circuitparse.dumps(compiled)
  if FLAGS.circuit_out:
    circuitparse.write(compiled, FLAGS.circuit_out)
    outcome.summary['circuit'] = FLAGS.circuit_out
  elif not FLAGS.quiet:
    print(text, end='')
  return outcome


def cmd_simulate(args):
  del args
  _require('circuit')
  circ = circuitparse.CircuitParser(FLAGS.circuit, strict=not FLAGS.loose).parse()
  if circ.n_qubits > 1:
    raise errors.CapabilityError('grid states carry at most one qubit')
  axis = sim.GridAxis.covering(FLAGS.grid_half_width, FLAGS.grid_dx)
  vacuum = states.build_state(states.StateSpec.vacuum())
  initial = vacuum
  if circ.n_modes == 2:
    initial = states.TwoModeGaussianSum.product(vacuum, vacuum)
  elif circ.n_modes != 1:
    raise errors.CapabilityError('grid states hold one or two modes')
  state = sim.prepare(initial, [axis] * circ.n_modes,
                      sim.QUBIT_ZERO if circ.n_qubits else None)
  start = time.perf_counter()
  state = sim.run(circ, state)
  moments = bounds.measure_moments(state)
  outcome = Outcome(
      dict(
          gates=len(circ),
          grid=axis.describe(),
          norm=state.norm_sq(),
          mean=moments.s.tolist(),
          energy=moments.energy,
          runtime=time.perf_counter() - start))
  counts = circuit.op_count(circ)
  outcome.summary['op_counts'] = counts.as_dict()
  outcome.bucket.add_row(
      'simulate',
      bounds.judge('simulate.energy_limit', dict(gates=counts.unitaries),
                   bounds.energy_limit(counts.unitaries,
                                       circ.n_modes - 1 + circ.n_qubits),
                   moments.energy, constants.Relation.AT_MOST))
  if FLAGS.target_displacement:
    if circ.n_modes != 1:
      raise errors.UsageError('--target_displacement needs a one-mode circuit')
    dq, dp = _pair(FLAGS.target_displacement, 'target_displacement')
    target = states.build_state(states.StateSpec.coherent(dq, dp))
    fidelity = sim.reduce_fidelity(state, target)
    outcome.summary['fidelity'] = fidelity
    outcome.bucket.add_row(
        'simulate',
        bounds.judge('simulate.fidelity', dict(dq=dq, dp=dp), 1 - 1e-8,
                     fidelity, constants.Relation.AT_LEAST, tolerance=0.0))
  if FLAGS.dump_state:
    sim.dump_state(state, FLAGS.dump_state)
    outcome.summary['dump_state'] = FLAGS.dump_state
  return outcome


COMMANDS = {
    'comb': cmd_comb,
    'gaussify': cmd_gaussify,
    'gkp': cmd_gkp,
    'verify': cmd_verify,
    'sweep': cmd_sweep,
    'compile': cmd_compile,
    'simulate': cmd_simulate,
}


def write_table(path, table):
  """Writes sweep rows with a stable column order."""
  columns = []
  for row in table:
    for key in row:
      if key not in columns:
        columns.append(key)
  with open(path, 'w', newline='') as f:
    writer = csv.DictWriter(f, fieldnames=columns, restval='')
    writer.writeheader()
    for row in table:
      writer.writerow({
          k: repr(v) if isinstance(v, float) else v for k, v in row.items()
      })


def run_command(command, args):
  """Runs a command and writes its outputs.

  Returns:
    The process exit code.
  """
  start = time.perf_counter()
  try:
    outcome = COMMANDS[command](args)
  except (errors.ParameterError, errors.UsageError) as e:
    report.print_error(str(e))
    return constants.ExitCode.USAGE
  except _NUMERIC_ERRORS as e:
    report.print_error('%s: %s' % (type(e).__name__, e),
                       'Refine the grid or resolution, or use the other '
                       'backend.')
    return constants.ExitCode.NUMERIC
  document = dict(
      schema_version=constants.REPORT_SCHEMA_VERSION,
      command=command,
      config={name: FLAGS[name].value for name in _CONFIG_FLAGS},
      defaults=defaults(),
      report=outcome.summary,
      bounds=[
          dict(row.as_dict(), section=section)
          for section, row in outcome.bucket.rows()
      ],
      timing=dict(total=time.perf_counter() - start))
  if FLAGS.out:
    with open(FLAGS.out, 'w') as f:
      f.write(dump_document(document))
  if FLAGS.csv:
    if outcome.table is not None:
      write_table(FLAGS.csv, outcome.table)
    else:
      outcome.bucket.write_csv(FLAGS.csv)
  if not FLAGS.quiet:
    outcome.bucket.print_buckets()
  if outcome.bucket.violated:
    return constants.ExitCode.VIOLATED
  return constants.ExitCode.OK


def main(argv):
  if len(argv) < 2 or argv[1] not in COMMANDS:
    report.print_error('expected a command: ' + ', '.join(sorted(COMMANDS)),
                       'Run with --helpfull for the flag list.')
    return constants.ExitCode.USAGE
  return run_command(argv[1], argv[2:])
