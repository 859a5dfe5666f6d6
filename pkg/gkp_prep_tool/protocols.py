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
"""Preparation protocols and the verdicts of their guarantees.

The comb preparation squeezes the vacuum and doubles its peak count n times
with a qubit-controlled circuit. The envelope Gaussification couples an
ancilla of width 1/kappa to its input, measures the ancilla position and
accepts outcomes in a window around the origin. The GKP preparation chains
the two. Heralded outputs are never stored as density matrices: every
reported functional is a weighted sum over accepted outcomes.

Typical usage example:

  ensemble, report = protocols.run_gkp(0.2, 0.01)
  if report.violated:
    ...
"""

import dataclasses
import functools
import math
import operator
import time
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from absl import logging
import numpy as np
from scipy import integrate

from gkp_prep_tool import bounds as bounds_lib
from gkp_prep_tool import circuit
from gkp_prep_tool import constants
from gkp_prep_tool import errors
from gkp_prep_tool import gaussian_backend
from gkp_prep_tool import preconditions
from gkp_prep_tool import sim
from gkp_prep_tool import states

# Wavefunctions are integrated over this many widths around their peaks.
_SUPPORT_WIDTHS = 12.0

Relation = constants.Relation


@dataclasses.dataclass
class EnsembleEntry:
  """One accepted outcome.

  Attributes:
    weight: quadrature weight times outcome density.
    outcome: the measured ancilla position.
    state: corrected conditional state, a list of normalized analytic
      branches or a HybridGridState.
  """
  weight: float
  outcome: float
  state: Any


@dataclasses.dataclass
class HeraldedEnsemble:
  """Accepted outcomes of a heralded protocol and their conditional states."""
  entries: List[EnsembleEntry]
  region: Tuple[float, float]

  @property
  def p_acc(self) -> float:
    return float(math.fsum(e.weight for e in self.entries))

  def average(self, functional: Callable[[Any], complex]) -> complex:
    """Outcome-weighted mean of functional(state), i.e. tr(O rho_acc)."""
    p = self.p_acc
    if not p > 0:
      raise errors.PreconditionError('the protocol never accepts')
    return sum(e.weight * functional(e.state) for e in self.entries) / p

  def __len__(self):
    return len(self.entries)


@dataclasses.dataclass
class ProtocolReport:
  """Measured quantities of one protocol run and the bound verdicts.

  Attributes:
    protocol: protocol name.
    params: kappa, delta, rounds and length as applicable.
    op_counts: circuit.OpCountReport.
    p_acc: acceptance probability, 1 for unitary protocols.
    fidelity: <target| rho_acc |target>.
    delta_p: effective squeezing of exp(-iP), None when not evaluated.
    delta_q: effective squeezing of exp(2 pi i Q), None when not evaluated.
    backend: the backend that produced the numbers.
    runtime: wall-clock seconds.
    rows: BoundReport rows.
    extras: further measured values.
  """
  protocol: str
  params: Dict[str, Any]
  op_counts: circuit.OpCountReport
  p_acc: float
  fidelity: float
  delta_p: Optional[float]
  delta_q: Optional[float]
  backend: constants.Backend
  runtime: float = 0.0
  rows: List[bounds_lib.BoundReport] = dataclasses.field(default_factory=list)
  extras: Dict[str, Any] = dataclasses.field(default_factory=dict)

  @property
  def trace_distance_lower(self) -> float:
    return bounds_lib.distance_bracket(self.fidelity)[0]

  @property
  def trace_distance_upper(self) -> float:
    return bounds_lib.distance_bracket(self.fidelity)[1]

  @property
  def violated(self) -> bool:
    return any(row.violated for row in self.rows)

  def as_dict(self):
    return dict(
        protocol=self.protocol,
        params=dict(self.params),
        op_counts=self.op_counts.as_dict(),
        p_acc=self.p_acc,
        fidelity=self.fidelity,
        trace_distance_lower=self.trace_distance_lower,
        trace_distance_upper=self.trace_distance_upper,
        delta_p=self.delta_p,
        delta_q=self.delta_q,
        backend=self.backend.value,
        runtime=self.runtime,
        bounds=[row.as_dict() for row in self.rows],
        extras=dict(self.extras))


def _resolve_backend(backend):
  backend = constants.Backend(backend)
  if backend == constants.Backend.AUTO:
    return constants.Backend.GAUSS
  return backend


def round_half_to_zero(x: float) -> int:
  """Nearest integer to x, ties rounded toward zero."""
  return int(math.copysign(math.ceil(abs(x) - 0.5), x))


def outcome_resolution(kappa: float) -> float:
  return min(constants.OUTCOME_DX, constants.OUTCOME_KAPPA_RATIO * kappa)


def acceptance_region(length: int) -> Tuple[float, float]:
  """Omega_L = [-L/8 - 1/2, L/8 + 1/2]."""
  half = length / 8 + 0.5
  return -half, half


def unit_cells(lo: float, hi: float):
  """Splits [lo, hi] at half-integers.

  Yields:
    (a, b, k) with [a, b] inside [k - 1/2, k + 1/2].
  """
  k = int(math.floor(lo + 0.5))
  while k - 0.5 < hi:
    a, b = max(lo, k - 0.5), min(hi, k + 0.5)
    if a < b:
      yield a, b, k
    k += 1


def _trapezoid(a, b, resolution):
  count = max(2, int(math.ceil((b - a) / resolution - 1e-9)) + 1)
  points = np.linspace(a, b, count)
  weights = np.full(count, (b - a) / (count - 1))
  weights[[0, -1]] /= 2
  return points, weights


def _integrate(fn, a, b):
  value, _ = integrate.quad(
      fn, a, b, epsabs=1e-13, epsrel=1e-11, limit=constants.QUAD_LIMIT)
  return value


def _support_radius(wavefunction: states.GaussianSum) -> float:
  reach = np.abs(wavefunction.center) + _SUPPORT_WIDTHS / np.sqrt(
      wavefunction.inverse_variance)
  reach = np.minimum(reach,
                     np.maximum(np.abs(wavefunction.lower),
                                np.abs(wavefunction.upper)))
  return float(np.max(reach))


# Analytic functionals.


def _branches_of(state) -> List[states.GaussianSum]:
  """Normalizes the analytic input forms to a list of position branches."""
  if isinstance(state, states.StateSpec):
    state = states.build_state(state)
  if isinstance(state, gaussian_backend.GaussianHybridState):
    if state.n_modes != 1:
      raise errors.UsageError('expected a single-mode state')
    branches = list(state.branches)
  elif isinstance(state, states.GaussianSum):
    branches = [state]
  else:
    branches = list(state)
  result = []
  for branch in branches:
    if branch.modes != 1:
      raise errors.UsageError('expected single-mode branches')
    if branch.domain != constants.Domain.POSITION:
      branch = branch.fourier()
    result.append(branch)
  return result


def _normalized_mixture(branches):
  total = sum(b.norm_sq() for b in branches)
  if not total > 0:
    raise errors.NumericError('zero state')
  return [b.scaled(1 / math.sqrt(total)) for b in branches]


def stabilizer_values(branches: Sequence[states.GaussianSum]):
  """tr(exp(-iP) rho) and tr(exp(2 pi i Q) rho) for rho = sum_b |b><b|.

  The branches need not be normalized; the mixture is.
  """
  branches = _branches_of(branches)
  norm = sum(b.norm_sq() for b in branches)
  if not norm > 0:
    raise errors.NumericError('zero state has no stabilizer values')
  tr_sp = sum(states.overlap(b, b.translated(1.0)) for b in branches)
  tr_sq = sum(states.overlap(b, b.kicked(2 * math.pi)) for b in branches)
  return complex(tr_sp) / norm, complex(tr_sq) / norm


def qubit_weight(branches: Sequence[states.GaussianSum], vector) -> float:
  """Squared norm of the component along a single-qubit state."""
  vector = np.asarray(vector, dtype=complex)
  projected = functools.reduce(
      operator.add, [b.scaled(np.conj(c)) for c, b in zip(vector, branches)])
  return projected.norm_sq()


def _product_overlap(target, qubit, branches) -> complex:
  """<target (x) qubit | state> for a state given by its qubit branches."""
  qubit = np.asarray(qubit, dtype=complex)
  return complex(
      sum(np.conj(c) * states.overlap(target, b)
          for c, b in zip(qubit, branches)))


def _fidelity(state, target) -> float:
  if isinstance(state, sim.HybridGridState):
    return sim.reduce_fidelity(state, target)
  return float(sum(abs(states.overlap(target, b))**2 for b in state))


def _stabilizers(state):
  if isinstance(state, sim.HybridGridState):
    obs = constants.Observable
    return (sim.expectation(state, obs.STABILIZER_P),
            sim.expectation(state, obs.STABILIZER_Q))
  return stabilizer_values(state)


def _squeezing(tr_sp, tr_sq):
  delta_p, delta_q = bounds_lib.effective_squeezing(tr_sp, tr_sq)
  return float(delta_p), float(delta_q)


# Comb preparation.


def build_v(mode: int = 0, qubit: int = 0, n_modes: int = 1,
            n_qubits: int = 1) -> circuit.Circuit:
  """The peak-doubling circuit V.

  S(-log 2) on the mode, exp(-iP) controlled by the qubit, a Hadamard on the
  qubit and exp(i pi Q) controlled by the qubit, in this order.
  """
  return circuit.Circuit(
      n_modes,
      n_qubits, [
          circuit.squeeze(mode, -math.log(2)),
          circuit.ctrl_shift(qubit, mode, -1.0),
          circuit.hadamard(qubit),
          circuit.ctrl_pos_phase(qubit, mode, math.pi),
      ],
      labels={'compiled': 'peak_doubling'})


def comb_circuit(delta: float, rounds: int, mode: int = 0,
                 n_modes: int = 1) -> circuit.Circuit:
  """Circuit preparing Sha_{2^rounds, delta} from the vacuum and |0>.

  Squeezes the vacuum to width 2^-rounds delta, prepares |+>, applies
  exp(iP) V and then V another rounds - 1 times.
  """
  if rounds < 1:
    raise errors.ParameterError('the comb needs at least one round')
  prep, _ = circuit.compile_squeeze_split(rounds, delta, mode, n_modes, 1)
  result = circuit.Circuit(n_modes, 1, prep.gates, labels={'protocol': 'comb'})
  result.append(circuit.hadamard(0))
  doubling = build_v(mode, 0, n_modes, 1)
  result.extend(doubling)
  result.append(circuit.shift(mode, 1.0))
  for _ in range(rounds - 1):
    result.extend(doubling)
  return result


def comb_op_bound(delta: float, rounds: int) -> int:
  """5 n + ceil(log 1/Delta) + 4."""
  return 5 * rounds + int(math.ceil(math.log(1 / delta))) + 4


def comb_axis(delta: float, rounds: int) -> sim.GridAxis:
  """Grid resolving the narrowest squeezed vacuum of the comb circuit."""
  return sim.GridAxis.covering(
      2**rounds / 2 + constants.GRID_MARGIN_WIDTHS,
      2.0**-rounds * delta / constants.GRID_SAMPLES_PER_WIDTH)


def run_comb(delta: float,
             rounds: int,
             backend: constants.Backend = constants.Backend.AUTO,
             axis: Optional[sim.GridAxis] = None,
             tol: float = constants.DEFAULT_TOL):
  """Runs the comb preparation and compares it with Sha_{2^rounds, delta}.

  Args:
    delta: peak width of the output comb.
    rounds: number of peak doublings n; the comb has 2^n peaks.
    backend: GRID, GAUSS or AUTO (analytic).
    axis: grid override for the grid backend.
    tol: truncation tolerance of the target state.

  Returns:
    (output state, ProtocolReport). The state still carries the qubit.

  Raises:
    ParameterError: for delta <= 0 or rounds < 1.
    ResolutionError: if the grid does not resolve the squeezed vacuum.
  """
  if not delta > 0:
    raise errors.ParameterError('delta must be positive, got %r' % delta)
  if rounds < 1:
    raise errors.ParameterError('need at least one round, got %r' % rounds)
  start = time.perf_counter()
  backend = _resolve_backend(backend)
  prep = comb_circuit(delta, rounds)
  length = 2**rounds
  target = states.build_state(states.StateSpec.comb(length, delta), tol)
  vacuum = states.StateSpec.vacuum()
  extras = {}
  if backend == constants.Backend.GRID:
    axis = axis or comb_axis(delta, rounds)
    extras['grid'] = axis.describe()
    logging.info('comb: %d rounds on a grid of %d points', rounds,
                 axis.n_points)
    state = sim.run(prep, sim.prepare(vacuum, [axis], sim.QUBIT_ZERO))
    fidelity = sim.reduce_fidelity(state, target)
    plus = state.qubit_weight(sim.QUBIT_PLUS)
  else:
    state = gaussian_backend.run(
        prep,
        gaussian_backend.GaussianHybridState.from_state(
            vacuum, sim.QUBIT_ZERO))
    extras['terms'] = state.term_count
    fidelity = gaussian_backend.reduce_fidelity(state, target)
    plus = qubit_weight(state.branches, sim.QUBIT_PLUS)
  delta_p, delta_q = _squeezing(*_stabilizers(
      state if backend == constants.Backend.GRID else state.branches))
  extras['plus_weight'] = plus
  counts = circuit.op_count(prep)
  params = dict(delta=delta, rounds=rounds, length=length)
  rows = [
      bounds_lib.judge(
          'comb.fidelity',
          params,
          bounds_lib.fidelity_form(bounds_lib.comb_error_bound(delta)),
          fidelity,
          Relation.AT_LEAST,
          preconditions.COMB,
          trivial=0.0),
      bounds_lib.judge(
          'comb.op_count',
          params,
          comb_op_bound(delta, rounds),
          counts.total,
          Relation.AT_MOST,
          tolerance=0.0),
  ]
  report = ProtocolReport('comb', params, counts, 1.0, fidelity, delta_p,
                          delta_q, backend, time.perf_counter() - start, rows,
                          extras)
  logging.info('comb: delta=%g rounds=%d fidelity=%.10f', delta, rounds,
               fidelity)
  return state, report


def doubling_check(delta: float,
                   epsilon: float) -> List[bounds_lib.BoundReport]:
  """One V on a truncated squeezed vacuum next to |+>.

  The output is compared with exp(-iP) Sha^{2 eps}_{2, 2 Delta} (x) |+>: the
  squared overlap must be at least 1 - 20 eps^2 and the trace distance at
  most 9 eps.

  Raises:
    ParameterError: unless 0 < epsilon < 1/4.
  """
  if not 0 < epsilon < 0.25:
    raise errors.ParameterError('epsilon must lie in (0, 1/4), got %r' %
                                epsilon)
  state = gaussian_backend.GaussianHybridState.from_state(
      states.StateSpec.truncated_gaussian(delta, epsilon), sim.QUBIT_PLUS)
  output = gaussian_backend.run(build_v(), state)
  target = states.build_state(
      states.StateSpec.truncated_comb(2, 2 * delta, 2 * epsilon)).translated(
          1.0)
  overlap_sq = abs(_product_overlap(target, sim.QUBIT_PLUS,
                                    output.branches))**2
  params = dict(delta=delta, epsilon=epsilon)
  return [
      bounds_lib.judge('doubling.overlap', params,
                       bounds_lib.doubling_overlap_bound(epsilon), overlap_sq,
                       Relation.AT_LEAST, trivial=0.0),
      bounds_lib.judge('doubling.distance', params,
                       bounds_lib.doubling_distance_bound(epsilon),
                       states.pure_trace_distance(overlap_sq),
                       Relation.AT_MOST, trivial=2.0),
  ]


def iterated_doubling_check(delta: float, epsilon: float,
                            rounds: int) -> List[bounds_lib.BoundReport]:
  """Trace distance of V^(k-1) exp(iP) V (Psi^eps_Delta (x) |+>) to a comb.

  For k = 1..rounds the distance to Sha^{2^k eps}_{2^k, 2^k Delta} (x) |+>
  must be at most 9 eps (2^k - 1).

  Raises:
    ParameterError: unless 0 < epsilon < 2^-(rounds + 1).
  """
  if not 0 < epsilon < 2.0**-(rounds + 1):
    raise errors.ParameterError('epsilon must lie in (0, 2^-%d), got %r' %
                                (rounds + 1, epsilon))
  state = gaussian_backend.GaussianHybridState.from_state(
      states.StateSpec.truncated_gaussian(delta, epsilon), sim.QUBIT_PLUS)
  doubling = build_v()
  state = gaussian_backend.run(doubling, state)
  state = gaussian_backend.apply(circuit.shift(0, 1.0), state)
  rows = []
  for k in range(1, rounds + 1):
    if k > 1:
      state = gaussian_backend.run(doubling, state)
    scale = 2**k
    target = states.build_state(
        states.StateSpec.truncated_comb(scale, scale * delta, scale * epsilon))
    overlap_sq = abs(_product_overlap(target, sim.QUBIT_PLUS,
                                      state.branches))**2
    rows.append(
        bounds_lib.judge('doubling.iterated_distance',
                         dict(delta=delta, epsilon=epsilon, rounds=k),
                         bounds_lib.doubling_distance_bound(epsilon, k),
                         states.pure_trace_distance(overlap_sq),
                         Relation.AT_MOST, trivial=2.0))
  return rows


# Measurement instrument.


@dataclasses.dataclass
class InstrumentProfile:
  """Outcome statistics of measuring mode 0 of exp(-i P_0 Q_1) (psi1 (x) psi2).

  Attributes:
    outcomes: sampled outcomes x.
    p: outcome density p(x) at the samples.
    m: m(x) at the samples.
    region: the interval A.
    p_region: p(A).
    p_zero: p(0).
    m_region: integral of |m(x)|^2 over A.
    total: integral of p over the real line.
  """
  outcomes: np.ndarray
  p: np.ndarray
  m: np.ndarray
  region: Tuple[float, float]
  p_region: float
  p_zero: float
  m_region: float
  total: float

  @property
  def conditional_overlap(self) -> float:
    """<Phi| rho_A |Phi> with Phi = psi1 psi2 / ||psi1 psi2||."""
    if not self.p_region > 0:
      raise errors.PreconditionError('the region has zero probability')
    return self.m_region / (self.p_zero * self.p_region)


def _check_even(psi):
  gap = (psi + psi.reflected().scaled(-1.0)).norm_sq()
  if math.sqrt(max(gap, 0.0)) > constants.EVEN_TOL:
    raise errors.PreconditionError(
        'the ancilla wavefunction is not even (||psi - psi(-x)|| = %.3g)' %
        math.sqrt(gap))


def instrument_profile(psi1: states.GaussianSum,
                       psi2: states.GaussianSum,
                       region: Tuple[float, float],
                       resolution: float = constants.OUTCOME_DX,
                       outcomes: Optional[Sequence[float]] = None
                      ) -> InstrumentProfile:
  """Evaluates the measurement instrument in closed form per outcome.

  p(x) = int |psi1(x - y)|^2 |psi2(y)|^2 dy and
  m(x) = int conj(psi1(y - d)) psi1(y) conj(psi2(k + y)) psi2(y) dy with
  k = round(x), d = x - k. Integrals over outcomes use adaptive quadrature
  on unit cells, inside which the rounding is constant.

  Args:
    psi1: even ancilla wavefunction.
    psi2: input wavefunction.
    region: the interval A of accepted outcomes.
    resolution: sample spacing of the returned p and m arrays.
    outcomes: explicit sample points, overriding resolution.

  Returns:
    InstrumentProfile.

  Raises:
    PreconditionError: if psi1 is not even.
  """
  (psi1,) = _branches_of(psi1)
  (psi2,) = _branches_of(psi2)
  _check_even(psi1)
  reflected = psi1.reflected()
  base = psi1.multiplied(psi2)

  def p_at(x):
    return reflected.translated(x).multiplied(psi2).norm_sq()

  def m_at(x, k):
    moved = psi1.translated(x - k).multiplied(psi2.translated(-k))
    return states.overlap(moved, base)

  lo, hi = region
  if not lo < hi:
    raise errors.ParameterError('empty region %r' % (region,))
  if outcomes is None:
    outcomes, _ = _trapezoid(lo, hi, resolution)
  outcomes = np.asarray(outcomes, dtype=float)
  p = np.array([p_at(x) for x in outcomes])
  m = np.array([m_at(x, round_half_to_zero(x)) for x in outcomes])
  p_region = m_region = 0.0
  for a, b, k in unit_cells(lo, hi):
    p_region += _integrate(p_at, a, b)
    m_region += _integrate(lambda x, k=k: abs(m_at(x, k))**2, a, b)
  reach = _support_radius(psi1) + _support_radius(psi2)
  total = math.fsum(
      _integrate(p_at, a, b) for a, b, _ in unit_cells(-reach, reach))
  profile = InstrumentProfile(outcomes, p, m, (lo, hi), p_region, p_at(0.0),
                              m_region, total)
  logging.debug('instrument: p(A)=%.10f overlap=%.10f total=%.10f', p_region,
                profile.conditional_overlap if p_region > 0 else 0.0, total)
  return profile


# Envelope Gaussification.


def gaussification_circuit(kappa: float,
                           n_qubits: int = 0,
                           prefix: Sequence[circuit.Gate] = ()
                          ) -> circuit.Circuit:
  """Ancilla squeezing, exp(-i P_0 Q_1) and the ancilla homodyne.

  Mode 0 is the ancilla prepared as eta_kappa = S(log kappa)|vac>, mode 1
  carries the input, possibly prepared by the prefix gates.
  """
  squeezing, _ = circuit.compile_squeeze(math.log(kappa), 0, 2)
  result = circuit.Circuit(
      2, n_qubits, prefix, labels={'protocol': 'gaussification'})
  result.extend(squeezing)
  result.append(circuit.shear(0, 1, 1.0))
  result.append(circuit.homodyne(0))
  return result


def _validate_gaussification(kappa, length, delta):
  if not kappa > 0:
    raise errors.ParameterError('kappa must be positive, got %r' % kappa)
  if not delta > 0:
    raise errors.ParameterError('delta must be positive, got %r' % delta)
  if length <= 0 or length % 8:
    raise errors.ParameterError('L must be a positive multiple of 8, got %r' %
                                length)


def _ancilla_branch(kappa):
  squeezing, _ = circuit.compile_squeeze(math.log(kappa))
  ancilla = gaussian_backend.run(
      squeezing,
      gaussian_backend.GaussianHybridState.from_state(
          states.StateSpec.vacuum()))
  return gaussian_backend.to_gaussian_sum(ancilla)


def gaussification_input_axis(length: int, delta: float) -> sim.GridAxis:
  return sim.GridAxis.covering(length / 2 + 4,
                               delta / constants.GRID_SAMPLES_PER_WIDTH)


def sample_branches(branches, axis: sim.GridAxis) -> sim.HybridGridState:
  """Samples qubit branches onto a grid, keeping their relative weights."""
  total = sum(b.norm_sq() for b in branches)
  parts = [
      sim.prepare(b, [axis]).branches[0] * math.sqrt(b.norm_sq() / total)
      for b in branches
  ]
  if len(parts) not in (1, 2):
    raise errors.CapabilityError('grid inputs hold at most one qubit')
  return sim.HybridGridState([axis], np.stack(parts))


def _analytic_sweep(branches, kappa, region, resolution, completeness):
  ancilla = _ancilla_branch(kappa)
  joint = gaussian_backend.tensor(
      ancilla, gaussian_backend.GaussianHybridState(branches))
  joint = gaussian_backend.apply(circuit.shear(0, 1, 1.0), joint)
  entries = []
  for a, b, k in unit_cells(*region):
    points, weights = _trapezoid(a, b, resolution)
    for x, w in zip(points, weights):
      sliced = [
          s.translated(-k) for s in gaussian_backend.slice_outcome(joint, x)
      ]
      density = sum(s.norm_sq() for s in sliced)
      if not density > 0:
        continue
      scale = 1 / math.sqrt(density)
      entries.append(
          EnsembleEntry(w * density, float(x),
                        [s.scaled(scale) for s in sliced]))
  total = None
  if completeness:
    reach = _SUPPORT_WIDTHS / kappa + max(_support_radius(b) for b in branches)
    total = math.fsum(
        _integrate(functools.partial(gaussian_backend.outcome_density, joint),
                   a, b) for a, b, _ in unit_cells(-reach, reach))
  return entries, total


def measurement_sweep(state: sim.HybridGridState, kappa: float, length: int,
                      resolution: float) -> sim.HomodyneSweep:
  """Homodyne sweep of the ancilla after exp(-i P_0 Q_1) on the grid.

  The ancilla grid spacing is the largest power of two not above the
  outcome resolution, so that every cell boundary k +- 1/2 is a grid point.
  """
  if state.n_modes != 1:
    raise errors.UsageError('the Gaussification input is a single mode')
  axis = sim.GridAxis.covering(
      length / 2 + 1 + constants.GRID_MARGIN_WIDTHS / kappa, resolution)
  squeezing, _ = circuit.compile_squeeze(math.log(kappa))
  ancilla = sim.run(squeezing,
                    sim.prepare(states.StateSpec.vacuum(), [axis]))
  joint = sim.apply(circuit.shear(0, 1, 1.0), sim.tensor(ancilla, state))
  return sim.homodyne_sweep(joint, 0)


def _grid_entries(sweep, region):
  axis = sweep.outcome_axis
  points = axis.points
  entries = []
  for a, b, k in unit_cells(*region):
    inside = np.flatnonzero((points >= a - axis.dx / 4) &
                            (points <= b + axis.dx / 4))
    if not inside.size:
      continue
    weights = np.full(inside.size, axis.dx)
    weights[[0, -1]] /= 2
    correction = circuit.displacement(0, -k, 0.0)
    for i, w in zip(inside, weights):
      density = float(sweep.pdf[i])
      if not density > 0:
        continue
      conditional = sweep.conditional(i)
      if k:
        conditional = sim.apply(correction, conditional)
      entries.append(EnsembleEntry(w * density, float(points[i]), conditional))
  return entries


def _ensemble_squeezing(ensemble):
  tr_sp = tr_sq = 0j
  for entry in ensemble.entries:
    sp, sq = _stabilizers(entry.state)
    tr_sp += entry.weight * sp
    tr_sq += entry.weight * sq
  return _squeezing(tr_sp / ensemble.p_acc, tr_sq / ensemble.p_acc)


def _gaussification_rows(kappa, delta, length, xi, p_acc, fidelity,
                         exact_input, extras):
  params = dict(kappa=kappa, delta=delta, length=length, xi=xi)
  conditions = preconditions.GAUSSIFICATION
  statement = bounds_lib.gauss_bounds(kappa, delta, length, xi,
                                      constants.ConstantSet.STATEMENT)
  derived = bounds_lib.gauss_bounds(kappa, delta, length, xi,
                                    constants.ConstantSet.DERIVED)
  if statement.error_upper != derived.error_upper:
    logging.warning(
        'Gaussification error constants disagree at kappa=%g, L=%d: '
        'statement %.6g, derived %.6g', kappa, length, statement.error_upper,
        derived.error_upper)
  rows = [
      bounds_lib.judge('gaussify.acceptance', params, statement.p_lower,
                       p_acc, Relation.AT_LEAST, conditions, trivial=0.0),
      bounds_lib.judge('gaussify.error_statement', params,
                       bounds_lib.fidelity_form(statement.error_upper),
                       fidelity, Relation.AT_LEAST, conditions, trivial=0.0),
      bounds_lib.judge('gaussify.error_derived', params,
                       bounds_lib.fidelity_form(derived.error_upper),
                       fidelity, Relation.AT_LEAST, conditions, trivial=0.0),
  ]
  if exact_input:
    exact = dict(kappa=kappa, delta=delta, length=length)
    rows.append(
        bounds_lib.judge('gaussify.exact_acceptance', exact,
                         bounds_lib.exact_input_acceptance(kappa, length),
                         p_acc, Relation.AT_LEAST, conditions, trivial=0.0))
    rows.append(
        bounds_lib.judge(
            'gaussify.closeness', exact,
            bounds_lib.fidelity_form(
                bounds_lib.closeness_bound(kappa, delta, length)), fidelity,
            Relation.AT_LEAST, conditions, trivial=0.0))
    if 'instrument_overlap' in extras:
      rows.append(
          bounds_lib.judge('gaussify.conditional_overlap', exact,
                           bounds_lib.conditional_overlap_bound(kappa, length),
                           extras['instrument_overlap'], Relation.AT_LEAST,
                           conditions, trivial=0.0))
  return rows


def run_gaussification(input_state,
                       kappa: float,
                       length: int,
                       delta: float,
                       backend: constants.Backend = constants.Backend.AUTO,
                       resolution: Optional[float] = None,
                       target: Optional[states.GaussianSum] = None,
                       xi: Optional[float] = None,
                       exact_input: bool = False,
                       completeness: bool = True,
                       with_stabilizers: bool = True,
                       tol: float = constants.DEFAULT_TOL):
  """Runs the heralded envelope Gaussification on an input state.

  The ancilla eta_kappa is coupled by exp(-i P_0 Q_1) and measured; outcomes
  x in Omega_L are accepted and corrected by exp(i round(x) P). Outcomes are
  integrated cell by cell with the trapezoid rule at the given resolution.

  Args:
    input_state: StateSpec, GaussianSum, list of branch GaussianSums (a
      qubit-traced mixture), single-mode GaussianHybridState or
      HybridGridState. Grid inputs select the grid backend.
    kappa: envelope parameter.
    length: comb length L, a multiple of 8.
    delta: peak width of the comb and of the GKP target.
    backend: backend for analytic inputs.
    resolution: outcome spacing, default min(0.02, kappa / 5).
    target: state the output is compared with, default GKP_{kappa,Delta}.
    xi: trace distance of the input to Sha_{L,Delta}; measured as
      2 sqrt(1 - F) when omitted.
    exact_input: also judge the guarantees that assume an exact truncated
      comb input.
    completeness: integrate the outcome density over the whole line.
    with_stabilizers: evaluate the effective squeezing of the output.
    tol: truncation tolerance of the analytic states.

  Returns:
    (HeraldedEnsemble, ProtocolReport).

  Raises:
    ParameterError: for kappa or delta <= 0 or L not in 8N.
    ResolutionError: if a grid does not resolve the states.
  """
  _validate_gaussification(kappa, length, delta)
  start = time.perf_counter()
  resolution = resolution or outcome_resolution(kappa)
  region = acceptance_region(length)
  default_target = target is None
  if default_target:
    target = states.build_state(
        states.StateSpec.gkp_peakwise(kappa, delta), tol)
  comb = states.build_state(states.StateSpec.comb(length, delta), tol)
  grid_input = isinstance(input_state, sim.HybridGridState)
  backend = constants.Backend.GRID if grid_input else _resolve_backend(
      backend)
  extras = dict(resolution=resolution)
  if backend == constants.Backend.GRID:
    if not grid_input:
      input_state = sample_branches(
          _normalized_mixture(_branches_of(input_state)),
          gaussification_input_axis(length, delta))
    n_qubits = input_state.n_qubits
    if xi is None:
      xi = bounds_lib.distance_bracket(
          sim.reduce_fidelity(input_state, comb))[1]
    sweep = measurement_sweep(input_state, kappa, length, resolution)
    entries = _grid_entries(sweep, region)
    extras['p_total'] = float(np.sum(sweep.pdf) * sweep.outcome_axis.dx)
    extras['grid'] = [
        sweep.outcome_axis.describe(),
        sweep.state_axis.describe()
    ]
  else:
    branches = _normalized_mixture(_branches_of(input_state))
    n_qubits = len(branches).bit_length() - 1
    if xi is None:
      xi = bounds_lib.distance_bracket(_fidelity(branches, comb))[1]
    entries, total = _analytic_sweep(branches, kappa, region, resolution,
                                     completeness)
    if total is not None:
      extras['p_total'] = total
    if len(branches) == 1:
      profile = instrument_profile(_ancilla_branch(kappa), branches[0],
                                   region, resolution)
      extras['instrument_overlap'] = profile.conditional_overlap
      extras['instrument_p_acc'] = profile.p_region
  ensemble = HeraldedEnsemble(entries, region)
  p_acc = ensemble.p_acc
  extras['outcomes'] = len(ensemble)
  extras['xi'] = xi
  if p_acc > 0:
    fidelity = float(np.real(ensemble.average(lambda s: _fidelity(s, target))))
  else:
    logging.warning('Gaussification never accepted at kappa=%g, L=%d', kappa,
                    length)
    fidelity = 0.0
  delta_p = delta_q = None
  if with_stabilizers and p_acc > 0:
    delta_p, delta_q = _ensemble_squeezing(ensemble)
  budget = circuit.correction_counts(length)
  extras['correction_compiled'] = budget.compiled
  counts = circuit.op_count(
      gaussification_circuit(kappa, n_qubits), constants.CountMode.HERALDED,
      budget.raw)
  params = dict(kappa=kappa, delta=delta, length=length)
  rows = []
  if default_target:
    rows = _gaussification_rows(kappa, delta, length, xi, p_acc, fidelity,
                                exact_input, extras)
  report = ProtocolReport('gaussify', params, counts, p_acc, fidelity, delta_p,
                          delta_q, backend, time.perf_counter() - start, rows,
                          extras)
  logging.info('gaussify: kappa=%g L=%d p_acc=%.8f fidelity=%.8f', kappa,
               length, p_acc, fidelity)
  return ensemble, report


# GKP preparation.


def gkp_rounds(kappa: float) -> int:
  """n = floor((4/3) log2(1/kappa))."""
  if not 0 < kappa < 1:
    raise errors.ParameterError('kappa must lie in (0, 1), got %r' % kappa)
  return int(math.floor(4 / 3 * math.log2(1 / kappa)))


def gkp_circuit(kappa: float, delta: float) -> circuit.Circuit:
  """Comb preparation on mode 1 followed by the Gaussification circuit."""
  prep = comb_circuit(delta, gkp_rounds(kappa), mode=1, n_modes=2)
  return gaussification_circuit(kappa, 1, prefix=prep.gates)


def gkp_op_bound(kappa: float, delta: float) -> float:
  return (constants.OPCOUNT_C1 * math.log(1 / kappa) +
          constants.OPCOUNT_C2 * math.log(1 / delta))


def _gkp_rows(kappa, delta, length, report):
  params = dict(kappa=kappa, delta=delta, length=length)
  headline = bounds_lib.gkp_bounds(kappa, delta)
  derived = bounds_lib.gkp_derived_bounds(kappa, delta, length)
  total = report.op_counts.total
  rows = [
      bounds_lib.judge('gkp.acceptance', params, headline.p_lower,
                       report.p_acc, Relation.AT_LEAST,
                       preconditions.GKP_HEADLINE, trivial=0.0),
      bounds_lib.judge('gkp.error', params,
                       bounds_lib.fidelity_form(headline.error_upper),
                       report.fidelity, Relation.AT_LEAST, trivial=0.0),
      bounds_lib.judge('gkp.derived_acceptance', params, derived.p_lower,
                       report.p_acc, Relation.AT_LEAST,
                       preconditions.GKP_DERIVED, trivial=0.0),
      bounds_lib.judge('gkp.derived_error', params,
                       bounds_lib.fidelity_form(derived.error_upper),
                       report.fidelity, Relation.AT_LEAST,
                       preconditions.GKP_DERIVED, trivial=0.0),
      bounds_lib.judge('gkp.op_count', params, gkp_op_bound(kappa, delta),
                       total, Relation.AT_MOST, preconditions.GKP_DERIVED,
                       tolerance=0.0),
  ]
  epsilon = report.trace_distance_upper
  lower = bounds_lib.lower_bounds(kappa, delta, report.p_acc, epsilon)
  rows.append(
      bounds_lib.judge('gkp.complexity_lower',
                       dict(params, p=report.p_acc, epsilon=epsilon),
                       lower.heralded, total, Relation.AT_LEAST,
                       preconditions.HERALDED_LOWER, tolerance=0.0))
  if report.delta_p is not None:
    rows.extend(
        bounds_lib.squeezing_bound_check(kappa, delta, report.delta_p,
                                         report.delta_q))
  return rows


def run_gkp(kappa: float,
            delta: float,
            backend: constants.Backend = constants.Backend.AUTO,
            resolution: Optional[float] = None,
            completeness: bool = False,
            with_stabilizers: bool = True,
            tol: float = constants.DEFAULT_TOL):
  """Prepares an approximate GKP state: comb with L = 2^n, then Gaussification.

  Args:
    kappa: envelope parameter; n = floor((4/3) log2(1/kappa)).
    delta: peak width.
    backend: GRID, GAUSS or AUTO. Grid runs move the comb onto the coarser
      Gaussification input grid before the second stage.
    resolution: outcome spacing of the Gaussification.
    completeness: integrate the outcome density over the whole line.
    with_stabilizers: evaluate the effective squeezing.
    tol: truncation tolerance of analytic states.

  Returns:
    (HeraldedEnsemble, ProtocolReport).

  Raises:
    ParameterError: if L = 2^n is not a multiple of 8, i.e. kappa > 2^-9/4.
  """
  start = time.perf_counter()
  rounds = gkp_rounds(kappa)
  length = 2**rounds
  if length % 8:
    raise errors.ParameterError(
        'kappa=%g gives L=%d; the Gaussification needs L in 8N '
        '(kappa <= 2^-9/4)' % (kappa, length))
  comb_state, comb_report = run_comb(delta, rounds, backend, tol=tol)
  xi = comb_report.trace_distance_upper
  logging.info('gkp: comb stage fidelity %.10f, xi=%.6g', comb_report.fidelity,
               xi)
  if comb_report.backend == constants.Backend.GRID:
    stage_input = sim.regrid(comb_state,
                             gaussification_input_axis(length, delta))
  else:
    stage_input = comb_state
  ensemble, stage = run_gaussification(
      stage_input,
      kappa,
      length,
      delta,
      comb_report.backend,
      resolution,
      xi=xi,
      completeness=completeness,
      with_stabilizers=with_stabilizers,
      tol=tol)
  counts = circuit.op_count(
      gkp_circuit(kappa, delta), constants.CountMode.HERALDED,
      circuit.correction_counts(length).raw)
  params = dict(kappa=kappa, delta=delta, rounds=rounds, length=length)
  extras = dict(
      stage.extras,
      comb_fidelity=comb_report.fidelity,
      comb_op_total=comb_report.op_counts.total)
  report = ProtocolReport('gkp', params, counts, stage.p_acc, stage.fidelity,
                          stage.delta_p, stage.delta_q, comb_report.backend,
                          0.0, comb_report.rows + stage.rows, extras)
  report.rows.extend(_gkp_rows(kappa, delta, length, report))
  report.runtime = time.perf_counter() - start
  return ensemble, report


# Heralding stability.


@dataclasses.dataclass
class StabilityReport:
  """Heralding stability of the Gaussification under an input perturbation.

  Attributes:
    name: label of the perturbation.
    delta: trace distance between the reference and perturbed inputs.
    gamma: upper estimate 2 sqrt(1 - F) of ||rho_acc - target||_1.
    p_reference: acceptance probability on the reference input.
    p_perturbed: acceptance probability on the perturbed input.
    fidelity_reference: output fidelity on the reference input.
    fidelity_perturbed: output fidelity on the perturbed input.
    rows: the two BoundReport rows.
  """
  name: str
  delta: float
  gamma: float
  p_reference: float
  p_perturbed: float
  fidelity_reference: float
  fidelity_perturbed: float
  rows: List[bounds_lib.BoundReport]

  @property
  def violated(self):
    return any(row.violated for row in self.rows)

  def as_dict(self):
    fields = dataclasses.asdict(self)
    fields['rows'] = [row.as_dict() for row in self.rows]
    return fields


def perturbed_inputs(length: int,
                     delta: float,
                     tol: float = constants.DEFAULT_TOL
                    ) -> Dict[str, List[states.GaussianSum]]:
  """Perturbations of Sha_{L,Delta} used by the stability audit.

  Returns:
    Branch lists keyed by name: the comb shifted by STABILITY_SHIFT, the comb
    with widened peaks, and a rank-two mixture leaking STABILITY_LEAKAGE of
    the weight into the comb with alternating signs.
  """
  comb = states.build_state(states.StateSpec.comb(length, delta), tol)
  wide = states.build_state(
      states.StateSpec.comb(length, delta * constants.STABILITY_WIDTH_FACTOR),
      tol)
  leak = constants.STABILITY_LEAKAGE
  return {
      'shift': [comb.translated(constants.STABILITY_SHIFT)],
      'width': [wide],
      'leakage': [
          comb.scaled(math.sqrt(1 - leak)),
          comb.kicked(math.pi).scaled(math.sqrt(leak))
      ],
  }


def stability_audit(reference,
                    perturbed,
                    kappa: float,
                    length: int,
                    delta: float,
                    target: Optional[states.GaussianSum] = None,
                    resolution: Optional[float] = None,
                    name: str = 'perturbed',
                    tol: float = constants.DEFAULT_TOL) -> StabilityReport:
  """Checks the heralding stability inequalities with measured distances.

  With delta = ||rho - tau||_1 between the inputs and gamma the output error
  on rho, Pr[acc | tau] >= Pr[acc | rho] - delta / 2 and
  ||tau_acc - target||_1 <= delta / Pr[acc | rho] + gamma. Output distances
  are bracketed by 2 (1 - F) <= ||.||_1 <= 2 sqrt(1 - F); gamma takes the
  upper side and the checked left-hand side the lower one.

  Raises:
    PreconditionError: if the reference input is never accepted.
  """
  rho = _normalized_mixture(_branches_of(reference))
  tau = _normalized_mixture(_branches_of(perturbed))
  distance = states.trace_distance(rho, tau)
  options = dict(
      backend=constants.Backend.GAUSS,
      resolution=resolution,
      target=target if target is not None else states.build_state(
          states.StateSpec.gkp_peakwise(kappa, delta), tol),
      completeness=False,
      with_stabilizers=False,
      tol=tol)
  _, on_rho = run_gaussification(rho, kappa, length, delta, **options)
  _, on_tau = run_gaussification(tau, kappa, length, delta, **options)
  if not on_rho.p_acc > 0:
    raise errors.PreconditionError('the reference input is never accepted')
  gamma = on_rho.trace_distance_upper
  params = dict(kappa=kappa, delta=delta, length=length, input=name)
  rows = [
      bounds_lib.judge(
          'stability.acceptance',
          params,
          bounds_lib.acceptance_stability(on_rho.p_acc, distance),
          on_tau.p_acc,
          Relation.AT_LEAST,
          trivial=0.0,
          tolerance=1e-8),
      bounds_lib.judge(
          'stability.output',
          params,
          bounds_lib.output_stability(distance, on_rho.p_acc, gamma),
          on_tau.trace_distance_lower,
          Relation.AT_MOST,
          trivial=2.0,
          tolerance=1e-8),
  ]
  logging.info('stability[%s]: delta=%.6g p=%.8f -> %.8f', name, distance,
               on_rho.p_acc, on_tau.p_acc)
  return StabilityReport(name, distance, gamma, on_rho.p_acc, on_tau.p_acc,
                         on_rho.fidelity, on_tau.fidelity, rows)
