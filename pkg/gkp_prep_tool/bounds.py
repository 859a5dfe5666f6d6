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
"""Closed-form bound evaluators and the verdict rule that judges them.

Every evaluator is a pure function of its parameters. Evaluators never raise
for parameters outside a bound's claimed range; judge() turns that into a
precondition_unmet verdict and keeps the evaluated value.

Typical usage example:

  rhs = bounds.comb_error_bound(delta)
  row = bounds.judge('comb fidelity', {'delta': delta}, 1 - rhs / 2,
                     measured_fidelity, constants.Relation.AT_LEAST,
                     preconditions.COMB, trivial=0.0)
"""

import dataclasses
import math
from typing import Any, Dict, List, Optional

from absl import logging
import numpy as np

from gkp_prep_tool import circuit
from gkp_prep_tool import constants
from gkp_prep_tool import errors
from gkp_prep_tool import preconditions as preconditions_lib
from gkp_prep_tool import sim

_VERDICT_TOL = 1e-9


@dataclasses.dataclass
class BoundReport:
  """One checked inequality.

  Attributes:
    name: short identifier of the inequality.
    parameters: parameter values the bound was evaluated at.
    rhs: the bound's value.
    measured: measured left-hand side, None for formula-only rows.
    relation: whether measured must be at most or at least rhs.
    verdict: the Verdict.
    tolerance: slack allowed before declaring a violation.
    note: free-form remark, e.g. the unmet preconditions.
  """
  name: str
  parameters: Dict[str, Any]
  rhs: float
  measured: Optional[float]
  relation: constants.Relation
  verdict: constants.Verdict
  tolerance: float = _VERDICT_TOL
  note: str = ''

  @property
  def violated(self):
    return self.verdict == constants.Verdict.VIOLATED

  def as_dict(self):
    return dict(
        name=self.name,
        parameters=dict(self.parameters),
        rhs=_finite_or_str(self.rhs),
        measured=(None if self.measured is None else
                  _finite_or_str(self.measured)),
        relation=self.relation.value,
        verdict=self.verdict.value,
        tolerance=self.tolerance,
        note=self.note)


def _finite_or_str(value):
  value = float(value)
  return value if math.isfinite(value) else str(value)


def judge(name: str,
          parameters: Dict[str, Any],
          rhs: float,
          measured: Optional[float],
          relation: constants.Relation,
          conditions: preconditions_lib.Preconditions = preconditions_lib.NONE,
          trivial: Optional[float] = None,
          tolerance: float = _VERDICT_TOL) -> BoundReport:
  """Assigns a verdict to a measured quantity against a bound.

  Args:
    name: short identifier of the inequality.
    parameters: parameter values, also matched against conditions.
    rhs: the bound.
    measured: the measured quantity, or None.
    relation: AT_MOST if measured <= rhs is claimed, AT_LEAST otherwise.
    conditions: parameter ranges in which the bound is claimed.
    trivial: value beyond which the bound says nothing (e.g. 0 for a
      probability lower bound, 2 for a trace-distance upper bound).
    tolerance: absolute slack before declaring a violation.

  Returns:
    BoundReport.
  """
  verdict = constants.Verdict
  note = ''
  unmet = conditions.unmet(parameters)
  rhs = float(rhs)
  if unmet:
    result = verdict.PRECONDITION_UNMET
    note = 'unmet: ' + '; '.join(unmet)
  elif trivial is not None and (
      (relation == constants.Relation.AT_MOST and rhs >= trivial) or
      (relation == constants.Relation.AT_LEAST and rhs <= trivial)):
    result = verdict.VACUOUS
    logging.info('%s is vacuous at %s (rhs %.6g)', name, parameters, rhs)
  elif measured is not None and (
      (relation == constants.Relation.AT_MOST and
       measured > rhs + tolerance) or
      (relation == constants.Relation.AT_LEAST and
       measured < rhs - tolerance)):
    result = verdict.VIOLATED
    logging.warning('%s violated at %s: measured %.12g, bound %.12g', name,
                    parameters, measured, rhs)
  else:
    result = verdict.HOLDS
  return BoundReport(name, dict(parameters), rhs,
                     None if measured is None else float(measured), relation,
                     result, tolerance, note)


def fidelity_form(distance_bound: float) -> float:
  """Fidelity implied by a trace-distance bound, via ||.||_1 >= 2 (1 - F)."""
  return 1 - distance_bound / 2


def distance_bracket(fidelity: float):
  """[2 (1 - F), 2 sqrt(1 - F)] around ||rho - |psi><psi| ||_1."""
  gap = min(max(1 - fidelity, 0.0), 1.0)
  return 2 * gap, 2 * math.sqrt(gap)


# Moment limits.


def energy_limit(gates: int, extra_modes: int) -> float:
  """E_m(T) = exp(8 pi T) (m + 2) for T bounded gates on m + 1 modes."""
  if gates < 0 or extra_modes < 0:
    raise errors.ParameterError('gate and mode counts must be nonnegative')
  return math.exp(8 * math.pi * gates) * (extra_modes + 2)


@dataclasses.dataclass(frozen=True)
class MomentVector:
  """First moments s(rho) and energy tr(H rho) of an oscillator state."""
  s: np.ndarray
  energy: float

  def __post_init__(self):
    norm_sq = float(np.dot(self.s, self.s))
    if self.energy < -1e-12 or self.energy < norm_sq - 1e-8 * max(
        1.0, self.energy):
      raise errors.NumericError(
          'energy %.12g is below |s|^2 = %.12g' % (self.energy, norm_sq))

  @property
  def norm(self) -> float:
    return float(np.linalg.norm(self.s))


def measure_moments(state) -> MomentVector:
  """Moments of a grid state, with s ordered (q0, p0, q1, p1)."""
  obs = constants.Observable
  s = []
  energy = 0.0
  for mode in range(state.n_modes):
    s.append(sim.expectation(state, obs.POSITION, mode).real)
    s.append(sim.expectation(state, obs.MOMENTUM, mode).real)
    energy += sim.expectation(state, obs.ENERGY, mode).real
  return MomentVector(np.array(s), energy)


def gate_moment_check(gate: circuit.Gate, before: MomentVector,
                      after: MomentVector,
                      tolerance: float = 1e-8) -> List[BoundReport]:
  """Checks the moment-growth inequalities of one gate.

  Every bounded-strength gate must satisfy the generic limits
  |s'| <= exp(2 pi) |s| + 2 pi and
  E' <= exp(4 pi) E + 4 pi |s| + (2 pi)^2; each gate family additionally has
  its own sharper limit.

  Args:
    gate: the applied gate.
    before: moments of the input.
    after: moments of the output.
    tolerance: relative slack.

  Returns:
    BoundReport rows, generic rows first.
  """
  kind = constants.GateKind
  s, e = before.norm, before.energy
  label = gate.name or gate.kind.value
  params = {'gate': label}
  slack = tolerance * max(1.0, e)
  rows = []
  if gate.strength <= constants.STRENGTH_LIMIT + constants.STRENGTH_SLACK:
    rows.append(
        judge('moments.generic_displacement', params,
              math.exp(2 * math.pi) * s + 2 * math.pi, after.norm,
              constants.Relation.AT_MOST, tolerance=slack))
    rows.append(
        judge('moments.generic_energy', params,
              math.exp(4 * math.pi) * e + 4 * math.pi * s + (2 * math.pi)**2,
              after.energy, constants.Relation.AT_MOST, tolerance=slack))
  if gate.kind == kind.DISPLACEMENT:
    d = gate.strength
    rows.append(
        judge('moments.displacement_shift', params, s + d, after.norm,
              constants.Relation.AT_MOST, tolerance=slack))
    rows.append(
        judge('moments.displacement_energy', params, e + 2 * s * d + d**2,
              after.energy, constants.Relation.AT_MOST, tolerance=slack))
  elif gate.kind == kind.CTRL_DISPLACEMENT:
    d = gate.strength
    rows.append(
        judge('moments.ctrl_displacement_shift', params, s + d, after.norm,
              constants.Relation.AT_MOST, tolerance=slack))
    rows.append(
        judge('moments.ctrl_displacement_energy', params,
              2 * e + 2 * s * d + d**2, after.energy,
              constants.Relation.AT_MOST, tolerance=slack))
  elif gate.kind == kind.GAUSSIAN_UNITARY:
    norm_a = gate.strength
    rows.append(
        judge('moments.gaussian_shift', params,
              math.exp(norm_a) * s, after.norm, constants.Relation.AT_MOST,
              tolerance=slack))
    rows.append(
        judge('moments.gaussian_energy', params,
              math.exp(2 * norm_a) * e, after.energy,
              constants.Relation.AT_MOST, tolerance=slack))
    if gate.name in ('phase_shift', 'rotation'):
      rows.append(
          judge('moments.phase_shift_energy', params, 0.0,
                abs(after.energy - e), constants.Relation.AT_MOST,
                tolerance=slack))
  elif gate.kind == kind.QUBIT_UNITARY:
    rows.append(
        judge('moments.qubit_gate_energy', params, 0.0,
              abs(after.energy - e), constants.Relation.AT_MOST,
              tolerance=slack))
  return rows


def markov_projection(energy: float, radius: float) -> float:
  """Lower bound 1 - tr(H rho) / R^2 on the mass inside [-R, R]."""
  if radius <= 0:
    raise errors.ParameterError('radius must be positive')
  return 1 - energy / radius**2


# Protocol guarantees.


def comb_error_bound(delta: float) -> float:
  """Trace-distance bound 17 sqrt(Delta) of the comb preparation."""
  return 17 * math.sqrt(delta)


def doubling_distance_bound(epsilon: float, rounds: int = 1) -> float:
  """9 epsilon (2^k - 1) after k peak-doubling rounds."""
  return 9 * epsilon * (2**rounds - 1)


def doubling_overlap_bound(epsilon: float) -> float:
  """Squared overlap 1 - 20 epsilon^2 of one peak-doubling round."""
  return 1 - 20 * epsilon**2


@dataclasses.dataclass(frozen=True)
class HeraldedBounds:
  """Acceptance lower bound and output-error upper bound of a protocol."""
  p_lower: float
  error_upper: float


def _acceptance_core(kappa, length):
  return (1 - 2 * math.exp(-kappa**2 * length**2 / 256)) / 8


def gauss_bounds(kappa: float,
                 delta: float,
                 length: int,
                 xi: float,
                 constant_set: constants.ConstantSet = constants.ConstantSet
                 .STATEMENT) -> HeraldedBounds:
  """Guarantees of the envelope Gaussification for an input xi-close to a comb.

  Both constant sets share the acceptance bound
  (1/8)(1 - 2 exp(-kappa^2 L^2 / 256)) - (5/2) sqrt(Delta) - xi / 2. The
  statement set bounds the error with (1/4)(1 - 2 exp(-kappa^2 L^2 / 16)) in
  the denominator and exp(-kappa^2 L^2 / 128) in the tail; the derived set
  composes the acceptance and closeness results directly.

  Args:
    kappa: envelope parameter.
    delta: peak width of the comb.
    length: comb length L.
    xi: trace distance of the input to the comb.
    constant_set: which constants to use.

  Returns:
    HeraldedBounds; the error bound is inf when its denominator is not
    positive.
  """
  sqrt_delta = math.sqrt(delta)
  p_lower = _acceptance_core(kappa, length) - 2.5 * sqrt_delta - xi / 2
  tail = 6 * sqrt_delta + 6 * kappa * math.sqrt(length)
  if constant_set == constants.ConstantSet.STATEMENT:
    denominator = (1 - 2 * math.exp(-kappa**2 * length**2 / 16)) / 4
    tail += 7 * math.exp(-kappa**2 * length**2 / 128)
  else:
    denominator = _acceptance_core(kappa, length)
    tail += 7 * math.exp(-kappa**2 * length**2 / 64)
  if denominator <= 0:
    return HeraldedBounds(p_lower, math.inf)
  return HeraldedBounds(p_lower, (5 * sqrt_delta + xi) / denominator + tail)


def closeness_bound(kappa: float, delta: float, length: int) -> float:
  """||rho_acc - GKP||_1 on an exact truncated-comb input."""
  return (6 * kappa * math.sqrt(length) + 6 * math.sqrt(delta) +
          7 * math.exp(-kappa**2 * length**2 / 64))


def exact_input_acceptance(kappa: float, length: int) -> float:
  """Acceptance lower bound on an exact truncated-comb input."""
  return _acceptance_core(kappa, length)


def conditional_overlap_bound(kappa: float, length: int) -> float:
  return (1 - 1.5 * kappa**2 * length -
          4 * math.exp(-kappa**2 * length**2 / 32))


def gkp_bounds(kappa: float, delta: float) -> HeraldedBounds:
  """Headline guarantees, 1/10 and 190 sqrt(Delta) + 24 kappa^(1/3)."""
  return HeraldedBounds(constants.GKP_ACCEPT_LOWER,
                        190 * math.sqrt(delta) + 24 * kappa**(1 / 3))


def gkp_derived_bounds(kappa: float, delta: float,
                       length: int) -> HeraldedBounds:
  """Finite-parameter guarantees of the full preparation.

  These follow from composing the comb and Gaussification results without
  the asymptotic simplifications of the headline constants.
  """
  core = _acceptance_core(kappa, length)
  sqrt_delta = math.sqrt(delta)
  p_lower = core - 11 * sqrt_delta
  if core <= 0:
    return HeraldedBounds(p_lower, math.inf)
  error = ((22 / core + 6) * sqrt_delta + 6 * kappa * math.sqrt(length) +
           7 * math.exp(-kappa**2 * length**2 / 64))
  return HeraldedBounds(p_lower, error)


# Complexity lower bounds.


@dataclasses.dataclass(frozen=True)
class LowerBounds:
  """Gate-count lower bounds for GKP preparation.

  Attributes:
    unitary: bound for unitary preparation circuits.
    heralded: bound for heralded preparations accepting with probability p.
    heralded_alt: the heralded bound before its final simplification.
    unitary_preconditions_met: whether 20 sqrt(k) + 28 sqrt(D) <= 1.
    heralded_preconditions_met: whether 20 sqrt(k) + 28 sqrt(D) <= p and
      epsilon <= p.
  """
  unitary: float
  heralded: float
  heralded_alt: float
  unitary_preconditions_met: bool
  heralded_preconditions_met: bool


def lower_bounds(kappa: float, delta: float, p: float,
                 epsilon: float) -> LowerBounds:
  logs = math.log(1 / kappa) + math.log(1 / delta)
  params = dict(kappa=kappa, delta=delta, p=p, epsilon=epsilon)
  alt = (math.log(1 / kappa) / (4 * math.pi) +
         3 * math.log(p) / (8 * math.pi) - 1) if p > 0 else -math.inf
  return LowerBounds(
      logs / (8 * math.pi) - 1, logs / 200 - 1, alt,
      preconditions_lib.UNITARY_LOWER.is_satisfied(params),
      preconditions_lib.HERALDED_LOWER.is_satisfied(params))


def position_window_bound(kappa: float, delta: float, radius: float) -> float:
  """Upper bound on the GKP mass inside [-R, R] in position."""
  return 4 * kappa * radius + 5 * math.sqrt(kappa) + 7 * math.sqrt(delta)


def momentum_window_bound(kappa: float, delta: float, radius: float) -> float:
  """Upper bound on the GKP mass inside [-R, R] in momentum."""
  return 2 * delta * radius + 5 * math.sqrt(kappa) + 7 * math.sqrt(delta)


def gkp_distance_lower(tail_pos: float, tail_mom: float, kappa: float,
                       delta: float, radius: float) -> float:
  """Lower bound on ||rho - GKP||_1 from window masses of rho.

  Args:
    tail_pos: tr(Pi_[-R,R] rho) in position.
    tail_mom: the same in momentum.
    kappa: envelope parameter of the GKP state.
    delta: its peak width.
    radius: window half-width R.

  Returns:
    max(0, 2 (tail - bound)) over both quadratures.
  """
  return max(0.0,
             2 * (tail_pos - position_window_bound(kappa, delta, radius)),
             2 * (tail_mom - momentum_window_bound(kappa, delta, radius)))


# Effective squeezing.


def _squeezing(value):
  magnitude = abs(value)
  if magnitude > 1 + 1e-9:
    raise errors.NumericError('|tr(S rho)| = %.12g exceeds 1' % magnitude)
  if magnitude == 0:
    return math.inf
  return math.sqrt(max(0.0, -2 * math.log(min(magnitude, 1.0))))


def effective_squeezing(tr_sp: complex, tr_sq: complex):
  """(Delta_P, Delta_Q) = sqrt(log 1 / |tr(S rho)|^2) for both stabilizers."""
  return _squeezing(tr_sp), _squeezing(tr_sq)


def squeezing_bound_check(kappa: float, delta: float, delta_p: float,
                          delta_q: float) -> List[BoundReport]:
  params = dict(kappa=kappa, delta=delta)
  quarter, sixth = delta**0.25, kappa**(1 / 6)
  return [
      judge('gkp.effective_squeezing_p', params, 39 * quarter + 16 * sixth,
            delta_p, constants.Relation.AT_MOST,
            preconditions_lib.EFFECTIVE_SQUEEZING),
      judge('gkp.effective_squeezing_q', params, 41 * quarter + 16 * sixth,
            delta_q, constants.Relation.AT_MOST,
            preconditions_lib.EFFECTIVE_SQUEEZING),
  ]


# Heralding stability.


def acceptance_stability(p_reference: float, delta: float) -> float:
  """Pr[acc | tau] >= Pr[acc | rho] - delta / 2 when ||rho - tau||_1 <= delta."""
  return p_reference - delta / 2


def output_stability(delta: float, p_reference: float, gamma: float) -> float:
  """||tau_acc - sigma||_1 <= delta / Pr[acc | rho] + gamma."""
  if not p_reference > 0:
    raise errors.PreconditionError('reference input is never accepted')
  return delta / p_reference + gamma


# Truncation and window bounds on single-mode states.


def truncated_peak_overlap(delta: float, epsilon: float) -> float:
  return 1 - 2 * math.exp(-(epsilon / delta)**2)


def truncated_comb_overlap(delta: float, epsilon: float) -> float:
  return 1 - 16 * delta**2 - 2 * math.exp(-(epsilon / delta)**2)


def truncated_gkp_overlap(delta: float, epsilon: float) -> float:
  return 1 - 7 * delta - 2 * math.exp(-(epsilon / delta)**2)


def bounded_gkp_overlap(kappa: float, length: int) -> float:
  return 1 - 2 * math.exp(-kappa**2 * length**2 / 4)


def truncation_distances(kappa: float, delta: float, length: int):
  """Trace distances at epsilon = sqrt(Delta) for peak, comb, GKP, bounded GKP."""
  root = math.sqrt(delta)
  return dict(
      peak=3 * root,
      comb=5 * root,
      gkp=6 * root,
      bounded_gkp=3 * math.exp(-kappa**2 * length**2 / 8))


def stabilizer_shift_overlap(kappa: float) -> float:
  """|<GKP^eps, e^{-iP} GKP^eps>|^2 >= 1 - 4 kappa."""
  return 1 - 4 * kappa


def stabilizer_phase_overlap(epsilon: float) -> float:
  """|<GKP^eps, e^{2 pi i Q} GKP^eps>|^2 >= 1 - 40 eps^2."""
  return 1 - 40 * epsilon**2


def truncated_position_window(kappa: float, radius: float) -> float:
  return 4 * kappa * radius + 10 * kappa


def truncated_momentum_window(delta: float, radius: float) -> float:
  return 2 * delta * radius + 12 * delta


def momentum_truncated_normalization(delta: float):
  """Bracket (1 -+ 6 sqrt(pi) Delta) / (2 pi) of the momentum-truncated norm."""
  spread = 6 * math.sqrt(math.pi) * delta
  return (1 - spread) / (2 * math.pi), (1 + spread) / (2 * math.pi)


def convolution_sum_ratio(kappa: float, epsilon: float, length: int) -> float:
  """sum_k I_k(0) >= (1 - 2 kappa^2 eps L) sum_k eta_kappa(k)^2."""
  return 1 - 2 * kappa**2 * epsilon * length


def convolution_window_ratio(kappa: float, length: int) -> float:
  """Central L of 2L convolution terms carry 1 - exp(-kappa^2 L^2 / 8)."""
  return 1 - math.exp(-kappa**2 * length**2 / 8)
