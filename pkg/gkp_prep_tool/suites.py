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
"""Verification suites run by the verify command.

Each suite evaluates a family of closed-form inequalities over a parameter
grid and returns BoundReport rows:

  formulas   overlap, series, normalization, truncation and convolution
             identities on exact states
  tails      window masses of GKP states against their tail bounds
  moments    per-gate moment limits along random bounded circuits
  stability  heralding stability of the Gaussification under perturbations
"""

import dataclasses
import math
from typing import Dict, List, Sequence

from absl import logging
import numpy as np
from scipy import integrate

from gkp_prep_tool import bounds
from gkp_prep_tool import circuit
from gkp_prep_tool import constants
from gkp_prep_tool import preconditions
from gkp_prep_tool import protocols
from gkp_prep_tool import sim
from gkp_prep_tool import states

Relation = constants.Relation

# Parameters of the convolution and stabilizer checks.
_CONV_KAPPA = 0.2
_CONV_DELTA = 0.01
_STABILIZER_KAPPA = 0.05
_STABILIZER_DELTA = 0.01


@dataclasses.dataclass
class SuiteOptions:
  """Parameter grids of the suites; defaults come from constants."""
  kappas: Sequence[float] = constants.TAIL_KAPPAS
  deltas: Sequence[float] = constants.TAIL_DELTAS
  radii: Sequence[float] = constants.TAIL_RADII
  lengths: Sequence[int] = constants.TRUNCATION_LENGTHS
  gates: int = constants.MOMENT_GATES
  trials: int = constants.MOMENT_TRIALS
  seed: int = 0
  tol: float = constants.DEFAULT_TOL


# Formulas.


def _peak_overlap_quad(z1, z2, delta):
  norm = 1 / (math.sqrt(math.pi) * delta)
  mid = (z1 + z2) / 2

  def integrand(x):
    return norm * math.exp(-((x - z1)**2 + (x - z2)**2) / (2 * delta**2))

  reach = 40 * delta
  value, _ = integrate.quad(
      integrand, mid - reach, mid + reach, points=[mid], epsabs=1e-14,
      epsrel=1e-12, limit=constants.QUAD_LIMIT)
  return value


def peak_overlap_rows(peaks=constants.OVERLAP_PEAKS,
                      deltas=constants.OVERLAP_DELTAS):
  """Closed-form peak overlaps exp(-(z - z')^2 / (4 Delta^2)) vs quadrature."""
  rows = []
  for delta in deltas:
    worst = max(
        abs(math.exp(-(z1 - z2)**2 / (4 * delta**2)) -
            _peak_overlap_quad(z1, z2, delta))
        for z1 in peaks
        for z2 in peaks)
    rows.append(
        bounds.judge('formulas.peak_overlap', dict(delta=delta, pairs=len(
            peaks)**2), 1e-10, worst, Relation.AT_MOST, tolerance=0.0))
  return rows


def series_rows(points=constants.SERIES_POINTS,
                c_range=constants.SERIES_C_RANGE,
                epsilon=constants.SERIES_EPS):
  """Bracketing of the four Gaussian series on log-spaced decay rates."""
  rows = []
  cs = np.geomspace(c_range[0], c_range[1], points)
  for mode in constants.SeriesMode:
    values = [states.gaussian_series(c, mode, epsilon) for c in cs]
    params = dict(mode=mode.value, points=points)
    low = min(v.value - v.lower_bound for v in values)
    high = min(v.upper_bound - v.value for v in values)
    if math.isfinite(low):
      rows.append(
          bounds.judge('formulas.series_lower', params, 0.0, low,
                       Relation.AT_LEAST, tolerance=1e-12))
    if math.isfinite(high):
      rows.append(
          bounds.judge('formulas.series_upper', params, 0.0, high,
                       Relation.AT_LEAST, tolerance=1e-12))
  return rows


def normalization_rows(grid=constants.NORMALIZATION_GRID, length=8,
                       tol=constants.DEFAULT_TOL):
  rows = []
  for kappa in grid:
    for delta in grid:
      values = states.normalization_bounds(kappa, delta, length, tol)
      params = dict(kappa=kappa, delta=delta, length=length)
      rows.extend([
          bounds.judge('formulas.envelope_norm_lower', params,
                       values.C_k_inv_sq_lb, values.C_k_inv_sq,
                       Relation.AT_LEAST),
          bounds.judge('formulas.envelope_norm_upper', params,
                       values.C_k_inv_sq_ub, values.C_k_inv_sq,
                       Relation.AT_MOST),
          bounds.judge('formulas.gkp_norm_upper', params,
                       values.C_kD_inv_sq_ub, values.C_kD_inv_sq,
                       Relation.AT_MOST),
          bounds.judge('formulas.norm_ratio', params, 1.0, values.ratio,
                       Relation.AT_MOST),
          bounds.judge('formulas.norm_ratio_lower', params, values.ratio_lb,
                       values.ratio, Relation.AT_LEAST),
          bounds.judge('formulas.bounded_norm_lower', params,
                       values.C_Lk_inv_sq_lb, values.C_Lk_inv_sq,
                       Relation.AT_LEAST),
      ])
  return rows


def _overlap_sq(a, b):
  return abs(states.overlap(a, b))**2


def truncation_rows(deltas=constants.TRUNCATION_DELTAS,
                    lengths=constants.TRUNCATION_LENGTHS,
                    kappa=_STABILIZER_KAPPA,
                    tol=constants.DEFAULT_TOL):
  """Overlaps of exact states with their truncated versions at eps = sqrt(D)."""
  spec = states.StateSpec
  rows = []
  for delta in deltas:
    epsilon = math.sqrt(delta)
    params = dict(delta=delta, epsilon=epsilon)
    peak = _overlap_sq(
        states.build_state(spec.squeezed_vacuum(delta), tol),
        states.build_state(spec.truncated_gaussian(delta, epsilon), tol))
    rows.append(
        bounds.judge('formulas.truncated_peak', params,
                     bounds.truncated_peak_overlap(delta, epsilon), peak,
                     Relation.AT_LEAST, preconditions.TRUNCATION,
                     trivial=0.0))
    for length in lengths:
      comb = _overlap_sq(
          states.build_state(spec.comb(length, delta), tol),
          states.build_state(spec.truncated_comb(length, delta, epsilon), tol))
      rows.append(
          bounds.judge('formulas.truncated_comb', dict(params, length=length),
                       bounds.truncated_comb_overlap(delta, epsilon), comb,
                       Relation.AT_LEAST, preconditions.TRUNCATION,
                       trivial=0.0))
      bounded = _overlap_sq(
          states.build_state(spec.gkp_truncated(kappa, delta, epsilon), tol),
          states.build_state(
              spec.gkp_truncated_bounded(length, kappa, delta, epsilon), tol))
      rows.append(
          bounds.judge('formulas.bounded_gkp',
                       dict(params, kappa=kappa, length=length),
                       bounds.bounded_gkp_overlap(kappa, length), bounded,
                       Relation.AT_LEAST, trivial=0.0))
    gkp = states.build_state(spec.gkp_peakwise(kappa, delta), tol)
    truncated = states.build_state(spec.gkp_truncated(kappa, delta, epsilon),
                                   tol)
    rows.append(
        bounds.judge('formulas.truncated_gkp', dict(params, kappa=kappa),
                     bounds.truncated_gkp_overlap(delta, epsilon),
                     _overlap_sq(gkp, truncated), Relation.AT_LEAST,
                     preconditions.TRUNCATION, trivial=0.0))
  return rows


def stabilizer_rows(kappa=_STABILIZER_KAPPA, delta=_STABILIZER_DELTA,
                    tol=constants.DEFAULT_TOL):
  epsilon = math.sqrt(delta)
  state = states.build_state(
      states.StateSpec.gkp_truncated(kappa, delta, epsilon), tol)
  params = dict(kappa=kappa, delta=delta, epsilon=epsilon)
  return [
      bounds.judge('formulas.stabilizer_shift', params,
                   bounds.stabilizer_shift_overlap(kappa),
                   _overlap_sq(state, state.translated(1.0)),
                   Relation.AT_LEAST, trivial=0.0),
      bounds.judge('formulas.stabilizer_phase', params,
                   bounds.stabilizer_phase_overlap(epsilon),
                   _overlap_sq(state, state.kicked(2 * math.pi)),
                   Relation.AT_LEAST, trivial=0.0),
  ]


def convolution_rows(kappa=_CONV_KAPPA, delta=_CONV_DELTA,
                     lengths=constants.TRUNCATION_LENGTHS):
  """Sums of I_k(0) against envelope weights and against wider windows."""
  epsilon = math.sqrt(delta)
  rows = []
  for length in lengths:
    half = length // 2
    values = {
        k: states.conv_quantities(k, 0.0, kappa, delta, epsilon).I_k
        for k in range(-length, length)
    }
    central = math.fsum(values[k] for k in range(-half, half))
    wide = math.fsum(values.values())
    weights = math.fsum(states.envelope_weight(kappa, np.arange(-half, half)))
    params = dict(kappa=kappa, delta=delta, epsilon=epsilon, length=length)
    rows.append(
        bounds.judge('formulas.convolution_sum', params,
                     bounds.convolution_sum_ratio(kappa, epsilon, length),
                     central / weights, Relation.AT_LEAST, trivial=0.0))
    rows.append(
        bounds.judge('formulas.convolution_window', params,
                     bounds.convolution_window_ratio(kappa, length),
                     central / wide, Relation.AT_LEAST, trivial=0.0))
  return rows


def formulas_suite(options: SuiteOptions) -> List[bounds.BoundReport]:
  rows = peak_overlap_rows()
  rows += series_rows()
  rows += normalization_rows(tol=options.tol)
  rows += truncation_rows(tol=options.tol)
  rows += stabilizer_rows(tol=options.tol)
  rows += convolution_rows()
  return rows


# Tails.


def tails_suite(options: SuiteOptions) -> List[bounds.BoundReport]:
  """Window masses of GKP states in both quadratures.

  The exact GKP state is checked against 4 kappa R + 5 sqrt(kappa) +
  7 sqrt(Delta) in position and 2 Delta R + 5 sqrt(kappa) + 7 sqrt(Delta) in
  momentum; the truncated variants against their sharper window bounds.
  """
  spec = states.StateSpec
  momentum = constants.Domain.MOMENTUM
  rows = []
  for kappa in options.kappas:
    for delta in options.deltas:
      epsilon = math.sqrt(delta)
      gkp = states.build_state(spec.gkp_peakwise(kappa, delta), options.tol)
      # Poisson-summed form; its narrow peaks keep window overlaps closed form.
      gkp_momentum = states.momentum_rep(
          spec.gkp_peakwise(kappa, delta), options.tol)
      truncated = states.build_state(
          spec.gkp_truncated(kappa, delta, epsilon), options.tol)
      momentum_truncated = states.build_state(
          spec.gkp_momentum_truncated(kappa, delta, epsilon), options.tol)
      logging.info('tails: kappa=%g delta=%g with %d peaks', kappa, delta,
                   len(gkp))
      for radius in options.radii:
        params = dict(kappa=kappa, delta=delta, radius=radius)
        rows.extend([
            bounds.judge(
                'tails.position', params,
                bounds.position_window_bound(kappa, delta, radius),
                states.tail_mass(gkp, radius), Relation.AT_MOST,
                preconditions.TAILS, trivial=1.0),
            bounds.judge(
                'tails.momentum', params,
                bounds.momentum_window_bound(kappa, delta, radius),
                states.tail_mass(gkp_momentum, radius, momentum),
                Relation.AT_MOST, preconditions.TAILS, trivial=1.0),
            bounds.judge(
                'tails.truncated_position', params,
                bounds.truncated_position_window(kappa, radius),
                states.tail_mass(truncated, radius), Relation.AT_MOST,
                preconditions.TAILS, trivial=1.0),
            bounds.judge(
                'tails.momentum_truncated', params,
                bounds.truncated_momentum_window(delta, radius),
                states.tail_mass(momentum_truncated, radius, momentum),
                Relation.AT_MOST, preconditions.TAILS, trivial=1.0),
        ])
  return rows


# Moments.


def random_gate(rng: np.random.Generator) -> circuit.Gate:
  """Draws a bounded gate on mode 0 and qubit 0.

  Strengths are kept small enough for the sequence to stay on a moderate
  grid; every draw is a strict unit-cost gate.
  """
  choice = rng.integers(7)
  if choice == 0:
    return circuit.squeeze(0, rng.uniform(-0.3, 0.3))
  if choice == 1:
    return circuit.rotation(0, rng.uniform(-math.pi, math.pi))
  if choice == 2:
    return circuit.displacement(0, *rng.uniform(-0.7, 0.7, size=2))
  if choice == 3:
    return circuit.ctrl_displacement(0, 0, *rng.uniform(-0.7, 0.7, size=2))
  if choice == 4:
    return circuit.phase_shift(0, rng.uniform(-math.pi, math.pi))
  if choice == 5:
    generator = rng.normal(size=(2, 2))
    generator = generator + generator.T
    generator *= rng.uniform(0.05, 0.3) / np.linalg.norm(generator, 2)
    return circuit.gaussian([0], generator)
  return circuit.hadamard(0)


def moment_axis():
  return sim.GridAxis.covering(48, 1 / 128)


def moments_suite(options: SuiteOptions) -> List[bounds.BoundReport]:
  """Random strict circuits on one mode and one qubit.

  Every gate is checked against its moment limits and the final energy
  against exp(8 pi T) (m + 2); the final position window mass is checked
  against the Markov projection bound.
  """
  rng = np.random.Generator(np.random.Philox(options.seed))
  axis = moment_axis()
  rows = []
  for trial in range(options.trials):
    count = int(rng.integers(1, options.gates + 1))
    gates = [random_gate(rng) for _ in range(count)]
    prep = circuit.Circuit(1, 1, gates, strict=True)
    state = sim.prepare(states.StateSpec.vacuum(), [axis], sim.QUBIT_ZERO)
    before = bounds.measure_moments(state)
    for gate in prep:
      state = sim.apply(gate, state)
      after = bounds.measure_moments(state)
      for row in bounds.gate_moment_check(gate, before, after):
        row.parameters['trial'] = trial
        rows.append(row)
      before = after
    params = dict(trial=trial, gates=count)
    # The qubit counts as the one extra register.
    rows.append(
        bounds.judge('moments.energy_limit', params,
                     bounds.energy_limit(count, 1), before.energy,
                     Relation.AT_MOST))
    radius = 2 * math.sqrt(before.energy) + 1
    inside = state.with_branches(
        state.branches * (np.abs(axis.points) <= radius)[None]).norm_sq()
    rows.append(
        bounds.judge('moments.markov_window', dict(params, radius=radius),
                     bounds.markov_projection(before.energy, radius), inside,
                     Relation.AT_LEAST, trivial=0.0))
  return rows


# Stability.


def stability_suite(options: SuiteOptions, kappa=0.2, length=8,
                    delta=0.1) -> List[bounds.BoundReport]:
  """Heralding stability on the shifted, widened and leaking combs."""
  reference = [
      states.build_state(states.StateSpec.comb(length, delta), options.tol)
  ]
  rows = []
  inputs = protocols.perturbed_inputs(length, delta, options.tol)
  for name in sorted(inputs):
    audit = protocols.stability_audit(
        reference, inputs[name], kappa, length, delta, name=name,
        tol=options.tol)
    rows.extend(audit.rows)
  return rows


SUITES = {
    constants.Suite.FORMULAS: formulas_suite,
    constants.Suite.TAILS: tails_suite,
    constants.Suite.MOMENTS: moments_suite,
    constants.Suite.STABILITY: stability_suite,
}


def run_suite(suite: constants.Suite,
              options: SuiteOptions) -> Dict[str, List[bounds.BoundReport]]:
  """Runs one suite, or every suite for Suite.ALL, keyed by suite name."""
  suite = constants.Suite(suite)
  selected = list(SUITES) if suite == constants.Suite.ALL else [suite]
  results = {}
  for name in selected:
    logging.info('running suite %s', name.value)
    results[name.value] = SUITES[name](options)
  return results
