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
"""Tests for gkp_prep_tool.states."""

import math
import unittest

from absl.testing import parameterized
from hypothesis import given
from hypothesis import settings
from hypothesis import strategies as hyp_st
import numpy as np
from scipy import integrate
from scipy import special

from gkp_prep_tool import constants
from gkp_prep_tool import errors
from gkp_prep_tool import states


def _peak(z, delta, epsilon=None):
  return states.build_state(
      states.StateSpec.truncated_gaussian(delta, epsilon)
      if epsilon else states.StateSpec.squeezed_vacuum(delta)).translated(z)


class GaussianSumTest(parameterized.TestCase):

  def setUp(self):
    super(GaussianSumTest, self).setUp()
    self.gkp = states.build_state(states.StateSpec.gkp_peakwise(0.2, 0.05))

  def testOverlapOfTranslatedPeaks(self):
    value = states.overlap(_peak(0, 0.5), _peak(1, 0.5))
    self.assertAlmostEqual(value.real, math.exp(-1), places=12)
    self.assertAlmostEqual(value.imag, 0.0, places=12)

  @parameterized.parameters(0.05, 0.1, 0.5)
  def testPeakOverlapOnGrid(self, delta):
    for z in constants.OVERLAP_PEAKS:
      for z_prime in constants.OVERLAP_PEAKS:
        with self.subTest(z=z, z_prime=z_prime):
          value = states.overlap(_peak(z, delta), _peak(z_prime, delta))
          expected = math.exp(-(z - z_prime)**2 / (4 * delta**2))
          self.assertLess(abs(value - expected), 1e-10)

  def testTruncatedPeaksAreOrthogonal(self):
    value = states.overlap(_peak(0, 0.3, 0.4), _peak(1, 0.3, 0.4))
    self.assertEqual(value, 0)

  def testTruncatedPeakHasUnitNorm(self):
    self.assertAlmostEqual(_peak(2, 0.3, 0.2).norm_sq(), 1.0, places=10)

  def testTruncatedGaussianVanishesOutsideWindow(self):
    state = states.build_state(states.StateSpec.truncated_gaussian(0.1, 0.2))
    self.assertEqual(states.eval_amplitude(state, 0.4), 0)
    self.assertNotEqual(states.eval_amplitude(state, 0.2), 0)

  def testGkpIsSymmetric(self):
    for x in (0.1, 0.7, 3.2):
      with self.subTest(x=x):
        self.assertAlmostEqual(
            states.eval_amplitude(self.gkp, x),
            states.eval_amplitude(self.gkp, -x),
            places=12)

  def testGkpPeakRangeAgainstDoubledSum(self):
    z_max = states.peak_range(0.2, constants.DEFAULT_TOL)
    self.assertLess(
        2 * np.sum(states.envelope_weight(0.2, np.arange(z_max + 1, 400))),
        constants.DEFAULT_TOL)
    self.assertGreaterEqual(
        2 * np.sum(states.envelope_weight(0.2, np.arange(z_max, 400))),
        constants.DEFAULT_TOL * 0.5)
    z = np.arange(-2 * z_max, 2 * z_max + 1)

    def direct(x):
      return np.sum(
          states.envelope(0.2, z) * np.exp(-(x - z)**2 / (2 * 0.05**2)))

    ratio = (states.eval_amplitude(self.gkp, 0.0) /
             states.eval_amplitude(self.gkp, 3.02))
    self.assertAlmostEqual(ratio.real, direct(0.0) / direct(3.02), places=8)

  def testEvalRejectsWrongDimension(self):
    with self.assertRaises(errors.UsageError):
      states.eval_amplitude(self.gkp, [0.0, 1.0])

  def testOverlapRejectsModeMismatch(self):
    vacuum = states.build_state(states.StateSpec.vacuum())
    two = states.TwoModeGaussianSum.product(vacuum, vacuum)
    with self.assertRaises(errors.UsageError):
      states.overlap(vacuum, two)

  def testGkpOverlapAgainstQuadrature(self):
    pointwise = states.build_state(states.StateSpec.gkp_pointwise(0.2, 0.05))
    value = states.overlap(self.gkp, pointwise)
    x = np.linspace(-45, 45, 90001)
    oracle = integrate.trapezoid(np.conj(self.gkp(x)) * pointwise(x), x)
    self.assertGreater(value.real, 0)
    self.assertLessEqual(value.real, 1 + 1e-12)
    self.assertLess(abs(value - oracle), 1e-8)

  def testTwoModeProductNormAndSlice(self):
    vacuum = states.build_state(states.StateSpec.vacuum())
    comb = states.build_state(states.StateSpec.comb(4, 0.3))
    joint = states.TwoModeGaussianSum.product(vacuum, comb)
    self.assertAlmostEqual(joint.norm_sq(), 1.0, places=10)
    cut = joint.slice(0.4)
    y = np.linspace(-4, 4, 17)
    np.testing.assert_allclose(cut(y), vacuum(0.4) * comb(y), atol=1e-12)

  def testShearedSliceMatchesEvaluation(self):
    vacuum = states.build_state(states.StateSpec.vacuum())
    comb = states.build_state(states.StateSpec.comb(4, 0.3))
    joint = states.TwoModeGaussianSum.product(vacuum.kicked(0.3), comb)
    joint = joint.replace(shear=np.full(len(joint), 1.0))
    y = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(
        joint.slice(0.7)(y), joint(0.7, y), atol=1e-12)


class StateFamilyTest(parameterized.TestCase):

  @parameterized.named_parameters(
      ('vacuum', states.StateSpec.vacuum()),
      ('coherent', states.StateSpec.coherent(1.5, -2.0)),
      ('squeezed', states.StateSpec.squeezed_vacuum(0.1)),
      ('comb', states.StateSpec.comb(8, 0.05)),
      ('truncated_comb', states.StateSpec.truncated_comb(8, 0.05, 0.2)),
      ('gkp', states.StateSpec.gkp_peakwise(0.1, 0.04)),
      ('gkp_pointwise', states.StateSpec.gkp_pointwise(0.1, 0.04)),
      ('gkp_truncated', states.StateSpec.gkp_truncated(0.1, 0.04, 0.2)),
      ('gkp_bounded', states.StateSpec.gkp_truncated_bounded(16, 0.1, 0.04,
                                                             0.2)),
      ('gkp_pointwise_bounded',
       states.StateSpec.gkp_pointwise_truncated_bounded(8, 0.2, 0.04, 0.2)),
      ('gkp_momentum', states.StateSpec.gkp_momentum_truncated(0.2, 0.05, 0.3)),
  )
  def testBuildStateIsNormalized(self, spec):
    state = states.build_state(spec)
    fresh = states.GaussianSum(state.amplitude, state.center,
                               state.inverse_variance, state.linear_phase,
                               state.lower, state.upper, state.domain)
    self.assertAlmostEqual(fresh.norm_sq(), 1.0, delta=1e-10)

  def testCombOfTwoPeaks(self):
    state = states.build_state(states.StateSpec.comb(2, 0.1))
    np.testing.assert_allclose(sorted(state.center), [-1.0, 0.0])
    self.assertAlmostEqual(state.amplitude[0], state.amplitude[1], places=14)

  def testUnitSqueezedVacuumIsVacuum(self):
    state = states.build_state(states.StateSpec.squeezed_vacuum(1.0))
    self.assertLen(state, 1)
    self.assertEqual(state.inverse_variance[0], 1.0)
    self.assertAlmostEqual(state.norm_sq(), 1.0, places=12)

  @parameterized.parameters(
      states.StateSpec.comb(3, 0.1),
      states.StateSpec.squeezed_vacuum(-1.0),
      states.StateSpec.truncated_gaussian(0.1, 0.5),
      states.StateSpec.gkp_peakwise(0.0, 0.1),
  )
  def testInvalidParameters(self, spec):
    with self.assertRaises(errors.ParameterError):
      states.build_state(spec)

  def testToleranceOutOfRange(self):
    with self.assertRaises(errors.ParameterError):
      states.build_state(states.StateSpec.vacuum(), tol=1e-3)


class MomentumTest(unittest.TestCase):

  def testPeakSpacing(self):
    state = states.momentum_rep(states.StateSpec.gkp_peakwise(0.2, 0.05))
    centers = np.sort(state.center)
    # Pointwise envelopes pull the peak centers slightly inward.
    spec = states.StateSpec.gkp_peakwise(0.2, 0.05)
    peaks = centers * (1 + spec.delta**2 * spec.kappa**2)
    np.testing.assert_allclose(np.diff(peaks), 2 * math.pi, rtol=1e-12)
    np.testing.assert_allclose(state.inverse_variance,
                               1 / 0.2**2 + 0.05**2, rtol=1e-12)

  def testMatchesFourierTransform(self):
    spec = states.StateSpec.gkp_peakwise(0.2, 0.05)
    analytic = states.build_state(spec).fourier()
    value = states.overlap(states.momentum_rep(spec), analytic)
    self.assertGreaterEqual(abs(value)**2, 1 - 1e-6)

  def testVacuumIsSelfDual(self):
    vacuum = states.build_state(states.StateSpec.vacuum())
    transformed = vacuum.fourier()
    self.assertEqual(transformed.domain, constants.Domain.MOMENTUM)
    p = np.linspace(-3, 3, 7)
    np.testing.assert_allclose(transformed(p), vacuum(p), atol=1e-14)


class ScalarTest(parameterized.TestCase):

  @parameterized.parameters((1.0, 0.0), (0.0, 2.0), (0.75, 1.0))
  def testPureTraceDistance(self, overlap_sq, expected):
    self.assertAlmostEqual(states.pure_trace_distance(overlap_sq), expected)

  def testPureTraceDistanceRejectsOutOfRange(self):
    with self.assertRaises(errors.NumericError):
      states.pure_trace_distance(1.1)

  def testTraceDistanceOfPureStates(self):
    a = _peak(0, 0.5)
    b = _peak(0.5, 0.5)
    fidelity = abs(states.overlap(a, b))**2
    self.assertAlmostEqual(
        states.trace_distance([a], [b]),
        states.pure_trace_distance(fidelity),
        places=10)

  def testTraceDistanceOfMixture(self):
    a = _peak(0, 0.5)
    b = _peak(5, 0.5)
    rho = [a.scaled(math.sqrt(0.7)), b.scaled(math.sqrt(0.3))]
    self.assertAlmostEqual(states.trace_distance(rho, [a]), 0.6, places=9)

  def testCenteredSeriesAtOne(self):
    series = states.gaussian_series(1.0)
    self.assertAlmostEqual(series.value, 1.772637, places=6)
    self.assertAlmostEqual(series.lower_bound, math.sqrt(math.pi) - 1)
    self.assertTrue(series.bracketed)

  def testCenteredSeriesLargeDecay(self):
    self.assertLess(abs(states.gaussian_series(100.0).value - 1), 1e-40)

  def testHalfShiftLowerBound(self):
    series = states.gaussian_series(0.25, constants.SeriesMode.HALF_SHIFT)
    self.assertGreaterEqual(series.value, math.sqrt(math.pi / 0.25) - 1)

  @settings(max_examples=50, deadline=None)
  @given(
      hyp_st.floats(min_value=-4, max_value=2),
      hyp_st.sampled_from(list(constants.SeriesMode)),
      hyp_st.floats(min_value=0.01, max_value=0.49))
  def testSeriesBracketing(self, log_c, mode, epsilon):
    series = states.gaussian_series(10**log_c, mode, epsilon)
    self.assertTrue(series.bracketed, series)

  def testSeriesRejectsNonPositiveDecay(self):
    with self.assertRaises(errors.ParameterError):
      states.gaussian_series(0.0)

  def testNormalizationSandwich(self):
    bounds = states.normalization_bounds(0.1, 0.05, 8)
    self.assertBetween(bounds.C_k_inv_sq, bounds.C_k_inv_sq_lb,
                       bounds.C_k_inv_sq_ub)
    self.assertLessEqual(bounds.ratio, 1.0)
    self.assertGreaterEqual(bounds.ratio, bounds.ratio_lb)
    self.assertLessEqual(bounds.C_kD_inv_sq, bounds.C_kD_inv_sq_ub)
    self.assertGreaterEqual(bounds.C_Lk_inv_sq, bounds.C_Lk_inv_sq_lb)

  def testNormalizationWideEnvelope(self):
    bounds = states.normalization_bounds(10.0, 0.05, 8)
    z = np.arange(-5, 6)
    direct = np.sum(10.0 / math.sqrt(math.pi) * np.exp(-100.0 * z**2))
    self.assertLess(abs(bounds.C_k_inv_sq - direct), 1e-6)

  def testConvolutionShiftIdentity(self):
    left = states.conv_quantities(3, 1.2, 0.1, 0.05, 0.2)
    right = states.conv_quantities(2, 0.2, 0.1, 0.05, 0.2)
    self.assertAlmostEqual(left.I_k, right.I_k, places=12)
    self.assertGreaterEqual(left.I_k, 0)

  def testConvolutionSumComparison(self):
    kappa, delta, epsilon, length = 0.1, 0.05, 0.2, 8
    ks = range(-length // 2, length // 2)
    values = [states.conv_quantities(k, 0.0, kappa, delta, epsilon)
              for k in ks]
    primed = sum(v.I_k_prime for v in values)
    plain = sum(v.I_k for v in values)
    self.assertGreaterEqual(primed, (1 - kappa**2 * epsilon * length / 2) *
                            plain)

  def testVacuumWindowMass(self):
    vacuum = states.build_state(states.StateSpec.vacuum())
    self.assertAlmostEqual(
        states.tail_mass(vacuum, 1.0), special.erf(1.0), places=10)
    self.assertAlmostEqual(
        states.tail_mass(vacuum, 1.0, constants.Domain.MOMENTUM),
        special.erf(1.0),
        places=10)

  def testCombWindowMassTendsToOne(self):
    comb = states.build_state(states.StateSpec.comb(8, 0.05))
    self.assertGreaterEqual(states.tail_mass(comb, 10 * (1 / 0.1 + 8)),
                            1 - 1e-8)

  def testGkpWindowMassBound(self):
    gkp = states.build_state(states.StateSpec.gkp_peakwise(0.1, 0.04))
    bound = 4 * 0.1 * 2 + 5 * math.sqrt(0.1) + 7 * math.sqrt(0.04)
    self.assertLessEqual(states.tail_mass(gkp, 2.0), bound)

  def testWindowMassOfTruncatedStateInMomentum(self):
    state = states.build_state(states.StateSpec.truncated_gaussian(0.1, 0.2))
    with self.assertRaises(errors.CapabilityError):
      states.tail_mass(state, 1.0, constants.Domain.MOMENTUM)


if __name__ == '__main__':
  unittest.main()
