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
"""Analytic wavefunctions built from sums of Gaussian terms.

Every state used by the preparation protocols (vacuum, squeezed vacua, comb
states, GKP states and their truncated variants) is a finite sum of terms

  c * exp(-a (x - mu)^2 / 2 + i b x) * 1[lo <= x <= hi]

and the sums are closed under translations, momentum kicks, squeezing,
reflection, pointwise products and, for untruncated sums, the Fourier
transform. Overlaps are computed in closed form whenever the truncation
windows do not matter and by adaptive quadrature otherwise.

Typical usage example:

  gkp = states.build_state(states.StateSpec.gkp_peakwise(0.2, 0.05))
  value = states.overlap(gkp, gkp)
"""

import dataclasses
import math
from typing import List, Optional, Sequence, Tuple

from absl import logging
import numpy as np
from scipy import integrate
from scipy import special

from gkp_prep_tool import constants
from gkp_prep_tool import errors

_SQRT_PI = math.sqrt(math.pi)
_TWO_PI = 2 * math.pi
# exp(-_EXP_CUTOFF) is below every tolerance used in the tool.
_EXP_CUTOFF = 745.0
# Integrand support used when an integration window is unbounded.
_SUPPORT_SIGMAS = 40.0
# Largest imaginary erf shift evaluated in closed form.
_ERF_SHIFT_LIMIT = 3.0
# Grid points times terms evaluated per chunk.
_EVAL_CHUNK = 1 << 22


@dataclasses.dataclass(frozen=True)
class GaussianTerm:
  """One Gaussian term with a linear phase and an optional window.

  Attributes:
    amplitude: complex prefactor c.
    center: position of the peak mu.
    inverse_variance: a > 0, the width is 1/sqrt(a).
    linear_phase: b, multiplies i x in the exponent.
    truncation: optional (lo, hi) window outside which the term vanishes.
  """
  amplitude: complex
  center: float
  inverse_variance: float
  linear_phase: float = 0.0
  truncation: Optional[Tuple[float, float]] = None

  def __post_init__(self):
    if not self.inverse_variance > 0 or not math.isfinite(
        self.inverse_variance):
      raise errors.ParameterError(
          'inverse variance must be positive, got %r' % self.inverse_variance)
    if self.truncation is not None and not (
        self.truncation[0] < self.truncation[1]):
      raise errors.ParameterError(
          'empty truncation window %r' % (self.truncation,))

  def __call__(self, x):
    x = np.asarray(x, dtype=float)
    value = self.amplitude * np.exp(
        -self.inverse_variance * (x - self.center)**2 / 2 +
        1j * self.linear_phase * x)
    if self.truncation is not None:
      lo, hi = self.truncation
      value = np.where((x >= lo) & (x <= hi), value, 0)
    return value


class GaussianSum:
  """Single-mode wavefunction stored as parallel arrays of term parameters.

  Attributes:
    amplitude: complex array of prefactors.
    center: real array of peak positions.
    inverse_variance: positive real array.
    linear_phase: real array.
    lower: window lower ends, -inf for untruncated terms.
    upper: window upper ends, +inf for untruncated terms.
    domain: quadrature the wavefunction is written in.
  """

  modes = 1

  def __init__(self,
               amplitude,
               center,
               inverse_variance,
               linear_phase=None,
               lower=None,
               upper=None,
               domain=constants.Domain.POSITION):
    self.amplitude = np.atleast_1d(np.asarray(amplitude, dtype=complex))
    n = self.amplitude.shape[0]
    self.center = _broadcast(center, n)
    self.inverse_variance = _broadcast(inverse_variance, n)
    self.linear_phase = _broadcast(
        0.0 if linear_phase is None else linear_phase, n)
    self.lower = _broadcast(-np.inf if lower is None else lower, n)
    self.upper = _broadcast(np.inf if upper is None else upper, n)
    self.domain = domain
    if np.any(~(self.inverse_variance > 0)) or np.any(
        ~np.isfinite(self.inverse_variance)):
      raise errors.ParameterError('inverse variances must be positive')
    if np.any(~np.isfinite(self.center)):
      raise errors.ParameterError('term centers must be finite')
    if np.any(~(self.lower < self.upper)):
      raise errors.ParameterError('empty truncation window')
    for array in (self.amplitude, self.center, self.inverse_variance,
                  self.linear_phase, self.lower, self.upper):
      array.setflags(write=False)
    self._norm_sq = None

  @classmethod
  def from_terms(cls, terms, domain=constants.Domain.POSITION):
    """Builds a sum from a sequence of GaussianTerm objects."""
    terms = list(terms)
    windows = [t.truncation or (-np.inf, np.inf) for t in terms]
    return cls([t.amplitude for t in terms], [t.center for t in terms],
               [t.inverse_variance for t in terms],
               [t.linear_phase for t in terms], [w[0] for w in windows],
               [w[1] for w in windows], domain)

  @classmethod
  def empty(cls, domain=constants.Domain.POSITION):
    return cls(np.zeros(0, dtype=complex), [], [], [], [], [], domain)

  def __len__(self):
    return self.amplitude.shape[0]

  def __repr__(self):
    return 'GaussianSum(terms=%d, domain=%s, truncated=%s)' % (
        len(self), self.domain.value, self.truncated)

  @property
  def truncated(self):
    return bool(np.any(np.isfinite(self.lower)) or
                np.any(np.isfinite(self.upper)))

  @property
  def terms(self) -> List[GaussianTerm]:
    result = []
    for i in range(len(self)):
      window = None
      if np.isfinite(self.lower[i]) or np.isfinite(self.upper[i]):
        window = (float(self.lower[i]), float(self.upper[i]))
      result.append(
          GaussianTerm(
              complex(self.amplitude[i]), float(self.center[i]),
              float(self.inverse_variance[i]), float(self.linear_phase[i]),
              window))
    return result

  def replace(self, **changes):
    fields = dict(
        amplitude=self.amplitude,
        center=self.center,
        inverse_variance=self.inverse_variance,
        linear_phase=self.linear_phase,
        lower=self.lower,
        upper=self.upper,
        domain=self.domain)
    fields.update(changes)
    return GaussianSum(**fields)

  def take(self, indices):
    """Returns the sum restricted to the given term indices."""
    return self.replace(
        amplitude=self.amplitude[indices],
        center=self.center[indices],
        inverse_variance=self.inverse_variance[indices],
        linear_phase=self.linear_phase[indices],
        lower=self.lower[indices],
        upper=self.upper[indices])

  def __call__(self, x):
    x = np.asarray(x, dtype=float)
    flat = x.reshape(-1)
    out = np.zeros(flat.shape, dtype=complex)
    if len(self):
      chunk = max(1, _EVAL_CHUNK // len(self))
      for start in range(0, flat.size, chunk):
        xs = flat[start:start + chunk][None, :]
        exponent = (-self.inverse_variance[:, None] *
                    (xs - self.center[:, None])**2 / 2 +
                    1j * self.linear_phase[:, None] * xs)
        inside = (xs >= self.lower[:, None]) & (xs <= self.upper[:, None])
        values = self.amplitude[:, None] * np.exp(
            np.where(inside, exponent, -np.inf))
        out[start:start + chunk] = values.sum(axis=0)
    return out.reshape(x.shape)

  def norm_sq(self) -> float:
    if self._norm_sq is None:
      self._norm_sq = float(np.real(overlap(self, self)))
    return self._norm_sq

  def normalized(self):
    norm_sq = self.norm_sq()
    if not norm_sq > 0:
      raise errors.NumericError('cannot normalize a zero wavefunction')
    result = self.scaled(1 / math.sqrt(norm_sq))
    result._norm_sq = 1.0
    return result

  def scaled(self, factor):
    return self.replace(amplitude=self.amplitude * factor)

  def __add__(self, other):
    if not isinstance(other, GaussianSum) or other.domain != self.domain:
      raise errors.UsageError('can only add sums in the same representation')
    return GaussianSum(
        np.concatenate([self.amplitude, other.amplitude]),
        np.concatenate([self.center, other.center]),
        np.concatenate([self.inverse_variance, other.inverse_variance]),
        np.concatenate([self.linear_phase, other.linear_phase]),
        np.concatenate([self.lower, other.lower]),
        np.concatenate([self.upper, other.upper]), self.domain)

  def translated(self, shift):
    """Returns x -> psi(x - shift)."""
    return self.replace(
        amplitude=self.amplitude * np.exp(-1j * self.linear_phase * shift),
        center=self.center + shift,
        lower=self.lower + shift,
        upper=self.upper + shift)

  def kicked(self, momentum):
    """Returns x -> exp(i momentum x) psi(x)."""
    return self.replace(linear_phase=self.linear_phase + momentum)

  def squeezed(self, z):
    """Returns x -> exp(z/2) psi(exp(z) x)."""
    scale = math.exp(-z)
    return self.replace(
        amplitude=self.amplitude * math.exp(z / 2),
        center=self.center * scale,
        inverse_variance=self.inverse_variance * math.exp(2 * z),
        linear_phase=self.linear_phase / scale,
        lower=self.lower * scale,
        upper=self.upper * scale)

  def reflected(self):
    """Returns x -> psi(-x)."""
    return self.replace(
        center=-self.center,
        linear_phase=-self.linear_phase,
        lower=-self.upper,
        upper=-self.lower)

  def conjugated(self):
    return self.replace(
        amplitude=np.conj(self.amplitude), linear_phase=-self.linear_phase)

  def restricted(self, lo, hi):
    """Multiplies by the indicator of [lo, hi]; empty terms are dropped."""
    lower = np.maximum(self.lower, lo)
    upper = np.minimum(self.upper, hi)
    keep = lower < upper
    return self.replace(lower=lower, upper=upper).take(np.flatnonzero(keep))

  def multiplied(self, other):
    """Pointwise product, one term per pair of terms."""
    i, j = np.meshgrid(
        np.arange(len(self)), np.arange(len(other)), indexing='ij')
    return elementwise_product(self.take(i.ravel()), other.take(j.ravel()))

  def fourier(self):
    """Exact Fourier transform of an untruncated sum.

    Position sums map to momentum sums with the convention
    psi_hat(p) = (2 pi)^(-1/2) int psi(x) exp(-i p x) dx, and momentum sums
    map back with the inverse transform.

    Returns:
      GaussianSum in the other representation.

    Raises:
      CapabilityError: if any term is truncated.
    """
    if self.truncated:
      raise errors.CapabilityError('truncated sums have no closed-form '
                                   'Fourier transform')
    a = self.inverse_variance
    amplitude = (self.amplitude * np.exp(1j * self.linear_phase * self.center)
                 / np.sqrt(a))
    if self.domain == constants.Domain.POSITION:
      return GaussianSum(amplitude, self.linear_phase, 1 / a, -self.center,
                         domain=constants.Domain.MOMENTUM)
    return GaussianSum(amplitude, -self.linear_phase, 1 / a, self.center,
                       domain=constants.Domain.POSITION)

  def merged(self, decimals=12):
    """Sums the amplitudes of terms with identical shape parameters."""
    if not len(self):
      return self
    keys = np.stack([
        self.center, self.inverse_variance, self.linear_phase,
        np.nan_to_num(self.lower, neginf=-1e300),
        np.nan_to_num(self.upper, posinf=1e300)
    ], axis=1)
    scale = np.maximum(np.abs(keys), 1.0)
    rounded = np.round(keys / scale, decimals) * scale
    _, first, inverse = np.unique(
        rounded, axis=0, return_index=True, return_inverse=True)
    amplitude = np.zeros(first.shape[0], dtype=complex)
    np.add.at(amplitude, inverse.reshape(-1), self.amplitude)
    return self.take(first).replace(amplitude=amplitude)

  def pruned(self, weight=constants.PRUNE_WEIGHT):
    """Drops terms whose squared weight is below the given threshold."""
    mass = np.abs(self.amplitude)**2 * np.sqrt(np.pi / self.inverse_variance)
    return self.take(np.flatnonzero(mass >= weight))


class TwoModeGaussianSum:
  """Two-mode wavefunction as a sum of sheared product terms.

  Term i evaluates to amplitude[i] * first_i(x0 - shear[i] * x1) *
  second_i(x1), where first and second are single-mode sums with unit
  amplitudes.

  Attributes:
    amplitude: complex prefactors.
    first: GaussianSum of the first factors, one term per product term.
    second: GaussianSum of the second factors.
    shear: real array of shear coefficients.
  """

  modes = 2

  def __init__(self, amplitude, first, second, shear=None):
    self.amplitude = np.atleast_1d(np.asarray(amplitude, dtype=complex))
    n = self.amplitude.shape[0]
    if len(first) != n or len(second) != n:
      raise errors.UsageError('factor lengths do not match amplitudes')
    self.first = first
    self.second = second
    self.shear = _broadcast(0.0 if shear is None else shear, n)
    self._norm_sq = None

  @classmethod
  def product(cls, a, b):
    """Tensor product of two single-mode sums."""
    i, j = np.meshgrid(np.arange(len(a)), np.arange(len(b)), indexing='ij')
    i, j = i.ravel(), j.ravel()
    first = a.take(i)
    second = b.take(j)
    amplitude = first.amplitude * second.amplitude
    ones = np.ones(i.shape[0], dtype=complex)
    return cls(amplitude, first.replace(amplitude=ones),
               second.replace(amplitude=ones))

  def __len__(self):
    return self.amplitude.shape[0]

  def __repr__(self):
    return 'TwoModeGaussianSum(terms=%d)' % len(self)

  def replace(self, amplitude=None, first=None, second=None, shear=None):
    return TwoModeGaussianSum(
        self.amplitude if amplitude is None else amplitude,
        self.first if first is None else first,
        self.second if second is None else second,
        self.shear if shear is None else shear)

  def take(self, indices):
    return TwoModeGaussianSum(self.amplitude[indices],
                              self.first.take(indices),
                              self.second.take(indices), self.shear[indices])

  def __call__(self, x0, x1):
    x0 = np.asarray(x0, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    x0, x1 = np.broadcast_arrays(x0, x1)
    out = np.zeros(x0.shape, dtype=complex)
    for i in range(len(self)):
      f = self.first.take([i])
      g = self.second.take([i])
      out += self.amplitude[i] * f(x0 - self.shear[i] * x1) * g(x1)
    return out

  def __add__(self, other):
    return TwoModeGaussianSum(
        np.concatenate([self.amplitude, other.amplitude]),
        self.first + other.first, self.second + other.second,
        np.concatenate([self.shear, other.shear]))

  def scaled(self, factor):
    return self.replace(amplitude=self.amplitude * factor)

  def norm_sq(self) -> float:
    if self._norm_sq is None:
      self._norm_sq = float(np.real(overlap(self, self)))
    return self._norm_sq

  def slice(self, x0):
    """Returns the unnormalized single-mode function x1 -> psi(x0, x1)."""
    s = self.shear
    f = self.first
    moving = s != 0
    amplitude = self.amplitude.copy()
    # Factors that do not depend on x1 collapse to their value at x0.
    if np.any(~moving):
      idx = np.flatnonzero(~moving)
      values = np.array([f.take([k])(x0) for k in idx]).reshape(-1)
      amplitude[idx] *= values
    safe = np.where(moving, s, 1.0)
    lo = (x0 - f.upper) / safe
    hi = (x0 - f.lower) / safe
    flipped = safe < 0
    factor = GaussianSum(
        np.where(moving, np.exp(1j * f.linear_phase * x0), 1.0),
        np.where(moving, (x0 - f.center) / safe, 0.0),
        np.where(moving, f.inverse_variance * safe**2, 1e-300),
        np.where(moving, -f.linear_phase * safe, 0.0),
        np.where(moving, np.where(flipped, hi, lo), -np.inf),
        np.where(moving, np.where(flipped, lo, hi), np.inf))
    product = elementwise_product(factor, self.second, amplitude)
    return product


def _broadcast(values, n):
  array = np.asarray(values, dtype=float)
  if array.ndim == 0:
    array = np.full(n, float(array))
  return np.array(array, dtype=float)


def elementwise_product(f, g, amplitude=None):
  """Product of term i of f with term i of g for every i.

  Args:
    f: GaussianSum.
    g: GaussianSum with the same number of terms.
    amplitude: optional extra complex factor per term.

  Returns:
    GaussianSum with one term per surviving pair; pairs with disjoint
    windows are dropped.
  """
  a1, a2 = f.inverse_variance, g.inverse_variance
  total = a1 + a2
  center = (a1 * f.center + a2 * g.center) / total
  weight = f.amplitude * g.amplitude * np.exp(
      -a1 * a2 * (f.center - g.center)**2 / (2 * total))
  if amplitude is not None:
    weight = weight * amplitude
  lower = np.maximum(f.lower, g.lower)
  upper = np.minimum(f.upper, g.upper)
  keep = np.flatnonzero(lower < upper)
  return GaussianSum(weight[keep], center[keep], total[keep],
                     (f.linear_phase + g.linear_phase)[keep], lower[keep],
                     upper[keep], f.domain)


def _window_integral(total, center, dphase, lo, hi):
  """int_lo^hi exp(-total (x - center)^2 / 2 + i dphase x) dx."""
  sigma = 1 / math.sqrt(total)
  lo = max(lo, center - _SUPPORT_SIGMAS * sigma)
  hi = min(hi, center + _SUPPORT_SIGMAS * sigma)
  if not lo < hi:
    return 0j
  # Completing the square shifts the erf arguments by -i dphase / sqrt(2 total);
  # the erf difference loses exp(shift^2) in relative precision.
  shift = dphase / math.sqrt(2 * total)
  if abs(shift) <= _ERF_SHIFT_LIMIT:
    scale = math.sqrt(total / 2)
    u = scale * (lo - center) - 1j * shift
    v = scale * (hi - center) - 1j * shift
    if u.real > 0:
      mass = special.erfc(u) - special.erfc(v)
    elif v.real < 0:
      mass = special.erfc(-v) - special.erfc(-u)
    else:
      mass = special.erf(v) - special.erf(u)
    prefactor = np.exp(1j * dphase * center - shift**2)
    return complex(
        math.sqrt(math.pi / (2 * total)) * prefactor * mass)

  def envelope(x):
    return math.exp(-total * (x - center)**2 / 2)

  points = [center] if lo < center < hi else None
  options = dict(
      epsabs=constants.QUAD_EPSABS,
      epsrel=constants.QUAD_EPSREL,
      limit=constants.QUAD_LIMIT,
      points=points)
  real, _ = integrate.quad(
      lambda x: envelope(x) * math.cos(dphase * x), lo, hi, **options)
  imag, _ = integrate.quad(
      lambda x: envelope(x) * math.sin(dphase * x), lo, hi, **options)
  return complex(real, imag)


def pair_overlaps(a: GaussianSum, b: GaussianSum) -> np.ndarray:
  """Matrix of term overlaps <a_i, b_j> including amplitudes."""
  ai = a.inverse_variance[:, None]
  aj = b.inverse_variance[None, :]
  mi = a.center[:, None]
  mj = b.center[None, :]
  dphase = b.linear_phase[None, :] - a.linear_phase[:, None]
  total = ai + aj
  log_shape = -ai * aj * (mi - mj)**2 / (2 * total)
  log_mag = log_shape - dphase**2 / (2 * total)
  phase = (ai * mi + aj * mj) * dphase / total
  weights = np.conj(a.amplitude)[:, None] * b.amplitude[None, :]
  closed = weights * np.sqrt(2 * np.pi / total) * np.exp(log_mag + 1j * phase)
  if not (a.truncated or b.truncated):
    return closed
  lower = np.maximum(a.lower[:, None], b.lower[None, :])
  upper = np.minimum(a.upper[:, None], b.upper[None, :])
  center = (ai * mi + aj * mj) / total
  sigma = 1 / np.sqrt(total)
  covered = ((lower <= center - constants.COVERAGE_SIGMAS * sigma) &
             (upper >= center + constants.COVERAGE_SIGMAS * sigma))
  result = np.where(covered, closed, 0)
  magnitude = np.abs(weights) * np.sqrt(2 * np.pi / total) * np.exp(log_shape)
  partial = (~covered & (lower < upper) &
             (magnitude >= constants.NEGLIGIBLE_PAIR))
  for i, j in zip(*np.nonzero(partial)):
    value = _window_integral(total[i, j], center[i, j], dphase[i, j],
                             lower[i, j], upper[i, j])
    result[i, j] = weights[i, j] * np.exp(log_shape[i, j]) * value
  return result


def _two_mode_overlap(a, b):
  value = 0j
  same = np.isclose(a.shear[:, None], b.shear[None, :], rtol=0, atol=1e-14)
  factors = pair_overlaps(a.first, b.first) * pair_overlaps(a.second, b.second)
  weights = np.conj(a.amplitude)[:, None] * b.amplitude[None, :]
  value += np.sum(np.where(same, weights * factors, 0))
  for i, j in zip(*np.nonzero(~same)):
    fi, fj = a.first.take([i]), b.first.take([j])
    if fi.truncated or fj.truncated:
      raise errors.CapabilityError('overlap of truncated factors with '
                                   'different shears is not supported')
    gi, gj = a.second.take([i]), b.second.take([j])
    si, sj = a.shear[i], b.shear[j]

    def integrand(y, part):
      inner = np.sum(pair_overlaps(fi.translated(si * y), fj.translated(sj * y)))
      outer = np.conj(gi(y)) * gj(y) * inner
      return outer.real if part == 0 else outer.imag

    lo = max(gi.lower[0], gj.lower[0])
    hi = min(gi.upper[0], gj.upper[0])
    width = 1 / math.sqrt(min(gi.inverse_variance[0], gj.inverse_variance[0]))
    mid = (gi.center[0] + gj.center[0]) / 2
    lo = max(lo, mid - _SUPPORT_SIGMAS * width)
    hi = min(hi, mid + _SUPPORT_SIGMAS * width)
    if not lo < hi:
      continue
    real, _ = integrate.quad(integrand, lo, hi, args=(0,),
                             limit=constants.QUAD_LIMIT)
    imag, _ = integrate.quad(integrand, lo, hi, args=(1,),
                             limit=constants.QUAD_LIMIT)
    value += weights[i, j] * complex(real, imag)
  return complex(value)


def overlap(a, b) -> complex:
  """Inner product <a, b>, antilinear in a.

  Args:
    a: GaussianSum or TwoModeGaussianSum.
    b: state with the same mode count and representation.

  Returns:
    The complex overlap.

  Raises:
    UsageError: on mode or representation mismatch.
  """
  if a.modes != b.modes:
    raise errors.UsageError('overlap of %d-mode and %d-mode states' %
                            (a.modes, b.modes))
  if a.modes == 2:
    return _two_mode_overlap(a, b)
  if a.domain != b.domain:
    raise errors.UsageError('overlap of states in different representations')
  if not len(a) or not len(b):
    return 0j
  return complex(np.sum(pair_overlaps(a, b)))


def eval_amplitude(state, point) -> complex:
  """Evaluates the wavefunction at a single point."""
  point = np.atleast_1d(np.asarray(point, dtype=float))
  if point.shape != (state.modes,):
    raise errors.UsageError('expected a %d-dimensional point, got shape %r' %
                            (state.modes, point.shape))
  if state.modes == 1:
    return complex(state(point)[0])
  return complex(state(point[0], point[1]))


def pure_trace_distance(overlap_mag_sq: float) -> float:
  """Trace distance 2 sqrt(1 - |<a,b>|^2) of two pure states."""
  if overlap_mag_sq < -1e-12 or overlap_mag_sq > 1 + 1e-12:
    raise errors.NumericError('squared overlap %r outside [0, 1]' %
                              overlap_mag_sq)
  return 2 * math.sqrt(1 - min(max(overlap_mag_sq, 0.0), 1.0))


def trace_distance(rho: Sequence[GaussianSum],
                   sigma: Sequence[GaussianSum]) -> float:
  """Trace norm of rho - sigma for low-rank states given by branch vectors.

  Each state is sum_b |v_b><v_b| for its (unnormalized) branch vectors. The
  nonzero spectrum of the difference equals the spectrum of
  G^(1/2) S G^(1/2), with G the Gram matrix of all branch vectors and S the
  diagonal of +1 / -1 signs.

  Args:
    rho: branch vectors of the first state.
    sigma: branch vectors of the second state.

  Returns:
    ||rho - sigma||_1.
  """
  vectors = list(rho) + list(sigma)
  signs = np.array([1.0] * len(rho) + [-1.0] * len(sigma))
  gram = np.array([[overlap(u, v) for v in vectors] for u in vectors])
  gram = (gram + gram.conj().T) / 2
  eigvals, eigvecs = np.linalg.eigh(gram)
  root = (eigvecs * np.sqrt(np.clip(eigvals, 0, None))) @ eigvecs.conj().T
  spectrum = np.linalg.eigvalsh(root @ np.diag(signs) @ root)
  return float(np.sum(np.abs(spectrum)))


@dataclasses.dataclass(frozen=True)
class StateSpec:
  """Parameters of an analytic state family.

  Attributes:
    kind: the StateKind.
    kappa: envelope parameter.
    delta: peak width.
    epsilon: truncation half-width.
    length: number of peaks of a bounded comb.
    displacement: phase-space displacement of a coherent state.
  """
  kind: constants.StateKind
  kappa: Optional[float] = None
  delta: Optional[float] = None
  epsilon: Optional[float] = None
  length: Optional[int] = None
  displacement: Optional[Tuple[float, float]] = None

  @classmethod
  def vacuum(cls):
    return cls(constants.StateKind.VACUUM)

  @classmethod
  def coherent(cls, dq, dp):
    return cls(constants.StateKind.COHERENT, displacement=(dq, dp))

  @classmethod
  def squeezed_vacuum(cls, delta):
    return cls(constants.StateKind.SQUEEZED_VACUUM, delta=delta)

  @classmethod
  def truncated_gaussian(cls, delta, epsilon):
    return cls(
        constants.StateKind.TRUNCATED_GAUSSIAN, delta=delta, epsilon=epsilon)

  @classmethod
  def comb(cls, length, delta):
    return cls(constants.StateKind.COMB, delta=delta, length=length)

  @classmethod
  def truncated_comb(cls, length, delta, epsilon):
    return cls(
        constants.StateKind.TRUNCATED_COMB,
        delta=delta,
        epsilon=epsilon,
        length=length)

  @classmethod
  def gkp_peakwise(cls, kappa, delta):
    return cls(constants.StateKind.GKP_PEAKWISE, kappa=kappa, delta=delta)

  @classmethod
  def gkp_pointwise(cls, kappa, delta):
    return cls(constants.StateKind.GKP_POINTWISE, kappa=kappa, delta=delta)

  @classmethod
  def gkp_truncated(cls, kappa, delta, epsilon):
    return cls(
        constants.StateKind.GKP_TRUNCATED,
        kappa=kappa,
        delta=delta,
        epsilon=epsilon)

  @classmethod
  def gkp_truncated_bounded(cls, length, kappa, delta, epsilon):
    return cls(
        constants.StateKind.GKP_TRUNCATED_BOUNDED,
        kappa=kappa,
        delta=delta,
        epsilon=epsilon,
        length=length)

  @classmethod
  def gkp_pointwise_truncated_bounded(cls, length, kappa, delta, epsilon):
    return cls(
        constants.StateKind.GKP_POINTWISE_TRUNCATED_BOUNDED,
        kappa=kappa,
        delta=delta,
        epsilon=epsilon,
        length=length)

  @classmethod
  def gkp_momentum_truncated(cls, kappa, delta, epsilon):
    return cls(
        constants.StateKind.GKP_MOMENTUM_TRUNCATED,
        kappa=kappa,
        delta=delta,
        epsilon=epsilon)

  def validate(self):
    """Raises ParameterError if the parameters are out of range."""
    needs = _REQUIRED_FIELDS[self.kind]
    for name in needs:
      if getattr(self, name) is None:
        raise errors.ParameterError('%s requires %s' % (self.kind.value, name))
    for name in ('kappa', 'delta'):
      value = getattr(self, name)
      if name in needs and not (value > 0 and math.isfinite(value)):
        raise errors.ParameterError('%s must be positive, got %r' %
                                    (name, value))
    if 'epsilon' in needs and not 0 < self.epsilon < 0.5:
      raise errors.ParameterError('epsilon must lie in (0, 1/2), got %r' %
                                  self.epsilon)
    if 'length' in needs and (self.length <= 0 or self.length % 2 or
                              int(self.length) != self.length):
      raise errors.ParameterError('length must be an even positive integer, '
                                  'got %r' % self.length)

  def describe(self):
    fields = {
        k: v for k, v in dataclasses.asdict(self).items()
        if v is not None and k != 'kind'
    }
    return dict(kind=self.kind.value, **fields)


_REQUIRED_FIELDS = {
    constants.StateKind.VACUUM: (),
    constants.StateKind.COHERENT: ('displacement',),
    constants.StateKind.SQUEEZED_VACUUM: ('delta',),
    constants.StateKind.TRUNCATED_GAUSSIAN: ('delta', 'epsilon'),
    constants.StateKind.COMB: ('length', 'delta'),
    constants.StateKind.TRUNCATED_COMB: ('length', 'delta', 'epsilon'),
    constants.StateKind.GKP_PEAKWISE: ('kappa', 'delta'),
    constants.StateKind.GKP_POINTWISE: ('kappa', 'delta'),
    constants.StateKind.GKP_TRUNCATED: ('kappa', 'delta', 'epsilon'),
    constants.StateKind.GKP_TRUNCATED_BOUNDED:
        ('length', 'kappa', 'delta', 'epsilon'),
    constants.StateKind.GKP_POINTWISE_TRUNCATED_BOUNDED:
        ('length', 'kappa', 'delta', 'epsilon'),
    constants.StateKind.GKP_MOMENTUM_TRUNCATED: ('kappa', 'delta', 'epsilon'),
}


def envelope(kappa, x):
  """The Gaussian envelope eta_kappa(x)."""
  return math.sqrt(kappa) / _SQRT_PI**0.5 * np.exp(-kappa**2 *
                                                   np.asarray(x)**2 / 2)


def peak_range(scale: float, tol: float) -> int:
  """Smallest Z such that peaks |z| > Z carry less than tol of the weight.

  The weights are exp(-scale^2 z^2), relative to their total over all z.

  Args:
    scale: decay rate of the envelope per peak index.
    tol: discarded relative weight.

  Returns:
    The largest peak index kept.
  """
  cutoff = int(math.ceil(math.sqrt(math.log(1e3 / tol)) / scale)) + 2
  z = np.arange(cutoff + 1)
  weights = np.exp(-(scale * z)**2)
  total = weights[0] + 2 * np.sum(weights[1:])
  # tail[k] = 2 * sum_{z > k} weights[z].
  tail = 2 * (np.cumsum(weights[::-1])[::-1] - weights)
  return int(np.flatnonzero(tail / total < tol)[0])


def _peak_amplitude(delta, epsilon=None):
  amplitude = (math.pi * delta**2)**-0.25
  if epsilon is not None:
    amplitude /= math.sqrt(special.erf(epsilon / delta))
  return amplitude


def _peak_train(z, delta, weights, epsilon=None, envelope_kappa=None,
                domain=constants.Domain.POSITION):
  """Sum over z of weights[z] times peaks of width delta centered at z.

  With envelope_kappa set, each peak is multiplied pointwise by
  eta_kappa(x) instead of being weighted by a constant.
  """
  z = np.asarray(z, dtype=float)
  amplitude = np.asarray(weights, dtype=complex) * _peak_amplitude(
      delta, epsilon)
  a = np.full(z.shape, delta**-2)
  center = z
  if envelope_kappa is not None:
    k2 = envelope_kappa**2
    total = a + k2
    amplitude = amplitude * (math.sqrt(envelope_kappa) / _SQRT_PI**0.5 *
                             np.exp(-a * k2 * z**2 / (2 * total)))
    center = a * z / total
    a = total
  lower = upper = None
  if epsilon is not None:
    lower, upper = z - epsilon, z + epsilon
  return GaussianSum(amplitude, center, a, 0.0, lower, upper, domain)


def build_state(spec: StateSpec, tol: float = constants.DEFAULT_TOL):
  """Builds the normalized analytic wavefunction of a state family.

  Args:
    spec: StateSpec of the family and its parameters.
    tol: discarded envelope weight when truncating infinite peak sums.

  Returns:
    Normalized GaussianSum.

  Raises:
    ParameterError: if the parameters or the tolerance are out of range.
  """
  spec.validate()
  if not 0 < tol <= constants.MAX_TOL:
    raise errors.ParameterError('tol must lie in (0, %g], got %r' %
                                (constants.MAX_TOL, tol))
  kind = constants.StateKind
  k, d, e, n = spec.kappa, spec.delta, spec.epsilon, spec.length
  if spec.kind == kind.VACUUM:
    state = GaussianSum([_peak_amplitude(1.0)], [0.0], [1.0])
  elif spec.kind == kind.COHERENT:
    dq, dp = spec.displacement
    state = GaussianSum([_peak_amplitude(1.0) * np.exp(-0.5j * dq * dp)],
                        [dq], [1.0], [dp])
  elif spec.kind == kind.SQUEEZED_VACUUM:
    state = _peak_train([0], d, [1.0])
  elif spec.kind == kind.TRUNCATED_GAUSSIAN:
    state = _peak_train([0], d, [1.0], epsilon=e)
  elif spec.kind in (kind.COMB, kind.TRUNCATED_COMB):
    z = np.arange(-n // 2, n // 2)
    state = _peak_train(z, d, np.ones(z.shape), epsilon=e)
  elif spec.kind in (kind.GKP_PEAKWISE, kind.GKP_POINTWISE,
                     kind.GKP_TRUNCATED):
    z_max = peak_range(k, tol)
    z = np.arange(-z_max, z_max + 1)
    if spec.kind == kind.GKP_POINTWISE:
      state = _peak_train(z, d, np.ones(z.shape), envelope_kappa=k)
    else:
      state = _peak_train(z, d, envelope(k, z), epsilon=e)
  elif spec.kind == kind.GKP_TRUNCATED_BOUNDED:
    z = np.arange(-n // 2, n // 2)
    state = _peak_train(z, d, envelope(k, z), epsilon=e)
  elif spec.kind == kind.GKP_POINTWISE_TRUNCATED_BOUNDED:
    z = np.arange(-n // 2, n // 2)
    state = _peak_train(z, d, np.ones(z.shape), epsilon=e, envelope_kappa=k)
  elif spec.kind == kind.GKP_MOMENTUM_TRUNCATED:
    # Momentum peaks of width kappa at 2 pi z under the pointwise envelope
    # eta_delta(p).
    z_max = peak_range(_TWO_PI * d, tol)
    z = np.arange(-z_max, z_max + 1)
    state = _peak_train(
        _TWO_PI * z,
        k,
        np.ones(z.shape),
        epsilon=e,
        envelope_kappa=d,
        domain=constants.Domain.MOMENTUM)
  else:
    raise errors.ParameterError('unknown state kind %r' % (spec.kind,))
  logging.debug('built %s with %d terms', spec.kind.value, len(state))
  return state.normalized()


def momentum_rep(spec: StateSpec, tol: float = constants.DEFAULT_TOL):
  """Momentum wavefunction of a peak-wise GKP state.

  By Poisson summation the Fourier transform of GKP_{kappa,Delta} is
  proportional to eta_Delta(p) sum_k Psi_kappa(p - 2 pi k).

  Args:
    spec: a GKP_PEAKWISE StateSpec.
    tol: discarded envelope weight.

  Returns:
    Normalized GaussianSum in the momentum representation.
  """
  if spec.kind != constants.StateKind.GKP_PEAKWISE:
    raise errors.ParameterError('momentum_rep needs a peak-wise GKP spec')
  spec.validate()
  if not 0 < tol <= constants.MAX_TOL:
    raise errors.ParameterError('tol must lie in (0, %g], got %r' %
                                (constants.MAX_TOL, tol))
  z_max = peak_range(_TWO_PI * spec.delta, tol)
  z = np.arange(-z_max, z_max + 1)
  state = _peak_train(
      _TWO_PI * z,
      spec.kappa,
      np.ones(z.shape),
      envelope_kappa=spec.delta,
      domain=constants.Domain.MOMENTUM)
  return state.normalized()


@dataclasses.dataclass(frozen=True)
class SeriesValue:
  value: float
  lower_bound: float
  upper_bound: float

  @property
  def bracketed(self):
    return self.lower_bound <= self.value <= self.upper_bound


def gaussian_series(c: float,
                    mode: constants.SeriesMode = constants.SeriesMode.CENTERED,
                    epsilon: Optional[float] = None) -> SeriesValue:
  """Sums a one-dimensional Gaussian series and its bracketing bounds.

  Args:
    c: decay rate, the terms are exp(-c * arg^2).
    mode: which arguments are summed. CENTERED uses z, HALF_SHIFT z - 1/2,
      ABS_PLUS_EPS |z| + epsilon and ABS_MINUS_EPS_NONZERO |z| - epsilon over
      z != 0.
    epsilon: shift for the two epsilon modes, in (0, 1/2).

  Returns:
    SeriesValue with the sum and its lower and upper bounds; a side that is
    not asserted is reported as an infinite bound.
  """
  if not c > 0:
    raise errors.ParameterError('c must be positive, got %r' % c)
  shifted = mode in (constants.SeriesMode.ABS_PLUS_EPS,
                     constants.SeriesMode.ABS_MINUS_EPS_NONZERO)
  if shifted and (epsilon is None or not 0 < epsilon < 0.5):
    raise errors.ParameterError('epsilon must lie in (0, 1/2), got %r' %
                                epsilon)
  z_max = int(math.ceil(math.sqrt(_EXP_CUTOFF / c))) + 2
  z = np.arange(-z_max, z_max + 1, dtype=float)
  root = math.sqrt(math.pi / c)
  if mode == constants.SeriesMode.CENTERED:
    args, lower, upper = z, root - 1, root + 1
  elif mode == constants.SeriesMode.HALF_SHIFT:
    args, lower, upper = z - 0.5, root - 1, math.inf
  elif mode == constants.SeriesMode.ABS_PLUS_EPS:
    args, lower, upper = np.abs(z) + epsilon, root - 2 * (1 + epsilon), math.inf
  else:
    args = np.abs(z[z != 0]) - epsilon
    lower, upper = -math.inf, root + 2
  value = math.fsum(np.exp(-c * args**2))
  return SeriesValue(value, lower, upper)


def envelope_weight(kappa: float, z) -> np.ndarray:
  """eta_kappa(z)^2 at integer points z."""
  return kappa / _SQRT_PI * np.exp(-kappa**2 * np.asarray(z, dtype=float)**2)


@dataclasses.dataclass(frozen=True)
class NormalizationBounds:
  """Normalization constants and their closed-form bounds.

  Attributes:
    C_k_inv_sq: sum over z of eta_kappa(z)^2.
    C_k_inv_sq_lb: 1 - kappa / sqrt(pi).
    C_k_inv_sq_ub: 1 + kappa / sqrt(pi).
    C_kD_inv_sq: squared norm of sum_z eta_kappa(z) chi_Delta(z).
    C_kD_inv_sq_ub: 1 + kappa / sqrt(pi) + 2 (sqrt(2 pi) + kappa) Delta.
    C_Lk_inv_sq: sum of eta_kappa(z)^2 over -L/2 <= z < L/2.
    C_Lk_inv_sq_lb: 1 - kappa / sqrt(pi) - 2 exp(-(kappa L / 2)^2)
      (1 + kappa / sqrt(pi)).
    ratio: C_{kappa,Delta}^2 / C_kappa^2.
    ratio_lb: 1 - 2 (sqrt(2 pi) + kappa) Delta / (1 - kappa / sqrt(pi)).
  """
  # pylint: disable=invalid-name
  C_k_inv_sq: float
  C_k_inv_sq_lb: float
  C_k_inv_sq_ub: float
  C_kD_inv_sq: float
  C_kD_inv_sq_ub: float
  C_Lk_inv_sq: float
  C_Lk_inv_sq_lb: float
  ratio: float
  ratio_lb: float


def normalization_bounds(kappa: float, delta: float, length: int,
                         tol: float = constants.DEFAULT_TOL):
  """Evaluates the GKP normalization constants against their bounds."""
  if not (kappa > 0 and delta > 0):
    raise errors.ParameterError('kappa and delta must be positive')
  if length <= 0 or length % 2:
    raise errors.ParameterError('L must be an even positive integer')
  z_max = peak_range(kappa, min(tol, 1e-15))
  z = np.arange(-z_max, z_max + 1)
  c_k = math.fsum(envelope_weight(kappa, z))
  bounded = np.arange(-length // 2, length // 2)
  c_lk = math.fsum(envelope_weight(kappa, bounded))
  unnormalized = _peak_train(z, delta, envelope(kappa, z))
  c_kd = unnormalized.norm_sq()
  lead = kappa / _SQRT_PI
  width_term = 2 * (math.sqrt(2 * math.pi) + kappa) * delta
  tail = math.exp(-(kappa * length / 2)**2)
  result = NormalizationBounds(
      C_k_inv_sq=c_k,
      C_k_inv_sq_lb=1 - lead,
      C_k_inv_sq_ub=1 + lead,
      C_kD_inv_sq=c_kd,
      C_kD_inv_sq_ub=1 + lead + width_term,
      C_Lk_inv_sq=c_lk,
      C_Lk_inv_sq_lb=1 - lead - 2 * tail * (1 + lead),
      ratio=c_k / c_kd,
      ratio_lb=1 - width_term / (1 - lead) if lead < 1 else -math.inf)
  printed = (1 - 2 * tail) * (1 + lead)
  if printed > c_lk:
    logging.warning(
        'product-form lower bound %.6g on C_{L,kappa}^-2 exceeds the sum '
        '%.6g at kappa=%g, L=%d; using 1 - kappa/sqrt(pi) - 2 e^{-(kL/2)^2}'
        '(1 + kappa/sqrt(pi)) instead', printed, c_lk, kappa, length)
  if not result.C_k_inv_sq_lb - 1e-12 <= c_k <= result.C_k_inv_sq_ub + 1e-12:
    raise errors.NumericError('normalization sandwich fails at kappa=%g' %
                              kappa)
  return result


@dataclasses.dataclass(frozen=True)
class ConvQuantities:
  k: int
  delta: float
  I_k: float  # pylint: disable=invalid-name
  I_k_prime: float  # pylint: disable=invalid-name


def conv_quantities(k: int, shift: float, kappa: float, delta: float,
                    epsilon: float) -> ConvQuantities:
  """Evaluates I_k(shift) and I'_k by adaptive quadrature.

  I_k(shift) = int chi^eps_Delta(k)(y)^2 eta_kappa(y - shift)^2 dy and
  I'_k = int chi^eps_Delta(k)(y)^2 eta_kappa(y) eta_kappa(k) dy, both over
  the window [k - eps, k + eps].
  """
  if not (kappa > 0 and delta > 0):
    raise errors.ParameterError('kappa and delta must be positive')
  if not 0 < epsilon < 0.5:
    raise errors.ParameterError('epsilon must lie in (0, 1/2)')
  peak_sq = _peak_amplitude(delta, epsilon)**2

  def peak(y):
    return peak_sq * math.exp(-(y - k)**2 / delta**2)

  def eta(y):
    return math.sqrt(kappa) / _SQRT_PI**0.5 * math.exp(-kappa**2 * y**2 / 2)

  options = dict(
      epsabs=1e-13, epsrel=1e-12, limit=constants.QUAD_LIMIT, points=[k])
  i_k, _ = integrate.quad(lambda y: peak(y) * eta(y - shift)**2, k - epsilon,
                          k + epsilon, **options)
  i_k_prime, _ = integrate.quad(lambda y: peak(y) * eta(y) * eta(k),
                                k - epsilon, k + epsilon, **options)
  return ConvQuantities(int(k), float(shift), max(i_k, 0.0),
                        max(i_k_prime, 0.0))


def tail_mass(state: GaussianSum,
              radius: float,
              domain: constants.Domain = constants.Domain.POSITION) -> float:
  """Probability ||Pi_[-R,R] psi||^2 of the window in the given quadrature.

  Args:
    state: normalized single-mode GaussianSum.
    radius: half-width R of the window.
    domain: quadrature of the projector.

  Returns:
    The window probability.
  """
  if not radius > 0:
    raise errors.ParameterError('R must be positive, got %r' % radius)
  if state.modes != 1:
    raise errors.UsageError('tail_mass acts on single-mode states')
  if state.domain != domain:
    state = state.fourier()
  return state.restricted(-radius, radius).norm_sq()
