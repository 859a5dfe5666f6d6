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
"""Parameter conditions under which a bound is claimed to hold.

A Preconditions object is satisfied by a parameter dictionary if and only if
every one of its matchers matches it.
"""

import math

from gkp_prep_tool import constants


class RangeMatcher:
  """Matches parameters whose value lies strictly between two limits.

  Attributes:
    name: parameter key.
    lower: exclusive lower limit, or None.
    upper: exclusive upper limit, or None.
  """

  def __init__(self, name, lower=None, upper=None):
    self.name = name
    self.lower = lower
    self.upper = upper

  def match(self, parameters):
    value = parameters.get(self.name)
    if value is None:
      return False
    if self.lower is not None and not value > self.lower:
      return False
    if self.upper is not None and not value < self.upper:
      return False
    return True

  def describe(self):
    lower = '-inf' if self.lower is None else '%g' % self.lower
    upper = 'inf' if self.upper is None else '%g' % self.upper
    return '%s in (%s, %s)' % (self.name, lower, upper)


class MultipleOfMatcher:
  """Matches positive integer parameters divisible by a base."""

  def __init__(self, name, base):
    self.name = name
    self.base = base

  def match(self, parameters):
    value = parameters.get(self.name)
    return (value is not None and int(value) == value and value > 0 and
            int(value) % self.base == 0)

  def describe(self):
    return '%s in %dN' % (self.name, self.base)


class ExpressionMatcher:
  """Matches when a predicate over the parameters is true.

  Attributes:
    description: readable form of the condition.
    predicate: callable taking the parameter dictionary.
  """

  def __init__(self, description, predicate):
    self.description = description
    self.predicate = predicate

  def match(self, parameters):
    try:
      return bool(self.predicate(parameters))
    except (KeyError, ValueError):
      return False

  def describe(self):
    return self.description


class Preconditions:
  """Conjunction of matchers.

  Attributes:
    matchers: a list of matchers, each an instance of an xxMatcher class
      defined in this file.
  """

  def __init__(self, matchers=()):
    self.matchers = list(matchers)

  def is_satisfied(self, parameters):
    for matcher in self.matchers:
      if not matcher.match(parameters):
        return False
    return True

  def unmet(self, parameters):
    return [m.describe() for m in self.matchers if not m.match(parameters)]

  def __add__(self, other):
    return Preconditions(self.matchers + other.matchers)


NONE = Preconditions()

SMALL_KAPPA = Preconditions([RangeMatcher('kappa', 0, 0.25)])
SMALL_DELTA = Preconditions([RangeMatcher('delta', 0, 0.25)])

COMB = SMALL_DELTA
GAUSSIFICATION = SMALL_KAPPA + SMALL_DELTA + Preconditions(
    [MultipleOfMatcher('length', 8)])
GKP_HEADLINE = Preconditions(
    [RangeMatcher('kappa', 0, constants.GKP_PRECONDITION_LIMIT),
    RangeMatcher('delta', 0, constants.GKP_PRECONDITION_LIMIT)])
GKP_DERIVED = SMALL_KAPPA + SMALL_DELTA
TAILS = Preconditions(
    [RangeMatcher('kappa', 0, 0.25),
     RangeMatcher('delta', 0, 0.01),
     RangeMatcher('radius', 0)])
UNITARY_LOWER = Preconditions([
    ExpressionMatcher(
        '20 sqrt(kappa) + 28 sqrt(delta) <= 1', lambda p: 20 * math.sqrt(p[
            'kappa']) + 28 * math.sqrt(p['delta']) <= 1)
])
HERALDED_LOWER = Preconditions([
    ExpressionMatcher(
        '20 sqrt(kappa) + 28 sqrt(delta) <= p', lambda p: 20 * math.sqrt(p[
            'kappa']) + 28 * math.sqrt(p['delta']) <= p['p']),
    ExpressionMatcher('epsilon <= p', lambda p: p['epsilon'] <= p['p']),
])
EFFECTIVE_SQUEEZING = GKP_DERIVED
TRUNCATION = Preconditions(
    [RangeMatcher('delta', 0, 0.25),
     RangeMatcher('epsilon', 0)])
