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
"""Exceptions raised by the tool."""


class Error(Exception):
  """Base class for all errors raised by the tool."""


class ParameterError(Error, ValueError):
  """A parameter lies outside the range an operation accepts."""


class UsageError(Error):
  """An operation was invoked on incompatible registers or dimensions."""


class ResolutionError(Error):
  """A grid does not resolve the requested wavefunction."""


class DomainOverflowError(Error):
  """Wavefunction support would leave the simulation grid."""


class CapabilityError(Error):
  """A backend does not implement the requested operation."""


class CapacityError(Error):
  """The analytic backend exceeded its term budget."""


class PreconditionError(Error):
  """An operation precondition is violated by its inputs."""


class NumericError(Error):
  """A numeric argument is outside its mathematical domain."""
