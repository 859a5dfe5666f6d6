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
"""Module for defining constants used in the tool."""

import enum
import math

# Strength limit of a single elementary operation.
STRENGTH_LIMIT = 2 * math.pi
# Slack on the strength limit boundary.
STRENGTH_SLACK = 1e-12

# Discarded envelope weight when truncating infinite peak sums.
DEFAULT_TOL = 1e-12
MAX_TOL = 1e-6

# Analytic backend term cap.
DEFAULT_TERM_CAP = 4096
# Terms whose squared weight falls below this are dropped by the analytic
# backend.
PRUNE_WEIGHT = 1e-30

# Tail mass allowed at the edges of a grid.
GRID_EDGE_MASS = 1e-10
# Samples across the narrowest Gaussian on a default grid.
GRID_SAMPLES_PER_WIDTH = 6
# Envelope widths of margin on a default grid.
GRID_MARGIN_WIDTHS = 8
# Maximal rotation angle realised by one shear triple on the grid.
GRID_ROTATION_PIECE = math.pi / 8
# Sampled norm must match the analytic norm to this before a state is
# accepted on a grid.
GRID_ALIAS_TOL = 1e-6
# Largest relative norm change a unitary gate may cause on a grid.
GRID_NORM_TOL = 1e-9
# Largest number of grid points of a two-mode state.
GRID_MAX_POINTS = 1 << 24

# Homodyne outcome resolution is min(OUTCOME_DX, kappa * OUTCOME_KAPPA_RATIO).
OUTCOME_DX = 0.02
OUTCOME_KAPPA_RATIO = 0.2

# Closed form is used for truncated pairs whose window covers this many
# standard deviations of the product Gaussian.
COVERAGE_SIGMAS = 10.0
# Pairs whose closed-form magnitude is below this are treated as zero.
NEGLIGIBLE_PAIR = 1e-17
QUAD_EPSABS = 1e-13
QUAD_EPSREL = 1e-12
QUAD_LIMIT = 200

# Evenness test for the first input of the measurement instrument.
EVEN_TOL = 1e-9

# Report and state dump formats.
REPORT_SCHEMA_VERSION = 1
STATE_DUMP_VERSION = 1

# Constants of the headline GKP preparation bounds.
GKP_ACCEPT_LOWER = 0.1
GKP_PRECONDITION_LIMIT = 1e-6
# Coefficients of log(1/kappa) and log(1/Delta) bounding the operation count
# of the full preparation.
OPCOUNT_C1 = 20
OPCOUNT_C2 = 6


class Verdict(enum.Enum):
  """Outcome of comparing a measured quantity against a closed-form bound."""
  HOLDS = 'holds'
  VIOLATED = 'violated'
  VACUOUS = 'vacuous'
  PRECONDITION_UNMET = 'precondition_unmet'


class Relation(enum.Enum):
  """Direction of a bound: measured <= rhs or measured >= rhs."""
  AT_MOST = '<='
  AT_LEAST = '>='


class Domain(enum.Enum):
  """Quadrature in which a wavefunction is represented or projected."""
  POSITION = 'position'
  MOMENTUM = 'momentum'


class Backend(enum.Enum):
  """Simulation backends."""
  GRID = 'grid'
  GAUSS = 'gauss'
  AUTO = 'auto'


class Observable(enum.Enum):
  """Single-mode observables with an expectation value on the grid."""
  ENERGY = 'H'
  POSITION = 'Q'
  MOMENTUM = 'P'
  STABILIZER_P = 'S_P'
  STABILIZER_Q = 'S_Q'


class SeriesMode(enum.Enum):
  """Shift patterns of the one-dimensional Gaussian series."""
  CENTERED = 'centered'
  HALF_SHIFT = 'half_shift'
  ABS_PLUS_EPS = 'abs_plus_eps'
  ABS_MINUS_EPS_NONZERO = 'abs_minus_eps_nonzero'


class GateKind(enum.Enum):
  """Elementary operation variants."""
  PREP_VACUUM = 'PREP_VAC'
  PREP_QUBIT0 = 'PREP_Q0'
  QUBIT_UNITARY = 'QUBIT'
  GAUSSIAN_UNITARY = 'GAUSSIAN'
  DISPLACEMENT = 'DISPLACE'
  CTRL_DISPLACEMENT = 'CDISPLACE'
  HOMODYNE_Q = 'MEASURE_Q'
  QUBIT_MEASURE = 'MEASURE_QUBIT'


class StateKind(enum.Enum):
  """Analytic state families."""
  VACUUM = 'vacuum'
  COHERENT = 'coherent'
  SQUEEZED_VACUUM = 'squeezed_vacuum'
  TRUNCATED_GAUSSIAN = 'truncated_gaussian'
  COMB = 'comb'
  TRUNCATED_COMB = 'truncated_comb'
  GKP_PEAKWISE = 'gkp_peakwise'
  GKP_POINTWISE = 'gkp_pointwise'
  GKP_TRUNCATED = 'gkp_truncated'
  GKP_TRUNCATED_BOUNDED = 'gkp_truncated_bounded'
  GKP_POINTWISE_TRUNCATED_BOUNDED = 'gkp_pointwise_truncated_bounded'
  GKP_MOMENTUM_TRUNCATED = 'gkp_momentum_truncated'


class CountMode(enum.Enum):
  """Operation-count accounting modes."""
  UNITARY = 'unitary'
  HERALDED = 'heralded'


class ConstantSet(enum.Enum):
  """Constant sets for the Gaussification guarantees.

  STATEMENT carries the published constants. DERIVED composes the
  acceptance bound and the closeness bound through heralding stability.
  """
  STATEMENT = 'statement'
  DERIVED = 'derived'


class Suite(enum.Enum):
  """Verification suites of the verify command."""
  FORMULAS = 'formulas'
  TAILS = 'tails'
  MOMENTS = 'moments'
  STABILITY = 'stability'
  ALL = 'all'


class ExitCode(enum.IntEnum):
  """Process exit codes of the command line tool."""
  OK = 0
  USAGE = 2
  VIOLATED = 3
  NUMERIC = 4


# Default parameter grids of the verification suites.
OVERLAP_PEAKS = tuple(range(-5, 6))
OVERLAP_DELTAS = (0.05, 0.1, 0.5)
SERIES_POINTS = 50
SERIES_C_RANGE = (1e-4, 1e2)
SERIES_EPS = 0.25
NORMALIZATION_GRID = (0.01, 0.05, 0.1, 0.2)
TAIL_KAPPAS = (0.01, 0.05, 0.1, 0.2)
TAIL_DELTAS = (0.001, 0.005)
TAIL_RADII = (1.0, 2.0, 5.0, 10.0)
TRUNCATION_DELTAS = (0.0025, 0.01, 0.04)
TRUNCATION_LENGTHS = (8, 32)
MOMENT_GATES = 8
MOMENT_TRIALS = 50
STABILITY_SHIFT = 0.05
STABILITY_WIDTH_FACTOR = 1.2
STABILITY_LEAKAGE = 0.01
