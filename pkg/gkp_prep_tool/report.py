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
"""Class to group and print bound verdicts.

A protocol run or a verification suite produces many BoundReport rows. This
class collects them per section, prints a colored human-readable table and
writes the rows as CSV.
"""

import collections
import csv
import math

import termcolor

from gkp_prep_tool import constants

_STYLES = {
    constants.Verdict.HOLDS: ('green', []),
    constants.Verdict.VACUOUS: ('yellow', []),
    constants.Verdict.PRECONDITION_UNMET: ('cyan', []),
    constants.Verdict.VIOLATED: ('red', ['bold']),
}

_ACTION = ('ACTION: compare against a finer grid or outcome resolution before '
           'treating this as a counterexample.')

CSV_FIELDS = ('suite', 'name', 'measured', 'rhs', 'relation', 'verdict',
              'note')


def format_value(value):
  if value is None:
    return '-'
  if isinstance(value, float) and math.isfinite(value):
    return '%.6g' % value
  return str(value)


def format_row(row):
  params = ', '.join(
      '%s=%s' % (k, format_value(v)) for k, v in sorted(row.parameters.items()))
  sign = '<=' if row.relation == constants.Relation.AT_MOST else '>='
  text = '%-18s %-32s %-12s %s %-12s [%s]' % (
      row.verdict.value.upper(), row.name, format_value(row.measured), sign,
      format_value(row.rhs), params)
  if row.note:
    text += '  ' + row.note
  return text


class ReportBucket:
  """Class to group and print bound verdicts by section."""

  def __init__(self):
    self.bucket = collections.defaultdict(list)

  def add_row(self, section, row):
    self.bucket[section].append(row)

  def add_rows(self, section, rows):
    self.bucket[section].extend(rows)

  def rows(self):
    """(section, row) pairs in sorted section order."""
    return [(section, row)
            for section in sorted(self.bucket)
            for row in self.bucket[section]]

  @property
  def violated(self):
    return any(row.violated for _, row in self.rows())

  def counts(self):
    return collections.Counter(row.verdict.value for _, row in self.rows())

  def print_buckets(self):
    for section in sorted(self.bucket):
      print(termcolor.colored('Section: ' + section, attrs=['bold']))
      for row in self.bucket[section]:
        color, attrs = _STYLES[row.verdict]
        print(termcolor.colored(format_row(row), color=color, attrs=attrs))
        if row.violated:
          print(termcolor.colored(_ACTION, color='yellow',
                                  attrs=['underline']))
      print('\n')
    summary = ', '.join(
        '%s: %d' % item for item in sorted(self.counts().items()))
    print(termcolor.colored('Verdicts: ' + (summary or 'none'),
                            attrs=['bold']))

  def write_csv(self, path):
    """Writes one line per row; parameters become extra columns."""
    param_names = sorted(
        {name for _, row in self.rows() for name in row.parameters})
    with open(path, 'w', newline='') as f:
      writer = csv.writer(f)
      writer.writerow(list(CSV_FIELDS[:2]) + param_names +
                      list(CSV_FIELDS[2:]))
      for section, row in self.rows():
        writer.writerow([section, row.name] +
                        [row.parameters.get(name, '') for name in param_names] +
                        [
                            '' if row.measured is None else repr(row.measured),
                            repr(row.rhs), row.relation.value,
                            row.verdict.value, row.note
                        ])


def print_error(message, action=None):
  print(termcolor.colored('ERROR: ' + message, color='red', attrs=['bold']))
  if action:
    print(termcolor.colored('ACTION: ' + action, color='yellow',
                            attrs=['underline']))
