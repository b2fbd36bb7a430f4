# -*- coding: utf-8 -*-
"""kgaccuracy.errors

Copyright 2024-2025 by the kgaccuracy developers

This program is free software: you can redistribute it and/or modify
it under the terms of the GNU General Public License as published by
the Free Software Foundation, either version 3 of the License, or
(at your option) any later version.

This program is distributed in the hope that it will be useful,
but WITHOUT ANY WARRANTY; without even the implied warranty of
MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
GNU General Public License for more details.

The full text of the GNU General Public License is available at:
<http://www.gnu.org/licenses/gpl-3.0.txt>.
"""


class KGAccuracyError(Exception):
    """Base class for every error raised by kgaccuracy."""


class DomainError(KGAccuracyError, ValueError):
    """An argument lies outside the domain of a numerical kernel."""


class ConfigError(KGAccuracyError, ValueError):
    """An evaluation configuration is invalid."""


class ParseError(KGAccuracyError):
    """A dataset row could not be parsed.

    Keyword arguments:
    message -- description of the problem
    path -- the file being read
    line_number -- 1-based line of the offending row
    """
    def __init__(self, message, path=None, line_number=None):
        self.path = path
        self.line_number = line_number
        where = ''
        if path is not None:
            where = str(path)
        if line_number is not None:
            where += ':' + str(line_number)
        if where:
            message = where + ': ' + message
        KGAccuracyError.__init__(self, message)


class EmptyGraphError(KGAccuracyError):
    """The knowledge graph holds no triples."""


class MissingLabelError(KGAccuracyError):
    """Ground-truth labels were required but at least one is missing."""


class PopulationExhaustedError(KGAccuracyError):
    """Not enough undrawn triples remain to satisfy a draw."""


class EstimationError(KGAccuracyError):
    """An estimator was asked for a quantity it cannot define."""


class AnnotationAbortedError(KGAccuracyError):
    """The annotation channel closed before a batch was complete."""


class DegenerateTestError(KGAccuracyError):
    """A significance test has no defined statistic."""


class ConvergenceError(KGAccuracyError):
    """An iterative numerical routine failed to converge."""


def require(condition, message, exc_type=DomainError):
    """Raise exc_type(message) unless condition holds."""
    if not condition:
        raise exc_type(message)
