# -*- coding: utf-8 -*-
"""kgaccuracy.util

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

import sys


def verbose_print(text, verbose=True, stream=None):
    """Wrapper for print() that only prints if verbose is True.

    Keyword arguments:
    text -- the message
    verbose -- print only when this is true
    stream -- file-like target (stdout by default)
    """
    if verbose:
        print(text, file=stream if stream is not None else sys.stdout)


def format_bounds(lower, upper, digits=4):
    """Return an interval as '[l, u]' rounded to digits places."""
    fmt = '%.' + str(digits) + 'f'
    return '[' + fmt % lower + ', ' + fmt % upper + ']'
