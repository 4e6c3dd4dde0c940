# Copyright 2024 The tdep authors
#
# Permission is hereby granted, free of charge, to any person obtaining
# a copy of this software and associated documentation files
# (the "Software"), to deal in the Software without restriction,
# including without limitation the rights to use, copy, modify, merge,
# publish, distribute, sublicense, and/or sell copies of the Software,
# and to permit persons to whom the Software is furnished to do so,
# subject to the following conditions:
#
# The above copyright notice and this permission notice shall be
# included in all copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND,
# EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF
# MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT.
# IN NO EVENT SHALL THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY
# CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION OF CONTRACT,
# TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE
# SOFTWARE OR THE USE OR OTHER DEALINGS IN THE SOFTWARE.

"""Collection of utilities"""

from .errors import NumericalError


def with_metaclass(meta, *bases):
    """Create a base class with a metaclass.

    Code taken from six (https://pypi.python.org/pypi/six).
    """
    # a dummy metaclass for one level of class instantiation that
    # replaces itself with the actual metaclass.
    class MetaClass(meta):
        """The dummy metaclass"""
        def __new__(cls, name, _, doc):
            return meta(name, bases, doc)
    return type.__new__(MetaClass, 'temporary_class', (), {})


def clamp(value, lower=0., upper=None, below=1e-9, above=1e-7, name='value'):
    """Clamp floating point drift of value into [lower, upper].

    Values that undershoot lower by at most `below` or overshoot
    upper by at most `above` are clamped. Larger excursions indicate
    a bug rather than roundoff and raise NumericalError.
    """
    if value < lower:
        if value < lower-below:
            raise NumericalError("%s=%g lies below %g" % (name, value, lower))
        return lower
    if upper is not None and value > upper:
        if value > upper+above:
            raise NumericalError("%s=%g exceeds %g" % (name, value, upper))
        return upper
    return value


def parse_grid(text):
    """Parse a start:stop:step grid specification into a list of floats

    The stop value is included when it is hit within rounding.
    A single number yields a one-element grid.
    """
    import numpy as np
    parts = text.split(':')
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) != 3:
        raise ValueError("grid must have the form start:stop:step")
    start, stop, step = (float(part) for part in parts)
    if step <= 0:
        raise ValueError("grid step must be positive")
    if stop < start:
        raise ValueError("grid stop must not be smaller than start")
    count = int(np.floor((stop-start)/step + 1e-9)) + 1
    return [round(start + i*step, 12) for i in range(count)]
