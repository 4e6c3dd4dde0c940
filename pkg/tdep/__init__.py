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

"""Transport dependency of joint probability measures

The transport dependency of a joint distribution gamma of (x, y) is
the optimal transport cost between gamma and the product of its
marginals. This package computes it for discrete measures, together
with upper bounds, normalized transport correlations, closed-form
values for Gaussians and permutation tests of independence.

Example uses can be found in the tdep.examples package, and the
command line interface is provided by tdep.cli (run `python -m tdep`).

The behavior of all tdep classes is specified via tests, which are
located in the tdep.tests package.
"""

from .measures import DiscreteMeasure, JointDiscreteMeasure, from_samples, product
from .costs import AdditiveCost, RawPowerCost, MinMarginalCost, IsometricCost, MarginalCost
from .dependency import transport_dependency, marginal_transport_dependency
from .coefficients import CoefficientRequest, rho_alpha, rho_inf, rho_star, dcor
from .errors import CapacityError, ConvergenceError, DegenerateMeasureError, NumericalError

from . import algorithms
from . import oracles
from . import geometries
from . import permutation
from . import examples
from . import tests
