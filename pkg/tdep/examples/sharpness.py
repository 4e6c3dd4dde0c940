"""Three atoms on the diagonal

gamma is uniform on (1, 1), (2, 2) and (3, 3). Under the Euclidean
distance of R^2, all three upper bounds equal 8/9, the expected
distance of two independent draws from {1, 2, 3}. The transport
dependency itself is strictly smaller, namely 2(2 + sqrt(2))/9: the
optimal plan moves the off-diagonal product atoms diagonally instead
of along a single axis.
"""

from math import sqrt

import tdep

gamma = tdep.JointDiscreteMeasure([1., 2., 3.], [1., 2., 3.])
cost = tdep.RawPowerCost(p=1., metric='euclidean')
result = tdep.transport_dependency(gamma, cost, solver='exact')

expected = 2.*(2.+sqrt(2.))/9.
bound = 8./9.

if __name__ == '__main__':
    print("tau       %.12f (expected %.12f)" % (result.value, expected))
    for name in ('bound_pi1', 'bound_pi2', 'bound_pi3'):
        print("%-9s %.12f (expected %.12f)" % (name, getattr(result, name), bound))
    for row, col, mass in result.plan.entries:
        print("%d -> %d  %.6f" % (row, col, mass))
