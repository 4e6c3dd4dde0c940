"""Four atoms with strictly ordered bounds

gamma is uniform on (1, 6), (2, 1), (4, 2) and (4, 5), and the cost
is the l1 distance |x1 - x2| + |y1 - y2|. Its upper bounds are

    bound_pi1 = 9/4   (Y-diameter)
    bound_pi3 = 3/2   (marginal transport dependency)
    bound_pi2 = 1     (min-diameter)

and the transport dependency lies strictly below all three.
"""

import tdep

gamma = tdep.JointDiscreteMeasure([1., 2., 4., 4.], [6., 1., 2., 5.])
cost = tdep.AdditiveCost(alpha=1., p=1., metric_x='l1', metric_y='l1')
result = tdep.transport_dependency(gamma, cost, solver='exact')

plans = dict((name, getattr(tdep.dependency, name)(gamma, cost))
             for name in ('plan_pi1', 'plan_pi2', 'plan_pi3'))

if __name__ == '__main__':
    print("tau        %.6f" % result.value)
    for name in ('bound_pi2', 'bound_pi3', 'bound_pi1'):
        print("%-10s %.6f" % (name, getattr(result, name)))
    for name, plan in sorted(plans.items()):
        print("%-10s %.6f (%d entries)" % (name, plan.primal_cost, len(plan)))
