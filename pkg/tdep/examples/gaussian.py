"""Bivariate normal distributions

For standard normal x and y with correlation rho and the squared
Euclidean cost, the transport dependency, the marginal transport
dependency, the mutual information and the distance covariance have
closed forms. This example tabulates them and compares the transport
dependency with its empirical estimates from samples of size n.
"""

import numpy as np

import tdep
from tdep.oracles import (GaussianSpec, gauss_dcov2_bivariate, gauss_marginal_tdep_bivariate,
                          gauss_mutual_info, gauss_tdep, gauss_tdep_bivariate)

rhos = [0., .25, .5, .75, .9, .99]

cost = tdep.RawPowerCost(p=2.)

table = [(rho, gauss_tdep_bivariate(1., 1., rho), gauss_marginal_tdep_bivariate(1., rho),
          gauss_mutual_info(rho), gauss_dcov2_bivariate(1., rho))
         for rho in rhos]


def estimate(rho, n, seed=None, solver='auto'):
    """Transport dependency of an empirical sample of size n"""
    gamma = GaussianSpec.bivariate(1., 1., rho).sample(n, seed)
    return tdep.transport_dependency(gamma, cost, solver, bounds=False).value


def estimates(rho, n, replicates=10, seed=None, solver='auto'):
    """Estimates of independent replicates with seeds spawned from seed"""
    children = np.random.SeedSequence(seed).spawn(replicates)
    return [estimate(rho, n, child, solver) for child in children]


if __name__ == '__main__':
    print("rho      tau      tau^Y    MI       dcov2    tau(matrix) median(n=50)")
    for rho, tau, marginal, info, dcov in table:
        matrix = gauss_tdep(GaussianSpec.bivariate(1., 1., rho))
        median = np.median(estimates(rho, 50, seed=42))
        print("%.2f     %.5f  %.5f  %.5f  %.5f  %.5f      %.5f"
              % (rho, tau, marginal, info, dcov, matrix, median))
