"""
Estimating the memory parameter of a nonstationary series
=========================================================

A FARIMA(0, 0.8, 0) series is nonstationary, so its sample autocorrelations
say little.  Here we simulate one, compute both initial estimates and then
take one adaptive Newton step.
"""

import numpy as np

from fracadapt import (BasisConfig, ModelSpec, ThetaFull, css_fit, one_step_adaptive, simulate,
                       tapered_whittle_fit, wald_test)
from fracadapt.innovations import InnovationDist, stream

###############################################################################
# Simulate with Laplace innovations, which are far from Gaussian.
n, xi0 = 512, 0.8
eps = InnovationDist("laplace").sample(n + 5000, stream(2024, 0))
y = simulate(ThetaFull(xi0), ModelSpec(), n, eps, burn_in=5000)

###############################################################################
# The two starting values.  The tapered Whittle fit only looks at every other
# Fourier frequency, so it is noisier than CSS.
for fit in (css_fit(y), tapered_whittle_fit(y)):
    print(f"{fit.method:>16}: xi = {fit.xi:.3f}, sigma^2 = {fit.sigma2_tilde:.3f}")

###############################################################################
# One step from the Whittle start, with the score estimated from the
# residuals.  A cubic in the bounded transform picks up the Laplace kink
# reasonably well.
init = tapered_whittle_fit(y)
for L in (1, 2, 3, 4):
    res = one_step_adaptive(y, None, None, init, BasisConfig("bounded", L))
    print(f"L = {L}: xi_hat = {res.xi_hat:.3f} (se {res.se1[0]:.3f}), J_L = {res.J_used:.2f}")

###############################################################################
# The information of unit-variance Laplace noise is 2, so the adaptive
# standard error should be close to sqrt(6 / pi^2 / (2 n)).
print("reference se:", np.sqrt(6 / np.pi**2 / (2 * n)))

###############################################################################
# Is the series a unit-root process?  A Wald test of xi = 1:
test = wald_test(res, [[1.0]], [1.0])
print(f"Wald statistic {test.statistic:.2f}, p-value {test.p_value:.4f}")
