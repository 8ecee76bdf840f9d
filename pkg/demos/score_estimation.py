"""
Series estimation of a score function
=====================================

The score of a density is approximated by a least-squares combination of
powers of ``phi(s)``.  The coefficients come from integration by parts, so
no density estimate is involved.  We compare the fitted score with the true
one for a bimodal mixture.
"""

import numpy as np

from fracadapt import BasisConfig, eval_score, fit_score, j_path
from fracadapt.innovations import InnovationDist, stream

dist = InnovationDist("mixsym")
h = dist.sample(20_000, stream(1, 0))
print(f"true information J = {dist.info():.3f}")

###############################################################################
# The projection norm J_L grows with L and stays below J.
for phi in ("identity", "bounded"):
    print(phi, np.round(j_path(h, phi, 4), 3))

###############################################################################
# Evaluate the L = 3 identity fit on a grid.  With a cubic in s the fit can
# bend towards the two modes; a straight line cannot.
grid = np.linspace(-1.2, 1.2, 7)
fit = fit_score(h, BasisConfig("identity", 3))
phi, _ = fit.basis.basis(grid)
mean_phi = fit.basis.basis(h)[0].mean(axis=0)
fitted = (phi - mean_phi) @ fit.a_hat
for s, a, b in zip(grid, fitted, dist.score(grid)):
    print(f"s = {s:5.2f}: fitted {a:7.3f}, true {b:7.3f}")

###############################################################################
# On the fitting sample itself the score is centered exactly.
print("mean fitted score:", eval_score(fit, h).mean())
