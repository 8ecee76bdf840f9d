"""Series estimation of the innovation score function.

The score ``psi`` is approximated by a linear combination of the centered
powers ``phi(s)^l``, ``l = 1..L``.  Coefficients come from integration by
parts: ``E{phi_l(eps) psi(eps)} = E{phi_l'(eps)}``, so no density estimate
is needed.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import SingularBasisError

PHI_KINDS = ("identity", "bounded")
_PHI_ALIASES = {"id": "identity", "s": "identity", "bnd": "bounded"}
RCOND_MIN = 1e-14


@dataclass(frozen=True)
class BasisConfig:
    """Basis ``phi(s)^l``, ``l = 1..L``, with ``phi(s) = s`` or ``s / sqrt(1 + s^2)``."""

    phi_kind: str = "identity"
    L: int = 1

    def __post_init__(self):
        kind = _PHI_ALIASES.get(self.phi_kind, self.phi_kind)
        if kind not in PHI_KINDS:
            raise ValueError(f"unknown phi kind {self.phi_kind!r}")
        if int(self.L) < 1:
            raise ValueError("L must be >= 1")
        object.__setattr__(self, "phi_kind", kind)
        object.__setattr__(self, "L", int(self.L))

    def phi(self, s):
        s = np.asarray(s, dtype=float)
        if self.phi_kind == "identity":
            return s
        return s / np.sqrt(1.0 + s * s)

    def dphi(self, s):
        s = np.asarray(s, dtype=float)
        if self.phi_kind == "identity":
            return np.ones_like(s)
        return (1.0 + s * s) ** -1.5

    def basis(self, h):
        """Uncentered basis ``phi(h)^l`` and its derivatives, each (n, L)."""
        p = self.phi(h)
        powers = p[:, None] ** np.arange(self.L + 1)
        ell = np.arange(1, self.L + 1)
        return powers[:, 1:], ell * self.dphi(h)[:, None] * powers[:, :-1]


@dataclass(frozen=True)
class ScoreFit:
    a_hat: np.ndarray
    W: np.ndarray
    w: np.ndarray
    J_L: float
    basis: BasisConfig
    rcond: float


def fit_score(h, basis):
    """Fit the series score estimator to standardized residuals ``h``.

    Raises
    ------
    SingularBasisError
        If the reciprocal condition number of ``W`` falls below ``1e-14``.
    """
    h = np.asarray(h, dtype=float).ravel()
    n = h.size
    if n < basis.L + 2:
        raise ValueError(f"need at least L + 2 = {basis.L + 2} observations, got {n}")
    phi, dphi = basis.basis(h)
    Phi = phi - phi.mean(axis=0)
    W = Phi.T @ Phi / n
    w = dphi.mean(axis=0)
    eig = np.linalg.eigvalsh(W)
    rcond = eig[0] / eig[-1] if eig[-1] > 0 else 0.0
    if not rcond >= RCOND_MIN:
        raise SingularBasisError(basis.L, rcond)
    a_hat = cho_solve(cho_factor(W), w)
    return ScoreFit(a_hat=a_hat, W=W, w=w, J_L=float(w @ a_hat), basis=basis, rcond=float(rcond))


def eval_score(fit, h):
    """Evaluate the fitted score at ``h``, centering the basis with the mean of ``h``'s basis values."""
    phi, _ = fit.basis.basis(np.asarray(h, dtype=float).ravel())
    return (phi - phi.mean(axis=0)) @ fit.a_hat


def j_path(h, phi_kind, L_max):
    """``J_L`` for ``L = 1..L_max`` by direct refits; stops at the first singular basis."""
    out = []
    for L in range(1, L_max + 1):
        try:
            out.append(fit_score(h, BasisConfig(phi_kind, L)).J_L)
        except SingularBasisError:
            break
    return np.array(out)
