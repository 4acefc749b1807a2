"""The two-parameter density-matrix family on the two-site basis and its
entanglement measures.

States live on the basis {|00>, |01>, |10>, |11>} where |01> occupies the
site at -L and |10> the site at +L. The family

    rho(alpha, beta) = alpha |01><01| + (1-alpha) |10><10|
                       + beta (|10><01| + |01><10|)

is positive exactly when (alpha - 1/2)^2 + beta^2 <= 1/4. For it the
negativity equals |beta|, so the logarithmic negativity and the concurrence
reduce to closed forms in beta alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "TwoSiteState",
    "make_state",
    "density_matrix",
    "partial_transpose",
    "negativity",
    "log_negativity",
    "concurrence",
]

# Eigenvalues within this band of zero are treated as exact zeros.
EIGENVALUE_TOL = 1e-12


@dataclass(frozen=True)
class TwoSiteState:
    """Validated member of the rho(alpha, beta) family; beta is real."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not -0.5 <= self.beta <= 0.5:
            raise ValueError(f"beta must lie in [-1/2, 1/2], got {self.beta}")
        disc = (self.alpha - 0.5) ** 2 + self.beta ** 2
        if disc > 0.25 + 1e-15:
            raise ValueError(
                "positivity constraint (alpha-1/2)^2 + beta^2 <= 1/4 violated: "
                f"got {disc:.6g} > 0.25")


def make_state(alpha: float, beta: float) -> TwoSiteState:
    """Validate (alpha, beta) and return the state, or raise naming the
    violated inequality."""
    return TwoSiteState(float(alpha), float(beta))


def density_matrix(state: TwoSiteState) -> np.ndarray:
    """4x4 matrix of rho(alpha, beta) on {|00>, |01>, |10>, |11>}."""
    rho = np.zeros((4, 4))
    rho[1, 1] = state.alpha
    rho[2, 2] = 1.0 - state.alpha
    rho[1, 2] = state.beta
    rho[2, 1] = state.beta
    return rho


def partial_transpose(rho: np.ndarray) -> np.ndarray:
    """Partial transpose over the second qubit of a 4x4 two-qubit matrix.

    The choice of subsystem does not affect the negativity for this
    symmetric family.
    """
    r = np.asarray(rho).reshape(2, 2, 2, 2)
    return r.transpose(0, 3, 2, 1).reshape(4, 4)


def negativity(state: TwoSiteState) -> float:
    """Sum of magnitudes of the negative partial-transpose eigenvalues."""
    lam = np.linalg.eigvalsh(partial_transpose(density_matrix(state)))
    lam = np.where(np.abs(lam) < EIGENVALUE_TOL, 0.0, lam)
    return float(np.sum((np.abs(lam) - lam) / 2.0))


def log_negativity(state: TwoSiteState) -> float:
    """log2(2 N + 1); ranges over [0, 1] on this family."""
    return float(np.log2(2.0 * negativity(state) + 1.0))


def concurrence(state: TwoSiteState) -> float:
    """Concurrence of rho(alpha, beta); for this family C = 2 |beta|."""
    return 2.0 * abs(state.beta)
