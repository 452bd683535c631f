"""Time derivatives at t=0 along the configuration jet eta(t) = Id + t u0 + t^2/2 w1 + t^3/6 w2."""

import numpy as np
from typing import Callable, List, Tuple

from lagrangefsi.kinematics.tensors import cofactor_array, cofactor_jet, metric_jet, strain_jet

class ConfigurationJet():
    """
    Pointwise chain-rule coefficients from the gradients of the jet members.

    Attributes:
        H1, H2, H3: grad u0, grad w1, grad w2 (shape (..., d, d)).
        a1, a2, a3: Derivatives of the cofactor matrix.
        B1, B2: Derivatives of a a^T.
        E1, E2, E3: Derivatives of the strain offset F^T F - I.
    """

    def __init__(self, H1: np.ndarray, H2: np.ndarray, H3: np.ndarray):
        self.H1, self.H2, self.H3 = H1, H2, H3
        self.a1, self.a2, self.a3 = cofactor_jet(H1, H2, H3)
        self.B1, self.B2 = metric_jet(self.a1, self.a2)
        self.E1, self.E2, self.E3 = strain_jet(H1, H2, H3)

    def stress(self, contract: Callable[[np.ndarray], np.ndarray]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Derivatives of P = F c(F^T F - I) for the contraction `contract` = c(.).

        Returns:
            Tuple of P_t(0), P_tt(0), P_ttt(0).
        """
        S1, S2, S3 = contract(self.E1), contract(self.E2), contract(self.E3)
        P1 = S1
        P2 = S2 + 2.0 * self.H1 @ S1
        P3 = S3 + 3.0 * self.H1 @ S2 + 3.0 * self.H2 @ S1
        return P1, P2, P3

def finite_difference_jet(H1: np.ndarray, H2: np.ndarray, H3: np.ndarray, step: float = 1e-3) -> List[np.ndarray]:
    """
    Central-difference estimates of the first three time derivatives of
    cofactor(I + t H1 + t^2/2 H2 + t^3/6 H3) at t=0.
    """
    d = H1.shape[-1]
    I = np.eye(d)
    a = lambda t: cofactor_array(I + t * H1 + 0.5 * t * t * H2 + t ** 3 / 6.0 * H3)
    s = step
    first = (a(s) - a(-s)) / (2.0 * s)
    second = (a(s) - 2.0 * a(0.0) + a(-s)) / (s * s)
    third = (a(2.0 * s) - 2.0 * a(s) + 2.0 * a(-s) - a(-2.0 * s)) / (2.0 * s ** 3)
    return [first, second, third]
