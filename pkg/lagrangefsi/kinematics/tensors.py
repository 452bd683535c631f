"""Closed-form pointwise kernels on stacks of d x d matrices (last two axes)."""

import numpy as np
from typing import Tuple

def cofactor_array(F: np.ndarray) -> np.ndarray:
    """a = Cof(F)^T from the minors of F, no inversion."""
    d = F.shape[-1]
    if d == 2:
        a = np.empty_like(F)
        a[..., 0, 0] = F[..., 1, 1]
        a[..., 0, 1] = -F[..., 0, 1]
        a[..., 1, 0] = -F[..., 1, 0]
        a[..., 1, 1] = F[..., 0, 0]
        return a
    if d == 3:
        c0, c1, c2 = F[..., :, 0], F[..., :, 1], F[..., :, 2]
        return np.stack([np.cross(c1, c2), np.cross(c2, c0), np.cross(c0, c1)], axis=-2)
    raise ValueError(f"Invalid matrix dimension {d}, must be 2 or 3")

def det_array(F: np.ndarray) -> np.ndarray:
    d = F.shape[-1]
    if d == 2:
        return F[..., 0, 0] * F[..., 1, 1] - F[..., 0, 1] * F[..., 1, 0]
    if d == 3:
        return np.einsum("...i,...i->...", F[..., :, 0], np.cross(F[..., :, 1], F[..., :, 2]))
    raise ValueError(f"Invalid matrix dimension {d}, must be 2 or 3")

def strain_offset_array(F: np.ndarray) -> np.ndarray:
    """F^T F - I, exactly symmetric."""
    d = F.shape[-1]
    E = np.einsum("...ki,...kj->...ij", F, F) - np.eye(d)
    return 0.5 * (E + np.swapaxes(E, -1, -2))

def cofactor_derivative(F: np.ndarray) -> np.ndarray:
    """
    Da[..., i, j, m, n] = d a_ij / d F_mn.

    The cofactor is linear (d=2) or quadratic with a(E_mn) = 0 (d=3), so the
    difference a(F + E_mn) - a(F) is the exact derivative in both cases.
    """
    d = F.shape[-1]
    a = cofactor_array(F)
    Da = np.empty(F.shape + (d, d))
    for m in range(d):
        for n in range(d):
            shifted = F.copy()
            shifted[..., m, n] += 1.0
            Da[..., m, n] = cofactor_array(shifted) - a
    return Da

def cofactor_bilinear(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Polar form B(X, Y) of the quadratic d=3 cofactor, B(X, X) = a(X)."""
    return 0.5 * (cofactor_array(X + Y) - cofactor_array(X) - cofactor_array(Y))

def cofactor_jet(H1: np.ndarray, H2: np.ndarray, H3: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Time derivatives at t=0 of a(I + t H1 + t^2/2 H2 + t^3/6 H3).

    Returns:
        Tuple of the first, second and third derivatives.
    """
    d = H1.shape[-1]
    if d == 2:
        return cofactor_array(H1), cofactor_array(H2), cofactor_array(H3)
    I = np.broadcast_to(np.eye(d), H1.shape)
    a1 = 2.0 * cofactor_bilinear(I, H1)
    a2 = 2.0 * cofactor_bilinear(I, H2) + 2.0 * cofactor_array(H1)
    a3 = 2.0 * cofactor_bilinear(I, H3) + 6.0 * cofactor_bilinear(H1, H2)
    return a1, a2, a3

def metric_jet(a1: np.ndarray, a2: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """First and second derivatives of a a^T along a jet starting at a = I."""
    a1T = np.swapaxes(a1, -1, -2)
    B1 = a1 + a1T
    B2 = a2 + 2.0 * a1 @ a1T + np.swapaxes(a2, -1, -2)
    return B1, B2

def strain_jet(H1: np.ndarray, H2: np.ndarray, H3: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Derivatives at t=0 of F^T F - I for F = I + t H1 + t^2/2 H2 + t^3/6 H3."""
    T = lambda X: np.swapaxes(X, -1, -2)
    E1 = H1 + T(H1)
    E2 = H2 + T(H2) + 2.0 * T(H1) @ H1
    E3 = H3 + T(H3) + 3.0 * (T(H1) @ H2 + T(H2) @ H1)
    return E1, E2, E3
