"""Q1 reference element and tensor-product Gauss rules on [-1, 1]^d."""

import itertools
import numpy as np

def local_signs(dimension: int) -> np.ndarray:
    """Corner signs of the reference cell, local node a = ax + 2 ay + 4 az."""
    bits = np.array([[(a >> k) & 1 for k in range(dimension)] for a in range(2 ** dimension)])
    return 2 * bits - 1

def shape_values(points: np.ndarray, dimension: int) -> np.ndarray:
    signs = local_signs(dimension)
    factors = 0.5 * (1.0 + points[:, None, :] * signs[None, :, :])
    return np.prod(factors, axis=-1)

def shape_gradients(points: np.ndarray, dimension: int) -> np.ndarray:
    signs = local_signs(dimension)
    factors = 0.5 * (1.0 + points[:, None, :] * signs[None, :, :])
    grads = np.empty(factors.shape)
    for m in range(dimension):
        others = np.prod(np.delete(factors, m, axis=-1), axis=-1)
        grads[:, :, m] = 0.5 * signs[None, :, m] * others
    return grads

class QuadratureRule():
    """
    Tensor-product Gauss rule with the Q1 shape data evaluated at its points.

    Attributes:
        points (np.ndarray): Reference points, shape (Q, d).
        weights (np.ndarray): Reference weights, shape (Q,).
        shape (np.ndarray): Shape function values, shape (Q, 2^d).
        shape_gradients (np.ndarray): Reference gradients, shape (Q, 2^d, d).
    """

    def __init__(self, dimension: int, n_points: int):
        if dimension not in (2, 3):
            raise ValueError(f"Invalid dimension for {type(self).__name__}: {dimension}, must be 2 or 3")
        if n_points < 1:
            raise ValueError(f"Invalid number of points for {type(self).__name__}: {n_points}")
        xi, w = np.polynomial.legendre.leggauss(n_points)
        self.dimension = dimension
        self.n_points = n_points
        self.points = np.array(list(itertools.product(xi, repeat=dimension)))
        self.weights = np.array([np.prod(c) for c in itertools.product(w, repeat=dimension)])
        self.shape = shape_values(self.points, dimension)
        self.shape_gradients = shape_gradients(self.points, dimension)

    def __len__(self):
        return len(self.weights)

class FacetRule():
    """Gauss rule on the reference face xi[axis] = side of the reference cell."""

    def __init__(self, dimension: int, axis: int, side: int, n_points: int = 3):
        if side not in (-1, 1):
            raise ValueError(f"Invalid side for {type(self).__name__}: {side}, must be -1 or 1")
        xi, w = np.polynomial.legendre.leggauss(n_points)
        face = np.array(list(itertools.product(xi, repeat=dimension - 1)))
        self.dimension = dimension
        self.axis = axis
        self.side = side
        self.points = np.insert(face, axis, float(side), axis=1)
        self.weights = np.array([np.prod(c) for c in itertools.product(w, repeat=dimension - 1)])
        self.shape = shape_values(self.points, dimension)
        self.shape_gradients = shape_gradients(self.points, dimension)
