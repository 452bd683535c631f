"""Body forces with time derivatives, and the quadratic-in-time kappa forcings h and g. License: GPL-3.0"""

import numpy as np
from abc import ABC, abstractmethod
from typing import Callable, Optional, Sequence, Tuple
from pydantic import BaseModel, ConfigDict, Field

from lagrangefsi.core.datatypes import Phase
from lagrangefsi.kinematics.recovery import cell_gradient, strong_divergence
from lagrangefsi.operators.assembly import assemble_vector, assemble_facet_load, facet_gradient, facet_weights
from lagrangefsi.operators.elasticity import ElasticityTensor, OperatorOutput, InterfaceField, interface_flux

FD_STEP = 1e-5
FD_STEP_SECOND = 1e-4

class BodyForce(ABC):
    """
    A body force f(t, x) defined on all of the container, with time derivatives up to third order.

    Point arrays have shape (..., d); values are returned with the same shape.
    """

    def __init__(self, dimension: int):
        self.dimension = dimension

    @abstractmethod
    def value(self, t: float, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError(
            f"BodyForce {type(self).__name__} is missing the required 'value' method."
        )

    @abstractmethod
    def time_derivative(self, t: float, x: np.ndarray, order: int = 1) -> np.ndarray:
        raise NotImplementedError(
            f"BodyForce {type(self).__name__} is missing the required 'time_derivative' method."
        )

    @property
    def is_zero(self) -> bool:
        return False

    def evaluate(self, t: float, x: np.ndarray, order: int = 0) -> np.ndarray:
        if order == 0:
            return self.value(t, x)
        if order not in (1, 2, 3):
            raise ValueError(f"Invalid time derivative order {order} for {type(self).__name__}, must be 0..3")
        return self.time_derivative(t, x, order)

    def gradient(self, t: float, x: np.ndarray, order: int = 0) -> np.ndarray:
        """Spatial gradient [..., i, k] = d f^i / d x^k of the order-th time derivative, by central differences."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape + (self.dimension,))
        for k in range(self.dimension):
            e = np.zeros(self.dimension)
            e[k] = FD_STEP
            out[..., :, k] = (self.evaluate(t, x + e, order) - self.evaluate(t, x - e, order)) / (2.0 * FD_STEP)
        return out

    def second_derivative(self, t: float, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        """The second spatial derivative applied twice to u, d^2 f [u, u]."""
        s = FD_STEP_SECOND
        return (self.value(t, x + s * u) - 2.0 * self.value(t, x) + self.value(t, x - s * u)) / (s * s)

    def __call__(self, t: float, x: np.ndarray) -> np.ndarray:
        return self.value(t, x)

class ZeroForce(BodyForce):

    def value(self, t: float, x: np.ndarray) -> np.ndarray:
        return np.zeros(np.shape(x))

    def time_derivative(self, t: float, x: np.ndarray, order: int = 1) -> np.ndarray:
        return np.zeros(np.shape(x))

    def gradient(self, t: float, x: np.ndarray, order: int = 0) -> np.ndarray:
        return np.zeros(np.shape(x) + (self.dimension,))

    def second_derivative(self, t: float, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        return np.zeros(np.shape(x))

    @property
    def is_zero(self) -> bool:
        return True

class ConstantForce(BodyForce):
    """A force constant in space and time, e.g. gravity."""

    def __init__(self, vector: Sequence[float]):
        super().__init__(len(vector))
        self.vector = np.asarray(vector, dtype=float)

    def value(self, t: float, x: np.ndarray) -> np.ndarray:
        return np.broadcast_to(self.vector, np.shape(x)).copy()

    def time_derivative(self, t: float, x: np.ndarray, order: int = 1) -> np.ndarray:
        return np.zeros(np.shape(x))

    def gradient(self, t: float, x: np.ndarray, order: int = 0) -> np.ndarray:
        return np.zeros(np.shape(x) + (self.dimension,))

    def second_derivative(self, t: float, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        return np.zeros(np.shape(x))

    @property
    def is_zero(self) -> bool:
        return not np.any(self.vector)

class PulseForce(BodyForce):
    """f = amplitude sin(omega t) e_1."""

    def __init__(self, dimension: int, amplitude: float = 1.0, omega: float = 2.0 * np.pi):
        super().__init__(dimension)
        self.amplitude = amplitude
        self.omega = omega

    def _direction(self, x: np.ndarray) -> np.ndarray:
        e = np.zeros(np.shape(x))
        e[..., 0] = 1.0
        return e

    def value(self, t: float, x: np.ndarray) -> np.ndarray:
        return self.amplitude * np.sin(self.omega * t) * self._direction(x)

    def time_derivative(self, t: float, x: np.ndarray, order: int = 1) -> np.ndarray:
        w = self.omega
        factor = [w * np.cos(w * t), -w ** 2 * np.sin(w * t), -w ** 3 * np.cos(w * t)][order - 1]
        return self.amplitude * factor * self._direction(x)

    def gradient(self, t: float, x: np.ndarray, order: int = 0) -> np.ndarray:
        return np.zeros(np.shape(x) + (self.dimension,))

    def second_derivative(self, t: float, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        return np.zeros(np.shape(x))

    @property
    def is_zero(self) -> bool:
        return self.amplitude == 0.0

class CallableForce(BodyForce):
    """
    A force given by closed-form callables.

    Parameters:
        value_fn (Callable): (t, x) -> f(t, x).
        derivative_fns (Sequence[Callable]): (t, x) -> f_t, f_tt, f_ttt; missing orders fall back to central differences in t.
    """

    def __init__(self, dimension: int, value_fn: Callable, derivative_fns: Sequence[Callable] = ()):
        super().__init__(dimension)
        self.value_fn = value_fn
        self.derivative_fns = list(derivative_fns)

    def value(self, t: float, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.value_fn(t, np.asarray(x, dtype=float)), dtype=float)

    def time_derivative(self, t: float, x: np.ndarray, order: int = 1) -> np.ndarray:
        if order <= len(self.derivative_fns):
            return np.asarray(self.derivative_fns[order - 1](t, np.asarray(x, dtype=float)), dtype=float)
        s = FD_STEP_SECOND
        previous = lambda tau: self.evaluate(tau, x, order - 1)
        return (previous(t + s) - previous(t - s)) / (2.0 * s)

def make_forcing(preset: str, dimension: int, amplitude: float = 1.0, omega: float = 1.0) -> BodyForce:
    """
    The body force of a named preset: `zero`, `gravity` (-amplitude e_d) or `pulse`.

    Raises:
        ValueError: On an unknown preset.
    """
    if preset == "zero":
        return ZeroForce(dimension)
    if preset == "gravity":
        vector = np.zeros(dimension)
        vector[-1] = -amplitude
        return ConstantForce(vector)
    if preset == "pulse":
        return PulseForce(dimension, amplitude, omega)
    raise ValueError(f"Unknown forcing preset '{preset}', expected zero, gravity or pulse")


class KappaForcingProfile(BaseModel):
    """
    h(t) = -[c^{ijkl} U^k,_l],_j and g(t) = [c^{ijkl} U^k,_l] N_j for U = u0 + t w1 + t^2/2 w2.

    Each coefficient list holds the values for u0, w1, w2; evaluation combines them
    as c0 + t c1 + t^2/2 c2, so h and g are exactly quadratic in t.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    bulk_weak: Tuple[np.ndarray, np.ndarray, np.ndarray] = Field(description="int c grad U_n : grad phi over the solid")
    flux_weak: Tuple[np.ndarray, np.ndarray, np.ndarray] = Field(description="int_Gamma (c grad U_n) N . phi")
    h_strong: Tuple[np.ndarray, np.ndarray, np.ndarray] = Field(description="Nodal strong values of -div(c grad U_n)")
    g_facets: Tuple[np.ndarray, np.ndarray, np.ndarray] = Field(description="(c grad U_n) N at the facet points")
    interior: np.ndarray = Field(description="Solid nodes where the strong values are reliable")
    normals: np.ndarray = Field(description="Interface facet normals")
    mesh: object = Field(description="The PhaseMesh", repr=False)

    @classmethod
    def build(cls, u0: np.ndarray, w1: np.ndarray, w2: np.ndarray, c: ElasticityTensor, mesh) -> "KappaForcingProfile":
        cells = mesh.cells_of(Phase.Solid)
        bulk, flux, strong, facets = [], [], [], []
        for U in (u0, w1, w2):
            U = np.asarray(U, dtype=float)
            P = c.contract(cell_gradient(U, mesh, cells))
            bulk.append(assemble_vector(P, mesh, cells))
            strong.append(-strong_divergence(P, mesh, Phase.Solid))
            g = interface_flux(c.contract(facet_gradient(U, mesh)), mesh)
            flux.append(assemble_facet_load(g, mesh))
            facets.append(g)
        return cls(
            bulk_weak=tuple(bulk),
            flux_weak=tuple(flux),
            h_strong=tuple(strong),
            g_facets=tuple(facets),
            interior=mesh.interior_nodes(Phase.Solid, depth=2),
            normals=mesh.facet_normal,
            mesh=mesh,
        )

    @staticmethod
    def combine(coefficients, t: float) -> np.ndarray:
        return coefficients[0] + t * coefficients[1] + 0.5 * t * t * coefficients[2]

    def h_weak(self, t: float) -> np.ndarray:
        """L2 pairing int_solid h . phi, which picks up the interface flux by integration by parts."""
        return self.combine(self.bulk_weak, t) + self.combine(self.flux_weak, t)

    def g_weak(self, t: float) -> np.ndarray:
        return self.combine(self.flux_weak, t)

    def load(self, t: float, include_interface_flux: bool = True) -> np.ndarray:
        """The kappa-free part of the right-hand side, h - g or h alone."""
        if include_interface_flux:
            return self.combine(self.bulk_weak, t)
        return self.h_weak(t)

    def h(self, t: float) -> OperatorOutput:
        return OperatorOutput(values=self.combine(self.h_strong, t), weak=self.h_weak(t), phase=Phase.Solid, interior=self.interior)

    def g(self, t: float) -> InterfaceField:
        values = self.combine(self.g_facets, t)
        weights = facet_weights(self.mesh)
        mean = np.einsum("fq,fqi->fi", weights, values) / np.maximum(weights.sum(axis=1), 1e-300)[:, None]
        return InterfaceField(values=values, mean=mean, normals=self.normals, mesh=self.mesh)

def forcing_hg(t: float, u0: np.ndarray, w1: np.ndarray, w2: np.ndarray, c: ElasticityTensor, mesh,
               profile: Optional[KappaForcingProfile] = None) -> Tuple[OperatorOutput, InterfaceField]:
    """
    The kappa forcings at time t.

    Returns:
        Tuple[OperatorOutput, InterfaceField]: h(t) on the solid and g(t) on the interface.
    """
    if profile is None:
        profile = KappaForcingProfile.build(u0, w1, w2, c, mesh)
    return profile.h(t), profile.g(t)
