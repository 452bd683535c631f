"""The phase-labelled structured mesh. License: GPL-3.0"""

import numpy as np
from typing import Dict, List, Literal, Optional, Tuple
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from lagrangefsi.core.datatypes import Phase, PointRule
from lagrangefsi.core.exceptions import MeshError
from lagrangefsi.mesh.quadrature import QuadratureRule, FacetRule, local_signs

FLUID = 0
SOLID = 1

class SolidRegion(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["box", "ball"] = Field(description="Shape of the solid component")
    lower: Optional[Tuple[float, ...]] = Field(description="Lower corner of a box", default=None)
    upper: Optional[Tuple[float, ...]] = Field(description="Upper corner of a box", default=None)
    center: Optional[Tuple[float, ...]] = Field(description="Center of a ball", default=None)
    radius: Optional[float] = Field(description="Radius of a ball", default=None)

    @model_validator(mode="after")
    def check_shape(self):
        if self.kind == "box":
            if self.lower is None or self.upper is None or len(self.lower) != len(self.upper):
                raise ValueError("Invalid box: lower and upper corners of equal dimension are required")
            if any(lo >= hi for lo, hi in zip(self.lower, self.upper)):
                raise ValueError(f"Invalid box: lower {self.lower} is not below upper {self.upper}")
        else:
            if self.center is None or self.radius is None:
                raise ValueError("Invalid ball: center and radius are required")
            if self.radius <= 0:
                raise ValueError(f"Invalid ball: radius must be positive, got {self.radius}")
        return self

    @property
    def dimension(self) -> int:
        return len(self.lower) if self.kind == "box" else len(self.center)

    @classmethod
    def from_text(cls, text: str) -> "SolidRegion":
        """Parse `box x0 y0 [z0] x1 y1 [z1]` or `ball cx cy [cz] r`."""
        parts = text.split()
        if not parts or parts[0] not in ("box", "ball"):
            raise ValueError(f"Invalid solid region '{text}', expected 'box ...' or 'ball ...'")
        try:
            values = [float(p) for p in parts[1:]]
        except ValueError:
            raise ValueError(f"Invalid solid region '{text}', coordinates must be numbers")
        if parts[0] == "box":
            if len(values) not in (4, 6):
                raise ValueError(f"Invalid box '{text}', expected 4 or 6 coordinates")
            half = len(values) // 2
            return cls(kind="box", lower=tuple(values[:half]), upper=tuple(values[half:]))
        if len(values) not in (3, 4):
            raise ValueError(f"Invalid ball '{text}', expected 3 or 4 numbers")
        return cls(kind="ball", center=tuple(values[:-1]), radius=values[-1])

    def to_text(self) -> str:
        if self.kind == "box":
            return " ".join(["box"] + [repr(x) for x in self.lower + self.upper])
        return " ".join(["ball"] + [repr(x) for x in self.center] + [repr(self.radius)])

    def contains(self, points: np.ndarray) -> np.ndarray:
        if self.kind == "box":
            lower, upper = np.array(self.lower), np.array(self.upper)
            return np.all((points > lower) & (points < upper), axis=-1)
        return np.linalg.norm(points - np.array(self.center), axis=-1) < self.radius

    def inside(self, extent: Tuple[float, ...]) -> bool:
        extent = np.array(extent)
        if self.kind == "box":
            return bool(np.all(np.array(self.lower) > 0) and np.all(np.array(self.upper) < extent))
        center = np.array(self.center)
        return bool(np.all(center - self.radius > 0) and np.all(center + self.radius < extent))

    def gap(self, other: "SolidRegion") -> float:
        """Euclidean separation between two components, not positive when they touch or overlap."""
        if self.kind == "box" and other.kind == "box":
            lo1, hi1 = np.array(self.lower), np.array(self.upper)
            lo2, hi2 = np.array(other.lower), np.array(other.upper)
            separation = np.maximum(np.maximum(lo2 - hi1, lo1 - hi2), 0.0)
            if np.all(separation == 0.0):
                overlap = np.minimum(hi1, hi2) - np.maximum(lo1, lo2)
                return -float(np.min(overlap))
            return float(np.linalg.norm(separation))
        if self.kind == "ball" and other.kind == "ball":
            distance = np.linalg.norm(np.array(self.center) - np.array(other.center))
            return float(distance - self.radius - other.radius)
        box, ball = (self, other) if self.kind == "box" else (other, self)
        center = np.array(ball.center)
        nearest = np.clip(center, np.array(box.lower), np.array(box.upper))
        return float(np.linalg.norm(center - nearest) - ball.radius)

class GeometrySpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    dimension: int = Field(description="Space dimension, 2 or 3", default=2)
    extent: Tuple[float, ...] = Field(description="Container box [0, L1] x ... x [0, Ld]", default=(1.0, 1.0))
    h: float = Field(description="Mesh size", default=0.0625)
    solids: List[SolidRegion] = Field(description="Solid components strictly inside the container", default=[])

    @field_validator("dimension")
    @classmethod
    def check_dimension(cls, value):
        if value not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {value}")
        return value

    @field_validator("h")
    @classmethod
    def check_h(cls, value):
        if not value > 0:
            raise ValueError(f"h must be positive, got {value}")
        return value

    @model_validator(mode="after")
    def check_extent(self):
        if len(self.extent) != self.dimension:
            raise ValueError(f"extent has {len(self.extent)} entries for dimension {self.dimension}")
        if any(not L > 0 for L in self.extent):
            raise ValueError(f"extent must be positive, got {self.extent}")
        for solid in self.solids:
            if solid.dimension != self.dimension:
                raise ValueError(f"solid '{solid.to_text()}' does not have dimension {self.dimension}")
        return self

class PhaseMesh():
    """
    Uniform box grid of Q1 cells with fluid/solid labels.

    Nodes are numbered with the first axis fastest, cells likewise; the local
    node a of a cell sits at the corner whose k-th bit is bit k of a.
    Interface normals point from the fluid cell into the solid cell.
    """

    def __init__(self, spec: GeometrySpec, shape: Tuple[int, ...], cell_region: np.ndarray, n_gauss: int = 3):
        d = spec.dimension
        self.spec = spec
        self.dimension = d
        self.h = spec.h
        self.extent = tuple(spec.extent)
        self.shape = tuple(shape)
        node_shape = tuple(n + 1 for n in shape)
        self.node_strides = np.cumprod((1,) + node_shape[:-1])
        axes = [np.arange(n) * self.h for n in node_shape]
        grids = np.meshgrid(*axes, indexing="ij")
        self.nodes = np.stack([g.ravel(order="F") for g in grids], axis=-1)
        self.n_nodes = len(self.nodes)

        self.cell_index = np.indices(shape).reshape(d, -1, order="F").T
        origin = self.cell_index @ self.node_strides
        offsets = ((local_signs(d) + 1) // 2) @ self.node_strides
        self.cells = origin[:, None] + offsets[None, :]
        self.n_cells = len(self.cells)
        self.cell_region = cell_region
        self.cell_phase = np.where(cell_region >= 0, SOLID, FLUID)

        self.rules: Dict[PointRule, QuadratureRule] = {
            PointRule.Gauss: QuadratureRule(d, n_gauss),
            PointRule.Center: QuadratureRule(d, 1),
        }
        self.jacobian = (0.5 * self.h) ** d
        self.facet_jacobian = (0.5 * self.h) ** (d - 1)

        self._build_node_sets()
        self._build_interface()
        self._build_outer_facets()

    def _build_node_sets(self):
        self.node_cell_count = np.bincount(self.cells.ravel(), minlength=self.n_nodes)
        self.node_in_fluid = np.zeros(self.n_nodes, dtype=bool)
        self.node_in_solid = np.zeros(self.n_nodes, dtype=bool)
        self.node_in_fluid[self.cells[self.cell_phase == FLUID].ravel()] = True
        self.node_in_solid[self.cells[self.cell_phase == SOLID].ravel()] = True
        on_boundary = np.zeros(self.n_nodes, dtype=bool)
        for k, L in enumerate(self.extent):
            on_boundary |= np.isclose(self.nodes[:, k], 0.0) | np.isclose(self.nodes[:, k], L)
        self.boundary_nodes = np.flatnonzero(on_boundary)
        self.interface_nodes = np.flatnonzero(self.node_in_fluid & self.node_in_solid)

    def _build_interface(self):
        d = self.dimension
        cell_strides = np.cumprod((1,) + self.shape[:-1])
        fluid_cells, solid_cells, axes, normals, sides = [], [], [], [], []
        for k in range(d):
            lower = np.flatnonzero(self.cell_index[:, k] < self.shape[k] - 1)
            upper = lower + cell_strides[k]
            differ = self.cell_phase[lower] != self.cell_phase[upper]
            lower, upper = lower[differ], upper[differ]
            solid_above = self.cell_phase[upper] == SOLID
            fluid_cells.append(np.where(solid_above, lower, upper))
            solid_cells.append(np.where(solid_above, upper, lower))
            axes.append(np.full(len(lower), k))
            sign = np.where(solid_above, 1.0, -1.0)
            normal = np.zeros((len(lower), d))
            normal[:, k] = sign
            normals.append(normal)
            # the facet is the lower face of the solid cell when the solid lies above
            sides.append(np.where(solid_above, -1, 1))
        self.facet_fluid_cell = np.concatenate(fluid_cells).astype(int)
        self.facet_solid_cell = np.concatenate(solid_cells).astype(int)
        self.facet_axis = np.concatenate(axes).astype(int)
        self.facet_normal = np.concatenate(normals) if normals else np.zeros((0, d))
        self.facet_side = np.concatenate(sides).astype(int)
        self.n_facets = len(self.facet_solid_cell)

        signs = local_signs(d)
        self.facet_nodes = np.empty((self.n_facets, 2 ** (d - 1)), dtype=int)
        for f in range(self.n_facets):
            on_face = signs[:, self.facet_axis[f]] == self.facet_side[f]
            self.facet_nodes[f] = self.cells[self.facet_solid_cell[f]][on_face]
        self.facet_centers = self.nodes[self.facet_nodes].mean(axis=1)

        accumulated = np.zeros((self.n_nodes, d))
        for f in range(self.n_facets):
            accumulated[self.facet_nodes[f]] += self.facet_normal[f]
        norms = np.linalg.norm(accumulated, axis=1)
        self.node_normals = np.zeros((self.n_nodes, d))
        has = norms > 0
        self.node_normals[has] = accumulated[has] / norms[has, None]

        self.facet_rules: Dict[Tuple[int, int], FacetRule] = {}
        for k in range(d):
            for side in (-1, 1):
                self.facet_rules[(k, side)] = FacetRule(d, k, side, self.rules[PointRule.Gauss].n_points)

    def _build_outer_facets(self):
        cells, axes, sides = [], [], []
        for k in range(self.dimension):
            for side, index in ((-1, 0), (1, self.shape[k] - 1)):
                selected = np.flatnonzero(self.cell_index[:, k] == index)
                cells.append(selected)
                axes.append(np.full(len(selected), k))
                sides.append(np.full(len(selected), side))
        self.outer_cell = np.concatenate(cells)
        self.outer_axis = np.concatenate(axes)
        self.outer_side = np.concatenate(sides)
        self.outer_normal = np.zeros((len(self.outer_cell), self.dimension))
        self.outer_normal[np.arange(len(self.outer_cell)), self.outer_axis] = self.outer_side

    @property
    def n_outer_facets(self) -> int:
        return len(self.outer_cell)

    @property
    def cell_volume(self) -> float:
        return self.h ** self.dimension

    def cells_of(self, phase: Phase) -> np.ndarray:
        if phase == Phase.Fluid:
            return np.flatnonzero(self.cell_phase == FLUID)
        if phase == Phase.Solid:
            return np.flatnonzero(self.cell_phase == SOLID)
        return np.arange(self.n_cells)

    def nodes_of(self, phase: Phase) -> np.ndarray:
        if phase == Phase.Fluid:
            return np.flatnonzero(self.node_in_fluid)
        if phase == Phase.Solid:
            return np.flatnonzero(self.node_in_solid)
        return np.arange(self.n_nodes)

    def node_mask(self, phase: Phase) -> np.ndarray:
        mask = np.zeros(self.n_nodes, dtype=bool)
        mask[self.nodes_of(phase)] = True
        return mask

    def rule(self, rule: PointRule) -> QuadratureRule:
        return self.rules[PointRule(rule)]

    def physical_gradients(self, rule: PointRule) -> np.ndarray:
        """Shape function gradients in physical coordinates, shape (Q, 2^d, d)."""
        return self.rule(rule).shape_gradients * (2.0 / self.h)

    def weights(self, rule: PointRule) -> np.ndarray:
        return self.rule(rule).weights * self.jacobian

    def points(self, cells: np.ndarray, rule: PointRule) -> np.ndarray:
        """Physical coordinates of the rule points, shape (C, Q, d)."""
        return np.einsum("qa,cak->cqk", self.rule(rule).shape, self.nodes[self.cells[cells]])

    def interior_nodes(self, phase: Phase, depth: int = 1) -> np.ndarray:
        """
        Nodes surrounded by cells of the phase for `depth` rings.

        Returns:
            np.ndarray: Boolean mask over nodes.
        """
        in_phase = np.zeros(self.n_cells, dtype=bool)
        in_phase[self.cells_of(phase)] = True
        mask = self.node_cell_count == 2 ** self.dimension
        bad_cells = ~in_phase
        for _ in range(depth):
            touched = np.zeros(self.n_nodes, dtype=bool)
            touched[self.cells[bad_cells].ravel()] = True
            mask = mask & ~touched
            bad_cells = ~np.all(mask[self.cells], axis=1)
        return mask

def _grid_shape(spec: GeometrySpec) -> Tuple[int, ...]:
    shape = []
    for L in spec.extent:
        n = int(round(L / spec.h))
        if n < 1 or abs(n * spec.h - L) > 1e-9 * L:
            raise MeshError(f"Invalid resolution: extent {L} is not an integer multiple of h={spec.h}")
        shape.append(n)
    return tuple(shape)

def check_geometry(spec: GeometrySpec, require_solid: bool = True):
    """Checks that need no allocation: resolution, containment and separation of the solids."""
    if spec.h <= 0:
        raise MeshError(f"Invalid resolution h={spec.h}, must be positive")
    if require_solid and not spec.solids:
        raise MeshError("At least one solid component is required")
    for solid in spec.solids:
        if not solid.inside(spec.extent):
            raise MeshError(f"Solid '{solid.to_text()}' is not strictly inside the container {spec.extent}")
    for i, first in enumerate(spec.solids):
        for second in spec.solids[i + 1:]:
            if first.gap(second) <= 0:
                raise MeshError(f"Solids '{first.to_text()}' and '{second.to_text()}' touch or overlap")
    _grid_shape(spec)

def build_mesh(spec: GeometrySpec, require_solid: bool = True, n_gauss: int = 3) -> PhaseMesh:
    """
    Build the phase-labelled mesh of a geometry.

    A cell is solid when its center lies inside a solid component.

    Raises:
        MeshError: On nonpositive resolution, a solid outside or touching the
            container, touching or overlapping solids, or a solid resolved by
            no cell.
    """
    check_geometry(spec, require_solid)
    shape = _grid_shape(spec)
    d = spec.dimension
    cell_index = np.indices(shape).reshape(d, -1, order="F").T
    centers = (cell_index + 0.5) * spec.h
    cell_region = np.full(len(centers), -1)
    for r, solid in enumerate(spec.solids):
        inside = solid.contains(centers)
        if not np.any(inside):
            raise MeshError(f"Solid '{solid.to_text()}' contains no cell center at h={spec.h}")
        cell_region[inside] = r

    on_boundary = np.any((cell_index == 0) | (cell_index == np.array(shape) - 1), axis=1)
    if np.any(on_boundary & (cell_region >= 0)):
        raise MeshError(f"A solid cell touches the outer boundary at h={spec.h}")

    mesh = PhaseMesh(spec, shape, cell_region, n_gauss=n_gauss)
    if len(spec.solids) > 1:
        owner = np.full(mesh.n_nodes, -1)
        for r in range(len(spec.solids)):
            nodes = np.unique(mesh.cells[cell_region == r].ravel())
            if np.any(owner[nodes] >= 0):
                raise MeshError(f"Solids are closer than the mesh size h={spec.h}")
            owner[nodes] = r
    return mesh
