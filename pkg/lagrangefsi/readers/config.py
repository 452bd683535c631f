"""The run configuration models. License: GPL-3.0"""

from typing import Any, Dict, List, Literal, Optional
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from lagrangefsi.core.datatypes import SolverParams
from lagrangefsi.core.exceptions import MeshError
from lagrangefsi.mesh.phase_mesh import GeometrySpec, SolidRegion, check_geometry

FORCING_PRESETS = ("zero", "gravity", "pulse")

def _split_list(value: Any) -> Any:
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value

class GeometryConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dimension: int = Field(description="Space dimension, 2 or 3", default=2)
    extent: Optional[List[float]] = Field(description="Container side lengths, comma-separated (default 1.0 per axis)", default=None)
    h: float = Field(description="Mesh size, the extent must be a multiple of it", gt=0, default=0.0625)
    solids: Optional[List[SolidRegion]] = Field(
        description="Solid components separated by ';', each 'box x0 y0 [z0] x1 y1 [z1]' or 'ball cx cy [cz] r' (default the centred half box)",
        default=None,
    )

    @field_validator("extent", mode="before")
    @classmethod
    def split_extent(cls, value):
        return _split_list(value)

    @field_validator("solids", mode="before")
    @classmethod
    def split_solids(cls, value):
        if isinstance(value, str):
            try:
                return [SolidRegion.from_text(item.strip()) for item in value.split(";") if item.strip()]
            except ValidationError as e:
                raise ValueError(e.errors()[0]["msg"])
        return value

    @model_validator(mode="after")
    def check_container(self):
        if self.dimension not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {self.dimension}")
        if self.extent is None:
            self.extent = [1.0] * self.dimension
        if self.solids is None:
            self.solids = [
                SolidRegion(
                    kind="box",
                    lower=tuple(0.25 * L for L in self.extent),
                    upper=tuple(0.75 * L for L in self.extent),
                )
            ]
        try:
            spec = self.geometry_spec()
        except ValidationError as e:
            raise ValueError(e.errors()[0]["msg"])
        try:
            check_geometry(spec)
        except MeshError as e:
            raise ValueError(str(e))
        return self

    def geometry_spec(self) -> GeometrySpec:
        return GeometrySpec(dimension=self.dimension, extent=tuple(self.extent), h=self.h, solids=list(self.solids))

class PhysicsConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    nu: float = Field(description="Fluid kinematic viscosity", gt=0, default=1.0)
    lam: float = Field(description="Lame constant lambda of the solid", gt=0, default=1.0)
    mu: float = Field(description="Lame constant mu of the solid", gt=0, default=1.0)

class NumericsConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kappa: float = Field(description="Artificial viscosity of the solid", ge=0, default=1e-2)
    eps_pen: float = Field(description="Penalty parameter of the pressure law", gt=0, default=1e-4)
    t_end: float = Field(description="Final time", gt=0, default=0.2)
    dt: float = Field(description="Time step, at most t_end", gt=0, default=1e-3)
    newton_tol: float = Field(description="Absolute Newton tolerance", gt=0, default=1e-10)
    newton_maxit: int = Field(description="Maximum Newton iterations per step", ge=1, default=25)
    cg_tol: float = Field(description="Relative tolerance of the SPD solves", gt=0, default=1e-12)
    cg_maxit: int = Field(description="Maximum conjugate gradient iterations", ge=1, default=10000)
    include_interface_flux: bool = Field(description="Add the kappa interface flux to the traction balance", default=True)
    include_kappa_forcing: bool = Field(description="Add the kappa forcings at all", default=True)
    freeze_cofactor: bool = Field(description="Freeze the cofactor matrix to the identity", default=False)
    z_ceiling: float = Field(description="Blow-up factor of the Z-norm proxy", gt=1, default=1e6)
    compat_tol: float = Field(description="Tolerance of the compatibility check", gt=0, default=1e-8)
    checkpoint_every: int = Field(description="Write a state checkpoint every n steps, 0 disables", ge=0, default=0)

    @field_validator("dt")
    @classmethod
    def check_dt(cls, value, info):
        t_end = info.data.get("t_end")
        if t_end is not None and value > t_end:
            raise ValueError(f"dt={value!r} exceeds t_end={t_end!r}")
        return value

class DataConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    initial_data: Literal["zero", "solid_bump", "fluid_swirl", "file"] = Field(description="Initial velocity preset", default="solid_bump")
    amplitude: float = Field(description="Amplitude of the initial velocity preset", ge=0, default=1e-2)
    initial_data_file: Optional[str] = Field(description="Nodal velocity file of the 'file' preset", default=None)
    forcing: Literal["zero", "gravity", "pulse"] = Field(description="Body force preset", default="zero")
    forcing_amplitude: float = Field(description="Amplitude of the body force", default=1.0)
    forcing_omega: float = Field(description="Angular frequency of the pulse force", default=1.0)

    @model_validator(mode="after")
    def check_file(self):
        if self.initial_data == "file" and not self.initial_data_file:
            raise ValueError("initial_data = file requires initial_data_file")
        return self

class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kappa_list: List[float] = Field(description="Artificial viscosities of the kappa sweep", default=[0.1, 0.01, 0.001, 0.0001])
    reference_kappa: float = Field(description="Kappa of the convergence reference run", gt=0, default=1e-4)
    sweep_t_end: float = Field(description="Final time of the kappa sweep", gt=0, default=0.5)
    delta_list: List[float] = Field(description="Perturbation amplitudes of the uniqueness study", default=[0.001, 0.0001, 1e-05])
    eps_list: List[float] = Field(description="Penalty parameters of the penalty consistency study", default=[0.01, 0.001, 0.0001])
    lemma_eps_list: List[float] = Field(description="Parameters of the lemma key trials", default=[1.0, 0.01, 0.0001, 1e-06])
    lemma_trials: int = Field(description="Random source profiles of the lemma key trials", ge=1, default=3)
    lemma_t_end: float = Field(description="Final time of the lemma key trials", gt=0, default=1.0)
    lemma_dt: float = Field(description="Time step of the lemma key trials", gt=0, default=0.01)
    kappa_ratio_threshold: float = Field(description="Minimum accepted min/max existence time ratio", gt=0, default=0.5)
    penalty_ratio_threshold: float = Field(description="Maximum accepted successive constraint residual ratio", gt=0, default=0.75)
    perturbation_spread: float = Field(description="Maximum accepted relative spread of the growth ratios", gt=0, default=0.1)

    @field_validator("kappa_list", "delta_list", "eps_list", "lemma_eps_list", mode="before")
    @classmethod
    def split(cls, value):
        return _split_list(value)

    @field_validator("kappa_list", "eps_list", "lemma_eps_list")
    @classmethod
    def check_positive(cls, value):
        if not value:
            raise ValueError("the list must not be empty")
        if any(not x > 0 for x in value):
            raise ValueError(f"all values must be positive, got {value}")
        return value

    @field_validator("delta_list")
    @classmethod
    def check_nonnegative(cls, value):
        if any(x < 0 for x in value):
            raise ValueError(f"all values must be nonnegative, got {value}")
        return value

class OutputConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    directory: str = Field(description="Output directory", default="fsi_out")
    seed: int = Field(description="Seed of every randomized test", ge=0, default=0)

class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    geometry: GeometryConfig = Field(description="The container, the solids and the mesh size", default_factory=GeometryConfig)
    physics: PhysicsConfig = Field(description="Material constants", default_factory=PhysicsConfig)
    numerics: NumericsConfig = Field(description="Regularization, time stepping and tolerances", default_factory=NumericsConfig)
    data: DataConfig = Field(description="Initial data and forcing", default_factory=DataConfig)
    experiment: ExperimentConfig = Field(description="Experiment lists and thresholds", default_factory=ExperimentConfig)
    output: OutputConfig = Field(description="Output location and seed", default_factory=OutputConfig)

    def solver_params(self) -> SolverParams:
        n = self.numerics
        return SolverParams(
            nu=self.physics.nu,
            lam=self.physics.lam,
            mu=self.physics.mu,
            kappa=n.kappa,
            eps_pen=n.eps_pen,
            dt=n.dt,
            t_end=n.t_end,
            newton_tol=n.newton_tol,
            newton_maxit=n.newton_maxit,
            cg_tol=n.cg_tol,
            cg_maxit=n.cg_maxit,
            include_interface_flux=n.include_interface_flux,
            include_kappa_forcing=n.include_kappa_forcing,
            freeze_cofactor=n.freeze_cofactor,
            z_ceiling=n.z_ceiling,
            compat_tol=n.compat_tol,
        )

    def geometry_spec(self) -> GeometrySpec:
        return self.geometry.geometry_spec()

    def replace(self, **sections: Dict[str, Any]) -> "RunConfig":
        """
        A validated copy with some keys of some sections replaced.

        Example:
            config.replace(numerics={"kappa": 1e-3}, output={"directory": "out/k"})
        """
        data = self.model_dump()
        for section, values in sections.items():
            if section not in data:
                raise ValueError(f"Unknown section '{section}'")
            data[section].update(values)
        return RunConfig.model_validate(data)

def describe_defaults() -> str:
    """The documented defaults of every key, one `[section]` block each."""
    lines = []
    defaults = RunConfig()
    for section in RunConfig.model_fields:
        lines.append(f"[{section}]")
        model = getattr(defaults, section)
        for key, field in type(model).model_fields.items():
            value = getattr(model, key)
            if isinstance(value, list):
                value = ", ".join(x.to_text() if isinstance(x, SolidRegion) else repr(x) for x in value)
            lines.append(f"  {key} = {value}  ({field.description})")
    return "\n".join(lines)
