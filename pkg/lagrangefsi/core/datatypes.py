import numpy as np
from enum import Enum
from typing import Optional, List, Dict, Any
from pydantic import BaseModel, ConfigDict, Field, model_validator

class Phase(str, Enum):
    Fluid = "fluid"
    Solid = "solid"
    Both = "both"

class PointRule(str, Enum):
    Gauss = "gauss"
    Center = "center"

class FinishReason(str, Enum):
    Finished = "finished"
    NewtonFailure = "newton_failure"
    DiffeomorphismLoss = "diffeomorphism_loss"
    NormBlowUp = "norm_blow_up"
    Error = "error"

class SolveReport(BaseModel):
    iterations: int = Field(description="The number of iterations performed", default=0)
    residual_norm: float = Field(description="The final residual norm", default=0.0)
    converged: bool = Field(description="Whether the requested tolerance was reached", default=True)
    tolerance: float = Field(description="The requested tolerance", default=0.0)

    @model_validator(mode="after")
    def check_converged(self):
        if self.converged and not self.residual_norm <= self.tolerance:
            raise ValueError(
                f"Invalid SolveReport: converged with residual {self.residual_norm!r} above tolerance {self.tolerance!r}"
            )
        return self

    def to_dict(self):
        return {"iterations": self.iterations, "residual_norm": self.residual_norm, "converged": self.converged}

class SolverParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    nu: float = Field(description="Fluid kinematic viscosity", gt=0, default=1.0)
    lam: float = Field(description="Lame constant lambda of the solid", gt=0, default=1.0)
    mu: float = Field(description="Lame constant mu of the solid", gt=0, default=1.0)
    kappa: float = Field(description="Artificial viscosity of the solid", ge=0, default=1e-2)
    eps_pen: float = Field(description="Penalty parameter of the pressure law", gt=0, default=1e-4)
    dt: float = Field(description="Time step", gt=0, default=1e-3)
    t_end: float = Field(description="Final time", gt=0, default=0.2)
    newton_tol: float = Field(description="Absolute Newton tolerance on the residual 2-norm", gt=0, default=1e-10)
    newton_maxit: int = Field(description="Maximum Newton iterations per step", ge=1, default=25)
    cg_tol: float = Field(description="Relative residual tolerance of the SPD solves", gt=0, default=1e-12)
    cg_maxit: int = Field(description="Maximum conjugate gradient iterations", ge=1, default=10000)
    include_interface_flux: bool = Field(description="Add the kappa interface flux g to the traction balance", default=True)
    include_kappa_forcing: bool = Field(description="Add the kappa forcings h and g at all", default=True)
    freeze_cofactor: bool = Field(description="Freeze the cofactor matrix to the identity", default=False)
    z_ceiling: float = Field(description="Blow-up factor of the Z-norm proxy relative to its first value", gt=1, default=1e6)
    compat_tol: float = Field(description="Tolerance under which compatibility violations are accepted", gt=0, default=1e-8)

    @model_validator(mode="after")
    def check_dt(self):
        if self.dt > self.t_end:
            raise ValueError(f"Invalid SolverParams: dt={self.dt!r} exceeds t_end={self.t_end!r}")
        return self

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

MaterialParams = SolverParams

class DeformationState(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    t: float = Field(description="The time level", default=0.0)
    eta: np.ndarray = Field(description="Nodal configuration, shape (n_nodes, d)")
    v: np.ndarray = Field(description="Nodal velocity, shape (n_nodes, d)")
    q: np.ndarray = Field(description="Cellwise pressure, zero on solid cells, shape (n_cells,)")

    def copy(self) -> "DeformationState":
        return DeformationState(t=self.t, eta=self.eta.copy(), v=self.v.copy(), q=self.q.copy())

    def to_dict(self):
        return {"t": self.t, "eta": self.eta.tolist(), "v": self.v.tolist(), "q": self.q.tolist()}

class StepReport(BaseModel):
    step: int = Field(description="Index of the attempted step (1-based)", default=0)
    t: float = Field(description="Time the step tried to reach", default=0.0)
    newton_iterations: int = Field(description="Newton iterations used", default=0)
    residual_norm: float = Field(description="Residual norm of the accepted iterate", default=0.0)
    converged: bool = Field(description="Whether Newton converged", default=True)
    constraint_residual: float = Field(description="L2 norm of a^k_i v^i,_k on the fluid", default=0.0)
    min_det: float = Field(description="Minimum of det(grad eta) over quadrature points", default=1.0)
    kinetic_energy: float = Field(description="Kinetic energy after the step", default=0.0)
    elastic_energy: float = Field(description="Elastic energy after the step", default=0.0)
    failure: Optional[FinishReason] = Field(description="The failure reason if the step was rejected", default=None)
    message: str = Field(description="Failure details", default="")

class DiagnosticsRecord(BaseModel):
    step: int = Field(description="Step index, 0 for the initial state", default=0)
    t: float = Field(description="Time level", default=0.0)
    kinetic_energy: float = Field(description="1/2 |v|^2 over the domain", default=0.0)
    elastic_energy: float = Field(description="St. Venant-Kirchhoff energy of the solid", default=0.0)
    total_energy: float = Field(description="Kinetic plus elastic energy", default=0.0)
    v_h1: float = Field(description="H1 norm of the velocity", default=0.0)
    eta_h2_solid: float = Field(description="Discrete H2 norm of the solid displacement", default=0.0)
    q_l2: float = Field(description="L2 norm of the fluid pressure", default=0.0)
    constraint_residual: float = Field(description="L2 norm of the Lagrangian divergence on the fluid", default=0.0)
    min_det: float = Field(description="Minimum det(grad eta)", default=1.0)
    zt_proxy: float = Field(description="Accumulated Z-norm proxy", default=0.0)
    newton_iterations: int = Field(description="Newton iterations of the step", default=0)
    residual_norm: float = Field(description="Residual norm of the accepted iterate", default=0.0)

    def to_dict(self):
        return {name: getattr(self, name) for name in CSV_COLUMNS}

CSV_COLUMNS = [
    "step",
    "t",
    "kinetic_energy",
    "elastic_energy",
    "total_energy",
    "v_h1",
    "eta_h2_solid",
    "q_l2",
    "constraint_residual",
    "min_det",
    "zt_proxy",
    "newton_iterations",
    "residual_norm",
]

CSV_SCHEMA_VERSION = 1

class CompatReport(BaseModel):
    c1_tangential: float = Field(description="max |[grad u0 N]_tan| on the interface", default=0.0)
    c1_boundary: float = Field(description="max |w1|, |w2| on the outer boundary", default=0.0)
    c1_interface_balance: float = Field(description="max |nu lap u0 - grad q0| on the interface", default=0.0)
    c2: float = Field(description="max tangential first-derivative traction mismatch", default=0.0)
    c3: float = Field(description="max tangential second-derivative traction mismatch", default=0.0)
    c4: float = Field(description="max fluid/solid mismatch of w2 on the interface", default=0.0)
    tolerance: float = Field(description="The acceptance tolerance", default=1e-8)
    member_norms: Dict[str, float] = Field(description="L2 norms of u0, w1, w2, w3, q0, q1, q2", default={})

    @property
    def violations(self) -> Dict[str, float]:
        return {
            "c1_tangential": self.c1_tangential,
            "c1_boundary": self.c1_boundary,
            "c1_interface_balance": self.c1_interface_balance,
            "c2": self.c2,
            "c3": self.c3,
            "c4": self.c4,
        }

    @property
    def compatible(self) -> bool:
        return all(value <= self.tolerance for value in self.violations.values())

    def to_dict(self):
        result = dict(self.violations)
        result["compatible"] = self.compatible
        result.update({f"norm.{k}": v for k, v in self.member_norms.items()})
        return result

class Trajectory(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    states: List[DeformationState] = Field(description="Accepted states, the initial one first", default=[])
    records: List[DiagnosticsRecord] = Field(description="Diagnostics of every accepted state", default=[])
    reports: List[StepReport] = Field(description="Reports of every attempted step", default=[])
    t_end: float = Field(description="Requested final time", default=0.0)
    t_star: float = Field(description="Existence-time proxy: failure time or t_end", default=0.0)
    finish_reason: FinishReason = Field(description="Why the march stopped", default=FinishReason.Finished)
    compat_report: Optional[CompatReport] = Field(description="Compatibility report of the initial data", default=None)

    @property
    def reached_end(self) -> bool:
        return self.finish_reason == FinishReason.Finished

class Verdict(BaseModel):
    name: str = Field(description="The experiment or property name")
    passed: bool = Field(description="Whether the property holds")
    measured: Dict[str, float] = Field(description="The measured values", default={})
    detail: str = Field(description="Free-form detail", default="")

    def to_line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        values = " ".join(f"{k}={v!r}" for k, v in self.measured.items())
        return f"verdict.{self.name} = {status} {values}".rstrip()

class LemmaKeyReport(BaseModel):
    eps_values: List[float] = Field(description="The penalty-like parameters tried", default=[])
    sup_norms: List[float] = Field(description="sup_t |L(u)(t)| per epsilon", default=[])
    bound: float = Field(description="|g|_{L^inf L^2} + |L(u0)|", default=0.0)
    slack: List[float] = Field(description="bound - sup norm per epsilon", default=[])
    integration_tolerance: float = Field(description="Estimated time-integration error", default=0.0)
    valid: bool = Field(description="Whether the integration tolerance is below 1% of the bound", default=True)

    def to_dict(self):
        return self.model_dump()

class SweepRow(BaseModel):
    kappa: float = Field(description="Artificial viscosity of the run")
    t_star: float = Field(description="Existence-time proxy")
    reached_end: bool = Field(description="Whether the run reached t_end")
    zt_norm: float = Field(description="Z-norm proxy at T*")
    finish_reason: FinishReason = Field(description="Why the run stopped")
    run_name: str = Field(description="Name of the run directory", default="")

class SweepTable(BaseModel):
    t_end: float = Field(description="Requested final time")
    rows: List[SweepRow] = Field(description="Rows sorted by kappa descending", default=[])

    @property
    def t_star_ratio(self) -> float:
        values = [row.t_star for row in self.rows]
        if not values or max(values) == 0.0:
            return 0.0
        return min(values) / max(values)

    def to_dict(self):
        return {"t_end": self.t_end, "rows": [row.model_dump() for row in self.rows]}

class ConvergenceRow(BaseModel):
    kappa: float = Field(description="Artificial viscosity of the run")
    distance: float = Field(description="Discrete L2(0,T;H1) distance to the reference run")

class ConvergenceTable(BaseModel):
    reference_kappa: float = Field(description="Kappa of the reference run")
    rows: List[ConvergenceRow] = Field(description="Rows sorted by kappa descending", default=[])
    horizon: Optional[float] = Field(description="End of the time interval the distances cover", default=None)

    @property
    def monotone(self) -> bool:
        distances = [row.distance for row in self.rows if row.kappa != self.reference_kappa]
        return all(b < a for a, b in zip(distances, distances[1:]))

class GrowthRow(BaseModel):
    delta: float = Field(description="Perturbation amplitude")
    ratio: float = Field(description="sup_t |v_delta - v| / delta")

class GrowthTable(BaseModel):
    rows: List[GrowthRow] = Field(description="One row per perturbation amplitude", default=[])

    @property
    def spread(self) -> float:
        ratios = [row.ratio for row in self.rows if row.delta != 0.0]
        if not ratios or max(ratios) == 0.0:
            return 0.0
        return (max(ratios) - min(ratios)) / max(ratios)

class RateRow(BaseModel):
    level: float = Field(description="Mesh size or time step")
    error: float = Field(description="Error at that level")

class RateTable(BaseModel):
    family: str = Field(description="Name of the manufactured family")
    variable: str = Field(description="Refined variable, h or dt")
    rows: List[RateRow] = Field(description="Rows from coarse to fine", default=[])
    rate: float = Field(description="Least-squares fitted rate", default=0.0)
    monotone: bool = Field(description="Whether errors decrease along the ladder", default=True)

class EnergyTrace(BaseModel):
    times: List[float] = Field(description="Time levels", default=[])
    kinetic: List[float] = Field(description="Kinetic energies", default=[])
    elastic: List[float] = Field(description="Elastic energies", default=[])
    total: List[float] = Field(description="Total energies", default=[])

    def max_increase(self) -> float:
        increases = [b - a for a, b in zip(self.total, self.total[1:])]
        return max(increases, default=0.0)

class ZNorm(BaseModel):
    value: float = Field(description="The accumulated proxy", default=0.0)
    terms: Dict[str, float] = Field(description="Contribution of each member", default={})
    proxy_terms: List[str] = Field(description="Members approximated by difference quotients", default=[])

class RunSummary(BaseModel):
    verdicts: List[Verdict] = Field(description="Verdict per experiment", default=[])
    t_star: Optional[float] = Field(description="Existence-time proxy of the main run", default=None)
    final_norms: Dict[str, Any] = Field(description="Final diagnostics and compatibility values", default={})
    wall_clock: float = Field(description="Elapsed seconds", default=0.0)
    config_echo: str = Field(description="The emitted configuration", default="")

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)
