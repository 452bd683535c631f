"""
The acceptance suite: every property the solver promises, as PASS/FAIL verdicts.

Each check takes the run configuration and a seeded generator and returns its
verdicts. Randomized inputs all derive from `output.seed`.
"""

import hashlib
import os
import tempfile
import numpy as np
from typing import Callable, Dict, List, Optional, Sequence
from colorama import Fore, Style
from tqdm import tqdm

from lagrangefsi.core.datatypes import LemmaKeyReport, Phase, RateTable, SolverParams, SweepTable, Verdict
from lagrangefsi.core.exceptions import ExperimentError, SolverError
from lagrangefsi.metrics import ThresholdMetric, RangeMetric, AllMetric, flag
from lagrangefsi.mesh.phase_mesh import GeometrySpec, SolidRegion, build_mesh
from lagrangefsi.kinematics.tensors import cofactor_array, cofactor_jet, det_array
from lagrangefsi.kinematics.recovery import cell_gradient, strong_divergence
from lagrangefsi.operators.assembly import lumped_mass
from lagrangefsi.operators.elasticity import ElasticityTensor, stiffness_L, linear_L, nonlinear_N, traction_G
from lagrangefsi.compat.forcing import CallableForce, ZeroForce
from lagrangefsi.compat.initial_data import solid_bump
from lagrangefsi.compat.jets import finite_difference_jet
from lagrangefsi.compat.hierarchy import CompatData, build_q0, build_q1, solid_w2, elasticity_of
from lagrangefsi.stepper.problem import FSIProblem
from lagrangefsi.stepper.stepper import march, run
from lagrangefsi.experiments.norms import energy_trace
from lagrangefsi.experiments.lemma_key import lemma_key_suite, scalar_mode_check
from lagrangefsi.experiments.mms import fitted_rate, mms_convergence
from lagrangefsi.experiments.sweeps import (
    common_levels,
    convergence_table,
    kappa_runs,
    perturbation_study,
    run_jobs,
    sweep_table,
    h1_problem,
)
from lagrangefsi.writers.outputs import write_series

VERIFY_COLOR = f"{Fore.GREEN}"
VERIFY_FAIL_COLOR = f"{Fore.RED}"

def standard_geometry(h: float) -> GeometrySpec:
    """Unit square with the centred half box as solid."""
    return GeometrySpec(
        dimension=2,
        extent=(1.0, 1.0),
        h=h,
        solids=[SolidRegion(kind="box", lower=(0.25, 0.25), upper=(0.75, 0.75))],
    )

def _rotation(theta: float) -> np.ndarray:
    return np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])

def _relative(difference: np.ndarray, reference: np.ndarray) -> float:
    return float(np.max(np.abs(difference)) / max(np.max(np.abs(reference)), 1e-300))

def piola_residual(h: float) -> float:
    """max |a^k_i,_k| over the nodes two layers inside the container for a smooth nonlinear map."""
    mesh = build_mesh(GeometrySpec(dimension=2, extent=(1.0, 1.0), h=h), require_solid=False)
    x = mesh.nodes
    displacement = np.stack([x[:, 0] * np.sin(np.pi * x[:, 1]), x[:, 1] ** 2 * np.sin(np.pi * x[:, 0])], axis=1)
    cells = mesh.cells_of(Phase.Both)
    a = cofactor_array(cell_gradient(x + 0.1 * displacement, mesh, cells))
    divergence = strong_divergence(np.swapaxes(a, -1, -2), mesh, Phase.Both)
    interior = mesh.interior_nodes(Phase.Both, depth=2)
    return float(np.max(np.abs(divergence[interior])))

def check_kinematics(config, rng: np.random.Generator) -> List[Verdict]:
    verdicts = []
    for d in (2, 3):
        F = np.eye(d) + 0.2 * rng.standard_normal((200, d, d))
        a = cofactor_array(F)
        det = det_array(F)
        oracle = det[:, None, None] * np.linalg.inv(F)
        trace = np.einsum("nij,nji->n", a, F)
        verdicts.append(ThresholdMetric(f"kinematics_cofactor_d{d}", "max_error", 1e-12)({"max_error": float(np.max(np.abs(a - oracle)))}))
        verdicts.append(ThresholdMetric(f"kinematics_trace_d{d}", "max_error", 1e-12)({"max_error": float(np.max(np.abs(trace - d * det)))}))
    levels = [1.0 / 8, 1.0 / 16, 1.0 / 32]
    residuals = [piola_residual(h) for h in levels]
    rate = fitted_rate(levels, residuals) if min(residuals) > 0.0 else float("inf")
    verdicts.append(
        flag(
            "kinematics_piola",
            residuals[-1] <= 1e-10 or rate >= 0.8,
            {"finest_residual": residuals[-1], "rate": rate},
            "exact to roundoff or converging at order >= 0.8",
        )
    )
    return verdicts

def check_operators(config, rng: np.random.Generator) -> List[Verdict]:
    verdicts = []
    params = config.solver_params()
    symmetric = True
    for d in (2, 3):
        c = ElasticityTensor(lam=params.lam, mu=params.mu, dimension=d)
        for i, j, k, l in np.ndindex(d, d, d, d):
            value = c.c_eval(i + 1, j + 1, k + 1, l + 1)
            others = (c.c_eval(j + 1, i + 1, k + 1, l + 1), c.c_eval(i + 1, j + 1, l + 1, k + 1), c.c_eval(k + 1, l + 1, i + 1, j + 1))
            symmetric &= all(value == other for other in others)
    verdicts.append(flag("operators_c_symmetry", symmetric, {"symmetric": float(symmetric)}))

    mesh = build_mesh(config.geometry_spec())
    d = mesh.dimension
    c = elasticity_of(mesh, params)
    A = stiffness_L(c, mesh)
    scale = float(abs(A).max())
    inside = np.flatnonzero(mesh.node_in_solid & ~mesh.node_in_fluid)

    def solid_field() -> np.ndarray:
        u = np.zeros((mesh.n_nodes, d))
        u[inside] = rng.standard_normal((len(inside), d))
        return u

    asymmetry, definiteness = 0.0, 0.0
    for _ in range(20):
        u, w = solid_field().ravel(), solid_field().ravel()
        norm = np.linalg.norm(u) * np.linalg.norm(w) * scale
        asymmetry = max(asymmetry, abs(u @ (A @ w) - w @ (A @ u)) / norm)
        definiteness = max(definiteness, -(u @ (A @ u)) / (np.linalg.norm(u) ** 2 * scale))
    verdicts.append(ThresholdMetric("operators_L_symmetry", "relative_asymmetry", 1e-12)({"relative_asymmetry": float(asymmetry)}))
    verdicts.append(ThresholdMetric("operators_L_nonpositive", "relative_positive_part", 1e-12)({"relative_positive_part": float(definiteness)}))

    x = mesh.nodes - np.array(mesh.extent) / 2.0
    rigid = [np.eye(d)[k][None, :].repeat(mesh.n_nodes, axis=0) for k in range(d)]
    rigid.append(np.stack([-x[:, 1], x[:, 0]] + [np.zeros(mesh.n_nodes)] * (d - 2), axis=1))
    rigid_error = max(float(np.max(np.abs(A @ r.ravel()))) / (scale * float(np.max(np.abs(r)))) for r in rigid)
    verdicts.append(ThresholdMetric("operators_L_rigid_motions", "relative_residual", 1e-12)({"relative_residual": rigid_error}))

    N_identity = float(np.max(np.abs(nonlinear_N(mesh.nodes, c, mesh).weak)))
    verdicts.append(ThresholdMetric("operators_N_identity", "max_residual", 1e-12)({"max_residual": N_identity}))

    eta = mesh.nodes + 0.05 * rng.standard_normal(mesh.nodes.shape)
    N = nonlinear_N(eta, c, mesh).weak
    G = traction_G(eta, c, mesh).values
    frame_error = 0.0
    for theta in rng.uniform(0.0, 2.0 * np.pi, 20):
        Q = _rotation(theta) if d == 2 else np.linalg.qr(rng.standard_normal((3, 3)))[0]
        N_rotated = nonlinear_N(eta @ Q.T, c, mesh).weak
        G_rotated = traction_G(eta @ Q.T, c, mesh).values
        frame_error = max(frame_error, _relative(N_rotated - N @ Q.T, N), _relative(G_rotated - G @ Q.T, G))
    verdicts.append(ThresholdMetric("operators_frame_indifference", "relative_error", 1e-12)({"relative_error": frame_error}))

    u = solid_field()
    step = 1e-5
    derivative = (nonlinear_N(mesh.nodes + step * u, c, mesh).weak - nonlinear_N(mesh.nodes - step * u, c, mesh).weak) / (2.0 * step)
    L_weak = linear_L(u, c, mesh).weak
    verdicts.append(ThresholdMetric("operators_linearization", "relative_error", 1e-6)({"relative_error": _relative(derivative + L_weak, L_weak)}))
    return verdicts

def _pressure_oracle(x: np.ndarray) -> np.ndarray:
    return np.cos(np.pi * x[..., 0]) * np.cos(np.pi * x[..., 1]) + x[..., 0] * x[..., 1] ** 2

def _pressure_oracle_gradient(x: np.ndarray) -> np.ndarray:
    return np.stack(
        [
            -np.pi * np.sin(np.pi * x[..., 0]) * np.cos(np.pi * x[..., 1]) + x[..., 1] ** 2,
            -np.pi * np.cos(np.pi * x[..., 0]) * np.sin(np.pi * x[..., 1]) + 2.0 * x[..., 0] * x[..., 1],
        ],
        axis=-1,
    )

def _fluid_l2(q: np.ndarray, mesh) -> float:
    weights = lumped_mass(mesh, mesh.cells_of(Phase.Fluid))
    return float(np.sqrt(np.sum(weights * q ** 2)))

STRETCH_RATE = 0.5
BUBBLE_SCALE = 16.0

def _stretch(x: np.ndarray) -> np.ndarray:
    """Uniform stretch about the centre of the unit square, grad = STRETCH_RATE I."""
    return STRETCH_RATE * (x - 0.5)

def _interface_bubble(x: np.ndarray) -> np.ndarray:
    """A quartic vanishing on the faces of the centred half box."""
    return BUBBLE_SCALE * (x[..., 0] - 0.25) * (x[..., 0] - 0.75) * (x[..., 1] - 0.25) * (x[..., 1] - 0.75)

def _interface_bubble_gradient(x: np.ndarray) -> np.ndarray:
    p = (x[..., 0] - 0.25) * (x[..., 0] - 0.75)
    s = (x[..., 1] - 0.25) * (x[..., 1] - 0.75)
    return BUBBLE_SCALE * np.stack([(2.0 * x[..., 0] - 1.0) * s, p * (2.0 * x[..., 1] - 1.0)], axis=-1)

def manufactured_pressure_errors(member: str, levels: Sequence[float], params: SolverParams) -> List[float]:
    """
    Fluid L2 errors of the manufactured q0 or q1 with u0 = 0.

    q0: f = grad q* with q* as interface datum, so q0 = q*.
    q1: w1 = g (x - c) and f = t grad b for the bubble b, with the interface
    datum taken from the viscous traction nu N . grad w1 N = nu g, so q1 = nu g + b.
    """
    errors = []
    for h in levels:
        mesh = build_mesh(standard_geometry(h))
        zero = np.zeros((mesh.n_nodes, mesh.dimension))
        if member == "q0":
            f = CallableForce(2, lambda t, x: _pressure_oracle_gradient(x))
            q = build_q0(zero, f, mesh, params, dirichlet=_pressure_oracle)
            exact = _pressure_oracle(mesh.nodes)
        else:
            f = CallableForce(
                2,
                lambda t, x: t * _interface_bubble_gradient(x),
                [lambda t, x: _interface_bubble_gradient(x), lambda t, x: np.zeros(np.shape(x))],
            )
            q = build_q1(zero, _stretch(mesh.nodes), np.zeros(mesh.n_nodes), f, mesh, params)
            exact = params.nu * STRETCH_RATE + _interface_bubble(mesh.nodes)
        error = np.where(mesh.node_in_fluid, q - exact, 0.0)
        errors.append(_fluid_l2(error, mesh))
    return errors

def check_compat(config, rng: np.random.Generator) -> List[Verdict]:
    verdicts = []
    params = config.solver_params()
    levels = [1.0 / 16, 1.0 / 32, 1.0 / 64]
    for member in ("q0", "q1"):
        errors = manufactured_pressure_errors(member, levels, params)
        verdicts.append(
            ThresholdMetric(f"compat_{member}_rate", "rate", 1.8, comparison="ge")(
                {"rate": fitted_rate(levels, errors), "finest_error": errors[-1]}
            )
        )

    jet_error = 0.0
    for d in (2, 3):
        H1, H2, H3 = (0.1 * rng.standard_normal((50, d, d)) for _ in range(3))
        exact = cofactor_jet(H1, H2, H3)
        estimates = finite_difference_jet(H1, H2, H3, step=1e-4)[:2] + finite_difference_jet(H1, H2, H3, step=1e-3)[2:]
        for e, fd in zip(exact, estimates):
            jet_error = max(jet_error, float(np.max(np.abs(e - fd)) / max(float(np.max(np.abs(e))), 1.0)))
    verdicts.append(ThresholdMetric("compat_jet_chain_rule", "relative_error", 1e-6)({"relative_error": jet_error}))

    mesh = build_mesh(config.geometry_spec())
    u0 = solid_bump(mesh, config.data.amplitude)
    solid = mesh.nodes_of(Phase.Solid)
    difference = solid_w2(u0, ZeroForce(mesh.dimension), mesh, params) - linear_L(u0, elasticity_of(mesh, params), mesh).values
    verdicts.append(ThresholdMetric("compat_solid_w2", "max_error", 1e-12)({"max_error": float(np.max(np.abs(difference[solid])))}))
    return verdicts

def lemma_key_verdicts(reports: Sequence[LemmaKeyReport], scalar: Dict[str, float]) -> List[Verdict]:
    """The eps-uniform bound over all trials and the closed-form scalar mode."""
    excess = max(max(s - r.bound for s in r.sup_norms) for r in reports)
    tolerance = max(r.integration_tolerance for r in reports)
    bound = AllMetric("lemma_key_bound", [
        ThresholdMetric("excess", "excess", 1e-8),
        ThresholdMetric("valid", "valid", 1.0, comparison="ge"),
    ])
    return [
        bound({"excess": float(excess), "valid": float(all(r.valid for r in reports)), "integration_tolerance": tolerance}),
        ThresholdMetric("lemma_key_scalar_mode", "max_error", 1e-10)(scalar),
    ]

def check_lemma_key(config, rng: np.random.Generator) -> List[Verdict]:
    experiment = config.experiment
    mesh = build_mesh(config.geometry_spec())
    c = elasticity_of(mesh, config.solver_params())
    u0 = solid_bump(mesh, config.data.amplitude)
    reports = lemma_key_suite(
        mesh, c, u0, experiment.lemma_eps_list, experiment.lemma_t_end, experiment.lemma_dt,
        trials=experiment.lemma_trials, seed=config.output.seed,
    )
    scalar = scalar_mode_check(mesh, c, 1.0, experiment.lemma_eps_list, experiment.lemma_t_end, experiment.lemma_dt)
    return lemma_key_verdicts(reports, scalar)

def check_stepper(config, rng: np.random.Generator) -> List[Verdict]:
    verdicts = []
    dt = config.numerics.dt
    zero_config = config.replace(data={"initial_data": "zero", "forcing": "zero"}, numerics={"t_end": 100 * dt})
    trajectory = run(zero_config)
    largest = max(max(float(np.max(np.abs(s.v))), float(np.max(np.abs(s.eta - trajectory.states[0].eta)))) for s in trajectory.states)
    verdicts.append(
        flag("stepper_zero_equilibrium", trajectory.reached_end and largest == 0.0,
             {"max_deviation": largest, "steps": float(len(trajectory.states) - 1)})
    )

    unforced = config.replace(
        data={"forcing": "zero"},
        numerics={"kappa": 1e-2, "eps_pen": 1e-4, "dt": 1e-3, "t_end": 0.2, "include_kappa_forcing": False},
    )
    mesh = build_mesh(unforced.geometry_spec())
    u0 = solid_bump(mesh, unforced.data.amplitude)
    compat = CompatData.zero(mesh).model_copy(update={"u0": u0})
    trajectory = march(FSIProblem(mesh, unforced.solver_params(), compat=compat), keep_states=False)
    trace = energy_trace(trajectory)
    E0 = trace.total[0]
    verdicts.append(
        flag("stepper_energy_dissipation", trajectory.reached_end and trace.max_increase() <= 1e-10 * E0,
             {"max_increase": trace.max_increase(), "E0": E0})
    )
    return verdicts

def check_penalty(config, rng: np.random.Generator) -> List[Verdict]:
    eps_list = config.experiment.eps_list
    jobs = [(config.replace(numerics={"eps_pen": eps}), None, False) for eps in eps_list]
    trajectories = run_jobs(jobs)
    residuals = [max(r.constraint_residual for r in t.records) for t in trajectories]
    ratios = [0.0 if a == 0.0 else b / a for a, b in zip(residuals, residuals[1:])]
    measured = {f"residual_eps_{eps!r}": r for eps, r in zip(eps_list, residuals)}
    measured["max_ratio"] = max(ratios, default=0.0)
    alive = all(t.reached_end for t in trajectories)
    return [
        flag("penalty_consistency", alive and measured["max_ratio"] <= config.experiment.penalty_ratio_threshold,
             measured, f"successive ratio <= {config.experiment.penalty_ratio_threshold!r}")
    ]

def existence_time_verdict(table: SweepTable, threshold: float) -> Verdict:
    """PASS when every run reached the horizon or min T* / max T* stays above the threshold."""
    all_reached = all(row.reached_end for row in table.rows)
    return flag(
        "kappa_existence_time",
        all_reached or table.t_star_ratio >= threshold,
        {"t_star_ratio": table.t_star_ratio, "all_reached_end": float(all_reached)},
        f"all runs finished or t_star_ratio >= {threshold!r}",
    )

def check_kappa(config, rng: np.random.Generator) -> List[Verdict]:
    experiment = config.experiment
    values = list(dict.fromkeys([*experiment.kappa_list, experiment.reference_kappa]))
    results = dict(kappa_runs(config, values, experiment.sweep_t_end))
    table = sweep_table([(k, results[k]) for k in experiment.kappa_list], experiment.sweep_t_end)
    verdicts = [existence_time_verdict(table, experiment.kappa_ratio_threshold)]
    # runs stopping early shorten the interval of every distance to [0, min T*]
    n_levels = common_levels(list(results.values()))
    if n_levels < 2:
        verdicts.append(flag("kappa_convergence", False, {}, "some run failed its first step"))
        return verdicts
    runs = [(k, results[k]) for k in experiment.kappa_list]
    convergence = convergence_table(runs, results[experiment.reference_kappa], experiment.reference_kappa,
                                    h1_problem(config), n_levels)
    measured = {f"distance_kappa_{row.kappa!r}": row.distance for row in convergence.rows}
    measured["common_horizon"] = convergence.horizon
    verdicts.append(flag("kappa_convergence", convergence.monotone, measured, "distances decrease with kappa"))
    return verdicts

def _sha256(filepath: str) -> str:
    with open(filepath, "rb") as f:
        return hashlib.sha256(f.read()).hexdigest()

def check_uniqueness(config, rng: np.random.Generator) -> List[Verdict]:
    verdicts = []
    with tempfile.TemporaryDirectory() as folder:
        digests = []
        for attempt in ("first", "second"):
            trajectory = run(config, keep_states=False)
            digests.append(_sha256(write_series(trajectory.records, os.path.join(folder, attempt))))
    verdicts.append(flag("uniqueness_determinism", digests[0] == digests[1], {"identical": float(digests[0] == digests[1])}))
    try:
        table = perturbation_study(config)
    except ExperimentError as e:
        verdicts.append(flag("uniqueness_perturbation", False, {}, str(e)))
        return verdicts
    measured = {f"ratio_delta_{row.delta!r}": row.ratio for row in table.rows}
    measured["spread"] = table.spread
    verdicts.append(ThresholdMetric("uniqueness_perturbation", "spread", config.experiment.perturbation_spread)(measured))
    return verdicts

def mms_verdicts(temporal: RateTable, spatial: RateTable) -> List[Verdict]:
    """Backward Euler is first order in dt, Q1 second order in h for the displacement."""
    return [
        RangeMetric("mms_temporal_rate", "rate", 0.8, 1.2)({"rate": temporal.rate, "monotone": float(temporal.monotone)}),
        ThresholdMetric("mms_spatial_rate", "rate", 1.8, comparison="ge")({"rate": spatial.rate, "monotone": float(spatial.monotone)}),
    ]

def check_mms(config, rng: np.random.Generator) -> List[Verdict]:
    return mms_verdicts(mms_convergence("temporal"), mms_convergence("spatial"))

VERIFICATION_CHECKS: Dict[str, Callable] = {
    "kinematics": check_kinematics,
    "operators": check_operators,
    "compat": check_compat,
    "lemma_key": check_lemma_key,
    "stepper": check_stepper,
    "penalty": check_penalty,
    "kappa": check_kappa,
    "uniqueness": check_uniqueness,
    "mms": check_mms,
}

def verify(config, checks: Optional[Sequence[str]] = None, verbose: bool = False) -> List[Verdict]:
    """
    Run the requested checks (all of them by default) in a fixed order.

    A solver failure inside a check is reported as a FAIL verdict of that check.

    Raises:
        ValueError: On an unknown check name.
    """
    names = list(VERIFICATION_CHECKS) if checks is None else list(checks)
    unknown = [name for name in names if name not in VERIFICATION_CHECKS]
    if unknown:
        raise ValueError(f"Unknown verification checks {unknown}, expected some of {list(VERIFICATION_CHECKS)}")
    verdicts = []
    for name in tqdm(names, desc="verify", disable=not verbose):
        rng = np.random.default_rng(config.output.seed)
        try:
            results = VERIFICATION_CHECKS[name](config, rng)
        except (SolverError, ExperimentError) as e:
            results = [flag(name, False, {}, f"{type(e).__name__}: {e}")]
        if verbose:
            for verdict in results:
                color = VERIFY_COLOR if verdict.passed else VERIFY_FAIL_COLOR
                print(f"{color}{verdict.to_line()}{Style.RESET_ALL}")
        verdicts.extend(results)
    return verdicts
