"""Energy and solution-norm summaries of a trajectory."""

from lagrangefsi.core.datatypes import EnergyTrace, Trajectory, ZNorm
from lagrangefsi.core.exceptions import ExperimentError
from lagrangefsi.stepper.diagnostics import h1_norm

def energy_trace(trajectory: Trajectory) -> EnergyTrace:
    """Kinetic, elastic and total energy of every accepted state."""
    records = trajectory.records
    return EnergyTrace(
        times=[r.t for r in records],
        kinetic=[r.kinetic_energy for r in records],
        elastic=[r.elastic_energy for r in records],
        total=[r.total_energy for r in records],
    )

def zt_norm(trajectory: Trajectory, problem=None, difference_quotients: bool = False) -> ZNorm:
    """
    Discrete proxy of the solution-space norm over the accepted part of the trajectory.

    The base members are int |v|_H1^2 dt, sup |eta - Id|_H2(solid)^2 and sup |q|_L2^2.
    With difference_quotients, int |D_t v|_H1^2 dt and int |D_tt v|_L2^2 dt are added
    from the stored states and listed in `proxy_terms`.

    Raises:
        ExperimentError: If difference quotients are requested with fewer than 4 states.
        ValueError: If difference quotients are requested without the problem.
    """
    records = trajectory.records
    velocity = 0.0
    for previous, current in zip(records, records[1:]):
        velocity += (current.t - previous.t) * current.v_h1 ** 2
    terms = {
        "v_L2H1": velocity,
        "eta_LinfH2": max((r.eta_h2_solid ** 2 for r in records), default=0.0),
        "q_LinfL2": max((r.q_l2 ** 2 for r in records), default=0.0),
    }
    proxy_terms = []
    if difference_quotients:
        states = trajectory.states
        if len(states) < 4:
            raise ExperimentError(f"Difference quotients need at least 4 stored states, got {len(states)}")
        if problem is None:
            raise ValueError("Difference quotients need the problem for the mass and stiffness matrices")
        first, second = 0.0, 0.0
        for n in range(1, len(states)):
            dt = states[n].t - states[n - 1].t
            first += dt * h1_norm((states[n].v - states[n - 1].v) / dt, problem) ** 2
            if n >= 2:
                previous_dt = states[n - 1].t - states[n - 2].t
                vtt = ((states[n].v - states[n - 1].v) / dt - (states[n - 1].v - states[n - 2].v) / previous_dt) / dt
                x = vtt.ravel()
                second += dt * float(x @ (problem.mass @ x))
        terms["v_t_L2H1"] = first
        terms["v_tt_L2L2"] = second
        proxy_terms = ["v_t_L2H1", "v_tt_L2L2"]
    return ZNorm(value=float(sum(terms.values())), terms=terms, proxy_terms=proxy_terms)
