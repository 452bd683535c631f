"""Plain-text run outputs. Floats are written with repr so repeated runs give identical bytes."""

import io
import os
import numpy as np
import pandas as pd
from typing import Any, Dict, Iterable, List

from lagrangefsi.core.datatypes import CSV_COLUMNS, CSV_SCHEMA_VERSION, DeformationState, DiagnosticsRecord, RunSummary

SERIES_FILENAME = "series.csv"
SUMMARY_FILENAME = "summary.txt"
TIMING_FILENAME = "timing.txt"
MESH_FILENAME = "mesh.txt"
CHECKPOINT_FOLDER = "checkpoints"

def format_float(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)

def _path(folderpath: str, filename: str) -> str:
    if folderpath:
        os.makedirs(folderpath, exist_ok=True)
        return os.path.join(folderpath, filename)
    return filename

def _write(filepath: str, text: str):
    with open(filepath, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)

def series_text(records: Iterable[DiagnosticsRecord]) -> str:
    """The versioned CSV time series: a schema comment line, then the fixed columns."""
    rows = [{name: format_float(value) for name, value in record.to_dict().items()} for record in records]
    df = pd.DataFrame(rows, columns=CSV_COLUMNS)
    buffer = io.StringIO()
    buffer.write(f"# schema_version = {CSV_SCHEMA_VERSION}\n")
    df.to_csv(buffer, index=False, lineterminator="\n")
    return buffer.getvalue()

def write_series(records: Iterable[DiagnosticsRecord], folderpath: str = "") -> str:
    filepath = _path(folderpath, SERIES_FILENAME)
    _write(filepath, series_text(records))
    return filepath

def summary_lines(summary: RunSummary) -> List[str]:
    lines = [verdict.to_line() for verdict in summary.verdicts]
    if summary.verdicts:
        lines.append(f"passed = {format_float(summary.passed)}")
    if summary.t_star is not None:
        lines.append(f"t_star = {format_float(summary.t_star)}")
    for key, value in summary.final_norms.items():
        lines.append(f"{key} = {format_float(value)}")
    return lines

def summary_text(summary: RunSummary) -> str:
    """`key = value` lines; wall-clock time and the config echo go to their own files."""
    return "\n".join(summary_lines(summary)) + "\n"

def write_summary(summary: RunSummary, folderpath: str = "") -> str:
    filepath = _path(folderpath, SUMMARY_FILENAME)
    _write(filepath, summary_text(summary))
    return filepath

def write_timing(seconds: float, folderpath: str = "") -> str:
    filepath = _path(folderpath, TIMING_FILENAME)
    _write(filepath, f"wall_clock = {seconds!r}\n")
    return filepath

def mesh_text(mesh) -> str:
    """
    Mesh dump: a header, one `node x y [z] phase` line per node and one
    `cell n0 ... n(2^d-1) phase` line per cell, phases as fluid/solid/interface.
    """
    node_phase = np.where(
        mesh.node_in_fluid & mesh.node_in_solid, "interface", np.where(mesh.node_in_solid, "solid", "fluid")
    )
    lines = [
        f"dimension = {mesh.dimension}",
        f"h = {format_float(mesh.h)}",
        f"extent = {', '.join(format_float(L) for L in mesh.extent)}",
        f"n_nodes = {mesh.n_nodes}",
        f"n_cells = {mesh.n_cells}",
        f"n_interface_facets = {mesh.n_facets}",
    ]
    for n, (x, phase) in enumerate(zip(mesh.nodes, node_phase)):
        lines.append(f"node {n} " + " ".join(format_float(v) for v in x) + f" {phase}")
    cell_phase = np.where(mesh.cell_region >= 0, "solid", "fluid")
    for e, (nodes, phase) in enumerate(zip(mesh.cells, cell_phase)):
        lines.append(f"cell {e} " + " ".join(str(int(v)) for v in nodes) + f" {phase}")
    return "\n".join(lines) + "\n"

def write_mesh(mesh, folderpath: str = "") -> str:
    filepath = _path(folderpath, MESH_FILENAME)
    _write(filepath, mesh_text(mesh))
    return filepath

def checkpoint_text(state: DeformationState) -> str:
    """`t = ...`, then one `eta... v...` line per node and one `q` line per cell."""
    lines = [f"t = {format_float(state.t)}", f"n_nodes = {len(state.eta)}", f"n_cells = {len(state.q)}"]
    for eta, v in zip(state.eta, state.v):
        lines.append(" ".join(format_float(x) for x in np.concatenate([eta, v])))
    lines.extend(format_float(q) for q in state.q)
    return "\n".join(lines) + "\n"

def write_checkpoint(state: DeformationState, step: int, folderpath: str = "") -> str:
    filepath = _path(os.path.join(folderpath, CHECKPOINT_FOLDER) if folderpath else CHECKPOINT_FOLDER, f"state_{step:06d}.txt")
    _write(filepath, checkpoint_text(state))
    return filepath

def read_checkpoint(filepath: str, dimension: int) -> DeformationState:
    """Load a state written by write_checkpoint."""
    with open(filepath, "r", encoding="utf-8") as f:
        lines = f.read().splitlines()
    header: Dict[str, str] = dict(line.split(" = ", 1) for line in lines[:3])
    n_nodes, n_cells = int(header["n_nodes"]), int(header["n_cells"])
    nodal = np.array([[float(x) for x in line.split()] for line in lines[3:3 + n_nodes]]).reshape(n_nodes, 2 * dimension)
    q = np.array([float(x) for x in lines[3 + n_nodes:3 + n_nodes + n_cells]])
    return DeformationState(t=float(header["t"]), eta=nodal[:, :dimension], v=nodal[:, dimension:], q=q)
