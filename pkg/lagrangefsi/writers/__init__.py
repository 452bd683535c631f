from .config_writer import emit_config, write_config, format_value, CONFIG_ECHO_FILENAME
from .outputs import (
    format_float,
    series_text,
    write_series,
    summary_text,
    write_summary,
    write_timing,
    mesh_text,
    write_mesh,
    checkpoint_text,
    write_checkpoint,
    read_checkpoint,
    SERIES_FILENAME,
    SUMMARY_FILENAME,
    TIMING_FILENAME,
    MESH_FILENAME,
)

__all__ = [
    "emit_config",
    "write_config",
    "format_value",
    "CONFIG_ECHO_FILENAME",
    "format_float",
    "series_text",
    "write_series",
    "summary_text",
    "write_summary",
    "write_timing",
    "mesh_text",
    "write_mesh",
    "checkpoint_text",
    "write_checkpoint",
    "read_checkpoint",
    "SERIES_FILENAME",
    "SUMMARY_FILENAME",
    "TIMING_FILENAME",
    "MESH_FILENAME",
]
