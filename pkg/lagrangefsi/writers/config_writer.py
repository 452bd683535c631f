import os
from typing import Any

from lagrangefsi.mesh.phase_mesh import SolidRegion

CONFIG_ECHO_FILENAME = "config_echo.ini"

def quote(text: str) -> str:
    """Double-quote a string, escaping backslashes, quotes and line breaks."""
    escaped = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\r", "\\r")
    return f'"{escaped}"'

def needs_quotes(text: str) -> bool:
    return text != text.strip() or any(char in text for char in '#"\n\r')

def format_value(value: Any) -> str:
    """Render a config value so that the config reader parses it back to the same value."""
    if isinstance(value, str):
        return quote(value) if needs_quotes(value) else value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, SolidRegion):
        return value.to_text()
    if isinstance(value, (list, tuple)):
        if value and all(isinstance(x, SolidRegion) for x in value):
            return "; ".join(x.to_text() for x in value)
        return ", ".join(format_value(x) for x in value)
    return str(value)

def emit_config(config) -> str:
    """
    The sectioned `key = value` text of a RunConfig.

    Keys left to None are omitted, so they come back as their default.
    """
    lines = []
    for section in type(config).model_fields:
        if lines:
            lines.append("")
        lines.append(f"[{section}]")
        model = getattr(config, section)
        for key in type(model).model_fields:
            value = getattr(model, key)
            if value is None:
                continue
            lines.append(f"{key} = {format_value(value)}")
    return "\n".join(lines) + "\n"

def write_config(config, folderpath: str = "") -> str:
    """
    Save the config echo as 'config_echo.ini' in the folder.

    Returns:
        str: The path of the written file.
    """
    filepath = os.path.join(folderpath, CONFIG_ECHO_FILENAME) if folderpath else CONFIG_ECHO_FILENAME
    with open(filepath, "w", encoding="utf-8", newline="\n") as f:
        f.write(emit_config(config))
    return filepath
