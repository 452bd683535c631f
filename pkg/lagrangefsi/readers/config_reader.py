import re
from typing import Dict, Tuple
from pydantic import ValidationError

from lagrangefsi.core.exceptions import ConfigSyntaxError, ConfigValidationError
from lagrangefsi.readers.reader import Reader
from lagrangefsi.readers.config import RunConfig

SECTION_PATTERN = re.compile(r"^\[\s*([A-Za-z_][A-Za-z0-9_]*)\s*\]$")
KEY_PATTERN = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*)$")
QUOTED_PATTERN = re.compile(r'^"((?:[^"\\]|\\.)*)"$')
ESCAPE_PATTERN = re.compile(r"\\(.)")
ESCAPES = {"n": "\n", "r": "\r"}

def strip_comment(raw: str) -> str:
    """The line up to its first `#` outside double quotes."""
    quoted, escaped = False, False
    for index, char in enumerate(raw):
        if escaped:
            escaped = False
        elif char == "\\" and quoted:
            escaped = True
        elif char == '"':
            quoted = not quoted
        elif char == "#" and not quoted:
            return raw[:index]
    return raw

def unquote(value: str) -> str:
    """The content of a double-quoted value with its escapes resolved; other values are returned as is."""
    match = QUOTED_PATTERN.match(value)
    if match is None:
        return value
    return ESCAPE_PATTERN.sub(lambda m: ESCAPES.get(m.group(1), m.group(1)), match.group(1))

class ConfigReader(Reader):
    """
    Reads sectioned `key = value` files into a validated RunConfig.

    `#` starts a comment outside double quotes, `[section]` opens a section,
    blank lines are skipped. A value in double quotes is taken literally,
    with `\\"`, `\\\\`, `\\n` and `\\r` escapes.
    """

    def parse(self, text: str) -> RunConfig:
        sections: Dict[str, Dict[str, str]] = {}
        seen: Dict[Tuple[str, str], int] = {}
        section = None
        for number, raw in enumerate(text.splitlines(), start=1):
            line = strip_comment(raw).strip()
            if not line:
                continue
            header = SECTION_PATTERN.match(line)
            if header:
                section = header.group(1)
                sections.setdefault(section, {})
                continue
            entry = KEY_PATTERN.match(line)
            if entry is None:
                raise ConfigSyntaxError(f"Expected '[section]' or 'key = value', got '{raw.strip()}'", line=number)
            if section is None:
                raise ConfigSyntaxError(f"Key '{entry.group(1)}' appears before any section header", line=number)
            key, value = entry.group(1), unquote(entry.group(2).strip())
            if (section, key) in seen:
                first = seen[(section, key)]
                raise ConfigSyntaxError(
                    f"Duplicate key '{section}.{key}' on lines {first} and {number}",
                    line=number,
                )
            seen[(section, key)] = number
            sections[section][key] = value
        return self.validate(sections)

    def validate(self, sections: Dict[str, Dict[str, str]]) -> RunConfig:
        try:
            return RunConfig.model_validate(sections)
        except ValidationError as e:
            error = e.errors()[0]
            field = ".".join(str(part) for part in error["loc"])
            raise ConfigValidationError(f"Invalid value for '{field}': {error['msg']}", field=field)

    def read(self, filepath: str) -> RunConfig:
        try:
            with open(filepath, "r", encoding="utf-8") as f:
                text = f.read()
        except UnicodeDecodeError as e:
            raise ConfigSyntaxError(f"Config file '{filepath}' is not valid UTF-8: {e}")
        return self.parse(text)

def parse_config(path: str) -> RunConfig:
    """
    Parse and validate a configuration file.

    Raises:
        ConfigSyntaxError: On a malformed line or a duplicate key, with its line number.
        ConfigValidationError: On a constraint violation, naming the field.
        OSError: When the file cannot be opened.
    """
    return ConfigReader().read(path)
