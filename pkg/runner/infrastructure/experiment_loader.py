"""Load and dump experiment configs (sectioned INI text or JSON)."""

import configparser
import json
import logging
import math
import re
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Union

from pydantic import ValidationError

from shared.domain.errors import ExperimentConfigError
from shared.domain.payloads import ExperimentConfig

logger = logging.getLogger(__name__)

PRIOR_SECTION = "prior"
EXPERIMENT_SECTION = "experiment"

# Keys holding comma-separated lists in the INI form
LIST_KEYS = frozenset({"delta_grid", "rho_grid", "snr_grid", "support", "weights"})

_KEY_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*[=:]")
_SECTION_LINE = re.compile(r"^\s*\[([^\]]+)\]")


def load_experiment(path: Union[str, Path]) -> ExperimentConfig:
    """Read a config file; ``.json`` files are parsed as JSON, anything else as INI."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ExperimentConfigError(str(path), [f"cannot read file: {e}"]) from e

    if path.suffix.lower() == ".json":
        return parse_json(text, source=str(path))
    return parse_ini(text, source=str(path))


def parse_json(text: str, source: str = "<json>") -> ExperimentConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ExperimentConfigError(source, [f"line {e.lineno}, column {e.colno}: {e.msg}"]) from e
    if not isinstance(raw, dict):
        raise ExperimentConfigError(source, ["top level must be an object"])
    return _validate(raw, source, key_lines={})


def parse_ini(text: str, source: str = "<ini>") -> ExperimentConfig:
    """
    Parse the sectioned form.

    ``[prior]`` maps onto the nested prior spec; keys of every other section
    are flattened onto the experiment. List-valued keys are comma separated.
    """
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as e:
        lineno = getattr(e, "lineno", None)
        where = f"line {lineno}: " if lineno else ""
        raise ExperimentConfigError(source, [f"{where}{_first_line(e)}"]) from e

    key_lines = _key_lines(text)
    problems: List[str] = []
    raw: Dict[str, object] = {}
    prior: Dict[str, object] = {}

    for section in parser.sections():
        target = prior if section == PRIOR_SECTION else raw
        for key, value in parser.items(section):
            if section != PRIOR_SECTION and key in raw:
                problems.append(f"{_where(key_lines, key)}key {key!r} set in more than one section")
                continue
            target[key] = _parse_value(key, value)

    if not parser.has_section(PRIOR_SECTION):
        problems.append(f"missing [{PRIOR_SECTION}] section")
    if problems:
        raise ExperimentConfigError(source, problems)

    raw["prior"] = prior
    return _validate(raw, source, key_lines)


def dump_experiment(experiment: ExperimentConfig) -> str:
    """INI text such that ``parse_ini(dump_experiment(c)) == c``."""
    parser = configparser.ConfigParser(interpolation=None)
    parser[PRIOR_SECTION] = _section_values(experiment.prior, exclude=set())
    parser[EXPERIMENT_SECTION] = _section_values(experiment, exclude={"prior"})

    lines: List[str] = []
    for section in parser.sections():
        lines.append(f"[{section}]")
        lines.extend(f"{key} = {value}" for key, value in parser.items(section))
        lines.append("")
    return "\n".join(lines)


def write_experiment(experiment: ExperimentConfig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_experiment(experiment), encoding="utf-8")
    return path


def _validate(raw: dict, source: str, key_lines: Dict[str, int]) -> ExperimentConfig:
    try:
        experiment = ExperimentConfig.model_validate(raw)
    except ValidationError as e:
        problems = []
        for error in e.errors():
            field = ".".join(str(part) for part in error["loc"]) or "config"
            key = str(error["loc"][-1]) if error["loc"] else ""
            problems.append(f"{_where(key_lines, key)}field {field}: {error['msg']}")
        raise ExperimentConfigError(source, problems) from e
    logger.debug(f"Loaded experiment config from {source}")
    return experiment


def _parse_value(key: str, value: str) -> object:
    value = value.strip()
    if key in LIST_KEYS:
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


def _section_values(model, exclude: set) -> Dict[str, str]:
    values: Dict[str, str] = {}
    for name in type(model).model_fields:
        if name in exclude:
            continue
        value = getattr(model, name)
        if value is None or (isinstance(value, list) and not value):
            continue
        values[name] = _format_value(value)
    return values


def _format_value(value: object) -> str:
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return _format_float(value)
    if isinstance(value, list):
        return ", ".join(_format_value(item) for item in value)
    return str(value)


def _format_float(value: float) -> str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)


def _key_lines(text: str) -> Dict[str, int]:
    """First line number of each key (prior keys are also indexed as 'prior.key')."""
    lines: Dict[str, int] = {}
    section: Optional[str] = None
    for lineno, line in enumerate(text.splitlines(), 1):
        header = _SECTION_LINE.match(line)
        if header:
            section = header.group(1).strip()
            continue
        match = _KEY_LINE.match(line)
        if not match:
            continue
        key = match.group(1).lower()
        lines.setdefault(key, lineno)
        if section == PRIOR_SECTION:
            lines.setdefault(f"prior.{key}", lineno)
    return lines


def _where(key_lines: Dict[str, int], key: str) -> str:
    lineno = key_lines.get(key)
    return f"line {lineno}: " if lineno else ""


def _first_line(error: Exception) -> str:
    return str(error).strip().splitlines()[0]

