"""Reading ``.tam-scn`` scenario files."""

from __future__ import annotations

from pathlib import Path

import yaml

from .build import ScenarioError, build_scenario
from .library import scenario_data


def load_scenario_data(path) -> dict:
    """Parse a scenario file into plain data.

    A file may also name a built-in scenario (``builtin: pca``) and
    override top-level keys of it.
    """
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ScenarioError(f"{path}: {exc}") from None
    if not isinstance(data, dict):
        raise ScenarioError(f"{path}: expected a mapping at top level")
    if "builtin" in data:
        base = scenario_data(data.pop("builtin"))
        base.update(data)
        data = base
    return data


def load_scenario(path):
    return build_scenario(load_scenario_data(path))
