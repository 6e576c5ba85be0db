from .build import ScenarioError, build_scenario
from .library import build_pca, build_xray_vent, builtin, scenario_names
from .loader import load_scenario
from .scenario import Scenario

__all__ = [
    "Scenario",
    "ScenarioError",
    "build_pca",
    "build_scenario",
    "build_xray_vent",
    "builtin",
    "load_scenario",
    "scenario_names",
]
