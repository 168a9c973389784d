"""Multi-lane highway simulation: IDM car following, MOBIL lane changes."""

from .idm import LeadInfo, desired_gap, idm_acceleration, idm_acceleration_from_gap
from .mobil import (
    CHANGE_LEFT,
    CHANGE_RIGHT,
    Neighbor,
    Neighborhood,
    STAY,
    mobil_decide,
)
from .params import (
    AGGRESSIVE_V0,
    CLASS_AGGRESSIVE,
    CLASS_CONSERVATIVE,
    CLASS_EXTERNAL,
    CONSERVATIVE_V0,
    DriverParams,
    ScenarioConfig,
    VEHICLE_LENGTH,
    aggressive_params,
    conservative_params,
    load_scenario_config,
    save_scenario_config,
)
from .state import Event, VehicleState
from .trajectory import Trajectory, TrajectoryRow
from .world import (
    CapacityError,
    ExternalControl,
    World,
    neighborhood,
    run,
    spawn_population,
    step,
)

__all__ = [
    "AGGRESSIVE_V0",
    "CapacityError",
    "CHANGE_LEFT",
    "CHANGE_RIGHT",
    "CLASS_AGGRESSIVE",
    "CLASS_CONSERVATIVE",
    "CLASS_EXTERNAL",
    "CONSERVATIVE_V0",
    "DriverParams",
    "Event",
    "ExternalControl",
    "LeadInfo",
    "Neighbor",
    "Neighborhood",
    "ScenarioConfig",
    "STAY",
    "Trajectory",
    "TrajectoryRow",
    "VEHICLE_LENGTH",
    "VehicleState",
    "World",
    "aggressive_params",
    "conservative_params",
    "desired_gap",
    "idm_acceleration",
    "idm_acceleration_from_gap",
    "load_scenario_config",
    "mobil_decide",
    "neighborhood",
    "run",
    "save_scenario_config",
    "spawn_population",
    "step",
]
