"""Driver and scenario parameter sets, with YAML config file support.

Two stock driver classes are provided: conservative drivers cruise near
25 m/s with generous gaps, aggressive drivers target 40 m/s with tight
gaps and no politeness. Only the desired speeds are fixed by convention;
everything else is overridable through the scenario config file.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict, replace
from pathlib import Path

import yaml

VEHICLE_LENGTH = 5.0  # m, used in all gap computations

CONSERVATIVE_V0 = 25.0  # m/s, jittered +/-10% at spawn
AGGRESSIVE_V0 = 40.0  # m/s, exact

CLASS_CONSERVATIVE = "conservative"
CLASS_AGGRESSIVE = "aggressive"
CLASS_EXTERNAL = "external"


@dataclass(frozen=True)
class DriverParams:
    """Longitudinal (IDM) and lane-change (MOBIL) parameters for one driver."""

    v0: float  # desired speed (m/s)
    T_headway: float  # safety time gap (s)
    s0: float  # minimum congestion distance (m)
    a_max: float  # comfortable max acceleration (m/s^2)
    b_comf: float  # comfortable max deceleration (m/s^2, positive)
    p: float  # politeness factor in [0, 1]
    b_safe: float  # safe braking limit imposed on a new follower (m/s^2, positive)
    delta_a_th: float  # minimum acceleration gain to justify a lane change (m/s^2)

    def __post_init__(self) -> None:
        for name in ("v0", "T_headway", "s0", "a_max", "b_comf", "b_safe"):
            if getattr(self, name) <= 0:
                raise ValueError(f"DriverParams.{name} must be > 0")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("DriverParams.p must be in [0, 1]")
        if self.delta_a_th < 0:
            raise ValueError("DriverParams.delta_a_th must be >= 0")


CONSERVATIVE_DEFAULTS = dict(
    T_headway=1.5, s0=2.0, a_max=1.0, b_comf=2.0, p=0.5, b_safe=4.0, delta_a_th=0.2
)
AGGRESSIVE_DEFAULTS = dict(
    T_headway=0.8, s0=1.0, a_max=2.5, b_comf=4.0, p=0.0, b_safe=6.0, delta_a_th=0.1
)


def conservative_params(v0: float = CONSERVATIVE_V0, **overrides) -> DriverParams:
    kw = {**CONSERVATIVE_DEFAULTS, **overrides}
    return DriverParams(v0=v0, **kw)


def aggressive_params(v0: float = AGGRESSIVE_V0, **overrides) -> DriverParams:
    kw = {**AGGRESSIVE_DEFAULTS, **overrides}
    return DriverParams(v0=v0, **kw)


@dataclass(frozen=True)
class ScenarioConfig:
    """Static description of one simulation run."""

    n_lanes: int = 3
    n_vehicles: int = 12
    lane_width: float = 4.0  # m
    tick_dt: float = 1.0 / 15.0  # s
    duration: float = 30.0  # s
    seed: int = 0
    class_mix: float = 0.25  # fraction of aggressive agents
    scenario_kind: str = "highway"  # "highway" or "merge"
    road_length_m: float = 1000.0
    merge_point_m: float = 300.0  # end of lane 0 in merge scenarios
    lane_change_duration_s: float = 1.0
    min_spawn_spacing_m: float = 20.0
    class_overrides: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n_lanes < 1:
            raise ValueError("n_lanes must be >= 1")
        if self.tick_dt <= 0:
            raise ValueError("tick_dt must be > 0")
        if not 0.0 <= self.class_mix <= 1.0:
            raise ValueError("class_mix must be in [0, 1]")
        if self.scenario_kind not in ("highway", "merge"):
            raise ValueError(f"unknown scenario_kind {self.scenario_kind!r}")

    @property
    def n_ticks(self) -> int:
        return int(round(self.duration / self.tick_dt))

    def lane_center(self, lane: int) -> float:
        return lane * self.lane_width

    def driver_params(self, class_tag: str, v0: float | None = None) -> DriverParams:
        """Stock params for a class, with config-file overrides applied."""
        overrides = dict(self.class_overrides.get(class_tag, {}))
        if v0 is not None:
            overrides.pop("v0", None)
            if class_tag == CLASS_AGGRESSIVE:
                return aggressive_params(v0=v0, **overrides)
            return conservative_params(v0=v0, **overrides)
        v0_override = overrides.pop("v0", None)
        if class_tag == CLASS_AGGRESSIVE:
            return aggressive_params(v0=v0_override or AGGRESSIVE_V0, **overrides)
        return conservative_params(v0=v0_override or CONSERVATIVE_V0, **overrides)


def load_scenario_config(path: str | Path) -> ScenarioConfig:
    """Load a ScenarioConfig from a YAML file.

    Top-level keys map 1:1 onto ScenarioConfig fields; the optional
    ``class_overrides`` mapping holds per-class DriverParams overrides, e.g.::

        n_lanes: 4
        class_mix: 0.5
        class_overrides:
          aggressive: {T_headway: 0.6, b_safe: 8.0}
    """
    raw = yaml.safe_load(Path(path).read_text()) or {}
    if not isinstance(raw, dict):
        raise ValueError(f"scenario config {path} must be a mapping")
    known = set(ScenarioConfig.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown scenario config keys: {sorted(unknown)}")
    return ScenarioConfig(**raw)


def save_scenario_config(config: ScenarioConfig, path: str | Path) -> None:
    Path(path).write_text(yaml.safe_dump(asdict(config), sort_keys=False))


def with_params(config: ScenarioConfig, **kwargs) -> ScenarioConfig:
    return replace(config, **kwargs)
