"""Vehicle state and simulation event records."""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class VehicleState:
    """Kinematic state of one agent.

    Lane 0 is the rightmost lane; ``y`` tracks the actual lateral position,
    which interpolates between lane centers during a lane change while
    ``lane`` already holds the target lane index.
    """

    id: int
    x: float  # longitudinal position (m)
    y: float  # lateral position (m)
    lane: int
    v: float  # speed (m/s), never negative
    heading: float = 0.0  # radians
    class_tag: str = "conservative"  # conservative | aggressive | external

    def moved(self, **kwargs) -> "VehicleState":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class Event:
    """One per-tick log entry (lane changes, collisions, rejections...)."""

    tick: int
    kind: str
    agents: tuple[int, ...]
    data: dict | None = None


LANE_CHANGE = "lane_change"
COLLISION = "collision"
NEAR_COLLISION = "near_collision"
COLLISION_IMMINENT = "collision_imminent"
REJECTED_UNSAFE = "rejected_unsafe"
