"""Shared plan result types."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .geometry import WorldPoint, euclidean


class PlanStatus(Enum):
    PATH_FOUND = "PathFound"
    NO_PATH_FOUND = "NoPathFound"
    START_BLOCKED = "StartBlocked"
    GOAL_BLOCKED = "GoalBlocked"


@dataclass
class SearchStats:
    expansions: int = 0
    los_checks: int = 0
    refinements: int = 0
    queue_pushes: int = 0
    init_leaves: int = 0
    wall_time: float = 0.0

    def as_dict(self) -> dict:
        return {
            "expansions": self.expansions,
            "los_checks": self.los_checks,
            "refinements": self.refinements,
            "queue_pushes": self.queue_pushes,
            "init_leaves": self.init_leaves,
            "wall_time": self.wall_time,
        }


@dataclass
class PlanResult:
    status: PlanStatus
    waypoints: list[WorldPoint] = field(default_factory=list)
    length: float = 0.0
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def success(self) -> bool:
        return self.status == PlanStatus.PATH_FOUND

    def as_dict(self) -> dict:
        return {
            "status": self.status.value,
            "waypoints": [[p.x, p.y, p.z] for p in self.waypoints],
            "length": self.length,
            "stats": self.stats.as_dict(),
        }


def path_length(waypoints: list[WorldPoint]) -> float:
    return sum(euclidean(a, b) for a, b in zip(waypoints, waypoints[1:]))
