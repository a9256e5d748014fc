from .graph import CallGraph, Frame, NodeId
from .profile_frame import (
    ProfileFrame,
    RankStat,
    aggregate_over_ranks,
    exclusive_name,
    inclusive_from_exclusive,
    inclusive_name,
)

__all__ = [
    "CallGraph",
    "Frame",
    "NodeId",
    "ProfileFrame",
    "RankStat",
    "aggregate_over_ranks",
    "exclusive_name",
    "inclusive_from_exclusive",
    "inclusive_name",
]
