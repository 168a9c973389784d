"""Behavior-bid turn ordering with dominant-strategy and welfare checkers."""

from .ordering import (
    AuctionInstance,
    DeviationReport,
    OrderingResult,
    WelfareReport,
    allocate,
    check_incentive_compatibility,
    check_welfare_optimality,
    load_instance,
    slot_utility,
    utility_of_agent,
)

__all__ = [
    "AuctionInstance",
    "DeviationReport",
    "OrderingResult",
    "WelfareReport",
    "allocate",
    "check_incentive_compatibility",
    "check_welfare_optimality",
    "load_instance",
    "slot_utility",
    "utility_of_agent",
]
