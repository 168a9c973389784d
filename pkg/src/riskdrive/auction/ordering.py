"""Turn-based ordering from behavior bids.

Agents bid their behavior scores; the k-th highest bidder takes the k-th
movement slot. Slot k carries the time reward alpha_k = 1/t_k (turn times
increase, so rewards strictly decrease), and the k-th winner's utility is

    u_k = b_k / t_k - sum_{j=k}^{K} b_{j+1} (1/t_j - 1/t_{j+1})

with the conventions b_{K+1} = 0 and 1/t_{K+1} = 0, which make the final
correction term vanish. The payment sum is each agent's externality on the
agents below it, which is what makes truthful bidding dominant and the
sorted ordering welfare-maximizing; both properties are machine-checkable
on concrete instances through the functions below.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class AuctionInstance:
    """Bids (behavior values) and increasing per-slot turn times."""

    bids: tuple[float, ...]
    times: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.bids) != len(self.times):
            raise ValueError("bids and times must have equal length")
        if not self.bids:
            raise ValueError("instance is empty")
        if any(t <= 0 for t in self.times):
            raise ValueError("turn times must be positive")
        if any(later <= earlier for earlier, later in zip(self.times, self.times[1:])):
            raise ValueError("turn times must be strictly increasing")

    @property
    def k_slots(self) -> int:
        return len(self.bids)

    @classmethod
    def from_json(cls, text: str) -> "AuctionInstance":
        raw = json.loads(text)
        return cls(bids=tuple(raw["bids"]), times=tuple(raw["times"]))

    def to_json(self) -> str:
        return json.dumps({"bids": list(self.bids), "times": list(self.times)})


@dataclass(frozen=True)
class OrderingResult:
    """Slot -> agent assignment with utilities and the welfare sum."""

    ordering: tuple[int, ...]  # ordering[k] = original agent index in slot k
    sorted_bids: tuple[float, ...]
    utilities: tuple[float, ...]
    welfare: float


def _sort_agents(bids) -> list[int]:
    # descending bid, ties broken by agent id ascending
    return sorted(range(len(bids)), key=lambda i: (-bids[i], i))


def slot_utility(sorted_bids, times, k: int, value: float | None = None) -> float:
    """Utility of the slot-k winner; ``value`` defaults to its bid."""
    K = len(sorted_bids)
    if value is None:
        value = sorted_bids[k]
    alpha = [1.0 / t for t in times]
    u = value * alpha[k]
    for j in range(k, K):
        b_next = sorted_bids[j + 1] if j + 1 < K else 0.0
        alpha_next = alpha[j + 1] if j + 1 < K else 0.0
        u -= b_next * (alpha[j] - alpha_next)
    return u


def allocate(bids, times) -> OrderingResult:
    """Sort agents by descending bid into slots and settle utilities."""
    instance = AuctionInstance(bids=tuple(bids), times=tuple(times))
    order = _sort_agents(instance.bids)
    sorted_bids = tuple(instance.bids[i] for i in order)
    utilities = tuple(
        slot_utility(sorted_bids, instance.times, k) for k in range(instance.k_slots)
    )
    welfare = sum(b / t for b, t in zip(sorted_bids, instance.times))
    return OrderingResult(
        ordering=tuple(order),
        sorted_bids=sorted_bids,
        utilities=utilities,
        welfare=welfare,
    )


def utility_of_agent(instance: AuctionInstance, agent: int, bid: float) -> float:
    """Agent's utility when it submits ``bid`` while others bid truthfully.

    The agent is re-slotted by the deviated bid; its utility is its true
    value times the achieved slot reward minus the payment determined by
    the other agents' (truthful) bids.
    """
    bids = list(instance.bids)
    value = bids[agent]
    bids[agent] = bid
    order = _sort_agents(bids)
    sorted_bids = tuple(bids[i] for i in order)
    slot = order.index(agent)
    return slot_utility(sorted_bids, instance.times, slot, value=value)


@dataclass(frozen=True)
class DeviationReport:
    agent: int
    truthful_utility: float
    deviations: tuple[tuple[float, float], ...]  # (deviated bid, utility)
    dominant: bool  # truthful utility >= every deviation utility

    def margins(self) -> list[float]:
        return [self.truthful_utility - u for _, u in self.deviations]

    def to_json(self) -> str:
        return json.dumps(
            {
                "agent": self.agent,
                "truthful_utility": self.truthful_utility,
                "deviations": [list(d) for d in self.deviations],
                "margins": self.margins(),
                "dominant": self.dominant,
            }
        )


def check_incentive_compatibility(
    instance: AuctionInstance, agent: int, deviation_bids=None
) -> DeviationReport:
    """Compare truthful utility against re-slotted deviation utilities.

    The default deviation set contains the neighboring bids (the proof's
    over/underbidding swaps) plus their midpoints and outward extremes.
    """
    truthful = utility_of_agent(instance, agent, instance.bids[agent])
    if deviation_bids is None:
        order = _sort_agents(instance.bids)
        slot = order.index(agent)
        sorted_bids = [instance.bids[i] for i in order]
        deviation_bids = []
        if slot > 0:
            above = sorted_bids[slot - 1]
            deviation_bids += [above, above * 1.01 + 0.01, (above + sorted_bids[slot]) / 2.0]
        if slot < len(sorted_bids) - 1:
            below = sorted_bids[slot + 1]
            deviation_bids += [below, max(below * 0.99 - 0.01, 0.0), (below + sorted_bids[slot]) / 2.0]
        deviation_bids += [0.0, sorted_bids[0] * 2.0 + 1.0]
    deviations = tuple(
        (float(b), utility_of_agent(instance, agent, float(b))) for b in deviation_bids
    )
    dominant = all(u <= truthful + 1e-12 for _, u in deviations)
    return DeviationReport(
        agent=agent, truthful_utility=truthful, deviations=deviations, dominant=dominant
    )


@dataclass(frozen=True)
class WelfareReport:
    sorted_welfare: float
    best_welfare: float
    optimal: bool
    n_permutations: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "sorted_welfare": self.sorted_welfare,
                "best_welfare": self.best_welfare,
                "optimal": self.optimal,
                "n_permutations": self.n_permutations,
            }
        )


def check_welfare_optimality(
    instance: AuctionInstance, exhaustive_limit: int = 8, n_samples: int = 2000, seed: int = 0
) -> WelfareReport:
    """Verify the sorted allocation maximizes sum b_k / t_k over permutations.

    Exhaustive for K <= ``exhaustive_limit``; uniformly sampled beyond that.
    """
    K = instance.k_slots
    sorted_alloc = allocate(instance.bids, instance.times)

    def welfare_of(perm) -> float:
        return sum(instance.bids[i] / t for i, t in zip(perm, instance.times))

    best = sorted_alloc.welfare
    count = 0
    if K <= exhaustive_limit:
        for perm in itertools.permutations(range(K)):
            count += 1
            best = max(best, welfare_of(perm))
    else:
        import random

        rng = random.Random(seed)
        base = list(range(K))
        for _ in range(n_samples):
            rng.shuffle(base)
            count += 1
            best = max(best, welfare_of(base))
    return WelfareReport(
        sorted_welfare=sorted_alloc.welfare,
        best_welfare=best,
        optimal=sorted_alloc.welfare >= best - 1e-12,
        n_permutations=count,
    )


def load_instance(path: str | Path) -> AuctionInstance:
    return AuctionInstance.from_json(Path(path).read_text())
