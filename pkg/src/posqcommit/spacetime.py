"""1D positions, light-speed latency, and deterministic event scheduling.

The commitment is position-based: the receiver only trusts a reveal that
arrives exactly one light-trip after the commit marker.  Everything here is
simulated arithmetic, not measured time, so with the default epsilon of 0
an honest run passes its windows exactly and any artificial delay or
displacement fails them.

The speed of light is a fixed constant on purpose: making it configurable
would silently break position soundness.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Callable

__all__ = [
    "SPEED_OF_LIGHT_M_PER_S",
    "latency",
    "TimingWindow",
    "check_window",
    "cross_check_clocks",
    "EventQueue",
]

SPEED_OF_LIGHT_M_PER_S = 299_792_458.0

Position = float  # 1D coordinate in meters


def latency(p1: Position, p2: Position) -> float:
    """Signal travel time in seconds between two 1D positions."""
    return abs(p1 - p2) / SPEED_OF_LIGHT_M_PER_S


@dataclass(frozen=True)
class TimingWindow:
    """One party's record of a commit-to-reveal interval.

    ``start_s`` is when the commit-phase signal arrived, ``end_s`` when the
    reveal arrived, and ``distance_m`` the claimed committer distance the
    interval is checked against.
    """

    start_s: float
    end_s: float
    distance_m: float

    @property
    def elapsed_s(self) -> float:
        return self.end_s - self.start_s

    def passes(self, epsilon_s: float = 0.0) -> bool:
        return check_window(self.start_s, self.end_s, self.distance_m, epsilon_s)


def check_window(t: float, big_t: float, distance_m: float, epsilon_s: float = 0.0) -> bool:
    """True iff the elapsed time equals one light trip over ``distance_m``.

    Both early and late arrivals fail: an early reveal means the claimed
    position was farther than the true one, a late reveal means stalling.
    """
    if big_t < t:
        raise ValueError("window end precedes its start")
    return abs((big_t - t) - distance_m / SPEED_OF_LIGHT_M_PER_S) <= epsilon_s


def cross_check_clocks(
    receiver_window: TimingWindow, agent_window: TimingWindow, epsilon_s: float = 0.0
) -> bool:
    """Clock-free consistency check between receiver and agent.

    Passes iff both windows individually pass and their elapsed times agree
    within ``epsilon_s``; with unsynchronized clocks the elapsed times are
    still comparable and must be identical for an honest committer.
    """
    return (
        receiver_window.passes(epsilon_s)
        and agent_window.passes(epsilon_s)
        and abs(receiver_window.elapsed_s - agent_window.elapsed_s) <= epsilon_s
    )


@dataclass(order=True)
class _Scheduled:
    time_s: float
    seq: int
    action: Callable[[], None] = field(compare=False)
    note: str = field(compare=False, default="")


class EventQueue:
    """Min-heap event scheduler with deterministic tiebreaking.

    Events at equal times run in insertion order, so a run is a pure
    function of its schedule.  ``run_until_idle`` returns the processed
    (time, note) log.
    """

    def __init__(self) -> None:
        self._heap: list[_Scheduled] = []
        self._counter = itertools.count()
        self.now = 0.0

    def schedule(self, time_s: float, action: Callable[[], None], note: str = "") -> None:
        if time_s < self.now:
            raise ValueError(f"cannot schedule event at {time_s} before now={self.now}")
        heapq.heappush(self._heap, _Scheduled(time_s, next(self._counter), action, note))

    def run_until_idle(self) -> list[tuple[float, str]]:
        log: list[tuple[float, str]] = []
        while self._heap:
            event = heapq.heappop(self._heap)
            self.now = event.time_s
            log.append((event.time_s, event.note))
            event.action()
        return log
