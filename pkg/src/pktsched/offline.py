"""Exact offline optima via augmenting-path matching of jobs onto slots.

The schedulable subsets of an instance form a matroid (a set is feasible
iff it matches into the slots), so inserting jobs in decreasing weight
with an augmenting-path feasibility check yields the exact maximum-weight
schedule. A memoized exhaustive search over slot assignments serves as an
independent oracle for small instances, and the prefix-optimum series is
maintained incrementally as releases arrive.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .core import (
    Instance,
    Job,
    Schedule,
    canonicalize,
    feasible_at,
    schedule_weight,
)

BRUTE_FORCE_MAX_JOBS = 12
BRUTE_FORCE_MAX_HORIZON = 12


class TooLarge(ValueError):
    """Instance exceeds the brute-force enumeration guard."""


@dataclass(frozen=True)
class PrefixOptSeries:
    """values[t] = weight of slots [0, t] of the canonical optimum for the
    jobs released by t (the optimum itself is taken over the full horizon)."""

    values: tuple[float, ...]


class _SlotMatching:
    """Jobs matched onto unit slots via Kuhn-style augmenting paths.

    ``add_if_fits`` is the greedy matroid step (call in decreasing weight
    order for a maximum-weight set). ``insert`` additionally performs the
    exchange step needed when jobs arrive in release order: a newcomer that
    cannot be added outright evicts the lightest job on its blocking
    structure when the newcomer is heavier.
    """

    def __init__(self) -> None:
        self.owner: dict[int, Job] = {}
        self.slot_of: dict[str, int] = {}

    def _try_place(self, job: Job, visited: set[int]) -> bool:
        for s in range(job.release, job.deadline):
            if s in visited:
                continue
            visited.add(s)
            holder = self.owner.get(s)
            if holder is None or self._try_place(holder, visited):
                self.owner[s] = job
                self.slot_of[job.id] = s
                return True
        return False

    def add_if_fits(self, job: Job) -> bool:
        return self._try_place(job, set())

    def insert(self, job: Job) -> tuple[bool, Optional[Job]]:
        """Add the job, possibly evicting one; returns (added, evicted).

        A failed augmentation leaves the matching untouched and has
        explored exactly the alternating-reachable slots, whose owners are
        the jobs whose removal would admit the newcomer; evicting the
        lightest of them is the optimal exchange.
        """
        visited: set[int] = set()
        if self._try_place(job, visited):
            return True, None
        blockers = [self.owner[s] for s in visited]
        lightest = min(blockers, key=lambda j: (j.weight, j.id))
        if lightest.weight >= job.weight:
            return False, None
        del self.owner[self.slot_of.pop(lightest.id)]
        placed = self._try_place(job, set())
        assert placed, "freed slot must be reachable from the inserted job"
        return True, lightest

    def selected_ids(self) -> set[str]:
        return set(self.slot_of)


def _optimal_ids(instance: Instance) -> set[str]:
    matching = _SlotMatching()
    for job in sorted(instance.jobs, key=lambda j: (-j.weight, j.id)):
        matching.add_if_fits(job)
    return matching.selected_ids()


def opt_schedule(instance: Instance) -> Schedule:
    """Canonical maximum-weight schedule for the instance."""
    return canonicalize(instance, _optimal_ids(instance))


def brute_force_opt(instance: Instance) -> tuple[float, Schedule]:
    """Exhaustive maximum over all feasible job-to-slot assignments.

    Independent of the matching path; guarded to <= 12 jobs and horizon
    <= 12. Returns the optimal weight and one canonical maximizer.
    """
    jobs = instance.jobs
    if len(jobs) > BRUTE_FORCE_MAX_JOBS or instance.horizon > BRUTE_FORCE_MAX_HORIZON:
        raise TooLarge(
            f"{len(jobs)} jobs / horizon {instance.horizon} exceeds "
            f"{BRUTE_FORCE_MAX_JOBS} jobs / horizon {BRUTE_FORCE_MAX_HORIZON}"
        )
    memo: dict[tuple[int, int], tuple[float, int]] = {}

    def explore(t: int, used: int) -> tuple[float, int]:
        if t > instance.horizon:
            return 0.0, 0
        key = (t, used)
        cached = memo.get(key)
        if cached is not None:
            return cached
        best = explore(t + 1, used)
        for i, job in enumerate(jobs):
            bit = 1 << i
            if used & bit or not feasible_at(job, t):
                continue
            tail_w, tail_mask = explore(t + 1, used | bit)
            if tail_w + job.weight > best[0]:
                best = (tail_w + job.weight, tail_mask | bit)
        memo[key] = best
        return best

    _, mask = explore(0, 0)
    chosen = {jobs[i].id for i in range(len(jobs)) if mask >> i & 1}
    schedule = canonicalize(instance, chosen)
    return schedule_weight(schedule), schedule


def release_prefix(instance: Instance, t: int) -> Instance:
    """The sub-instance of jobs released by t, over the same horizon."""
    return Instance(
        tuple(j for j in instance.jobs if j.release <= t), instance.horizon
    )


@lru_cache(maxsize=64)
def prefix_opt_series(instance: Instance) -> PrefixOptSeries:
    """Prefix-optimum weights for every t in [0, horizon].

    Maintained incrementally: as each slot's releases arrive they are
    inserted (with optimal exchange) into the running matching, which at
    every t equals the maximum-weight schedulable subset of the released
    jobs. Equivalent to re-solving opt_schedule per release prefix, at the
    cost of a single matching overall.
    """
    by_release: dict[int, list[Job]] = defaultdict(list)
    for job in instance.jobs:
        by_release[job.release].append(job)
    matching = _SlotMatching()
    values: list[float] = []
    for t in range(instance.horizon + 1):
        for job in sorted(by_release.get(t, ()), key=lambda j: (-j.weight, j.id)):
            matching.insert(job)
        schedule = canonicalize(instance, matching.selected_ids())
        values.append(schedule_weight(schedule, upto=t))
    return PrefixOptSeries(tuple(values))
