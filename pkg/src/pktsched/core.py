"""Core model for unit-length packet scheduling with deadlines.

Jobs, instances, schedules, feasibility, the dominance relation, canonical
(earliest-deadline) ordering, and the CSV instance format shared by the
whole package. Everything here is an immutable value; operations are pure.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property
from heapq import heappop, heappush
from pathlib import Path
from typing import Iterable, Optional

# Step used to separate tied weights deterministically (scaled by the
# smallest positive weight in the instance).
WEIGHT_TIE_STEP = 2.0 ** -40


class InfeasibleSelection(ValueError):
    """A selected job set cannot be packed into its feasible slots."""


class ParseError(ValueError):
    """Malformed input line; carries the 1-based line number."""

    def __init__(self, message: str, line_no: int):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


@dataclass(frozen=True, slots=True)
class Job:
    """One unit-length packet.

    Feasible slots are release <= t <= deadline - 1, so every job has at
    least one (deadline >= release + 1). Weight is nonnegative.
    """

    id: str
    release: int
    deadline: int
    weight: float

    def __post_init__(self):
        if self.release < 0:
            raise ValueError(f"job {self.id!r}: release must be >= 0")
        if self.deadline < self.release + 1:
            raise ValueError(f"job {self.id!r}: deadline must be >= release + 1")
        if self.weight < 0:
            raise ValueError(f"job {self.id!r}: weight must be >= 0")


def feasible_at(job: Job, t: int) -> bool:
    """True iff the job may run in slot t (released, not yet expired)."""
    return job.release <= t <= job.deadline - 1


def dominates(j: Job, j2: Job) -> bool:
    """True iff j is strictly heavier with a no-later deadline than j2."""
    return j.weight > j2.weight and j.deadline <= j2.deadline


def _break_weight_ties(jobs: tuple[Job, ...]) -> tuple[Job, ...]:
    """Make weights pairwise distinct by adding id-rank-scaled increments.

    Applied only when ties exist so that already-distinct inputs keep their
    weights bit-for-bit. The increment scale is the smallest positive
    weight (1 when all weights are zero), far below any meaningful gap.
    """
    weights = [j.weight for j in jobs]
    if len(set(weights)) == len(weights):
        return jobs
    positive = [w for w in weights if w > 0]
    step = WEIGHT_TIE_STEP * (min(positive) if positive else 1.0)
    bumped = tuple(
        Job(j.id, j.release, j.deadline, j.weight + rank * step)
        for rank, j in enumerate(jobs)
    )
    if len({j.weight for j in bumped}) != len(bumped):
        raise ValueError("weight tie-break failed to separate weights")
    return bumped


@dataclass(frozen=True)
class Instance:
    """A finite job collection plus the time horizon (slots 0..horizon).

    Jobs are stored sorted by id; ids are unique and weights pairwise
    distinct. Build instances through :meth:`of`, which fills in the
    default horizon (the largest deadline) and separates tied weights.
    """

    jobs: tuple[Job, ...]
    horizon: int

    def __post_init__(self):
        ids = [j.id for j in self.jobs]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate job ids in instance")
        if len({j.weight for j in self.jobs}) != len(self.jobs):
            raise ValueError("instance weights must be pairwise distinct; use Instance.of")
        for j in self.jobs:
            if j.deadline > self.horizon:
                raise ValueError(f"job {j.id!r}: deadline exceeds horizon {self.horizon}")
        if self.horizon < 0:
            raise ValueError("horizon must be >= 0")

    @classmethod
    def of(cls, jobs: Iterable[Job], horizon: Optional[int] = None) -> "Instance":
        ordered = tuple(sorted(jobs, key=lambda j: j.id))
        ids = [j.id for j in ordered]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate job ids in instance")
        ordered = _break_weight_ties(ordered)
        max_deadline = max((j.deadline for j in ordered), default=0)
        if horizon is None:
            horizon = max_deadline
        return cls(ordered, horizon)

    @cached_property
    def by_id(self) -> dict[str, Job]:
        return {j.id: j for j in self.jobs}

    def with_horizon(self, horizon: int) -> "Instance":
        """Same jobs over a (no smaller) horizon."""
        if horizon == self.horizon:
            return self
        return Instance(self.jobs, horizon)


@dataclass(frozen=True)
class Schedule:
    """Per-slot assignment over [0, horizon]: a Job or a dummy (None).

    Dummies carry weight 0 and are not Job records, so job ids stay
    unique. A real job appears in at most one slot.
    """

    slots: tuple[Optional[Job], ...]

    @property
    def horizon(self) -> int:
        return len(self.slots) - 1

    def job_ids(self) -> set[str]:
        return {j.id for j in self.slots if j is not None}


def schedule_weight(schedule: Schedule, upto: Optional[int] = None) -> float:
    """Total weight of the slots [0, upto] (whole schedule when omitted)."""
    if upto is None:
        upto = schedule.horizon
    elif not 0 <= upto <= schedule.horizon:
        raise ValueError(f"upto={upto} outside [0, {schedule.horizon}]")
    return math.fsum(j.weight for j in schedule.slots[: upto + 1] if j is not None)


def pending_set(instance: Instance, processed: set[str], t: int) -> set[Job]:
    """Released, unprocessed, still-feasible jobs at slot t (the buffer)."""
    return {j for j in instance.jobs if j.id not in processed and feasible_at(j, t)}


def expired_set(instance: Instance, processed: set[str], t: int) -> set[Job]:
    """Unprocessed jobs whose deadline precedes slot t + 1."""
    return {
        j
        for j in instance.jobs
        if j.id not in processed and j.deadline < t + 1
    }


def canonicalize(instance: Instance, selected: set[str]) -> Schedule:
    """Schedule exactly the selected jobs in canonical order.

    At each slot the released, not-yet-placed selected job with the
    earliest deadline runs; deadline ties go to the larger weight, then
    the smaller id. Raises InfeasibleSelection when some selected job
    cannot be placed before its deadline.
    """
    unknown = selected - set(instance.by_id)
    if unknown:
        raise KeyError(f"selected ids not in instance: {sorted(unknown)}")
    chosen = sorted(
        (instance.by_id[i] for i in selected), key=lambda j: (j.release, j.id)
    )
    heap: list[tuple[int, float, str, Job]] = []
    slots: list[Optional[Job]] = []
    idx = 0
    for t in range(instance.horizon + 1):
        while idx < len(chosen) and chosen[idx].release <= t:
            j = chosen[idx]
            heappush(heap, (j.deadline, -j.weight, j.id, j))
            idx += 1
        if heap and heap[0][0] <= t:
            raise InfeasibleSelection(
                f"job {heap[0][2]!r} expires unscheduled at slot {t}"
            )
        slots.append(heappop(heap)[3] if heap else None)
    return Schedule(tuple(slots))


def validate_schedule(
    instance: Instance, schedule: Schedule
) -> tuple[bool, list[str]]:
    """Check all schedule invariants against the instance.

    Returns (ok, violations); ok is True iff the violation list is empty.
    """
    violations: list[str] = []
    seen: set[str] = set()
    for t, job in enumerate(schedule.slots):
        if job is None:
            continue
        actual = instance.by_id.get(job.id)
        if actual is None:
            violations.append(f"slot {t}: job {job.id!r} not in instance")
            continue
        if actual != job:
            violations.append(f"slot {t}: job {job.id!r} differs from instance record")
        if job.id in seen:
            violations.append(f"slot {t}: job {job.id!r} scheduled more than once")
        seen.add(job.id)
        if t < job.release:
            violations.append(f"slot {t}: job {job.id!r} runs before release {job.release}")
        if t > job.deadline - 1:
            violations.append(f"slot {t}: job {job.id!r} runs at/after deadline {job.deadline}")
    return (not violations, violations)


CSV_HEADER = ["id", "release", "deadline", "weight"]


def write_instance_csv(instance: Instance, path: Path | str) -> None:
    """Write the instance file: optional horizon comment, then job rows."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# horizon={instance.horizon}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for j in instance.jobs:
            writer.writerow([j.id, j.release, j.deadline, repr(j.weight)])


def read_instance_csv(path: Path | str) -> Instance:
    """Parse an instance file (UTF-8 CSV with header id,release,deadline,weight).

    A comment line ``# horizon=T`` before the header fixes the horizon;
    otherwise the largest deadline is used.
    """
    horizon: Optional[int] = None
    jobs: list[Job] = []
    header_seen = False
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("horizon=") and not header_seen:
                    try:
                        horizon = int(body.split("=", 1)[1])
                    except ValueError:
                        raise ParseError(f"bad horizon comment {line!r}", line_no)
                continue
            row = next(csv.reader([line]))
            if not header_seen:
                if [c.strip() for c in row] != CSV_HEADER:
                    raise ParseError(f"expected header {','.join(CSV_HEADER)}", line_no)
                header_seen = True
                continue
            if len(row) != 4:
                raise ParseError(f"expected 4 fields, got {len(row)}", line_no)
            try:
                jobs.append(Job(row[0], int(row[1]), int(row[2]), float(row[3])))
            except ValueError as exc:
                raise ParseError(str(exc), line_no) from exc
    if not header_seen:
        raise ParseError("missing header row", 1)
    return Instance.of(jobs, horizon)
