"""Prediction-free per-slot scheduling policies and their driver.

Each step rule is memoryless: given the current buffer of feasible,
unprocessed jobs it picks one job id (or none). That makes the rules
usable standalone and as the fallback inside the learning-augmented
scheduler, which may hand over mid-stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .core import Instance, Job, Schedule, dominates, pending_set

# Golden ratio: modified greedy's weight threshold and its competitive ratio
# on agreeable-deadline instances.
PHI = (1 + math.sqrt(5)) / 2

_POLICY_NAMES = ("greedy", "edf", "edf-alpha", "mg")


def greedy_step(buffer: set[Job]) -> Optional[str]:
    """Heaviest buffered job; None on an empty buffer."""
    if not buffer:
        return None
    return min(buffer, key=lambda j: (-j.weight, j.id)).id


def edf_step(buffer: set[Job]) -> Optional[str]:
    """Earliest-deadline job, deadline ties to the larger weight."""
    if not buffer:
        return None
    return min(buffer, key=lambda j: (j.deadline, -j.weight, j.id)).id


def edf_alpha_step(buffer: set[Job], alpha: float) -> Optional[str]:
    """Earliest-deadline job among those weighing at least alpha times the
    buffer maximum."""
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if not buffer:
        return None
    top = max(j.weight for j in buffer)
    eligible = [j for j in buffer if j.weight >= alpha * top]
    return min(eligible, key=lambda j: (j.deadline, -j.weight, j.id)).id


def mg_step(buffer: set[Job]) -> Optional[str]:
    """Earliest-deadline non-dominated job if it weighs at least 1/phi of
    the heaviest job, else the heaviest job."""
    if not buffer:
        return None
    heaviest = min(buffer, key=lambda j: (-j.weight, j.id))
    non_dominated = [
        j for j in buffer if not any(dominates(k, j) for k in buffer)
    ]
    earliest = min(non_dominated, key=lambda j: (j.deadline, -j.weight, j.id))
    pick = earliest if earliest.weight >= heaviest.weight / PHI else heaviest
    return pick.id


@dataclass(frozen=True)
class OnlineStepPolicy:
    """A named step rule plus its advertised competitive ratio.

    ``edf-alpha`` needs its threshold ``alpha``; the others take none.
    EDF carries no guarantee, so its ratio is recorded as infinity.
    """

    name: str
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.name not in _POLICY_NAMES:
            raise ValueError(f"unknown policy {self.name!r}")
        if self.name == "edf-alpha":
            if self.alpha is None or not 0 < self.alpha <= 1:
                raise ValueError("edf-alpha requires alpha in (0, 1]")
        elif self.alpha is not None:
            raise ValueError(f"policy {self.name!r} takes no alpha")

    @property
    def gamma_on(self) -> float:
        return {
            "greedy": 2.0,
            "mg": PHI,
            "edf": math.inf,
            "edf-alpha": 2.0,
        }[self.name]

    def step(self, buffer: set[Job]) -> Optional[str]:
        if self.name == "greedy":
            return greedy_step(buffer)
        if self.name == "edf":
            return edf_step(buffer)
        if self.name == "edf-alpha":
            return edf_alpha_step(buffer, self.alpha)
        return mg_step(buffer)

    @property
    def label(self) -> str:
        if self.name == "edf-alpha":
            return f"edf-alpha:{self.alpha:g}"
        return self.name

    @classmethod
    def parse(cls, text: str) -> "OnlineStepPolicy":
        """Parse ``greedy``, ``edf``, ``mg``, or ``edf-alpha:<alpha>``."""
        if text.startswith("edf-alpha"):
            _, _, arg = text.partition(":")
            if not arg:
                raise ValueError("edf-alpha needs a threshold, e.g. edf-alpha:0.5")
            return cls("edf-alpha", float(arg))
        return cls(text)


GREEDY = OnlineStepPolicy("greedy")
EDF = OnlineStepPolicy("edf")
MG = OnlineStepPolicy("mg")


def edf_alpha(alpha: float) -> OnlineStepPolicy:
    return OnlineStepPolicy("edf-alpha", alpha)


def run_online(policy: OnlineStepPolicy, instance: Instance) -> Schedule:
    """Drive a step policy over every slot of the instance."""
    processed: set[str] = set()
    slots: list[Optional[Job]] = []
    for t in range(instance.horizon + 1):
        pick = policy.step(pending_set(instance, processed, t))
        job = instance.by_id[pick] if pick is not None else None
        if job is not None:
            processed.add(job.id)
        slots.append(job)
    return Schedule(tuple(slots))
