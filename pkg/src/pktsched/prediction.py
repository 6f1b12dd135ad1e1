"""Prediction handling: choice sequences, the error metric, and the
blind follower.

A prediction is just another instance. Its optimal schedule is distilled
into a per-slot sequence of job-id choices, which can then be replayed
against any realization: a choice lands only if the realized job with
that id exists, is unprocessed, and is feasible at that slot; otherwise
the slot stays empty. The error metric compares, slot prefix by slot
prefix, the realization's achievable optimum against what replaying the
predicted choices actually collects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .core import Instance, Job, Schedule, feasible_at, schedule_weight
from .offline import opt_schedule, prefix_opt_series


@dataclass(frozen=True)
class ChoiceSequence:
    """Slot-indexed job-id picks taken from a prediction's canonical optimum."""

    choices: tuple[Optional[str], ...]


def build_choices(prediction: Instance) -> ChoiceSequence:
    """Per-slot ids of the prediction's canonical optimal schedule."""
    schedule = opt_schedule(prediction)
    return ChoiceSequence(tuple(j.id if j is not None else None for j in schedule.slots))


def apply_choices(choices: ChoiceSequence, realization: Instance) -> Schedule:
    """Replay the choices on the realization, dummying out misses.

    A slot's choice is honored only when the realized job with that id
    exists, has not been placed yet, and is feasible right there; no
    rescue rescheduling is attempted (that is the fallback policy's job).
    """
    horizon = max(len(choices.choices) - 1, realization.horizon)
    placed: set[str] = set()
    slots: list[Optional[Job]] = []
    for t in range(horizon + 1):
        cid = choices.choices[t] if t < len(choices.choices) else None
        job = realization.by_id.get(cid) if cid is not None else None
        if job is not None and job.id not in placed and feasible_at(job, t):
            placed.add(job.id)
            slots.append(job)
        else:
            slots.append(None)
    return Schedule(tuple(slots))


def prediction_error(realization: Instance, prediction: Instance) -> float:
    """Worst prefix ratio of the realization's optimum to the followed choices.

    For each slot t, the numerator is the prefix-optimum weight over jobs
    released by t and the denominator is the weight collected through t by
    replaying the prediction's optimal choices. Returns infinity when some
    positive numerator meets a zero denominator, and 1 when every
    numerator is zero.
    """
    horizon = max(realization.horizon, prediction.horizon)
    real = realization.with_horizon(horizon)
    series = prefix_opt_series(real).values
    followed = apply_choices(build_choices(prediction), real)
    ratios: list[float] = []
    for t in range(horizon + 1):
        numerator = series[t]
        if numerator == 0.0:
            continue
        denominator = schedule_weight(followed, upto=t)
        if denominator == 0.0:
            return math.inf
        ratios.append(numerator / denominator)
    return max(ratios) if ratios else 1.0


def blind_follow(prediction: Instance, realization: Instance) -> Schedule:
    """Follow the prediction's optimal choices unconditionally.

    Optimal when the prediction is exact; with errors its weight can
    degrade without bound, which is exactly what the thresholded
    scheduler exists to prevent.
    """
    horizon = max(realization.horizon, prediction.horizon)
    return apply_choices(build_choices(prediction), realization.with_horizon(horizon))
