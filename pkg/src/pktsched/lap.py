"""LAP: prediction-following with a per-slot local test and free fallback.

Each slot, if the predicted choice is a real, unprocessed, feasible job,
the scheduler compares the prefix-optimum weight against its own
processed weight plus that candidate. Within the threshold it follows the
prediction; beyond it (or when the choice is a dummy, already processed,
or infeasible) the slot goes to the fallback online policy. Because the
fallback is memoryless, control can move back and forth any number of
times.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .core import Instance, Job, Schedule, feasible_at, pending_set
from .offline import PrefixOptSeries, prefix_opt_series
from .online import OnlineStepPolicy
from .prediction import build_choices

PREDICTION = "prediction"
ONLINE = "online"


class InvalidThreshold(ValueError):
    """The local-test threshold must be at least 1."""


@dataclass(frozen=True)
class LapSlot:
    """One slot of a run: who chose, what ran, and the test outcome.

    ``local_ratio`` is None when the test was not evaluated (the predicted
    choice was a dummy, already processed, or infeasible at this slot).
    """

    t: int
    source: str
    job_id: Optional[str]
    weight: float
    local_ratio: Optional[float]
    predicted_id: Optional[str]


@dataclass(frozen=True)
class LapTrace:
    rho: float
    rows: tuple[LapSlot, ...]

    def processed_ids(self) -> set[str]:
        return {r.job_id for r in self.rows if r.job_id is not None}

    def evaluated_ratios(self) -> list[float]:
        return [r.local_ratio for r in self.rows if r.local_ratio is not None]

    @property
    def t_lambda(self) -> int:
        """One past the last slot whose local test passed (0 if none did)."""
        passed = [
            r.t
            for r in self.rows
            if r.local_ratio is not None and r.local_ratio <= self.rho
        ]
        return passed[-1] + 1 if passed else 0


def local_test(
    prefix_opt: PrefixOptSeries,
    processed_weight: float | Sequence[float],
    candidate_weight: float,
    t: int,
    rho: float,
) -> tuple[bool, float]:
    """Compare the prefix optimum at t against processed + candidate weight.

    ``processed_weight`` may be the individual processed weights instead of
    their sum; the denominator is then one correctly-rounded sum over the
    whole processed-plus-candidate set, so a denominator set equal to the
    numerator's yields a ratio of exactly 1. Ratio conventions: 1 when both
    sides are zero, infinity when only the denominator is. Returns
    (ratio <= rho, ratio).
    """
    if rho < 1:
        raise InvalidThreshold(f"threshold must be >= 1, got {rho}")
    if isinstance(processed_weight, (int, float)):
        processed: tuple[float, ...] = (float(processed_weight),)
    else:
        processed = tuple(processed_weight)
    numerator = prefix_opt.values[t]
    denominator = math.fsum((*processed, candidate_weight))
    if denominator == 0.0:
        ratio = 1.0 if numerator == 0.0 else math.inf
    else:
        ratio = numerator / denominator
    return ratio <= rho, ratio


def lap_run(
    prediction: Instance,
    realization: Instance,
    rho: float,
    policy: OnlineStepPolicy,
) -> tuple[Schedule, LapTrace]:
    """Run the learning-augmented scheduler over every slot.

    The prediction's optimal choices are computed upfront; the prefix
    optimum of the realization is shared (cached) across runs on the same
    realization.
    """
    if rho < 1:
        raise InvalidThreshold(f"threshold must be >= 1, got {rho}")
    horizon = max(realization.horizon, prediction.horizon)
    real = realization.with_horizon(horizon)
    choices = build_choices(prediction).choices
    series = prefix_opt_series(real)
    processed: set[str] = set()
    processed_jobs: list[Job] = []
    slots: list[Optional[Job]] = []
    rows: list[LapSlot] = []
    for t in range(horizon + 1):
        cid = choices[t] if t < len(choices) else None
        predicted = real.by_id.get(cid) if cid is not None else None
        ratio: Optional[float] = None
        chosen: Optional[Job] = None
        source = ONLINE
        if (
            predicted is not None
            and predicted.id not in processed
            and feasible_at(predicted, t)
        ):
            weights = [j.weight for j in processed_jobs]
            passed, ratio = local_test(series, weights, predicted.weight, t, rho)
            if passed:
                chosen = predicted
                source = PREDICTION
        if chosen is None:
            pick = policy.step(pending_set(real, processed, t))
            chosen = real.by_id[pick] if pick is not None else None
        if chosen is not None:
            processed.add(chosen.id)
            processed_jobs.append(chosen)
        slots.append(chosen)
        rows.append(
            LapSlot(
                t=t,
                source=source,
                job_id=chosen.id if chosen is not None else None,
                weight=chosen.weight if chosen is not None else 0.0,
                local_ratio=ratio,
                predicted_id=cid,
            )
        )
    return Schedule(tuple(slots)), LapTrace(rho, tuple(rows))


def write_trace_csv(trace: LapTrace, path: Path | str) -> None:
    """Write trace rows as ``t,source,job_id,weight,local_ratio``."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "source", "job_id", "weight", "local_ratio"])
        for r in trace.rows:
            writer.writerow(
                [
                    r.t,
                    r.source,
                    r.job_id or "",
                    repr(r.weight),
                    "" if r.local_ratio is None else repr(r.local_ratio),
                ]
            )
