"""Experiment pipeline: generators, perturbations, ingestion, and sweeps.

Synthetic instances follow the agreeable-deadline model: arrivals land in
slots 1..T with per-slot counts from either a uniform range or a
power-law rule, weights are uniform on (0, 1], and deadlines take a
running maximum of release + uniform slack so later arrivals never get
earlier deadlines. Event logs (one UNIX timestamp per line/field) are
bucketed into days and re-synthesized the same way; weights and deadlines
for real data are reconstructions, since the logs carry timestamps only.

Predictions are built by perturbing a realization: Gaussian noise on
weights or a uniform integer shift on deadlines, keeping job identities.
The runner sweeps the perturbation magnitude, runs every algorithm in the
roster per trial, and emits tidy CSVs (all rows plus per-algorithm means).
"""

from __future__ import annotations

import csv
import hashlib
import math
import random
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .core import (
    Instance,
    Job,
    ParseError,
    Schedule,
    schedule_weight,
    validate_schedule,
    write_instance_csv,
)
from .lap import lap_run
from .offline import opt_schedule
from .online import OnlineStepPolicy, edf_alpha, run_online
from .prediction import blind_follow, prediction_error

WEIGHT_FLOOR = 1e-9


class InvalidSchedule(ValueError):
    """Schedule fails validation against its instance."""


class EmptyDataset(ValueError):
    """Event file contains no parseable events."""


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from the given parts (pickle-free, hash-stable)."""
    digest = hashlib.sha256(repr(parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class GeneratorSpec:
    """Synthetic-instance recipe.

    ``horizon`` is the arrival window T (releases fall in 1..T); the
    instance's own horizon ends up at the largest deadline. ``lo``/``hi``
    bound the per-slot arrival count for the uniform kind; ``a``/``m``
    parameterize the power-law kind, whose per-slot count is
    round(m * (1 - p)) with p drawn from density a * x**(a-1) on [0, 1].
    Weights are uniform on (0, 1]; deadlines are release plus a uniform
    slack in [1, max_slack], forced nondecreasing.
    """

    kind: str
    horizon: int = 75
    lo: int = 2
    hi: int = 8
    a: float = 150.0
    m: float = 500.0
    max_slack: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("uniform", "powerlaw"):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if not 0 <= self.lo <= self.hi:
            raise ValueError("need 0 <= lo <= hi")
        if self.a <= 0 or self.m < 0:
            raise ValueError("need a > 0 and m >= 0")
        if self.max_slack < 1:
            raise ValueError("max_slack must be >= 1")


def _agreeable_jobs(
    counts: list[int], rng: random.Random, max_slack: int, id_prefix: str = "j"
) -> list[Job]:
    # counts[i] arrivals at release slot i+1; running-max deadlines keep
    # the instance agreeable under generation order.
    jobs: list[Job] = []
    last_deadline = 0
    idx = 0
    for offset, count in enumerate(counts):
        release = offset + 1
        for _ in range(count):
            deadline = max(last_deadline, release + rng.randint(1, max_slack))
            last_deadline = deadline
            weight = 1.0 - rng.random()
            jobs.append(Job(f"{id_prefix}{idx:05d}", release, deadline, weight))
            idx += 1
    return jobs


def gen_uniform(spec: GeneratorSpec) -> Instance:
    """Per-slot arrival counts uniform on [lo, hi]."""
    if spec.kind != "uniform":
        raise ValueError(f"spec kind is {spec.kind!r}, not 'uniform'")
    rng = random.Random(spec.seed)
    counts = [rng.randint(spec.lo, spec.hi) for _ in range(spec.horizon)]
    return Instance.of(_agreeable_jobs(counts, rng, spec.max_slack))


def power_law_sample(rng: random.Random, a: float) -> float:
    """Draw from density a * x**(a-1) on [0, 1] (inverse CDF)."""
    return rng.random() ** (1.0 / a)


def gen_powerlaw(spec: GeneratorSpec) -> Instance:
    """Per-slot arrival counts round(m * (1 - p)), p power-law distributed."""
    if spec.kind != "powerlaw":
        raise ValueError(f"spec kind is {spec.kind!r}, not 'powerlaw'")
    rng = random.Random(spec.seed)
    counts = [
        max(0, round(spec.m * (1.0 - power_law_sample(rng, spec.a))))
        for _ in range(spec.horizon)
    ]
    return Instance.of(_agreeable_jobs(counts, rng, spec.max_slack))


def generate(spec: GeneratorSpec) -> Instance:
    return gen_uniform(spec) if spec.kind == "uniform" else gen_powerlaw(spec)


def parse_generator_spec(text: str, seed: Optional[int] = None) -> GeneratorSpec:
    """Parse ``uniform:T=75,lo=2,hi=8,seed=1`` style spec strings."""
    kind, _, rest = text.partition(":")
    fields: dict = {"kind": kind.strip()}
    aliases = {"t": "horizon", "slack": "max_slack"}
    int_keys = {"horizon", "lo", "hi", "max_slack", "seed"}
    for part in filter(None, (p.strip() for p in rest.split(","))):
        key, _, value = part.partition("=")
        key = aliases.get(key.strip().lower(), key.strip().lower())
        fields[key] = int(value) if key in int_keys else float(value)
    if seed is not None:
        fields["seed"] = seed
    return GeneratorSpec(**fields)


@dataclass(frozen=True)
class PerturbationSpec:
    """How a prediction is derived from a realization.

    ``weight-gauss`` adds N(0, sigma) noise to every weight (clamped to a
    tiny positive floor); ``deadline-shift`` adds a uniform integer in
    [-k, k] to every deadline (clamped to release + 1). Identities,
    releases, and the untouched attribute are preserved.
    """

    kind: str
    sigma: float = 0.0
    k: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("weight-gauss", "deadline-shift"):
            raise ValueError(f"unknown perturbation kind {self.kind!r}")
        if self.sigma < 0 or self.k < 0:
            raise ValueError("sigma and k must be >= 0")


def perturb(instance: Instance, spec: PerturbationSpec) -> Instance:
    rng = random.Random(spec.seed)
    if spec.kind == "weight-gauss":
        if spec.sigma == 0:
            return instance
        jobs = [
            Job(
                j.id,
                j.release,
                j.deadline,
                max(j.weight + rng.gauss(0.0, spec.sigma), WEIGHT_FLOOR),
            )
            for j in instance.jobs
        ]
        return Instance.of(jobs, instance.horizon)
    if spec.k == 0:
        return instance
    jobs = [
        Job(
            j.id,
            j.release,
            max(j.release + 1, j.deadline + rng.randint(-spec.k, spec.k)),
            j.weight,
        )
        for j in instance.jobs
    ]
    return Instance.of(jobs)


def ingest_snap_events(
    path: Path | str,
    day_bucket_s: int = 86_400,
    slots_per_day: int = 75,
    band: tuple[int, int] = (300, 500),
    max_slack: int = 10,
    seed: int = 0,
    ts_col: int = 2,
) -> list[Instance]:
    """Bucket a timestamped event log into per-day scheduling instances.

    Lines are comma- or whitespace-separated; field ``ts_col`` holds a
    UNIX timestamp. Days whose event count falls inside ``band`` become
    one instance each: timestamps are quantized linearly into release
    slots 1..slots_per_day and weights/deadlines are synthesized with the
    per-day-seeded agreeable models.
    """
    lo, hi = band
    events: list[int] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split(",") if "," in line else line.split()
            if ts_col >= len(fields):
                raise ParseError(
                    f"no field {ts_col} in {len(fields)}-field line", line_no
                )
            try:
                events.append(int(float(fields[ts_col])))
            except ValueError as exc:
                raise ParseError(
                    f"field {ts_col} ({fields[ts_col]!r}) is not a timestamp", line_no
                ) from exc
    if not events:
        raise EmptyDataset(f"no events in {path}")
    by_day: dict[int, list[int]] = {}
    for ts in events:
        by_day.setdefault(ts // day_bucket_s, []).append(ts)
    instances: list[Instance] = []
    for day_index, day_key in enumerate(sorted(by_day)):
        stamps = sorted(by_day[day_key])
        if not lo <= len(stamps) <= hi:
            continue
        start = day_key * day_bucket_s
        counts = [0] * slots_per_day
        for ts in stamps:
            slot = 1 + (ts - start) * slots_per_day // day_bucket_s
            counts[min(max(slot, 1), slots_per_day) - 1] += 1
        rng = random.Random(derive_seed(seed, "day", day_key))
        jobs = _agreeable_jobs(counts, rng, max_slack, id_prefix=f"d{day_index:03d}e")
        instances.append(Instance.of(jobs))
    return instances


def competitive_ratio(instance: Instance, schedule: Schedule) -> float:
    """Optimal weight over achieved weight (1 when both are zero)."""
    ok, violations = validate_schedule(instance, schedule)
    if not ok:
        raise InvalidSchedule("; ".join(violations))
    best = schedule_weight(opt_schedule(instance))
    achieved = schedule_weight(schedule)
    if achieved == 0.0:
        return 1.0 if best == 0.0 else math.inf
    return best / achieved


@dataclass(frozen=True)
class ResultRecord:
    dataset: str
    sweep: str
    sweep_value: float
    trial: int
    algorithm: str
    eta: float
    ratio: float
    runtime_s: float


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: a dataset, a perturbation grid, and an algorithm roster.

    ``dataset`` is ``uniform``, ``powerlaw``, or a path to an event log
    (in which case trials are its qualifying days). ``sweep`` is ``sigma``
    (weight noise) or ``k`` (deadline shift). The learning-augmented
    scheduler runs with threshold 1 + rho_excess and the named fallback;
    the benchmarks ignore the prediction.
    """

    dataset: str
    sweep: str
    values: tuple[float, ...]
    trials: int = 10
    algorithms: tuple[str, ...] = ("lap", "mg", "greedy", "edf", "edf-alpha")
    rho_excess: float = 0.1
    alpha: float = 0.5
    seed: int = 0
    out_dir: Optional[str] = None
    fallback: str = "greedy"
    horizon: int = 75
    lo: int = 2
    hi: int = 8
    a: float = 150.0
    m: float = 500.0
    max_slack: int = 10
    slots_per_day: int = 75
    ts_col: int = 2

    def __post_init__(self):
        if self.sweep not in ("sigma", "k"):
            raise ValueError(f"sweep must be 'sigma' or 'k', got {self.sweep!r}")
        if self.rho_excess < 0:
            raise ValueError("rho_excess must be >= 0")


_CONFIG_INT_KEYS = {"trials", "seed", "horizon", "lo", "hi", "max_slack",
                    "slots_per_day", "ts_col"}
_CONFIG_FLOAT_KEYS = {"rho_excess", "alpha", "a", "m"}


def parse_config_file(path: Path | str) -> ExperimentConfig:
    """Read a flat ``key = value`` config file."""
    fields: dict = {}
    aliases = {"t": "horizon"}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ParseError("expected 'key = value'", line_no)
            key = aliases.get(key.strip().lower(), key.strip().lower())
            value = value.strip()
            if key == "values":
                fields[key] = tuple(float(v) for v in value.split(","))
            elif key == "algorithms":
                fields[key] = tuple(v.strip() for v in value.split(","))
            elif key in _CONFIG_INT_KEYS:
                fields[key] = int(value)
            elif key in _CONFIG_FLOAT_KEYS:
                fields[key] = float(value)
            else:
                fields[key] = value
    return ExperimentConfig(**fields)


def _algorithm_schedule(
    name: str,
    realization: Instance,
    predicted: Instance,
    config: ExperimentConfig,
) -> Schedule:
    if name == "lap":
        policy = (
            edf_alpha(config.alpha)
            if config.fallback == "edf-alpha"
            else OnlineStepPolicy(config.fallback)
        )
        schedule, _ = lap_run(predicted, realization, 1.0 + config.rho_excess, policy)
        return schedule
    if name == "blind":
        return blind_follow(predicted, realization)
    if name == "edf-alpha":
        return run_online(edf_alpha(config.alpha), realization)
    return run_online(OnlineStepPolicy(name), realization)


def run_experiment(config: ExperimentConfig) -> list[ResultRecord]:
    """Run the full sweep and return one record per (value, trial, algorithm).

    Deterministic given the seed: base instances are seeded per trial
    (shared across sweep values, so curves compare like against like) and
    perturbations per (sweep value, trial).
    """
    day_instances: Optional[list[Instance]] = None
    if config.dataset not in ("uniform", "powerlaw"):
        day_instances = ingest_snap_events(
            config.dataset,
            slots_per_day=config.slots_per_day,
            max_slack=config.max_slack,
            seed=derive_seed(config.seed, "ingest"),
            ts_col=config.ts_col,
        )
    trials = len(day_instances) if day_instances is not None else config.trials
    records: list[ResultRecord] = []
    for sweep_index, value in enumerate(config.values):
        for trial in range(trials):
            if day_instances is not None:
                realization = day_instances[trial]
            else:
                realization = generate(
                    GeneratorSpec(
                        kind=config.dataset,
                        horizon=config.horizon,
                        lo=config.lo,
                        hi=config.hi,
                        a=config.a,
                        m=config.m,
                        max_slack=config.max_slack,
                        seed=derive_seed(config.seed, "instance", trial),
                    )
                )
            pert_seed = derive_seed(config.seed, "perturb", sweep_index, trial)
            if config.sweep == "sigma":
                pspec = PerturbationSpec("weight-gauss", sigma=value, seed=pert_seed)
            else:
                pspec = PerturbationSpec("deadline-shift", k=int(value), seed=pert_seed)
            predicted = perturb(realization, pspec)
            eta = prediction_error(realization, predicted)
            for name in config.algorithms:
                started = time.perf_counter()
                schedule = _algorithm_schedule(name, realization, predicted, config)
                elapsed = time.perf_counter() - started
                records.append(
                    ResultRecord(
                        dataset=config.dataset,
                        sweep=config.sweep,
                        sweep_value=value,
                        trial=trial,
                        algorithm=name,
                        eta=eta,
                        ratio=competitive_ratio(realization, schedule),
                        runtime_s=elapsed,
                    )
                )
    return records


def series_rows(
    records: list[ResultRecord],
) -> list[tuple[float, str, float, float]]:
    """Per (sweep value, algorithm) mean ratio and standard error."""
    order: list[tuple[float, str]] = []
    grouped: dict[tuple[float, str], list[float]] = {}
    for r in records:
        key = (r.sweep_value, r.algorithm)
        if key not in grouped:
            grouped[key] = []
            order.append(key)
        grouped[key].append(r.ratio)
    rows = []
    for key in order:
        ratios = grouped[key]
        n = len(ratios)
        mean = math.fsum(ratios) / n
        if n > 1:
            stderr = math.sqrt(
                math.fsum((x - mean) ** 2 for x in ratios) / (n - 1)
            ) / math.sqrt(n)
        else:
            stderr = 0.0
        rows.append((key[0], key[1], mean, stderr))
    return rows


RESULTS_HEADER = [
    "dataset", "sweep", "sweep_value", "trial", "algorithm", "eta", "ratio",
    "runtime_s",
]


def write_results_csv(
    records: list[ResultRecord], path: Path | str, meta: Optional[list[str]] = None
) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in meta or []:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULTS_HEADER)
        for r in records:
            writer.writerow(
                [
                    r.dataset,
                    r.sweep,
                    repr(r.sweep_value),
                    r.trial,
                    r.algorithm,
                    repr(r.eta),
                    repr(r.ratio),
                    f"{r.runtime_s:.6f}",
                ]
            )


def write_series_csv(records: list[ResultRecord], path: Path | str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["sweep_value", "algorithm", "mean_ratio", "stderr"])
        for value, algorithm, mean, stderr in series_rows(records):
            writer.writerow([repr(value), algorithm, repr(mean), repr(stderr)])


def run_experiment_to_dir(config: ExperimentConfig) -> list[ResultRecord]:
    """Run the sweep and write results.csv + series.csv to out_dir."""
    if not config.out_dir:
        raise ValueError("config.out_dir is required")
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = run_experiment(config)
    meta = [
        f"dataset={config.dataset} sweep={config.sweep} trials={config.trials} "
        f"seed={config.seed} rho={1.0 + config.rho_excess!r} "
        f"fallback={config.fallback} alpha={config.alpha!r}",
        "weights and deadlines are synthetic reconstructions: "
        "weight ~ uniform(0,1], deadline = running-max(release + uniform[1,max_slack])",
    ]
    write_results_csv(records, out / "results.csv", meta)
    write_series_csv(records, out / "series.csv")
    return records


def write_day_instances(instances: list[Instance], out_dir: Path | str) -> list[Path]:
    """Write one instance CSV per ingested day; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, instance in enumerate(instances):
        path = out / f"day_{i:03d}.csv"
        write_instance_csv(instance, path)
        paths.append(path)
    return paths
