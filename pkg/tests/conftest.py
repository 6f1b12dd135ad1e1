import pytest

from pktsched import GeneratorSpec, Instance, Job, PerturbationSpec, gen_uniform, perturb


def mk(rows, horizon=None):
    """Instance from (id, release, deadline, weight) tuples."""
    return Instance.of([Job(i, r, d, w) for i, r, d, w in rows], horizon)


@pytest.fixture
def j1():
    # Two-job lower-bound fixture: a tight light job and a loose unit job.
    return mk([("a", 0, 1, 0.01), ("b", 0, 2, 1.0)])


@pytest.fixture
def j2():
    # j1 plus a late near-unit rival for the same final slot.
    return mk([("a", 0, 1, 0.01), ("b", 0, 2, 1.0), ("c", 1, 2, 0.999)])


def random_instance(rng, max_jobs=8, max_horizon=8, min_jobs=0):
    n = rng.randint(min_jobs, max_jobs)
    jobs = []
    for i in range(n):
        r = rng.randint(0, max_horizon - 1)
        d = rng.randint(r + 1, max_horizon)
        jobs.append(Job(f"j{i:02d}", r, d, rng.random()))
    return Instance.of(jobs)


def random_agreeable(rng, max_window=6, lo=1, hi=2, max_slack=5):
    spec = GeneratorSpec(
        "uniform",
        horizon=rng.randint(2, max_window),
        lo=lo,
        hi=hi,
        max_slack=max_slack,
        seed=rng.randrange(2**32),
    )
    return gen_uniform(spec)


def reversed_weights(instance):
    """Same jobs with the weight order flipped (lightest gets heaviest)."""
    by_weight = sorted(instance.jobs, key=lambda j: j.weight)
    flipped = [j.weight for j in by_weight][::-1]
    return Instance.of(
        [Job(j.id, j.release, j.deadline, w) for j, w in zip(by_weight, flipped)],
        instance.horizon,
    )


def shifted_deadlines(instance, k, seed):
    return perturb(instance, PerturbationSpec("deadline-shift", k=k, seed=seed))


def adversarial_prediction(instance, kind, seed):
    if kind == "empty":
        return Instance.of([])
    if kind == "reversed":
        return reversed_weights(instance)
    return shifted_deadlines(instance, k=3, seed=seed)
