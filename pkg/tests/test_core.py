import itertools
import math
import random

import pytest

from pktsched import (
    InfeasibleSelection,
    Instance,
    Job,
    ParseError,
    Schedule,
    brute_force_opt,
    canonicalize,
    dominates,
    expired_set,
    feasible_at,
    opt_schedule,
    pending_set,
    read_instance_csv,
    schedule_weight,
    validate_schedule,
    write_instance_csv,
)
from conftest import mk, random_instance


def test_job_validation():
    with pytest.raises(ValueError):
        Job("x", -1, 2, 1.0)
    with pytest.raises(ValueError):
        Job("x", 2, 2, 1.0)  # needs deadline >= release + 1
    with pytest.raises(ValueError):
        Job("x", 0, 1, -0.5)


def test_feasible_at_examples():
    eps = Job("a", 0, 1, 0.01)
    assert feasible_at(eps, 0)
    assert not feasible_at(eps, 1)  # expired exactly at its deadline slot
    assert not feasible_at(Job("b", 1, 2, 1.0), 0)  # not yet released


def test_feasible_slot_count():
    rng = random.Random(7)
    for _ in range(50):
        r = rng.randint(0, 5)
        d = rng.randint(r + 1, 9)
        job = Job("x", r, d, 1.0)
        assert sum(feasible_at(job, t) for t in range(12)) == d - r


def test_pending_set_examples(j2):
    assert {j.id for j in pending_set(j2, set(), 0)} == {"a", "b"}
    assert pending_set(j2, {"a", "b", "c"}, 1) == set()
    assert {j.id for j in pending_set(j2, {"a"}, 1)} == {"b", "c"}


def test_expired_set_examples(j2):
    assert {j.id for j in expired_set(j2, set(), 1)} == {"a"}
    assert expired_set(j2, set(), 0) == set()
    assert expired_set(j2, {"a"}, 1) == set()


def test_partition_of_released():
    rng = random.Random(11)
    for _ in range(60):
        inst = random_instance(rng)
        ids = [j.id for j in inst.jobs]
        processed = {i for i in ids if rng.random() < 0.4}
        for t in range(inst.horizon + 1):
            released = {j.id for j in inst.jobs if j.release <= t}
            pend = {j.id for j in pending_set(inst, processed, t)}
            expd = {j.id for j in expired_set(inst, processed, t)}
            done = processed & released
            assert pend | expd | done == released
            assert not (pend & expd) and not (pend & done) and not (expd & done)


def test_schedule_weight_examples(j2):
    a, b = j2.by_id["a"], j2.by_id["b"]
    sched = Schedule((a, b, None))
    assert schedule_weight(sched, upto=0) == 0.01
    assert schedule_weight(Schedule((None,))) == 0.0
    assert schedule_weight(Schedule((None, b, None))) == 1.0
    with pytest.raises(ValueError):
        schedule_weight(sched, upto=5)


def test_dominates_examples():
    assert dominates(Job("x", 0, 1, 5.0), Job("y", 0, 2, 3.0))
    assert not dominates(Job("x", 0, 2, 5.0), Job("y", 0, 1, 3.0))
    # Tied weights: after the construction-time tie-break exactly one
    # direction must hold.
    inst = mk([("x", 0, 1, 3.0), ("y", 0, 1, 3.0)])
    x, y = inst.by_id["x"], inst.by_id["y"]
    assert dominates(x, y) != dominates(y, x)


def test_dominates_strict_partial_order():
    rng = random.Random(13)
    for _ in range(30):
        inst = random_instance(rng, max_jobs=8)
        jobs = inst.jobs
        for j in jobs:
            assert not dominates(j, j)
        for a, b in itertools.permutations(jobs, 2):
            assert not (dominates(a, b) and dominates(b, a))
        for a, b, c in itertools.permutations(jobs, 3):
            if dominates(a, b) and dominates(b, c):
                assert dominates(a, c)


def test_canonicalize_examples(j2):
    sched = canonicalize(j2, {"b", "c"})
    assert [j.id if j else None for j in sched.slots] == ["b", "c", None]

    empty = canonicalize(j2, set())
    assert all(j is None for j in empty.slots)

    inst = mk([("p", 0, 1, 2.0), ("q", 0, 2, 3.0)])
    sched = canonicalize(inst, {"p", "q"})
    assert [j.id if j else None for j in sched.slots] == ["p", "q", None]


def test_canonicalize_tie_breaks():
    # Equal deadlines: larger weight first (the dominance-consistent pick).
    inst = mk([("p", 0, 2, 1.0), ("q", 0, 2, 3.0)])
    sched = canonicalize(inst, {"p", "q"})
    assert [j.id for j in sched.slots if j] == ["q", "p"]


def test_canonicalize_infeasible():
    inst = mk([("p", 0, 1, 1.0), ("q", 0, 1, 2.0)])
    with pytest.raises(InfeasibleSelection):
        canonicalize(inst, {"p", "q"})
    with pytest.raises(KeyError):
        canonicalize(inst, {"nope"})


def test_canonicalize_agrees_with_brute_force_feasibility():
    # For every subset of a small instance: schedulable (per the exhaustive
    # oracle) iff canonicalize succeeds, with exact weight and validity.
    rng = random.Random(17)
    for _ in range(10):
        inst = random_instance(rng, max_jobs=7, max_horizon=7)
        ids = [j.id for j in inst.jobs]
        for bits in range(1 << len(ids)):
            chosen = {ids[i] for i in range(len(ids)) if bits >> i & 1}
            sub = Instance(
                tuple(j for j in inst.jobs if j.id in chosen), inst.horizon
            )
            total = math.fsum(j.weight for j in sub.jobs)
            schedulable = brute_force_opt(sub)[0] == total
            if schedulable:
                sched = canonicalize(inst, chosen)
                ok, violations = validate_schedule(inst, sched)
                assert ok, violations
                assert schedule_weight(sched) == total
            else:
                with pytest.raises(InfeasibleSelection):
                    canonicalize(inst, chosen)


def test_validate_schedule(j2):
    ok, violations = validate_schedule(j2, opt_schedule(j2))
    assert ok and not violations

    c = j2.by_id["c"]
    ok, violations = validate_schedule(j2, Schedule((c, None, None)))
    assert not ok and any("before release" in v for v in violations)

    b = j2.by_id["b"]
    ok, violations = validate_schedule(j2, Schedule((b, b, None)))
    assert not ok and any("more than once" in v for v in violations)

    stranger = Job("zz", 0, 2, 0.5)
    ok, violations = validate_schedule(j2, Schedule((stranger, None, None)))
    assert not ok and any("not in instance" in v for v in violations)


def test_instance_invariants():
    with pytest.raises(ValueError):
        Instance.of([Job("a", 0, 2, 1.0), Job("a", 0, 3, 2.0)])
    with pytest.raises(ValueError):
        Instance.of([Job("a", 0, 5, 1.0)], horizon=3)  # deadline past horizon
    # Distinct weights pass through untouched.
    inst = mk([("a", 0, 2, 0.25), ("b", 0, 2, 0.5)])
    assert [j.weight for j in inst.jobs] == [0.25, 0.5]


def test_weight_tie_break_is_deterministic():
    inst1 = mk([("a", 0, 2, 1.0), ("b", 0, 2, 1.0), ("c", 0, 2, 2.0)])
    inst2 = mk([("a", 0, 2, 1.0), ("b", 0, 2, 1.0), ("c", 0, 2, 2.0)])
    assert inst1 == inst2
    weights = [j.weight for j in inst1.jobs]
    assert len(set(weights)) == 3
    assert all(abs(w - orig) < 1e-9 for w, orig in zip(weights, [1.0, 1.0, 2.0]))


def test_csv_roundtrip(tmp_path, j2):
    path = tmp_path / "inst.csv"
    write_instance_csv(j2, path)
    again = read_instance_csv(path)
    assert again == j2
    # Rewriting is byte-stable.
    path2 = tmp_path / "inst2.csv"
    write_instance_csv(again, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_csv_horizon_comment(tmp_path, j2):
    path = tmp_path / "inst.csv"
    write_instance_csv(j2.with_horizon(10), path)
    assert read_instance_csv(path).horizon == 10


def test_csv_parse_errors(tmp_path):
    bad_header = tmp_path / "h.csv"
    bad_header.write_text("id,release,deadline\n", encoding="utf-8")
    with pytest.raises(ParseError):
        read_instance_csv(bad_header)

    bad_row = tmp_path / "r.csv"
    bad_row.write_text(
        "id,release,deadline,weight\na,0,zzz,1.0\n", encoding="utf-8"
    )
    with pytest.raises(ParseError) as exc:
        read_instance_csv(bad_row)
    assert exc.value.line_no == 2

    empty = tmp_path / "e.csv"
    empty.write_text("", encoding="utf-8")
    with pytest.raises(ParseError):
        read_instance_csv(empty)
