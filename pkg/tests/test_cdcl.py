import random

import pytest

from mergeres.cdcl import (SplitMix64, Trail, conflict_derivation, episode_from_decisions, first_uip,
                           is_asserting, random_episode, validate_trail)
from mergeres.cnf import Restriction, apply_restriction
from mergeres.experiments import cdcl_lemmas_run, random_3cnf
from mergeres.proof import check_valid
from mergeres.systems import is_input_shaped

from conftest import C, F

EX = F([-1, 2], [-1, -2, 3], [-3, 4], [-3, -4])
EX_TRAIL = Trail([(1, None), (2, 0), (3, 1), (4, 2)])


def test_splitmix_reference():
    # published first output of splitmix64 for seed 0
    assert SplitMix64(0).next() == 0xE220A8397B1DCDAF
    g, h = SplitMix64(9), SplitMix64(9)
    assert [g.next() for _ in range(5)] == [h.next() for _ in range(5)]


def test_validate_trail_examples():
    f = F([-1, 2])
    assert validate_trail(Trail([(1, None), (2, 0)]), f)[0]
    ok, why = validate_trail(Trail([(1, None), (3, None)]), F([-1, 2], num_vars=3))
    assert not ok and "propagates" in why
    assert not validate_trail(Trail([(1, None), (2, 0), (-2, None)]), f)[0]
    assert validate_trail(EX_TRAIL, EX)[0]


def test_worked_conflict_example():
    a = conflict_derivation(EX_TRAIL, EX, 3)
    assert a.clauses[3] == C(-3) and a.clauses[4] == C(-3, -4)
    assert a.i_star == 1
    assert first_uip(a, EX_TRAIL) == (C(-3), 3)
    assert check_valid(a.proof, EX) and is_input_shaped(a.proof)[0]
    assert a.proof.step_is_merge(a.producer[3])


def test_conflict_errors():
    with pytest.raises(ValueError):
        conflict_derivation(EX_TRAIL, EX, 0)


def test_no_resolution_needed():
    # not BCP-saturated (valid trails always resolve at least once), but the
    # backward walk itself does not depend on that
    f = F([-1, -2])
    t = Trail([(1, None), (2, None)])
    a = conflict_derivation(t, f, 0)
    assert len(a.proof) == 1 and a.clauses == {2: C(-1, -2)}


def test_is_asserting_examples():
    assert is_asserting(C(-3), EX_TRAIL)
    t = Trail([(1, None), (2, None)])
    assert not is_asserting(C(3, 4), t)  # both vars unassigned before the last decision
    assert not is_asserting(C(1, 3), t)  # satisfied before the last decision


def test_single_decision_uip():
    ep = episode_from_decisions(EX, [1])
    a = conflict_derivation(ep.trail, EX, ep.conflict)
    clause, j = first_uip(a, ep.trail)
    assert is_asserting(clause, ep.trail) and j >= a.i_star


def test_random_episode_regressions():
    exp = {
        0: ("sat", None, [(1, None), (-2, None), (3, 20), (4, None), (-5, 14), (-6, 1), (-7, None), (8, None)]),
        1: ("conflict", 29, [(1, None), (2, None), (-7, 11), (5, 15), (-3, 28), (4, 0), (-8, 1)]),
        2: ("sat", None, [(-1, None), (-2, None), (8, 16), (3, None), (5, 11), (6, 23), (-4, 24), (-7, None)]),
    }
    for s, (status, conflict, entries) in exp.items():
        f = random_3cnf(random.Random(100 + s), 8, 30)
        e = random_episode(f, s)
        assert (e.status, e.conflict, e.trail.entries) == (status, conflict, entries)


def test_episode_properties():
    rng = random.Random(11)
    n = 0
    while n < 150:
        f = random_3cnf(rng, 12, 50)
        ep = random_episode(f, rng.getrandbits(32))
        assert validate_trail(ep.trail, f)[0]
        if ep.status != "conflict":
            continue
        n += 1
        a = conflict_derivation(ep.trail, f, ep.conflict)
        assert check_valid(a.proof, f) and is_input_shaped(a.proof)[0]
        for i, d in a.clauses.items():
            rho = Restriction({abs(l): int(l > 0) for l, _ in ep.trail.entries[:i]})
            assert apply_restriction(d, rho).is_empty()


def test_cdcl_lemmas_small_run():
    r = cdcl_lemmas_run(100, seed=4)
    assert r["uip_not_merge"] == 0 and r["asserting_not_empowering"] == 0
