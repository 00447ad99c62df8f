import random

import pytest
from hypothesis import given, settings, strategies as st

from mergeres.cnf import SATISFIED, Clause, Restriction, implies, is_satisfied
from mergeres.families import FamilyParams, build_res_ub, build_rml_r1, gen_family
from mergeres.proof import (AXIOM, ProofError, RESOLUTION, SAT, Proof, ProofBuilder, ProofStep, TraceError,
                            axiom_dependencies, check_semantic, check_valid, image_map, parse_trace,
                            restrict_proof, stats, syntactic_equivalent, write_trace)

from conftest import C, F

TWO = "a 1 1 0\na 2 -1 0\nr 3 1 2 0\n"


def small_refutation():
    b = ProofBuilder()
    a1, a2, a3 = b.axiom(C(1, 2)), b.axiom(C(-1, 2)), b.axiom(C(-2))
    r = b.resolve(a1, a2)
    b.resolve(r, a3)
    return b.build(), F([1, 2], [-1, 2], [-2])


def test_check_valid_examples():
    p = parse_trace(TWO)
    assert check_valid(p, F([1], [-1]), require_refutation=True)
    bad = Proof([ProofStep(1, AXIOM, C(1, 2)), ProofStep(2, AXIOM, C(-1, 3)),
                 ProofStep(3, RESOLUTION, C(2), (1, 2), 1)])
    rep = check_valid(bad, F([1, 2], [-1, 3]))
    assert not rep and rep.step == 3
    b = ProofBuilder()
    b.weaken(b.axiom(C(1)), C(1, 2))
    w = b.build()
    assert not check_valid(w, F([1]))
    assert check_valid(w, F([1]), allow_weakening=True)


def test_axiom_not_in_formula():
    assert not check_valid(parse_trace(TWO), F([1]))


def test_step_invariants():
    with pytest.raises(ValueError):
        ProofStep(2, RESOLUTION, C(), (1, 3), 1)
    with pytest.raises(ValueError):
        ProofStep(1, AXIOM, C(1), (0,))


def test_axiom_dependencies():
    p = parse_trace(TWO)
    assert axiom_dependencies(p, 3) == {1, 2}
    assert axiom_dependencies(p, 1) == {1}
    with pytest.raises(ProofError):
        axiom_dependencies(p, 9)


def test_root_depends_on_every_constraint():
    prm = FamilyParams(2, 2, 3)
    f, lay = gen_family(prm)
    for p in (build_res_ub(prm), build_rml_r1(prm)):
        deps = axiom_dependencies(p, p.root)
        role = {c: r for c, r in zip(f.clauses, lay.roles)}
        seen = {role[p.clause(a)][1] for a in deps if role[p.clause(a)][0] == "A"}
        assert seen == set(range(1, lay.num_constraints + 1))


def test_dependencies_monotone():
    p = build_res_ub(FamilyParams(2, 2, 3))
    for s in p.steps:
        if s.premises:
            assert axiom_dependencies(p, s.id) <= set().union(*(axiom_dependencies(p, q) for q in s.premises))


def test_restrict_identity():
    p, _ = small_refutation()
    r = restrict_proof(p, Restriction())
    assert r.semantic and [s.clause for s in r.steps] == [s.clause for s in p.steps]


def test_restrict_and_syntactic_equivalent():
    p, f = small_refutation()
    rho = Restriction({1: 1})
    r = restrict_proof(p, rho)
    assert r[1].kind == SAT and r[1].clause is SATISFIED
    assert check_semantic(r, f.restrict(rho))
    s = syntactic_equivalent(r, f.restrict(rho))
    assert len(s) == 3 and s.is_refutation()
    assert check_valid(s, f.restrict(rho), require_refutation=True)
    assert check_valid(s, F([2], [-2]))


def test_syntactic_equivalent_fixed_point():
    p = build_res_ub(FamilyParams(2, 2, 3))
    assert syntactic_equivalent(p) == p


def test_subsumption_branch():
    # s(A) = [2] already implies C = [2,3]
    steps = [ProofStep(1, AXIOM, C(2)), ProofStep(2, AXIOM, C(-1, 3)),
             ProofStep(3, RESOLUTION, C(2, 3), (1, 2), 1)]
    img = image_map(Proof(steps, semantic=True))
    assert img[3] == C(2)


def test_trace_examples():
    p = parse_trace(TWO)
    assert len(p) == 3 and p.is_refutation()
    q = parse_trace(TWO + "L 3\n")
    assert q.lemmas == {3}
    for bad in ("a 1 1 0\nr 4 1 5 0\n", "a 2 1 0\na 1 -1 0\n", "a 1 1\n", "a 1 1 0\nL 4\n",
                "a 1 1 0\na 2 1 0\nr 3 1 2 0\n", "x 1\n"):
        with pytest.raises(TraceError):
            parse_trace(bad)


def test_trace_roundtrip():
    for p in (build_res_ub(FamilyParams(2, 2, 3)), build_rml_r1(FamilyParams(2, 2, 3))):
        t = write_trace(p)
        assert parse_trace(t) == p and write_trace(parse_trace(t)) == t
    r = restrict_proof(*[small_refutation()[0], Restriction({1: 1})])
    assert parse_trace(write_trace(r)).semantic


def test_stats_examples():
    st_ = stats(parse_trace(TWO))
    assert st_.length == 3 and st_.num_merges == 0
    b = ProofBuilder()
    b.resolve(b.axiom(C(1, 2, 3)), b.axiom(C(-1, 2)), 1)
    assert stats(b.build()).num_merges == 1
    # frozen regression: short refutation of F_{2,2,3}
    assert stats(build_res_ub(FamilyParams(2, 2, 3))).length == 35


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_restriction_soundness_property(seed):
    rng = random.Random(seed)
    prm = rng.choice([FamilyParams(2, 2, 3), FamilyParams(1, 2, 3), FamilyParams(2, 1, 4)])
    f, _ = gen_family(prm)
    p = rng.choice([build_res_ub, build_rml_r1])(prm)
    rho = Restriction({v: rng.choice([0, 1, "*", "*"]) for v in range(1, f.num_vars + 1)})
    r = restrict_proof(p, rho)
    fr = f.restrict(rho)
    s = syntactic_equivalent(r, fr)
    assert check_valid(s, fr)
    img = image_map(r)
    for st_ in r.steps:
        assert is_satisfied(st_.clause) or implies(img[st_.id], st_.clause)
