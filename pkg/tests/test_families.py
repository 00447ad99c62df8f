import pytest

from mergeres.cnf import Clause, CnfFormula, Restriction
from mergeres.experiments import w_no_merge_run
from mergeres.families import (FamilyParams, build_gn_derivation, build_res_ub, build_rml_r1,
                               build_rml_r3, build_variant_lemma_block, build_variant_refutation,
                               build_weakening_refutation, gen_family, gen_weakening_base,
                               gen_weakening_formula, parse_layout, r1_length, r3_length,
                               res_ub_length, write_layout)
from mergeres.proof import AXIOM, axiom_dependencies, check_valid
from mergeres.systems import check_strongly_regular, classify, merge_ancestor_map

PARAMS = [(1, 1, 2), (1, 2, 2), (2, 2, 3), (2, 1, 4), (3, 2, 5), (4, 4, 4)]


def test_sizes():
    f, lay = gen_family(FamilyParams(2, 2, 3))
    assert (f.num_vars, len(f.clauses)) == (9, 16)
    assert sum(r[0] == "B" for r in lay.roles) == 8 and sum(r[0] == "A" for r in lay.roles) == 8
    f, lay = gen_family(FamilyParams(1, 1, 2))
    assert lay.num_x == 0 and f.num_vars == 2 and len(f.clauses) == 4
    assert all(len(c) == 2 for c in f.clauses)
    for l, m, n in PARAMS:
        f, lay = gen_family(FamilyParams(l, m, n))
        assert f.num_vars == m * l - 1 + l * n and len(f.clauses) == 2 * l * (n - 1) + 2 * m * l
        assert len(lay.roles) == len(f.clauses)


def test_variant_sizes():
    base, _ = gen_family(FamilyParams(2, 2, 3))
    for v, dv, dc in (("v1", 4, 8), ("v2", 4, 8), ("v3", 0, 4)):
        f, _ = gen_family(FamilyParams(2, 2, 3, v))
        assert f.num_vars - base.num_vars == dv and len(f.clauses) - len(base.clauses) == dc


def test_param_validation():
    for bad in ((0, 1, 2), (1, 0, 2), (1, 1, 1)):
        with pytest.raises(ValueError):
            FamilyParams(*bad)
    with pytest.raises(ValueError):
        FamilyParams(1, 1, 2, "v3")
    with pytest.raises(ValueError):
        FamilyParams(1, 1, 2, "v9")
    with pytest.raises(ValueError):
        build_rml_r3(FamilyParams(2, 1, 3))


def test_constraint_clause():
    _, lay = gen_family(FamilyParams(2, 2, 3))
    # A_{2,1} = w_{2,1} | w_{2,3} | -x_1 | x_2
    assert lay.A(2, 1) == Clause([lay.w(2, 1), lay.w(2, 3), -1, 2])
    assert lay.A(1, 0) == Clause([-lay.w(1, 1), -lay.w(1, 3), 1])
    assert lay.A(4, 1) == Clause([lay.w(2, 1), lay.w(2, 3), -3])


def test_layout_roundtrip():
    for v in ("base", "v1", "v3"):
        _, lay = gen_family(FamilyParams(2, 2, 3, v))
        back = parse_layout(write_layout(lay))
        assert back.params == lay.params and back.roles == lay.roles
    with pytest.raises(ValueError):
        parse_layout("x 1 1\n")


@pytest.mark.parametrize("lmn", PARAMS)
def test_builders_valid_and_closed_forms(lmn):
    p = FamilyParams(*lmn)
    f, _ = gen_family(p)
    ub = build_res_ub(p)
    assert check_valid(ub, f, require_refutation=True) and len(ub) == res_ub_length(*lmn)
    r1 = build_rml_r1(p)
    assert check_valid(r1, f, require_refutation=True) and len(r1) == r1_length(*lmn)
    c = classify(r1, f)
    assert c.rml and c.tree_like
    if lmn[1] >= 2 and lmn[2] >= 3:
        r3 = build_rml_r3(p)
        assert check_valid(r3, f, require_refutation=True) and len(r3) == r3_length(*lmn)
        assert classify(r3, f).rml


def test_frozen_lengths():
    assert (res_ub_length(2, 2, 3), r1_length(2, 2, 3), r3_length(2, 2, 3)) == (35, 39, 99)
    assert res_ub_length(4, 4, 4) == 135 and r3_length(4, 4, 4) == 1071
    ratio = res_ub_length(4, 8, 8) / res_ub_length(4, 4, 4)
    assert abs(ratio - 2) <= 0.4


def test_r1_ratio_growth():
    r = lambda n: r1_length(4, n, n) / res_ub_length(4, n, n)
    assert r(32) / r(8) >= 3


def test_r3_reuses_2l_lemmas():
    p = FamilyParams(2, 2, 3)
    pr = build_rml_r3(p)
    cons = pr.consumers()
    reused = [s for s in pr.steps if s.kind == "r" and len(cons[s.id]) > 1]
    assert len(reused) == 2 * p.l
    assert all(pr.step_is_merge(s.id) for s in reused)


def test_variant_blocks():
    p1 = FamilyParams(2, 2, 3, "v1")
    b1 = build_variant_lemma_block("v1", 1, 1, p1)
    f1, lay1 = gen_family(p1)
    assert check_valid(b1, f1) and merge_ancestor_map(b1)[b1.root]
    assert b1.conclusion == Clause([lay1.w(1, 1), -lay1.w(1, 3)])
    p2 = FamilyParams(2, 2, 3, "v2")
    f2, lay2 = gen_family(p2)
    b2 = build_variant_lemma_block("v2", 1, 0, p2, "rml")
    last = b2[b2.root]
    assert check_valid(b2, f2) and b2.step_is_merge(b2.root) and last.pivot != lay2.w(1, 3)
    assert lay2.w(1, 3) in {abs(l) for l in b2.conclusion}
    p3 = FamilyParams(2, 2, 4, "v3")
    b3 = build_variant_lemma_block("v3", 2, 1, p3)
    assert check_valid(b3, gen_family(p3)[0]) and check_strongly_regular(b3) and b3.step_is_merge(b3.root)
    with pytest.raises(ValueError):
        build_variant_lemma_block("v1", 1, 1, p2)


def test_variant_refutations():
    for v, s in (("v1", "rma_structured"), ("v2", "rml"), ("v2", "lrma"), ("v3", "lrml")):
        p = FamilyParams(2, 2, 4, v)
        pr = build_variant_refutation(v, p, s.split("_")[0])
        r = classify(pr, gen_family(p)[0])
        assert r.valid_resolution and r.flag(s) and pr.is_refutation()
    with pytest.raises(ValueError):
        build_variant_refutation("v1", FamilyParams(2, 2, 4, "v1"), "lrml")


def test_aux_restriction_recovers_base():
    base = set(gen_family(FamilyParams(2, 2, 4))[0].clauses)
    for v in ("v1", "v2"):
        f, lay = gen_family(FamilyParams(2, 2, 4, v))
        assert set(f.restrict(lay.aux_restriction()).clauses) == base


def test_weakening_formula():
    p = FamilyParams(2, 2, 3)
    f, _ = gen_family(p)
    g, lay, z = gen_weakening_formula(p)
    assert g.num_vars == f.num_vars + 1 and len(g.clauses) == len(f.clauses) + 1
    assert all(z in c for c in g.clauses if len(c) > 1) and Clause([-z]) in g.clauses
    rest = g.restrict(Restriction({z: 0}))
    assert set(rest.clauses) - {Clause()} == set(f.clauses)
    d = build_gn_derivation(p)
    assert check_valid(d, g) and d.conclusion == Clause([z]) and classify(d, g).rml
    h, _, _ = gen_weakening_base(p)
    w = build_weakening_refutation(p)
    assert not check_valid(w, h)
    assert check_valid(w, h, allow_weakening=True, require_refutation=True)
    assert classify(w, h, allow_weakening=True).rml


def test_w_supported_clauses_need_all_constraints():
    for lmn in ((2, 2, 3), (3, 2, 4)):
        p = FamilyParams(*lmn)
        f, lay = gen_family(p)
        role = dict(zip(f.clauses, lay.roles))
        for pr in (build_res_ub(p), build_rml_r1(p)):
            for s in pr.steps:
                if any(lay.is_x(v) for v in s.clause.vars):
                    continue
                deps = [pr.clause(a) for a in axiom_dependencies(pr, s.id)]
                cons = {role[c][1] for c in deps if role[c][0] == "A"}
                assert not cons or cons == set(range(1, lay.num_constraints + 1))


def test_w_axioms_never_merge_small():
    r = w_no_merge_run(FamilyParams(3, 2, 5), 500, seed=2)
    assert r["merges"] == 0 and r["bad_shapes"] == 0 and r["derived"] > 0
