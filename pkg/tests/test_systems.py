import random

from mergeres.cnf import CnfFormula
from mergeres.families import (FamilyParams, build_res_ub, build_rml_r1, build_rml_r3,
                               build_variant_refutation, gen_family)
from mergeres.proof import AXIOM, Block, ProofBuilder, parse_trace
from mergeres.systems import FLAGS, check_strongly_regular, classify
from mergeres.transform import decompose_input_structured, random_tree_proof, tree_to_merge
from mergeres.unit import input_derive

from conftest import C, F

IMPLICATIONS = [("lreml", "lrml"), ("lreml", "rel"), ("lrml", "rml"), ("lrml", "lrma"),
                ("lrma", "rma_structured"), ("rml", "rma_structured"), ("rel", "rma_structured"),
                ("rma_structured", "rma_general"), ("input_shaped", "tree_like")]


def closure_ok(r):
    return all(not r.flag(a) or r.flag(b) for a, b in IMPLICATIONS)


def test_trivial_refutation():
    r = classify(parse_trace("a 1 1 0\na 2 -1 0\nr 3 1 2 0\n"), F([1], [-1]))
    assert r.valid_resolution and r.tree_like and r.input_shaped and r.rml and r.lreml


def test_r1_is_tree_like_rml():
    prm = FamilyParams(2, 2, 3)
    r = classify(build_rml_r1(prm), gen_family(prm)[0])
    assert r.rml and r.tree_like and not r.input_shaped


def test_rma_general_counterexample():
    # step 3 = [2] (no merge) is reused by steps 5 and 6
    b = ProofBuilder()
    a1, a2 = b.axiom(C(1, 2)), b.axiom(C(-1, 2))
    s3 = b.resolve(a1, a2)  # merge over 2
    b2 = ProofBuilder()
    x1, x2 = b2.axiom(C(1, 2)), b2.axiom(C(-1, 3))
    y = b2.resolve(x1, x2)  # [2,3], not a merge
    u = b2.resolve(y, b2.axiom(C(-2)))
    v = b2.resolve(y, b2.axiom(C(-3)))
    p = b2.build()
    f = F([1, 2], [-1, 3], [-2], [-3])
    r = classify(p, f)
    assert not r.rma_general and str(y) in r.diagnostics["rma_general"]
    # the merge variant is fine
    assert classify(b.build(), F([1, 2], [-1, 2])).rma_general and s3


def test_axiom_lemma_fails_rml():
    p = parse_trace("a 1 1 2 0\nL 1\na 2 -1 0\nr 3 1 2 2 0\na 4 -2 0\nr 5 3 4 0\n")
    r = classify(p, F([1, 2], [-1], [-2]))
    assert r.valid_resolution and not r.rml and "rml" in r.diagnostics


def test_strong_regularity_examples():
    b = ProofBuilder()
    s = b.resolve(b.axiom(C(1, 2)), b.axiom(C(-1, 3)))
    b.resolve(s, b.axiom(C(-2, 4)))
    assert check_strongly_regular(b.build())
    b = ProofBuilder()
    s = b.resolve(b.axiom(C(1, 2)), b.axiom(C(-1, 3)))
    b.resolve(s, b.axiom(C(-2, 1)))  # reintroduces pivot 1
    assert not check_strongly_regular(b.build())


def test_input_derive_outputs_regular():
    rng = random.Random(1)
    for _ in range(2000):
        cls = [[rng.choice([v, -v]) for v in rng.sample(range(1, 6), rng.randint(1, 3))] for _ in range(7)]
        c = C(*[rng.choice([v, -v]) for v in rng.sample(range(1, 6), rng.randint(0, 2))])
        d = input_derive(cls, c)
        if d is not None:
            assert check_strongly_regular(d)


def test_classification_closure_and_determinism():
    prm = FamilyParams(2, 2, 3)
    f, _ = gen_family(prm)
    proofs = [(build_res_ub(prm), f), (build_rml_r1(prm), f), (build_rml_r3(prm), f)]
    for v, s in [("v1", "rma"), ("v2", "rml"), ("v2", "lrma"), ("v3", "lrml")]:
        q = FamilyParams(2, 2, 4, v)
        proofs.append((build_variant_refutation(v, q, s), gen_family(q)[0]))
    rng = random.Random(5)
    for _ in range(150):
        p = random_tree_proof(rng, 5, rng.randint(1, 12))
        g = CnfFormula.from_lists([s.clause for s in p.steps if s.kind == AXIOM])
        proofs += [(p, g), (decompose_input_structured(tree_to_merge(p)), g)]
    for p, g in proofs:
        r = classify(p, g)
        assert closure_ok(r), r.to_text()
        assert r.as_dict() == classify(p, g).as_dict()


def test_report_serialization():
    r = classify(parse_trace("a 1 1 0\na 2 -1 0\nr 3 1 2 0\n"), F([1], [-1]))
    txt = r.to_text()
    assert all(f"{k}=" in txt for k in FLAGS)
    assert '"rml": true' in r.to_json()
