import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from mergeres.cnf import Clause, is_merge, resolve
from mergeres.oracles import all_clauses, brute_unit_closure, entails, input_closure, input_member
from mergeres.proof import check_valid
from mergeres.systems import check_strongly_regular, is_input_shaped
from mergeres.unit import (cl_i_member, empowering_witness, input_derive, is_absorbed, is_empowering,
                           unit_propagate)

from conftest import C, F

small_clause = st.lists(st.integers(1, 4).flatmap(lambda v: st.sampled_from([v, -v])),
                        min_size=1, max_size=3).map(Clause).filter(lambda c: not c.tautology)
small_cnf = st.lists(small_clause, min_size=1, max_size=6)


def test_unit_propagate_examples():
    t = unit_propagate(F([1], [-1, 2]))
    assert [l for l, _ in t.entries] == [1, 2] and not t.is_conflict
    assert unit_propagate(F([1], [-1])).is_conflict
    assert unit_propagate(F([1, 2])).entries == []


def test_propagation_order_lowest_index():
    t = unit_propagate(F([-1, 2], [3], [1]))
    assert [l for l, _ in t.entries] == [3, 1, 2]
    assert [a for _, a in t.entries] == [1, 2, 0]


@given(small_cnf, st.lists(st.integers(1, 4).flatmap(lambda v: st.sampled_from([v, -v])), max_size=2))
def test_propagation_matches_naive(cls, assumptions):
    if any(-a in assumptions for a in assumptions):
        return
    t = unit_propagate(cls, assumptions)
    naive = brute_unit_closure(cls, assumptions)
    assert t.is_conflict == (naive is None)
    if naive is not None:
        assert t.literals() | set(assumptions) == naive


def test_input_derive_examples():
    d = input_derive(F([1], [-1, 2]), C(2))
    assert d is not None and d.conclusion == C(2) and len(d) == 3
    assert input_derive(F([1, 2]), C(1)) is None
    with pytest.raises(ValueError):
        input_derive(F([1]), C(1, -1))


def test_cl_i_examples():
    assert cl_i_member(F([1], [-1, 2]), C(2))
    assert not cl_i_member(F([1, 2]), C(1))


def test_empowering_examples():
    f = F([1, 2], [-1, 2])
    assert is_empowering(f, C(2)) and empowering_witness(f, C(2)) == 2
    assert not is_empowering(F([2]), C(2, 3)) and is_absorbed(F([2]), C(2, 3))
    assert not is_empowering(F([1, -3], [2]), C(1, -3))
    with pytest.raises(ValueError):
        is_empowering(F([1]), C())


def test_cl_i_oracle_sample():
    cls = list(all_clauses(3))
    rng = random.Random(7)
    for _ in range(400):
        fs = rng.sample(cls, rng.randint(0, 4))
        clo = input_closure(fs)
        for c in cls:
            assert cl_i_member(fs, c) == any(d.set <= c.set for d in clo)


@settings(max_examples=200, deadline=None)
@given(small_cnf, small_clause)
def test_input_derive_contract(cls, c):
    d = input_derive(cls, c)
    assert (d is not None) == input_member(cls, c)
    if d is None:
        return
    assert check_valid(d, F(*[x.lits for x in cls]))
    assert d.conclusion.set <= c.set
    assert is_input_shaped(d)[0] and check_strongly_regular(d)
    nvars = len({abs(l) for x in cls for l in x})
    assert sum(1 for s in d.steps if s.kind == "r") <= nvars


def _sample_absorbed_pair(rng):
    vs = range(1, 5)
    cls = [Clause(rng.choice([v, -v]) for v in rng.sample(vs, rng.randint(1, 3))) for _ in range(rng.randint(2, 6))]
    x = rng.choice(vs)
    a = Clause([x] + [rng.choice([v, -v]) for v in rng.sample([v for v in vs if v != x], rng.randint(0, 2))])
    b = Clause([-x] + [rng.choice([v, -v]) for v in rng.sample([v for v in vs if v != x], rng.randint(0, 2))])
    return cls, a, b, x


def test_absorption_lemmas_sampled():
    rng = random.Random(3)
    checked = 0
    for _ in range(4000):
        cls, a, b, x = _sample_absorbed_pair(rng)
        if a.tautology or b.tautology or len([v for v in a.vars & b.vars if (v in a) != (v in b)]) != 1:
            continue
        if not (entails(cls, a) and entails(cls, b)):
            continue
        if is_empowering(cls, a) or is_empowering(cls, b):
            continue
        r = resolve(a, b, x)
        checked += 1
        assert cl_i_member(cls, r)  # absorbed premises: resolvent in the input closure
        if not r.is_empty() and is_empowering(cls, r):
            assert is_merge(a, b, x)
    assert checked > 50
