"""Brute-force reference implementations, independent of the unit engine.

Only meant for tiny instances; used by the tests and the ``oracle`` CLI command.
"""
from __future__ import annotations

import itertools

from .cnf import Clause, clashing_vars, is_satisfied, resolve


def input_closure(clauses) -> set:
    """All non-tautological clauses reachable by input resolution chains.

    A chain starts at a clause of the set and repeatedly resolves the current
    clause with a clause of the set. Tautological chain clauses are dropped:
    resolving one with an axiom yields a superset of that axiom.
    """
    base = [c if isinstance(c, Clause) else Clause(c) for c in clauses]
    base = [c for c in base if not c.tautology]
    seen = set(base)
    frontier = list(seen)
    while frontier:
        nxt = []
        for d in frontier:
            for a in base:
                for v in clashing_vars(d, a):
                    r = resolve(d, a, v)
                    if r.tautology or r in seen:
                        continue
                    seen.add(r)
                    nxt.append(r)
        frontier = nxt
    return seen


def input_member(clauses, c) -> bool:
    c = c if isinstance(c, Clause) else Clause(c)
    if c.tautology:
        return True
    return any(d.set <= c.set for d in input_closure(clauses))


def entails(clauses, c, num_vars=None) -> bool:
    """Truth-table check of ``clauses |= c``."""
    if is_satisfied(c):
        return True
    cls = [x for x in clauses if not is_satisfied(x)]
    vs = sorted({abs(l) for x in cls for l in x} | {abs(l) for l in c})
    for bits in itertools.product((False, True), repeat=len(vs)):
        a = dict(zip(vs, bits))
        sat = lambda x: any(a[abs(l)] == (l > 0) for l in x)
        if all(sat(x) for x in cls) and not sat(c):
            return False
    return True


def all_clauses(num_vars: int):
    """Every non-tautological clause over variables 1..num_vars."""
    for choice in itertools.product((0, 1, -1), repeat=num_vars):
        yield Clause(v * s for v, s in zip(range(1, num_vars + 1), choice) if s)


def brute_unit_closure(clauses, assumptions):
    """Literals implied by naive repeated unit propagation, or None on conflict."""
    lits = set(assumptions)
    changed = True
    while changed:
        changed = False
        for c in clauses:
            if any(l in lits for l in c):
                continue
            rest = [l for l in c if -l not in lits]
            if not rest:
                return None
            if len(rest) == 1:
                lits.add(rest[0])
                changed = True
    return lits
