"""Unit propagation, input derivations, input closure and 1-empowerment."""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .cnf import Clause, CnfFormula
from .proof import ProofBuilder, Proof


@dataclass
class PropagationTrace:
    # (literal, antecedent clause index or None for an assumption)
    entries: list = field(default_factory=list)
    conflict: int | None = None

    @property
    def is_conflict(self) -> bool:
        return self.conflict is not None

    def assignment(self) -> dict:
        return {abs(l): l > 0 for l, _ in self.entries}

    def literals(self) -> set:
        return {l for l, _ in self.entries}


def _clauses_of(f) -> Sequence[Clause]:
    if isinstance(f, CnfFormula):
        return f.clauses
    return [c if isinstance(c, Clause) else Clause(c) for c in f]


def unit_propagate(f, assumptions: Iterable[int] = ()) -> PropagationTrace:
    """Exhaustive unit propagation under a consistent set of literals.

    The lowest-index unit clause fires first; a falsified clause is reported
    as soon as it appears (lowest index among the falsified ones).
    """
    cls = _clauses_of(f)
    occ: dict = {}
    for i, c in enumerate(cls):
        for l in c.lits:
            occ.setdefault(l, []).append(i)
    nsat = [0] * len(cls)
    nfalse = [0] * len(cls)
    size = [len(c) for c in cls]
    val: dict = {}
    units, falsified = [], []
    for i, n in enumerate(size):
        if n == 0:
            falsified.append(i)
        elif n == 1:
            units.append(i)
    heapq.heapify(units)
    tr = PropagationTrace()

    def assign(lit, ante):
        val[abs(lit)] = lit > 0
        tr.entries.append((lit, ante))
        for i in occ.get(lit, ()):
            nsat[i] += 1
        for i in occ.get(-lit, ()):
            nfalse[i] += 1
            if nsat[i] == 0:
                if nfalse[i] == size[i]:
                    heapq.heappush(falsified, i)
                elif nfalse[i] == size[i] - 1:
                    heapq.heappush(units, i)

    for lit in assumptions:
        v = abs(lit)
        if v in val:
            if val[v] != (lit > 0):
                raise ValueError("inconsistent assumptions")
            continue
        assign(lit, None)
    while True:
        while falsified:
            i = falsified[0]
            if nsat[i] == 0:
                tr.conflict = i
                return tr
            heapq.heappop(falsified)
        if not units:
            return tr
        i = heapq.heappop(units)
        if nsat[i] or nfalse[i] != size[i] - 1:
            continue
        for l in cls[i].lits:
            if abs(l) not in val:
                assign(l, i)
                break


def input_chain(f, c: Clause):
    """Input derivation of a subclause of ``c`` as ``(top, [(side, pivot)...])``.

    Indices refer to the clause list of ``f``; returns None if ``c`` is not in
    the input closure.
    """
    c = c if isinstance(c, Clause) else Clause(c)
    if c.tautology:
        raise ValueError(f"target clause {c} is tautological")
    cls = _clauses_of(f)
    tr = unit_propagate(cls, [-l for l in c.lits])
    if tr.conflict is None:
        return None
    top = tr.conflict
    cur = set(cls[top].set)
    sides = []
    for lit, ante in reversed(tr.entries):
        if ante is None or -lit not in cur:
            continue
        cur.discard(-lit)
        cur |= cls[ante].set - {lit}
        sides.append((ante, abs(lit)))
    return top, sides


def input_derive(f, c: Clause) -> Proof | None:
    """Strongly regular input derivation of some subclause of ``c``, or None."""
    cls = _clauses_of(f)
    res = input_chain(cls, c)
    if res is None:
        return None
    top, sides = res
    b = ProofBuilder()
    cur = b.axiom(cls[top])
    for idx, piv in sides:
        cur = b.resolve(cur, b.axiom(cls[idx]), piv)
    return b.build()


def cl_i_member(d, c: Clause) -> bool:
    c = c if isinstance(c, Clause) else Clause(c)
    if c.tautology:
        return True
    return input_chain(d, c) is not None


def empowering_witness(f, c: Clause):
    """Witness literal if ``c`` is 1-empowering w.r.t. ``f``, else None."""
    c = c if isinstance(c, Clause) else Clause(c)
    if c.is_empty():
        raise ValueError("the empty clause has no empowering literal")
    if c.tautology:
        raise ValueError(f"clause {c} is tautological")
    cls = _clauses_of(f)
    for lit in c.lits:
        tr = unit_propagate(cls, [-l for l in c.lits if l != lit])
        if tr.conflict is None and lit not in tr.literals():
            return lit
    return None


def is_empowering(f, c: Clause) -> bool:
    return empowering_witness(f, c) is not None


def is_absorbed(f, c: Clause) -> bool:
    return not is_empowering(f, c)
