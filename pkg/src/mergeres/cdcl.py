"""CDCL trails, conflict derivations and 1UIP extraction.

Positions on a trail are 1-based. A reason of ``None`` marks a decision.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .cnf import Clause, CnfFormula, apply_restriction, is_satisfied, resolve
from .proof import Proof, ProofBuilder
from .unit import unit_propagate

MASK64 = (1 << 64) - 1


class SplitMix64:
    """The splitmix64 generator; decision polarity is the low bit of each draw."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)


@dataclass
class Trail:
    entries: list = field(default_factory=list)  # (literal, reason index | None)

    def __len__(self):
        return len(self.entries)

    def literal(self, i: int) -> int:
        return self.entries[i - 1][0]

    def reason(self, i: int):
        return self.entries[i - 1][1]

    def is_decision(self, i: int) -> bool:
        return self.entries[i - 1][1] is None

    @property
    def i_star(self) -> int:
        """Position of the last decision (0 if there is none)."""
        for i in range(len(self.entries), 0, -1):
            if self.is_decision(i):
                return i
        return 0

    def levels(self) -> list:
        out, dl = [], 0
        for _, r in self.entries:
            if r is None:
                dl += 1
            out.append(dl)
        return out

    def prefix(self, i: int) -> dict:
        """The assignment alpha_{<i} as var -> 0/1."""
        return {abs(l): int(l > 0) for l, _ in self.entries[: i - 1]}


def _restrict(c: Clause, alpha: dict):
    from .cnf import Restriction
    return apply_restriction(c, Restriction(alpha))


def validate_trail(t: Trail, f: CnfFormula):
    """Return (ok, reason)."""
    seen = {}
    clauses = f.clauses
    for i in range(1, len(t) + 1):
        lit, reason = t.entries[i - 1]
        if abs(lit) > f.num_vars or lit == 0:
            return False, f"position {i}: literal {lit} out of range"
        if abs(lit) in seen:
            return False, f"position {i}: variable {abs(lit)} assigned twice"
        alpha = t.prefix(i)
        for k, c in enumerate(clauses):
            r = _restrict(c, alpha)
            if not is_satisfied(r) and r.is_empty():
                return False, f"position {i}: clause {k} already falsified before this position"
        if reason is None:
            for k, c in enumerate(clauses):
                r = _restrict(c, alpha)
                if not is_satisfied(r) and len(r) == 1:
                    return False, f"position {i}: clause {k} propagates {r.lits[0]} before this decision"
        else:
            if not 0 <= reason < len(clauses):
                return False, f"position {i}: reason {reason} out of range"
            r = _restrict(clauses[reason], alpha)
            if is_satisfied(r) or r.lits != (lit,):
                return False, f"position {i}: clause {reason} is not unit on {lit}"
        seen[abs(lit)] = True
    return True, ""


@dataclass
class ConflictAnalysis:
    proof: Proof
    clauses: dict  # position j -> D_j
    producer: dict  # position j -> proof step id that produced D_j
    i_star: int
    conflict: int


def conflict_derivation(t: Trail, f: CnfFormula, falsified: int) -> ConflictAnalysis:
    c = f.clauses[falsified]
    full = {abs(l): int(l > 0) for l, _ in t.entries}
    r = _restrict(c, full)
    if is_satisfied(r) or not r.is_empty():
        raise ValueError(f"clause {falsified} is not falsified by the trail")
    i_star = t.i_star
    if i_star == 0:
        raise ValueError("trail has no decision")
    b = ProofBuilder()
    cur = b.axiom(c)
    T = len(t)
    clauses, producer = {T: c}, {T: cur}
    for i in range(T, i_star, -1):
        lit, reason = t.entries[i - 1]
        d = b.clause(cur)
        if -lit in d:
            cur = b.resolve(cur, b.axiom(f.clauses[reason]), abs(lit))
        clauses[i - 1] = b.clause(cur)
        producer[i - 1] = cur
    return ConflictAnalysis(b.build(), clauses, producer, i_star, falsified)


def is_asserting(c: Clause, t: Trail) -> bool:
    i = t.i_star
    if i == 0:
        return False
    r = _restrict(c, t.prefix(i))
    return not is_satisfied(r) and len(r) == 1


def first_uip(a: ConflictAnalysis, t: Trail):
    """(clause, position) of the largest-index asserting D_j."""
    for j in sorted(a.clauses, reverse=True):
        if j < a.i_star:
            break
        if is_asserting(a.clauses[j], t):
            return a.clauses[j], j
    raise AssertionError("no asserting clause at or above the last decision")


@dataclass
class Episode:
    trail: Trail
    conflict: int | None
    status: str  # "conflict", "sat" or "exhausted"


def random_episode(f: CnfFormula, seed: int) -> Episode:
    """Decide the lowest unassigned variable with a seeded polarity, saturating
    BCP after every decision, until the first conflict."""
    rng = SplitMix64(seed)
    t = Trail()
    while True:
        tr = unit_propagate(f, [l for l, _ in t.entries])
        t.entries.extend(e for e in tr.entries[len(t.entries):])
        if tr.conflict is not None:
            if t.i_star == 0:
                return Episode(t, tr.conflict, "exhausted")
            return Episode(t, tr.conflict, "conflict")
        assigned = {abs(l) for l, _ in t.entries}
        free = [v for v in range(1, f.num_vars + 1) if v not in assigned]
        if not free:
            return Episode(t, None, "sat")
        v = free[0]
        t.entries.append((v if rng.next() & 1 else -v, None))


def episode_from_decisions(f: CnfFormula, decisions) -> Episode:
    """Apply the given decision literals in order, saturating BCP after each,
    until the first conflict. Decisions on already assigned variables are skipped."""
    t = Trail()
    pending = list(decisions)
    while True:
        tr = unit_propagate(f, [l for l, _ in t.entries])
        t.entries.extend(tr.entries[len(t.entries):])
        if tr.conflict is not None:
            return Episode(t, tr.conflict, "conflict" if t.i_star else "exhausted")
        assigned = {abs(l) for l, _ in t.entries}
        while pending and abs(pending[0]) in assigned:
            pending.pop(0)
        if not pending:
            return Episode(t, None, "sat" if len(assigned) == f.num_vars else "open")
        t.entries.append((pending.pop(0), None))
