"""Proof DAGs, the ISR trace format, validity checks and restrictions of proofs."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

from .cnf import (
    SATISFIED,
    Clause,
    CnfFormula,
    InvalidResolution,
    Restriction,
    apply_restriction,
    clashing_vars,
    implies,
    implies2,
    is_merge,
    is_satisfied,
    resolve,
)

AXIOM, RESOLUTION, WEAKENING, SAT = "a", "r", "w", "s"
LEAF_KINDS = (AXIOM, WEAKENING, SAT)


class ProofError(ValueError):
    pass


class TraceError(ProofError):
    pass


@dataclass(frozen=True)
class ProofStep:
    id: int
    kind: str
    clause: object
    premises: tuple = ()
    pivot: int | None = None

    def __post_init__(self):
        k, n = self.kind, len(self.premises)
        if k not in (AXIOM, RESOLUTION, WEAKENING, SAT):
            raise ProofError(f"step {self.id}: unknown kind {k!r}")
        if k in (AXIOM, SAT) and n:
            raise ProofError(f"step {self.id}: {k} step with premises")
        if k == RESOLUTION and n != 2:
            raise ProofError(f"step {self.id}: resolution needs 2 premises")
        if k == WEAKENING and n != 1:
            raise ProofError(f"step {self.id}: weakening needs 1 premise")
        if any(q >= self.id for q in self.premises):
            raise ProofError(f"step {self.id}: premise ids must be smaller")


@dataclass(frozen=True)
class Block:
    steps: tuple  # resolution step ids in order
    lemma: int | None  # closing id, None for the final block


class Proof:
    """An id-ordered sequence of steps with lemma marks.

    ``semantic`` proofs may contain steps that are only implied by their
    premises; the syntactic checker refuses them.
    """

    def __init__(self, steps: Iterable[ProofStep], lemmas: Iterable[int] = (), semantic: bool = False):
        self.steps = tuple(steps)
        self.lemmas = frozenset(lemmas)
        self.semantic = semantic
        self.by_id = {}
        prev = None
        for s in self.steps:
            if prev is not None and s.id <= prev:
                raise ProofError(f"step ids not increasing at {s.id}")
            for q in s.premises:
                if q not in self.by_id:
                    raise ProofError(f"step {s.id}: dangling premise {q}")
            self.by_id[s.id] = s
            prev = s.id
        for m in self.lemmas:
            if m not in self.by_id:
                raise ProofError(f"lemma mark on unknown id {m}")

    @property
    def root(self) -> int:
        return self.steps[-1].id

    @property
    def conclusion(self):
        return self.steps[-1].clause

    def __len__(self):
        return len(self.steps)

    def __getitem__(self, sid) -> ProofStep:
        return self.by_id[sid]

    def clause(self, sid):
        return self.by_id[sid].clause

    def is_refutation(self) -> bool:
        c = self.conclusion
        return not is_satisfied(c) and c.is_empty()

    def consumers(self) -> dict:
        """Map step id -> set of distinct steps that use it as a premise."""
        out = {s.id: set() for s in self.steps}
        for s in self.steps:
            for q in s.premises:
                out[q].add(s.id)
        return out

    def step_is_merge(self, sid) -> bool:
        s = self.by_id[sid]
        if s.kind != RESOLUTION or self.semantic:
            return False
        a, b = (self.by_id[q].clause for q in s.premises)
        try:
            return is_merge(a, b, s.pivot)
        except InvalidResolution:
            return False

    def blocks(self) -> list:
        """Split the resolution steps into the input-structured blocks."""
        out, cur = [], []
        for s in self.steps:
            if s.kind == RESOLUTION:
                cur.append(s.id)
            if s.id in self.lemmas:
                out.append(Block(tuple(cur), s.id))
                cur = []
        if cur or not out:
            out.append(Block(tuple(cur), None))
        return out

    def with_lemmas(self, lemmas) -> "Proof":
        return Proof(self.steps, lemmas, self.semantic)

    def __eq__(self, other):
        return (isinstance(other, Proof) and self.steps == other.steps
                and self.lemmas == other.lemmas and self.semantic == other.semantic)

    def __repr__(self):
        return f"Proof({len(self.steps)} steps, {len(self.lemmas)} lemmas, root={self.conclusion})"


class ProofBuilder:
    """Incremental construction; axioms are shared by clause."""

    def __init__(self, start_id: int = 1):
        self._steps = []
        self._lemmas = set()
        self._axioms = {}
        self._clauses = {}
        self._next = start_id

    def _add(self, kind, clause, premises=(), pivot=None) -> int:
        sid = self._next
        self._next += 1
        self._steps.append(ProofStep(sid, kind, clause, tuple(premises), pivot))
        self._clauses[sid] = clause
        return sid

    def clause(self, sid):
        return self._clauses[sid]

    def axiom(self, clause) -> int:
        clause = clause if isinstance(clause, Clause) else Clause(clause)
        sid = self._axioms.get(clause)
        if sid is None:
            sid = self._add(AXIOM, clause)
            self._axioms[clause] = sid
        return sid

    def resolve(self, a: int, b: int, pivot: int | None = None) -> int:
        ca, cb = self._clauses[a], self._clauses[b]
        if pivot is None:
            piv = clashing_vars(ca, cb)
            if len(piv) != 1:
                raise InvalidResolution(f"{ca} and {cb} clash on {piv}")
            pivot = piv[0]
        return self._add(RESOLUTION, resolve(ca, cb, pivot), (a, b), abs(pivot))

    def weaken(self, a: int, clause) -> int:
        clause = clause if isinstance(clause, Clause) else Clause(clause)
        return self._add(WEAKENING, clause, (a,))

    def chain(self, top: int, sides: Iterable[int]) -> int:
        cur = top
        for s in sides:
            cur = self.resolve(cur, s)
        return cur

    def mark(self, sid: int):
        self._lemmas.add(sid)

    def __len__(self):
        return len(self._steps)

    def build(self) -> Proof:
        return Proof(self._steps, self._lemmas)


@dataclass
class ValidityReport:
    ok: bool
    step: int | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def _axiom_ok(c, f_set):
    return c in f_set


def check_valid(p: Proof, f: CnfFormula, allow_weakening: bool = False,
                allow_tautologies: bool = False, require_refutation: bool = False) -> ValidityReport:
    if p.semantic:
        return ValidityReport(False, None, "semantic proof; use check_semantic")
    f_set = f.clause_set()
    for s in p.steps:
        c = s.clause
        if s.kind == SAT:
            return ValidityReport(False, s.id, "satisfied placeholder in a syntactic proof")
        if s.kind == AXIOM:
            if not _axiom_ok(c, f_set):
                return ValidityReport(False, s.id, f"axiom {c} not in formula")
        elif s.kind == RESOLUTION:
            a, b = (p.by_id[q].clause for q in s.premises)
            if is_satisfied(a) or is_satisfied(b):
                return ValidityReport(False, s.id, "premise is the satisfied clause")
            try:
                r = resolve(a, b, s.pivot)
            except InvalidResolution as e:
                return ValidityReport(False, s.id, f"invalid resolution: {e}")
            if r != c:
                return ValidityReport(False, s.id, f"clause mismatch: recorded {c}, resolvent {r}")
        elif s.kind == WEAKENING:
            if not allow_weakening:
                return ValidityReport(False, s.id, "weakening not allowed")
            a = p.by_id[s.premises[0]].clause
            if is_satisfied(a) or not a.set <= c.set:
                return ValidityReport(False, s.id, f"weakening {a} -> {c} is not a superset")
        if c.tautology and not allow_tautologies:
            return ValidityReport(False, s.id, f"tautological clause {c}")
    if require_refutation and not p.is_refutation():
        return ValidityReport(False, p.root, "final clause is not empty")
    return ValidityReport(True)


def check_semantic(p: Proof, f: CnfFormula) -> ValidityReport:
    """Relaxed check: every derived clause is implied by its premises."""
    f_set = f.clause_set()
    for s in p.steps:
        c = s.clause
        if s.kind == SAT:
            continue
        if s.kind == AXIOM:
            if not _axiom_ok(c, f_set):
                return ValidityReport(False, s.id, f"axiom {c} not in formula")
        elif s.kind == RESOLUTION:
            a, b = (p.by_id[q].clause for q in s.premises)
            if not implies2(a, b, c):
                return ValidityReport(False, s.id, f"{c} not implied by {a} and {b}")
        elif s.kind == WEAKENING:
            if not implies(p.by_id[s.premises[0]].clause, c):
                return ValidityReport(False, s.id, "weakening premise does not imply conclusion")
    return ValidityReport(True)


def axiom_dependencies(p: Proof, sid: int) -> frozenset:
    if sid not in p.by_id:
        raise ProofError(f"unknown id {sid}")
    seen, todo, out = set(), [sid], set()
    while todo:
        x = todo.pop()
        if x in seen:
            continue
        seen.add(x)
        s = p.by_id[x]
        if s.kind == AXIOM:
            out.add(x)
        todo.extend(s.premises)
    return frozenset(out)


def ancestors(p: Proof, sid: int) -> set:
    seen, todo = set(), [sid]
    while todo:
        x = todo.pop()
        if x in seen:
            continue
        seen.add(x)
        todo.extend(p.by_id[x].premises)
    return seen


def restrict_proof(p: Proof, rho: Restriction) -> Proof:
    steps = []
    for s in p.steps:
        c = apply_restriction(s.clause, rho)
        if is_satisfied(c):
            steps.append(ProofStep(s.id, SAT, SATISFIED))
        else:
            steps.append(ProofStep(s.id, s.kind, c, s.premises, s.pivot))
    return Proof(steps, p.lemmas, semantic=True)


def syntactic_equivalent(p: Proof, f: CnfFormula | None = None) -> Proof:
    """Subsumption-or-resolve pass turning a semantic derivation syntactic.

    A step whose image is already a premise's image becomes an alias of it;
    the output keeps only genuinely produced steps (ids preserved) and
    redirects later references. Use ``image_map`` for the per-step images.
    """
    if f is not None:
        rep = check_semantic(p, f)
        if not rep:
            raise ProofError(f"not a semantic derivation at step {rep.step}: {rep.reason}")
    image = {}  # id -> id of the step carrying s(C)
    clause_of = {}
    out = []
    for s in p.steps:
        if s.kind == SAT:
            out.append(ProofStep(s.id, SAT, SATISFIED))
            image[s.id] = s.id
            clause_of[s.id] = SATISFIED
            continue
        if s.kind == AXIOM:
            out.append(s)
            image[s.id] = s.id
            clause_of[s.id] = s.clause
            continue
        c = s.clause
        prem = [image[q] for q in s.premises]
        done = False
        for q in prem:
            if implies(clause_of[q], c):
                image[s.id] = q
                done = True
                break
        if done:
            continue
        if s.kind == WEAKENING:
            raise ProofError(f"step {s.id}: weakening premise does not imply conclusion")
        a, b = (clause_of[q] for q in prem)
        if is_satisfied(a) or is_satisfied(b):
            raise ProofError(f"step {s.id}: cannot resolve the satisfied clause")
        piv = clashing_vars(a, b)
        if len(piv) != 1:
            raise ProofError(f"step {s.id}: images {a}, {b} do not resolve to imply {c}")
        r = resolve(a, b, piv[0])
        if not implies(r, c):
            raise ProofError(f"step {s.id}: resolvent {r} does not imply {c}")
        out.append(ProofStep(s.id, RESOLUTION, r, tuple(prem), piv[0]))
        image[s.id] = s.id
        clause_of[s.id] = r
    # the root must be the final step
    root_img = image[p.root]
    keep = ancestors_in(out, root_img)
    steps = [s for s in out if s.id in keep and s.kind != SAT]
    lemmas = {image[m] for m in p.lemmas if image[m] in keep}
    return Proof(steps, lemmas)


def ancestors_in(steps, sid) -> set:
    by_id = {s.id: s for s in steps}
    seen, todo = set(), [sid]
    while todo:
        x = todo.pop()
        if x in seen:
            continue
        seen.add(x)
        todo.extend(by_id[x].premises)
    return seen


def image_map(p: Proof) -> dict:
    """Return ``{id: s(C_id)}`` for every step, including aliased ones."""
    clause_of = {}
    for s in p.steps:
        if s.kind == SAT:
            clause_of[s.id] = SATISFIED
            continue
        if s.kind == AXIOM:
            clause_of[s.id] = s.clause
            continue
        c = s.clause
        imgs = [clause_of[q] for q in s.premises]
        for a in imgs:
            if implies(a, c):
                clause_of[s.id] = a
                break
        else:
            a, b = imgs
            piv = clashing_vars(a, b)
            if len(piv) != 1 or is_satisfied(a) or is_satisfied(b):
                raise ProofError(f"step {s.id}: not a semantic derivation step")
            clause_of[s.id] = resolve(a, b, piv[0])
    return clause_of


def parse_trace(text: str) -> Proof:
    steps, lemmas, semantic = [], [], False
    clauses = {}
    last = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "c":
            if parts[1:2] == ["semantic"]:
                semantic = True
            continue
        try:
            nums = [int(t) for t in parts[1:]]
        except ValueError:
            raise TraceError(f"line {lineno}: non-integer token") from None
        if not nums:
            raise TraceError(f"line {lineno}: missing id")
        sid = nums[0]
        if tag == "L":
            if len(nums) != 1 or sid not in clauses:
                raise TraceError(f"line {lineno}: lemma mark on unknown id {sid}")
            lemmas.append(sid)
            continue
        if last is not None and sid <= last:
            raise TraceError(f"line {lineno}: id {sid} not increasing")
        if tag == "s":
            if len(nums) != 1:
                raise TraceError(f"line {lineno}: bad satisfied line")
            step = ProofStep(sid, SAT, SATISFIED)
        else:
            npre = {"a": 0, "r": 2, "w": 1}.get(tag)
            if npre is None:
                raise TraceError(f"line {lineno}: unknown line type {tag!r}")
            body = nums[1:]
            if not body or body[-1] != 0 or 0 in body[:-1][npre:]:
                raise TraceError(f"line {lineno}: bad terminator")
            pre, lits = body[:npre], body[npre:-1]
            if len(pre) != npre:
                raise TraceError(f"line {lineno}: missing premises")
            for q in pre:
                if q not in clauses:
                    raise TraceError(f"line {lineno}: dangling premise {q}")
            clause = Clause(lits)
            if len(clause) != len(lits):
                raise TraceError(f"line {lineno}: duplicate literal")
            pivot = None
            if tag == "r" and not semantic:
                a, b = clauses[pre[0]], clauses[pre[1]]
                if is_satisfied(a) or is_satisfied(b):
                    raise TraceError(f"line {lineno}: resolving the satisfied clause")
                piv = clashing_vars(a, b)
                if len(piv) != 1:
                    raise TraceError(f"line {lineno}: premises clash on {len(piv)} variables")
                pivot = piv[0]
            try:
                step = ProofStep(sid, tag, clause, tuple(pre), pivot)
            except ProofError as e:
                raise TraceError(f"line {lineno}: {e}") from None
        steps.append(step)
        clauses[sid] = step.clause
        last = sid
    if not steps:
        raise TraceError("empty trace")
    return Proof(steps, lemmas, semantic)


def write_trace(p: Proof) -> str:
    lines = []
    if p.semantic:
        lines.append("c semantic")
    for s in p.steps:
        if s.kind == SAT:
            lines.append(f"s {s.id}")
        else:
            toks = [s.kind, str(s.id), *map(str, s.premises), *map(str, s.clause.lits), "0"]
            lines.append(" ".join(toks))
        if s.id in p.lemmas:
            lines.append(f"L {s.id}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ProofStats:
    length: int
    num_resolutions: int
    num_merges: int
    max_out_degree: int
    width: int
    lemma_count: int

    def as_dict(self):
        return dict(self.__dict__)


def stats(p: Proof) -> ProofStats:
    cons = p.consumers()
    merges = sum(1 for s in p.steps if s.kind == RESOLUTION and p.step_is_merge(s.id))
    width = max((len(s.clause) for s in p.steps if not is_satisfied(s.clause)), default=0)
    return ProofStats(
        length=len(p.steps),
        num_resolutions=sum(1 for s in p.steps if s.kind == RESOLUTION),
        num_merges=merges,
        max_out_degree=max((len(v) for v in cons.values()), default=0),
        width=width,
        lemma_count=len(p.lemmas),
    )


def renumber(p: Proof, start: int = 1) -> Proof:
    """Consecutive ids, preserving order."""
    m = {s.id: i for i, s in enumerate(p.steps, start)}
    steps = [ProofStep(m[s.id], s.kind, s.clause, tuple(m[q] for q in s.premises), s.pivot)
             for s in p.steps]
    return Proof(steps, {m[x] for x in p.lemmas}, p.semantic)


def prune(p: Proof) -> Proof:
    """Drop steps the root does not depend on."""
    keep = ancestors(p, p.root)
    return Proof([s for s in p.steps if s.id in keep], {x for x in p.lemmas if x in keep}, p.semantic)
