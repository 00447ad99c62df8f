"""Seeded samplers and property drivers shared by the tests and scripts."""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .cdcl import conflict_derivation, first_uip, is_asserting, random_episode
from .cnf import Clause, CnfFormula, clashing_vars, is_merge, resolve
from .families import FamilyLayout, FamilyParams, gen_family
from .proof import RESOLUTION, Proof, ProofBuilder, prune
from .unit import is_empowering


def random_3cnf(rng: random.Random, num_vars: int = 20, num_clauses: int = 85) -> CnfFormula:
    clauses = []
    for _ in range(num_clauses):
        vs = rng.sample(range(1, num_vars + 1), 3)
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    return CnfFormula.from_lists(clauses, num_vars)


def dpll_refutation(f: CnfFormula) -> Proof | None:
    """Tree-like refutation read off a plain DPLL search tree (branch on the
    lowest variable, 0 first, no propagation). None if f is satisfiable."""
    b = ProofBuilder()
    clauses = f.clauses

    def falsified(alpha):
        for c in clauses:
            if all(alpha.get(abs(l)) == (l < 0) for l in c):
                return c
        return None

    def go(alpha, v):
        c = falsified(alpha)
        if c is not None:
            return b.axiom(c)
        if v > f.num_vars:
            return None
        sub = []
        for val in (0, 1):
            alpha[v] = val
            r = go(alpha, v + 1)
            del alpha[v]
            if r is None:
                return None
            if v not in b.clause(r).vars:
                return r
            sub.append(r)
        return b.resolve(sub[0], sub[1], v)

    root = go({}, 1)
    if root is None:
        return None
    return prune(b.build()) if b.clause(root).is_empty() else None


def _partners(cur: Clause, pool):
    out = []
    for s in pool:
        piv = clashing_vars(cur, s)
        if len(piv) == 1:
            out.append((s, piv[0]))
    return out


@dataclass
class Step:
    left: Clause
    right: Clause
    pivot: int
    clause: Clause
    merge: bool


@dataclass
class Derivation:
    axioms: list
    steps: list = field(default_factory=list)

    @property
    def clauses(self):
        return [s.clause for s in self.steps]


def random_dag_derivation(rng: random.Random, axioms, steps: int = 20) -> Derivation:
    """Resolve random clashing pairs from the growing pool (general resolution)."""
    pool = list(dict.fromkeys(axioms))
    seen = set(pool)
    d = Derivation(list(pool))
    for _ in range(steps):
        a = rng.choice(pool)
        cands = _partners(a, pool)
        if not cands:
            continue
        b, x = rng.choice(cands)
        c = resolve(a, b, x)
        d.steps.append(Step(a, b, x, c, is_merge(a, b, x)))
        if c not in seen:
            seen.add(c)
            pool.append(c)
    return d


def random_regular_input_derivation(rng: random.Random, axioms, max_steps: int = 50) -> Derivation:
    """Strongly regular input derivation with random axiom choices: a pivot never
    reappears in a later side clause or conclusion."""
    axioms = list(dict.fromkeys(axioms))
    cur = rng.choice(axioms)
    d = Derivation(axioms)
    used: set = set()
    for _ in range(max_steps):
        cands = [(s, x) for s, x in _partners(cur, axioms)
                 if x not in used and not (s.vars & used)]
        if not cands:
            break
        s, x = rng.choice(cands)
        c = resolve(cur, s, x)
        d.steps.append(Step(cur, s, x, c, is_merge(cur, s, x)))
        used.add(x)
        cur = c
    return d


# ---------------------------------------------------------------- properties

def w_axioms_of(f: CnfFormula, lay: FamilyLayout) -> list:
    """Equality gadgets and the variant clauses (all counted as W axioms)."""
    return [c for c, r in zip(f.clauses, lay.roles) if r[0] in ("B", "C")]


def w_shape_ok(c: Clause, lay: FamilyLayout) -> bool:
    """Clause of the form w_{j,k} | -w_{j,k'} within one block."""
    if len(c) != 2:
        return False
    a, b = c.lits
    if not (lay.is_w(abs(a)) and lay.is_w(abs(b))):
        return False
    return (a > 0) != (b > 0) and lay.w_block(abs(a)) == lay.w_block(abs(b))


def w_no_merge_run(p: FamilyParams, samples: int, seed: int = 0, steps: int = 20) -> dict:
    f, lay = gen_family(p)
    ax = w_axioms_of(f, lay)
    rng = random.Random(seed)
    merges = shapes = derived = 0
    for _ in range(samples):
        d = random_dag_derivation(rng, ax, steps)
        for s in d.steps:
            derived += 1
            merges += s.merge
            shapes += not w_shape_ok(s.clause, lay)
    return {"samples": samples, "derived": derived, "merges": merges, "bad_shapes": shapes}


def cdcl_lemmas_run(episodes: int, seed: int = 0, num_vars: int = 20, num_clauses: int = 85) -> dict:
    """Sample episodes (each on a fresh random 3-CNF) until ``episodes`` conflicts."""
    rng = random.Random(seed)
    conflicts = not_merge = not_empowering = attempts = 0
    while conflicts < episodes:
        attempts += 1
        f = random_3cnf(rng, num_vars, num_clauses)
        ep = random_episode(f, rng.getrandbits(64))
        if ep.status != "conflict":
            continue
        conflicts += 1
        a = conflict_derivation(ep.trail, f, ep.conflict)
        _, j = first_uip(a, ep.trail)
        sid = a.producer[j]
        if not (a.proof[sid].kind == RESOLUTION and a.proof.step_is_merge(sid)):
            not_merge += 1
        for k, c in a.clauses.items():
            if k >= a.i_star and is_asserting(c, ep.trail) and not is_empowering(f.clauses, c):
                not_empowering += 1
    return {"episodes": conflicts, "attempts": attempts, "uip_not_merge": not_merge,
            "asserting_not_empowering": not_empowering}


def variant_reuse_run(variant: str, samples: int, seed: int = 0, p: FamilyParams | None = None) -> dict:
    """Try to produce a reusable clause from the W axioms of a variant.

    v1: strongly regular input derivations must contain no merge (no clause
        with a merge ancestor, so nothing may be kept in LRMA).
    v2: strongly regular input derivations may only produce merges that are
        already W axioms (useless lemmas).
    v3: every derived clause is absorbed by the W axioms (never a REL lemma).
    """
    p = p or FamilyParams(2, 2, 4, variant)
    f, lay = gen_family(p)
    ax = w_axioms_of(f, lay)
    axset = set(ax)
    rng = random.Random(seed)
    violations = derived = 0
    example = None
    for _ in range(samples):
        if variant == "v3":
            d = random_dag_derivation(rng, ax, 12)
            bad = [s.clause for s in d.steps
                   if not s.clause.tautology and is_empowering(ax, s.clause)]
        else:
            d = random_regular_input_derivation(rng, ax)
            if variant == "v1":
                bad = [s.clause for s in d.steps if s.merge]
            else:
                bad = [s.clause for s in d.steps if s.merge and s.clause not in axset]
        derived += len(d.steps)
        if bad:
            violations += 1
            example = example or bad[0]
    return {"variant": variant, "samples": samples, "derived": derived,
            "violations": violations, "example": str(example) if example else ""}
