"""Lower-bound instruments for the F_{l,m,n} family: block width, trimming,
the sigma_i restrictions, autarky / k-respecting checks and the random
restriction sampler."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .cnf import Clause, CnfFormula, Restriction, apply_restriction, is_satisfied
from .families import FamilyLayout, FamilyParams, gen_family
from .proof import Proof


def _check_vars(c: Clause, lay: FamilyLayout):
    for v in c.vars:
        lay.var_name(v)  # raises KeyError on foreign variables


def mu(c: Clause, lay: FamilyLayout) -> int:
    """Number of distinct W blocks mentioned by ``c``."""
    _check_vars(c, lay)
    return len({lay.w_block(v) for v in c.vars if lay.is_w(v)})


def trim_r(c: Clause, lay: FamilyLayout) -> Clause:
    """Keep the smallest positive and the largest negative X literal."""
    _check_vars(c, lay)
    pos = [l for l in c if l > 0 and lay.is_x(l)]
    neg = [l for l in c if l < 0 and lay.is_x(-l)]
    keep = [l for l in c if not lay.is_x(abs(l))]
    if pos:
        keep.append(min(pos))
    if neg:
        keep.append(min(neg))  # -largest index
    return Clause(keep)


def sigma_i(i: int, lay: FamilyLayout, exact: bool = False) -> Restriction:
    """X variables up to i*l set to 1, the next window free, the rest 0.

    The default window is i*l < i' <= (i+1)*l. With ``exact`` the window is
    i*l < i' < (i+1)*l, which maps F_{l,m,n} onto F_{l,1,n} for every i.
    """
    if not 0 <= i < lay.m:
        raise ValueError(f"sigma index {i} outside [0, {lay.m})")
    lo, hi = i * lay.l, (i + 1) * lay.l
    out = {}
    for v in range(1, lay.num_x + 1):
        if v <= lo:
            out[v] = 1
        elif v < hi or (v == hi and not exact):
            continue
        else:
            out[v] = 0
    return Restriction(out)


def sigma_renaming(i: int, lay: FamilyLayout, small: FamilyLayout) -> dict:
    """Variable map from the sigma_i window of ``lay`` onto ``small`` = F_{l,1,n}."""
    ren = {i * lay.l + k: small.x(k) for k in range(1, lay.l)}
    for j in range(1, lay.l + 1):
        for k in range(1, lay.n + 1):
            ren[lay.w(j, k)] = small.w(j, k)
    return ren


def rename_clause(c: Clause, ren: dict) -> Clause:
    return Clause((1 if l > 0 else -1) * ren[abs(l)] for l in c)


def is_autarky(rho: Restriction, clauses) -> bool:
    """Every touched clause is satisfied."""
    for c in clauses:
        c = c if isinstance(c, Clause) else Clause(c)
        if rho.touches(c) and not is_satisfied(apply_restriction(c, rho)):
            return False
    return True


def w_axioms(f: CnfFormula, lay: FamilyLayout) -> list:
    return [c for c, r in zip(f.clauses, lay.roles) if r[0] == "B"]


def _base_formula(lay: FamilyLayout):
    """Base formula and base layout; variants are first mapped back."""
    p = lay.params
    base = FamilyParams(p.l, p.m, p.n)
    f, blay = gen_family(base)
    return f, blay


def surviving_blocks(rho: Restriction, lay: FamilyLayout) -> list:
    return [j for j in range(1, lay.l + 1)
            if all(rho.value(lay.w(j, k)) == "*" for k in range(1, lay.n + 1))]


def is_k_respecting(rho: Restriction, lay: FamilyLayout, k: int) -> bool:
    """Autarky on the W axioms, X variables sent to X variables or constants,
    and F|rho equal to F_{k,m,n} under the canonical renaming (surviving blocks
    and free X variables in index order)."""
    f, blay = _base_formula(lay)
    if not is_autarky(rho, w_axioms(f, blay)):
        return False
    for v in range(1, blay.num_x + 1):
        val = rho.value(v)
        if isinstance(val, tuple) and not blay.is_x(abs(val[1])):
            return False
    blocks = surviving_blocks(rho, blay)
    if len(blocks) != k or k < 1:
        return False
    free_x = [v for v in range(1, blay.num_x + 1) if rho.value(v) == "*"]
    g, glay = gen_family(FamilyParams(k, blay.m, blay.n))
    if len(free_x) != glay.num_x:
        return False
    ren = {v: glay.x(t) for t, v in enumerate(free_x, 1)}
    for jj, j in enumerate(blocks, 1):
        for kk in range(1, blay.n + 1):
            ren[blay.w(j, kk)] = glay.w(jj, kk)
    got = set()
    for c in f.restrict(rho).clauses:
        if any(abs(l) not in ren for l in c):
            return False
        got.add(rename_clause(c, ren))
    return got == set(g.clauses)


@dataclass
class RestrictionSample:
    J: tuple  # per block: 0, 1 or '*'
    restriction: Restriction
    seed: int

    @property
    def surviving(self) -> list:
        return [j for j, v in enumerate(self.J, 1) if v == "*"]


def restriction_from_J(J, lay: FamilyLayout) -> Restriction:
    """Whole W blocks set to J_j; x_i free iff J of its block is free, else
    equal to x_{i-1} (x_0 = 1)."""
    consts, ren = {}, {}
    for j, val in enumerate(J, 1):
        if val != "*":
            for k in range(1, lay.n + 1):
                consts[lay.w(j, k)] = val
    prev = 1  # constant 1 or a literal
    prev_is_lit = False
    for i in range(1, lay.num_x + 1):
        if J[lay.hat(i) - 1] == "*":
            prev, prev_is_lit = i, True
        elif prev_is_lit:
            ren[i] = prev
        else:
            consts[i] = prev
    return Restriction.with_renaming(consts, ren)


def sample_restriction(lay: FamilyLayout, seed: int) -> RestrictionSample:
    rng = random.Random(seed)
    J = tuple(rng.choices((0, 1, "*"), weights=(1, 1, 2), k=lay.l))
    return RestrictionSample(J, restriction_from_J(J, lay), seed)


def sample_qualifies(p: Proof, lay: FamilyLayout, s: RestrictionSample) -> bool:
    if len(s.surviving) < lay.l / 4:
        return False
    for step in p.steps:
        c = step.clause
        if is_satisfied(c):
            continue
        r = apply_restriction(c, s.restriction)
        if not is_satisfied(r) and mu(r, lay) > lay.l / 8:
            return False
    return True


def find_respecting_restriction(p: Proof, lay: FamilyLayout, max_tries: int = 100,
                                seed: int = 0):
    for t in range(max_tries):
        s = sample_restriction(lay, seed + t)
        if sample_qualifies(p, lay, s):
            return s
    return None


def mu_histogram(p: Proof, lay: FamilyLayout) -> dict:
    hist = {}
    for step in p.steps:
        if is_satisfied(step.clause):
            continue
        k = mu(step.clause, lay)
        hist[k] = hist.get(k, 0) + 1
    return dict(sorted(hist.items()))
