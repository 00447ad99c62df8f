"""Classification of proofs into the merge-resolution proof systems."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .cnf import CnfFormula, is_satisfied
from .proof import AXIOM, RESOLUTION, SAT, WEAKENING, Block, Proof, check_valid
from .unit import is_empowering

FLAGS = ("valid_resolution", "tree_like", "input_shaped", "rml", "rma_structured",
         "rma_general", "lrml", "lrma", "rel", "lreml")


@dataclass
class ClassificationReport:
    valid_resolution: bool = False
    tree_like: bool = False
    input_shaped: bool = False
    rml: bool = False
    rma_structured: bool = False
    rma_general: bool = False
    lrml: bool = False
    lrma: bool = False
    rel: bool = False
    lreml: bool = False
    diagnostics: dict = field(default_factory=dict)

    def flag(self, name: str) -> bool:
        return getattr(self, name.replace("-", "_"))

    def as_dict(self) -> dict:
        d = {k: getattr(self, k) for k in FLAGS}
        d["diagnostics"] = dict(self.diagnostics)
        return d

    def to_text(self) -> str:
        lines = [f"{k}={str(getattr(self, k)).lower()}" for k in FLAGS]
        lines += [f"why.{k}={v}" for k, v in sorted(self.diagnostics.items())]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def _axiom_like(p: Proof, sid: int) -> bool:
    """Axioms and weakenings of axioms: leaves that may be copied freely."""
    s = p[sid]
    while s.kind == WEAKENING:
        s = p[s.premises[0]]
    return s.kind in (AXIOM, SAT)


def is_tree_like(p: Proof):
    cons = p.consumers()
    for s in p.steps:
        if not _axiom_like(p, s.id) and len(cons[s.id]) > 1:
            return False, f"step {s.id} used by {len(cons[s.id])} steps"
    return True, ""


def _chain_ok(p: Proof, rsteps, leaf_ok):
    """Each step continues from the previous one with a leaf side premise."""
    for k, sid in enumerate(rsteps):
        a, b = p[sid].premises
        if k == 0:
            if not (leaf_ok(a) and leaf_ok(b)):
                return f"step {sid}: first step of a block must use two leaves"
        else:
            prev = rsteps[k - 1]
            other = b if a == prev else a if b == prev else None
            if other is None:
                return f"step {sid}: does not continue from step {prev}"
            if not leaf_ok(other):
                return f"step {sid}: side premise {other} is not an axiom or earlier lemma"
    return ""


def is_input_shaped(p: Proof):
    rsteps = [s.id for s in p.steps if s.kind == RESOLUTION]
    if not rsteps:
        return (len(p) >= 1 and _axiom_like(p, p.root)), "no resolution steps"
    why = _chain_ok(p, rsteps, lambda q: _axiom_like(p, q))
    if why:
        return False, why
    if rsteps[-1] != p.root:
        return False, "root is not the end of the chain"
    return True, ""


def block_structure(p: Proof):
    """Check the input-structured view; returns (ok, reason, blocks)."""
    blocks = p.blocks()
    lemmas_so_far: set = set()

    def leaf_ok(q):
        return _axiom_like(p, q) or q in lemmas_so_far

    for bi, blk in enumerate(blocks):
        why = _chain_ok(p, blk.steps, leaf_ok)
        if why:
            return False, f"block {bi}: {why}", blocks
        end = blk.steps[-1] if blk.steps else None
        if blk.lemma is not None:
            if blk.steps and blk.lemma != end:
                return False, f"block {bi}: lemma {blk.lemma} is not the block's last step", blocks
            if not blk.steps and not leaf_ok(blk.lemma):
                return False, f"block {bi}: lemma {blk.lemma} is not a leaf", blocks
            lemmas_so_far.add(blk.lemma)
        else:
            if end is not None and end != p.root:
                return False, f"block {bi}: final block does not end at the root", blocks
    last = blocks[-1]
    if last.lemma is not None and last.lemma != p.root:
        return False, "root lies outside every block", blocks
    return True, "", blocks


def _block_clauses(p: Proof, blk: Block):
    """Top leaf, then (side leaf, conclusion, pivot) per step."""
    items = []
    prev = None
    top = None
    for k, sid in enumerate(blk.steps):
        a, b = p[sid].premises
        if k == 0:
            top, side = a, b
        else:
            side = b if a == prev else a
        items.append((p.clause(side), p.clause(sid), p[sid].pivot))
        prev = sid
    return top, items


def block_strongly_regular(p: Proof, blk: Block):
    _, items = _block_clauses(p, blk)
    for i, (_, concl, piv) in enumerate(items):
        if piv in concl.vars:
            return False, f"pivot {piv} of step {blk.steps[i]} survives in its conclusion"
        for j in range(i + 1, len(items)):
            side, c2, _ = items[j]
            if piv in side.vars or piv in c2.vars:
                return False, f"pivot {piv} of step {blk.steps[i]} reappears at step {blk.steps[j]}"
    return True, ""


def check_strongly_regular(p: Proof, blk: Block | None = None) -> bool:
    if blk is None:
        blk = Block(tuple(s.id for s in p.steps if s.kind == RESOLUTION), None)
    return block_strongly_regular(p, blk)[0]


def andrews_condition(p: Proof):
    """Every inference has a premise that is an axiom or a merge."""
    for s in p.steps:
        if s.kind != RESOLUTION:
            continue
        if not any(_axiom_like(p, q) or p.step_is_merge(q) for q in s.premises):
            return False, f"step {s.id}: no premise is an axiom or a merge"
    return True, ""


def merge_ancestor_map(p: Proof) -> dict:
    """id -> whether the step or one of its ancestors is a merge."""
    out = {}
    for s in p.steps:
        out[s.id] = p.step_is_merge(s.id) or any(out[q] for q in s.premises)
    return out


def classify(p: Proof, f: CnfFormula, allow_weakening: bool = False) -> ClassificationReport:
    r = ClassificationReport()
    why = r.diagnostics
    rep = check_valid(p, f, allow_weakening=allow_weakening)
    if not rep:
        why["valid_resolution"] = f"step {rep.step}: {rep.reason}"
        for k in FLAGS[1:]:
            why[k] = "proof is not a valid resolution proof"
        return r
    r.valid_resolution = True

    r.tree_like, w = is_tree_like(p)
    if w:
        why["tree_like"] = w
    r.input_shaped, w = is_input_shaped(p)
    if not r.input_shaped:
        why["input_shaped"] = w

    cons = p.consumers()
    anc = merge_ancestor_map(p)
    r.rma_general = True
    for s in p.steps:
        if len(cons[s.id]) > 1 and not _axiom_like(p, s.id) and not anc[s.id]:
            r.rma_general = False
            why["rma_general"] = f"step {s.id} is reused without a merge ancestor"
            break

    ok, w, blocks = block_structure(p)
    if not ok:
        for k in ("rml", "rma_structured", "lrml", "lrma", "rel", "lreml"):
            why[k] = w
        return r
    lemma_blocks = [b for b in blocks if b.lemma is not None and b.lemma != p.root]

    r.rml = True
    for b in lemma_blocks:
        if not b.steps or not p.step_is_merge(b.lemma):
            r.rml = False
            why["rml"] = f"lemma {b.lemma} is not a merge"
            break
    r.rma_structured = True
    for b in lemma_blocks:
        if not any(p.step_is_merge(s) for s in b.steps):
            r.rma_structured = False
            why["rma_structured"] = f"block closing at {b.lemma} contains no merge"
            break

    regular = True
    for b in blocks:
        ok, w = block_strongly_regular(p, b)
        if not ok:
            regular = False
            why["locally_regular"] = w
            break
    r.lrml = r.rml and regular
    r.lrma = r.rma_structured and regular
    if not r.lrml:
        why["lrml"] = why.get("rml") or why["locally_regular"]
    if not r.lrma:
        why["lrma"] = why.get("rma_structured") or why["locally_regular"]

    db = list(f.clauses)
    r.rel = True
    for b in lemma_blocks:
        c = p.clause(b.lemma)
        if is_satisfied(c) or c.is_empty() or c.tautology or not is_empowering(db, c):
            r.rel = False
            why["rel"] = f"lemma {b.lemma} {c} is absorbed"
            break
        db.append(c)
    r.lreml = r.lrml and r.rel
    if not r.lreml:
        why["lreml"] = why.get("lrml") or why["rel"]
    return r
