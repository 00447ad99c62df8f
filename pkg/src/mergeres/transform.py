"""Andrews' tree-to-input and tree-to-merge transformations, input-structured
decomposition, regularization, and the RML / LREML simulations of resolution.

Trees are explicit: a ``Leaf`` per occurrence of an axiom (or of a lemma) and a
``Node`` per resolution step. Input derivations are ``(top, steps)`` chains,
``steps`` being a list of ``(side_leaf, pivot_var)``.
"""
from __future__ import annotations

import itertools

from .cnf import Clause, CnfFormula, clashing_vars, is_merge, resolve
from .proof import AXIOM, RESOLUTION, Proof, ProofBuilder, ProofError, check_valid
from .unit import cl_i_member, input_chain, input_derive, is_empowering


class TransformError(ValueError):
    pass


_uid = itertools.count()


class Leaf:
    __slots__ = ("clause", "ref", "order", "lemma_tree")

    def __init__(self, clause, ref, order, lemma_tree=None):
        self.clause = clause
        self.ref = ref
        self.order = order
        self.lemma_tree = lemma_tree

    def __repr__(self):
        return f"Leaf({self.clause})"


class Node:
    __slots__ = ("left", "right", "pivot", "clause")

    def __init__(self, left, right, pivot, clause=None):
        self.left, self.right, self.pivot = left, right, pivot
        self.clause = clause if clause is not None else resolve(left.clause, right.clause, pivot)

    def __repr__(self):
        return f"Node({self.clause})"


def node_is_merge(t) -> bool:
    return isinstance(t, Node) and is_merge(t.left.clause, t.right.clause, t.pivot)


def leaves(t):
    if isinstance(t, Leaf):
        yield t
        return
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Leaf):
            yield u
        else:
            stack.append(u.right)
            stack.append(u.left)


def nodes_postorder(t):
    out = []

    def go(u):
        if isinstance(u, Node):
            go(u.left)
            go(u.right)
            out.append(u)
    go(t)
    return out


def tree_size(t) -> int:
    return sum(1 for _ in leaves(t)) + len(nodes_postorder(t))


def proof_to_tree(p: Proof, sid: int | None = None):
    """Unfold a tree-like proof; shared axioms become separate leaves."""
    counter = itertools.count()

    def go(i):
        s = p[i]
        if s.kind == AXIOM:
            return Leaf(s.clause, ("a", s.clause), (i, next(counter)))
        if s.kind != RESOLUTION:
            raise TransformError(f"step {i}: only axioms and resolution steps are supported")
        a, b = s.premises
        return Node(go(a), go(b), s.pivot, s.clause)
    return go(p.root if sid is None else sid)


def tree_to_proof(t, b: ProofBuilder | None = None, leaf_id=None) -> Proof:
    b = b or ProofBuilder()
    _emit_tree(t, b, leaf_id or (lambda lf: b.axiom(lf.clause)))
    return b.build()


def _emit_tree(t, b, leaf_id):
    if isinstance(t, Leaf):
        return leaf_id(t)
    x = _emit_tree(t.left, b, leaf_id)
    y = _emit_tree(t.right, b, leaf_id)
    return b.resolve(x, y, t.pivot)


def chain_to_tree(top, steps):
    cur = top
    for leaf, piv in steps:
        cur = Node(cur, leaf, piv)
    return cur


def _contains(t, leaf) -> bool:
    return any(u is leaf for u in leaves(t))


def _strip(t, leaf, lit):
    """Remove ``lit`` from ``leaf`` and from every clause on its path to the root."""
    if isinstance(t, Leaf):
        if t is leaf:
            return Leaf(t.clause.without(lit), t.ref, t.order, t.lemma_tree)
        return t
    if _contains(t.left, leaf):
        return Node(_strip(t.left, leaf, lit), t.right, t.pivot)
    return Node(t.left, _strip(t.right, leaf, lit), t.pivot)


def _find_path_leaf(t, lit):
    """Follow the unique path of clauses containing ``lit`` down to a leaf."""
    while isinstance(t, Node):
        inl, inr = lit in t.left.clause, lit in t.right.clause
        if inl == inr:
            raise TransformError(f"literal {lit} does not follow a unique path (merge inside subtree)")
        t = t.left if inl else t.right
    return t


def replay(top, steps):
    """Clauses of a chain, allowing tautological intermediates."""
    cur = set(top.clause.set)
    out = [Clause(cur)]
    for leaf, x in steps:
        s = leaf.clause
        ls = x if x in s else -x
        if -ls not in cur:
            raise TransformError(f"pivot {x} missing while replaying a chain")
        cur = (cur - {-ls}) | (s.set - {ls})
        out.append(Clause(cur))
    return out


def _andrews_chain(t, E):
    """Input chain with top leaf ``E`` deriving a subclause of ``t``'s root
    (possibly through tautological clauses)."""
    if isinstance(t, Leaf):
        if t is not E:
            raise TransformError("topmost leaf not found")
        return E, []
    if _contains(t.left, E):
        t1, t2 = t.left, t.right
    else:
        t1, t2 = t.right, t.left
    x = t.pivot
    lit = x if x in t1.clause else -x
    d_leaf = _find_path_leaf(t2, -lit)
    t3 = _strip(t2, d_leaf, -lit)
    top4, steps4 = _andrews_chain(t1, E)
    if lit not in replay(top4, steps4)[-1]:
        return top4, steps4
    d_new = next(u for u in leaves(t3) if u.ref == d_leaf.ref and u.order == d_leaf.order)
    top5, steps5 = _andrews_chain(t3, d_new)
    if top5 is not d_new:
        raise TransformError("stitching leaf mismatch")
    return top4, steps4 + [(d_leaf, x)] + steps5


def clean_chain(top, steps):
    """Syntactic equivalent of the chain with tautologies replaced by 1."""
    clauses = replay(top, steps)
    out_top, out_steps = top, []
    cur = top.clause
    for (leaf, _), c in zip(steps, clauses[1:]):
        if c.tautology or cur.set <= c.set:
            continue
        if leaf.clause.set <= c.set:
            out_top, out_steps, cur = leaf, [], leaf.clause
            continue
        piv = clashing_vars(cur, leaf.clause)
        if len(piv) != 1:
            raise TransformError(f"cannot resolve {cur} with {leaf.clause} during cleanup")
        r = resolve(cur, leaf.clause, piv[0])
        if not r.set <= c.set:
            raise TransformError("cleanup produced a clause that does not imply the original")
        out_steps.append((leaf, piv[0]))
        cur = r
    return out_top, out_steps


def _tree_to_input_chain(t):
    if isinstance(t, Leaf):
        return t, []
    E = min(leaves(t), key=lambda u: u.order)
    top, steps = _andrews_chain(t, E)
    return clean_chain(top, steps)


def _check_tree_like(p: Proof):
    from .systems import is_tree_like
    ok, why = is_tree_like(p)
    if not ok:
        raise TransformError(f"proof is not tree-like: {why}")
    rep = check_valid(p, CnfFormula.from_lists([s.clause for s in p.steps if s.kind == AXIOM]))
    if not rep:
        raise TransformError(f"invalid proof at step {rep.step}: {rep.reason}")


def tree_to_input(p: Proof) -> Proof:
    """Input derivation of a subclause of the root of a tree-like proof whose
    only possible merge is the root."""
    _check_tree_like(p)
    for s in p.steps:
        if s.kind == RESOLUTION and s.id != p.root and p.step_is_merge(s.id):
            raise TransformError(f"step {s.id} is a merge below the root")
    top, steps = _tree_to_input_chain(proof_to_tree(p))
    return tree_to_proof(chain_to_tree(top, steps))


def _replace(t, target, new):
    if t is target:
        return new
    if isinstance(t, Leaf):
        return t
    left = _replace(t.left, target, new)
    right = _replace(t.right, target, new) if left is t.left else t.right
    if left is t.left and right is t.right:
        return t
    changed, old = (left, t.left) if left is not t.left else (right, t.right)
    lit = t.pivot if t.pivot in old.clause else -t.pivot
    if lit not in changed.clause:
        return changed
    return Node(left, right, t.pivot)


def _chain_merge_positions(top, steps):
    cur = top.clause
    out = []
    for k, (leaf, x) in enumerate(steps):
        if is_merge(cur, leaf.clause, x):
            out.append(k)
        cur = resolve(cur, leaf.clause, x)
    return out, cur


def _to_merge_tree(t):
    while True:
        ms = [u for u in nodes_postorder(t) if node_is_merge(u)]
        if not ms:
            top, steps = _tree_to_input_chain(t)
            return _expand(chain_to_tree(top, steps))
        psi = next(u for u in ms
                   if not any(node_is_merge(v) for v in nodes_postorder(u) if v is not u))
        top, steps = _tree_to_input_chain(psi)
        pos, _ = _chain_merge_positions(top, steps)
        if not pos:
            repl = chain_to_tree(top, steps)
        else:
            d = pos[-1]
            omega1 = chain_to_tree(top, steps[: d + 1])
            lem = Leaf(omega1.clause, ("L", next(_uid)), (float("inf"), next(_uid)), omega1)
            repl = chain_to_tree(lem, steps[d + 1:])
        t = _replace(t, psi, repl)


def _expand(t):
    if isinstance(t, Leaf):
        return _expand(t.lemma_tree) if t.lemma_tree is not None else t
    left, right = _expand(t.left), _expand(t.right)
    if left is t.left and right is t.right:
        return t
    return Node(left, right, t.pivot, t.clause)


def tree_to_merge_tree(t):
    return _to_merge_tree(t)


def tree_to_merge(p: Proof) -> Proof:
    """Tree-like merge resolution derivation of a subclause of the root."""
    _check_tree_like(p)
    return tree_to_proof(_to_merge_tree(proof_to_tree(p)))


# ---------------------------------------------------------------- decomposition

def _emit_block(t, b, leaf_id, emit_chain=True):
    """Emit lemma blocks feeding ``t`` (marked), then ``t``'s own chain."""
    chain = []  # (node, side) from the root downwards
    lemmas = []
    cur = t
    while isinstance(cur, Node):
        L, R = cur.left, cur.right
        if isinstance(L, Leaf) and isinstance(R, Leaf):
            chain.append((cur, R, L))
            break
        if isinstance(R, Leaf) or isinstance(L, Leaf):
            side, cont = (R, L) if isinstance(R, Leaf) else (L, R)
        elif node_is_merge(R):
            side, cont = R, L
        elif node_is_merge(L):
            side, cont = L, R
        else:
            raise TransformError(f"{cur.clause}: neither premise is a leaf or a merge")
        if isinstance(side, Node):
            lemmas.append(side)
        chain.append((cur, side, None))
        cur = cont
    side_ids = {}
    for lem in reversed(lemmas):
        sid = _emit_block(lem, b, leaf_id)
        b.mark(sid)
        side_ids[id(lem)] = sid
    if not emit_chain:
        return None
    if isinstance(t, Leaf):
        return leaf_id(t)
    node, side, top = chain[-1]
    prev = leaf_id(top)
    for node, side, _ in reversed(chain):
        sid = side_ids[id(side)] if isinstance(side, Node) else leaf_id(side)
        prev = b.resolve(prev, sid, node.pivot)
    return prev


def decompose_tree(t, b: ProofBuilder | None = None, leaf_id=None) -> Proof:
    b = b or ProofBuilder()
    _emit_block(t, b, leaf_id or (lambda lf: b.axiom(lf.clause)))
    return b.build()


def decompose_input_structured(p: Proof) -> Proof:
    """Re-serialize a merge resolution tree as input blocks with merge lemmas."""
    from .systems import andrews_condition
    _check_tree_like(p)
    ok, why = andrews_condition(p)
    if not ok:
        raise TransformError(f"not a merge resolution derivation: {why}")
    return decompose_tree(proof_to_tree(p))


# ---------------------------------------------------------------- regularization

def regularize_input(d: Proof) -> Proof:
    """Strongly regular input derivation of a subclause of ``d``'s conclusion,
    using only ``d``'s axioms."""
    from .systems import check_strongly_regular, is_input_shaped
    ok, why = is_input_shaped(d)
    if not ok:
        raise TransformError(f"not an input derivation: {why}")
    if check_strongly_regular(d):
        return d
    axioms = list(dict.fromkeys(s.clause for s in d.steps if s.kind == AXIOM))
    out = input_derive(axioms, d.conclusion)
    if out is None:
        raise TransformError("conclusion not reachable from the derivation's axioms")
    return out


# ---------------------------------------------------------------- simulations

class _Database:
    """Clause list for the unit engine plus output step ids for lemmas."""

    def __init__(self, clauses, b: ProofBuilder):
        self.clauses = list(clauses)
        self.lemma_ids = {}
        self.b = b
        self._occ = itertools.count()

    def leaf(self, idx: int) -> Leaf:
        c = self.clauses[idx]
        return Leaf(c, ("d", idx), (idx, next(self._occ)))

    def leaf_id(self, leaf: Leaf) -> int:
        sid = self.lemma_ids.get(leaf.clause)
        return sid if sid is not None else self.b.axiom(leaf.clause)

    def add_lemma(self, clause: Clause, sid: int):
        self.clauses.append(clause)
        self.lemma_ids[clause] = sid

    def chain_tree(self, c: Clause):
        res = input_chain(self.clauses, c)
        if res is None:
            return None
        top, sides = res
        return chain_to_tree(self.leaf(top), [(self.leaf(i), v) for i, v in sides])

    def emit_chain(self, c: Clause) -> int:
        t = self.chain_tree(c)
        if t is None:
            raise TransformError(f"{c} is not in the input closure")
        return _emit_tree(t, self.b, self.leaf_id)


def _check_refutation(pi: Proof, f: CnfFormula):
    rep = check_valid(pi, f, require_refutation=True)
    if not rep:
        raise TransformError(f"input is not a valid refutation: step {rep.step}: {rep.reason}")


def simulate_rml(pi: Proof, f: CnfFormula, debug: bool = False) -> Proof:
    """RML refutation of length at most (2n+1)L + n from a resolution refutation."""
    from .systems import classify
    _check_refutation(pi, f)
    if classify(pi, f).rml:
        return pi
    b = ProofBuilder()
    db = _Database(dict.fromkeys(s.clause for s in pi.steps if s.kind == AXIOM), b)
    done = []
    for s in pi.steps:
        if s.kind != RESOLUTION:
            continue
        c = s.clause
        if not cl_i_member(db.clauses, c):
            ta, tb = (db.chain_tree(pi.clause(q)) for q in s.premises)
            if ta is None or tb is None:
                raise TransformError(f"step {s.id}: premise left the input closure")
            piv = clashing_vars(ta.clause, tb.clause)
            if piv != [s.pivot]:
                raise TransformError(f"step {s.id}: subclauses of the premises cannot be resolved")
            merged = _to_merge_tree(Node(ta, tb, s.pivot))
            before = len(db.lemma_ids)
            _collect_lemmas(merged, db)
            if len(db.lemma_ids) == before:
                raise TransformError(f"step {s.id}: decomposition produced no lemma")
        if debug:
            done.append(c)
            for e in done:
                if not cl_i_member(db.clauses, e):
                    raise AssertionError(f"invariant broken after step {s.id}: {e}")
    db.emit_chain(Clause())
    return b.build()


def _collect_lemmas(t, db: _Database):
    """Emit the lemma blocks of a merge tree's decomposition (not its final block)."""
    b = db.b
    start = set(b._lemmas)
    _emit_block(t, b, db.leaf_id, emit_chain=False)
    for s in b._steps:
        if s.id in b._lemmas and s.id not in start:
            db.add_lemma(s.clause, s.id)


def simulate_lreml(pi: Proof, f: CnfFormula) -> Proof:
    """LREML refutation: insert the first 1-empowering clause of A' or B' as a
    lemma until the resolvent enters the input closure."""
    from .systems import classify
    _check_refutation(pi, f)
    if classify(pi, f).lreml:
        return pi
    b = ProofBuilder()
    db = _Database(f.clauses, b)
    for s in pi.steps:
        if s.kind != RESOLUTION:
            continue
        c = s.clause
        while not cl_i_member(db.clauses, c):
            for q in s.premises:
                res = input_chain(db.clauses, pi.clause(q))
                if res is None:
                    raise TransformError(f"step {s.id}: premise left the input closure")
                top, sides = res
                k = _first_empowering(db.clauses, top, sides)
                if k is not None:
                    tree = chain_to_tree(db.leaf(top), [(db.leaf(i), v) for i, v in sides[: k + 1]])
                    sid = _emit_tree(tree, b, db.leaf_id)
                    b.mark(sid)
                    db.add_lemma(tree.clause, sid)
                    break
            else:
                raise TransformError(f"step {s.id}: both premises absorbed but resolvent not in closure")
    db.emit_chain(Clause())
    return b.build()


def _first_empowering(clauses, top, sides):
    cur = clauses[top]
    for k, (i, v) in enumerate(sides):
        cur = resolve(cur, clauses[i], v)
        if is_empowering(clauses, cur):
            return k
    return None


def random_tree_proof(rng, num_vars: int = 5, steps: int = 8, target=()) -> Proof:
    """Random tree-like resolution derivation of ``target`` built top-down.

    Each split picks a pivot outside the current clause and distributes the
    clause over both premises, sometimes to both (producing merges).
    """
    def grow(c: Clause, budget: int):
        free = [v for v in range(1, num_vars + 1) if v not in c.vars]
        if budget <= 0 or not free:
            return Leaf(c, ("a", c), None)
        x = rng.choice(free)
        left, right = [], []
        for lit in c.lits:
            r = rng.random()
            if r < 0.4:
                left.append(lit)
            elif r < 0.8:
                right.append(lit)
            else:
                left.append(lit)
                right.append(lit)
        rest = budget - 1
        kl = rng.randint(0, rest)
        a = grow(Clause(left + [x]), kl)
        b = grow(Clause(right + [-x]), rest - kl)
        if rng.random() < 0.5:
            a, b = b, a
        return Node(a, b, x)
    return tree_to_proof(grow(Clause(target), steps))
