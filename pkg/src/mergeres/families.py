"""The F_{l,m,n} formula family, its variants, and explicit refutations.

Variable numbering (1-based, portable across runs):
  x_i      -> i                          for i in 1..m*l-1
  w_{j,k}  -> m*l-1 + (j-1)*n + k         for j in 1..l, k in 1..n
  z_j, y_j -> base + j, base + l + j      (variants 1 and 2; base = m*l-1 + l*n)

Clause order: the equality gadgets (for each j, k: B_{j,k,1} then B_{j,k,0}),
then the constraints (for each i: A_{i,1} then A_{i,0}), then the variant
clauses C1.. for each j.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .cnf import Clause, CnfFormula, Restriction
from .proof import Proof, ProofBuilder

VARIANTS = ("base", "v1", "v2", "v3")


@dataclass(frozen=True)
class FamilyParams:
    l: int
    m: int
    n: int
    variant: str = "base"

    def __post_init__(self):
        if self.l < 1 or self.m < 1 or self.n < 2:
            raise ValueError(f"need l >= 1, m >= 1, n >= 2; got {self}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant == "v3" and self.n < 3:
            raise ValueError("variant v3 needs n >= 3")


@dataclass
class FamilyLayout:
    params: FamilyParams
    roles: list = field(default_factory=list)  # one tag tuple per clause
    extra_vars: dict = field(default_factory=dict)  # name -> var (e.g. the weakening z)

    @property
    def l(self):
        return self.params.l

    @property
    def m(self):
        return self.params.m

    @property
    def n(self):
        return self.params.n

    @property
    def num_x(self) -> int:
        return self.m * self.l - 1

    @property
    def num_constraints(self) -> int:
        return self.m * self.l

    @property
    def base_vars(self) -> int:
        return self.num_x + self.l * self.n

    @property
    def num_vars(self) -> int:
        aux = 2 * self.l if self.params.variant in ("v1", "v2") else 0
        return self.base_vars + aux + len(self.extra_vars)

    def hat(self, i: int) -> int:
        return (i - 1) % self.l + 1

    def x(self, i: int) -> int:
        if not 1 <= i <= self.num_x:
            raise IndexError(f"x_{i} is not a variable")
        return i

    def w(self, j: int, k: int) -> int:
        if not (1 <= j <= self.l and 1 <= k <= self.n):
            raise IndexError(f"w_{j},{k} is not a variable")
        return self.num_x + (j - 1) * self.n + k

    def z(self, j: int) -> int:
        if self.params.variant not in ("v1", "v2"):
            raise IndexError("no z variables in this variant")
        return self.base_vars + j

    def y(self, j: int) -> int:
        if self.params.variant not in ("v1", "v2"):
            raise IndexError("no y variables in this variant")
        return self.base_vars + self.l + j

    def is_x(self, v: int) -> bool:
        return 1 <= v <= self.num_x

    def is_w(self, v: int) -> bool:
        return self.num_x < v <= self.base_vars

    def w_block(self, v: int) -> int:
        return (v - self.num_x - 1) // self.n + 1

    def w_index(self, v: int) -> int:
        return (v - self.num_x - 1) % self.n + 1

    def var_name(self, v: int) -> str:
        if self.is_x(v):
            return f"x{v}"
        if self.is_w(v):
            return f"w{self.w_block(v)},{self.w_index(v)}"
        for name, u in self.extra_vars.items():
            if u == v:
                return name
        if self.params.variant in ("v1", "v2"):
            off = v - self.base_vars
            if 1 <= off <= self.l:
                return f"z{off}"
            if self.l < off <= 2 * self.l:
                return f"y{off - self.l}"
        raise KeyError(f"variable {v} is not part of the layout")

    # clauses
    def B(self, j: int, k: int, b: int) -> Clause:
        if b:
            return Clause([self.w(j, k), -self.w(j, k + 1)])
        return Clause([-self.w(j, k), self.w(j, k + 1)])

    def A(self, i: int, b: int) -> Clause:
        h = self.hat(i)
        lits = [self.w(h, 1), self.w(h, self.n)] if b else [-self.w(h, 1), -self.w(h, self.n)]
        if i > 1:
            lits.append(-self.x(i - 1))
        if i < self.num_constraints:
            lits.append(self.x(i))
        return Clause(lits)

    def variant_clauses(self, j: int) -> list:
        w1, w2 = self.w(j, 1), self.w(j, 2)
        v = self.params.variant
        if v == "v1":
            z, y = self.z(j), self.y(j)
            return [Clause([-w1, w2, -z]), Clause([-w2, z]), Clause([w1, -w2, -y]), Clause([w2, y])]
        if v == "v2":
            z, y = self.z(j), self.y(j)
            return [Clause([z, -w1, w2]), Clause([-z, -w1, w2]), Clause([y, w1, -w2]), Clause([-y, w1, -w2])]
        if v == "v3":
            w3 = self.w(j, 3)
            return [Clause([-w1, -w2, w3]), Clause([w1, w2, -w3])]
        return []

    def C(self, j: int, t: int) -> Clause:
        return self.variant_clauses(j)[t - 1]

    def clause_roles(self) -> list:
        return list(self.roles)

    def aux_restriction(self) -> Restriction:
        """Map the auxiliary variables back onto the base formula."""
        v = self.params.variant
        if v == "v1":
            ren = {}
            for j in range(1, self.l + 1):
                ren[self.z(j)] = self.w(j, 1)
                ren[self.y(j)] = -self.w(j, 1)
            return Restriction.with_renaming({}, ren)
        if v == "v2":
            return Restriction({u: 1 for j in range(1, self.l + 1) for u in (self.z(j), self.y(j))})
        if v == "v3":
            return Restriction.with_renaming({}, {self.w(j, 2): self.w(j, 1) for j in range(1, self.l + 1)})
        return Restriction()


def gen_family(p: FamilyParams):
    lay = FamilyLayout(p)
    clauses, roles = [], []
    for j in range(1, p.l + 1):
        for k in range(1, p.n):
            for b in (1, 0):
                clauses.append(lay.B(j, k, b))
                roles.append(("B", j, k, b))
    for i in range(1, lay.num_constraints + 1):
        for b in (1, 0):
            clauses.append(lay.A(i, b))
            roles.append(("A", i, b))
    for j in range(1, p.l + 1):
        for t, c in enumerate(lay.variant_clauses(j), 1):
            clauses.append(c)
            roles.append(("C", j, t))
    lay.roles = roles
    return CnfFormula(tuple(clauses), lay.num_vars), lay


def _with_z(p: FamilyParams):
    f, lay = gen_family(p)
    z = lay.num_vars + 1
    lay.extra_vars["z"] = z
    return f, lay, z


def gen_weakening_formula(p: FamilyParams):
    """G = (F or z) and not z: every clause of F gets z, plus the unit not z."""
    f, lay, z = _with_z(p)
    clauses = [c.with_lits(z) for c in f.clauses] + [Clause([-z])]
    lay.roles = [r + ("+z",) for r in lay.roles] + [("Z",)]
    return CnfFormula(tuple(clauses), z), lay, z


def gen_weakening_base(p: FamilyParams):
    """F and not z, the formula refuted with the help of weakening."""
    f, lay, z = _with_z(p)
    lay.roles = lay.roles + [("Z",)]
    return CnfFormula(f.clauses + (Clause([-z]),), z), lay, z


# ---------------------------------------------------------------- builders

def _eq_chain(b: ProofBuilder, lay: FamilyLayout, j: int, pol: int, leaf) -> int:
    """w_{j,1} | -w_{j,n} (pol=1) or its mirror, by the ladder of B axioms."""
    cur = leaf(lay.B(j, 1, pol))
    for k in range(2, lay.n):
        cur = b.resolve(cur, leaf(lay.B(j, k, pol)))
    return cur


def _res_ub(b: ProofBuilder, lay: FamilyLayout, leaf, mark_all: bool = False) -> int:
    E = {}
    for j in range(1, lay.l + 1):
        for pol in (1, 0):
            E[j, pol] = _eq_chain(b, lay, j, pol, leaf)
    R = []
    for i in range(1, lay.num_constraints + 1):
        h = lay.hat(i)
        t1 = b.resolve(E[h, 1], leaf(lay.A(i, 1)))
        t0 = b.resolve(E[h, 0], leaf(lay.A(i, 0)))
        R.append(b.resolve(t1, t0))
    return b.chain(R[0], R[1:])


def build_res_ub(p: FamilyParams) -> Proof:
    """Short resolution refutation: equality ladders, then the x-chain."""
    lay = gen_family(p)[1]
    b = ProofBuilder()
    _res_ub(b, lay, b.axiom)
    return b.build()


def res_ub_length(l: int, m: int, n: int) -> int:
    return l * (4 * n - 6) + 6 * m * l - 1


def _r1_constraint(b: ProofBuilder, lay: FamilyLayout, i: int) -> int:
    """Three merge lemmas ending in -x_{i-1} | x_i, rederiving the ladders."""
    h = lay.hat(i)
    t = []
    for pol in (1, 0):
        e = _eq_chain(b, lay, h, pol, b.axiom)
        t.append(b.resolve(e, b.axiom(lay.A(i, pol))))
        b.mark(t[-1])
    r = b.resolve(t[0], t[1])
    return r


def build_rml_r1(p: FamilyParams) -> Proof:
    """Tree-like RML refutation that rederives every equality clause."""
    lay = gen_family(p)[1]
    b = ProofBuilder()
    R = []
    for i in range(1, lay.num_constraints + 1):
        R.append(_r1_constraint(b, lay, i))
    if len(R) == 1:
        return b.build()
    for r in R:
        b.mark(r)
    b.chain(R[0], R[1:])
    return b.build()


def r1_length(l: int, m: int, n: int) -> int:
    ml = m * l
    return 2 * l * (n - 1) + 2 * ml + ml * (2 * n - 1) + ml - 1


def _r3_equality(b: ProofBuilder, lay: FamilyLayout, j: int, pol: int) -> int:
    """Derive the equality clause of block j (w_{j,1} | -w_{j,n} when pol=1)
    through the constraints, so that its last step is a merge over w_{j,1}."""
    ml, n = lay.num_constraints, lay.n
    second = j + lay.l
    R = {}
    for i in range(1, ml + 1):
        if i not in (j, second):
            R[i] = _r1_constraint(b, lay, i)
            b.mark(R[i])
    # -w_{j,n} (or w_{j,n}) with the constraint at j+l, a merge
    tb = b.axiom(lay.A(second, 1 - pol))
    for k in range(1, n):
        tb = b.resolve(tb, b.axiom(lay.B(j, k, pol)))
    b.mark(tb)
    cur = b.axiom(lay.B(j, 2, pol))
    for k in range(3, n):
        cur = b.resolve(cur, b.axiom(lay.B(j, k, pol)))
    cur = b.resolve(cur, b.axiom(lay.A(j, pol)))
    for i in range(j - 1, 0, -1):
        cur = b.resolve(cur, R[i])
    for i in range(j + 1, second):
        cur = b.resolve(cur, R[i])
    cur = b.resolve(cur, tb)
    for i in range(second + 1, ml + 1):
        cur = b.resolve(cur, R[i])
    cur = b.resolve(cur, b.axiom(lay.B(j, 1, pol)))
    b.mark(cur)
    return cur


def build_rml_r3(p: FamilyParams) -> Proof:
    """RML refutation that derives each equality clause once, as a merge, and
    reuses it for every constraint of its block."""
    if p.m < 2 or p.n < 3:
        raise ValueError("refutation 3 needs m >= 2 and n >= 3")
    lay = gen_family(p)[1]
    b = ProofBuilder()
    E = {}
    for j in range(1, p.l + 1):
        for pol in (1, 0):
            E[j, pol] = _r3_equality(b, lay, j, pol)
    R = []
    for i in range(1, lay.num_constraints + 1):
        h = lay.hat(i)
        t1 = b.resolve(E[h, 1], b.axiom(lay.A(i, 1)))
        t0 = b.resolve(E[h, 0], b.axiom(lay.A(i, 0)))
        b.mark(t1)
        b.mark(t0)
        R.append(b.resolve(t1, t0))
        b.mark(R[-1])
    b.chain(R[0], R[1:])
    return b.build()


def r3_length(l: int, m: int, n: int) -> int:
    ml = m * l
    per_eq = (ml - 2) * (2 * n - 1) + 2 * n + ml - 3
    return 2 * l * (n - 1) + 2 * ml + 2 * l * per_eq + 4 * ml - 1


# ---------------------------------------------------------------- variants

VARIANT_SYSTEMS = {("v1", "rma"), ("v2", "rml"), ("v2", "lrma"), ("v3", "lrml")}


def _variant_equality(b: ProofBuilder, lay: FamilyLayout, j: int, pol: int, system: str) -> int:
    v, n = lay.params.variant, lay.n
    B = lambda k: b.axiom(lay.B(j, k, pol))
    C = lambda t: b.axiom(lay.C(j, t))
    # polarity 1 uses the mirror clauses C3, C4 (v1, v2) or C2 (v3)
    if (v, system) == ("v1", "rma"):
        cur = b.resolve(B(1), C(4 if pol else 2))
        cur = b.resolve(cur, C(3 if pol else 1))
        return b.chain(cur, [B(k) for k in range(2, n)])
    if (v, system) == ("v2", "lrma"):
        cur = b.resolve(C(3 if pol else 1), C(4 if pol else 2))
        return b.chain(cur, [B(k) for k in range(2, n)])
    if (v, system) == ("v2", "rml"):
        if n == 2:
            return b.resolve(C(3 if pol else 1), C(4 if pol else 2))
        cur = b.chain(B(n - 1), [B(k) for k in range(n - 2, 1, -1)])
        cur = b.resolve(cur, C(3 if pol else 1))
        cur = b.resolve(cur, C(4 if pol else 2))
        return b.chain(cur, [B(k) for k in range(2, n)])
    if (v, system) == ("v3", "lrml"):
        cur = b.chain(C(2 if pol else 1), [B(k) for k in range(3, n)])
        return b.resolve(cur, B(1))
    raise ValueError(f"unsupported variant/system pair ({v}, {system})")


def build_variant_lemma_block(variant: str, i: int, polarity: int, p: FamilyParams,
                              system: str | None = None) -> Proof:
    """Input derivation of w_{i,1} | -w_{i,n} (polarity 1) or -w_{i,1} | w_{i,n}."""
    if p.variant != variant:
        raise ValueError(f"formula variant {p.variant} does not match {variant}")
    if system is None:
        system = {"v1": "rma", "v2": "rml", "v3": "lrml"}.get(variant)
    lay = gen_family(p)[1]
    b = ProofBuilder()
    _variant_equality(b, lay, i, polarity, system)
    return b.build()


def build_variant_refutation(variant: str, p: FamilyParams, system: str) -> Proof:
    system = system.lower()
    if (variant, system) not in VARIANT_SYSTEMS:
        raise ValueError(f"unsupported variant/system pair ({variant}, {system})")
    if p.variant != variant:
        raise ValueError(f"formula variant {p.variant} does not match {variant}")
    lay = gen_family(p)[1]
    b = ProofBuilder()
    E = {}
    for j in range(1, p.l + 1):
        for pol in (1, 0):
            E[j, pol] = _variant_equality(b, lay, j, pol, system)
            b.mark(E[j, pol])
    R = []
    for i in range(1, lay.num_constraints + 1):
        h = lay.hat(i)
        t0 = b.resolve(E[h, 0], b.axiom(lay.A(i, 0)))
        b.mark(t0)
        t1 = b.resolve(E[h, 1], b.axiom(lay.A(i, 1)))
        R.append(b.resolve(t1, t0))
        if lay.num_constraints > 1:
            b.mark(R[-1])
    if len(R) > 1:
        b.chain(R[0], R[1:])
    return b.build()


# ---------------------------------------------------------------- weakening

def build_weakening_refutation(p: FamilyParams) -> Proof:
    """Refute F and not z: weaken each used axiom by z, replay the short
    refutation (every step is then a merge over z), finish with not z."""
    f, lay, z = gen_weakening_base(p)
    b = ProofBuilder()
    cache = {}

    def leaf(c):
        if c not in cache:
            cache[c] = b.weaken(b.axiom(c), c.with_lits(z))
        return cache[c]

    root = _mark_all(b, lambda: _res_ub(b, lay, leaf))
    b.mark(root)
    b.resolve(root, b.axiom(Clause([-z])))
    return b.build()


def build_gn_derivation(p: FamilyParams) -> Proof:
    """Derivation of the unit z from G without weakening; every step merges z."""
    g, lay, z = gen_weakening_formula(p)
    b = ProofBuilder()
    _mark_all(b, lambda: _res_ub(b, lay, lambda c: b.axiom(c.with_lits(z))))
    return b.build()


def _mark_all(b: ProofBuilder, body) -> int:
    start = len(b._steps)
    root = body()
    for s in b._steps[start:]:
        if s.kind == "r" and s.id != root:
            b.mark(s.id)
    return root


# ---------------------------------------------------------------- sidecar

def write_layout(lay: FamilyLayout) -> str:
    p = lay.params
    lines = [f"params {p.l} {p.m} {p.n} {p.variant}"]
    for i in range(1, lay.num_x + 1):
        lines.append(f"x {i} {lay.x(i)}")
    for j in range(1, lay.l + 1):
        for k in range(1, lay.n + 1):
            lines.append(f"w {j} {k} {lay.w(j, k)}")
    if p.variant in ("v1", "v2"):
        for j in range(1, lay.l + 1):
            lines.append(f"z {j} {lay.z(j)}")
            lines.append(f"y {j} {lay.y(j)}")
    for name, v in lay.extra_vars.items():
        lines.append(f"extra {name} {v}")
    for idx, r in enumerate(lay.roles):
        lines.append("role " + str(idx) + " " + " ".join(map(str, r)))
    return "\n".join(lines) + "\n"


def parse_layout(text: str) -> FamilyLayout:
    lay = None
    roles, extra = [], {}
    for raw in text.splitlines():
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "params":
            lay = FamilyLayout(FamilyParams(int(parts[1]), int(parts[2]), int(parts[3]), parts[4]))
        elif lay is None:
            raise ValueError("layout must start with a params line")
        elif parts[0] == "x":
            if lay.x(int(parts[1])) != int(parts[2]):
                raise ValueError(f"layout mismatch at {raw!r}")
        elif parts[0] == "w":
            if lay.w(int(parts[1]), int(parts[2])) != int(parts[3]):
                raise ValueError(f"layout mismatch at {raw!r}")
        elif parts[0] in ("z", "y"):
            fn = lay.z if parts[0] == "z" else lay.y
            if fn(int(parts[1])) != int(parts[2]):
                raise ValueError(f"layout mismatch at {raw!r}")
        elif parts[0] == "extra":
            extra[parts[1]] = int(parts[2])
        elif parts[0] == "role":
            roles.append(tuple(t if not t.lstrip("-").isdigit() else int(t) for t in parts[2:]))
        else:
            raise ValueError(f"unknown layout line {raw!r}")
    if lay is None:
        raise ValueError("empty layout")
    lay.roles = roles
    lay.extra_vars = extra
    return lay
