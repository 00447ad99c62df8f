"""Clauses, CNF formulas, restrictions and the resolution rule.

Literals are signed DIMACS-style integers: ``v`` is the variable ``v`` and
``-v`` its negation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping


class InvalidResolution(ValueError):
    pass


class DimacsError(ValueError):
    pass


def lit_var(lit: int) -> int:
    return abs(lit)


def lit_sign(lit: int) -> int:
    """Polarity bit: 1 for a positive literal, 0 for a negated one."""
    return 1 if lit > 0 else 0


def make_lit(var: int, sign: int) -> int:
    if var < 1:
        raise ValueError(f"variable index must be >= 1, got {var}")
    return var if sign else -var


def _lit_key(lit: int):
    return (abs(lit), lit < 0)


class Clause:
    """An immutable duplicate-free set of literals, kept sorted by variable."""

    __slots__ = ("lits", "_set", "_hash")

    def __init__(self, lits: Iterable[int] = ()):
        s = frozenset(lits)
        if 0 in s:
            raise ValueError("0 is not a literal")
        self._set = s
        self.lits = tuple(sorted(s, key=_lit_key))
        self._hash = hash(s)

    @property
    def set(self) -> frozenset:
        return self._set

    @property
    def vars(self) -> frozenset:
        return frozenset(abs(l) for l in self._set)

    @property
    def tautology(self) -> bool:
        return any(-l in self._set for l in self._set if l > 0)

    def is_empty(self) -> bool:
        return not self._set

    def __len__(self):
        return len(self.lits)

    def __iter__(self):
        return iter(self.lits)

    def __contains__(self, lit):
        return lit in self._set

    def __eq__(self, other):
        if isinstance(other, Clause):
            return self._set == other._set
        return NotImplemented

    def __hash__(self):
        return self._hash

    def __le__(self, other: "Clause") -> bool:
        return self._set <= other._set

    def __lt__(self, other: "Clause") -> bool:
        return self._set < other._set

    def __or__(self, other: "Clause") -> "Clause":
        return Clause(self._set | other._set)

    def without(self, *lits: int) -> "Clause":
        return Clause(self._set.difference(lits))

    def with_lits(self, *lits: int) -> "Clause":
        return Clause(self._set.union(lits))

    def __repr__(self):
        return "[" + ",".join(map(str, self.lits)) + "]"


class _Satisfied:
    """The constant-true clause left in place of clauses a restriction satisfies."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    vars = frozenset()
    tautology = False

    def __repr__(self):
        return "1"

    def __reduce__(self):
        return (_Satisfied, ())


SATISFIED = _Satisfied()


def is_satisfied(c) -> bool:
    return c is SATISFIED


def _clash(a: Clause, b: Clause, pivot: int):
    """Return the literal of ``a`` on ``pivot`` after checking the clash."""
    if pivot in a and -pivot in b:
        return pivot
    if -pivot in a and pivot in b:
        return -pivot
    raise InvalidResolution(f"{a} and {b} do not clash on variable {pivot}")


def resolve(a: Clause, b: Clause, pivot: int) -> Clause:
    if is_satisfied(a) or is_satisfied(b):
        raise InvalidResolution("the satisfied clause cannot be resolved")
    pivot = abs(pivot)
    lit = _clash(a, b, pivot)
    return Clause((a.set - {lit}) | (b.set - {-lit}))


def is_merge(a: Clause, b: Clause, pivot: int) -> bool:
    pivot = abs(pivot)
    lit = _clash(a, b, pivot)
    return not (a.set - {lit}).isdisjoint(b.set - {-lit})


def clashing_vars(a: Clause, b: Clause) -> list[int]:
    return sorted(abs(l) for l in a.set if -l in b.set)


def implies(a, c) -> bool:
    """Single-clause implication ``a |= c``.

    For clauses this is exact: ``c`` is a tautology or ``a`` is a subset of ``c``.
    """
    if is_satisfied(c):
        return True
    if c.tautology:
        return True
    if is_satisfied(a):
        return False
    return a.set <= c.set


def implies2(a, b, c) -> bool:
    """Exact test for ``a & b |= c`` over clauses (or the satisfied clause)."""
    if implies(a, c) or implies(b, c):
        return True
    if is_satisfied(a) or is_satisfied(b):
        return False
    piv = clashing_vars(a, b)
    if len(piv) != 1:
        return False
    return resolve(a, b, piv[0]).set <= c.set


class Restriction:
    """Partial substitution of variables by constants or by other variables.

    Unassigned variables stay free (the ``*`` value). A variable may also be
    mapped to a literal over another variable, which is how variables are
    identified with each other.
    """

    __slots__ = ("_map",)

    def __init__(self, mapping: Mapping[int, object] | None = None):
        m = {}
        for v, val in (mapping or {}).items():
            v = int(v)
            if v < 1:
                raise ValueError(f"bad variable {v}")
            if val == "*" or val is None:
                continue
            if isinstance(val, bool):
                val = int(val)
            if not isinstance(val, int):
                raise ValueError(f"bad restriction value {val!r}")
            if val in (0, 1) and not isinstance(val, bool):
                m[v] = ("c", val)
            else:
                raise ValueError(f"bad restriction value {val!r}")
        self._map = m

    @classmethod
    def with_renaming(cls, constants: Mapping[int, int], renaming: Mapping[int, int]):
        """Constants plus a map ``var -> literal`` identifying variables."""
        r = cls(constants)
        for v, lit in renaming.items():
            if v in r._map:
                raise ValueError(f"variable {v} assigned twice")
            if lit == v:
                continue
            r._map[int(v)] = ("l", int(lit))
        return r

    def value(self, var: int):
        """0, 1, a literal (for renamed variables) or ``'*'``."""
        e = self._map.get(var)
        if e is None:
            return "*"
        return e[1] if e[0] == "c" else ("lit", e[1])

    def lit(self, lit: int):
        """Image of a literal: True, False, or a literal."""
        e = self._map.get(abs(lit))
        if e is None:
            return lit
        kind, val = e
        if kind == "c":
            return bool(val) == (lit > 0)
        return val if lit > 0 else -val

    def assigned(self) -> dict[int, int]:
        return {v: e[1] for v, e in self._map.items() if e[0] == "c"}

    def renamed(self) -> dict[int, int]:
        return {v: e[1] for v, e in self._map.items() if e[0] == "l"}

    def touches(self, c: Clause) -> bool:
        return any(abs(l) in self._map for l in c)

    def __len__(self):
        return len(self._map)

    def __eq__(self, other):
        return isinstance(other, Restriction) and self._map == other._map

    def __repr__(self):
        parts = []
        for v in sorted(self._map):
            kind, val = self._map[v]
            parts.append(f"{v}->{val}" if kind == "c" else f"{v}->x{val}")
        return "Restriction{" + ", ".join(parts) + "}"


def apply_restriction(c, rho: Restriction):
    """Restrict a clause; returns SATISFIED or the simplified clause.

    A clause that becomes tautological through variable identification is
    satisfied as well.
    """
    if is_satisfied(c):
        return SATISFIED
    out = set()
    for l in c:
        img = rho.lit(l)
        if img is True:
            return SATISFIED
        if img is False:
            continue
        out.add(img)
    res = Clause(out)
    if res.tautology and not c.tautology:
        return SATISFIED
    return res


@dataclass(frozen=True)
class CnfFormula:
    clauses: tuple = ()
    num_vars: int = 0

    def __post_init__(self):
        cl = tuple(c if isinstance(c, Clause) else Clause(c) for c in self.clauses)
        object.__setattr__(self, "clauses", cl)
        for c in cl:
            for l in c:
                if abs(l) > self.num_vars:
                    raise DimacsError(f"literal {l} out of range (num_vars={self.num_vars})")

    @classmethod
    def from_lists(cls, clauses, num_vars: int | None = None) -> "CnfFormula":
        cl = [Clause(c) for c in clauses]
        if num_vars is None:
            num_vars = max((abs(l) for c in cl for l in c), default=0)
        return cls(tuple(cl), num_vars)

    def __len__(self):
        return len(self.clauses)

    def __iter__(self):
        return iter(self.clauses)

    def __getitem__(self, i):
        return self.clauses[i]

    def clause_set(self) -> frozenset:
        return frozenset(self.clauses)

    def index_of(self, c: Clause) -> int | None:
        for i, d in enumerate(self.clauses):
            if d == c:
                return i
        return None

    def restrict(self, rho: Restriction, keep_satisfied: bool = False) -> "CnfFormula":
        out = []
        for c in self.clauses:
            r = apply_restriction(c, rho)
            if is_satisfied(r):
                continue
            out.append(r)
        return CnfFormula(tuple(out), self.num_vars)


def parse_dimacs(text: str) -> CnfFormula:
    num_vars = num_clauses = None
    clauses = []
    cur: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: malformed header {line!r}")
            try:
                num_vars, num_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"line {lineno}: malformed header {line!r}") from None
            if num_vars < 0 or num_clauses < 0:
                raise DimacsError(f"line {lineno}: negative counts in header")
            continue
        if num_vars is None:
            raise DimacsError(f"line {lineno}: clause before header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"line {lineno}: bad token {tok!r}") from None
            if lit == 0:
                clauses.append(Clause(cur))
                cur = []
            else:
                if abs(lit) > num_vars:
                    raise DimacsError(f"line {lineno}: literal {lit} out of range")
                cur.append(lit)
    if num_vars is None:
        raise DimacsError("missing 'p cnf' header")
    if cur:
        raise DimacsError("last clause is missing its terminating 0")
    if len(clauses) != num_clauses:
        raise DimacsError(f"header announces {num_clauses} clauses, found {len(clauses)}")
    return CnfFormula(tuple(clauses), num_vars)


def write_dimacs(f: CnfFormula, comments: Iterable[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {f.num_vars} {len(f.clauses)}")
    for c in f.clauses:
        lines.append(" ".join(map(str, c.lits + (0,))))
    return "\n".join(lines) + "\n"
