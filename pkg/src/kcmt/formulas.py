"""Hash-consed formula DAGs over theory atoms.

The central structure is `Dag`, an arena of interned formula nodes. Leaves are
arbitrary hashable keys with a polarity, so the same engine serves three roles:

* T-formulas: leaves are `Atom` objects (Boolean propositions or normalized
  linear-rational constraints);
* Boolean abstractions: leaves are 1-based variable indices;
* compiled circuits: the compiler's output lives in the same propositional
  arena as its input, so residual handles double as exact cache keys.

Structurally identical subtrees always intern to the same handle. Constructors
flatten nested same-operator children, fold constants (psi AND top -> psi,
psi AND bot -> bot, and the duals), drop duplicate children, and push negation
into literals, so downstream code only ever sees simplified nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Hashable, Iterable, Iterator, Mapping


class AtomError(ValueError):
    """Raised when an atom cannot be normalized (degenerate constraint)."""


class AbstractionError(KeyError):
    """Raised when a formula mentions an atom outside the given atom set."""


# Relations kept in normal form. >= and > are rewritten at construction.
REL_LE = "<="
REL_LT = "<"
REL_EQ = "="
_RELATIONS = (REL_LE, REL_LT, REL_EQ)


@dataclass(frozen=True)
class Atom:
    """A Boolean proposition or a normalized linear-rational constraint.

    LRA atoms are stored as `coeffs rel const` with:
      * coeffs: tuple of (variable, integer coefficient), sorted by variable,
        no zeros, scaled to coprime integers;
      * rel in {<=, <, =}; inputs with >= or > have the term negated instead;
      * for = atoms the lexicographically-first variable's coefficient is
        positive (the only relation where the sign is a free choice);
      * the constant scales along with the coefficients and stays rational.

    Two atoms are equal iff their normal forms are identical. A constraint
    with no variables (trivially true or false) is rejected: the framework
    assumes no atom is by itself T-valid or T-inconsistent.
    """

    kind: str  # "bool" | "lra"
    name: str = ""
    coeffs: tuple = ()
    rel: str = ""
    const: Fraction = Fraction(0)

    @staticmethod
    def boolean(name: str) -> "Atom":
        if not name:
            raise AtomError("Boolean atom needs a non-empty name")
        return Atom(kind="bool", name=name)

    @staticmethod
    def linear(coeffs: Mapping[str, object], rel: str, const: object) -> "Atom":
        c = {v: Fraction(a) for v, a in coeffs.items() if Fraction(a) != 0}
        k = Fraction(const)
        if rel in (">=", ">"):
            c = {v: -a for v, a in c.items()}
            k = -k
            rel = REL_LE if rel == ">=" else REL_LT
        if rel not in _RELATIONS:
            raise AtomError("unknown relation %r" % (rel,))
        if not c:
            raise AtomError(
                "degenerate atom (no variables left): 0 %s %s is trivially "
                "true or false and may not be an atom" % (rel, k)
            )
        scale = 1
        for a in c.values():
            scale = scale * a.denominator // gcd(scale, a.denominator)
        ints = {v: int(a * scale) for v, a in c.items()}
        g = 0
        for a in ints.values():
            g = gcd(g, abs(a))
        ints = {v: a // g for v, a in ints.items()}
        k = k * scale / g
        names = sorted(ints)
        if rel == REL_EQ and ints[names[0]] < 0:
            ints = {v: -a for v, a in ints.items()}
            k = -k
        return Atom(
            kind="lra",
            coeffs=tuple((v, ints[v]) for v in names),
            rel=rel,
            const=k,
        )

    def sort_key(self):
        if self.kind == "bool":
            return (0, self.name, "", ())
        return (1, self.rel, str(self.const), self.coeffs)

    def variables(self) -> tuple:
        return tuple(v for v, _ in self.coeffs)

    def __str__(self) -> str:
        if self.kind == "bool":
            return self.name
        parts = []
        for i, (v, a) in enumerate(self.coeffs):
            if i == 0:
                if a == 1:
                    parts.append(v)
                elif a == -1:
                    parts.append("-" + v)
                else:
                    parts.append("%d*%s" % (a, v))
            else:
                sign = "+" if a > 0 else "-"
                mag = abs(a)
                parts.append("%s %s" % (sign, v if mag == 1 else "%d*%s" % (mag, v)))
        k = self.const
        kstr = str(k.numerator) if k.denominator == 1 else "%d/%d" % (k.numerator, k.denominator)
        return "%s %s %s" % (" ".join(parts), self.rel, kstr)


class AtomSet:
    """Ordered, duplicate-free set of atoms; order fixes abstraction indices."""

    def __init__(self, atoms: Iterable[Atom] = ()):
        self._atoms: list[Atom] = []
        self._index: dict[Atom, int] = {}
        for a in atoms:
            self.add(a)

    def add(self, atom: Atom) -> None:
        if atom not in self._index:
            self._index[atom] = len(self._atoms)
            self._atoms.append(atom)

    def union(self, other: "AtomSet") -> "AtomSet":
        out = AtomSet(self._atoms)
        for a in other:
            out.add(a)
        return out

    def __contains__(self, atom: Atom) -> bool:
        return atom in self._index

    def __iter__(self) -> Iterator[Atom]:
        return iter(self._atoms)

    def __len__(self) -> int:
        return len(self._atoms)

    def __getitem__(self, i: int) -> Atom:
        return self._atoms[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, AtomSet) and self._atoms == other._atoms

    def position(self, atom: Atom) -> int:
        return self._index[atom]

    def __repr__(self) -> str:
        return "AtomSet([%s])" % ", ".join(str(a) for a in self._atoms)


class AbstractionMap:
    """Dense 1-based bijection between atoms and propositional variables."""

    def __init__(self, alpha: AtomSet):
        self.alpha = alpha
        self._by_atom = {a: i + 1 for i, a in enumerate(alpha)}
        self._by_index = {i + 1: a for i, a in enumerate(alpha)}

    def index(self, atom: Atom) -> int:
        try:
            return self._by_atom[atom]
        except KeyError:
            raise AbstractionError("atom not in the abstraction: %s" % atom)

    def atom(self, index: int) -> Atom:
        try:
            return self._by_index[index]
        except KeyError:
            raise AbstractionError("no atom with index %d" % index)

    def __len__(self) -> int:
        return len(self._by_atom)

    def __eq__(self, other) -> bool:
        return isinstance(other, AbstractionMap) and self.alpha == other.alpha


class Assignment:
    """Immutable truth assignment over atoms (possibly partial)."""

    __slots__ = ("_items", "_hash")

    def __init__(self, mapping: Mapping[Atom, bool] | Iterable[tuple[Atom, bool]]):
        items = dict(mapping)
        self._items = tuple(sorted(items.items(), key=lambda kv: kv[0].sort_key()))
        self._hash = hash(self._items)

    def value(self, atom: Atom) -> bool:
        for a, v in self._items:
            if a == atom:
                return v
        raise KeyError(atom)

    def get(self, atom: Atom, default=None):
        for a, v in self._items:
            if a == atom:
                return v
        return default

    def atoms(self) -> tuple[Atom, ...]:
        return tuple(a for a, _ in self._items)

    def items(self) -> tuple[tuple[Atom, bool], ...]:
        return self._items

    def as_dict(self) -> dict[Atom, bool]:
        return dict(self._items)

    def is_total_over(self, alpha: AtomSet) -> bool:
        assigned = {a for a, _ in self._items}
        return len(assigned) == len(alpha) and all(a in assigned for a in alpha)

    def extends(self, other: "Assignment") -> bool:
        mine = dict(self._items)
        return all(mine.get(a) == v for a, v in other._items)

    def __len__(self) -> int:
        return len(self._items)

    def __eq__(self, other) -> bool:
        return isinstance(other, Assignment) and self._items == other._items

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return " & ".join(("" if v else "!") + str(a) for a, v in self._items)

    __repr__ = __str__


# Node kind tags inside a Dag.
TRUE_KIND = "T"
FALSE_KIND = "F"
LIT = "L"
AND = "&"
OR = "|"
NOT = "~"
IFF = "<->"
IMPLIES = "->"


class Dag:
    """Arena of hash-consed formula nodes over arbitrary leaf keys."""

    def __init__(self):
        self._payload: list[tuple] = []
        self._table: dict[tuple, int] = {}
        self._keys: list[frozenset | None] = []
        self._nnf_memo: dict[tuple[int, bool], int] = {}
        self.TRUE = self._intern((TRUE_KIND,))
        self.FALSE = self._intern((FALSE_KIND,))

    # -- interning ---------------------------------------------------------

    def _intern(self, payload: tuple) -> int:
        node = self._table.get(payload)
        if node is None:
            node = len(self._payload)
            self._payload.append(payload)
            self._table[payload] = node
            self._keys.append(None)
        return node

    def lit(self, key: Hashable, positive: bool = True) -> int:
        return self._intern((LIT, key, bool(positive)))

    def _junction(self, op: str, children: Iterable[int], unit: int, zero: int) -> int:
        flat: list[int] = []
        seen: set[int] = set()
        for c in children:
            if c == unit:
                continue
            if c == zero:
                return zero
            if self._payload[c][0] == op:
                grand = self._payload[c][1]
            else:
                grand = (c,)
            for g in grand:
                if g not in seen:
                    seen.add(g)
                    flat.append(g)
        if not flat:
            return unit
        if len(flat) == 1:
            return flat[0]
        return self._intern((op, tuple(flat)))

    def and_(self, children: Iterable[int]) -> int:
        return self._junction(AND, children, self.TRUE, self.FALSE)

    def or_(self, children: Iterable[int]) -> int:
        return self._junction(OR, children, self.FALSE, self.TRUE)

    def not_(self, child: int) -> int:
        p = self._payload[child]
        if p[0] == TRUE_KIND:
            return self.FALSE
        if p[0] == FALSE_KIND:
            return self.TRUE
        if p[0] == LIT:
            return self.lit(p[1], not p[2])
        if p[0] == NOT:
            return p[1]
        return self._intern((NOT, child))

    def iff(self, a: int, b: int) -> int:
        if a == b:
            return self.TRUE
        if a == self.TRUE:
            return b
        if b == self.TRUE:
            return a
        if a == self.FALSE:
            return self.not_(b)
        if b == self.FALSE:
            return self.not_(a)
        return self._intern((IFF, a, b))

    def implies(self, a: int, b: int) -> int:
        if a == self.TRUE:
            return b
        if a == self.FALSE or b == self.TRUE or a == b:
            return self.TRUE
        if b == self.FALSE:
            return self.not_(a)
        return self._intern((IMPLIES, a, b))

    # -- accessors ---------------------------------------------------------

    def kind(self, node: int) -> str:
        return self._payload[node][0]

    def children(self, node: int) -> tuple[int, ...]:
        p = self._payload[node]
        if p[0] in (AND, OR):
            return p[1]
        if p[0] == NOT:
            return (p[1],)
        if p[0] in (IFF, IMPLIES):
            return (p[1], p[2])
        return ()

    def leaf(self, node: int) -> tuple[Hashable, bool]:
        p = self._payload[node]
        if p[0] != LIT:
            raise ValueError("node %d is not a literal" % node)
        return p[1], p[2]

    def is_nnf(self, node: int) -> bool:
        p = self._payload[node]
        if p[0] in (NOT, IFF, IMPLIES):
            return False
        return all(self.is_nnf(c) for c in self.children(node))

    def __len__(self) -> int:
        return len(self._payload)

    def keys_of(self, node: int) -> frozenset:
        """Set of leaf keys reachable from `node` (cached per node)."""
        cached = self._keys[node]
        if cached is not None:
            return cached
        stack: list[tuple[int, bool]] = [(node, False)]
        while stack:
            n, ready = stack.pop()
            if self._keys[n] is not None:
                continue
            if not ready:
                stack.append((n, True))
                stack.extend((c, False) for c in self.children(n))
                continue
            p = self._payload[n]
            if p[0] == LIT:
                self._keys[n] = frozenset((p[1],))
            else:
                kids = self.children(n)
                self._keys[n] = (
                    frozenset().union(*(self._keys[c] for c in kids))
                    if kids else frozenset()
                )
        return self._keys[node]

    # -- transformations ---------------------------------------------------

    def to_nnf(self, node: int) -> int:
        """Push negations to literals, eliminating NOT/IFF/IMPLIES nodes."""
        return self._nnf(node, True)

    def negate(self, node: int) -> int:
        """NNF of the negation."""
        return self._nnf(node, False)

    def _nnf(self, node: int, positive: bool) -> int:
        memo = self._nnf_memo
        key = (node, positive)
        out = memo.get(key)
        if out is not None:
            return out
        p = self._payload[node]
        tag = p[0]
        if tag == TRUE_KIND:
            out = self.TRUE if positive else self.FALSE
        elif tag == FALSE_KIND:
            out = self.FALSE if positive else self.TRUE
        elif tag == LIT:
            out = node if positive else self.lit(p[1], not p[2])
        elif tag == AND:
            parts = [self._nnf(c, positive) for c in p[1]]
            out = self.and_(parts) if positive else self.or_(parts)
        elif tag == OR:
            parts = [self._nnf(c, positive) for c in p[1]]
            out = self.or_(parts) if positive else self.and_(parts)
        elif tag == NOT:
            out = self._nnf(p[1], not positive)
        elif tag == IMPLIES:
            if positive:
                out = self.or_([self._nnf(p[1], False), self._nnf(p[2], True)])
            else:
                out = self.and_([self._nnf(p[1], True), self._nnf(p[2], False)])
        elif tag == IFF:
            at, bt = self._nnf(p[1], True), self._nnf(p[2], True)
            af, bf = self._nnf(p[1], False), self._nnf(p[2], False)
            if positive:
                out = self.or_([self.and_([at, bt]), self.and_([af, bf])])
            else:
                out = self.or_([self.and_([at, bf]), self.and_([af, bt])])
        else:
            raise ValueError("unknown node tag %r" % tag)
        memo[key] = out
        return out

    def residual(self, node: int, values: Mapping[Hashable, bool]) -> int:
        """Substitute assigned leaves by constants and propagate.

        The result never mentions an assigned key, and
        residual(phi, mu + l) == residual(residual(phi, mu), l).
        """
        memo: dict[int, int] = {}

        def rec(n: int) -> int:
            out = memo.get(n)
            if out is not None:
                return out
            p = self._payload[n]
            tag = p[0]
            if tag in (TRUE_KIND, FALSE_KIND):
                out = n
            elif tag == LIT:
                v = values.get(p[1])
                if v is None:
                    out = n
                else:
                    out = self.TRUE if v == p[2] else self.FALSE
            elif tag == AND:
                out = self.and_([rec(c) for c in p[1]])
            elif tag == OR:
                out = self.or_([rec(c) for c in p[1]])
            elif tag == NOT:
                out = self.not_(rec(p[1]))
            elif tag == IMPLIES:
                out = self.implies(rec(p[1]), rec(p[2]))
            else:
                out = self.iff(rec(p[1]), rec(p[2]))
            memo[n] = out
            return out

        return rec(node)

    def evaluate(self, node: int, values: Mapping[Hashable, bool]) -> bool:
        memo: dict[int, bool] = {}

        def rec(n: int) -> bool:
            out = memo.get(n)
            if out is not None:
                return out
            p = self._payload[n]
            tag = p[0]
            if tag == TRUE_KIND:
                out = True
            elif tag == FALSE_KIND:
                out = False
            elif tag == LIT:
                out = values[p[1]] == p[2]
            elif tag == AND:
                out = all(rec(c) for c in p[1])
            elif tag == OR:
                out = any(rec(c) for c in p[1])
            elif tag == NOT:
                out = not rec(p[1])
            elif tag == IMPLIES:
                out = (not rec(p[1])) or rec(p[2])
            else:
                out = rec(p[1]) == rec(p[2])
            memo[n] = out
            return out

        return rec(node)

    def truth_bits(self, node: int, order: list) -> int:
        """Truth table as a bitmask over all 2^len(order) assignments.

        Bit b gives the value under the assignment where key order[j] is
        true iff bit j of b is set. One DAG pass, bitwise ops throughout.
        """
        n = len(order)
        width = 1 << n
        full = (1 << width) - 1
        cols: dict[Hashable, int] = {}
        for j, key in enumerate(order):
            block = 1 << j
            m = ((1 << block) - 1) << block  # ones where bit j is set
            span = 2 * block
            while span < width:
                m |= m << span
                span *= 2
            cols[key] = m
        memo: dict[int, int] = {}

        def rec(nd: int) -> int:
            out = memo.get(nd)
            if out is not None:
                return out
            p = self._payload[nd]
            tag = p[0]
            if tag == TRUE_KIND:
                out = full
            elif tag == FALSE_KIND:
                out = 0
            elif tag == LIT:
                out = cols[p[1]] if p[2] else (full & ~cols[p[1]])
            elif tag == AND:
                out = full
                for c in p[1]:
                    out &= rec(c)
            elif tag == OR:
                out = 0
                for c in p[1]:
                    out |= rec(c)
            elif tag == NOT:
                out = full & ~rec(p[1])
            elif tag == IMPLIES:
                out = (full & ~rec(p[1])) | rec(p[2])
            else:
                out = full & ~(rec(p[1]) ^ rec(p[2]))
            memo[nd] = out
            return out

        return rec(node)

    def structurally_equal(self, node: int, other: "Dag", other_node: int) -> bool:
        """Positional structural equality across arenas."""
        memo: dict[tuple[int, int], bool] = {}

        def rec(a: int, b: int) -> bool:
            key = (a, b)
            out = memo.get(key)
            if out is not None:
                return out
            pa, pb = self._payload[a], other._payload[b]
            if pa[0] != pb[0]:
                out = False
            elif pa[0] == LIT:
                out = pa[1] == pb[1] and pa[2] == pb[2]
            else:
                ca, cb = self.children(a), other.children(b)
                out = len(ca) == len(cb) and all(rec(x, y) for x, y in zip(ca, cb))
            memo[key] = out
            return out

        return rec(node, other_node)


# -- T-formula layer -------------------------------------------------------


def atoms_of(dag: Dag, node: int) -> AtomSet:
    """Atoms reachable from `node`, in first-occurrence DFS order."""
    out = AtomSet()
    seen: set[int] = set()

    def rec(n: int) -> None:
        if n in seen:
            return
        seen.add(n)
        if dag.kind(n) == LIT:
            out.add(dag.leaf(n)[0])
            return
        for c in dag.children(n):
            rec(c)

    rec(node)
    return out


def abstract(fdag: Dag, node: int, alpha: AtomSet, pdag: Dag) -> tuple[int, AbstractionMap]:
    """Boolean abstraction: same DAG shape, atoms replaced by their index."""
    for a in atoms_of(fdag, node):
        if a not in alpha:
            raise AbstractionError("formula atom missing from the atom set: %s" % a)
    amap = AbstractionMap(alpha)
    memo: dict[int, int] = {}

    def rec(n: int) -> int:
        out = memo.get(n)
        if out is not None:
            return out
        tag = fdag.kind(n)
        if tag == TRUE_KIND:
            out = pdag.TRUE
        elif tag == FALSE_KIND:
            out = pdag.FALSE
        elif tag == LIT:
            atom, pol = fdag.leaf(n)
            out = pdag.lit(amap.index(atom), pol)
        elif tag == AND:
            out = pdag.and_([rec(c) for c in fdag.children(n)])
        elif tag == OR:
            out = pdag.or_([rec(c) for c in fdag.children(n)])
        elif tag == NOT:
            out = pdag.not_(rec(fdag.children(n)[0]))
        elif tag == IMPLIES:
            a, b = fdag.children(n)
            out = pdag.implies(rec(a), rec(b))
        else:
            a, b = fdag.children(n)
            out = pdag.iff(rec(a), rec(b))
        memo[n] = out
        return out

    return rec(node), amap


def refine(pdag: Dag, node: int, amap: AbstractionMap, fdag: Dag) -> int:
    """Inverse of abstract: indices replaced by their atoms."""
    memo: dict[int, int] = {}

    def rec(n: int) -> int:
        out = memo.get(n)
        if out is not None:
            return out
        tag = pdag.kind(n)
        if tag == TRUE_KIND:
            out = fdag.TRUE
        elif tag == FALSE_KIND:
            out = fdag.FALSE
        elif tag == LIT:
            idx, pol = pdag.leaf(n)
            out = fdag.lit(amap.atom(idx), pol)
        elif tag == AND:
            out = fdag.and_([rec(c) for c in pdag.children(n)])
        elif tag == OR:
            out = fdag.or_([rec(c) for c in pdag.children(n)])
        elif tag == NOT:
            out = fdag.not_(rec(pdag.children(n)[0]))
        elif tag == IMPLIES:
            a, b = pdag.children(n)
            out = fdag.implies(rec(a), rec(b))
        else:
            a, b = pdag.children(n)
            out = fdag.iff(rec(a), rec(b))
        memo[n] = out
        return out

    return rec(node)
