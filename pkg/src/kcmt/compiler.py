"""Compilation into deterministic decomposable circuits and the
theory-aware artifact pipelines built on top of it.

The propositional core turns an NNF input into a decision-DNNF: a DAG
whose AND nodes split over disjoint atom sets and whose OR nodes are
binary decisions on one variable. Smoothing pads decision branches so
every OR ranges over the same atoms, which makes model counting a
single bottom-up pass.

The two pipelines conjoin (`build_tred`) or disjoin (`build_text`) the
clausal lemmas produced by `enumerate_lemmas` before compiling, so the
propositional models of the output coincide with the theory-consistent
models of the input. `build_tred` keeps exactly the consistent models;
`build_text` adds every inconsistent total assignment instead. The same
pipelines can also target a reduced ordered BDD backend, whose
canonicity gives constant-time equivalence checks downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .formulas import (AND, FALSE_KIND, LIT, OR, TRUE_KIND, AbstractionMap,
                       AtomSet, Dag, abstract, atoms_of)
from .lemmas import (TARGET_FORMULA, TARGET_NEGATION, TARGET_TOP, LemmaSet,
                     abstract_clauses, enumerate_lemmas)
from .obdd import ObddManager, ObddRef, from_formula

MODE_T_REDUCED = "tReduced"
MODE_T_EXTENDED = "tExtended"

KIND_DDNNF = "ddnnf"
KIND_OBDD = "obdd"


class CompileError(ValueError):
    """Unusable compiler input (non-NNF node, bad order, bad scope)."""


def partition(pdag: Dag, node: int) -> list[int]:
    """Split a conjunction into connected components of the incidence
    graph linking conjuncts that share an atom.

    Returns one node per component, the conjunction of its conjuncts,
    ordered by each component's first conjunct. Non-AND nodes form a
    single component.
    """
    if pdag.kind(node) != AND:
        return [node]
    kids = pdag.children(node)
    parent = list(range(len(kids)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    holder: dict = {}
    for i, child in enumerate(kids):
        for key in pdag.keys_of(child):
            if key in holder:
                parent[find(i)] = find(holder[key])
            else:
                holder[key] = i
    groups: dict[int, list[int]] = {}
    for i in range(len(kids)):
        groups.setdefault(find(i), []).append(i)
    ordered = sorted(groups.values(), key=lambda g: g[0])
    return [kids[g[0]] if len(g) == 1 else pdag.and_([kids[i] for i in g])
            for g in ordered]


def select_literal(pdag: Dag, node: int) -> int:
    """Positive literal of the most frequently referenced variable.

    Frequency counts literal occurrences in child slots of the nodes
    reachable from `node` (each DAG node once), plus the node itself if
    it is a literal. Ties break toward the lowest variable index.
    """
    tag = pdag.kind(node)
    if tag in (TRUE_KIND, FALSE_KIND):
        raise CompileError("a constant mentions no variable")
    counts: dict = {}

    def bump(lit_node: int) -> None:
        var, _ = pdag.leaf(lit_node)
        counts[var] = counts.get(var, 0) + 1

    if tag == LIT:
        bump(node)
    else:
        seen = set()
        stack = [node]
        while stack:
            n = stack.pop()
            if n in seen or pdag.kind(n) == LIT:
                continue
            seen.add(n)
            for child in pdag.children(n):
                if pdag.kind(child) == LIT:
                    bump(child)
                else:
                    stack.append(child)
    best = min(counts, key=lambda v: (-counts[v], v))
    return pdag.lit(best, True)


def compile_ddnnf(pdag: Dag, node: int, use_cache: bool = True) -> int:
    """Compile an NNF node into a decision-DNNF in the same arena.

    Branching order: assert a literal conjunct when one exists, split
    independent components, otherwise decide the selected variable and
    recurse on both residuals. Residuals are hash-consed, so the cache
    is keyed on node handles; `use_cache=False` disables it (the result
    must stay equivalent, only slower to build).
    """
    if not pdag.is_nnf(node):
        raise CompileError("compilation input must be in negation normal form")
    cache: dict[int, int] = {}

    def comp(n: int) -> int:
        if use_cache and n in cache:
            return cache[n]
        out = step(n)
        if use_cache:
            cache[n] = out
        return out

    def step(n: int) -> int:
        tag = pdag.kind(n)
        if tag in (TRUE_KIND, FALSE_KIND, LIT):
            return n
        if tag == AND:
            for child in pdag.children(n):
                if pdag.kind(child) == LIT:
                    var, pol = pdag.leaf(child)
                    rest = comp(pdag.residual(n, {var: pol}))
                    return pdag.and_([child, rest])
            parts = partition(pdag, n)
            if len(parts) > 1:
                return pdag.and_([comp(p) for p in parts])
        var, _ = pdag.leaf(select_literal(pdag, n))
        hi = comp(pdag.residual(n, {var: True}))
        lo = comp(pdag.residual(n, {var: False}))
        return pdag.or_([pdag.and_([pdag.lit(var, True), hi]),
                         pdag.and_([pdag.lit(var, False), lo])])

    return comp(node)


def smooth(pdag: Dag, node: int, scope=None) -> int:
    """Pad decision branches so every OR ranges over the same atoms.

    `scope` widens the root: an int n pads it to variables 1..n, an
    iterable pads it to that set, None leaves the root's own atom set.
    Padding conjoins `v or not v` gadgets in ascending variable order.
    """
    if not pdag.is_nnf(node):
        raise CompileError("smoothing input must be in negation normal form")
    if scope is None:
        target = pdag.keys_of(node)
    elif isinstance(scope, int):
        target = frozenset(range(1, scope + 1))
    else:
        target = frozenset(scope)
    if not pdag.keys_of(node) <= target:
        raise CompileError("smoothing scope must cover the node's variables")

    def pad(n: int, missing) -> int:
        if not missing:
            return n
        gadgets = [pdag.or_([pdag.lit(v, True), pdag.lit(v, False)])
                   for v in sorted(missing)]
        return pdag.and_([n] + gadgets)

    memo: dict[int, int] = {}

    def rec(n: int) -> int:
        out = memo.get(n)
        if out is not None:
            return out
        tag = pdag.kind(n)
        if tag in (TRUE_KIND, FALSE_KIND, LIT):
            out = n
        elif tag == AND:
            out = pdag.and_([rec(c) for c in pdag.children(n)])
        else:
            kids = pdag.children(n)
            union = frozenset().union(*(pdag.keys_of(c) for c in kids))
            out = pdag.or_([pad(rec(c), union - pdag.keys_of(c))
                            for c in kids])
        memo[n] = out
        return out

    body = rec(node)
    return pad(body, target - pdag.keys_of(body))


@dataclass
class ValidationReport:
    decomposable: bool
    deterministic: bool
    smooth: bool
    first_violation: str | None = None


def _asserted_literals(pdag: Dag, node: int) -> set:
    """Literals a branch asserts: itself, or its direct AND conjuncts."""
    if pdag.kind(node) == LIT:
        return {pdag.leaf(node)}
    if pdag.kind(node) == AND:
        return {pdag.leaf(c) for c in pdag.children(node)
                if pdag.kind(c) == LIT}
    return set()


def validate(pdag: Dag, node: int, nvars: int | None = None) -> ValidationReport:
    """Check decomposability, determinism, and smoothness of an NNF node.

    Determinism here is the decision discipline: every OR must be a
    binary decision whose branches assert complementary literals of one
    variable. With `nvars`, smoothness additionally requires the root
    to range over variables 1..nvars exactly.
    """
    if not pdag.is_nnf(node):
        raise CompileError("validation input must be in negation normal form")
    report = ValidationReport(True, True, True)
    violations: list[str] = []

    seen = set()
    stack = [node]
    nodes = []
    while stack:
        n = stack.pop()
        if n in seen:
            continue
        seen.add(n)
        nodes.append(n)
        stack.extend(pdag.children(n))
    nodes.sort()

    for n in nodes:
        tag = pdag.kind(n)
        if tag == AND and report.decomposable:
            used: set = set()
            for child in pdag.children(n):
                keys = pdag.keys_of(child)
                if used & keys:
                    report.decomposable = False
                    violations.append(
                        "conjunction %d shares atoms between conjuncts" % n)
                    break
                used |= keys
        if tag == OR and report.deterministic:
            kids = pdag.children(n)
            decided = False
            if len(kids) == 2:
                left = _asserted_literals(pdag, kids[0])
                right = _asserted_literals(pdag, kids[1])
                decided = any((v, not p) in right for v, p in left)
            if not decided:
                report.deterministic = False
                violations.append(
                    "disjunction %d is not a binary decision on one variable"
                    % n)
        if tag == OR and report.smooth:
            kids = pdag.children(n)
            first = pdag.keys_of(kids[0])
            if any(pdag.keys_of(c) != first for c in kids[1:]):
                report.smooth = False
                violations.append(
                    "disjunction %d has branches over unequal atom sets" % n)
    if nvars is not None and report.smooth and node != pdag.FALSE:
        expected = frozenset(range(1, nvars + 1))
        if pdag.keys_of(node) != expected:
            report.smooth = False
            violations.append(
                "root ranges over %d of %d variables"
                % (len(pdag.keys_of(node)), nvars))
    report.first_violation = violations[0] if violations else None
    return report


@dataclass
class CompiledArtifact:
    """A compiled formula plus everything queries need to interpret it.

    `kind` picks the backend: "ddnnf" roots live in `dag`, "obdd" roots
    in `manager`. `mode` records which lemma transformation produced the
    circuit and therefore which queries it can answer soundly.
    """
    kind: str
    mode: str
    alpha: AtomSet
    amap: AbstractionMap
    lemmas: LemmaSet
    root: int | ObddRef
    dag: Dag | None = None
    manager: ObddManager | None = None
    order: tuple | None = None
    conditioned: bool = False
    _smooth_cache: dict = field(default_factory=dict, repr=False)

    @property
    def nvars(self) -> int:
        return len(self.alpha)

    def smooth_root(self, scope=None, root: int | None = None) -> int:
        """Smoothed root over `scope` (default: all of alpha), cached.

        `root` smooths a conditioned root instead of the artifact's own.
        """
        if self.kind != KIND_DDNNF:
            raise CompileError("smoothing applies to the ddnnf backend only")
        target = frozenset(range(1, self.nvars + 1)) if scope is None \
            else frozenset(scope)
        node = self.root if root is None else root
        key = (node, target)
        got = self._smooth_cache.get(key)
        if got is None:
            got = smooth(self.dag, node, target)
            self._smooth_cache[key] = got
        return got


def _check_reusable(lemmas: LemmaSet, alpha, targets) -> None:
    # a precomputed set must have been enumerated for the same pipeline
    # and the same atom ordering, or the mode guarantee is lost
    if lemmas.target not in targets:
        raise CompileError(
            "lemma set targets %r, expected one of %s"
            % (lemmas.target, ", ".join(targets)))
    if list(lemmas.alpha) != list(alpha):
        raise CompileError("lemma set was built against a different atom set")


def _abstract_with_lemmas(fdag, node, alpha, lemmas):
    pdag = Dag()
    prop, amap = abstract(fdag, node, alpha, pdag)
    clauses = abstract_clauses(lemmas, amap, pdag)
    return pdag, prop, clauses, amap


def _finish(pdag, combined, kind, mode, alpha, amap, lemmas,
            smooth_output, order, manager):
    if kind == KIND_DDNNF:
        root = compile_ddnnf(pdag, pdag.to_nnf(combined))
        art = CompiledArtifact(kind, mode, alpha, amap, lemmas, root,
                               dag=pdag)
        if smooth_output:
            art.root = art.smooth_root()
        return art
    if kind != KIND_OBDD:
        raise CompileError("unknown artifact kind %r" % kind)
    n = len(alpha)
    if manager is None:
        order = tuple(order) if order is not None else tuple(range(1, n + 1))
        manager = ObddManager(order)
    elif order is not None and tuple(order) != manager.order:
        raise CompileError("order conflicts with the shared manager's order")
    else:
        order = manager.order
    if sorted(order) != list(range(1, n + 1)):
        raise CompileError("order must be a permutation of variables 1..%d" % n)
    root = from_formula(pdag, combined, manager)
    return CompiledArtifact(kind, mode, alpha, amap, lemmas, root,
                            manager=manager, order=order)


def build_tred(fdag: Dag, node: int, alpha: AtomSet | None = None, *,
               scope: str = "formula", backend=None, kind: str = KIND_DDNNF,
               smooth_output: bool = False, order=None,
               manager: ObddManager | None = None,
               lemmas: LemmaSet | None = None) -> CompiledArtifact:
    """Compile the conjunction of a formula with its lemma clauses.

    Every propositional model of the result is theory-consistent, so
    consistency, clausal entailment, counting, and model enumeration
    answer the theory-level question by purely propositional means.

    A caller that already enumerated (to time or dump the set) can pass
    `lemmas` to skip re-enumeration; target and atom set must match.
    """
    if alpha is None:
        alpha = atoms_of(fdag, node)
    if lemmas is None:
        lemmas = enumerate_lemmas(fdag, node, alpha, scope=scope,
                                  backend=backend)
    else:
        _check_reusable(lemmas, alpha, (TARGET_FORMULA, TARGET_TOP))
    pdag, prop, clauses, amap = _abstract_with_lemmas(fdag, node, alpha, lemmas)
    combined = pdag.and_([prop, clauses])
    return _finish(pdag, combined, kind, MODE_T_REDUCED, alpha, amap, lemmas,
                   smooth_output, order, manager)


def build_text(fdag: Dag, node: int, alpha: AtomSet | None = None, *,
               scope: str = "formula", backend=None, kind: str = KIND_DDNNF,
               smooth_output: bool = False, order=None,
               manager: ObddManager | None = None,
               lemmas: LemmaSet | None = None) -> CompiledArtifact:
    """Compile the disjunction of a formula with its negated lemma clauses.

    The lemmas target the formula's negation, so every theory-unsat
    total assignment propositionally satisfies the result. Validity and
    implicant checks then reduce to propositional counting.

    A precomputed `lemmas` set must target the negation (or the full
    assignment space) over the same atom set.
    """
    if alpha is None:
        alpha = atoms_of(fdag, node)
    if lemmas is None:
        negation = fdag.negate(node)
        label = TARGET_NEGATION if scope == "formula" else None
        lemmas = enumerate_lemmas(fdag, negation, alpha, scope=scope,
                                  backend=backend, label=label)
    else:
        _check_reusable(lemmas, alpha, (TARGET_NEGATION, TARGET_TOP))
    pdag, prop, clauses, amap = _abstract_with_lemmas(fdag, node, alpha, lemmas)
    combined = pdag.or_([prop, pdag.negate(clauses)])
    return _finish(pdag, combined, kind, MODE_T_EXTENDED, alpha, amap, lemmas,
                   smooth_output, order, manager)


def build_obdd_artifact(fdag: Dag, node: int, alpha: AtomSet | None = None,
                        mode: str = MODE_T_REDUCED, *, scope: str = "formula",
                        backend=None, order=None,
                        manager: ObddManager | None = None) -> CompiledArtifact:
    """OBDD-backed variant of the two pipelines, selected by `mode`.

    Passing a shared `manager` makes artifacts comparable by root handle:
    canonicity then turns equivalence into handle identity.
    """
    if mode == MODE_T_REDUCED:
        build = build_tred
    elif mode == MODE_T_EXTENDED:
        build = build_text
    else:
        raise CompileError("unknown mode %r" % mode)
    return build(fdag, node, alpha, scope=scope, backend=backend,
                 kind=KIND_OBDD, order=order, manager=manager)
