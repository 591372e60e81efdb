"""The eight theory-level queries, answered propositionally on artifacts.

Each query is guarded by the artifact mode that makes the propositional
answer coincide with the theory-level one: consistency, clausal
entailment, counting, and enumeration need a T-reduced artifact;
validity and implicant checks need a T-extended one. Equivalence and
sentential entailment additionally need the canonical OBDD backend,
where they reduce to handle identity and one linear apply.

Wrong-mode calls always raise, never return a wrong answer. Queries
mentioning atoms outside the artifact's atom set are rejected: the atom
set is fixed at compilation time.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

from . import obdd as _obdd
from .compiler import (KIND_DDNNF, KIND_OBDD, MODE_T_EXTENDED,
                       MODE_T_REDUCED, CompiledArtifact)
from .formulas import (AND, FALSE_KIND, LIT, TRUE_KIND, AbstractionError,
                       Assignment, Atom)


class QueryError(ValueError):
    """Malformed cube or clause: duplicate atom, or atom outside alpha."""


class ModeError(Exception):
    """Query asked of an artifact whose mode cannot answer it soundly."""


class UnsupportedQueryError(ModeError):
    """Query outside the backend's scope (EQ/SE need matching OBDDs)."""


def _require(artifact: CompiledArtifact, mode: str, query: str) -> None:
    if artifact.conditioned:
        raise ModeError(
            "%s requires an unconditioned artifact; conditioned artifacts "
            "are internal" % query)
    if artifact.mode != mode:
        raise ModeError("%s requires a %s artifact, got %s"
                        % (query, mode, artifact.mode))


def _indexed(artifact: CompiledArtifact,
             literals: Iterable[tuple[Atom, bool]]) -> list[tuple[int, bool]]:
    """Map atom-literals to variable indices, rejecting malformed input."""
    out: list[tuple[int, bool]] = []
    seen = set()
    for atom, positive in literals:
        try:
            idx = artifact.amap.index(atom)
        except AbstractionError:
            raise QueryError("atom %s is outside the artifact's atom set"
                             % atom) from None
        if idx in seen:
            raise QueryError("atom %s appears twice" % atom)
        seen.add(idx)
        out.append((idx, bool(positive)))
    return out


def _bump(stats: dict | None) -> None:
    if stats is not None:
        stats["visits"] = stats.get("visits", 0) + 1


# -- internal primitives (no mode guards; used on conditioned roots too) ----


def _ddnnf_live(artifact: CompiledArtifact, root: int,
                stats: dict | None = None) -> bool:
    """Satisfiability by one traversal: a node is live iff it is the true
    terminal, a literal, a conjunction of live nodes, or a decision with
    a live branch."""
    pdag = artifact.dag
    memo: dict[int, bool] = {}

    def rec(n: int) -> bool:
        out = memo.get(n)
        if out is not None:
            return out
        _bump(stats)
        tag = pdag.kind(n)
        if tag == TRUE_KIND or tag == LIT:
            out = True
        elif tag == FALSE_KIND:
            out = False
        elif tag == AND:
            out = all(rec(c) for c in pdag.children(n))
        else:
            out = any(rec(c) for c in pdag.children(n))
        memo[n] = out
        return out

    return rec(root)


def _ddnnf_count(artifact: CompiledArtifact, root: int, scope: frozenset,
                 stats: dict | None = None) -> int:
    """Model count over `scope`, via the smoothed root: literals count 1,
    conjunctions multiply, decisions add."""
    pdag = artifact.dag
    smoothed = artifact.smooth_root(scope, root=root)
    memo: dict[int, int] = {}

    def rec(n: int) -> int:
        out = memo.get(n)
        if out is not None:
            return out
        _bump(stats)
        tag = pdag.kind(n)
        if tag == FALSE_KIND:
            out = 0
        elif tag == TRUE_KIND or tag == LIT:
            out = 1
        elif tag == AND:
            out = 1
            for c in pdag.children(n):
                out *= rec(c)
        else:
            out = sum(rec(c) for c in pdag.children(n))
        memo[n] = out
        return out

    return rec(smoothed)


def _count(artifact: CompiledArtifact, root, fixed: int = 0,
           stats: dict | None = None) -> int:
    """Count over all non-fixed variables, either backend. `fixed` is the
    number of conditioned-away variables."""
    n = artifact.nvars
    if artifact.kind == KIND_OBDD:
        total = artifact.manager.satcount(root.node)
        _bump(stats)
        return total >> fixed
    scope = frozenset(range(1, n + 1))
    return _ddnnf_count(artifact, root, scope, stats)


def condition(artifact: CompiledArtifact,
              cube: Iterable[tuple[Atom, bool]]) -> CompiledArtifact:
    """Artifact with the cube's literals fixed in the root.

    The result is B-equivalent to root ∧ cube projected on the remaining
    atoms. It is marked conditioned: the lemma transformation was not
    re-run, so the mode invariant is no longer guaranteed and the public
    queries refuse it. The query operations consume it internally.
    """
    lits = _indexed(artifact, cube)
    if not lits:
        return artifact
    if artifact.kind == KIND_DDNNF:
        root = artifact.dag.residual(artifact.root, dict(lits))
        return CompiledArtifact(
            artifact.kind, artifact.mode, artifact.alpha, artifact.amap,
            artifact.lemmas, root, dag=artifact.dag, conditioned=True,
            _smooth_cache=artifact._smooth_cache)
    node = artifact.root.node
    for idx, positive in lits:
        node = artifact.manager.restrict(node, idx, positive)
    return CompiledArtifact(
        artifact.kind, artifact.mode, artifact.alpha, artifact.amap,
        artifact.lemmas, artifact.manager.ref(node),
        manager=artifact.manager, order=artifact.order, conditioned=True)


# -- the eight queries -------------------------------------------------------


def is_consistent(artifact: CompiledArtifact,
                  stats: dict | None = None) -> bool:
    """CO: theory satisfiability, as propositional satisfiability."""
    _require(artifact, MODE_T_REDUCED, "isConsistent")
    if artifact.kind == KIND_OBDD:
        _bump(stats)
        return not artifact.root.is_false
    return _ddnnf_live(artifact, artifact.root, stats)


def is_valid(artifact: CompiledArtifact, stats: dict | None = None) -> bool:
    """VA: theory validity, as a full propositional model count."""
    _require(artifact, MODE_T_EXTENDED, "isValid")
    return _count(artifact, artifact.root, 0, stats) == \
        (1 << artifact.nvars)


def entails_clause(artifact: CompiledArtifact,
                   clause: Sequence[tuple[Atom, bool]],
                   stats: dict | None = None) -> bool:
    """CE: artifact ⊨ clause, by conditioning on the negated clause and
    checking unsatisfiability."""
    _require(artifact, MODE_T_REDUCED, "entailsClause")
    negated = [(atom, not positive) for atom, positive in clause]
    cond = condition(artifact, negated)
    if artifact.kind == KIND_OBDD:
        _bump(stats)
        return cond.root.is_false
    return not _ddnnf_live(cond, cond.root, stats)


def is_implicant(artifact: CompiledArtifact,
                 cube: Sequence[tuple[Atom, bool]],
                 stats: dict | None = None) -> bool:
    """IM: cube ⊨ artifact, by conditioning on the cube and checking
    validity over the remaining atoms."""
    _require(artifact, MODE_T_EXTENDED, "isImplicant")
    lits = _indexed(artifact, cube)
    cond = condition(artifact, cube)
    remaining = artifact.nvars - len(lits)
    if artifact.kind == KIND_OBDD:
        return _count(cond, cond.root, len(lits), stats) == (1 << remaining)
    scope = frozenset(range(1, artifact.nvars + 1)) - {i for i, _ in lits}
    return _ddnnf_count(cond, cond.root, scope, stats) == (1 << remaining)


def count_models(artifact: CompiledArtifact,
                 stats: dict | None = None) -> int:
    """CT: number of theory-consistent total assignments."""
    _require(artifact, MODE_T_REDUCED, "countModels")
    return _count(artifact, artifact.root, 0, stats)


def count_models_assume(artifact: CompiledArtifact,
                        cube: Sequence[tuple[Atom, bool]],
                        stats: dict | None = None) -> int:
    """CT under assumptions: models extending the cube."""
    _require(artifact, MODE_T_REDUCED, "countModelsAssume")
    lits = _indexed(artifact, cube)
    cond = condition(artifact, cube)
    if artifact.kind == KIND_OBDD:
        return _count(cond, cond.root, len(lits), stats)
    scope = frozenset(range(1, artifact.nvars + 1)) - {i for i, _ in lits}
    return _ddnnf_count(cond, cond.root, scope, stats)


def enumerate_models(artifact: CompiledArtifact) -> Iterator[Assignment]:
    """ME: all theory-consistent total assignments, lexicographic in atom
    index with true before false."""
    _require(artifact, MODE_T_REDUCED, "enumerateModels")
    n = artifact.nvars
    if artifact.kind == KIND_OBDD:
        found = list(artifact.manager.models(artifact.root.node))
    else:
        pdag = artifact.dag
        smoothed = artifact.smooth_root()
        memo: dict[int, list[dict]] = {}

        def rec(node: int) -> list[dict]:
            got = memo.get(node)
            if got is not None:
                return got
            tag = pdag.kind(node)
            if tag == FALSE_KIND:
                out = []
            elif tag == TRUE_KIND:
                out = [{}]
            elif tag == LIT:
                var, pol = pdag.leaf(node)
                out = [{var: pol}]
            elif tag == AND:
                out = [{}]
                for child in pdag.children(node):
                    out = [{**m, **tail} for m in out for tail in rec(child)]
            else:
                out = [m for child in pdag.children(node)
                       for m in rec(child)]
            memo[node] = out
            return out

        found = rec(smoothed)
    key_order = list(range(1, n + 1))
    found.sort(key=lambda m: tuple(not m[i] for i in key_order))
    for model in found:
        yield Assignment([(artifact.amap.atom(i), model[i])
                          for i in key_order])


def _matching_obdds(a: CompiledArtifact, b: CompiledArtifact,
                    query: str) -> int:
    """Shared precondition of EQ/SE; returns b's root in a's manager."""
    if a.kind != KIND_OBDD or b.kind != KIND_OBDD:
        raise UnsupportedQueryError(
            "%s is supported on OBDD-backed artifacts only" % query)
    if a.conditioned or b.conditioned:
        raise ModeError("%s requires unconditioned artifacts" % query)
    if a.mode != b.mode:
        raise UnsupportedQueryError(
            "%s requires artifacts of the same mode, got %s and %s"
            % (query, a.mode, b.mode))
    if a.alpha != b.alpha:
        raise UnsupportedQueryError(
            "%s requires artifacts over the same atom set" % query)
    if a.order != b.order:
        raise UnsupportedQueryError(
            "%s requires artifacts with the same variable order" % query)
    if a.manager is b.manager:
        return b.root.node
    return _obdd.copy_into(b.root, a.manager).node


def equivalent(a: CompiledArtifact, b: CompiledArtifact,
               stats: dict | None = None) -> bool:
    """EQ: theory equivalence, as canonical-handle identity."""
    other = _matching_obdds(a, b, "equivalent")
    _bump(stats)
    return a.root.node == other


def sentential_entails(a: CompiledArtifact, b: CompiledArtifact,
                       stats: dict | None = None) -> bool:
    """SE: theory entailment between artifacts, as one OBDD implication."""
    other = _matching_obdds(a, b, "sententialEntails")
    _bump(stats)
    return _obdd.entails(a.root, a.manager.ref(other))
