"""Artifact serialization: NNF circuit files with a map sidecar.

The circuit file follows the line format consumed by d-DNNF reasoners:

    c <comment>
    nnf <nodeCount> <edgeCount> <varCount>
    L <signedVar>
    A <childCount> <ids...>
    O <decisionVar> <childCount> <ids...>

Ids are 0-based positions of earlier body lines; the root is the last
line. `A 0` is the true constant, `O 0 0` the false one. A decision
variable of 0 marks an OR node with no recognized branching variable.

The sidecar map file carries everything the circuit cannot: the atom
strings in index order, the artifact's kind and mode, the lemma clauses
(signed atom indices, DIMACS style), and the variable order for OBDD
backed artifacts. The circuit file's first comment records the sha-256
of the map text, so a circuit is never silently re-interpreted against
a foreign atom map; hand-written files without the comment are accepted
as-is. OBDD artifacts are re-canonicalized on read by rebuilding the
diagram under the stored order.
"""

from __future__ import annotations

import hashlib
from fractions import Fraction

from .compiler import (
    KIND_DDNNF,
    KIND_OBDD,
    MODE_T_EXTENDED,
    MODE_T_REDUCED,
    CompiledArtifact,
)
from .formulas import (
    AND,
    FALSE_KIND,
    LIT,
    OR,
    TRUE_KIND,
    AbstractionMap,
    Atom,
    AtomError,
    AtomSet,
    Dag,
)
from .lemmas import (
    TARGET_FORMULA,
    TARGET_NEGATION,
    TARGET_TOP,
    LemmaSet,
    canonical_lemma,
)
from .obdd import ObddManager, from_formula

MAP_HEADER = "kcmt-map 1"
_TARGETS = (TARGET_FORMULA, TARGET_NEGATION, TARGET_TOP)


class NnfIoError(ValueError):
    """Malformed artifact file, or a circuit/map pair that disagrees."""


def _fail(path: str, lineno: int, msg: str) -> NnfIoError:
    return NnfIoError("%s, line %d: %s" % (path, lineno, msg))


# -- atom strings ------------------------------------------------------------


def _atom_from_string(s: str) -> Atom:
    """Inverse of the atom's printed normal form."""
    toks = s.split()
    if not toks:
        raise AtomError("empty atom string")
    rels = [i for i, t in enumerate(toks) if t in ("<=", "<", "=")]
    if not rels:
        if len(toks) != 1:
            raise AtomError("malformed atom string %r" % s)
        return Atom.boolean(toks[0])
    if len(rels) != 1 or rels[0] == 0 or rels[0] != len(toks) - 2:
        raise AtomError("malformed atom string %r" % s)
    rel = toks[rels[0]]
    const = Fraction(toks[-1])
    left = toks[:rels[0]]

    def term(tok: str) -> tuple[int, str]:
        if "*" in tok:
            k, v = tok.split("*", 1)
            return int(k), v
        if tok.startswith("-"):
            return -1, tok[1:]
        return 1, tok

    coeffs: dict[str, int] = {}
    k, v = term(left[0])
    coeffs[v] = k
    rest = left[1:]
    if len(rest) % 2:
        raise AtomError("malformed atom string %r" % s)
    for sign, tok in zip(rest[::2], rest[1::2]):
        if sign not in "+-":
            raise AtomError("malformed atom string %r" % s)
        k, v = term(tok)
        coeffs[v] = k if sign == "+" else -k
    return Atom.linear(coeffs, rel, const)


# -- map sidecar -------------------------------------------------------------


def _map_text(artifact: CompiledArtifact) -> str:
    alpha = artifact.alpha
    lines = [MAP_HEADER,
             "kind %s" % artifact.kind,
             "mode %s" % artifact.mode,
             "target %s" % artifact.lemmas.target]
    if artifact.kind == KIND_OBDD:
        lines.append("order %s" % " ".join(str(v) for v in artifact.order))
    lines.append("atoms %d" % len(alpha))
    lines.extend(str(a) for a in alpha)
    lines.append("lemmas %d" % len(artifact.lemmas))
    for lemma in artifact.lemmas:
        ids = ((alpha.position(a) + 1) * (1 if p else -1)
               for a, p in lemma.literals)
        lines.append("%s 0" % " ".join(str(i) for i in ids))
    return "\n".join(lines) + "\n"


def _parse_map(text: str, path: str):
    lines = text.splitlines()
    pos = 0

    def take(what: str) -> tuple[str, int]:
        nonlocal pos
        if pos >= len(lines):
            raise _fail(path, len(lines) + 1, "missing %s" % what)
        pos += 1
        return lines[pos - 1].strip(), pos

    def keyed(key: str, what: str) -> tuple[str, int]:
        line, no = take(what)
        parts = line.split(None, 1)
        if len(parts) != 2 or parts[0] != key:
            raise _fail(path, no, "expected '%s <%s>'" % (key, what))
        return parts[1], no

    line, no = take("header")
    if line != MAP_HEADER:
        raise _fail(path, no, "not a map file (missing '%s')" % MAP_HEADER)
    kind, no = keyed("kind", "kind")
    if kind not in (KIND_DDNNF, KIND_OBDD):
        raise _fail(path, no, "unknown kind %r" % kind)
    mode, no = keyed("mode", "mode")
    if mode not in (MODE_T_REDUCED, MODE_T_EXTENDED):
        raise _fail(path, no, "unknown mode %r" % mode)
    target, no = keyed("target", "target")
    if target not in _TARGETS:
        raise _fail(path, no, "unknown lemma target %r" % target)
    order = None
    if kind == KIND_OBDD:
        raw, no = keyed("order", "order")
        try:
            order = tuple(int(t) for t in raw.split())
        except ValueError:
            raise _fail(path, no, "order must be a list of integers")
    raw, no = keyed("atoms", "atom count")
    try:
        natoms = int(raw)
    except ValueError:
        raise _fail(path, no, "atom count must be an integer")
    alpha = AtomSet()
    for _ in range(natoms):
        line, no = take("atom string")
        try:
            atom = _atom_from_string(line)
        except (AtomError, ValueError) as e:
            raise _fail(path, no, "bad atom string: %s" % e)
        if atom in alpha:
            raise _fail(path, no, "duplicate atom %s" % atom)
        alpha.add(atom)
    raw, no = keyed("lemmas", "lemma count")
    try:
        nlemmas = int(raw)
    except ValueError:
        raise _fail(path, no, "lemma count must be an integer")
    amap = AbstractionMap(alpha)
    lemmas = []
    for _ in range(nlemmas):
        line, no = take("lemma clause")
        toks = line.split()
        if not toks or toks[-1] != "0":
            raise _fail(path, no, "lemma clause must end with 0")
        try:
            ids = [int(t) for t in toks[:-1]]
        except ValueError:
            raise _fail(path, no, "lemma clause must be signed integers")
        if not ids:
            raise _fail(path, no, "empty lemma clause")
        try:
            lits = [(amap.atom(abs(i)), i > 0) for i in ids]
            lemmas.append(canonical_lemma(lits, alpha))
        except Exception as e:
            raise _fail(path, no, "bad lemma clause: %s" % e)
    if pos != len(lines):
        raise _fail(path, pos + 1, "unexpected trailing content")
    if order is not None and sorted(order) != list(range(1, natoms + 1)):
        raise NnfIoError(
            "%s: order must be a permutation of 1..%d" % (path, natoms))
    lemma_set = LemmaSet(tuple(lemmas), target, alpha)
    return kind, mode, order, alpha, amap, lemma_set


# -- circuit body ------------------------------------------------------------


def _decision_var(pdag: Dag, node: int) -> int:
    """Branching variable of a 2-way OR whose branches assert complementary
    literals, or 0 when the node has no such shape."""
    kids = pdag.children(node)
    if len(kids) != 2:
        return 0

    def asserted(branch: int) -> dict:
        tag = pdag.kind(branch)
        if tag == LIT:
            v, p = pdag.leaf(branch)
            return {v: p}
        out = {}
        if tag == AND:
            for c in pdag.children(branch):
                if pdag.kind(c) == LIT:
                    v, p = pdag.leaf(c)
                    out[v] = p
        return out

    left, right = asserted(kids[0]), asserted(kids[1])
    for v, p in left.items():
        if v in right and right[v] != p:
            return v
    return 0


def _ddnnf_lines(pdag: Dag, root: int) -> list[str]:
    ids: dict[int, int] = {}
    lines: list[str] = []

    def emit(node: int, line: str) -> None:
        ids[node] = len(lines)
        lines.append(line)

    stack = [(root, False)]
    while stack:
        node, ready = stack.pop()
        if node in ids:
            continue
        if not ready:
            stack.append((node, True))
            stack.extend((c, False) for c in pdag.children(node))
            continue
        tag = pdag.kind(node)
        if tag == TRUE_KIND:
            emit(node, "A 0")
        elif tag == FALSE_KIND:
            emit(node, "O 0 0")
        elif tag == LIT:
            v, p = pdag.leaf(node)
            emit(node, "L %d" % (v if p else -v))
        elif tag == AND:
            kids = pdag.children(node)
            emit(node, "A %d %s" % (
                len(kids), " ".join(str(ids[c]) for c in kids)))
        elif tag == OR:
            kids = pdag.children(node)
            emit(node, "O %d %d %s" % (
                _decision_var(pdag, node), len(kids),
                " ".join(str(ids[c]) for c in kids)))
        else:
            raise NnfIoError(
                "only negation normal form circuits can be written "
                "(found a %r node)" % tag)
    return lines


def _obdd_lines(artifact: CompiledArtifact) -> list[str]:
    m = artifact.manager
    ids: dict[int, int] = {}
    lit_ids: dict[tuple[int, bool], int] = {}
    lines: list[str] = []

    def lit_id(v: int, p: bool) -> int:
        got = lit_ids.get((v, p))
        if got is None:
            got = len(lines)
            lines.append("L %d" % (v if p else -v))
            lit_ids[(v, p)] = got
        return got

    def emit(node: int, line: str) -> int:
        ids[node] = len(lines)
        lines.append(line)
        return ids[node]

    stack = [(artifact.root.node, False)]
    while stack:
        node, ready = stack.pop()
        if node in ids:
            continue
        if m.is_terminal(node):
            emit(node, "A 0" if node == m.TRUE else "O 0 0")
            continue
        hi, lo = m.branches(node)
        if not ready:
            stack.append((node, True))
            stack.append((hi, False))
            stack.append((lo, False))
            continue
        v = m.var_at(node)
        pos_lit = lit_id(v, True)
        neg_lit = lit_id(v, False)
        hi_arm = len(lines)
        lines.append("A 2 %d %d" % (pos_lit, ids[hi]))
        lo_arm = len(lines)
        lines.append("A 2 %d %d" % (neg_lit, ids[lo]))
        emit(node, "O %d 2 %d %d" % (v, hi_arm, lo_arm))
    return lines


def _edge_count(lines: list[str]) -> int:
    edges = 0
    for line in lines:
        toks = line.split()
        if toks[0] == "A":
            edges += int(toks[1])
        elif toks[0] == "O":
            edges += int(toks[2])
    return edges


# -- public entry points ------------------------------------------------------


def write_nnf(artifact: CompiledArtifact, nnf_path, map_path) -> None:
    """Serialize an artifact as a circuit file plus its map sidecar."""
    if artifact.conditioned:
        raise NnfIoError(
            "conditioned artifacts are internal working copies and cannot "
            "be serialized")
    map_text = _map_text(artifact)
    digest = hashlib.sha256(map_text.encode()).hexdigest()
    if artifact.kind == KIND_DDNNF:
        lines = _ddnnf_lines(artifact.dag, artifact.root)
    else:
        lines = _obdd_lines(artifact)
    body = ["c map %s" % digest,
            "nnf %d %d %d" % (len(lines), _edge_count(lines), artifact.nvars)]
    body.extend(lines)
    with open(map_path, "w") as f:
        f.write(map_text)
    with open(nnf_path, "w") as f:
        f.write("\n".join(body) + "\n")


def write_lemmas(artifact: CompiledArtifact, path) -> None:
    """Dump the artifact's lemma clauses in DIMACS style."""
    alpha = artifact.alpha
    lines = ["c theory lemmas, atoms indexed as in the map sidecar",
             "p cnf %d %d" % (len(alpha), len(artifact.lemmas))]
    for lemma in artifact.lemmas:
        ids = ((alpha.position(a) + 1) * (1 if p else -1)
               for a, p in lemma.literals)
        lines.append("%s 0" % " ".join(str(i) for i in ids))
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def read_map(map_path) -> AtomSet:
    """Atom set stored in a map sidecar, in artifact order.

    Lets a caller pin query literals and enumeration order to an
    artifact's atoms without loading the circuit itself.
    """
    with open(map_path) as f:
        map_text = f.read()
    _, _, _, alpha, _, _ = _parse_map(map_text, str(map_path))
    return alpha


def read_nnf(nnf_path, map_path) -> CompiledArtifact:
    """Load a circuit/map pair back into a queryable artifact.

    The map's hash must match the circuit's `c map` comment when one is
    present. OBDD artifacts are rebuilt under the stored variable order.
    """
    with open(map_path) as f:
        map_text = f.read()
    kind, mode, order, alpha, amap, lemma_set = _parse_map(
        map_text, str(map_path))

    with open(nnf_path) as f:
        raw = f.read().splitlines()
    path = str(nnf_path)
    header = None
    body_start = 0
    for i, line in enumerate(raw):
        s = line.strip()
        if not s:
            continue
        if s.startswith("c"):
            toks = s.split()
            if len(toks) == 3 and toks[1] == "map":
                digest = hashlib.sha256(map_text.encode()).hexdigest()
                if toks[2] != digest:
                    raise _fail(path, i + 1,
                                "map hash mismatch: circuit was written "
                                "against a different atom map")
            continue
        header = s
        body_start = i + 1
        break
    if header is None:
        raise _fail(path, len(raw) + 1, "missing 'nnf' header")
    toks = header.split()
    if len(toks) != 4 or toks[0] != "nnf":
        raise _fail(path, body_start, "expected 'nnf <nodes> <edges> <vars>'")
    try:
        n_nodes, n_edges, n_vars = int(toks[1]), int(toks[2]), int(toks[3])
    except ValueError:
        raise _fail(path, body_start, "nnf header needs three integers")
    if n_vars != len(alpha):
        raise NnfIoError(
            "%s: circuit ranges over %d variables but the map lists %d "
            "atoms" % (path, n_vars, len(alpha)))

    pdag = Dag()
    nodes: list[int] = []
    edges = 0
    for i in range(body_start, len(raw)):
        s = raw[i].strip()
        lineno = i + 1
        if not s or s.startswith("c"):
            continue
        toks = s.split()

        def child(tok: str) -> int:
            try:
                j = int(tok)
            except ValueError:
                raise _fail(path, lineno, "node id %r is not an integer" % tok)
            if not 0 <= j < len(nodes):
                raise _fail(path, lineno,
                            "node id %d does not reference an earlier line" % j)
            return nodes[j]

        if toks[0] == "L" and len(toks) == 2:
            try:
                v = int(toks[1])
            except ValueError:
                raise _fail(path, lineno, "bad literal %r" % toks[1])
            if not 1 <= abs(v) <= n_vars:
                raise _fail(path, lineno,
                            "literal variable %d outside 1..%d" % (v, n_vars))
            nodes.append(pdag.lit(abs(v), v > 0))
        elif toks[0] == "A" and len(toks) >= 2:
            try:
                k = int(toks[1])
            except ValueError:
                raise _fail(path, lineno, "bad child count %r" % toks[1])
            if len(toks) != 2 + k:
                raise _fail(path, lineno,
                            "A node announces %d children but lists %d"
                            % (k, len(toks) - 2))
            nodes.append(pdag.and_([child(t) for t in toks[2:]]))
            edges += k
        elif toks[0] == "O" and len(toks) >= 3:
            try:
                v, k = int(toks[1]), int(toks[2])
            except ValueError:
                raise _fail(path, lineno, "bad O node header")
            if not 0 <= v <= n_vars:
                raise _fail(path, lineno,
                            "decision variable %d outside 0..%d" % (v, n_vars))
            if len(toks) != 3 + k:
                raise _fail(path, lineno,
                            "O node announces %d children but lists %d"
                            % (k, len(toks) - 3))
            if k == 0:
                nodes.append(pdag.FALSE)
            else:
                nodes.append(pdag.or_([child(t) for t in toks[3:]]))
            edges += k
        else:
            raise _fail(path, lineno, "unrecognized line %r" % s)
    if not nodes:
        raise NnfIoError("%s: circuit has no nodes" % path)
    if len(nodes) != n_nodes:
        raise NnfIoError(
            "%s: header announces %d nodes but the body has %d"
            % (path, n_nodes, len(nodes)))
    if edges != n_edges:
        raise NnfIoError(
            "%s: header announces %d edges but the body has %d"
            % (path, n_edges, edges))
    root = nodes[-1]

    if kind == KIND_DDNNF:
        return CompiledArtifact(kind, mode, alpha, amap, lemma_set, root,
                                dag=pdag)
    manager = ObddManager(order)
    return CompiledArtifact(kind, mode, alpha, amap, lemma_set,
                            from_formula(pdag, root, manager),
                            manager=manager, order=order)
