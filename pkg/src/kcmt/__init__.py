"""Knowledge compilation modulo theories.

Compiles quantifier-free formulas over linear rational arithmetic into
T-reduced or T-extended d-DNNF and OBDD artifacts, then answers consistency,
validity, clausal entailment, implicant, model counting, model enumeration,
equivalence, and sentential entailment queries with purely propositional,
polytime procedures.
"""

from .bench import BenchError, bench_run, load_config
from .compiler import (
    KIND_DDNNF,
    KIND_OBDD,
    MODE_T_EXTENDED,
    MODE_T_REDUCED,
    CompiledArtifact,
    CompileError,
    ValidationReport,
    build_obdd_artifact,
    build_text,
    build_tred,
    compile_ddnnf,
    partition,
    select_literal,
    smooth,
    validate,
)
from .formulas import (
    AbstractionError,
    AbstractionMap,
    Assignment,
    Atom,
    AtomError,
    AtomSet,
    Dag,
    abstract,
    atoms_of,
    refine,
)
from .generate import GenerateError, InstanceSpec, generate
from .lemmas import (
    LemmaError,
    LemmaSet,
    TLemma,
    abstract_clauses,
    canonical_lemma,
    enumerate_lemmas,
    rules_out,
)
from .nnf_io import NnfIoError, read_map, read_nnf, write_lemmas, write_nnf
from .obdd import ObddError, ObddManager, ObddRef, copy_into, from_formula
from .oracle import AssignmentSets, Oracle, OracleBoundError, OracleTimeout, count_allsmt
from .queries import (
    ModeError,
    QueryError,
    UnsupportedQueryError,
    condition,
    count_models,
    count_models_assume,
    enumerate_models,
    entails_clause,
    equivalent,
    is_consistent,
    is_implicant,
    is_valid,
    sentential_entails,
)
from .smtlib import SmtParseError, parse_smt2, write_smt2
from .theory import (
    BooleanBackend,
    ConflictCore,
    LraBackend,
    TheoryError,
    TheoryVerdict,
    minimize_conflict,
)

__all__ = [
    "AbstractionError",
    "AbstractionMap",
    "Assignment",
    "AssignmentSets",
    "Atom",
    "AtomError",
    "AtomSet",
    "BenchError",
    "BooleanBackend",
    "CompileError",
    "CompiledArtifact",
    "ConflictCore",
    "Dag",
    "GenerateError",
    "InstanceSpec",
    "KIND_DDNNF",
    "KIND_OBDD",
    "LemmaError",
    "LemmaSet",
    "LraBackend",
    "MODE_T_EXTENDED",
    "MODE_T_REDUCED",
    "ModeError",
    "NnfIoError",
    "ObddError",
    "ObddManager",
    "ObddRef",
    "Oracle",
    "OracleBoundError",
    "OracleTimeout",
    "QueryError",
    "SmtParseError",
    "TLemma",
    "TheoryError",
    "TheoryVerdict",
    "UnsupportedQueryError",
    "ValidationReport",
    "abstract",
    "abstract_clauses",
    "atoms_of",
    "bench_run",
    "build_obdd_artifact",
    "build_text",
    "build_tred",
    "canonical_lemma",
    "compile_ddnnf",
    "condition",
    "copy_into",
    "count_allsmt",
    "count_models",
    "count_models_assume",
    "enumerate_lemmas",
    "enumerate_models",
    "entails_clause",
    "equivalent",
    "from_formula",
    "generate",
    "is_consistent",
    "is_implicant",
    "is_valid",
    "load_config",
    "minimize_conflict",
    "parse_smt2",
    "partition",
    "read_map",
    "read_nnf",
    "refine",
    "rules_out",
    "select_literal",
    "sentential_entails",
    "smooth",
    "validate",
    "write_lemmas",
    "write_nnf",
    "write_smt2",
]
