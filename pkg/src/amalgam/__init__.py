"""Amalgamated products of free groups: normal forms, regularity, conjugacy search."""

from .words import (
    Alphabet,
    Word,
    WordSyntaxError,
    concat,
    format_word,
    free_conjugacy,
    free_reduce,
    identity,
    invert,
    parse_word,
    substitute,
)
from .stallings import (
    GeneratingTuple,
    NotAMemberError,
    SubgroupGraph,
    build,
    coset_intersection,
    pullback,
)
from .cosetalg import Cardinality, CosetOfC, cardinality, intersect, shift, transfer
from .group import (
    AmalgamContext,
    ConjugacyOutcome,
    CyclicForm,
    InvalidPresentationError,
    NormalForm,
    ReducedForm,
    RegularityReport,
    RepPolicy,
    Syllable,
    brute_conjugacy_oracle,
    build_context,
    classify,
    conjugacy_search,
    cr_membership,
    cyclic_form,
    normal_form,
    principal_system_solve,
    reduced_form,
    syllable_decompose,
)

__all__ = [
    "Alphabet",
    "Word",
    "WordSyntaxError",
    "concat",
    "format_word",
    "free_conjugacy",
    "free_reduce",
    "identity",
    "invert",
    "parse_word",
    "substitute",
    "GeneratingTuple",
    "NotAMemberError",
    "SubgroupGraph",
    "build",
    "coset_intersection",
    "pullback",
    "Cardinality",
    "CosetOfC",
    "cardinality",
    "intersect",
    "shift",
    "transfer",
    "AmalgamContext",
    "ConjugacyOutcome",
    "CyclicForm",
    "InvalidPresentationError",
    "NormalForm",
    "ReducedForm",
    "RegularityReport",
    "RepPolicy",
    "Syllable",
    "brute_conjugacy_oracle",
    "build_context",
    "classify",
    "conjugacy_search",
    "cr_membership",
    "cyclic_form",
    "normal_form",
    "principal_system_solve",
    "reduced_form",
    "syllable_decompose",
]
