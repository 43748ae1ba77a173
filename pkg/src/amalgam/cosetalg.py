"""Cosets K*c with K inside the amalgamated subgroup, and their algebra.

These are the values produced by shifting and intersecting copies of C inside
one free factor: every nonempty such set is a coset of a subgroup of the
factor, and after intersecting back with C it is a coset of a subgroup of C.
Emptiness is a first-class outcome (None), never a sentinel coset.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

from .stallings import GeneratingTuple, build, coset_intersection
from .words import Word, identity

if TYPE_CHECKING:  # pragma: no cover
    from .group import AmalgamContext


@dataclass(frozen=True)
class CosetOfC:
    """Right coset subgroup * rep inside the factor named by side."""

    side: str  # "A" | "B"
    subgroup: GeneratingTuple
    rep: Word

    def key(self) -> tuple:
        return (self.side, self.subgroup.graph.canonical_key(), self.rep.letters)

    def contains(self, w: Word) -> bool:
        return self.subgroup.contains(w * ~self.rep)


@dataclass(frozen=True)
class Cardinality:
    tag: str  # "empty" | "singleton" | "infinite"
    element: Optional[Word] = None

    @property
    def is_empty(self) -> bool:
        return self.tag == "empty"

    @property
    def is_singleton(self) -> bool:
        return self.tag == "singleton"

    @property
    def is_infinite(self) -> bool:
        return self.tag == "infinite"


def _canonical(side: str, subgroup: GeneratingTuple, rep: Word) -> CosetOfC:
    canon, _ = subgroup.coset_rep(rep)
    return CosetOfC(side, subgroup, canon)


def c_coset(ctx: "AmalgamContext", side: str) -> CosetOfC:
    """The coset C * 1 on the given side."""
    return CosetOfC(side, ctx.graph_c(side), identity(ctx.factor_alphabet(side)))


def shift(ctx: "AmalgamContext", d: CosetOfC, p: Word, q: Word) -> Optional[CosetOfC]:
    """(p * d * q) meet C, or None when empty.

    p(Kc)q is the coset (pKp^-1)(pcq); the intersection with C runs through
    the coset machinery.  Results are cached on the context.
    """
    key = ("shift", d.key(), p.letters, q.letters)
    cache = ctx.cache
    if key in cache:
        return cache[key]
    shifted_sub = _cached_conjugate(ctx, d.subgroup, ~p)
    shifted_rep = p * d.rep * q
    hit = coset_intersection(
        shifted_sub, shifted_rep, ctx.graph_c(d.side), identity(p.alphabet)
    )
    result = None if hit is None else _canonical(d.side, hit[0], hit[1])
    cache[key] = result
    return result


def _cached_conjugate(
    ctx: "AmalgamContext", g: GeneratingTuple, z: Word
) -> GeneratingTuple:
    key = ("conj", g.graph.canonical_key(), tuple(w.letters for w in g.generators), z.letters)
    cache = ctx.cache
    if key not in cache:
        cache[key] = g.conjugate(z)
    return cache[key]


def intersect(d1: CosetOfC, d2: CosetOfC) -> Optional[CosetOfC]:
    if d1.side != d2.side:
        raise ValueError(f"side mismatch: {d1.side} vs {d2.side}")
    hit = coset_intersection(d1.subgroup, d1.rep, d2.subgroup, d2.rep)
    if hit is None:
        return None
    return _canonical(d1.side, hit[0], hit[1])


def cardinality(d: Optional[CosetOfC]) -> Cardinality:
    if d is None:
        return Cardinality("empty")
    if d.subgroup.graph.is_trivial():
        return Cardinality("singleton", d.rep)
    return Cardinality("infinite")


def transfer(ctx: "AmalgamContext", d: CosetOfC) -> CosetOfC:
    """Move the coset to the other side through the amalgamation isomorphism."""
    side2 = "B" if d.side == "A" else "A"
    gens = [ctx.transfer_word(d.side, b) for b in d.subgroup.basis()]
    rep = ctx.transfer_word(d.side, d.rep)
    return _canonical(side2, build(gens, ctx.factor_alphabet(side2)), rep)
