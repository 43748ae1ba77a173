"""Canned presentations used by the benchmark harness and the test suite."""

from __future__ import annotations

from .group import AmalgamContext, build_context
from .words import Alphabet, Word


def example_one_context(p: int = 2) -> AmalgamContext:
    """F(a,b,d) * F(x,y,z) amalgamated over <a^p, b> = <x, y^p>."""
    if p < 2:
        raise ValueError("p must be at least 2")
    x = Alphabet(("a", "b", "d"))
    y = Alphabet(("x", "y", "z"))
    pairs = [
        (Word(x, (1,) * p), Word(y, (1,))),
        (Word(x, (2,)), Word(y, (2,) * p)),
    ]
    return build_context(x, y, pairs)


def example_two_context(p: int = 2) -> AmalgamContext:
    """F(a,b) * F(x,y) amalgamated over <a, b^-1 a b> = <y^-1 x y, x^p>."""
    if p < 2:
        raise ValueError("p must be at least 2")
    x = Alphabet(("a", "b"))
    y = Alphabet(("x", "y"))
    pairs = [
        (Word(x, (1,)), Word(y, (-2, 1, 2))),
        (Word(x, (-2, 1, 2)), Word(y, (1,) * p)),
    ]
    return build_context(x, y, pairs)


def malnormal_context() -> AmalgamContext:
    """F(a,b,d) * F(x,y,z) amalgamated over <b> = <y>; C is malnormal on both sides."""
    x = Alphabet(("a", "b", "d"))
    y = Alphabet(("x", "y", "z"))
    pairs = [(Word(x, (2,)), Word(y, (2,)))]
    return build_context(x, y, pairs)
