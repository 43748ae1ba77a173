import random

import pytest

from amalgam.fixtures import example_one_context, example_two_context, malnormal_context
from amalgam.stallings import build
from amalgam.words import Alphabet, Word, parse_word


@pytest.fixture(scope="session")
def free3():
    return Alphabet(("a", "b", "d"))


@pytest.fixture(scope="session")
def subgroup_a2_b(free3):
    return build([parse_word("a^2", free3), parse_word("b", free3)])


@pytest.fixture(scope="session")
def ex1():
    return example_one_context(2)


@pytest.fixture(scope="session")
def ex2():
    return example_two_context(2)


@pytest.fixture(scope="session")
def malnormal_ctx():
    return malnormal_context()


def random_reduced(rng: random.Random, alphabet: Alphabet, length: int) -> Word:
    letters = []
    options = [s * i for i in range(1, len(alphabet) + 1) for s in (1, -1)]
    while len(letters) < length:
        lt = rng.choice(options)
        if letters and letters[-1] == -lt:
            continue
        letters.append(lt)
    return Word(alphabet, letters)


def random_member(rng: random.Random, generators, count: int) -> Word:
    """Random product of `count` generators or inverses."""
    w = Word(generators[0].alphabet, ())
    for _ in range(count):
        g = rng.choice(generators)
        w = w * (g if rng.random() < 0.5 else ~g)
    return w
