"""Words in finitely generated free groups.

A word is an immutable, freely reduced sequence of signed letters over a
fixed alphabet.  Generator ``i`` of the alphabet is encoded as the integer
``i + 1`` and its inverse as ``-(i + 1)``; textual rendering happens only at
the CLI boundary.  Words carry their alphabet, and mixing alphabets is a hard
error rather than a coercion.
"""

from __future__ import annotations

import re
from typing import Iterable, Iterator, Optional, Sequence

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
_TOKEN_RE = re.compile(r"([A-Za-z][A-Za-z0-9_]*)(?:\^(-?\d+))?\Z")


class Alphabet:
    """Ordered collection of distinct generator names with stable indices."""

    __slots__ = ("names", "_index")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if not names:
            raise ValueError("alphabet needs at least one generator")
        for name in names:
            if not _NAME_RE.match(name):
                raise ValueError(f"bad generator name {name!r}")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate generator names in {names!r}")
        self.names = names
        self._index = {n: i for i, n in enumerate(names)}

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValueError(f"unknown generator {name!r}") from None

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"Alphabet({', '.join(self.names)})"


def letter(index: int, sign: int) -> int:
    """Encode (index, sign) as a signed letter."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return sign * (index + 1)


def letter_index(lt: int) -> int:
    return abs(lt) - 1


def letter_sign(lt: int) -> int:
    return 1 if lt > 0 else -1


def _reduced(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    push = out.append
    pop = out.pop
    for lt in letters:
        if out and out[-1] == -lt:
            pop()
        else:
            push(lt)
    return tuple(out)


class Word:
    """Freely reduced word; the constructor reduces its input."""

    __slots__ = ("alphabet", "letters")

    def __init__(self, alphabet: Alphabet, letters: Iterable[int] = ()):
        n = len(alphabet)
        letters = tuple(letters)
        for lt in letters:
            if not isinstance(lt, int) or lt == 0 or abs(lt) > n:
                raise ValueError(f"letter {lt!r} out of range for {alphabet!r}")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "letters", _reduced(letters))

    @classmethod
    def _make(cls, alphabet: Alphabet, letters: tuple[int, ...]) -> "Word":
        # trusted constructor: letters must already be valid and freely reduced
        w = object.__new__(cls)
        object.__setattr__(w, "alphabet", alphabet)
        object.__setattr__(w, "letters", letters)
        return w

    def __setattr__(self, *args):
        raise AttributeError("Word is immutable")

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Word)
            and self.alphabet == other.alphabet
            and self.letters == other.letters
        )

    def __hash__(self) -> int:
        return hash((self.alphabet, self.letters))

    def __repr__(self) -> str:
        return f"Word({format_word(self)!r})"

    def _require_same_alphabet(self, other: "Word") -> None:
        if self.alphabet != other.alphabet:
            raise ValueError(
                f"alphabet mismatch: {self.alphabet!r} vs {other.alphabet!r}"
            )

    def __mul__(self, other: "Word") -> "Word":
        self._require_same_alphabet(other)
        a, b = self.letters, other.letters
        if not a:
            return other
        if not b:
            return self
        k = 0
        na, nb = len(a), len(b)
        while k < na and k < nb and a[na - 1 - k] == -b[k]:
            k += 1
        return Word._make(self.alphabet, a[: na - k] + b[k:])

    def __invert__(self) -> "Word":
        return Word._make(self.alphabet, tuple(-lt for lt in reversed(self.letters)))

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return (~self) ** (-n)
        return Word(self.alphabet, self.letters * n)

    def is_identity(self) -> bool:
        return not self.letters

    def cyclic_reduce(self) -> tuple["Word", "Word"]:
        """Return (core, conjugator) with self = conjugator * core * ~conjugator."""
        ls = self.letters
        i, j = 0, len(ls)
        while j - i >= 2 and ls[i] == -ls[j - 1]:
            i += 1
            j -= 1
        return Word._make(self.alphabet, ls[i:j]), Word._make(self.alphabet, ls[:i])

    def rotation(self, i: int) -> "Word":
        ls = self.letters
        return Word(self.alphabet, ls[i:] + ls[:i])

    def least_rotation(self) -> "Word":
        """Lexicographically least cyclic rotation (letter index, + before -)."""
        if not self.letters:
            return self
        key = lambda ls: tuple((abs(lt), lt < 0) for lt in ls)
        ls = self.letters
        best = min(range(len(ls)), key=lambda i: key(ls[i:] + ls[:i]))
        return self.rotation(best)


def identity(alphabet: Alphabet) -> Word:
    return Word._make(alphabet, ())


def generator(alphabet: Alphabet, index: int, sign: int = 1) -> Word:
    return Word(alphabet, (letter(index, sign),))


def free_reduce(raw: Sequence[int], alphabet: Alphabet) -> Word:
    """Freely reduce a raw letter sequence into a Word."""
    return Word(alphabet, raw)


def concat(u: Word, v: Word) -> Word:
    return u * v


def invert(u: Word) -> Word:
    return ~u


def free_conjugacy(u: Word, v: Word) -> Optional[Word]:
    """Find z with ~z * u * z == v in the free group, or None.

    The cores of u and v are conjugate iff one is a rotation of the other.
    """
    u._require_same_alphabet(v)
    cu, zu = u.cyclic_reduce()
    cv, zv = v.cyclic_reduce()
    if len(cu) != len(cv):
        return None
    if cu.least_rotation() != cv.least_rotation():
        return None
    n = len(cu)
    for i in range(max(n, 1)):
        if cu.rotation(i) == cv:
            prefix = Word(u.alphabet, cu.letters[:i])
            z = zu * prefix * ~zv
            assert ~z * u * z == v
            return z
    return None


def substitute(w: Word, images: Sequence[Word], target: Alphabet) -> Word:
    """Apply the homomorphism sending letter i to images[i]; inverses map to inverses."""
    if len(images) != len(w.alphabet):
        raise ValueError("substitution table must cover the whole alphabet")
    out: list[int] = []
    push = out.append
    pop = out.pop
    for lt in w.letters:
        img = images[abs(lt) - 1]
        if img.alphabet != target:
            raise ValueError("substitution image over wrong alphabet")
        seq = img.letters if lt > 0 else tuple(-x for x in reversed(img.letters))
        for x in seq:
            if out and out[-1] == -x:
                pop()
            else:
                push(x)
    return Word._make(target, tuple(out))


class WordSyntaxError(ValueError):
    """Malformed word text; carries the character offset of the bad token."""

    def __init__(self, message: str, column: int):
        super().__init__(f"column {column}: {message}")
        self.column = column


def parse_word(text: str, alphabet: Alphabet) -> Word:
    """Parse whitespace-separated `name` / `name^k` tokens; empty text is the identity."""
    letters: list[int] = []
    pos = 0
    for token in text.split():
        column = text.index(token, pos) + 1
        pos = column - 1 + len(token)
        m = _TOKEN_RE.match(token)
        if not m:
            raise WordSyntaxError(f"bad token {token!r}", column)
        name, exp = m.group(1), m.group(2)
        if name not in alphabet:
            raise WordSyntaxError(f"unknown generator {name!r}", column)
        k = 1 if exp is None else int(exp)
        if k == 0:
            raise WordSyntaxError(f"zero exponent in {token!r}", column)
        lt = letter(alphabet.index(name), 1 if k > 0 else -1)
        letters.extend([lt] * abs(k))
    return Word(alphabet, letters)


def format_word(w: Word) -> str:
    """Inverse of parse_word up to normalization; the identity prints as ''."""
    parts: list[str] = []
    run_letter = 0
    run = 0
    for lt in list(w.letters) + [0]:
        if lt == run_letter:
            run += 1
            continue
        if run_letter:
            name = w.alphabet.names[abs(run_letter) - 1]
            exp = run if run_letter > 0 else -run
            parts.append(name if exp == 1 else f"{name}^{exp}")
        run_letter = lt
        run = 1
    return " ".join(parts)
