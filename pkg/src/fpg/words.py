"""Free-group words.

A word is stored as a tuple of nonzero integer codes: generator ``i`` is
``i + 1`` and its inverse ``-(i + 1)``. Words are freely reduced on
construction, so every operation returns a reduced word.

Text syntax: lowercase letters are generators and uppercase letters their
inverses (``"abAB"``); ``x1 x2^-1`` indexes generators from 1. Parentheses,
integer exponents ``^n``, left-normed commutators ``[u,v,w]`` and
relations ``u = v`` are also accepted by :func:`parse_word`.
"""

from typing import Iterable, NamedTuple, Optional, Sequence

from . import kernels
from .errors import WordSyntaxError


class Letter(NamedTuple):
    index: int
    sign: int

    @property
    def code(self) -> int:
        return (self.index + 1) * self.sign

    @classmethod
    def from_code(cls, c: int) -> "Letter":
        return cls(abs(c) - 1, 1 if c > 0 else -1)


def _codes(letters) -> list:
    out = []
    for x in letters:
        if isinstance(x, Letter):
            if x.sign not in (1, -1) or x.index < 0:
                raise ValueError(f"bad letter {x!r}")
            out.append(x.code)
        else:
            c = int(x)
            if c == 0:
                raise ValueError("letter code 0 is not a generator")
            out.append(c)
    return out


class Word:
    """An element of a free group, freely reduced."""

    __slots__ = ("codes", "_hash")

    def __init__(self, letters: Iterable = ()):
        self.codes = tuple(kernels.free_reduce(_codes(letters)))
        self._hash = None

    @classmethod
    def _raw(cls, codes: tuple) -> "Word":
        w = object.__new__(cls)
        w.codes = codes
        w._hash = None
        return w

    @classmethod
    def generator(cls, index: int, power: int = 1) -> "Word":
        c = index + 1 if power > 0 else -(index + 1)
        return cls._raw((c,) * abs(power))

    def letters(self) -> list:
        return [Letter.from_code(c) for c in self.codes]

    def __iter__(self):
        return (Letter.from_code(c) for c in self.codes)

    def __len__(self) -> int:
        return len(self.codes)

    def __bool__(self) -> bool:
        return bool(self.codes)

    def __eq__(self, other) -> bool:
        if isinstance(other, Word):
            return self.codes == other.codes
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.codes)
        return self._hash

    def __repr__(self) -> str:
        return f"Word({format_word(self)!r})"

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def __invert__(self) -> "Word":
        return invert(self)

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return invert(self) ** -n
        return Word(self.codes * n)

    def max_index(self) -> int:
        """Largest generator index used, or -1 for the identity."""
        return max((abs(c) for c in self.codes), default=0) - 1


IDENTITY = Word()


def reduce(w) -> Word:
    """Freely reduce a word or any sequence of letters/codes."""
    if isinstance(w, Word):
        return w
    return Word(w)


def multiply(u: Word, v: Word) -> Word:
    a, b = u.codes, v.codes
    k = 0
    n = min(len(a), len(b))
    while k < n and a[len(a) - 1 - k] == -b[k]:
        k += 1
    return Word._raw(a[: len(a) - k] + b[k:])


def invert(w: Word) -> Word:
    return Word._raw(tuple(-c for c in reversed(w.codes)))


def conjugate(w: Word, g: Word) -> Word:
    """``g^-1 w g``."""
    return multiply(multiply(invert(g), w), g)


def commutator(h: Word, k: Word) -> Word:
    """``h^-1 k^-1 h k``."""
    return multiply(multiply(invert(h), invert(k)), multiply(h, k))


def exponent_sums(w: Word, rank: int) -> list:
    out = [0] * rank
    for c in w.codes:
        i = abs(c) - 1
        if i >= rank:
            raise IndexError(f"generator index {i} out of range for rank {rank}")
        out[i] += 1 if c > 0 else -1
    return out


def cyclic_reduce(w: Word) -> Word:
    a = w.codes
    i, j = 0, len(a) - 1
    while i < j and a[i] == -a[j]:
        i += 1
        j -= 1
    return Word._raw(a[i: j + 1])


# --- text syntax ---------------------------------------------------------

class _Parser:
    def __init__(self, text: str, names: Optional[Sequence[str]]):
        self.text = text
        self.pos = 0
        self.names = names
        self.lookup = {n: i for i, n in enumerate(names)} if names else None

    def error(self, msg, pos=None):
        raise WordSyntaxError(msg, self.text, self.pos if pos is None else pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def integer(self):
        self.skip()
        start = self.pos
        if self.peek() in "+-":
            self.pos += 1
        self.skip()
        d0 = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == d0:
            self.error("expected integer", start)
        return int(self.text[start:self.pos].replace(" ", ""))

    def relation(self) -> Word:
        lhs = self.product()
        if self.peek() == "=":
            self.pos += 1
            rhs = self.product()
            lhs = multiply(lhs, invert(rhs))
        if self.pos < len(self.text):
            self.error(f"unexpected {self.text[self.pos]!r}")
        return lhs

    def product(self) -> Word:
        w = IDENTITY
        while True:
            ch = self.peek()
            if ch == "" or ch in ")],=":
                return w
            if ch == "*":
                self.pos += 1
                continue
            w = multiply(w, self.power())

    def power(self) -> Word:
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            base = base ** self.integer()
        return base

    def atom(self) -> Word:
        ch = self.peek()
        start = self.pos
        if ch == "(":
            self.pos += 1
            w = self.product()
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
            return w
        if ch == "[":
            self.pos += 1
            parts = [self.product()]
            while self.peek() == ",":
                self.pos += 1
                parts.append(self.product())
            if self.peek() != "]":
                self.error("expected ']'")
            self.pos += 1
            if len(parts) < 2:
                self.error("commutator needs two entries", start)
            w = parts[0]
            for p in parts[1:]:
                w = commutator(w, p)
            return w
        if ch == "1":
            self.pos += 1
            return IDENTITY
        if ch.isalpha():
            return self.generator()
        if ch == "":
            self.error("unexpected end of input")
        self.error(f"unexpected {ch!r}")

    def generator(self) -> Word:
        text = self.text
        start = self.pos
        ch = text[start]
        if ch in "xX" and start + 1 < len(text) and text[start + 1].isdigit():
            self.pos += 1
            d0 = self.pos
            while self.pos < len(text) and text[self.pos].isdigit():
                self.pos += 1
            index = int(text[d0:self.pos]) - 1
            if index < 0:
                self.error("generator indices start at 1", start)
            return Word.generator(index, 1 if ch == "x" else -1)
        self.pos += 1
        if self.lookup is not None:
            if ch in self.lookup:
                return Word.generator(self.lookup[ch], 1)
            if ch.swapcase() in self.lookup and ch.isupper():
                return Word.generator(self.lookup[ch.lower()], -1)
            self.error(f"unknown generator {ch!r}", start)
        if not ("a" <= ch.lower() <= "z"):
            self.error(f"unknown generator {ch!r}", start)
        index = ord(ch.lower()) - ord("a")
        return Word.generator(index, 1 if ch.islower() else -1)


def parse_word(text: str, names: Optional[Sequence[str]] = None) -> Word:
    """Parse word or relation syntax; ``u = v`` becomes ``u v^-1``.

    ``names`` maps single-letter generator names to indices; without it
    ``a`` is generator 0, ``b`` generator 1, and so on.
    """
    return _Parser(text, names).relation()


def format_word(w: Word, names: Optional[Sequence[str]] = None) -> str:
    if not w.codes:
        return "1"
    top = w.max_index()
    if names is None and top < 26:
        names = [chr(ord("a") + i) for i in range(26)]
    if names is not None and top < len(names) and all(len(n) == 1 and n.islower() for n in names[: top + 1]):
        return "".join(names[abs(c) - 1] if c > 0 else names[abs(c) - 1].upper() for c in w.codes)
    parts = []
    i = 0
    a = w.codes
    while i < len(a):
        j = i
        while j < len(a) and a[j] == a[i]:
            j += 1
        n = (j - i) * (1 if a[i] > 0 else -1)
        gen = f"x{abs(a[i])}"
        parts.append(gen if n == 1 else f"{gen}^{n}")
        i = j
    return " ".join(parts)
