"""Reduced and cyclic words in a free group of rank k.

A word is a tuple of nonzero ints: ``i`` stands for the i-th basis letter
and ``-i`` for its inverse (1-based).  The text form uses lowercase
letters for generators and uppercase for inverses, with ``"1"`` for the
empty word, so ``"abA"`` is ``(1, 2, -1)``.
"""

from __future__ import annotations

import random
import string
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence, Tuple

from .errors import TrivialWord

Word = Tuple[int, ...]

EMPTY: Word = ()
MAX_RANK = 26


@dataclass(frozen=True)
class Basis:
    rank: int
    names: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.rank < 2:
            raise ValueError("rank must be at least 2")
        if not self.names:
            if self.rank > MAX_RANK:
                raise ValueError(f"default names only cover rank <= {MAX_RANK}")
            object.__setattr__(self, "names", tuple(string.ascii_lowercase[: self.rank]))
        if len(self.names) != self.rank or len(set(self.names)) != self.rank:
            raise ValueError("need exactly `rank` distinct letter names")

    def letters(self) -> Tuple[int, ...]:
        """All signed letters in canonical order: a, A, b, B, ..."""
        return tuple(x for i in range(1, self.rank + 1) for x in (i, -i))


# --- text format -----------------------------------------------------------

def parse(text: str) -> Word:
    text = text.strip()
    if text in ("", "1"):
        return EMPTY
    out = []
    for ch in text:
        if "a" <= ch <= "z":
            out.append(ord(ch) - ord("a") + 1)
        elif "A" <= ch <= "Z":
            out.append(-(ord(ch) - ord("A") + 1))
        else:
            raise ValueError(f"bad letter {ch!r} in word {text!r}")
    return tuple(out)


def fmt(w: Sequence[int]) -> str:
    if not w:
        return "1"
    return "".join(chr(ord("a") + x - 1) if x > 0 else chr(ord("A") - x - 1) for x in w)


def rank_of(w: Sequence[int]) -> int:
    return max((abs(x) for x in w), default=0)


# --- free reduction --------------------------------------------------------

def reduce(w: Sequence[int]) -> Word:
    out = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def is_reduced(w: Sequence[int]) -> bool:
    return all(w[i] != -w[i + 1] for i in range(len(w) - 1))


def is_cyclically_reduced(w: Sequence[int]) -> bool:
    return is_reduced(w) and (len(w) < 2 or w[0] != -w[-1])


def inverse(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def multiply(*words: Sequence[int]) -> Word:
    return reduce([x for w in words for x in w])


def power(w: Sequence[int], n: int) -> Word:
    base = reduce(w) if n >= 0 else inverse(reduce(w))
    return reduce(base * abs(n))


def exponent_vector(w: Sequence[int], rank: int) -> Tuple[int, ...]:
    v = [0] * rank
    for x in w:
        v[abs(x) - 1] += 1 if x > 0 else -1
    return tuple(v)


# --- cyclic words ----------------------------------------------------------

def letter_key(x: int) -> int:
    # a < A < b < B < ...
    return 2 * abs(x) + (1 if x < 0 else 0)


def least_rotation(w: Sequence[int]) -> int:
    """Offset of the lexicographically least rotation (Booth's algorithm)."""
    s = [letter_key(x) for x in w]
    n = len(s)
    if n == 0:
        return 0
    s = s + s
    f = [-1] * len(s)
    k = 0
    for j in range(1, len(s)):
        sj = s[j]
        i = f[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != s[k + i + 1]:
            if sj < s[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k % n


def primitive_period(w: Sequence[int]) -> int:
    """Length of the shortest root f with w = f^m (KMP failure function)."""
    n = len(w)
    if n == 0:
        return 0
    fail = [0] * n
    k = 0
    for i in range(1, n):
        while k and w[i] != w[k]:
            k = fail[k - 1]
        if w[i] == w[k]:
            k += 1
        fail[i] = k
    p = n - fail[-1]
    return p if n % p == 0 else n


@dataclass(frozen=True)
class CyclicWord:
    representative: Word
    canonical: Word

    @classmethod
    def of(cls, w: Sequence[int]) -> "CyclicWord":
        rep, _ = _cyclic_core(reduce(w))
        k = least_rotation(rep)
        return cls(rep, rep[k:] + rep[:k])

    def __len__(self):
        return len(self.representative)

    @property
    def period(self) -> int:
        return primitive_period(self.canonical)

    @property
    def root(self) -> Word:
        return self.canonical[: self.period]

    @property
    def multiplicity(self) -> int:
        return len(self.canonical) // self.period if self.canonical else 0

    def __str__(self):
        return fmt(self.canonical)


def _cyclic_core(w: Word) -> Tuple[Word, Word]:
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return w[i : j + 1], w[:i]


def cyclic_reduce(w: Sequence[int]) -> Tuple[CyclicWord, Word]:
    """Return (cyclic word, conjugator z) with reduce(w) == z * rep * z^-1."""
    r = reduce(w)
    if not r:
        raise TrivialWord("word reduces to the identity")
    rep, z = _cyclic_core(r)
    k = least_rotation(rep)
    return CyclicWord(rep, rep[k:] + rep[:k]), z


def cyclic_length(w: Sequence[int]) -> int:
    r = reduce(w)
    return len(_cyclic_core(r)[0])


def cyclic_representative(w: Sequence[int]) -> Word:
    return _cyclic_core(reduce(w))[0]


def canonical_class(w: Sequence[int]) -> Word:
    """Canonical rotation of the cyclic reduction; the empty word for 1."""
    rep = cyclic_representative(w)
    k = least_rotation(rep)
    return rep[k:] + rep[:k]


def conjugacy_test(x: Sequence[int], y: Sequence[int]) -> bool:
    """True iff x and y are conjugate.  x is not identified with x^-1."""
    return canonical_class(x) == canonical_class(y)


# --- occurrence counting ---------------------------------------------------

def _count_cyclic(g: Word, rep: Word) -> int:
    n = len(rep)
    if n == 0:
        return 0
    m = len(g)
    reps = -(-(n + m - 1) // n)
    text = (rep * reps)[: n + m - 1]
    first = g[0]
    return sum(1 for i in range(n) if text[i] == first and text[i : i + m] == g)


def occurrences_cyclic(g: Sequence[int], h) -> int:
    """Number of positions of the cyclic word h at which g or g^-1 starts.

    The cyclic word is read as a bi-infinite periodic word, so g may be
    longer than h.  ``h`` may be a CyclicWord or any word.
    """
    g = reduce(g)
    if not g:
        raise TrivialWord("g must be nontrivial")
    rep = h.representative if isinstance(h, CyclicWord) else cyclic_representative(h)
    return _count_cyclic(g, rep) + _count_cyclic(inverse(g), rep)


def _count_linear(g: Word, w: Word) -> int:
    m = len(g)
    first = g[0]
    return sum(1 for i in range(len(w) - m + 1) if w[i] == first and w[i : i + m] == g)


def occurrences_linear(g: Sequence[int], w: Sequence[int]) -> int:
    g = reduce(g)
    if not g:
        raise TrivialWord("g must be nontrivial")
    w = tuple(w)
    return _count_linear(g, w) + _count_linear(inverse(g), w)


def letter_occurrences(letter: int, w: Sequence[int]) -> int:
    """Fast <a^{+-1}, w> for a single letter on an already cyclically reduced w."""
    return w.count(letter) + w.count(-letter)


# --- enumeration -----------------------------------------------------------

def reduced_words(rank: int, length: int) -> Iterator[Word]:
    letters = Basis(rank).letters()

    def rec(prefix):
        if len(prefix) == length:
            yield tuple(prefix)
            return
        for x in letters:
            if prefix and prefix[-1] == -x:
                continue
            prefix.append(x)
            yield from rec(prefix)
            prefix.pop()

    yield from rec([])


@lru_cache(maxsize=32)
def class_representatives(rank: int, max_length: int) -> Tuple[Word, ...]:
    """Canonical rotations of all nontrivial conjugacy classes up to max_length.

    Ordered by length, then by the canonical letter order.  x and x^-1
    give separate entries.
    """
    letters = sorted(Basis(rank).letters(), key=letter_key)
    out = []
    for n in range(1, max_length + 1):
        found = []

        def rec(prefix, keys):
            if len(prefix) == n:
                if n > 1 and prefix[0] == -prefix[-1]:
                    return
                for i in range(1, n):
                    if keys[i:] + keys[:i] < keys:
                        return
                found.append(tuple(prefix))
                return
            k0 = keys[0] if keys else None
            for x in letters:
                kx = letter_key(x)
                if k0 is not None and kx < k0:
                    continue
                if prefix and prefix[-1] == -x:
                    continue
                prefix.append(x)
                keys.append(kx)
                rec(prefix, keys)
                prefix.pop()
                keys.pop()

        rec([], [])
        out.extend(found)
    return tuple(out)


def random_reduced_word(rank: int, length: int, rng: random.Random) -> Word:
    out = []
    letters = Basis(rank).letters()
    while len(out) < length:
        x = rng.choice(letters)
        if out and out[-1] == -x:
            continue
        out.append(x)
    return tuple(out)
