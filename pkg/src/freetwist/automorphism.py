"""Automorphisms of F_k stored as letter images, optionally with a Nielsen factorization.

Elements are automorphisms, not outer classes.  Quantities that only depend
on conjugacy classes (translation lengths, counting currents, the induced
matrix) do not see the difference; ``apply`` does.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .errors import BudgetExceeded, ConfigError, NotInvertibleData, RankMismatch
from .intmat import IntMatrix
from .words import Word, fmt, inverse, is_reduced, reduce

DEFAULT_BUDGET = 10_000_000


def default_budget() -> int:
    env = os.environ.get("FG_BUDGET")
    if not env:
        return DEFAULT_BUDGET
    try:
        value = int(env)
    except ValueError:
        raise ConfigError(f"FG_BUDGET must be an integer, got {env!r}") from None
    if value <= 0:
        raise ConfigError("FG_BUDGET must be positive")
    return value


@dataclass(frozen=True)
class ElementaryMove:
    """One Nielsen-type generator.

    kinds: ``left_multiply`` (a_i -> letter a_i), ``right_multiply``
    (a_i -> a_i letter), ``invert`` (a_i -> a_i^-1), ``swap`` (i, j),
    ``permute`` (a_i -> a_perm[i]) and ``inner`` (x -> u x u^-1).
    ``letter`` is a signed letter, so its inverse is ``-letter``.
    """

    kind: str
    i: int = 0
    j: int = 0
    letter: int = 0
    perm: Tuple[int, ...] = ()
    word: Word = ()

    def __post_init__(self):
        if self.kind in ("left_multiply", "right_multiply"):
            if self.i < 1 or self.letter == 0 or abs(self.letter) == self.i:
                raise ValueError(f"bad multiply move {self}")
        elif self.kind == "swap":
            if self.i == self.j or min(self.i, self.j) < 1:
                raise ValueError("swap needs two distinct indices")
        elif self.kind == "invert":
            if self.i < 1:
                raise ValueError("invert needs an index")
        elif self.kind == "permute":
            if sorted(self.perm) != list(range(1, len(self.perm) + 1)):
                raise ValueError(f"not a permutation: {self.perm}")
        elif self.kind == "inner":
            object.__setattr__(self, "word", reduce(self.word))
        else:
            raise ValueError(f"unknown move kind {self.kind!r}")

    def images(self, rank: int) -> Tuple[Word, ...]:
        imgs = [(i,) for i in range(1, rank + 1)]
        k = self.kind
        if k == "left_multiply":
            imgs[self.i - 1] = (self.letter, self.i)
        elif k == "right_multiply":
            imgs[self.i - 1] = (self.i, self.letter)
        elif k == "invert":
            imgs[self.i - 1] = (-self.i,)
        elif k == "swap":
            imgs[self.i - 1], imgs[self.j - 1] = (self.j,), (self.i,)
        elif k == "permute":
            if len(self.perm) != rank:
                raise RankMismatch("permutation length differs from rank")
            imgs = [(p,) for p in self.perm]
        elif k == "inner":
            u, ui = self.word, inverse(self.word)
            imgs = [reduce(u + (i,) + ui) for i in range(1, rank + 1)]
        return tuple(imgs)

    def inverse(self) -> "ElementaryMove":
        k = self.kind
        if k in ("left_multiply", "right_multiply"):
            return ElementaryMove(k, i=self.i, letter=-self.letter)
        if k == "permute":
            inv = [0] * len(self.perm)
            for src, dst in enumerate(self.perm, start=1):
                inv[dst - 1] = src
            return ElementaryMove(k, perm=tuple(inv))
        if k == "inner":
            return ElementaryMove(k, word=inverse(self.word))
        return self

    def to_record(self) -> dict:
        rec = {"kind": self.kind}
        if self.kind in ("left_multiply", "right_multiply"):
            rec.update(i=self.i, letter=fmt((self.letter,)))
        elif self.kind == "invert":
            rec.update(i=self.i)
        elif self.kind == "swap":
            rec.update(i=self.i, j=self.j)
        elif self.kind == "permute":
            rec.update(perm=list(self.perm))
        else:
            rec.update(word=fmt(self.word))
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "ElementaryMove":
        from .words import parse

        kind = rec["kind"]
        if kind in ("left_multiply", "right_multiply"):
            (letter,) = parse(rec["letter"])
            return cls(kind, i=int(rec["i"]), letter=letter)
        if kind == "invert":
            return cls(kind, i=int(rec["i"]))
        if kind == "swap":
            return cls(kind, i=int(rec["i"]), j=int(rec["j"]))
        if kind == "permute":
            return cls(kind, perm=tuple(int(p) for p in rec["perm"]))
        if kind == "inner":
            return cls(kind, word=parse(rec["word"]))
        raise ValueError(f"unknown move kind {kind!r}")


def left_multiply(i, letter):
    return ElementaryMove("left_multiply", i=i, letter=letter)


def right_multiply(i, letter):
    return ElementaryMove("right_multiply", i=i, letter=letter)


def invert_letter(i):
    return ElementaryMove("invert", i=i)


def swap(i, j):
    return ElementaryMove("swap", i=i, j=j)


def permute(perm):
    return ElementaryMove("permute", perm=tuple(perm))


def inner(word):
    return ElementaryMove("inner", word=tuple(word))


class Automorphism:
    """Letter images of an automorphism, with an optional inverse witness.

    ``factors`` (m1, ..., mr) means the map m1 o m2 o ... o mr, so the
    rightmost move acts first.  Construction checks every witness that is
    supplied; ``check=False`` is for internal callers that build images and
    witnesses together.
    """

    __slots__ = ("rank", "images", "inverse_images", "factors", "_table", "_lens")

    def __init__(
        self,
        rank: int,
        images: Sequence[Sequence[int]],
        inverse_images: Optional[Sequence[Sequence[int]]] = None,
        factors: Optional[Sequence[ElementaryMove]] = None,
        check: bool = True,
    ):
        self.rank = rank
        self.images = tuple(tuple(w) for w in images)
        self.inverse_images = None if inverse_images is None else tuple(tuple(w) for w in inverse_images)
        self.factors = None if factors is None else tuple(factors)
        if len(self.images) != rank:
            raise RankMismatch(f"expected {rank} images, got {len(self.images)}")
        table = {}
        for i, img in enumerate(self.images, start=1):
            table[i] = img
            table[-i] = inverse(img)
        self._table = table
        self._lens = {x: len(w) for x, w in table.items()}
        if check:
            self._verify()

    def _verify(self):
        for w in self.images:
            if not is_reduced(w) or any(abs(x) > self.rank or x == 0 for x in w):
                raise ValueError(f"image {fmt(w)} is not a reduced word of rank {self.rank}")
        if self.inverse_images is not None:
            inv = Automorphism(self.rank, self.inverse_images, check=False)
            for i in range(1, self.rank + 1):
                if apply(self, inv.images[i - 1]) != (i,) or apply(inv, self.images[i - 1]) != (i,):
                    raise NotInvertibleData(f"inverse images do not invert letter {fmt((i,))}")
        if self.factors is not None:
            if _images_from_factors(self.factors, self.rank) != self.images:
                raise ValueError("factors do not compose to the given images")

    @property
    def invertible(self) -> bool:
        return self.inverse_images is not None or self.factors is not None

    def __call__(self, w, budget=None):
        return apply(self, w, budget)

    def __eq__(self, other):
        return isinstance(other, Automorphism) and self.rank == other.rank and self.images == other.images

    def __hash__(self):
        return hash((self.rank, self.images))

    def __repr__(self):
        body = ", ".join(f"{fmt((i,))}->{fmt(w)}" for i, w in enumerate(self.images, start=1))
        return f"Automorphism({body})"

    def max_image_length(self) -> int:
        return max(len(w) for w in self.images)

    def to_record(self) -> dict:
        rec = {"rank": self.rank, "images": [fmt(w) for w in self.images]}
        if self.inverse_images is not None:
            rec["inverseImages"] = [fmt(w) for w in self.inverse_images]
        if self.factors is not None:
            rec["factors"] = [m.to_record() for m in self.factors]
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "Automorphism":
        from .words import parse

        rank = int(rec["rank"])
        images = [parse(s) for s in rec["images"]]
        inv = rec.get("inverseImages")
        inv = None if inv is None else [parse(s) for s in inv]
        factors = rec.get("factors")
        factors = None if factors is None else [ElementaryMove.from_record(m) for m in factors]
        return cls(rank, images, inv, factors)


def _expand(w, table) -> Word:
    out = []
    push, pop = out.append, out.pop
    for x in w:
        for y in table[x]:
            if out and out[-1] == -y:
                pop()
            else:
                push(y)
    return tuple(out)


def _images_from_factors(factors, rank) -> Tuple[Word, ...]:
    images = tuple((i,) for i in range(1, rank + 1))
    for move in reversed(factors):
        mv = Automorphism(rank, move.images(rank), check=False)
        images = tuple(_expand(w, mv._table) for w in images)
    return images


def identity(rank: int) -> Automorphism:
    return Automorphism(rank, [(i,) for i in range(1, rank + 1)], factors=(), check=False)


def from_moves(moves: Sequence[ElementaryMove], rank: int) -> Automorphism:
    moves = tuple(moves)
    return Automorphism(rank, _images_from_factors(moves, rank), factors=moves, check=False)


def apply(phi: Automorphism, w: Sequence[int], budget: Optional[int] = None) -> Word:
    """Reduced image of the reduced word w; raises BudgetExceeded past the cap."""
    if budget is None:
        budget = default_budget()
    lens = phi._lens
    try:
        est = sum(lens[x] for x in w)
    except KeyError as exc:
        raise RankMismatch(f"letter {exc.args[0]} outside rank {phi.rank}") from None
    if est > budget:
        raise BudgetExceeded(est, budget)
    return _expand(w, phi._table)


def compose(phi: Automorphism, psi: Automorphism) -> Automorphism:
    """phi o psi (psi acts first)."""
    if phi.rank != psi.rank:
        raise RankMismatch(f"ranks {phi.rank} and {psi.rank} differ")
    images = tuple(_expand(w, phi._table) for w in psi.images)
    factors = None
    if phi.factors is not None and psi.factors is not None:
        factors = phi.factors + psi.factors
    inv_images = None
    if factors is None and phi.invertible and psi.invertible:
        pi, ppi = invert_aut(psi), invert_aut(phi)
        inv_images = tuple(_expand(w, pi._table) for w in ppi.images)
    return Automorphism(phi.rank, images, inv_images, factors, check=False)


def invert_aut(phi: Automorphism) -> Automorphism:
    if phi.factors is not None:
        factors = tuple(m.inverse() for m in reversed(phi.factors))
        return Automorphism(phi.rank, _images_from_factors(factors, phi.rank), phi.images, factors, check=False)
    if phi.inverse_images is not None:
        return Automorphism(phi.rank, phi.inverse_images, phi.images, check=False)
    raise NotInvertibleData("no factors or inverse images to invert with")


def power(phi: Automorphism, n: int) -> Automorphism:
    base = phi if n >= 0 else invert_aut(phi)
    result = identity(phi.rank)
    # square-and-multiply keeps the image work logarithmic in |n|
    sq, k = base, abs(n)
    while k:
        if k & 1:
            result = compose(result, sq)
        k >>= 1
        if k:
            sq = compose(sq, sq)
    return result


def conjugate(sigma: Automorphism, phi: Automorphism) -> Automorphism:
    """sigma o phi o sigma^-1."""
    return compose(compose(sigma, phi), invert_aut(sigma))


def abelianization(phi: Automorphism) -> IntMatrix:
    """Induced matrix on Z^k; column j is the exponent vector of phi(a_j)."""
    k = phi.rank
    rows = [[0] * k for _ in range(k)]
    for j, img in enumerate(phi.images):
        for x in img:
            rows[abs(x) - 1][j] += 1 if x > 0 else -1
    return IntMatrix(rows)


def iterate_image(phi: Automorphism, w: Sequence[int], m: int, budget: Optional[int] = None) -> Word:
    if budget is None:
        budget = default_budget()
    w = reduce(w)
    for step in range(m):
        try:
            w = apply(phi, w, budget)
        except BudgetExceeded as exc:
            raise BudgetExceeded(exc.estimate, budget, index=step) from None
    return w


def is_identity(phi: Automorphism) -> bool:
    return all(img == (i,) for i, img in enumerate(phi.images, start=1))
