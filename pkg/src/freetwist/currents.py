"""Windowed counting currents: cylinder counts of a cyclic word up to radius R.

counts(g) is the number of positions of the bi-infinite periodic word of h
at which g or g^-1 starts.  Only nonzero counts are stored.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np

from .automorphism import Automorphism, apply
from .errors import RadiusMismatch, TrivialWord
from .splitting import AMALGAM, CyclicSplitting
from .words import (
    Basis,
    CyclicWord,
    Word,
    fmt,
    inverse,
    letter_key,
    parse,
    reduce,
    reduced_words,
)

DEFAULT_RADIUS = 3
# below this length windows are counted with plain slicing
_SMALL = 20_000


@dataclass(frozen=True)
class WindowedCurrent:
    rank: int
    radius: int
    counts: Mapping[Word, int]
    omega: int

    def __getitem__(self, g) -> int:
        if isinstance(g, str):
            g = parse(g)
        return self.counts.get(tuple(g), 0)

    def normalized(self, g) -> Fraction:
        return Fraction(self[g], self.omega)

    @property
    def basis(self) -> Basis:
        return Basis(self.rank)

    def scaled(self, factor: int) -> "WindowedCurrent":
        return WindowedCurrent(self.rank, self.radius, {g: factor * v for g, v in self.counts.items()}, factor * self.omega)

    def dump(self) -> str:
        """Header line then one "word count" line per nonzero cylinder."""
        names = "".join(self.basis.names)
        lines = [f"# basis={names} R={self.radius} omega={self.omega}"]
        for g in sorted(self.counts, key=lambda w: (len(w), [letter_key(x) for x in w])):
            lines.append(f"{fmt(g)} {self.counts[g]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def load(cls, text: str) -> "WindowedCurrent":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        header = dict(item.split("=", 1) for item in lines[0].lstrip("#").split())
        counts = {}
        for ln in lines[1:]:
            word, value = ln.split()
            counts[parse(word)] = int(value)
        return cls(len(header["basis"]), int(header["R"]), counts, int(header["omega"]))


def _count_small(rep: Word, radius: int) -> Dict[Word, int]:
    n = len(rep)
    text = rep * (-(-(n + radius) // n))
    counts: Dict[Word, int] = {}
    for i in range(n):
        for r in range(1, radius + 1):
            g = text[i : i + r]
            counts[g] = counts.get(g, 0) + 1
            gi = inverse(g)
            counts[gi] = counts.get(gi, 0) + 1
    return counts


def _count_numpy(rep: Word, rank: int, radius: int) -> Dict[Word, int]:
    """Same as _count_small, with integer keys per window and np.unique."""
    n = len(rep)
    arr = np.asarray(rep, dtype=np.int64)
    codes = np.where(arr > 0, 2 * (arr - 1), 2 * (-arr - 1) + 1)
    ext = np.concatenate([codes, codes[: radius]]) if n >= radius else np.tile(codes, radius // n + 2)
    base = 2 * rank
    if base ** radius >= 2 ** 62:
        raise ValueError("window radius too large for integer keys")
    decode = [(x // 2 + 1) if x % 2 == 0 else -(x // 2 + 1) for x in range(base)]
    counts: Dict[Word, int] = {}
    key = np.zeros(n, dtype=np.int64)
    for r in range(1, radius + 1):
        key = key * base + ext[r - 1 : r - 1 + n]
        uniq, freq = np.unique(key, return_counts=True)
        for kv, f in zip(uniq.tolist(), freq.tolist()):
            digits = []
            for _ in range(r):
                kv, d = divmod(kv, base)
                digits.append(decode[d])
            g = tuple(reversed(digits))
            counts[g] = counts.get(g, 0) + f
            gi = inverse(g)
            counts[gi] = counts.get(gi, 0) + f
    return counts


def counting_current(h: Sequence[int], radius: int = DEFAULT_RADIUS, rank: Optional[int] = None) -> WindowedCurrent:
    """eta_h on cylinders of length <= radius.

    For h = f^m the counts are m times those of f, as the definition of
    eta_h for proper powers requires; counting over all |h| positions of
    the periodic word gives the same numbers, which is what long words use.
    """
    if radius < 1:
        raise ValueError("radius must be positive")
    cw = CyclicWord.of(h)
    if not cw.representative:
        raise TrivialWord("h is trivial")
    rank = rank or max(2, max(abs(x) for x in cw.representative))
    if len(cw) <= _SMALL:
        m = cw.multiplicity
        counts = _count_small(cw.root, radius)
        if m > 1:
            counts = {g: m * v for g, v in counts.items()}
    else:
        counts = _count_numpy(cw.representative, rank, radius)
    return WindowedCurrent(rank, radius, counts, len(cw))


def push_current(phi: Automorphism, h: Sequence[int], radius: int = DEFAULT_RADIUS, budget=None) -> WindowedCurrent:
    """phi eta_h = eta_{phi(h)}, with the proper-power rule applied to the image."""
    return counting_current(apply(phi, reduce(h), budget), radius, phi.rank)


def edge_current(edge: Sequence[int], radius: int = DEFAULT_RADIUS, rank: Optional[int] = None) -> WindowedCurrent:
    return counting_current(edge, radius, rank)


@dataclass(frozen=True)
class ProjectiveGap:
    radius: int
    sup_gap: Fraction
    argmax: Word = ()

    def to_record(self) -> dict:
        return {"R": self.radius, "supGap": _frac(self.sup_gap), "argmax": fmt(self.argmax)}


def _frac(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def projective_gap(nu1: WindowedCurrent, nu2: WindowedCurrent) -> ProjectiveGap:
    """max over nontrivial |g| <= R of |nu1(g)/omega1 - nu2(g)/omega2|, exactly."""
    if nu1.radius != nu2.radius or nu1.rank != nu2.rank:
        raise RadiusMismatch(f"windows differ: rank {nu1.rank}/{nu2.rank}, R {nu1.radius}/{nu2.radius}")
    if nu1.omega <= 0 or nu2.omega <= 0:
        raise ValueError("both windows need positive weight")
    best, arg = Fraction(0), ()
    keys = set(nu1.counts) | set(nu2.counts)
    for g in sorted(keys, key=lambda w: (len(w), [letter_key(x) for x in w])):
        d = abs(Fraction(nu1.counts.get(g, 0), nu1.omega) - Fraction(nu2.counts.get(g, 0), nu2.omega))
        if d > best:
            best, arg = d, g
    return ProjectiveGap(nu1.radius, best, arg)


def invariant_violations(nu: WindowedCurrent) -> List[str]:
    """Flip invariance, one-letter extension consistency and the weight."""
    out = []
    letters = Basis(nu.rank).letters()
    for g, v in nu.counts.items():
        if nu.counts.get(inverse(g), 0) != v:
            out.append(f"flip {fmt(g)}")
    for r in range(1, nu.radius):
        for g in reduced_words(nu.rank, r):
            ext = sum(nu.counts.get(g + (z,), 0) for z in letters if z != -g[-1])
            if ext != nu.counts.get(g, 0):
                out.append(f"extension {fmt(g)}")
    if sum(nu.counts.get((x,), 0) for x in range(1, nu.rank + 1)) != nu.omega:
        out.append("omega")
    return out


def pairing(T: CyclicSplitting, nu: WindowedCurrent) -> int:
    """<T, nu> as a linear functional on a window in T's relative letters.

    amalgam: sum over transitions y c^i a (y in b_part, a in a_part minus c);
    hnn: <t0, nu> - sum over i != 0 of <t0^-1 c^i t0, nu>.  Exact for
    counting currents whose edge-letter runs are shorter than R - 1.
    """
    c = T.edge
    if T.kind == AMALGAM:
        pure_a = set(T.a_part) - {c}
        b = set(T.b_part)
        total = 0
        for g, v in nu.counts.items():
            if len(g) >= 2 and abs(g[0]) in b and abs(g[-1]) in pure_a and all(abs(z) == c for z in g[1:-1]):
                mid = g[1:-1]
                if len(set(mid)) <= 1:
                    total += v
        return total
    t = T.stable
    total = nu.counts.get((t,), 0)
    for g, v in nu.counts.items():
        if len(g) >= 3 and g[0] == -t and g[-1] == t and len(set(g[1:-1])) == 1 and abs(g[1]) == c:
            total -= v
    return total


def required_radius(T: CyclicSplitting, w_rel: Sequence[int]) -> int:
    """Radius at which ``pairing`` is exact for the class of w_rel."""
    return len(CyclicWord.of(w_rel)) + 2
