"""One-edge cyclic splittings of F_k written in a relative basis.

A splitting stores a change of basis ``rel_change`` (sigma).  The relative
letters are r_i = sigma(a_i), so an element x, given as a word in the
standard basis, reads sigma^-1(x) in relative letters.  All normal forms
and lengths are computed on relative words.

amalgam: relative letters split into ``a_part`` (containing the edge
letter c) and ``b_part``; vertex groups <a_part> and <b_part + c>.

hnn: edge letter c and stable letter t0; the base group is free on the
remaining letters together with u = t0^-1 c t0, and t0^-1 c t0 = u is the
edge relation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from . import automorphism as au
from .automorphism import Automorphism, ElementaryMove
from .errors import TrivialWord
from .words import (
    Word,
    _cyclic_core,
    canonical_class,
    class_representatives,
    fmt,
    inverse,
    parse,
    reduce,
)

AMALGAM = "amalgam"
HNN = "hnn"


@dataclass(frozen=True)
class CyclicSplitting:
    kind: str
    rank: int
    edge: int
    a_part: Tuple[int, ...] = ()
    b_part: Tuple[int, ...] = ()
    stable: int = 0
    rel_change: Automorphism = field(default=None, compare=False)

    def __post_init__(self):
        k = self.rank
        if self.rel_change is None:
            object.__setattr__(self, "rel_change", au.identity(k))
        if self.rel_change.rank != k:
            raise ValueError("relative change of basis has the wrong rank")
        if not self.rel_change.invertible:
            raise ValueError("relative change of basis needs an inverse witness")
        if not 1 <= self.edge <= k:
            raise ValueError("edge letter out of range")
        if self.kind == AMALGAM:
            a, b = set(self.a_part), set(self.b_part)
            if not self.b_part:
                object.__setattr__(self, "b_part", tuple(sorted(set(range(1, k + 1)) - a)))
                b = set(self.b_part)
            if a & b or a | b != set(range(1, k + 1)):
                raise ValueError("a_part and b_part must partition the basis")
            if len(a) < 2 or len(b) < 1 or self.edge not in a:
                raise ValueError("amalgam needs |a_part| >= 2 containing the edge letter and b_part nonempty")
            object.__setattr__(self, "a_part", tuple(sorted(a)))
        elif self.kind == HNN:
            if not 1 <= self.stable <= k or self.stable == self.edge:
                raise ValueError("hnn needs a stable letter distinct from the edge letter")
        else:
            raise ValueError(f"unknown splitting kind {self.kind!r}")

    # identity of a splitting is its combinatorial data plus the images of sigma
    def _key(self):
        return (self.kind, self.rank, self.edge, self.a_part, self.b_part, self.stable, self.rel_change.images)

    def __eq__(self, other):
        return isinstance(other, CyclicSplitting) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @property
    def inverse_change(self) -> Automorphism:
        inv = getattr(self, "_inv", None)
        if inv is None:
            inv = au.invert_aut(self.rel_change)
            object.__setattr__(self, "_inv", inv)
        return inv

    def to_relative(self, x: Sequence[int], budget=None) -> Word:
        return au.apply(self.inverse_change, reduce(x), budget)

    def from_relative(self, w: Sequence[int], budget=None) -> Word:
        return au.apply(self.rel_change, reduce(w), budget)

    def edge_word(self) -> Word:
        """The edge generator c in standard coordinates."""
        return self.rel_change.images[self.edge - 1]

    def describe(self) -> str:
        if self.kind == AMALGAM:
            return (f"amalgam A={fmt(self.a_part)} B={fmt(self.b_part)} c={fmt((self.edge,))} "
                    f"edge word {fmt(self.edge_word())}")
        return f"hnn c={fmt((self.edge,))} t0={fmt((self.stable,))} edge word {fmt(self.edge_word())}"

    def to_record(self) -> dict:
        change = "identity" if au.is_identity(self.rel_change) else self.rel_change.to_record()
        rec = {"kind": self.kind, "rank": self.rank, "relChange": change, "edgeLetter": fmt((self.edge,))}
        if self.kind == AMALGAM:
            rec.update(aPart=[fmt((x,)) for x in self.a_part], bPart=[fmt((x,)) for x in self.b_part])
        else:
            rec.update(c=fmt((self.edge,)), t0=fmt((self.stable,)))
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "CyclicSplitting":
        k = int(rec["rank"])
        ch = rec.get("relChange", "identity")
        sigma = au.identity(k) if ch == "identity" else Automorphism.from_record(ch)
        letter = lambda s: parse(s)[0]
        edge = letter(rec.get("edgeLetter") or rec["c"])
        if rec["kind"] == AMALGAM:
            return cls(AMALGAM, k, edge, tuple(letter(s) for s in rec["aPart"]),
                       tuple(letter(s) for s in rec.get("bPart", ())), rel_change=sigma)
        return cls(HNN, k, edge, stable=letter(rec["t0"]), rel_change=sigma)


def amalgam(rank, a_part, edge, rel_change=None) -> CyclicSplitting:
    return CyclicSplitting(AMALGAM, rank, edge, tuple(a_part), rel_change=rel_change)


def hnn(rank, edge, stable, rel_change=None) -> CyclicSplitting:
    return CyclicSplitting(HNN, rank, edge, stable=stable, rel_change=rel_change)


# --- normal forms ----------------------------------------------------------

@dataclass(frozen=True)
class Elliptic:
    vertex: str  # "A", "B" or "base"
    length: int = 0


@dataclass(frozen=True)
class TReducedForm:
    """Blocks of a T-reduced cyclic word in relative letters.

    amalgam blocks are (x, i, y, j) for x c^i y c^j; hnn blocks are
    (x, i, eps) for x (c^i t0)^eps.  ``length`` is the translation length.
    """

    kind: str
    blocks: Tuple[tuple, ...]
    length: int
    edge: int
    stable: int = 0

    def word(self) -> Word:
        c, out = self.edge, []
        for b in self.blocks:
            if self.kind == AMALGAM:
                x, i, y, j = b
                out += list(x) + _cpow(c, i) + list(y) + _cpow(c, j)
            else:
                x, i, eps = b
                piece = _cpow(c, i) + [self.stable]
                out += list(x) + (piece if eps == 1 else [-z for z in reversed(piece)])
        return tuple(out)


def _cpow(c, i):
    return [c] * i if i >= 0 else [-c] * (-i)


def _cyc(w: Sequence[int]) -> Word:
    return _cyclic_core(reduce(w))[0]


def _amalgam_length(w: Word, a_set, c: int) -> int:
    """2 x (number of maximal a_part runs containing a non-c letter)."""
    n = len(w)
    if n == 0:
        return 0
    if n > 4096:
        return _amalgam_length_np(w, a_set, c)
    start = next((i for i, x in enumerate(w) if abs(x) not in a_set), None)
    if start is None:
        return 0
    runs = 0
    in_run = has_pure_a = False
    for idx in range(n):
        x = w[(start + idx) % n]
        ax = abs(x)
        if ax in a_set:
            if not in_run:
                in_run, has_pure_a = True, False
            if ax != c:
                has_pure_a = True
        elif in_run:
            runs += has_pure_a
            in_run = False
    if in_run:
        runs += has_pure_a
    return 2 * runs


def _amalgam_length_np(w: Word, a_set, c: int) -> int:
    arr = np.abs(np.asarray(w, dtype=np.int64))
    is_a = np.isin(arr, np.fromiter(a_set, dtype=np.int64))
    if is_a.all():
        return 0
    start = int(np.argmin(is_a))
    arr, is_a = np.roll(arr, -start), np.roll(is_a, -start)
    pure = is_a & (arr != c)
    if not pure.any():
        return 0
    starts = is_a & ~np.concatenate(([False], is_a[:-1]))
    run_id = np.cumsum(starts)
    return 2 * int(np.unique(run_id[pure]).size)


def _hnn_pinches(w: Word, c: int, t: int) -> List[Tuple[int, int]]:
    """Cyclic positions (p, q) with w[p] = t0^-1, w[q] = t0 and c^i (i != 0) between."""
    n = len(w)
    out = []
    for p, x in enumerate(w):
        if x != -t:
            continue
        q, steps = (p + 1) % n, 0
        while steps < n - 1 and abs(w[q]) == c:
            q, steps = (q + 1) % n, steps + 1
        if steps > 0 and w[q] == t:
            out.append((p, q))
    return out


def _hnn_length(w: Word, c: int, t: int) -> int:
    if not w:
        return 0
    n_t = w.count(t) + w.count(-t)
    if n_t == 0:
        return 0
    return n_t - 2 * len(_hnn_pinches(w, c, t))


def relative_length(T: CyclicSplitting, w: Sequence[int]) -> int:
    """ell_T of the class of w, where w is already written in relative letters."""
    cw = _cyc(w)
    if T.kind == AMALGAM:
        return _amalgam_length(cw, frozenset(T.a_part), T.edge)
    return _hnn_length(cw, T.edge, T.stable)


def translation_length(T: CyclicSplitting, x: Sequence[int], budget=None) -> int:
    """ell_T(x) for x in standard coordinates; 0 exactly when x is elliptic."""
    return relative_length(T, T.to_relative(x, budget))


def free_volume_cyclic(T: CyclicSplitting, x: Sequence[int]) -> int:
    """Free volume of the cyclic subgroup <x>, which is its translation length."""
    return translation_length(T, x)


def t_reduce(T: CyclicSplitting, x: Sequence[int]) -> Union[TReducedForm, Elliptic]:
    w = _cyc(T.to_relative(x))
    if not w:
        raise TrivialWord("x is trivial")
    if T.kind == AMALGAM:
        return _t_reduce_amalgam(w, frozenset(T.a_part), T.edge)
    return _t_reduce_hnn(w, T.edge, T.stable)


def _split_c(word, c, lead):
    """Split a leading (lead=True) or trailing c-power off word -> (power, rest)."""
    word = list(word)
    k = 0
    if lead:
        while k < len(word) and abs(word[k]) == c:
            k += 1
        part, rest = word[:k], word[k:]
    else:
        while k < len(word) and abs(word[-1 - k]) == c:
            k += 1
        part, rest = word[len(word) - k :], word[: len(word) - k]
    power = sum(1 if z > 0 else -1 for z in part)
    return power, rest


def _t_reduce_amalgam(w: Word, a_set, c: int):
    n = len(w)
    if all(abs(x) in a_set for x in w):
        return Elliptic("A")
    if all(abs(x) not in a_set or abs(x) == c for x in w):
        return Elliptic("B")
    # maximal runs by vertex side, read cyclically from the start of a B run
    start = next(i for i, x in enumerate(w) if abs(x) not in a_set and abs(w[i - 1]) in a_set)
    w = w[start:] + w[:start]
    runs: List[Tuple[str, list]] = []
    for x in w:
        side = "A" if abs(x) in a_set else "B"
        if runs and runs[-1][0] == side:
            runs[-1][1].append(x)
        else:
            runs.append((side, [x]))
    # rotate so the first run is an A run with a non-c letter
    first = next(i for i, (s, r) in enumerate(runs) if s == "A" and any(abs(z) != c for z in r))
    runs = runs[first:] + runs[:first]
    a_runs, b_sylls = [], []
    for side, r in runs:
        if side == "A" and any(abs(z) != c for z in r):
            a_runs.append(r)
            b_sylls.append([])
        else:
            b_sylls[-1].extend(r)
    m = len(a_runs)
    leads, trails, mids = [], [], []
    for r in a_runs:
        j_prev, rest = _split_c(r, c, lead=True)
        i_s, mid = _split_c(rest, c, lead=False)
        leads.append(j_prev)
        trails.append(i_s)
        mids.append(tuple(mid))
    blocks = tuple((mids[s], trails[s], tuple(b_sylls[s]), leads[(s + 1) % m]) for s in range(m))
    return TReducedForm(AMALGAM, blocks, 2 * m, c)


def _t_reduce_hnn(w: Word, c: int, t: int):
    n = len(w)
    pinched = set()
    for p, q in _hnn_pinches(w, c, t):
        pinched.update((p, q))
    real = [i for i, x in enumerate(w) if abs(x) == t and i not in pinched]
    if not real:
        return Elliptic("base")
    last = real[-1]
    w = w[last + 1 :] + w[: last + 1]
    real = [(i - last - 1) % n for i in real]
    real.sort()
    m = len(real)
    eps = [1 if w[p] == t else -1 for p in real]
    segs, prev = [], -1
    for p in real:
        segs.append(list(w[prev + 1 : p]))
        prev = p
    lead_cut = [0] * m
    trail_cut = [0] * m
    for s in range(m):
        seg = segs[s]
        if eps[s - 1] == -1:
            lead_cut[s], seg = _split_c(seg, c, lead=True)
        if eps[s] == 1:
            trail_cut[s], seg = _split_c(seg, c, lead=False)
        segs[s] = seg
    blocks = []
    for s in range(m):
        i_s = trail_cut[s] if eps[s] == 1 else -lead_cut[(s + 1) % m]
        blocks.append((tuple(segs[s]), i_s, eps[s]))
    return TReducedForm(HNN, tuple(blocks), m, c, t)


# --- slope oracle: displacement of the base vertex --------------------------

def _amalgam_displacement(w: Word, a_set, c: int) -> int:
    """d(v_A, w v_A) from a syllable normal form built by a stack."""
    stack: List[list] = []  # [side, letters]; side "C" only for a lone edge element

    def is_cpow(word):
        return all(abs(z) == c for z in word)

    def settle():
        while stack and not stack[-1][1]:
            stack.pop()
        if len(stack) >= 2 and stack[-1][0] == "C":
            _, letters = stack.pop()
            below = stack[-1][1]
            for z in letters:
                if below and below[-1] == -z:
                    below.pop()
                else:
                    below.append(z)

    for x in w:
        side = "C" if abs(x) == c else ("A" if abs(x) in a_set else "B")
        if stack and (stack[-1][0] == side or stack[-1][0] == "C" or side == "C"):
            top = stack[-1]
            if top[1] and top[1][-1] == -x:
                top[1].pop()
            else:
                top[1].append(x)
            if top[0] == "C" and side != "C":
                top[0] = side
            if not top[1]:
                stack.pop()
            elif top[0] != "C" and is_cpow(top[1]):
                top[0] = "C"
            settle()
        else:
            stack.append([side, [x]])
    return 2 * sum(1 for s, _ in stack if s == "B")


def _hnn_displacement(w: Word, c: int, t: int) -> int:
    """d(v_0, w v_0): stable letters left after Britton reduction.

    Base elements are kept as words in the base basis where the letter
    index t stands for u = t0^-1 c t0.
    """
    stack: List = []  # items: ("s", +-1) or ("g", [base letters])

    def push_base(letters):
        for z in letters:
            if stack and stack[-1][0] == "g":
                g = stack[-1][1]
                if g and g[-1] == -z:
                    g.pop()
                    if not g:
                        stack.pop()
                else:
                    g.append(z)
            else:
                stack.append(("g", [z]))

    def power_of(g, letter):
        if g and all(z == letter for z in g):
            return len(g)
        if g and all(z == -letter for z in g):
            return -len(g)
        return None

    for x in w:
        if abs(x) != t:
            push_base([x])
            continue
        s = 1 if x == t else -1
        if stack and stack[-1] == ("s", -s):
            stack.pop()
            continue
        if len(stack) >= 2 and stack[-1][0] == "g" and stack[-2] == ("s", -s):
            g = stack[-1][1]
            if s == 1:
                i = power_of(g, c)  # t0^-1 c^i t0 = u^i
                repl = _cpow(t, i) if i else None
            else:
                i = power_of(g, t)  # t0 u^i t0^-1 = c^i
                repl = _cpow(c, i) if i else None
            if repl is not None:
                stack.pop()
                stack.pop()
                push_base(repl)
                continue
        stack.append(("s", s))
    return sum(1 for item in stack if item[0] == "s")


def displacement(T: CyclicSplitting, x: Sequence[int]) -> int:
    """Distance from the base vertex to its translate by x (standard coordinates)."""
    w = T.to_relative(x)
    if T.kind == AMALGAM:
        return _amalgam_displacement(w, frozenset(T.a_part), T.edge)
    return _hnn_displacement(w, T.edge, T.stable)


def slope_length(T: CyclicSplitting, x: Sequence[int]) -> int:
    """Translation length from d(v, x^2 v) - d(v, x v); independent of the scan."""
    x = reduce(x)
    return max(0, displacement(T, x + x) - displacement(T, x))


# --- twists, pushforward ---------------------------------------------------

def relative_twist_moves(T: CyclicSplitting, n: int = 1) -> Tuple[ElementaryMove, ...]:
    """Nielsen moves of delta^n in relative coordinates."""
    c = T.edge if n >= 0 else -T.edge
    moves = []
    if T.kind == AMALGAM:
        for b in T.b_part:
            moves += [au.left_multiply(b, c), au.right_multiply(b, -c)] * abs(n)
    else:
        moves += [au.left_multiply(T.stable, c)] * abs(n)
    return tuple(moves)


def relative_twist(T: CyclicSplitting, n: int = 1) -> Automorphism:
    return au.from_moves(relative_twist_moves(T, n), T.rank)


def dehn_twist(T: CyclicSplitting, n: int = 1) -> Automorphism:
    """delta^n in standard coordinates: sigma o delta_rel^n o sigma^-1.

    Amalgam twists act trivially on homology.  An hnn twist t0 -> c t0
    adds n[c] to the class of t0, and [c] is never zero.
    """
    return au.compose(au.compose(T.rel_change, relative_twist(T, n)), T.inverse_change)


def _with_change(T: CyclicSplitting, sigma: Automorphism) -> CyclicSplitting:
    return CyclicSplitting(T.kind, T.rank, T.edge, T.a_part, T.b_part, T.stable, sigma)


def pushforward(T: CyclicSplitting, theta: Automorphism, ell: int) -> CyclicSplitting:
    """The splitting T theta^ell: sigma' = theta^-ell o sigma, so that
    ell_{T theta}(x) = ell_T(theta(x)) and the edge word is theta^-ell(c)."""
    if ell == 0:
        return T
    return _with_change(T, au.compose(au.power(theta, -ell), T.rel_change))


def normalize_edge(T: CyclicSplitting, relative_to: Optional[CyclicSplitting] = None) -> CyclicSplitting:
    """Conjugate sigma so the edge word is cyclically reduced, in standard
    letters or in the relative letters of ``relative_to``.

    Replacing sigma by (x -> w x w^-1) o sigma conjugates the tree, so
    lengths are unchanged and the twist changes by an inner automorphism.
    """
    e = T.edge_word()
    if relative_to is not None:
        e = relative_to.to_relative(e)
    _, z = _cyclic_core(reduce(e))
    if not z:
        return T
    w = inverse(z)
    if relative_to is not None:
        w = relative_to.from_relative(w)
    return _with_change(T, au.compose(au.from_moves([au.inner(w)], T.rank), T.rel_change))


# --- filling ---------------------------------------------------------------

@dataclass(frozen=True)
class FillingReport:
    max_length: int
    scanned: int
    violations: Tuple[str, ...]
    certifying: bool = False
    note: str = "non-certifying: only cyclic subgroups are scanned, proper free factors of rank >= 2 are not"

    @property
    def passes(self) -> bool:
        return not self.violations

    def to_record(self) -> dict:
        return {"L": self.max_length, "scanned": self.scanned, "violations": list(self.violations),
                "passes": self.passes, "certifying": self.certifying, "note": self.note}


def filling_heuristic(T1: CyclicSplitting, T2: CyclicSplitting, L: int, stop_at: Optional[int] = None) -> FillingReport:
    """Scan every cyclic word of length <= L for one elliptic in both trees."""
    if T1.rank != T2.rank:
        raise ValueError("splittings have different ranks")
    bad, scanned = [], 0
    for x in class_representatives(T1.rank, L):
        scanned += 1
        if translation_length(T1, x) + translation_length(T2, x) == 0:
            bad.append(fmt(x))
            if stop_at is not None and len(bad) >= stop_at:
                break
    return FillingReport(L, scanned, tuple(bad))


# --- random splittings (tests, experiments) ---------------------------------

def random_nielsen(rank: int, moves: int, rng: random.Random) -> Automorphism:
    out = []
    for _ in range(moves):
        kind = rng.choice(("left_multiply", "right_multiply", "invert", "swap"))
        i = rng.randint(1, rank)
        if kind in ("left_multiply", "right_multiply"):
            j = rng.choice([x for x in range(1, rank + 1) if x != i])
            out.append(au.ElementaryMove(kind, i=i, letter=rng.choice((j, -j))))
        elif kind == "invert":
            out.append(au.invert_letter(i))
        else:
            j = rng.choice([x for x in range(1, rank + 1) if x != i])
            out.append(au.swap(i, j))
    return au.from_moves(out, rank)


def random_splitting(rank: int, rng: random.Random, max_moves: int = 10, kind: Optional[str] = None) -> CyclicSplitting:
    kind = kind or rng.choice((AMALGAM, HNN))
    sigma = random_nielsen(rank, rng.randint(0, max_moves), rng)
    letters = list(range(1, rank + 1))
    if kind == AMALGAM:
        size = rng.randint(2, rank - 1)
        a_part = rng.sample(letters, size)
        return amalgam(rank, a_part, rng.choice(a_part), sigma)
    c, t = rng.sample(letters, 2)
    return hnn(rank, c, t, sigma)
