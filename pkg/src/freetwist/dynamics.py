"""Experiment harness: twist inequalities, growth under twisting, convergence
of iterated counting currents toward the edge current, and a falsifier
for periodic conjugacy classes.

T1 and T2 are splittings with relative bases.  chi = sigma1^-1 o sigma2
rewrites T2-relative words in T1-relative letters.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import automorphism as au
from .automorphism import Automorphism
from .bcc import structural_upper
from .currents import ProjectiveGap, counting_current, projective_gap
from .errors import BudgetExceeded, EllipticInput, FillingHeuristicFailed, HypothesisUnmet
from .splitting import (
    CyclicSplitting,
    filling_heuristic,
    relative_length,
    relative_twist,
)
from .words import (
    CyclicWord,
    Word,
    _cyclic_core,
    canonical_class,
    class_representatives,
    conjugacy_test,
    fmt,
    is_cyclically_reduced,
    letter_key,
    reduce,
)


def _frac(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _cyc(w) -> Word:
    return _cyclic_core(reduce(w))[0]


def power_occurrences(letter: int, w: Sequence[int], r: int = 1) -> int:
    """<letter^{+-r}, w> on a cyclically reduced word, from its run lengths."""
    n = len(w)
    if n == 0:
        return 0
    if all(abs(x) == letter for x in w):
        return n
    start = next(i for i in range(n) if abs(w[i]) != letter)
    total, run = 0, 0
    for idx in range(1, n + 1):
        x = w[(start + idx) % n]
        if abs(x) == letter:
            run += 1
        else:
            if run >= r:
                total += run - r + 1
            run = 0
    return total


@dataclass
class PairContext:
    """Both splittings with the maps needed to work in T1-relative letters."""

    T1: CyclicSplitting
    T2: CyclicSplitting
    chi: Automorphism = field(init=False)
    chi_inv: Automorphism = field(init=False)

    def __post_init__(self):
        if self.T1.rank != self.T2.rank:
            raise ValueError("splittings have different ranks")
        self.chi = au.compose(self.T1.inverse_change, self.T2.rel_change)
        self.chi_inv = au.invert_aut(self.chi)

    @property
    def c2_in_t1(self) -> Word:
        return self.chi.images[self.T2.edge - 1]

    def swapped(self) -> "PairContext":
        return PairContext(self.T2, self.T1)


# --- twist inequality scan -------------------------------------------------

@dataclass(frozen=True)
class InequalityReport:
    ident: str
    samples: int
    violation_count: int
    violations: Tuple[tuple, ...]
    exhaustive_up_to: int
    n_max: int
    constant: int

    @property
    def passes(self) -> bool:
        return self.violation_count == 0

    def to_record(self) -> dict:
        return {
            "id": self.ident,
            "samples": self.samples,
            "violationCount": self.violation_count,
            "violations": [{"x": fmt(x), "n": n, "r": r, "lhs": lhs, "rhs": rhs} for x, n, r, lhs, rhs in self.violations],
            "exhaustiveUpToLength": self.exhaustive_up_to,
            "nMax": self.n_max,
            "C": self.constant,
            "passes": self.passes,
        }


IDS = ("edge-powers", "length-upper", "length-lower", "cross-edge-count", "cross-length")


def verify_twist_inequalities(T1: CyclicSplitting, T2: CyclicSplitting, L: int, n_max: int,
                              keep: int = 20, corrected: bool = False) -> List[InequalityReport]:
    """Evaluate the five twist inequalities on every cyclic word x with
    ell(x) <= L in T1-relative letters, for 1 <= r <= n <= n_max.

    edge-powers       <c1^{+-r}, d1^n x> >= (n - r + 1) l_T1(x) - <c1, x>
    length-upper      |d1^n x| <= n l_T1(x) + |x|
    length-lower      |d1^n x| >= n l_T1(x) + |x| - <c1, x>
    cross-edge-count  <c1, d2^-n x> <= l_T2(x) (n <c1, c2> + 2C) + <c1, x>
    cross-length      |d2^-n x| <= l_T2(x) (n |c2| + 2C) + |x|

    Lengths and counts are cyclic, in T1-relative letters.  C is 4 times
    the structural cancellation bound of chi.  With ``corrected`` a sixth
    report "length-lower-2c" subtracts 2<c1, x> instead of <c1, x>.
    """
    ctx = PairContext(T1, T2)
    c2 = ctx.c2_in_t1
    if not is_cyclically_reduced(c2):
        raise HypothesisUnmet(f"c2 = {fmt(c2)} is not cyclically reduced in T1-relative letters")
    c1 = T1.edge
    C = 4 * structural_upper(ctx.chi)
    occ_c1_c2 = power_occurrences(c1, c2)
    len_c2 = len(c2)
    d1 = relative_twist(T1, 1)
    d2inv = relative_twist(T2, -1)
    ids = IDS + (("length-lower-2c",) if corrected else ())
    samples = dict.fromkeys(ids, 0)
    counts = dict.fromkeys(ids, 0)
    found: Dict[str, list] = {i: [] for i in ids}

    def record(ident, x, n, r, lhs, rhs, ok):
        samples[ident] += 1
        if not ok:
            counts[ident] += 1
            if len(found[ident]) < keep:
                found[ident].append((x, n, r, lhs, rhs))

    for x in class_representatives(T1.rank, L):
        lx = len(x)
        lt1 = relative_length(T1, x)
        occ1 = power_occurrences(c1, x)
        y = _cyc(au.apply(ctx.chi_inv, x))
        lt2 = relative_length(T2, y)
        z, v = x, y
        for n in range(1, n_max + 1):
            z = _cyc(au.apply(d1, z))
            for r in range(1, n + 1):
                lhs = power_occurrences(c1, z, r)
                rhs = (n - r + 1) * lt1 - occ1
                record("edge-powers", x, n, r, lhs, rhs, lhs >= rhs)
            lz = len(z)
            rhs3 = n * lt1 + lx
            record("length-upper", x, n, 0, lz, rhs3, lz <= rhs3)
            rhs4 = n * lt1 + lx - occ1
            record("length-lower", x, n, 0, lz, rhs4, lz >= rhs4)
            if corrected:
                rhs4c = n * lt1 + lx - 2 * occ1
                record("length-lower-2c", x, n, 0, lz, rhs4c, lz >= rhs4c)
            v = _cyc(au.apply(d2inv, v))
            u = _cyc(au.apply(ctx.chi, v))
            lhs2 = power_occurrences(c1, u)
            rhs2 = lt2 * (n * occ_c1_c2 + 2 * C) + occ1
            record("cross-edge-count", x, n, 0, lhs2, rhs2, lhs2 <= rhs2)
            rhs5 = lt2 * (n * len_c2 + 2 * C) + lx
            record("cross-length", x, n, 0, len(u), rhs5, len(u) <= rhs5)
    return [InequalityReport(i, samples[i], counts[i], tuple(found[i]), L, n_max, C) for i in ids]


# --- exact least squares -----------------------------------------------------

def lstsq_exact(rows: Sequence[Sequence[Fraction]], ys: Sequence[Fraction]) -> Tuple[List[Fraction], Fraction]:
    """Solve the normal equations over Q; returns (coefficients, residual sum of squares)."""
    k = len(rows[0])
    ata = [[sum(Fraction(r[i]) * r[j] for r in rows) for j in range(k)] for i in range(k)]
    aty = [sum(Fraction(r[i]) * y for r, y in zip(rows, ys)) for i in range(k)]
    m = [row[:] + [b] for row, b in zip(ata, aty)]
    for c in range(k):
        p = next((i for i in range(c, k) if m[i][c] != 0), None)
        if p is None:
            raise ValueError("singular design")
        m[c], m[p] = m[p], m[c]
        piv = m[c][c]
        m[c] = [v / piv for v in m[c]]
        for i in range(k):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    coef = [m[i][k] for i in range(k)]
    rss = sum((y - sum(a * b for a, b in zip(r, coef))) ** 2 for r, y in zip(rows, ys))
    return coef, rss


# --- growth under a single twist ---------------------------------------------

@dataclass(frozen=True)
class GrowthReport:
    x: Word
    lt2_x: int
    lt1_c2: int
    rows: Tuple[Tuple[int, int, int], ...]  # (n, ell_T1(delta2^n x), deviation)
    slope: Fraction
    intercept: Fraction
    c_hat: Fraction
    ratio_at_max: Fraction
    bounded: bool

    def to_record(self) -> dict:
        return {
            "x": fmt(self.x), "ellT2x": self.lt2_x, "ellT1c2": self.lt1_c2,
            "rows": [list(r) for r in self.rows],
            "slope": _frac(self.slope), "intercept": _frac(self.intercept),
            "Chat": _frac(self.c_hat), "ratioAtMax": _frac(self.ratio_at_max), "bounded": self.bounded,
        }


def twist_growth(T1: CyclicSplitting, T2: CyclicSplitting, x: Sequence[int], n_max: int, sign: int = 1) -> GrowthReport:
    """ell_T1(delta2^{+-n}(x)) for n <= n_max, x in standard coordinates.

    The deviation is ell_T1(delta2^n x) - n ell_T2(x) ell_T1(c2).  It is
    called bounded when no |deviation| after n0 = min(10, n_max // 2)
    exceeds the largest one seen up to n0.
    """
    ctx = PairContext(T1, T2)
    y = _cyc(T2.to_relative(x))
    lt2 = relative_length(T2, y)
    if lt2 == 0:
        raise EllipticInput(f"{fmt(x)} is elliptic in T2")
    lt1c2 = relative_length(T1, ctx.c2_in_t1)
    if lt1c2 == 0:
        raise HypothesisUnmet("c2 is elliptic in T1")
    step = relative_twist(T2, sign)
    rows, v = [], y
    for n in range(1, n_max + 1):
        v = _cyc(au.apply(step, v))
        ell = relative_length(T1, au.apply(ctx.chi, v))
        rows.append((n, ell, ell - n * lt2 * lt1c2))
    design = [(Fraction(n), Fraction(1)) for n, _, _ in rows]
    (slope, intercept), _ = lstsq_exact(design, [Fraction(e) for _, e, _ in rows])
    devs = [abs(d) for _, _, d in rows]
    n0 = max(1, min(10, n_max // 2))
    bounded = max(devs[n0:], default=0) <= max(devs[:n0])
    ratio = Fraction(rows[-1][1], n_max * lt2 * lt1c2)
    return GrowthReport(tuple(reduce(x)), lt2, lt1c2, tuple(rows), slope, intercept,
                        Fraction(max(devs), lt2), ratio, bounded)


# --- convergence of iterates toward the edge current --------------------------

@dataclass(frozen=True)
class ConvergenceCell:
    n: int
    m: int
    length: int
    mass_on_edge: Fraction
    gap: ProjectiveGap
    truncated: bool

    @property
    def deficit(self) -> Fraction:
        return 1 - self.mass_on_edge

    def to_record(self) -> dict:
        return {"n": self.n, "m": self.m, "length": self.length, "massOnEdge": _frac(self.mass_on_edge),
                "deficit": _frac(self.deficit), "gapToEdgeCurrent": self.gap.to_record(), "truncated": self.truncated}


@dataclass(frozen=True)
class FitConstants:
    beta1: Fraction
    beta2: Fraction
    gamma1: Fraction
    gamma2: Fraction
    gamma3: Fraction
    c_hat: Fraction
    residuals: Tuple[Fraction, Fraction]

    def to_record(self) -> dict:
        return {k: _frac(getattr(self, k)) for k in ("beta1", "beta2", "gamma1", "gamma2", "gamma3", "c_hat")} | {
            "residuals": [_frac(r) for r in self.residuals], "advisory": True}


@dataclass(frozen=True)
class ConvergenceReport:
    seed: Word
    cells: Tuple[ConvergenceCell, ...]
    mirror_seed: Word
    mirror_cells: Tuple[ConvergenceCell, ...]
    fit: Optional[FitConstants]
    filling_ok: bool
    radius: int
    budget: int

    def to_record(self) -> dict:
        return {
            "seed": fmt(self.seed), "cells": [c.to_record() for c in self.cells],
            "mirrorSeed": fmt(self.mirror_seed), "mirrorCells": [c.to_record() for c in self.mirror_cells],
            "fit": None if self.fit is None else self.fit.to_record(),
            "fillingHeuristicPassed": self.filling_ok, "R": self.radius, "budget": self.budget,
        }


def _seed_letter(ctx: PairContext) -> int:
    """A letter of T1's relative basis elliptic in T1 and hyperbolic in T2."""
    for i in range(1, ctx.T1.rank + 1):
        if relative_length(ctx.T1, (i,)) == 0 and relative_length(ctx.T2, au.apply(ctx.chi_inv, (i,))) > 0:
            return i
    raise HypothesisUnmet("no basis letter of T1 is elliptic in T1 and hyperbolic in T2")


def _phi_n(ctx: PairContext, n: int) -> Automorphism:
    """delta1^n delta2^-n in T1-relative letters."""
    d2 = au.compose(au.compose(ctx.chi, relative_twist(ctx.T2, -n)), ctx.chi_inv)
    return au.compose(relative_twist(ctx.T1, n), d2)


def _run(ctx: PairContext, n_list, m_max, radius, budget):
    k, c1 = ctx.T1.rank, ctx.T1.edge
    alpha = _seed_letter(ctx)
    edge = counting_current((c1,), radius, k)
    cells, fit_rows = [], []
    for n in n_list:
        phi = _phi_n(ctx, n)
        prev, w, m = None, (alpha,), 0
        truncated = False
        for step in range(1, m_max + 1):
            try:
                nxt = _cyc(au.apply(phi, w, budget))
            except BudgetExceeded:
                truncated = True
                break
            prev, w, m = w, nxt, step
        mass = Fraction(power_occurrences(c1, w), len(w))
        cells.append(ConvergenceCell(n, m, len(w), mass, projective_gap(counting_current(w, radius, k), edge), truncated))
        if prev is not None:
            fit_rows.append((n, prev, w))
    return alpha, cells, fit_rows


def _fit(ctx: PairContext, fit_rows, budget) -> Optional[FitConstants]:
    if len(fit_rows) < 3:
        return None
    lt1c2 = relative_length(ctx.T1, ctx.c2_in_t1)
    num_rows, den_rows, nums, dens, devs = [], [], [], [], []
    for n, prev, w in fit_rows:
        y_prev = au.apply(ctx.chi_inv, prev, budget)
        lt2 = relative_length(ctx.T2, y_prev)
        if lt2 == 0:
            continue
        occ = power_occurrences(ctx.T1.edge, w)
        num_rows.append((Fraction(n), Fraction(1)))
        nums.append(Fraction(len(w) - occ, lt2))
        den_rows.append((Fraction(n * n), Fraction(-n), Fraction(-1)))
        dens.append(Fraction(len(w), lt2))
        d2 = _cyc(au.apply(relative_twist(ctx.T2, -n), _cyc(y_prev), budget))
        lt1 = relative_length(ctx.T1, au.apply(ctx.chi, d2, budget))
        devs.append(Fraction(abs(lt1 - n * lt2 * lt1c2), lt2))
    if len(num_rows) < 3:
        return None
    (b1, b2), r1 = lstsq_exact(num_rows, nums)
    (g1, g2, g3), r2 = lstsq_exact(den_rows, dens)
    return FitConstants(b1, b2, g1, g2, g3, max(devs), (r1, r2))


def stable_current_convergence(T1: CyclicSplitting, T2: CyclicSplitting, n_list=(2, 4, 8, 16), m_max: int = 6,
                               radius: int = 3, budget: Optional[int] = None, filling_length: int = 6,
                               fit: bool = True) -> ConvergenceReport:
    """Iterate phi_n = delta1^n delta2^-n on a T1-elliptic basis letter and
    measure how much of the cyclic word sits on the edge letter c1; the
    mirror run iterates phi_n^-1 in T2-relative letters against c2."""
    budget = au.default_budget() if budget is None else budget
    filling = filling_heuristic(T1, T2, filling_length, stop_at=1)
    if not filling.passes:
        warnings.warn(FillingHeuristicFailed(f"T1 and T2 share elliptic {filling.violations[0]}"))
    ctx = PairContext(T1, T2)
    alpha, cells, rows = _run(ctx, n_list, m_max, radius, budget)
    mirror = ctx.swapped()
    beta, mcells, _ = _run(mirror, n_list, m_max, radius, budget)
    fc = _fit(ctx, rows, budget) if fit else None
    return ConvergenceReport((alpha,), tuple(cells), (beta,), tuple(mcells), fc, filling.passes, radius, budget)


# --- periodic conjugacy falsifier ---------------------------------------------

PRIME = 2 ** 31 - 1


@dataclass(frozen=True)
class PeriodicWitness:
    word: CyclicWord
    power: int

    def __str__(self):
        return f"{self.word} p={self.power}"


@dataclass(frozen=True)
class FalsifierResult:
    witness: Optional[PeriodicWitness]
    max_length: int
    max_power: int
    classes: int
    cells: int
    exact_checks: int
    skipped: int

    def to_record(self) -> dict:
        return {
            "witness": None if self.witness is None else {"word": str(self.witness.word), "power": self.witness.power},
            "Lmax": self.max_length, "pMax": self.max_power, "classes": self.classes,
            "cells": self.cells, "exactChecks": self.exact_checks, "skippedOverBudget": self.skipped,
        }


def _random_sl2(rng: random.Random):
    a, b, c = rng.randrange(1, PRIME), rng.randrange(PRIME), rng.randrange(PRIME)
    d = (1 + b * c) * pow(a, -1, PRIME) % PRIME
    return ((a, b), (c, d))


def _mul(x, y):
    p = PRIME
    return (((x[0][0] * y[0][0] + x[0][1] * y[1][0]) % p, (x[0][0] * y[0][1] + x[0][1] * y[1][1]) % p),
            ((x[1][0] * y[0][0] + x[1][1] * y[1][0]) % p, (x[1][0] * y[0][1] + x[1][1] * y[1][1]) % p))


def _inv(x):
    p = PRIME
    return ((x[1][1], (-x[0][1]) % p), ((-x[1][0]) % p, x[0][0]))


def _code(x: int) -> int:
    return 2 * (x - 1) if x > 0 else 2 * (-x - 1) + 1


def _letter_table(gens) -> np.ndarray:
    t = np.zeros((2 * len(gens), 2, 2), dtype=np.int64)
    for i, g in enumerate(gens):
        t[2 * i] = g
        t[2 * i + 1] = _inv(g)
    return t


def _word_matrix(word, gens):
    out = ((1, 0), (0, 1))
    for x in word:
        g = gens[abs(x) - 1]
        out = _mul(out, g if x > 0 else _inv(g))
    return out


def _batch_traces(words: np.ndarray, table: np.ndarray) -> np.ndarray:
    p = PRIME
    prod = table[words[:, 0]].copy()
    for col in range(1, words.shape[1]):
        q = table[words[:, col]]
        a = (prod[:, 0, 0] * q[:, 0, 0] + prod[:, 0, 1] * q[:, 1, 0]) % p
        b = (prod[:, 0, 0] * q[:, 0, 1] + prod[:, 0, 1] * q[:, 1, 1]) % p
        c = (prod[:, 1, 0] * q[:, 0, 0] + prod[:, 1, 1] * q[:, 1, 0]) % p
        d = (prod[:, 1, 0] * q[:, 0, 1] + prod[:, 1, 1] * q[:, 1, 1]) % p
        prod[:, 0, 0], prod[:, 0, 1], prod[:, 1, 0], prod[:, 1, 1] = a, b, c, d
    return (prod[:, 0, 0] + prod[:, 1, 1]) % p


def periodic_falsifier(phi: Automorphism, max_length: int, max_power: int, budget: Optional[int] = None,
                       seeds: Sequence[Sequence[int]] = (), rng_seed: int = 0, reps: int = 2) -> FalsifierResult:
    """First (class, p) with phi^p(w) conjugate to w, seeds first, then all
    classes of length <= max_length in canonical order.

    A cell is only checked exactly if the traces of w and phi^p(w) agree
    under ``reps`` random representations into SL(2, F_q); conjugate
    elements always pass, so the filter never hides a witness.  Cells
    whose exact check exceeds the budget are skipped and counted.
    """
    budget = au.default_budget() if budget is None else budget
    k = phi.rank
    rng = random.Random(rng_seed)
    reps_gens = []
    for _ in range(reps):
        gens = [_random_sl2(rng) for _ in range(k)]
        chain = [gens]
        for _ in range(max_power):
            prevg = chain[-1]
            chain.append([_word_matrix(img, prevg) for img in phi.images])
        reps_gens.append(chain)
    tables = [[_letter_table(g) for g in chain] for chain in reps_gens]

    groups: List[List[Word]] = []
    seed_words = []
    for s in seeds:
        cw = _cyc(s)
        if cw:
            seed_words.append(cw)
    if seed_words:
        groups.append(seed_words)
    reps_all = class_representatives(k, max_length)
    for n in range(1, max_length + 1):
        groups.append([w for w in reps_all if len(w) == n])

    classes = cells = exact = skipped = 0
    for group in groups:
        if not group:
            continue
        by_len: Dict[int, List[int]] = {}
        for idx, w in enumerate(group):
            by_len.setdefault(len(w), []).append(idx)
        survive = np.ones((len(group), max_power), dtype=bool)
        for n, idxs in by_len.items():
            arr = np.array([[_code(x) for x in group[i]] for i in idxs], dtype=np.int64)
            for tab in tables:
                t0 = _batch_traces(arr, tab[0])
                for p in range(1, max_power + 1):
                    survive[idxs, p - 1] &= _batch_traces(arr, tab[p]) == t0
        for idx, w in enumerate(group):
            classes += 1
            for p in range(1, max_power + 1):
                cells += 1
                if not survive[idx, p - 1]:
                    continue
                exact += 1
                try:
                    img = au.iterate_image(phi, w, p, budget)
                except BudgetExceeded:
                    skipped += 1
                    continue
                if conjugacy_test(img, w):
                    return FalsifierResult(PeriodicWitness(CyclicWord.of(w), p), max_length, max_power,
                                           classes, cells, exact, skipped)
    return FalsifierResult(None, max_length, max_power, classes, cells, exact, skipped)
