"""Exact integer matrices: GL(k, Z) checks, elementary factorization, lifting
to automorphisms and a homological sufficient criterion.

Entries are Python ints, so arithmetic is exact and never wraps.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd, isqrt
from typing import List, Sequence, Tuple

from .errors import NotUnimodular


class IntMatrix:
    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence[int]]):
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        if any(len(r) != len(rows) for r in rows):
            raise ValueError("matrix must be square")
        self.rows = rows

    @property
    def k(self) -> int:
        return len(self.rows)

    @classmethod
    def identity(cls, k: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(k)] for i in range(k)])

    @classmethod
    def parse(cls, text: str) -> "IntMatrix":
        """Inline syntax ``"0,0,1;1,0,1;0,1,0"``."""
        return cls([[int(x) for x in row.split(",")] for row in text.strip().split(";")])

    def __str__(self):
        return ";".join(",".join(str(x) for x in r) for r in self.rows)

    def __repr__(self):
        return f"IntMatrix({str(self)!r})"

    def __eq__(self, other):
        return isinstance(other, IntMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        cols = list(zip(*other.rows))
        return IntMatrix([[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows])

    def transpose(self) -> "IntMatrix":
        return IntMatrix(list(zip(*self.rows)))

    def det(self) -> int:
        return bareiss_det(self.rows)

    def inverse(self) -> "IntMatrix":
        """Exact inverse; only defined here for unimodular matrices."""
        d = gl_check(self)
        k = self.k
        aug = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(k)] for i, r in enumerate(self.rows)]
        for c in range(k):
            p = next(r for r in range(c, k) if aug[r][c] != 0)
            aug[c], aug[p] = aug[p], aug[c]
            piv = aug[c][c]
            aug[c] = [x / piv for x in aug[c]]
            for r in range(k):
                if r != c and aug[r][c] != 0:
                    f = aug[r][c]
                    aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
        out = [[x for x in r[k:]] for r in aug]
        assert d in (1, -1) and all(x.denominator == 1 for r in out for x in r)
        return IntMatrix([[int(x) for x in r] for r in out])

    def to_record(self) -> dict:
        return {"k": self.k, "rows": [list(r) for r in self.rows]}

    @classmethod
    def from_record(cls, rec: dict) -> "IntMatrix":
        m = cls(rec["rows"])
        if "k" in rec and int(rec["k"]) != m.k:
            raise ValueError("k does not match the number of rows")
        return m


def bareiss_det(rows) -> int:
    m = [list(r) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for c in range(n - 1):
        if m[c][c] == 0:
            swap = next((r for r in range(c + 1, n) if m[r][c] != 0), None)
            if swap is None:
                return 0
            m[c], m[swap] = m[swap], m[c]
            sign = -sign
        for i in range(c + 1, n):
            for j in range(c + 1, n):
                m[i][j] = (m[i][j] * m[c][c] - m[i][c] * m[c][j]) // prev
        prev = m[c][c]
    return sign * m[n - 1][n - 1]


def gl_check(a: IntMatrix) -> int:
    d = a.det()
    if d not in (1, -1):
        raise NotUnimodular(d)
    return d


# --- elementary factorization ----------------------------------------------

@dataclass(frozen=True)
class ElementaryMatrix:
    """``transvection`` I + q E_ij, ``sign`` (negate row/column i) or ``swap``.

    Indices are 1-based.
    """

    kind: str
    i: int
    j: int = 0
    q: int = 0

    def matrix(self, k: int) -> IntMatrix:
        m = [[int(r == c) for c in range(k)] for r in range(k)]
        i, j = self.i - 1, self.j - 1
        if self.kind == "transvection":
            m[i][j] += self.q
        elif self.kind == "sign":
            m[i][i] = -1
        else:
            m[i][i] = m[j][j] = 0
            m[i][j] = m[j][i] = 1
        return IntMatrix(m)

    def inverse(self) -> "ElementaryMatrix":
        if self.kind == "transvection":
            return ElementaryMatrix("transvection", self.i, self.j, -self.q)
        return self


@dataclass(frozen=True)
class ElementaryFactorization:
    factors: Tuple[ElementaryMatrix, ...]
    residual: IntMatrix
    bound: int

    def product(self) -> IntMatrix:
        k = self.residual.k
        out = IntMatrix.identity(k)
        for f in self.factors:
            out = out @ f.matrix(k)
        return out @ self.residual


def _nearest_quotient(a: int, b: int) -> int:
    # q with |a - q b| <= |b| / 2
    q, r = divmod(a, b)
    if 2 * abs(r) > abs(b):
        q += 1
    return q


def elementary_decompose(a: IntMatrix) -> ElementaryFactorization:
    """Write a = F_1 F_2 ... F_r (residual identity) by Euclidean row reduction.

    The pivot in each column is the smallest nonzero entry at or below the
    diagonal, ties broken by lowest row index.
    """
    gl_check(a)
    k = a.k
    m = [list(r) for r in a.rows]
    ops: List[ElementaryMatrix] = []
    max_bits = max((abs(x).bit_length() for r in m for x in r), default=0)

    def add_row(dst, src, q):
        if q:
            m[dst] = [x + q * y for x, y in zip(m[dst], m[src])]
            ops.append(ElementaryMatrix("transvection", dst + 1, src + 1, q))

    for c in range(k):
        while True:
            live = [r for r in range(c, k) if m[r][c] != 0]
            p = min(live, key=lambda r: (abs(m[r][c]), r))
            others = [r for r in live if r != p]
            if not others:
                break
            for r in others:
                add_row(r, p, -_nearest_quotient(m[r][c], m[p][c]))
            max_bits = max(max_bits, max(abs(x).bit_length() for r in m for x in r))
        if p != c:
            m[c], m[p] = m[p], m[c]
            ops.append(ElementaryMatrix("swap", c + 1, p + 1))
        if m[c][c] == -1:
            m[c] = [-x for x in m[c]]
            ops.append(ElementaryMatrix("sign", c + 1))
        assert m[c][c] == 1
        for r in range(k):
            if r != c:
                add_row(r, c, -m[r][c])
    # E_s ... E_1 a = I, so a = E_1^-1 ... E_s^-1
    factors = tuple(op.inverse() for op in ops)
    bound = k * k * (max_bits + 2) + 2 * k
    return ElementaryFactorization(factors, IntMatrix.identity(k), bound)


def lift_to_aut(a: IntMatrix):
    """A factored automorphism psi with abelianization(psi) == a."""
    from .automorphism import from_moves, invert_letter, right_multiply, swap

    moves = []
    for f in elementary_decompose(a).factors:
        if f.kind == "transvection":
            # column j of I + q E_ij says a_j -> a_j a_i^q
            step = f.i if f.q > 0 else -f.i
            moves.extend([right_multiply(f.j, step)] * abs(f.q))
        elif f.kind == "sign":
            moves.append(invert_letter(f.i))
        else:
            moves.append(swap(f.i, f.j))
    return from_moves(moves, a.k)


# --- characteristic polynomial and the homological criterion ----------------

def char_poly(a: IntMatrix) -> Tuple[int, ...]:
    """Coefficients of det(tI - a), highest degree first (Faddeev-LeVerrier)."""
    k = a.k
    coeffs = [1]
    m = IntMatrix([[0] * k for _ in range(k)])
    ident = IntMatrix.identity(k)
    c = 1
    for step in range(1, k + 1):
        m = IntMatrix([[x + c * y for x, y in zip(r1, r2)] for r1, r2 in zip((a @ m).rows, ident.rows)]) if step > 1 else ident
        am = a @ m
        trace = sum(am.rows[i][i] for i in range(k))
        assert trace % step == 0
        c = -trace // step
        coeffs.append(c)
    return tuple(coeffs)


def poly_divmod(f: Sequence[int], g: Sequence[int]):
    """Division by a monic g; coefficient lists are highest degree first."""
    if g[0] != 1:
        raise ValueError("divisor must be monic")
    f = list(f)
    if len(f) < len(g):
        return [0], f
    q = []
    for i in range(len(f) - len(g) + 1):
        coef = f[i]
        q.append(coef)
        if coef:
            for j in range(1, len(g)):
                f[i + j] -= coef * g[j]
    rem = f[len(f) - len(g) + 1 :]
    return q, rem


def poly_eval(f: Sequence[int], x: int) -> int:
    v = 0
    for c in f:
        v = v * x + c
    return v


def cyclotomic(n: int) -> Tuple[int, ...]:
    f = [1] + [0] * (n - 1) + [-1]
    for d in range(1, n):
        if n % d == 0:
            f, rem = poly_divmod(f, cyclotomic(d))
            assert not any(rem)
    return tuple(f)


def _totient(n: int) -> int:
    return sum(1 for i in range(1, n + 1) if gcd(i, n) == 1)


def _divides(g, f) -> bool:
    _, rem = poly_divmod(f, g)
    return not any(rem)


def _divisors(n: int):
    n = abs(n)
    out = set()
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            out.update((d, n // d))
    return sorted(out)


def find_factor(f: Sequence[int]):
    """A monic integer factor of degree 1..deg/2, or None if f is irreducible.

    Exhaustive over the Mignotte coefficient box; candidates are screened by
    g(x) | f(x) at a few integer points before dividing.
    """
    from itertools import product

    n = len(f) - 1
    if f[-1] == 0:
        return (1, 0)
    norm = isqrt(sum(c * c for c in f)) + 1
    probes = [(x, poly_eval(f, x)) for x in (1, -1, 2, -2, 3)]
    for d in range(1, n // 2 + 1):
        consts = [s * e for e in _divisors(f[-1]) for s in (1, -1)]
        ranges = [range(-comb(d, i) * norm, comb(d, i) * norm + 1) for i in range(1, d)]
        for middle in product(*ranges):
            for c0 in consts:
                g = (1,) + middle + (c0,)
                ok = True
                for x, fx in probes:
                    gx = poly_eval(g, x)
                    if gx == 0:
                        if fx != 0:
                            ok = False
                            break
                    elif fx % gx:
                        ok = False
                        break
                if ok and _divides(g, f):
                    return g
    return None


@dataclass(frozen=True)
class HomologyVerdict:
    passes: bool
    reasons: Tuple[str, ...]
    char_poly: Tuple[int, ...]


def homology_criterion(a: IntMatrix) -> HomologyVerdict:
    """Advisory spectral test: irreducible char poly, not a polynomial in t^d,
    no root of unity among its roots.  Passing is not a certificate."""
    gl_check(a)
    f = char_poly(a)
    n = len(f) - 1
    reasons = []
    factor = find_factor(f)
    if factor is not None:
        reasons.append(f"reducible: factor {list(factor)}")
    exps = [n - i for i, c in enumerate(f) if c]
    g = 0
    for e in exps:
        g = gcd(g, e)
    if g >= 2:
        reasons.append(f"polynomial in t^{g}")
    for m in range(1, 4 * n * n + 3):
        if _totient(m) <= n and _divides(cyclotomic(m), f):
            reasons.append(f"root of unity: divisible by cyclotomic polynomial {m}")
    return HomologyVerdict(not reasons, tuple(reasons), f)
