import random
from fractions import Fraction

import numpy as np
import pytest

from freetwist import automorphism as au
from freetwist.dynamics import (
    PRIME,
    PairContext,
    _batch_traces,
    _code,
    _letter_table,
    _random_sl2,
    _word_matrix,
    lstsq_exact,
    periodic_falsifier,
    power_occurrences,
    twist_growth,
    verify_twist_inequalities,
)
from freetwist.errors import EllipticInput, HypothesisUnmet
from freetwist.pipeline import default_splitting, pushed_splitting
from freetwist.splitting import amalgam, dehn_twist, pushforward, relative_twist
from freetwist.words import CyclicWord, canonical_class, cyclic_representative, fmt, parse

AM = amalgam(3, (1, 2), 2)


def test_power_occurrences():
    assert power_occurrences(2, parse("abbbc")) == 3
    assert power_occurrences(2, parse("abbbc"), 2) == 2
    assert power_occurrences(2, parse("aBBc"), 2) == 1
    # pure power, read cyclically
    assert power_occurrences(2, parse("bbbb"), 2) == 4


def test_single_twist_counts_edge_letter():
    # x = ac, n = 3: delta1^3(x) = a b^3 c b^-3, six edge letters, ell_T(x) = 2
    z = cyclic_representative(au.apply(relative_twist(AM, 3), parse("ac")))
    assert power_occurrences(2, z) == 6 >= 3 * 2 - 0


def test_edge_letter_fixed():
    assert au.apply(relative_twist(AM, 5), (2,)) == (2,)


def test_inequality_scan_small(ref_pair):
    T1, T2 = ref_pair
    reports = {r.ident: r for r in verify_twist_inequalities(T1, T2, 3, 3, corrected=True)}
    for ident in ("edge-powers", "cross-edge-count", "length-upper", "cross-length", "length-lower-2c"):
        assert reports[ident].passes, ident
    assert reports["edge-powers"].constant == 228
    bad = reports["length-lower"]
    assert not bad.passes
    x, n, r, lhs, rhs = bad.violations[0]
    assert (fmt(x), n, lhs, rhs) == ("aBc", 1, 3, 4)


def test_inequality_hypothesis_unmet():
    # edge word c b c^-1 is not cyclically reduced in T1 letters
    T2 = amalgam(3, (1, 2), 2, au.from_moves([au.inner((3,))], 3))
    assert fmt(T2.edge_word()) == "cbC"
    with pytest.raises(HypothesisUnmet):
        verify_twist_inequalities(AM, T2, 2, 1)


def test_pair_context(ref_pair):
    T1, T2 = ref_pair
    ctx = PairContext(T1, T2)
    assert au.is_identity(au.compose(ctx.chi, ctx.chi_inv))
    assert ctx.c2_in_t1 == T1.to_relative(T2.edge_word())


def test_lstsq_exact():
    rows = [(Fraction(n), Fraction(1)) for n in range(1, 6)]
    ys = [Fraction(3 * n + 2) for n in range(1, 6)]
    coef, rss = lstsq_exact(rows, ys)
    assert coef == [3, 2] and rss == 0
    ys = [Fraction(v) for v in (1, 3, 2, 5, 4)]
    coef, _ = lstsq_exact(rows, ys)
    ref = np.linalg.lstsq(np.array(rows, dtype=float), np.array(ys, dtype=float), rcond=None)[0]
    assert all(abs(float(c) - r) < 1e-12 for c, r in zip(coef, ref))


def test_growth(ref_pair):
    T1, T2 = ref_pair
    g = twist_growth(T1, T2, parse("a"), 20)
    assert g.lt1_c2 == 12
    assert g.bounded
    assert abs(g.ratio_at_max - 1) <= Fraction(1, 20)
    with pytest.raises(EllipticInput):
        twist_growth(T1, T2, T2.edge_word(), 5)


def test_sl2_representation():
    rng = random.Random(1)
    gens = [_random_sl2(rng) for _ in range(3)]
    for (a, b), (c, d) in gens:
        assert (a * d - b * c) % PRIME == 1
    words = [parse("abC"), parse("cAB"), parse("bca")]
    arr = np.array([[_code(x) for x in w] for w in words], dtype=np.int64)
    traces = _batch_traces(arr, _letter_table(gens))
    for w, t in zip(words, traces.tolist()):
        m = _word_matrix(w, gens)
        assert t == (m[0][0] + m[1][1]) % PRIME
    # conjugate words have equal traces
    assert traces[0] == _batch_traces(np.array([[_code(x) for x in parse("bCa")]]), _letter_table(gens))[0]


def test_falsifier_identity():
    res = periodic_falsifier(au.identity(3), 2, 1)
    assert str(res.witness) == "a p=1"


def test_falsifier_twist_edge(ref_pair):
    for T in ref_pair:
        d = dehn_twist(T)
        res = periodic_falsifier(d, 1, 1, seeds=[T.edge_word()])
        assert res.witness is not None
        assert res.witness.word.canonical == canonical_class(T.edge_word())


def test_falsifier_theta(theta3):
    res = periodic_falsifier(theta3, 6, 4)
    assert res.witness is None
    assert res.classes > 0 and res.cells == res.classes * 4


def test_falsifier_finds_periodic_permutation():
    phi = au.from_moves([au.permute((2, 3, 1))], 3)
    res = periodic_falsifier(phi, 3, 3)
    assert res.witness is not None and res.witness.power == 3 and fmt(res.witness.word.canonical) == "a"
