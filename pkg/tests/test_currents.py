import random

import pytest
from fractions import Fraction
from hypothesis import given, settings
from hypothesis import strategies as st

from freetwist import automorphism as au
from freetwist.currents import (
    WindowedCurrent,
    _count_numpy,
    _count_small,
    counting_current,
    invariant_violations,
    pairing,
    projective_gap,
    push_current,
    required_radius,
)
from freetwist.errors import RadiusMismatch, TrivialWord
from freetwist.splitting import amalgam, dehn_twist, hnn, random_splitting, translation_length
from freetwist.words import CyclicWord, cyclic_length, occurrences_cyclic, parse, random_reduced_word

AM = amalgam(3, (1, 2), 2)


def test_power_rule_example():
    nu = counting_current(parse("aaa"), 1)
    assert nu["a"] == 3 and nu.omega == 3


def test_small_window_example():
    nu = counting_current(parse("ab"), 2)
    assert nu["a"] == nu["b"] == 1
    assert nu["ab"] == 1 and nu["aB"] == 0
    assert nu.omega == 2


def test_counts_match_occurrences():
    rng = random.Random(1)
    for _ in range(50):
        h = random_reduced_word(3, rng.randint(1, 15), rng)
        if not cyclic_length(h):
            continue
        nu = counting_current(h, 3)
        for g, v in nu.counts.items():
            assert v == occurrences_cyclic(g, h)


def test_proper_power_scales():
    f = parse("abC")
    assert counting_current(f * 4, 3).counts == counting_current(f, 3).scaled(4).counts


def test_numpy_counts_agree():
    rng = random.Random(2)
    for _ in range(20):
        h = CyclicWord.of(random_reduced_word(3, rng.randint(3, 60), rng)).representative
        if len(h) < 3:
            continue
        assert _count_numpy(h, 3, 3) == _count_small(h, 3)


def test_long_word_uses_representative():
    rng = random.Random(3)
    f = CyclicWord.of(random_reduced_word(3, 7, rng)).root
    h = f * 4000
    nu = counting_current(h, 3)
    assert nu.counts == counting_current(f, 3).scaled(len(h) // len(f)).counts


def test_trivial_and_bad_radius():
    with pytest.raises(TrivialWord):
        counting_current(parse("aA"))
    with pytest.raises(ValueError):
        counting_current(parse("a"), 0)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4))
def test_invariants(seed, radius):
    rng = random.Random(seed)
    h = random_reduced_word(3, rng.randint(1, 25), rng)
    if not cyclic_length(h):
        return
    nu = counting_current(h, radius)
    assert invariant_violations(nu) == []
    assert nu.omega == cyclic_length(h)


def test_push_current_examples():
    h = parse("acb")
    assert push_current(au.identity(3), h, 3) == counting_current(h, 3)
    inner = au.from_moves([au.inner(parse("cAb"))], 3)
    assert push_current(inner, h, 3).counts == counting_current(h, 3).counts


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_push_twist_concentrates_on_edge(n):
    # delta^n(ac) = b^n a b^-n c, cyclically reduced; b appears 2n times
    nu = push_current(dehn_twist(AM, n), parse("ac"), 1)
    assert nu["b"] == 2 * n


def test_projective_gap_examples():
    nu = counting_current(parse("abcab"), 3)
    assert projective_gap(nu, nu).sup_gap == 0
    assert projective_gap(nu, nu.scaled(3)).sup_gap == 0
    ea, eb = counting_current(parse("a"), 1, rank=2), counting_current(parse("b"), 1, rank=2)
    assert projective_gap(ea, eb).sup_gap == Fraction(1)
    with pytest.raises(RadiusMismatch):
        projective_gap(counting_current(parse("a"), 1), counting_current(parse("a"), 2))


def test_dump_load_round_trip():
    nu = counting_current(parse("abCab"), 3)
    text = nu.dump()
    assert text.splitlines()[0] == "# basis=abc R=3 omega=5"
    assert WindowedCurrent.load(text) == nu


def test_pairing_matches_translation_length():
    rng = random.Random(4)
    for _ in range(200):
        T = random_splitting(3, rng)
        h = random_reduced_word(3, rng.randint(1, 15), rng)
        rel = T.to_relative(h)
        if not cyclic_length(rel):
            continue
        nu = counting_current(rel, required_radius(T, rel), rank=3)
        assert pairing(T, nu) == translation_length(T, h)


def test_pairing_examples():
    assert pairing(AM, counting_current(parse("ac"), 4)) == 2
    H = hnn(3, 1, 3)
    assert pairing(H, counting_current(parse("Cac"), 5)) == 0
    assert pairing(H, counting_current(parse("cb"), 4)) == 1
