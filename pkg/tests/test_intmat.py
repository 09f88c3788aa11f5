import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from freetwist import automorphism as au
from freetwist.errors import NotUnimodular
from freetwist.intmat import (
    ElementaryMatrix,
    IntMatrix,
    char_poly,
    cyclotomic,
    elementary_decompose,
    find_factor,
    gl_check,
    homology_criterion,
    lift_to_aut,
)

THETA = IntMatrix.parse("0,0,1;1,0,1;0,1,0")


def random_gl(k, steps, rng):
    m = IntMatrix.identity(k)
    for _ in range(steps):
        kind = rng.choice(("transvection", "transvection", "sign", "swap"))
        i, j = rng.sample(range(1, k + 1), 2)
        m = m @ ElementaryMatrix(kind, i, j, rng.choice((-2, -1, 1, 2))).matrix(k)
    return m


def sym_poly(a):
    t = sympy.Symbol("t")
    p = sympy.Matrix(a.rows).charpoly(t)
    return t, p


def test_parse_and_format():
    assert str(THETA) == "0,0,1;1,0,1;0,1,0"
    assert IntMatrix.from_record(THETA.to_record()) == THETA
    with pytest.raises(ValueError):
        IntMatrix.parse("1,0;0")


@pytest.mark.parametrize("text,det", [("1,0,0;0,1,0;0,0,1", 1), ("-1,0,0;0,1,0;0,0,1", -1), (str(THETA), 1)])
def test_det_examples(text, det):
    assert gl_check(IntMatrix.parse(text)) == det


def test_det_against_sympy():
    rng = random.Random(5)
    for _ in range(50):
        k = rng.randint(1, 5)
        rows = [[rng.randint(-6, 6) for _ in range(k)] for _ in range(k)]
        assert IntMatrix(rows).det() == sympy.Matrix(rows).det()


def test_not_unimodular():
    with pytest.raises(NotUnimodular) as exc:
        gl_check(IntMatrix.parse("2,0;0,1"))
    assert exc.value.det == 2


def test_inverse():
    rng = random.Random(8)
    for _ in range(10):
        a = random_gl(4, 15, rng)
        assert a @ a.inverse() == IntMatrix.identity(4)


def test_decompose_examples():
    assert elementary_decompose(IntMatrix.identity(3)).factors == ()
    e12 = ElementaryMatrix("transvection", 1, 2, 1)
    f = elementary_decompose(e12.matrix(3))
    assert f.factors == (e12,)


def test_decompose_random_gl4():
    rng = random.Random(20)
    for _ in range(20):
        a = random_gl(4, 20, rng)
        f = elementary_decompose(a)
        assert f.product() == a
        assert len(f.factors) <= f.bound


def test_decompose_is_deterministic():
    a = random_gl(4, 20, random.Random(1))
    assert elementary_decompose(a) == elementary_decompose(a)


@pytest.mark.parametrize("text", ["1,0,0;0,1,0;0,0,1", "1,0,0;1,1,0;0,0,1", "-1,0,0;0,1,0;0,0,1", str(THETA)])
def test_lift_round_trip_examples(text):
    a = IntMatrix.parse(text)
    assert au.abelianization(lift_to_aut(a)) == a


def test_lift_identity_and_sign():
    assert au.is_identity(lift_to_aut(IntMatrix.identity(3)))
    psi = lift_to_aut(IntMatrix.parse("-1,0,0;0,1,0;0,0,1"))
    assert psi.images == ((-1,), (2,), (3,))


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 5), st.integers(0, 30), st.integers(0, 10**6))
def test_lift_round_trip_property(k, steps, seed):
    a = random_gl(k, steps, random.Random(seed))
    psi = lift_to_aut(a)
    assert au.abelianization(psi) == a
    assert psi.factors is not None


def test_char_poly_examples():
    assert char_poly(THETA) == (1, 0, -1, -1)
    assert char_poly(IntMatrix.identity(3)) == (1, -3, 3, -1)


def test_char_poly_against_sympy():
    rng = random.Random(11)
    for _ in range(40):
        k = rng.randint(1, 5)
        a = IntMatrix([[rng.randint(-4, 4) for _ in range(k)] for _ in range(k)])
        t, p = sym_poly(a)
        assert list(char_poly(a)) == [int(c) for c in p.all_coeffs()]


def test_cyclotomic():
    t = sympy.Symbol("t")
    for n in range(1, 13):
        assert list(cyclotomic(n)) == [int(c) for c in sympy.Poly(sympy.cyclotomic_poly(n, t), t).all_coeffs()]


def test_find_factor_against_sympy():
    rng = random.Random(13)
    t = sympy.Symbol("t")
    for _ in range(40):
        a = random_gl(rng.randint(2, 4), rng.randint(0, 12), rng)
        f = char_poly(a)
        factors = sympy.factor_list(sympy.Poly(list(f), t))[1]
        irreducible = len(factors) == 1 and factors[0][1] == 1
        g = find_factor(f)
        assert (g is None) == irreducible
        if g is not None:
            assert sympy.rem(sympy.Poly(list(f), t), sympy.Poly(list(g), t)).is_zero


def test_homology_criterion_examples():
    v = homology_criterion(THETA)
    assert v.passes and v.char_poly == (1, 0, -1, -1)
    assert not homology_criterion(IntMatrix.identity(3)).passes
    cyc = homology_criterion(IntMatrix.parse("0,0,1;1,0,0;0,1,0"))
    assert not cyc.passes and any("root of unity" in r for r in cyc.reasons)


def test_homology_criterion_t_power():
    # char poly t^4 - 3t^2 + 1 = (t^2 - t - 1)(t^2 + t - 1): reducible and a polynomial in t^2
    a = IntMatrix.parse("0,0,0,-1;1,0,0,0;0,1,0,3;0,0,1,0")
    v = homology_criterion(a)
    assert not v.passes and any("t^2" in r for r in v.reasons)
