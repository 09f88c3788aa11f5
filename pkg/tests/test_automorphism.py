import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freetwist import automorphism as au
from freetwist.errors import BudgetExceeded, ConfigError, NotInvertibleData, RankMismatch
from freetwist.intmat import IntMatrix
from freetwist.splitting import random_nielsen
from freetwist.words import canonical_class, fmt, parse, random_reduced_word, reduce


def aut(*images):
    return au.Automorphism(len(images), [parse(s) for s in images])


def test_apply_examples(theta3):
    delta = aut("a", "b", "abcBA")
    assert fmt(au.apply(delta, parse("c"))) == "abcBA"
    assert au.apply(au.identity(3), parse("abC")) == parse("abC")
    assert fmt(au.apply(theta3, parse("ca"))) == "abb"


def test_theta_images(theta3):
    assert [fmt(w) for w in theta3.images] == ["b", "c", "ab"]


def test_compose_examples(theta3):
    assert au.compose(theta3, au.identity(3)) == theta3
    inv_a = au.from_moves([au.invert_letter(1)], 2)
    assert au.is_identity(au.compose(inv_a, inv_a))
    lm = au.from_moves([au.left_multiply(1, 2)], 2)
    assert fmt(au.compose(lm, lm).images[0]) == "bba"


def test_compose_order():
    # (phi o psi)(w) = phi(psi(w))
    rng = random.Random(3)
    for _ in range(20):
        phi, psi = random_nielsen(3, 6, rng), random_nielsen(3, 6, rng)
        w = random_reduced_word(3, 8, rng)
        assert au.apply(au.compose(phi, psi), w) == au.apply(phi, au.apply(psi, w))


def test_invert_examples(theta3):
    lm = au.from_moves([au.left_multiply(1, 2)], 2)
    assert fmt(au.invert_aut(lm).images[0]) == "Ba"
    assert au.is_identity(au.invert_aut(au.identity(3)))
    back = au.compose(au.invert_aut(theta3), theta3)
    assert au.is_identity(back)
    assert au.is_identity(au.compose(theta3, au.invert_aut(theta3)))


def test_invert_needs_witness():
    with pytest.raises(NotInvertibleData):
        au.invert_aut(aut("b", "a"))


def test_inverse_images_are_checked():
    with pytest.raises(NotInvertibleData):
        au.Automorphism(2, [parse("ab"), parse("b")], inverse_images=[parse("ab"), parse("b")])
    ok = au.Automorphism(2, [parse("ab"), parse("b")], inverse_images=[parse("aB"), parse("b")])
    assert au.invert_aut(ok).images == (parse("aB"), parse("b"))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_inverse_round_trip_random(seed):
    rng = random.Random(seed)
    phi = random_nielsen(3, rng.randint(0, 12), rng)
    inv = au.invert_aut(phi)
    w = random_reduced_word(3, rng.randint(0, 15), rng)
    assert au.apply(inv, au.apply(phi, w)) == w


def test_power(theta3):
    assert au.power(theta3, 3) == au.compose(theta3, au.compose(theta3, theta3))
    assert au.is_identity(au.compose(au.power(theta3, -2), au.power(theta3, 2)))
    assert au.is_identity(au.power(theta3, 0))


def test_abelianization_examples(theta3):
    assert au.abelianization(aut("ba", "b")) == IntMatrix([[1, 0], [1, 1]])
    assert au.abelianization(theta3) == IntMatrix.parse("0,0,1;1,0,1;0,1,0")


def test_abelianization_is_multiplicative():
    rng = random.Random(9)
    for _ in range(20):
        phi, psi = random_nielsen(4, 8, rng), random_nielsen(4, 8, rng)
        assert au.abelianization(au.compose(phi, psi)) == au.abelianization(phi) @ au.abelianization(psi)


def test_iterate_image_growth(theta3):
    lengths = [len(au.iterate_image(theta3, (1,), m)) for m in range(10)]
    assert lengths == [1, 1, 1, 2, 2, 3, 4, 5, 7, 9]
    # |theta^m(a)| follows L_m = L_{m-2} + L_{m-3}, matching char poly t^3 - t - 1
    assert all(lengths[m] == lengths[m - 2] + lengths[m - 3] for m in range(3, 10))
    assert au.iterate_image(theta3, parse("ab"), 0) == parse("ab")


def test_inner_fixes_classes():
    inner = au.from_moves([au.inner(parse("abC"))], 3)
    rng = random.Random(2)
    for m in range(4):
        w = random_reduced_word(3, 7, rng)
        assert canonical_class(au.iterate_image(inner, w, m)) == canonical_class(w)


def test_budget(monkeypatch, theta3):
    with pytest.raises(BudgetExceeded) as exc:
        au.iterate_image(theta3, (1,), 40, budget=50)
    assert exc.value.index is not None and exc.value.estimate > 50
    monkeypatch.setenv("FG_BUDGET", "3")
    assert au.default_budget() == 3
    with pytest.raises(BudgetExceeded):
        au.apply(theta3, parse("cccc"))
    monkeypatch.setenv("FG_BUDGET", "many")
    with pytest.raises(ConfigError):
        au.default_budget()


def test_rank_checks(theta3):
    with pytest.raises(RankMismatch):
        au.compose(theta3, au.identity(2))
    with pytest.raises(RankMismatch):
        au.apply(theta3, parse("d"))
    with pytest.raises(RankMismatch):
        au.Automorphism(3, [parse("a")])


def test_bad_images_rejected():
    with pytest.raises(ValueError):
        au.Automorphism(2, [parse("aA"), parse("b")])


def test_record_round_trip(theta3):
    rec = theta3.to_record()
    back = au.Automorphism.from_record(rec)
    assert back == theta3 and back.factors == theta3.factors
    with pytest.raises(ValueError):
        au.Automorphism.from_record({"rank": 2, "images": ["ab", "b"], "factors": [{"kind": "swap", "i": 1, "j": 2}]})


def test_move_validation():
    with pytest.raises(ValueError):
        au.left_multiply(1, 1)
    with pytest.raises(ValueError):
        au.permute((1, 1, 2))
    assert au.from_moves([au.permute((2, 3, 1))], 3).images == ((2,), (3,), (1,))
