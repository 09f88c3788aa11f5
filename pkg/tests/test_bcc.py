import random

from freetwist import automorphism as au
from freetwist.bcc import bcc_estimate, defect, sampled_defects, structural_upper
from freetwist.splitting import random_nielsen
from freetwist.words import parse


def test_identity_change():
    est = bcc_estimate(au.identity(3))
    assert (est.empirical_lower, est.structural_upper) == (0, 0)


def test_transvection_example():
    phi = au.from_moves([au.right_multiply(1, 2)], 2)  # a -> ab
    assert defect(phi, parse("a"), parse("B")) == 2
    est = bcc_estimate(phi, depth=4)
    assert est.empirical_lower >= 1 and est.consistent


def test_lower_never_exceeds_upper():
    rng = random.Random(5)
    for _ in range(15):
        phi = random_nielsen(3, rng.randint(0, 8), rng)
        assert bcc_estimate(phi, depth=2).consistent


def test_sampled_defects_are_even_and_bounded():
    rng = random.Random(6)
    phi = random_nielsen(3, 8, rng)
    up = structural_upper(phi)
    for _, _, d in sampled_defects(phi, 500, 12, rng):
        assert d % 2 == 0 and 0 <= d <= 2 * up
