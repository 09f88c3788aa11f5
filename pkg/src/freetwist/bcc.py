"""Bounded cancellation: an empirical lower bound and a structural upper bound.

For a change of basis sigma, the cancellation defect of a reduced product
w w' is |sigma(w)| + |sigma(w')| - |sigma(w w')|, always even.  Both
directions (sigma and sigma^-1) are measured and the larger value reported.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .automorphism import Automorphism, apply, invert_aut
from .words import reduced_words


@dataclass(frozen=True)
class BccEstimate:
    empirical_lower: int
    structural_upper: int
    search_depth: int

    @property
    def consistent(self) -> bool:
        return self.empirical_lower <= self.structural_upper


def structural_upper(change: Automorphism) -> int:
    both = (change, invert_aut(change))
    return max(sum(len(img) - 1 for img in phi.images) for phi in both)


def defect(phi: Automorphism, w, w2) -> int:
    """|phi(w)| + |phi(w2)| - |phi(w w2)| for a reduced product w w2."""
    a, b = apply(phi, w), apply(phi, w2)
    return len(a) + len(b) - len(apply(phi, w + w2))


def _max_defect(phi: Automorphism, depth: int) -> int:
    k = phi.rank
    words = [w for n in range(1, depth + 1) for w in reduced_words(k, n)]
    # the defect only depends on where phi(w) and phi(w2) meet, so cache images
    images = {w: apply(phi, w) for w in words}
    best = 0
    for w in words:
        iw = images[w]
        last = w[-1]
        for w2 in words:
            if w2[0] == -last:
                continue
            iw2 = images[w2]
            n = min(len(iw), len(iw2))
            c = 0
            while c < n and iw[-1 - c] == -iw2[c]:
                c += 1
            if 2 * c > best:
                best = 2 * c
    return best


def bcc_estimate(change: Automorphism, depth: int = 3) -> BccEstimate:
    """Bracket the bounded cancellation constant of a basis change."""
    inv = invert_aut(change)
    lower = max(_max_defect(change, depth), _max_defect(inv, depth)) // 2
    return BccEstimate(lower, structural_upper(change), depth)


def sampled_defects(change: Automorphism, samples: int, max_len: int, rng: Optional[random.Random] = None):
    """Yield (w, w2, defect) for random reduced products in both directions."""
    from .words import random_reduced_word

    rng = rng or random.Random(0)
    both = (change, invert_aut(change))
    k = change.rank
    for s in range(samples):
        phi = both[s % 2]
        w = random_reduced_word(k, rng.randint(1, max_len), rng)
        while True:
            w2 = random_reduced_word(k, rng.randint(1, max_len), rng)
            if w2[0] != -w[-1]:
                break
        yield w, w2, defect(phi, w, w2)
