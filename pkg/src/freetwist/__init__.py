"""Free-group automorphisms built from Dehn twists on cyclic splittings."""

from .words import Basis, CyclicWord, cyclic_reduce, fmt, parse, reduce
from .automorphism import Automorphism, abelianization, apply, compose, invert_aut
from .intmat import IntMatrix, elementary_decompose, gl_check, homology_criterion, lift_to_aut

__version__ = "0.1.0"
