"""Construction of phi = (delta1^n delta2^-n)^m psi with prescribed action on homology.

psi lifts the matrix, delta1 twists a base amalgam T and delta2 twists a
pushforward T theta^l.  The result carries every check that was run; none
of them certifies full irreducibility or hyperbolicity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import automorphism as au
from .automorphism import Automorphism
from .dynamics import (
    ConvergenceReport,
    FalsifierResult,
    InequalityReport,
    periodic_falsifier,
    stable_current_convergence,
    verify_twist_inequalities,
)
from .errors import BudgetExceeded, ConfigError, ScheduleExhausted
from .intmat import IntMatrix, gl_check, homology_criterion, lift_to_aut
from .splitting import (
    AMALGAM,
    CyclicSplitting,
    FillingReport,
    amalgam,
    dehn_twist,
    filling_heuristic,
    normalize_edge,
    pushforward,
)
from .words import conjugacy_test, fmt, inverse

CAVEAT = "full irreducibility and hyperbolicity are heuristically supported, not certified"


def default_theta(k: int) -> Automorphism:
    """a_i -> a_{i+1} for i < k and a_k -> a_1 a_2; char poly t^k - t - 1."""
    if k < 3:
        raise ConfigError("the default theta needs k >= 3")
    perm = tuple(range(2, k + 1)) + (1,)
    return au.from_moves([au.permute(perm), au.right_multiply(k, 1)], k)


def default_splitting(k: int) -> CyclicSplitting:
    """Amalgam <a, b> *_<b> <b, c, ...> with edge letter b."""
    return amalgam(k, (1, 2), 2)


def pushed_splitting(T: CyclicSplitting, theta: Automorphism, ell: int) -> CyclicSplitting:
    return normalize_edge(pushforward(T, theta, ell), relative_to=T)


def choose_ell(T: CyclicSplitting, theta: Automorphism, schedule, L: int,
               psi: Optional[Automorphism] = None) -> Tuple[int, CyclicSplitting, FillingReport, List[str]]:
    """First l whose pushforward fills with T on the scanned fragment and,
    when psi is given, whose edge class is neither psi(c1) nor its inverse."""
    log = []
    c1 = T.edge_word()
    for ell in schedule:
        T2 = pushed_splitting(T, theta, ell)
        rep = filling_heuristic(T, T2, L, stop_at=1)
        if not rep.passes:
            log.append(f"l={ell}: common elliptic {rep.violations[0]}")
            continue
        if psi is not None:
            pc = au.apply(psi, c1)
            c2 = T2.edge_word()
            if conjugacy_test(pc, c2) or conjugacy_test(pc, inverse(c2)):
                log.append(f"l={ell}: psi(c1) is conjugate to the pushed edge")
                continue
        log.append(f"l={ell}: accepted")
        return ell, T2, filling_heuristic(T, T2, L), log
    raise ScheduleExhausted("no l in the schedule passed the filling and edge checks: " + "; ".join(log))


_REFERENCE: Dict[tuple, tuple] = {}


def reference_pair(k: int = 3, schedule=(1, 2, 4, 8, 16), L: int = 6) -> Tuple[CyclicSplitting, CyclicSplitting, int]:
    """Default splitting and its first filling pushforward by the default theta."""
    key = (k, tuple(schedule), L)
    if key not in _REFERENCE:
        T1 = default_splitting(k)
        ell, T2, _, _ = choose_ell(T1, default_theta(k), schedule, L)
        _REFERENCE[key] = (T1, T2, ell)
    return _REFERENCE[key]


@dataclass
class PipelineConfig:
    k: int
    matrix: IntMatrix
    seed_theta: Optional[Automorphism] = None
    base_splitting: Optional[CyclicSplitting] = None
    ell_schedule: Tuple[int, ...] = (1, 2, 4, 8, 16)
    n_schedule: Tuple[int, ...] = (2, 4, 8, 16)
    m_exponent: int = 1
    m_cap: int = 8
    filling_length: int = 6
    falsifier_length: int = 8
    falsifier_power: int = 6
    budget: Optional[int] = None
    inequality_length: int = 6
    inequality_n: int = 8
    converge_n: Tuple[int, ...] = (2, 4, 8, 16)
    converge_m: int = 6
    radius: int = 3
    converge_budget: Optional[int] = None
    random_seed: int = 0
    run_inequalities: bool = True
    run_convergence: bool = True

    def __post_init__(self):
        if self.k < 3:
            raise ConfigError("k must be at least 3; for k = 2 the map to GL(2, Z) is an isomorphism on Out")
        if self.matrix.k != self.k:
            raise ConfigError(f"matrix is {self.matrix.k}x{self.matrix.k}, expected k = {self.k}")
        gl_check(self.matrix)
        if self.seed_theta is None:
            self.seed_theta = default_theta(self.k)
        if self.base_splitting is None:
            self.base_splitting = default_splitting(self.k)
        if self.base_splitting.kind != AMALGAM:
            # an hnn twist sends [t] to [t] + [c], so phi_* = A would fail
            raise ConfigError("the base splitting must be an amalgam; hnn twists act nontrivially on homology")
        if self.base_splitting.rank != self.k:
            raise ConfigError("base splitting rank differs from k")
        if self.budget is None:
            self.budget = au.default_budget()
        if self.converge_budget is None:
            self.converge_budget = self.budget
        verdict = homology_criterion(au.abelianization(self.seed_theta))
        if not verdict.passes:
            raise ConfigError("seed theta fails the homological criterion: " + "; ".join(verdict.reasons))

    def to_record(self) -> dict:
        return {
            "k": self.k, "matrix": str(self.matrix), "seedTheta": self.seed_theta.to_record(),
            "baseSplitting": self.base_splitting.to_record(), "ellSchedule": list(self.ell_schedule),
            "nSchedule": list(self.n_schedule), "mExponent": self.m_exponent, "mCap": self.m_cap,
            "fillingLength": self.filling_length, "falsifier": {"Lmax": self.falsifier_length, "pMax": self.falsifier_power},
            "budget": self.budget, "inequalities": {"L": self.inequality_length, "nMax": self.inequality_n, "run": self.run_inequalities},
            "convergence": {"nList": list(self.converge_n), "mMax": self.converge_m, "R": self.radius,
                            "budget": self.converge_budget, "run": self.run_convergence},
            "randomSeed": self.random_seed,
        }


@dataclass
class ConstructionCertificate:
    phi: Automorphism
    matrix: IntMatrix
    matrix_check: bool
    twist_checks: Dict[str, bool]
    choices: Dict[str, int]
    splittings: Dict[str, dict]
    filling: FillingReport
    inequalities: Optional[List[InequalityReport]]
    convergence: Optional[ConvergenceReport]
    falsifier: FalsifierResult
    caveats: List[str]
    log: List[str] = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return {
            "phi": {"rank": self.phi.rank, "images": [fmt(w) for w in self.phi.images],
                    "factorCount": None if self.phi.factors is None else len(self.phi.factors)},
            "matrix": str(self.matrix),
            "phiStar": str(au.abelianization(self.phi)),
            "matrixCheck": self.matrix_check,
            "twistChecks": self.twist_checks,
            "choices": self.choices,
            "splittings": self.splittings,
            "fillingReport": self.filling.to_record(),
            "twistInequalities": None if self.inequalities is None else [r.to_record() for r in self.inequalities],
            "convergence": None if self.convergence is None else self.convergence.to_record(),
            "falsifierResult": self.falsifier.to_record(),
            "caveats": list(self.caveats),
            "log": list(self.log),
            "config": self.config,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True, indent=2) + "\n"


_INEQ_CACHE: Dict[tuple, List[InequalityReport]] = {}
_CONV_CACHE: Dict[tuple, ConvergenceReport] = {}


def _guarded_power_then(base: Automorphism, m: int, psi: Automorphism, budget: int) -> Automorphism:
    """base^m o psi, refusing any image longer than the budget."""
    images = list(psi.images)
    for _ in range(m):
        images = [au.apply(base, w, budget) for w in images]
    factors = None
    if base.factors is not None and psi.factors is not None:
        factors = base.factors * m + psi.factors
    return Automorphism(psi.rank, images, factors=factors, check=False)


def construct_phi(config: PipelineConfig) -> ConstructionCertificate:
    k, A = config.k, config.matrix
    budget = config.budget
    psi = lift_to_aut(A)
    T1 = config.base_splitting
    theta = config.seed_theta
    ell, T2, filling, log = choose_ell(T1, theta, config.ell_schedule, config.filling_length, psi)
    d1, d2 = dehn_twist(T1), dehn_twist(T2)
    ident = IntMatrix.identity(k)
    twist_checks = {"delta1IsIA": au.abelianization(d1) == ident, "delta2IsIA": au.abelianization(d2) == ident}

    phi = result = None
    chosen = {}
    for n in config.n_schedule:
        base = au.compose(dehn_twist(T1, n), dehn_twist(T2, -n))
        m = config.m_exponent
        while m <= config.m_cap:
            try:
                cand = _guarded_power_then(base, m, psi, budget)
            except BudgetExceeded:
                log.append(f"n={n} m={m}: images exceed the budget")
                break
            res = periodic_falsifier(cand, config.falsifier_length, config.falsifier_power, budget,
                                     rng_seed=config.random_seed)
            if res.witness is None:
                phi, result, chosen = cand, res, {"ell": ell, "n": n, "m": m}
                log.append(f"n={n} m={m}: no periodic class found")
                break
            log.append(f"n={n} m={m}: periodic witness {res.witness}")
            m *= 2
        if phi is not None:
            break
    if phi is None:
        raise ScheduleExhausted("every (n, m) in the schedule produced a periodic witness or hit the budget")

    matrix_check = au.abelianization(phi) == A
    if not matrix_check:
        raise AssertionError("phi_* differs from A although both twists act trivially on homology")

    pair_key = (hash(T1), hash(T2))
    ineq = None
    if config.run_inequalities:
        key = pair_key + (config.inequality_length, config.inequality_n)
        if key not in _INEQ_CACHE:
            _INEQ_CACHE[key] = verify_twist_inequalities(T1, T2, config.inequality_length, config.inequality_n)
        ineq = _INEQ_CACHE[key]
    conv = None
    if config.run_convergence:
        key = pair_key + (tuple(config.converge_n), config.converge_m, config.radius, config.converge_budget)
        if key not in _CONV_CACHE:
            _CONV_CACHE[key] = stable_current_convergence(T1, T2, config.converge_n, config.converge_m, config.radius,
                                                          config.converge_budget, config.filling_length)
        conv = _CONV_CACHE[key]

    caveats = [
        CAVEAT,
        "the l, n and m schedules are engineering policy; the thresholds in the existence argument are not effective",
        filling.note,
    ]
    if ineq is not None:
        failing = [r.ident for r in ineq if not r.passes]
        if failing:
            caveats.append("twist inequalities with violations on the scanned words: " + ", ".join(failing))
    splits = {"T1": T1.to_record(), "T2": T2.to_record(), "c1": fmt(T1.edge_word()), "c2": fmt(T2.edge_word())}
    return ConstructionCertificate(phi, A, matrix_check, twist_checks, chosen, splits, filling, ineq, conv,
                                   result, caveats, log, config.to_record())
