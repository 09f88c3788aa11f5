import json

import pytest

from freetwist import automorphism as au
from freetwist.errors import ConfigError, NotUnimodular, ScheduleExhausted
from freetwist.intmat import IntMatrix, homology_criterion
from freetwist.pipeline import (
    CAVEAT,
    PipelineConfig,
    choose_ell,
    construct_phi,
    default_splitting,
    default_theta,
)
from freetwist.splitting import hnn
from freetwist.words import fmt


def quick(matrix, **kw):
    a = IntMatrix.parse(matrix)
    return PipelineConfig(a.k, a, run_inequalities=False, run_convergence=False, **kw)


@pytest.mark.parametrize("k", [3, 4, 5, 6])
def test_default_theta_passes_criterion(k):
    theta = default_theta(k)
    v = homology_criterion(au.abelianization(theta))
    assert v.passes
    assert v.char_poly == (1,) + (0,) * (k - 2) + (-1, -1)


def test_default_theta_k3(theta3):
    assert [fmt(w) for w in theta3.images] == ["b", "c", "ab"]


def test_default_splitting():
    T = default_splitting(4)
    assert T.a_part == (1, 2) and T.edge == 2 and T.b_part == (3, 4)
    # the edge letter is a basis letter, hence primitive
    assert T.edge_word() == (2,)


def test_config_errors():
    with pytest.raises(ConfigError):
        PipelineConfig(2, IntMatrix.identity(2))
    with pytest.raises(ConfigError):
        PipelineConfig(3, IntMatrix.identity(4))
    with pytest.raises(NotUnimodular):
        PipelineConfig(3, IntMatrix.parse("2,0,0;0,1,0;0,0,1"))
    with pytest.raises(ConfigError):
        PipelineConfig(3, IntMatrix.identity(3), seed_theta=au.identity(3))
    with pytest.raises(ConfigError):
        PipelineConfig(3, IntMatrix.identity(3), base_splitting=hnn(3, 1, 3))


def test_choose_ell_reference(theta3):
    ell, T2, rep, log = choose_ell(default_splitting(3), theta3, (1, 2, 4, 8, 16), 6)
    assert ell == 8 and rep.passes
    assert log[:3] == ["l=1: common elliptic a", "l=2: common elliptic a", "l=4: common elliptic a"]


def test_schedule_exhausted():
    with pytest.raises(ScheduleExhausted):
        construct_phi(quick("1,0,0;0,1,0;0,0,1", ell_schedule=(1, 2)))


@pytest.mark.parametrize("matrix", ["1,0,0;0,1,0;0,0,1", "-1,0,0;0,1,0;0,0,1", "0,0,1;1,0,1;0,1,0"])
def test_construct_matrix_exact(matrix):
    cert = construct_phi(quick(matrix))
    assert cert.matrix_check
    assert au.abelianization(cert.phi) == IntMatrix.parse(matrix)
    assert CAVEAT in cert.caveats
    assert cert.twist_checks == {"delta1IsIA": True, "delta2IsIA": True}
    assert cert.falsifier.witness is None
    assert cert.choices["ell"] == 8


def test_m_escalation_log():
    cert = construct_phi(quick("1,0,0;0,1,0;0,0,1"))
    assert cert.choices == {"ell": 8, "n": 2, "m": 1}
    assert cert.log[-1] == "n=2 m=1: no periodic class found"


def test_certificate_byte_stable():
    a = construct_phi(quick("0,1,0;1,0,0;0,0,1")).to_json()
    b = construct_phi(quick("0,1,0;1,0,0;0,0,1")).to_json()
    assert a == b
    rec = json.loads(a)
    assert rec["phiStar"] == "0,1,0;1,0,0;0,0,1" and rec["matrixCheck"] is True
    assert rec["fillingReport"]["certifying"] is False


def test_k4_construction():
    cert = construct_phi(quick("1,1,0,0;0,1,0,0;0,0,1,0;0,0,0,1", falsifier_length=5, falsifier_power=3))
    assert cert.matrix_check and cert.falsifier.witness is None
