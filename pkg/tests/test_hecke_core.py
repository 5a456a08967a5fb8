import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heckezeta.errors import BranchError, ClassificationError, DomainError
from heckezeta.hecke_core import (
    classify_element,
    j_factor,
    make_group,
    minimal_polynomial,
    mobius_act,
    norm,
    tau_apply,
)

QS = st.integers(min_value=3, max_value=12)


def test_rejects_small_q():
    with pytest.raises(DomainError):
        make_group(2)


def test_q3_lambda_is_one():
    G = make_group(3)
    assert minimal_polynomial(3) == (-1, 1)
    assert G.lam_float == 1.0


def test_q5_golden_ratio():
    # coefficients run from the constant term upwards
    assert minimal_polynomial(5) == (-1, -1, 1)
    assert make_group(5).lam_float == pytest.approx(1.6180339887, abs=1e-10)


def test_q3_parabolic_generators():
    G = make_group(3)
    assert np.array_equal(G.g[1].as_array(), [[1, -1], [0, 1]])
    assert np.array_equal(G.g[2].as_array(), [[1, 0], [-1, 1]])


@given(QS)
def test_lambda_is_root_of_its_polynomial(q):
    lam = 2 * math.cos(math.pi / q)
    psi = minimal_polynomial(q)
    assert abs(sum(c * lam**i for i, c in enumerate(psi))) < 1e-9
    assert make_group(q).lam_float == pytest.approx(lam, rel=1e-14)


@given(QS)
def test_group_relations_exact(q):
    G = make_group(q)
    I = G.identity
    assert (G.S * G.S).as_array().tolist() in ([[1, 0], [0, 1]], [[-1, 0], [0, -1]])
    P = G.U
    for _ in range(q - 1):
        P = P * G.U
    assert np.allclose(np.abs(P.as_array()), np.abs(I.as_array()))
    assert (G.Q * G.Q).is_identity()
    for k in range(1, q):
        lhs = (G.Q * G.g[k]).as_array()
        rhs = (G.g[q - k] * G.Q).as_array()
        assert np.allclose(lhs, rhs) or np.allclose(lhs, -rhs)


def test_mobius_examples():
    assert mobius_act(make_group(3).Q, 2) == 0.5
    assert mobius_act(make_group(4).g[2], 1) == pytest.approx(1.0, abs=1e-15)
    assert mobius_act(make_group(3).g[1], math.inf) == math.inf


def test_j_factor_examples():
    G = make_group(3)
    assert j_factor(G.identity, 0.3, 1.7 + 2j) == 1
    with pytest.raises(BranchError):
        j_factor(G.g[2], 1.0, 1)
    assert j_factor(G.g[2], 0.25, 2) == pytest.approx(((0.75) ** -2) ** 2, rel=1e-14)


def test_tau_identity_on_constants():
    G = make_group(4)
    assert tau_apply(G.identity, 2.5, lambda t: 1.0, 0.4) == 1


@given(st.floats(min_value=0.05, max_value=0.9), st.floats(min_value=0.5, max_value=3))
def test_tau_is_a_cocycle(t, s):
    # tau(gh) = tau(g) tau(h) on the positive reals for elements mapping (0, 1) into itself
    G = make_group(5)
    g, h = G.g[3], G.g[4]
    f = lambda x: 1.0 / (1.0 + x * x)
    lhs = tau_apply(g * h, s, f, t)
    rhs = tau_apply(g, s, lambda u: tau_apply(h, s, f, u), t)
    assert abs(lhs - rhs) <= 1e-11 * max(1.0, abs(lhs))


def test_norm_examples():
    G3, G4 = make_group(3), make_group(4)
    assert norm(G3.g[1] * G3.g[2]) == pytest.approx(((3 + math.sqrt(5)) / 2) ** 2, rel=1e-13)
    assert norm(G4.g[2]) == pytest.approx(3 + 2 * math.sqrt(2), rel=1e-13)
    # (Q g_2)^2 = g_2^2, so both have the same norm
    assert norm(G4.Q * G4.g[2]) == pytest.approx(3 + 2 * math.sqrt(2), rel=1e-13)


def test_classification():
    G = make_group(3)
    assert classify_element(G.S) == "elliptic"
    assert classify_element(G.g[1]) == "parabolic"
    assert classify_element(G.Q) == "elliptic"
    with pytest.raises(ClassificationError):
        norm(G.S)
