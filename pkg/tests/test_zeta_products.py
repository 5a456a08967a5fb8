import cmath
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from heckezeta.errors import ConvergenceError, DomainError
from heckezeta.hecke_core import make_group, norm
from heckezeta.zeta_products import (
    TruncationSpec,
    ZV_pm,
    Z_pm,
    Zc_pm,
    boundary_word_sum,
    selberg_Z,
    tr_b_pm,
    tr_tau,
)

GOLDEN_NORM = ((3 + math.sqrt(5)) / 2) ** 2
SILVER_NORM = 3 + 2 * math.sqrt(2)


def test_tr_tau_examples():
    assert tr_tau(GOLDEN_NORM, 1) == pytest.approx(1 / (GOLDEN_NORM - 1), rel=1e-13)
    assert tr_tau(GOLDEN_NORM, 1) == pytest.approx(0.170820, abs=1e-6)
    assert tr_tau(GOLDEN_NORM, 0) == pytest.approx(GOLDEN_NORM / (GOLDEN_NORM - 1), rel=1e-14)
    assert abs(tr_tau(2.0, 50)) < 1e-12


def test_tr_tau_needs_norm_above_one():
    with pytest.raises(DomainError):
        tr_tau(1.0, 2)


def test_tr_b_reflected_boundary_class():
    # det -1, k = 1 at q = 4: -(1/2) N^-s / (1 + N^-1)
    N = SILVER_NORM
    for s in (1, 2):
        expect = -0.5 * N**-s / (1 + 1 / N)
        assert tr_b_pm(N, s, "-", "even", det=-1, k=1) == pytest.approx(expect, rel=1e-13)
    assert tr_b_pm(N, 2, "-", "even", det=-1, k=1).real == pytest.approx(-0.012564, abs=1e-6)


@given(st.floats(1.5, 1e6), st.floats(0.6, 5), st.floats(-20, 20), st.integers(0, 3))
def test_tr_b_det_one_is_parity_blind(N, re, im, k):
    s = complex(re, im)
    plus = tr_b_pm(N, s, "+", "even", det=1, k=k)
    minus = tr_b_pm(N, s, "-", "even", det=1, k=k)
    assert plus == minus
    assert abs(plus - tr_tau(N, s) / 2**k) <= 1e-14 * abs(plus)
    # odd q ignores k
    assert tr_b_pm(N, s, "+", "odd", det=1, k=k) == tr_tau(N, s)


def test_parity_must_be_sign():
    with pytest.raises(DomainError):
        tr_b_pm(GOLDEN_NORM, 2, "full", "odd")


def test_euler_product_half_plane():
    with pytest.raises(ConvergenceError):
        selberg_Z(3, 1.0)
    with pytest.raises(ConvergenceError):
        Z_pm(4, 0.9 + 3j, "+")


def test_truncation_spec_validation():
    with pytest.raises(DomainError):
        TruncationSpec(X=1.0)
    with pytest.raises(DomainError):
        TruncationSpec(X=10.0, tail_mode="exact")


@pytest.mark.parametrize("q", [4, 6])
@pytest.mark.parametrize("p", [1, 2, 3])
@pytest.mark.parametrize("s", [2.0, 1.5 + 2j])
def test_boundary_sum_closed_form(q, p, s):
    Nm = norm(make_group(q).g[q // 2])
    Np = Nm**p
    minus = cmath.exp(-(s + 1) * math.log(Np)) / (1 - Np**-2)
    plus = cmath.exp(-s * math.log(Np)) / (1 - Np**-2)
    assert abs(boundary_word_sum(q, p, s, "-") - minus) <= 1e-12 * abs(minus)
    assert abs(boundary_word_sum(q, p, s, "+") - plus) <= 1e-12 * abs(plus)


def test_boundary_sum_needs_even_q():
    with pytest.raises(DomainError):
        boundary_word_sum(5, 1, 2.0)


def test_correction_factor_needs_even_q():
    with pytest.raises(DomainError):
        Zc_pm(5, 2.0, "+")


def test_even_q_product_splits():
    s = 2.0
    Z, Zp, Zm = selberg_Z(4, s, 1e3), Z_pm(4, s, "+", 1e3), Z_pm(4, s, "-", 1e3)
    tail = Z.tail_estimate + Zp.tail_estimate + Zm.tail_estimate
    assert abs(Zp.value * Zm.value - Z.value) <= tail


def test_factors_tend_to_one():
    for parity in "+-":
        assert abs(ZV_pm(5, 40.0, parity, 200.0).log_value) < 1e-10
        assert abs(Z_pm(5, 40.0, parity, 200.0).log_value) < 1e-10


def test_selberg_z_tail_is_reported():
    v = selberg_Z(3, 2.0, 1e3)
    assert 0 < v.tail_estimate < 1e-2
    assert v.truncation.X == 1e3
