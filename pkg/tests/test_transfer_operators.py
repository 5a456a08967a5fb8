import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heckezeta.errors import DomainError, PoleError
from heckezeta.hecke_core import j_factor, make_group, mobius_act
from heckezeta.oracles import mayer_det
from heckezeta.transfer_operators import (
    apply_slow_operator,
    build_charts,
    build_fast_operator,
    fredholm_det,
    fredholm_logdet,
    hurwitz_zeta,
    matrix_trace_power,
    symmetry_decomposition_check,
    symmetry_matrix,
)


def test_hurwitz_known_values():
    assert abs(hurwitz_zeta(2, 1) - math.pi**2 / 6) < 1e-13
    assert abs(hurwitz_zeta(3, 2) - 0.2020569032) < 1e-10


def test_hurwitz_pole():
    with pytest.raises(PoleError):
        hurwitz_zeta(1.0, 0.5)


@given(st.floats(0.6, 8), st.floats(-30, 30), st.floats(0.25, 5))
def test_hurwitz_matches_mpmath(re, im, a):
    s = complex(re, im)
    ref = complex(mpmath.zeta(s, a))
    assert abs(hurwitz_zeta(s, a) - ref) <= 1e-12 * max(1.0, abs(ref))


@given(st.floats(-3, 6), st.floats(-20, 20), st.floats(0.25, 4))
def test_hurwitz_shift_recurrence(re, im, a):
    s = complex(re, im)
    if abs(s - 1) < 1e-3:
        return
    lhs = hurwitz_zeta(s, a) - hurwitz_zeta(s, a + 1)
    rhs = a ** (-s)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


def test_q3_middle_chart_is_empty():
    charts = build_charts(3, 16)
    assert charts["Dr"].dim == 0
    assert charts["Dq1"].dim == charts["D1"].dim == 16


def test_reflected_nodes():
    charts = build_charts(5, 16)
    assert np.allclose(np.sort_complex(charts["D1"].to_x(charts["D1"].nodes)),
                       np.sort_complex(1 / charts["Dq1"].to_x(charts["Dq1"].nodes)))


def test_full_operator_block_zeros():
    L = build_fast_operator(5, 2.0, "full", N=16)
    for lab in ("Dq1", "D1"):
        blk = L.blocks.get((lab, lab))
        assert blk is None or not np.any(blk)


def test_unknown_parity():
    with pytest.raises(DomainError):
        build_fast_operator(4, 2.0, "odd", N=8)


def test_fredholm_of_zero():
    assert fredholm_det(np.zeros((5, 5))) == 1
    assert fredholm_det(np.zeros((0, 0))) == 1


@given(st.integers(2, 8), st.integers(0, 2**31 - 1))
def test_fredholm_trace_series(n, seed):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    M *= 0.3 / np.linalg.norm(M, 2)
    series = -sum(matrix_trace_power(M, k) / k for k in range(1, 60))
    assert abs(fredholm_logdet(M) - series) < 1e-12
    assert abs(fredholm_det(M) - np.exp(series)) < 1e-12


def test_trace_power_one_is_diagonal_sum():
    L = build_fast_operator(4, 2.0, "+", N=8)
    assert matrix_trace_power(L, 1) == pytest.approx(np.trace(L.flat), rel=1e-14)


@pytest.mark.parametrize("q,s", [(3, 2.0), (4, 2.0), (5, 1.5 + 0.7j)])
def test_symmetry_decomposition(q, s):
    rep = symmetry_decomposition_check(q, s, N=24)
    assert rep.ok, rep


def test_even_half_weights_are_essential():
    rep = symmetry_decomposition_check(4, 2.0, N=24, half_weight=1.0)
    assert rep.factorization > 1e-4


def test_swap_similarity_keeps_det():
    charts = build_charts(4, 24)
    L = build_fast_operator(4, 1.3 + 2j, "full", charts=charts).flat
    P = symmetry_matrix(charts)
    assert abs(fredholm_det(P @ L @ np.linalg.inv(P)) - fredholm_det(L)) < 1e-10


@pytest.mark.parametrize("q", [3, 4, 5, 6])
def test_basis_refinement(q):
    # 1e-8 is first reached at N = 26 for q >= 4 (N = 24 gives about 1.8e-8)
    a = fredholm_det(build_fast_operator(q, 2.0, "full", N=26))
    b = fredholm_det(build_fast_operator(q, 2.0, "full", N=52))
    assert abs(a - b) < 1e-8


@pytest.mark.parametrize("parity", ["+", "-"])
def test_real_s_gives_real_det(parity):
    d = fredholm_det(build_fast_operator(6, 1.7, parity, N=24))
    assert abs(d.imag) < 1e-10


def test_q3_mayer_pairing():
    # the even operator is Mayer's operator, the odd one its negative
    s = 2.0
    plus = fredholm_det(build_fast_operator(3, s, "+", N=40))
    minus = fredholm_det(build_fast_operator(3, s, "-", N=40))
    assert abs(plus - mayer_det(s, +1)) < 1e-9
    assert abs(minus - mayer_det(s, -1)) < 1e-9


def test_slow_operator_zero_and_constant():
    pts = np.array([0.2, 0.7, 3.1])
    assert np.all(apply_slow_operator(4, 2.0, "full", lambda x: 0.0, pts) == 0)
    G = make_group(4)
    direct = [sum(j_factor(G.g[k].inverse(), x, 2.0) for k in range(1, 4)) for x in pts]
    assert np.allclose(apply_slow_operator(4, 2.0, "full", lambda x: 1.0, pts), direct, rtol=1e-14)


def test_slow_operator_symmetric_input():
    # for a Q-invariant f the full slow operator agrees with the even combination on (0, 1)
    q, s = 5, 2.0
    f = lambda x: 1.0 / (1.0 + x) ** (2 * s) + (1.0 / x) ** (2 * s) / (1.0 + 1.0 / x) ** (2 * s)
    pts = np.linspace(0.1, 0.9, 7)
    full = apply_slow_operator(q, s, "full", f, pts)
    even = apply_slow_operator(q, s, "+", f, pts)
    assert np.allclose(full, even, rtol=1e-12)
