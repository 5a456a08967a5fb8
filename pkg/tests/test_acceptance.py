"""The ten acceptance criteria at their stated tolerances.

Each test prints one PASS/FAIL line; the lines are repeated together in the
terminal summary (see conftest.py).
"""

import math

import pytest

from heckezeta import verification as V

ACCEPTANCE_LINES = []


def _report(result):
    line = result.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    for d in result.details:
        print("    " + d)
    return result


def test_criterion_01_det_equals_euler_product():
    # each (q, s) pair must sit within max(tail estimate, 1e-5); measured is the worst ratio to that
    r = _report(V.check_det_zeta())
    assert r.passed and r.measured <= 1.0
    assert r.seconds <= 3 * 60


def test_criterion_02_factorization_and_negative_control():
    r = _report(V.check_factorization())
    assert r.passed and r.measured <= 1e-8


def test_criterion_03_traces_match_word_sums():
    r = _report(V.check_trace_words())
    assert r.passed and r.measured <= 1e-7


def test_criterion_04_billiard_zeta_identities():
    r = _report(V.check_billiard_zeta())
    assert r.passed and r.measured <= 1e-5


def test_criterion_05_boundary_word_sums():
    r = _report(V.check_boundary_sums())
    assert r.passed and r.measured <= 1e-12


def test_criterion_06_mayer_equivalence():
    r = _report(V.check_mayer())
    assert r.passed and r.measured <= 1e-9


def test_criterion_07_continuation():
    r = _report(V.check_continuation())
    assert r.passed and r.measured <= 1e-9


def test_criterion_08_odd_cusp_form_q3():
    r = _report(V.check_spectral())
    assert r.passed
    assert r.seconds <= 600


def test_criterion_09_combinatorics():
    r = _report(V.check_combinatorics())
    assert r.passed and r.measured == 0


def test_criterion_10_dynamics():
    r = _report(V.check_dynamics())
    assert r.passed and r.measured <= 1e-12


def test_zeta_h_2_1():
    from heckezeta.transfer_operators import hurwitz_zeta

    assert abs(hurwitz_zeta(2, 1) - math.pi**2 / 6) <= 1e-13
