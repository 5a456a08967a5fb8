import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from heckezeta.errors import BoundaryNotice, DomainError
from heckezeta.hecke_core import make_group, mobius_act
from heckezeta.interval_maps import (
    SYSTEM_NAMES,
    ExactPoint,
    branch_table,
    one_is_cuspidal,
    step,
    verify_acceleration,
    verify_partition,
)


def _systems(q):
    names = ["F", "G"] + (["FQ_odd", "GQ_odd"] if q % 2 else ["FQ_even", "GQ_even"])
    for name in names:
        for parity in (("+", "-") if "Q" in name else ("+",)):
            yield name, parity


def test_system_names():
    assert set(SYSTEM_NAMES) == {"F", "G", "FQ_odd", "GQ_odd", "FQ_even", "GQ_even"}


def test_first_parabolic_branch():
    q = 5
    lam = make_group(q).lam_float
    hits = step(branch_table(q, "F"), lam + 0.3)
    assert len(hits) == 1
    image, g, w = hits[0]
    assert image == pytest.approx(0.3, abs=1e-15)
    assert g.as_array().tolist() == make_group(q).g[1].as_array().tolist()
    assert w == 1


def test_q3_acceleration_by_hand():
    F, G = branch_table(3, "F"), branch_table(3, "G")
    x = 2.7
    once = step(F, x)[0][0]
    twice = step(F, once)[0][0]
    assert twice == pytest.approx(x - 2, abs=1e-15)
    assert step(G, x)[0][0] == pytest.approx(x - 2, abs=1e-15)


def test_first_step_of_both_maps_agrees():
    q = 4
    lam = make_group(q).lam_float
    F, G = branch_table(q, "F"), branch_table(q, "G")
    for x in (lam + 0.1, 1.5 * lam, 2 * lam - 0.1):
        assert step(F, x)[0][0] == pytest.approx(step(G, x)[0][0], abs=1e-15)


def test_parity_mismatch():
    with pytest.raises(DomainError):
        branch_table(5, "FQ_even")
    with pytest.raises(DomainError):
        branch_table(4, "GQ_odd")


def test_carrier_endpoints_excluded():
    F = branch_table(5, "F")
    for x in (0.0, math.inf, -1.0):
        with pytest.raises(DomainError):
            step(F, x)


def test_stored_endpoint_is_reported():
    q = 5
    lam = make_group(q).lam_float
    with pytest.raises(BoundaryNotice):
        step(branch_table(q, "F"), lam)


@pytest.mark.parametrize("q", [3, 4, 5, 6, 7])
def test_branch_images_are_exact(q):
    for name, parity in _systems(q):
        sys = branch_table(q, name, parity)
        for b in sys.instantiate(4):
            lo, hi = b.image()
            a, c = b.lo.act(b.element), b.hi.act(b.element)
            # reflections reverse orientation
            assert (lo.same(a) and hi.same(c)) or (lo.same(c) and hi.same(a))
            if not b.lo.is_inf() and not b.hi.is_inf():
                assert b.lo.cmp(b.hi) <= 0


def test_exact_point_order_and_action():
    q = 4
    G = make_group(q)
    one, inf = ExactPoint.rational(q, 1), ExactPoint.infinity(q)
    assert one.cmp(inf) < 0
    assert float(one.act(G.Q)) == 1.0
    assert one.act(G.g[2]).same(one)


def test_cusp_status_of_one():
    assert one_is_cuspidal(3) and one_is_cuspidal(5) and one_is_cuspidal(7)
    assert not one_is_cuspidal(4) and not one_is_cuspidal(6)


def test_f_partition_q5_full_sample():
    rep = verify_partition(branch_table(5, "F"), samples=10_000, seed=1)
    assert rep.ok, rep.to_json()
    assert set(rep.hit_counts) == {1}


@pytest.mark.parametrize("q", [3, 4, 5, 6])
def test_partitions_and_weights(q):
    for name, parity in _systems(q):
        rep = verify_partition(branch_table(q, name, parity), samples=1500, seed=q)
        assert rep.ok, rep.to_json()


@pytest.mark.parametrize("parity", ["+", "-"])
def test_even_relation_matches_closed_form(parity):
    rep = verify_partition(branch_table(4, "FQ_even", parity), samples=500, operator_points=100)
    assert rep.operator_error is not None and rep.operator_error <= 1e-12


def test_even_relation_weights():
    sys = branch_table(6, "FQ_even", "-")
    for x in (0.05, 0.3, 0.55):
        weights = sorted(w for _, _, w in step(sys, x))
        assert weights in ([1.0], [-1.0], [-0.5, 0.5], [0.5, 0.5], [-0.5, -0.5], [-1.0, 1.0])


@pytest.mark.parametrize("q", [3, 4, 5, 6, 7])
def test_acceleration(q):
    rep = verify_acceleration(q, samples=100, n_max=20, seed=q)
    assert rep.max_error <= 1e-13


@given(st.floats(0.01, 0.99))
def test_odd_reflected_branches_stay_in_carrier(x):
    sys = branch_table(5, "FQ_odd", "-")
    try:
        hits = step(sys, x)
    except BoundaryNotice:
        return
    assert len(hits) == 1
    image, g, w = hits[0]
    assert abs(w) == 1
    assert image == pytest.approx(mobius_act(g, x))
