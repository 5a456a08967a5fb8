import math

import numpy as np
import pytest

from heckezeta.errors import DomainError
from heckezeta.hecke_core import make_group
from heckezeta.oracles import ball_elements, brute_force_classes, conjugacy_partition, mayer_det, mayer_matrix


def test_mayer_trace_from_fixed_points():
    # Tr L_s = sum over the fixed points x_k of x -> 1/(x+k) of x_k^(2s) / (1 + x_k^2)
    s = 2.0
    tr = np.trace(mayer_matrix(s, 48))
    expect = 0.0
    for k in range(1, 4000):
        x = (math.sqrt(k * k + 4) - k) / 2
        expect += x ** (2 * s) / (1 + x * x)
    assert abs(tr - expect) < 1e-9


def test_mayer_det_converges_in_n():
    a, b = mayer_det(1.5 + 0.5j, 1, n=32), mayer_det(1.5 + 0.5j, 1, n=48)
    assert abs(a - b) < 1e-10


def test_ball_is_closed_under_inverse():
    ball = ball_elements(4, 6.0, False)
    keys = {tuple(np.round(m.ravel(), 8)) for m in ball}
    for m in ball[:200]:
        inv = np.linalg.inv(m)
        assert tuple(np.round(inv.ravel(), 8) + 0.0) in keys or tuple(np.round(-inv.ravel(), 8) + 0.0) in keys


def test_partition_merges_rotations():
    G = make_group(3)
    a = (G.g[1] * G.g[2]).as_array()
    b = (G.g[2] * G.g[1]).as_array()
    c = (G.g[1] * G.g[1] * G.g[2]).as_array()
    labels = conjugacy_partition(3, "Gamma", [a, b, c], radius=12.0)
    assert labels[0] == labels[1] != labels[2]


def test_unknown_group_tag():
    with pytest.raises(DomainError):
        brute_force_classes(3, "PSL2Z", 10.0)


def test_smallest_classes_q3():
    N = ((3 + math.sqrt(5)) / 2) ** 2
    got = brute_force_classes(3, "Gamma", 10.0)
    assert [d for _, d in got] == [1]
    assert got[0][0] == pytest.approx(N, rel=1e-12)
