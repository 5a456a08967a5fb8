import pytest

from heckezeta.errors import ConvergenceError, DomainError
from heckezeta.spectral_scan import refine_zero, report_spectrum, scan_line, winding_count


def test_empty_range():
    assert scan_line(3, "-", 0.5, 5.0, 4.0, 0.1, N=8) == []


def test_scan_rejects_bad_sigma():
    with pytest.raises(DomainError):
        scan_line(3, "-", 1.5, 1.0, 2.0, 0.1, N=8)


def test_no_zeros_in_convergent_half_plane():
    assert winding_count(4, "+", (1.2, 2.0, 1.0, 6.0), N=24) == 0


def test_winding_around_q3_odd_zero():
    assert winding_count(3, "-", (0.45, 0.55, 9.3, 9.7), N=32) == 1


def test_refinement_without_zero_fails():
    with pytest.raises(ConvergenceError):
        refine_zero(3, "-", 2.0, N=24, max_iter=20, radius=0.05)


def test_q3_odd_spectrum_to_14():
    zeros = report_spectrum(3, "-", 14.0)
    ts = sorted(z.t for z in zeros if z.label == "cusp form")
    assert len(ts) >= 2
    assert ts[0] == pytest.approx(9.5337, abs=1e-3)
    assert ts[1] == pytest.approx(12.1730, abs=1e-3)
    assert all(z.winding == 1 for z in zeros)


def test_q5_first_odd_zero():
    # the lowest odd zero of the pentagonal group sits just above t = 6
    assert not [z for z in report_spectrum(5, "-", 6.0, N=32) if z.label == "cusp form"]
    zeros = report_spectrum(5, "-", 7.0, N=32)
    assert len(zeros) == 1
    z = zeros[0]
    assert z.t == pytest.approx(6.47370, abs=1e-4)
    assert abs(z.s.real - 0.5) < 1e-6
    assert z.basis_stability < 1e-4
