"""Zeros of det(1 - L^+-_{G,s}) on the critical line and the real segment (1/2, 1]."""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, PoleError, ResolutionError
from .transfer_operators import build_charts, build_fast_operator, fredholm_det

__all__ = [
    "SpectralZero",
    "ScanNotice",
    "det_function",
    "default_dim",
    "scan_line",
    "winding_count",
    "refine_zero",
    "report_spectrum",
]


class ScanNotice(UserWarning):
    pass


def default_dim(q: int) -> int:
    return 40 if q <= 6 else 56


@dataclass(frozen=True)
class SpectralZero:
    s: complex
    parity: str
    winding: int
    refinement_residual: float
    basis_stability: float
    label: str = "cusp form"
    iterations: int = 0

    @property
    def eigenvalue(self) -> float:
        return (self.s * (1 - self.s)).real

    @property
    def t(self) -> float:
        return self.s.imag

    def to_json(self) -> dict:
        return {
            "s_re": self.s.real,
            "s_im": self.s.imag,
            "winding": self.winding,
            "residual": self.refinement_residual,
            "stability": self.basis_stability,
            "eigenvalue": self.eigenvalue,
            "label": self.label,
        }


class det_function:
    """Callable s -> det(1 - L^parity_{G,s}) with the charts built once."""

    def __init__(self, q: int, parity: str, N: int):
        if parity not in ("+", "-", "full"):
            raise DomainError(f"parity must be '+', '-' or 'full', got {parity!r}")
        self.q, self.parity, self.N = q, parity, N
        self.charts = build_charts(q, N)

    def __call__(self, s) -> complex:
        return fredholm_det(build_fast_operator(self.q, complex(s), self.parity, charts=self.charts))


def _norm_parity(parity: str) -> str:
    return {"plus": "+", "minus": "-", "even": "+", "odd": "-"}.get(parity, parity)


def _in_pole_zone(s: complex, radius: float = 1e-6) -> bool:
    # poles sit at s = (1 - k)/2
    k = round(1 - 2 * s.real)
    return k >= 0 and abs(s - (1 - k) / 2) < radius


def scan_line(q: int, parity: str, sigma: float, t_min: float, t_max: float, step: float, N: int | None = None):
    """Samples (t, det) along s = sigma + i t; pole-zone points are skipped with a notice."""
    if not 0 < sigma < 1:
        raise DomainError("sigma must lie in (0, 1)")
    if step <= 0:
        raise DomainError("step must be positive")
    if t_max < t_min:
        return []
    f = det_function(q, _norm_parity(parity), N or default_dim(q))
    n = int(math.floor((t_max - t_min) / step + 1e-9)) + 1
    out = []
    for i in range(n):
        t = t_min + i * step
        s = complex(sigma, t)
        if _in_pole_zone(s):
            warnings.warn(f"skipping s = {s}: too close to a possible pole", ScanNotice)
            continue
        d = f(s)
        out.append({"t": t, "s": s, "det": d, "abs": abs(d), "arg": cmath.phase(d)})
    return out


def _edge_phase(f, a: complex, b: complex, fa: complex, fb: complex, depth: int, floor: float) -> float:
    """Continuous phase change of f along the segment [a, b], bisecting until increments are small."""
    inc = cmath.phase(fb / fa)
    if abs(inc) < math.pi / 4:
        return inc
    if depth == 0:
        raise ResolutionError(f"phase of det not resolved on the segment [{a}, {b}]")
    mid = 0.5 * (a + b)
    fm = f(mid)
    if abs(fm) < floor:
        raise ResolutionError(f"det nearly vanishes on the contour at {mid}")
    return _edge_phase(f, a, mid, fa, fm, depth - 1, floor) + _edge_phase(f, mid, b, fm, fb, depth - 1, floor)


def winding_count(q: int, parity: str, rect, N: int | None = None, samples_per_edge: int = 8, *, f=None) -> int:
    """Winding number of det(1 - L^parity) around 0 along the boundary of rect = (re0, re1, im0, im1)."""
    re0, re1, im0, im1 = rect
    if not (re0 < re1 and im0 < im1):
        raise DomainError("rectangle must have positive width and height")
    f = f or det_function(q, _norm_parity(parity), N or default_dim(q))
    corners = [complex(re0, im0), complex(re1, im0), complex(re1, im1), complex(re0, im1)]
    pts = []
    for i in range(4):
        a, b = corners[i], corners[(i + 1) % 4]
        pts += [a + (b - a) * k / samples_per_edge for k in range(samples_per_edge)]
    for p in pts:
        if _in_pole_zone(p, 1e-3):
            raise PoleError(f"contour passes near a possible pole at {p}")
    vals = [f(p) for p in pts]
    scale = max(abs(v) for v in vals)
    floor = 1e-10 * scale
    if min(abs(v) for v in vals) < floor:
        raise ResolutionError("det nearly vanishes on the contour")
    total = 0.0
    for i in range(len(pts)):
        j = (i + 1) % len(pts)
        total += _edge_phase(f, pts[i], pts[j], vals[i], vals[j], 12, floor)
    w = total / (2 * math.pi)
    k = round(w)
    if abs(w - k) > 0.1:
        raise ResolutionError(f"winding {w:.3f} is not close to an integer")
    return int(k)


def _secant(f, s0: complex, max_iter: int, radius: float, tol_rel: float):
    ring = [f(s0 + 0.05 * cmath.exp(2j * math.pi * k / 4)) for k in range(4)]
    scale = max(abs(v) for v in ring)
    x0, x1 = s0, s0 + 1e-3
    f0, f1 = f(x0), f(x1)
    trace = [(x0, abs(f0)), (x1, abs(f1))]
    for it in range(max_iter):
        if abs(f1) <= tol_rel * scale:
            return x1, abs(f1) / scale, it + 1, trace
        denom = f1 - f0
        if denom == 0:
            break
        x2 = x1 - f1 * (x1 - x0) / denom
        if abs(x2 - s0) > radius:
            raise ConvergenceError(f"secant left the trust region around {s0}; trace {trace[-5:]}")
        x0, f0 = x1, f1
        x1, f1 = x2, f(x2)
        trace.append((x1, abs(f1)))
        if abs(x1 - x0) < 1e-14 * max(1.0, abs(x1)):
            return x1, abs(f1) / scale, it + 1, trace
    raise ConvergenceError(f"no convergence from seed {s0} in {max_iter} iterations; trace {trace[-5:]}")


def refine_zero(
    q: int,
    parity: str,
    s0,
    N: int | None = None,
    *,
    max_iter: int = 60,
    radius: float = 0.5,
    tol_rel: float = 1e-10,
    box: float = 0.02,
) -> SpectralZero:
    """Secant refinement of a zero, its winding number and its shift under N -> 2N."""
    parity = _norm_parity(parity)
    N = N or default_dim(q)
    s0 = complex(s0)
    f = det_function(q, parity, N)
    z, res, its, _ = _secant(f, s0, max_iter, radius, tol_rel)
    f2 = det_function(q, parity, 2 * N)
    z2, _, _, _ = _secant(f2, z, max_iter, radius, tol_rel)
    w = winding_count(q, parity, (z.real - box, z.real + box, z.imag - box, z.imag + box), f=f)
    if w < 1:
        raise ConvergenceError(f"refined point {z} has winding {w}")
    on_line = abs(z.real - 0.5) < 1e-5
    if abs(z - 1) < 1e-6:
        label = "s = 1, constant eigenfunction"
    elif on_line:
        label = "cusp form" if parity == "-" else "even cusp form candidate"
    else:
        label = "resonance/Z-zero, not cusp form"
    return SpectralZero(z, parity, w, res, abs(z2 - z), label, its)


def _local_minima(samples):
    vals = [smp["abs"] for smp in samples]
    return [i for i in range(1, len(vals) - 1) if vals[i] < vals[i - 1] and vals[i] <= vals[i + 1]]


def report_spectrum(
    q: int,
    parity: str,
    t_max: float,
    N: int | None = None,
    *,
    t_min: float = 0.5,
    step: float = 0.05,
    sigma: float = 0.5,
    real_segment: bool = True,
) -> list[SpectralZero]:
    """Scan, certify and refine zeros up to height t_max (and on real s in (1/2, 1])."""
    parity = _norm_parity(parity)
    N = N or default_dim(q)
    f = det_function(q, parity, N)
    zeros: list[SpectralZero] = []
    samples = []
    t = t_min
    while t <= t_max + 1e-12:
        s = complex(sigma, t)
        if not _in_pole_zone(s):
            d = f(s)
            samples.append({"t": t, "s": s, "det": d, "abs": abs(d)})
        t += step
    for i in _local_minima(samples):
        t0 = samples[i]["t"]
        rect = (sigma - 0.05, sigma + 0.05, t0 - 1.5 * step, t0 + 1.5 * step)
        try:
            w = winding_count(q, parity, rect, f=f)
        except ResolutionError:
            w = 1
        if w < 1:
            continue
        try:
            zeros.append(refine_zero(q, parity, complex(sigma, t0), N, radius=3 * step))
        except ConvergenceError as exc:
            warnings.warn(f"dip near t = {t0:.3f} did not refine: {exc}", ScanNotice)
    if real_segment:
        xs = np.arange(0.52, 1.0 + 1e-9, 0.02)
        vals = [f(complex(x, 0)).real for x in xs]
        for i in range(len(xs) - 1):
            if vals[i] == 0 or vals[i] * vals[i + 1] < 0:
                seed = xs[i] - vals[i] * (xs[i + 1] - xs[i]) / (vals[i + 1] - vals[i])
                try:
                    z = refine_zero(q, parity, complex(seed, 0), N, radius=0.05, box=0.005)
                except (ConvergenceError, ResolutionError) as exc:
                    warnings.warn(f"real-axis sign change near {seed:.4f} did not refine: {exc}", ScanNotice)
                    continue
                zeros.append(z)
    unique: list[SpectralZero] = []
    for z in sorted(zeros, key=lambda z: (z.s.imag, z.s.real)):
        if not any(abs(z.s - u.s) < 1e-6 for u in unique):
            unique.append(z)
    return unique
