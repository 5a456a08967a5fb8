"""Acceptance checks shared by the test-suite and the `verify` command.

Each check returns a CheckResult; none of them raise on a failed comparison.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .hecke_core import make_group, minimal_polynomial, norm
from .interval_maps import branch_table, one_is_cuspidal, verify_acceleration, verify_partition
from .oracles import brute_force_classes, conjugacy_partition, mayer_det
from .spectral_scan import det_function, refine_zero, winding_count
from .symbolic_words import _period, enumerate_conj_classes, enumerate_regular_words, is_regular
from .transfer_operators import (
    build_charts,
    build_fast_operator,
    fredholm_det,
    hurwitz_zeta,
    matrix_trace_power,
    symmetry_decomposition_check,
)
from .zeta_products import ZV_pm, Z_pm, Zc_pm, boundary_word_sum, selberg_Z, trace_power_sum

__all__ = ["CheckResult", "SUITES", "CHECKS", "run_suite"]


@dataclass
class CheckResult:
    cid: str
    title: str
    passed: bool | None  # None: skipped
    measured: float = float("nan")
    tolerance: float = float("nan")
    details: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def status(self) -> str:
        return "SKIP" if self.passed is None else ("PASS" if self.passed else "FAIL")

    def line(self) -> str:
        return (
            f"{self.status} [{self.cid}] {self.title}: measured {self.measured:.3e}"
            f" (tolerance {self.tolerance:.1e}, {self.seconds:.1f} s)"
        )

    def to_json(self) -> dict:
        return {
            "id": self.cid,
            "title": self.title,
            "status": self.status,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "details": self.details,
        }


def _pick(default, qs):
    return tuple(q for q in default if qs is None or q in qs)


def _skip(cid, title):
    return CheckResult(cid, title, None, details=["no applicable q"])


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_timed
def check_algebra(qs=None) -> CheckResult:
    """Exact group identities: S^2, U^q, Q^2, Q g_k = g_(q-k) Q, psi(lambda) = 0, cusp status of 1."""
    title = "exact group identities"
    qs = tuple(qs) if qs else (3, 4, 5, 6, 7, 8)
    bad = []
    for q in qs:
        G = make_group(q)
        if not (G.S * G.S).is_identity():
            bad.append(f"q={q}: S^2")
        if not (G.U**q).is_identity():
            bad.append(f"q={q}: U^q")
        if not (G.Q * G.Q).is_identity():
            bad.append(f"q={q}: Q^2")
        for k in range(1, q):
            if G.Q * G.g[k] != G.g[q - k] * G.Q:
                bad.append(f"q={q}: Q g_{k} != g_{q-k} Q")
        if G.g[1] != G.T.inverse():
            bad.append(f"q={q}: g_1 is not T^-1")
        psi = minimal_polynomial(q)
        val = G.field.zero
        for i, c in enumerate(psi):
            val = val + G.lam**i * c
        if not val.is_zero():
            bad.append(f"q={q}: minimal polynomial does not vanish at lambda")
        if one_is_cuspidal(q) != (q % 2 == 1):
            bad.append(f"q={q}: cusp status of 1")
    return CheckResult("algebra", title, not bad, float(len(bad)), 0.0, bad)


@_timed
def check_det_zeta(qs=None, N: int = 32) -> CheckResult:
    """det(1 - L_s) against the truncated Euler product of the Selberg zeta function."""
    title = "det(1 - L_s) = Z(s)"
    qs = _pick((3, 4, 5), qs)
    if not qs:
        return _skip("1", title)
    worst, details, ok = 0.0, [], True
    for q in qs:
        X = 1e4 if q <= 4 else 1e3
        charts = build_charts(q, N)
        for s in (2.0, 2.5):
            Z = selberg_Z(q, s, X)
            d = fredholm_det(build_fast_operator(q, s, "full", charts=charts))
            err = abs(d - Z.value)
            tol = max(Z.tail_estimate, 1e-5)
            ok &= err <= tol
            worst = max(worst, err / tol)
            details.append(f"q={q} s={s}: |det - Z| = {err:.2e}, tolerance {tol:.2e}")
    return CheckResult("1", title, ok, worst, 1.0, details)


FACTOR_S = (2.0, 1.5 + 0.7j, 0.75 + 3j, 3.0, 1.1 + 0.2j)


@_timed
def check_factorization(qs=None, N: int = 32) -> CheckResult:
    """det(1 - L) = det(1 - L+) det(1 - L-), with a broken half-weight as negative control."""
    title = "det(1-L) = det(1-L+) det(1-L-)"
    qs = _pick((3, 4, 5, 6, 7), qs)
    if not qs:
        return _skip("2", title)
    worst, details, ok = 0.0, [], True
    for q in qs:
        for s in FACTOR_S:
            r = symmetry_decomposition_check(q, s, N)
            worst = max(worst, r.factorization)
            ok &= r.factorization <= 1e-8
        details.append(f"q={q}: worst relative defect {worst:.2e}")
        if q % 2 == 0:
            neg = symmetry_decomposition_check(q, 2.0, N, half_weight=1.0).factorization
            ok &= neg > 1e-4
            details.append(f"q={q}: defect with half weights set to 1 is {neg:.2e} (must exceed 1e-4)")
    return CheckResult("2", title, ok, worst, 1e-8, details)


@_timed
def check_trace_words(qs=None, N: int = 32, s: float = 2.0) -> CheckResult:
    """Tr (L+-)^n from the matrix against the sum of Tr b_s over the B_1 and B_4 words."""
    title = "Tr (L+-)^n = word sums"
    qs = _pick((3, 4, 5), qs)
    if not qs:
        return _skip("3", title)
    worst, details, ok = 0.0, [], True
    for q in qs:
        charts = build_charts(q, N)
        for parity in "+-":
            L = build_fast_operator(q, s, parity, charts=charts)
            for n in (1, 2, 3):
                val, tail = trace_power_sum(q, n, s, parity)
                err = abs(matrix_trace_power(L, n) - val)
                tol = max(tail, 1e-7)
                ok &= err <= tol
                worst = max(worst, err)
                details.append(f"q={q} {parity} n={n}: err {err:.2e}, tolerance {tol:.2e}")
    return CheckResult("3", title, ok, worst, 1e-7, details)


@_timed
def check_billiard_zeta(qs=None, s: float = 2.0) -> CheckResult:
    """Venkov zeta against Z_+-^4 (times Z^c_+- for even q), and Z_+ Z_- = Z for even q."""
    title = "Z^V = Z_+-^4 (Z^c), Z_+ Z_- = Z"
    qs = _pick((4, 5, 6, 7), qs)
    if not qs:
        return _skip("4", title)
    worst, details, ok = 0.0, [], True
    for q in qs:
        X = 1e4
        for parity in "+-":
            zv = ZV_pm(q, s, parity, X).value
            rhs = Z_pm(q, s, parity, X).value ** 4
            if q % 2 == 0:
                rhs *= Zc_pm(q, s, parity).value
            err = abs(zv / rhs - 1)
            ok &= err <= 1e-5
            worst = max(worst, err)
            details.append(f"q={q} {parity}: |Z^V / rhs - 1| = {err:.2e}")
        if q % 2 == 0:
            prod = Z_pm(q, s, "+", X).value * Z_pm(q, s, "-", X).value
            err = abs(prod / selberg_Z(q, s, X).value - 1)
            ok &= err <= 1e-6
            details.append(f"q={q}: |Z_+ Z_- / Z - 1| = {err:.2e} (tolerance 1e-6)")
    return CheckResult("4", title, ok, worst, 1e-5, details)


@_timed
def check_boundary_sums(qs=None) -> CheckResult:
    """Word sums over {g_m, Qg_m}^p against N^-(s+1)/(1-N^-2) (and N^-s/(1-N^-2) for +)."""
    title = "boundary word sums"
    qs = _pick((4, 6), qs)
    if not qs:
        return _skip("5", title)
    worst, details = 0.0, []
    for q in qs:
        G = make_group(q)
        for p in (1, 2, 3):
            Np = norm(G.g[q // 2] ** p)
            for s in (2.0, 1.5 + 2j):
                for parity, closed in (("-", Np ** -(s + 1)), ("+", Np**-s)):
                    closed = closed / (1 - Np**-2)
                    err = abs(boundary_word_sum(q, p, s, parity) - closed) / abs(closed)
                    worst = max(worst, err)
            details.append(f"q={q} p={p}: worst relative error so far {worst:.2e}")
    return CheckResult("5", title, worst <= 1e-12, worst, 1e-12, details)


@_timed
def check_mayer(qs=None, N: int = 48) -> CheckResult:
    """q = 3: det(1 - L+-) against det(1 -+ L_Mayer) from an independent power-series matrix."""
    title = "q=3 Mayer equivalence"
    if qs is not None and 3 not in qs:
        return _skip("6", title)
    charts = build_charts(3, N)
    worst, details = 0.0, []
    for s in (1.0, 2.0, 1.5 + 0.5j):
        for parity, sign in (("+", 1), ("-", -1)):
            d = fredholm_det(build_fast_operator(3, s, parity, charts=charts))
            ref = mayer_det(s, sign)
            err = abs(d - ref)
            worst = max(worst, err)
            details.append(f"s={s} {parity}: {err:.2e}")
    return CheckResult("6", title, worst <= 1e-9, worst, 1e-9, details)


@_timed
def check_continuation(qs=None, N: int = 32, count: int = 20, seed: int = 0) -> CheckResult:
    """Hurwitz-continued parabolic blocks against direct summation, plus zeta_H(2, 1) = pi^2/6."""
    title = "Hurwitz continuation vs direct sums"
    qs = _pick((3, 5), qs)
    if not qs:
        return _skip("7", title)
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.6, 3.0, count) + 1j * rng.uniform(-8.0, 8.0, count)
    worst, details = 0.0, []
    for q in qs:
        charts = build_charts(q, N)
        qworst = 0.0
        for s in pts:
            a = build_fast_operator(q, s, "full", charts=charts).flat
            b = build_fast_operator(q, s, "full", charts=charts, mode="direct").flat
            qworst = max(qworst, float(np.max(np.abs(a - b))) / max(1.0, float(np.max(np.abs(b)))))
        worst = max(worst, qworst)
        details.append(f"q={q}: max entry deviation {qworst:.2e} over {count} points")
    zh = abs(complex(hurwitz_zeta(2.0, 1.0)) - math.pi**2 / 6)
    details.append(f"|zeta_H(2,1) - pi^2/6| = {zh:.2e}")
    return CheckResult("7", title, worst <= 1e-9 and zh <= 1e-13, worst, 1e-9, details)


@_timed
def check_spectral(qs=None, N: int = 40) -> CheckResult:
    """q = 3 odd: one zero with t in [9.3, 9.7], stable under N -> 2N, also a zero of the full det."""
    title = "q=3 odd cusp form near t = 9.53"
    if qs is not None and 3 not in qs:
        return _skip("8", title)
    details = []
    f = det_function(3, "-", N)
    w = winding_count(3, "-", (0.45, 0.55, 9.3, 9.7), f=f)
    ts = np.arange(9.3, 9.7001, 0.02)
    vals = [abs(f(complex(0.5, t))) for t in ts]
    t0 = float(ts[int(np.argmin(vals))])
    z = refine_zero(3, "-", complex(0.5, t0), N)
    z2 = refine_zero(3, "-", z.s, 2 * N)
    shift = abs(z2.s - z.s)
    full = abs(fredholm_det(build_fast_operator(3, z.s, "full", N=N)))
    in_window = abs(z.s.imag - 9.53) < 0.05
    details += [
        f"winding on [0.45,0.55]x[9.3,9.7]: {w}",
        f"zero at s = {z.s.real:.10f} + {z.s.imag:.10f}i ({z.label})",
        f"shift under N {N} -> {2 * N}: {shift:.2e}",
        f"|det(1 - L)| at the zero: {full:.2e}",
    ]
    ok = w == 1 and z.winding == 1 and shift <= 1e-4 and full <= 1e-7 and in_window
    return CheckResult("8", title, ok, shift, 1e-4, details)


def _regular_words(q: int, max_len: int, max_exp: int):
    out = []
    for n in range(1, max_len + 1):
        out += [w for w, _ in enumerate_regular_words(q, "GQ", n, max_exp=max_exp) if is_regular(w, "GQ")]
    return out


def representative_count_defects(q: int, max_len: int, max_exp: int) -> tuple[int, int, list]:
    """Group regular words by matrix conjugacy and compare class sizes with 2^k l(h) (k = 0 for odd q).

    Returns (number of classes, number of defects, messages).  Boundary words of
    even q are checked separately: each (length, det) group is one class of 2^(l-1) words.
    """
    m = (q + 1) // 2
    words = _regular_words(q, max_len, max_exp)
    bnd = [w for w in words if q % 2 == 0 and all(l.base == m for l in w.letters)]
    rest = [w for w in words if not (q % 2 == 0 and all(l.base == m for l in w.letters))]
    msgs = []
    labels = conjugacy_partition(q, "Gamma_tilde", [np.array(w.matrix).reshape(2, 2) for w in rest])
    groups: dict = {}
    for w, lab in zip(rest, labels):
        groups.setdefault(lab, []).append(w)
    defects = 0
    for ws in groups.values():
        ks = {w.kcount for w in ws}
        lens = {len(w) for w in ws}
        ell_h = min(_period(w.letters) for w in ws)
        expected = (2 ** next(iter(ks)) if q % 2 == 0 else 1) * ell_h
        if len(ks) != 1 or len(lens) != 1 or len(ws) != expected:
            defects += 1
            msgs.append(f"class of {ws[0].label()}: {len(ws)} representatives, expected {expected}")
    if bnd:
        labels = conjugacy_partition(q, "Gamma_tilde", [np.array(w.matrix).reshape(2, 2) for w in bnd])
        by: dict = {}
        for w, lab in zip(bnd, labels):
            by.setdefault((len(w), w.det), []).append(lab)
        for (ell, det), labs in by.items():
            if len(set(labs)) != 1 or len(labs) != 2 ** (ell - 1):
                defects += 1
                msgs.append(f"boundary words of length {ell}, det {det}: {len(labs)} words in {len(set(labs))} classes")
    return len(groups), defects, msgs


@_timed
def check_combinatorics(qs=None, X: float = 40.0) -> CheckResult:
    """Representative counts per class, and class lists against the matrix-ball oracle."""
    title = "representative counts and class lists"
    details, defects = [], 0
    for q, L in ((5, 3), (4, 4)):
        if qs is not None and q not in qs:
            continue
        ncls, bad, msgs = representative_count_defects(q, L, 2)
        defects += bad
        details.append(f"q={q} l<={L} E<=2: {ncls} classes, {bad} count defects")
        details += msgs[:5]
    for q in _pick((3, 4, 5, 6), qs):
        for tag in ("Gamma", "Gamma_tilde"):
            mine = sorted((round(r.N, 6), r.det) for r in enumerate_conj_classes(q, tag, X))
            ref = sorted((round(n, 6), d) for n, d in brute_force_classes(q, tag, X))
            if mine != ref:
                defects += 1
                details.append(f"q={q} {tag}: {len(mine)} classes vs oracle {len(ref)}")
            else:
                details.append(f"q={q} {tag}: {len(mine)} classes agree with the oracle")
    if not details:
        return _skip("9", title)
    return CheckResult("9", title, defects == 0, float(defects), 0.0, details)


@_timed
def check_dynamics(qs=None, samples: int = 10_000) -> CheckResult:
    """Partition sampling, acceleration F^n = G (n <= 20), and the even-q relation vs the slow operator."""
    title = "interval maps: partition, acceleration, weights"
    qs = _pick((3, 4, 5, 6), qs)
    if not qs:
        return _skip("10", title)
    details, ok, worst = [], True, 0.0
    for q in qs:
        names = ["F", "G"] + (["FQ_odd", "GQ_odd"] if q % 2 else ["FQ_even", "GQ_even"])
        for name in names:
            for parity in ("+", "-") if name not in ("F", "G") else ("+",):
                r = verify_partition(branch_table(q, name, parity), samples)
                ok &= r.ok
                if r.operator_error is not None:
                    worst = max(worst, r.operator_error)
                details.append(
                    f"q={q} {name}{parity if name not in ('F', 'G') else ''}: {len(r.violations)} violations,"
                    f" operator error {r.operator_error}"
                )
        acc = verify_acceleration(q, 100, n_max=20)
        ok &= acc.ok(1e-13)
        worst = max(worst, acc.max_error)
        details.append(f"q={q} acceleration n<=20: {acc.max_error:.2e}")
    details.append("tolerances: acceleration 1e-13 (chordal), slow operator 1e-12, violations 0")
    return CheckResult("10", title, ok and worst <= 1e-12, worst, 1e-12, details)


CHECKS = {
    "algebra": check_algebra,
    "1": check_det_zeta,
    "2": check_factorization,
    "3": check_trace_words,
    "4": check_billiard_zeta,
    "5": check_boundary_sums,
    "6": check_mayer,
    "7": check_continuation,
    "8": check_spectral,
    "9": check_combinatorics,
    "10": check_dynamics,
}

SUITES = {
    "algebra": ("algebra",),
    "words": ("9", "10"),
    "traces": ("3",),
    "zeta": ("4", "5"),
    "operators": ("1", "2", "6", "7"),
    "spectral": ("8",),
}
SUITES["all"] = ("algebra",) + tuple(str(i) for i in range(1, 11))


def run_suite(name: str, qs=None, echo=None) -> list[CheckResult]:
    """Run the named suite; echo (e.g. print) receives one line per check as it finishes."""
    if name not in SUITES:
        raise KeyError(name)
    out = []
    for cid in SUITES[name]:
        res = CHECKS[cid](qs)
        out.append(res)
        if echo:
            echo(res.line())
    return out
