"""Collocation matrices for the fast transfer operators and their Fredholm determinants.

Functions live on three charts covering (0, 1/lambda), (1/lambda, lambda) and
(lambda, inf).  Each chart stores a rescaled function phi:

    Dq1:  f(x) = phi(x)                     y = x
    Dr:   f(x) = x^(-s)  h(log x / log lam)  u = log x / log lam
    D1:   f(x) = x^(-2s) F(1/x)              y = 1/x

With these rescalings tau_s(Q) swaps Dq1 and D1 and sends u to -u, with no
weight.  Each chart carries a holomorphy disk and the collocation nodes are
equispaced on its boundary circle (a discrete Taylor basis).  Möbius branches
map disks to disks, which keeps the discretization geometrically convergent
even where a branch is only weakly contracting on the real interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np
import scipy.linalg
from scipy.special import bernoulli

from .errors import BranchError, ChartError, DomainError, PoleError
from .hecke_core import _float_entries, j_factor, make_group, mobius_act

__all__ = [
    "DiskChart",
    "OperatorMatrix",
    "build_charts",
    "contraction_report",
    "hurwitz_zeta",
    "interp_matrix",
    "parabolic_block",
    "build_fast_operator",
    "fredholm_det",
    "fredholm_logdet",
    "matrix_trace_power",
    "symmetry_matrix",
    "apply_slow_operator",
    "symmetry_decomposition_check",
    "SymmetryReport",
    "monomial_coefficients",
]

CHART_LABELS = ("Dq1", "Dr", "D1")
POLE_RADIUS = 1e-8
DIRECT_HEAD = 8  # terms summed explicitly before the Hurwitz tail takes over
BRUTE_TERMS = 2000


# ---------------------------------------------------------------------------
# Hurwitz zeta by Euler-Maclaurin

_BERN = bernoulli(40)
_EM_TERMS = 14
_EM_COEF = np.array([_BERN[2 * j] / math.factorial(2 * j) for j in range(1, _EM_TERMS + 1)])


def hurwitz_zeta(s, a):
    """zeta(s, a) = sum_{n>=0} (a+n)^(-s), vectorized; a may be complex with Re a > 0."""
    s_arr = np.asarray(s, dtype=complex)
    a_arr = np.asarray(a)
    if np.iscomplexobj(a_arr):
        if np.any(a_arr.real <= 0):
            raise DomainError("Hurwitz zeta needs Re a > 0")
    else:
        a_arr = a_arr.astype(float)
        if np.any(a_arr <= 0):
            raise DomainError("Hurwitz zeta needs a > 0")
    if np.any(np.abs(s_arr - 1.0) < 1e-14):
        raise PoleError("Hurwitz zeta has a pole at s = 1")
    s_b, a_b = np.broadcast_arrays(s_arr, a_arr)
    shape = s_b.shape
    s_f = s_b.ravel()
    a_f = a_b.ravel().astype(complex)
    need = np.maximum(np.abs(s_f) + 20.0 - a_f.real, 0.0)
    K = int(math.ceil(need.max())) if need.size else 0
    out = np.zeros(s_f.shape, dtype=complex)
    for n in range(K):
        out += np.exp(-s_f * np.log(a_f + n))
    b = a_f + K
    bs = np.exp(-s_f * np.log(b))
    out += b * bs / (s_f - 1.0) + 0.5 * bs
    # rising factorial s (s+1) ... (s+2j-2) times b^(-s-2j+1)
    rising = s_f.copy()
    term = bs / b
    for j in range(_EM_TERMS):
        out += _EM_COEF[j] * rising * term
        rising = rising * (s_f + 2 * j + 1) * (s_f + 2 * j + 2)
        term = term / (b * b)
    out = out.reshape(shape)
    return complex(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# charts and interpolation


@dataclass(frozen=True)
class DiskChart:
    """A chart coordinate, its holomorphy disk and the collocation nodes on the disk boundary."""

    label: str
    q: int
    center: float
    radius: float
    nodes: np.ndarray = field(repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.nodes)

    @property
    def alpha(self) -> int:
        return {"Dq1": 0, "Dr": 1, "D1": 2}[self.label]

    @property
    def log_lam(self) -> float:
        return math.log(make_group(self.q).lam_float)

    def to_x(self, z):
        z = np.asarray(z)
        if self.label == "Dq1":
            return z
        if self.label == "D1":
            return 1.0 / z
        return np.exp(z * self.log_lam)

    def from_x(self, x):
        x = np.asarray(x)
        if self.label == "Dq1":
            return x
        if self.label == "D1":
            return 1.0 / x
        return np.log(x) / self.log_lam

    def contains(self, z, slack: float = 0.0) -> np.ndarray:
        return np.abs(np.asarray(z) - self.center) < self.radius * (1.0 - slack)

    def interval_x(self) -> tuple[float, float]:
        """The real interval of (0, inf) this chart covers."""
        lam = make_group(self.q).lam_float
        return {"Dq1": (0.0, 1 / lam), "Dr": (1 / lam, lam), "D1": (lam, math.inf)}[self.label]


def _circle_nodes(n: int, center: float, radius: float) -> np.ndarray:
    """n points on the circle, closed under conjugation and (n even) under reflection in the center."""
    half = n // 2
    theta = (np.arange(half) + 0.5) * (2 * np.pi / n)
    first = radius * np.exp(1j * theta)
    return center + np.concatenate([first, -first])


def interp_matrix(nodes: np.ndarray, pts, center: complex | None = None) -> np.ndarray:
    """Rows of Lagrange interpolation weights on circle `nodes` evaluated at `pts`.

    For equispaced nodes on a circle the barycentric weights are proportional to
    (node - center); any other node set falls back to the general product formula.
    """
    pts = np.atleast_1d(np.asarray(pts, dtype=complex))
    n = len(nodes)
    if n == 0:
        return np.zeros((len(pts), 0), dtype=complex)
    if center is None:
        diffs = nodes[:, None] - nodes[None, :]
        np.fill_diagonal(diffs, 1.0)
        logw = -np.sum(np.log(diffs), axis=1)
        w = np.exp(logw - logw.real.max())
    else:
        w = nodes - center
    diff = pts[:, None] - nodes[None, :]
    exact = diff == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        t = w[None, :] / diff
        R = t / t.sum(axis=1, keepdims=True)
    hit = exact.any(axis=1)
    if hit.any():
        R[hit] = exact[hit].astype(float)
    return R


def _chart_interp(chart: DiskChart, pts) -> np.ndarray:
    return interp_matrix(chart.nodes, pts, chart.center)


def build_charts(q: int, N: int = 32, margin: float = 0.1, check: bool = True) -> dict:
    """Disks and nodes for Dq1, Dr, D1; Dr is empty for q = 3.

    The disks are |y - 0.7 L| < (0.7 + margin) L on the two y-charts (L = 1/lambda,
    so the disk overhangs 0 by margin*L) and |u| < 1 + 5 margin on Dr.  Every
    inverse branch maps its target disk into its source disk for margin in
    [0.05, 0.2].
    """
    if N < 4 or N % 2:
        raise DomainError("basis size must be even and at least 4")
    if margin <= 0:
        raise DomainError("disk margin must be positive")
    L = 1.0 / make_group(q).lam_float
    yc, yr, rr = 0.7 * L, (0.7 + margin) * L, 1.0 + 5 * margin
    y_nodes = _circle_nodes(N, yc, yr)
    r_nodes = _circle_nodes(N, 0.0, rr) if q > 3 else np.zeros(0, dtype=complex)
    charts = {
        "Dq1": DiskChart("Dq1", q, yc, yr, y_nodes),
        "Dr": DiskChart("Dr", q, 0.0, rr, r_nodes),
        "D1": DiskChart("D1", q, yc, yr, y_nodes.copy()),
    }
    if check:
        bad = contraction_report(q, charts)
        if bad:
            worst = max(bad, key=lambda r: r[2])
            raise ChartError(
                f"branch {worst[0]} maps the {worst[1]} disk outside its source disk "
                f"(ratio {worst[2]:.3f}); try a margin in [0.05, 0.2]"
            )
    return charts


def _branch_table(q: int):
    """(label, target, source, inverse-branch matrix) for every finite branch and n = 1..3."""
    G = make_group(q)
    out = []
    for k in range(2, q - 1):
        h = G.g[k]
        for tgt in ("Dq1", "Dr", "D1"):
            out.append((f"g{k}", tgt, "Dr", h.inverse()))
            out.append((f"Qg{k}", tgt, "Dr", (G.Q * h).inverse()))
    for n in (1, 2, 3):
        g1 = G.g[1] ** n
        gq = G.g[q - 1] ** n
        out.append((f"g1^{n}", "Dq1", "D1", g1.inverse()))
        out.append((f"g1^{n}", "Dr", "D1", g1.inverse()))
        out.append((f"g{q-1}^{n}", "Dr", "Dq1", gq.inverse()))
        out.append((f"g{q-1}^{n}", "D1", "Dq1", gq.inverse()))
        out.append((f"Qg{q-1}^{n}", "Dq1", "Dq1", (G.Q * gq).inverse()))
        out.append((f"Qg{q-1}^{n}", "Dr", "Dq1", (G.Q * gq).inverse()))
    return out


def _image_in_source(target: DiskChart, source: DiskChart, hinv, z):
    """Source chart coordinate of h^-1 applied to target chart points z."""
    a, b, c, d = _float_entries(hinv)
    if target.label == "D1":
        num, den = a + b * z, c + d * z
    else:
        x = target.to_x(z)
        num, den = a * x + b, c * x + d
    if np.any(np.abs(den) < 1e-14):
        return None
    xp = num / den
    if source.label == "Dr" and np.any(xp.real <= 0):
        return None
    return source.from_x(xp)


def contraction_report(q: int, charts: dict, samples: int = 128) -> list:
    """Branches whose inverse does not map the target disk into the source disk.

    Returns (branch, target, max |z - c| / r over boundary samples) for offenders.
    """
    theta = np.linspace(0, 2 * np.pi, samples, endpoint=False)
    bad = []
    for label, tgt, src, hinv in _branch_table(q):
        ct, cs = charts[tgt], charts[src]
        if ct.dim == 0 or cs.dim == 0:
            continue
        z = ct.center + ct.radius * np.exp(1j * theta)
        zs = _image_in_source(ct, cs, hinv, z)
        if zs is None:
            bad.append((label, tgt, math.inf))
            continue
        ratio = float(np.max(np.abs(zs - cs.center)) / cs.radius)
        if not ratio < 1:
            bad.append((label, tgt, ratio))
    return bad


@lru_cache(maxsize=16)
def _monomials_cached(node_bytes: bytes, n: int) -> np.ndarray:
    nodes = np.frombuffer(node_bytes, dtype=complex)
    with mpmath.workdps(2 * n + 40):
        ys = [mpmath.mpc(complex(v)) for v in nodes]
        P = [mpmath.mpc(1)]  # coefficients, constant first
        for y in ys:
            nxt = [mpmath.mpc(0)] * (len(P) + 1)
            for i, c in enumerate(P):
                nxt[i + 1] += c
                nxt[i] -= y * c
            P = nxt
        C = np.zeros((n, n), dtype=complex)
        for j, yj in enumerate(ys):
            # synthetic division P / (y - yj), highest degree first
            quo = [mpmath.mpc(0)] * n
            carry = mpmath.mpc(0)
            for i in range(n, 0, -1):
                carry = P[i] + carry * yj
                quo[i - 1] = carry
            denom = mpmath.fprod(yj - yi for i, yi in enumerate(ys) if i != j)
            for m in range(n):
                C[m, j] = complex(quo[m] / denom)
    return C


def monomial_coefficients(nodes: np.ndarray) -> np.ndarray:
    """C[m, j] = coefficient of y^m in the j-th Lagrange basis polynomial."""
    nodes = np.ascontiguousarray(nodes, dtype=complex)
    return _monomials_cached(nodes.tobytes(), len(nodes))


# ---------------------------------------------------------------------------
# parabolic branch sums


def _check_poles(s: complex, orders: int):
    for m in range(orders):
        if abs(2 * s + m - 1) < POLE_RADIUS:
            raise PoleError(f"s = {s} is a pole of the parabolic sums (2s + {m} = 1)")


def _K_continued(q: int, s: complex, t: np.ndarray, src: DiskChart, head: int = DIRECT_HEAD):
    """Matrix of phi -> sum_{n>=1} (t + n lam)^(-2s) phi(1/(t + n lam)) on src nodes."""
    lam = make_group(q).lam_float
    n = src.dim
    _check_poles(s, n)
    M = np.zeros((len(t), n), dtype=complex)
    for k in range(1, head):
        base = t + k * lam
        M += np.exp(-2 * s * np.log(base))[:, None] * _chart_interp(src, 1.0 / base)
    C = monomial_coefficients(src.nodes)
    svals = 2 * s + np.arange(n)
    Z = hurwitz_zeta(svals[None, :], head + t[:, None] / lam)
    Z = Z * np.exp(-svals * math.log(lam))[None, :]
    M += Z @ C
    return M


def _K_direct(q: int, s: complex, t: np.ndarray, src: DiskChart, terms: int = BRUTE_TERMS):
    """Same operator by brute-force summation plus an mpmath Hurwitz tail."""
    if (2 * s).real <= 1:
        raise DomainError("direct summation needs Re s > 1/2")
    lam = make_group(q).lam_float
    n = src.dim
    M = np.zeros((len(t), n), dtype=complex)
    for k in range(1, terms + 1):
        base = t + k * lam
        M += np.exp(-2 * s * np.log(base))[:, None] * _chart_interp(src, 1.0 / base)
    C = monomial_coefficients(src.nodes)
    scale = np.abs(C).max(axis=1)
    for i, ti in enumerate(t):
        a = terms + 1 + ti / lam
        for m in range(n):
            if scale[m] * abs(lam * a) ** (-m) < 1e-22 * scale[0]:
                break
            z = complex(mpmath.zeta(2 * s + m, a)) * lam ** (-(2 * s + m))
            M[i] += z * C[m]
    return M


def parabolic_block(
    q: int,
    s,
    variant: str,
    sign_weight: float,
    target: DiskChart,
    source: DiskChart,
    mode: str = "continued",
) -> np.ndarray:
    """Collocation matrix of an infinite parabolic branch family.

    `Qtwisted` families (tau_s(g_1^n), tau_s(Qg_{q-1}^n), tau_s(g_1^n Q)) evaluate the
    basic sum at t = x; `plain` families (tau_s(g_{q-1}^n)) evaluate it at t = 1/x.
    """
    s = complex(s)
    if source.label not in ("Dq1", "D1"):
        raise DomainError("parabolic families draw from Dq1 or D1")
    if target.dim == 0 or source.dim == 0:
        return np.zeros((target.dim, source.dim), dtype=complex)
    z = target.nodes
    if variant == "Qtwisted":
        if target.label == "D1":
            raise DomainError("no twisted parabolic family lands in D1")
        t = target.to_x(z)
        pref = np.exp(s * z * target.log_lam) if target.label == "Dr" else np.ones(len(z))
    elif variant == "plain":
        if target.label == "Dq1":
            raise DomainError("no plain parabolic family lands in Dq1")
        if target.label == "D1":
            t, pref = z, np.ones(len(z))
        else:
            t = np.exp(-z * target.log_lam)
            pref = np.exp(-s * z * target.log_lam)
    else:
        raise DomainError(f"unknown parabolic variant {variant!r}")
    if mode == "continued":
        K = _K_continued(q, s, t, source)
    elif mode == "direct":
        K = _K_direct(q, s, t, source)
    else:
        raise DomainError(f"unknown summation mode {mode!r}")
    return sign_weight * pref[:, None] * K


def _signed_log(v: np.ndarray, sign: float) -> np.ndarray:
    """log(sign * v), the analytic continuation from the real chart interval."""
    w = sign * v
    if np.any((w.real <= 0) & (np.abs(w.imag) < 1e-12 * np.abs(w))):
        raise ChartError("branch weight crosses its cut on the chart disk")
    return np.log(w)


def _finite_block(s: complex, hinv, weight: float, target: DiskChart, source: DiskChart) -> np.ndarray:
    """Collocation matrix of weight * tau_s(h) with h^-1 given (source chart Dr)."""
    if target.dim == 0 or source.dim == 0:
        return np.zeros((target.dim, source.dim), dtype=complex)
    a, b, c, d = _float_entries(hinv)
    z = target.nodes
    zc = target.center
    # x^alpha_t (cx+d)^-2 written in the target coordinate, continued from the real axis
    if target.label == "D1":
        den = c + d * z
        logw = -2 * _signed_log(den, math.copysign(1.0, c + d * zc))
        xp = (a + b * z) / den
    else:
        x = target.to_x(z)
        den = c * x + d
        xc = float(np.real(target.to_x(zc)))
        logw = -2 * _signed_log(den, math.copysign(1.0, c * xc + d))
        if target.label == "Dr":
            logw = logw + z * target.log_lam
        xp = (a * x + b) / den
    if np.any(xp.real <= 0):
        raise ChartError("finite branch image leaves the right half plane")
    logxp = np.log(xp)
    zs = logxp / source.log_lam
    if not np.all(source.contains(zs)):
        raise ChartError(f"finite branch maps {target.label} nodes outside the {source.label} disk")
    fac = weight * np.exp(s * (logw - source.alpha * logxp))
    return fac[:, None] * _chart_interp(source, zs)


# ---------------------------------------------------------------------------
# operator assembly


@dataclass
class OperatorMatrix:
    q: int
    s: complex
    parity: str
    N: int
    labels: tuple
    blocks: dict = field(repr=False)
    charts: dict = field(repr=False)

    @property
    def dims(self) -> tuple:
        return tuple(self.charts[l].dim for l in self.labels)

    @property
    def flat(self) -> np.ndarray:
        rows = []
        for lt in self.labels:
            row = []
            for ls in self.labels:
                blk = self.blocks.get((lt, ls))
                if blk is None:
                    blk = np.zeros((self.charts[lt].dim, self.charts[ls].dim), dtype=complex)
                row.append(blk)
            rows.append(row)
        return np.block(rows) if sum(self.dims) else np.zeros((0, 0), dtype=complex)

    def to_json(self) -> dict:
        M = self.flat
        return {
            "q": self.q,
            "s": [self.s.real, self.s.imag],
            "parity": self.parity,
            "N": self.N,
            "charts": list(self.labels),
            "dims": list(self.dims),
            "entries": [[[float(v.real), float(v.imag)] for v in row] for row in M],
        }


def _add(blocks, key, val):
    if key in blocks:
        blocks[key] = blocks[key] + val
    else:
        blocks[key] = val


def build_fast_operator(
    q: int,
    s,
    parity: str = "full",
    N: int = 32,
    charts: dict | None = None,
    *,
    half_weight: float = 0.5,
    mode: str = "continued",
) -> OperatorMatrix:
    """Discretize L_{G,s} (parity 'full') or L^+-_{G,s} (parity '+' or '-')."""
    s = complex(s)
    if parity not in ("full", "+", "-"):
        raise DomainError(f"parity must be 'full', '+' or '-', got {parity!r}")
    if charts is None:
        charts = build_charts(q, N)
    N = charts["Dq1"].dim
    G = make_group(q)
    D = charts
    blocks: dict = {}

    def fin(tgt, h, w):
        _add(blocks, (tgt, "Dr"), _finite_block(s, h.inverse(), w, D[tgt], D["Dr"]))

    def par(tgt, src, variant, w):
        _add(blocks, (tgt, src), parabolic_block(q, s, variant, w, D[tgt], D[src], mode))

    if parity == "full":
        labels = CHART_LABELS
        for tgt in labels:
            for k in range(2, q - 1):
                fin(tgt, G.g[k], 1.0)
        par("Dq1", "D1", "Qtwisted", 1.0)
        par("Dr", "D1", "Qtwisted", 1.0)
        par("Dr", "Dq1", "plain", 1.0)
        par("D1", "Dq1", "plain", 1.0)
    else:
        labels = ("Dq1", "Dr")
        sg = 1.0 if parity == "+" else -1.0
        m = (q + 1) // 2
        k0 = m if q % 2 else m + 1
        for tgt in labels:
            for k in range(k0, q - 1):
                fin(tgt, G.g[k], 1.0)
                fin(tgt, G.Q * G.g[k], sg)
            if q % 2 == 0:
                fin(tgt, G.g[m], half_weight)
                fin(tgt, G.Q * G.g[m], sg * half_weight)
        # tau_s(Qg_{q-1}^n) and, for even q, tau_s(g_1^n Q) act identically on Dq1
        par("Dq1", "Dq1", "Qtwisted", sg)
        par("Dr", "Dq1", "plain", 1.0)
        par("Dr", "Dq1", "Qtwisted", sg)
    return OperatorMatrix(q, s, parity, N, labels, blocks, charts)


def symmetry_matrix(charts: dict) -> np.ndarray:
    """T_s(Q) on the full basis: swap Dq1 and D1, send each Dr node u to -u."""
    n1, nr = charts["Dq1"].dim, charts["Dr"].dim
    dim = 2 * n1 + nr
    perm = np.concatenate([np.arange(n1 + nr, dim), n1 + (np.arange(nr) + nr // 2) % nr, np.arange(n1)])
    P = np.zeros((dim, dim))
    P[np.arange(dim), perm] = 1.0
    return P


# ---------------------------------------------------------------------------
# determinants and traces


def _as_array(M) -> np.ndarray:
    return M.flat if isinstance(M, OperatorMatrix) else np.asarray(M, dtype=complex)


def fredholm_logdet(M) -> complex:
    """log det(I - M) from the pivots of an LU factorization (principal branch per pivot)."""
    A = _as_array(M)
    if A.size == 0:
        return 0j
    if not np.all(np.isfinite(A)):
        raise DomainError("operator matrix has non-finite entries")
    lu, piv = scipy.linalg.lu_factor(np.eye(len(A)) - A, check_finite=False)
    d = np.diag(lu).astype(complex)
    swaps = int(np.sum(piv != np.arange(len(piv))))
    with np.errstate(divide="ignore"):
        val = complex(np.sum(np.log(d)))
    if swaps % 2:
        val += 1j * math.pi
    return val


def fredholm_det(M) -> complex:
    """det(I - M); exact zeros are returned as 0 rather than flagged."""
    A = _as_array(M)
    if A.size == 0:
        return 1 + 0j
    if not np.all(np.isfinite(A)):
        raise DomainError("operator matrix has non-finite entries")
    lu, piv = scipy.linalg.lu_factor(np.eye(len(A)) - A, check_finite=False)
    d = np.diag(lu).astype(complex)
    swaps = int(np.sum(piv != np.arange(len(piv))))
    return complex(np.prod(d) * (-1) ** swaps)


def matrix_trace_power(M, n: int) -> complex:
    if n < 1:
        raise DomainError("power must be at least 1")
    A = _as_array(M)
    P = A
    for _ in range(n - 1):
        P = P @ A
    return complex(np.trace(P))


@dataclass(frozen=True)
class SymmetryReport:
    q: int
    s: complex
    N: int
    commutator: float
    factorization: float
    det_full: complex
    det_plus: complex
    det_minus: complex
    commutes: bool
    factorizes: bool

    @property
    def ok(self) -> bool:
        return self.commutes and self.factorizes


def symmetry_decomposition_check(q: int, s, N: int = 32, *, half_weight: float = 0.5, tol: float = 1e-8) -> SymmetryReport:
    charts = build_charts(q, N)
    L = build_fast_operator(q, s, "full", charts=charts)
    A = L.flat
    P = symmetry_matrix(charts)
    comm = float(np.linalg.norm(P @ A - A @ P) / max(np.linalg.norm(A), 1e-300))
    d = fredholm_det(A)
    dp = fredholm_det(build_fast_operator(q, s, "+", charts=charts, half_weight=half_weight))
    dm = fredholm_det(build_fast_operator(q, s, "-", charts=charts, half_weight=half_weight))
    fact = abs(d - dp * dm) / max(abs(d), 1e-300)
    return SymmetryReport(q, complex(s), N, comm, fact, d, dp, dm, comm <= 1e-9, fact <= tol)


# ---------------------------------------------------------------------------
# slow operators, pointwise


def _slow_branches(q: int, parity: str):
    G = make_group(q)
    if parity == "full":
        return [(G.g[k], 1.0) for k in range(1, q)]
    if parity not in ("+", "-"):
        raise DomainError(f"parity must be 'full', '+' or '-', got {parity!r}")
    sg = 1.0 if parity == "+" else -1.0
    m = (q + 1) // 2
    k0 = m if q % 2 else m + 1
    out = []
    for k in range(k0, q):
        out += [(G.g[k], 1.0), (G.Q * G.g[k], sg)]
    if q % 2 == 0:
        out += [(G.g[m], 0.5), (G.Q * G.g[m], 0.5 * sg)]
    return out


def apply_slow_operator(q: int, s, parity: str, f, points) -> np.ndarray:
    """Evaluate L_{F,s} f or L^+-_{F^Q,s} f at the given points, f a callable."""
    s = complex(s)
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    branches = [(h.inverse(), w) for h, w in _slow_branches(q, parity)]
    out = np.zeros(len(pts), dtype=complex)
    bad = []
    for i, x in enumerate(pts):
        acc = 0j
        try:
            for hinv, w in branches:
                acc += w * j_factor(hinv, x, s) * f(mobius_act(hinv, x))
        except (BranchError, ZeroDivisionError):
            bad.append(float(x))
            continue
        out[i] = acc
    if bad:
        raise BranchError(f"branch poles at points {bad}")
    return out
