"""Periodic-orbit side: trace terms, word trace sums and truncated Euler products."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError, DomainError, PoleError
from .hecke_core import GroupElement, make_group, norm as element_norm
from .symbolic_words import (
    ConjClassRecord,
    Letter,
    _letter_float,
    enumerate_conj_classes,
    enumerate_regular_words,
    letter_alphabet,
)

__all__ = [
    "TruncationSpec",
    "ZetaValue",
    "tr_tau",
    "tr_b_pm",
    "trace_power_sum",
    "boundary_word_sum",
    "selberg_Z",
    "selberg_Z_logsum",
    "Z_pm",
    "ZV_pm",
    "Zc_pm",
    "default_cutoff",
    "class_list",
]

INNER_TERMS = 60
ZC_TERMS = 80


def default_cutoff(q: int) -> float:
    return 1e4 if q <= 4 else 1e3


@dataclass(frozen=True)
class TruncationSpec:
    X: float
    max_exp: int | None = None
    max_len: int | None = None
    tail_mode: str = "geometric-estimate"
    certified: bool = True

    def __post_init__(self):
        if self.X <= 1:
            raise DomainError("norm cutoff X must exceed 1")
        if self.tail_mode not in ("none", "geometric-estimate"):
            raise DomainError(f"unknown tail mode {self.tail_mode!r}")


@dataclass(frozen=True)
class ZetaValue:
    value: complex
    log_value: complex
    truncation: TruncationSpec
    tail_estimate: float
    which: str = ""
    s: complex = 0j
    extra: dict = field(default_factory=dict)


def _norm_of(a) -> float:
    if isinstance(a, ConjClassRecord):
        return a.N
    if isinstance(a, GroupElement):
        return element_norm(a)
    return float(a)


def _det_of(a, det=None) -> int:
    if det is not None:
        return det
    if isinstance(a, (ConjClassRecord, GroupElement)):
        return a.det
    return 1


def tr_tau(a, s, det: int | None = None) -> complex:
    """N^(-s) / (1 - det*N^(-1)); det defaults to the element's own determinant."""
    N = _norm_of(a)
    if not N > 1:
        raise DomainError(f"trace formula needs N > 1, got {N}")
    d = _det_of(a, det)
    return cmath.exp(-complex(s) * math.log(N)) / (1.0 - d / N)


def tr_b_pm(a, s, parity: str, q_parity: str | None = None, *, det: int | None = None, k: int | None = None) -> complex:
    """Trace of b_s^+- for a hyperbolic word or class (1/2^k weight only for even q)."""
    if parity not in ("+", "-"):
        raise DomainError(f"parity must be '+' or '-', got {parity!r}")
    d = _det_of(a, det)
    if k is None:
        k = a.kcount if isinstance(a, ConjClassRecord) else 0
    if q_parity is None and isinstance(a, ConjClassRecord):
        q_parity = "odd" if a.canonical_word.q % 2 else "even"
    weight = 0.5**k if q_parity == "even" else 1.0
    N = _norm_of(a)
    base = cmath.exp(-complex(s) * math.log(N)) / (1.0 - d / N)
    return weight * (d if parity == "-" else 1) * base


# ---------------------------------------------------------------------------
# word trace sums over B_1^n and B_4^n


def _trace_terms(tr, det, s, parity, weight):
    rho = 0.5 * (np.abs(tr) + np.sqrt(tr * tr - 4.0 * det))
    N = rho * rho
    base = np.exp(-complex(s) * np.log(N)) / (1.0 - det / N)
    sign = det if parity == "-" else 1.0
    return weight * sign * base


def _patterns(q: int, n: int):
    """Letter-type patterns (qflag, base) of length n for words in B_1^n or B_4^n."""
    fams = sorted({(l.qflag, l.base) for l in letter_alphabet(q, "GQ", 1)})
    out = []

    def rec(prefix):
        if len(prefix) == n:
            first, last = prefix[0], prefix[-1]
            plain_start = first[1] == q - 1 and not first[0]
            if last[1] == q - 1 and plain_start:
                return
            out.append(tuple(prefix))
            return
        for f in fams:
            if prefix:
                x = prefix[-1]
                if x[1] == q - 1 and f[1] == q - 1 and not f[0]:
                    continue
            rec(prefix + [f])

    rec([])
    return out


def _family_mats(q, fam, E):
    flag, base = fam
    if base != q - 1:
        return np.array([_letter_float(q, Letter(flag, base, 1))]), np.array([False])
    mats = np.array([_letter_float(q, Letter(flag, base, e)) for e in range(1, E + 1)])
    at_cap = np.zeros(E, dtype=bool)
    at_cap[-1] = True
    return mats, at_cap


def _mul_batch(A, B):
    """All products A_i B_j for arrays of flattened 2x2 matrices (shape (K,4))."""
    a = A[:, None, :]
    b = B[None, :, :]
    out = np.empty((A.shape[0], B.shape[0], 4))
    out[..., 0] = a[..., 0] * b[..., 0] + a[..., 1] * b[..., 2]
    out[..., 1] = a[..., 0] * b[..., 1] + a[..., 1] * b[..., 3]
    out[..., 2] = a[..., 2] * b[..., 0] + a[..., 3] * b[..., 2]
    out[..., 3] = a[..., 2] * b[..., 1] + a[..., 3] * b[..., 3]
    return out.reshape(-1, 4)


def _default_exp_cap(n: int) -> int:
    return {1: 200000, 2: 4000}.get(n, 260)


def trace_power_sum(q: int, n: int, s, parity: str, max_exp: int | None = None, chunk: int = 4096):
    """Sum of Tr b_s^+- over B_1^n and B_4^n, exponents capped at max_exp.

    Returns (value, tail_estimate).  The tail estimate extrapolates the outermost
    exponent shell with the decay rate N^(-Re s) ~ e^(-2 Re s) per parabolic letter.
    """
    if parity not in ("+", "-"):
        raise DomainError("parity must be '+' or '-'")
    sigma = complex(s).real
    if sigma <= 0.5:
        raise ConvergenceError("exponent sums need Re s > 1/2")
    E = max_exp or _default_exp_cap(n)
    even = q % 2 == 0
    m = (q + 1) // 2
    total = 0j
    shell = 0.0
    for pat in _patterns(q, n):
        det = -1.0 if sum(f[0] for f in pat) % 2 else 1.0
        kcount = sum(1 for f in pat if f[1] == m)
        weight = 0.5**kcount if even else 1.0
        acc = np.array([[1.0, 0.0, 0.0, 1.0]])
        acc_cap = np.array([False])
        for fam in pat[:-1]:
            mats, cap = _family_mats(q, fam, E)
            acc = _mul_batch(acc, mats)
            acc_cap = (acc_cap[:, None] | cap[None, :]).reshape(-1)
        last, last_cap = _family_mats(q, pat[-1], E)
        # traces of acc_i * last_j via  sum_kl acc_kl last_lk
        lastT = last[:, [0, 2, 1, 3]]
        for start in range(0, acc.shape[0], chunk):
            blk = acc[start : start + chunk]
            tr = blk @ lastT.T
            terms = _trace_terms(tr, det, s, parity, weight)
            total += terms.sum()
            capmask = acc_cap[start : start + chunk][:, None] | last_cap[None, :]
            shell += np.abs(terms[capmask]).sum()
    tail = shell * E / max(2 * sigma - 1, 1e-3)
    return complex(total), float(tail)


def boundary_word_sum(q: int, p: int, s, parity: str = "-") -> complex:
    """Sum of Tr b_s^+- over all length-p words in {g_m, Qg_m} (even q)."""
    if q % 2:
        raise DomainError("boundary words exist only for even q")
    m = q // 2
    total = 0j
    for bits in range(2**p):
        letters = tuple(Letter(bool(bits >> i & 1), m, 1) for i in range(p))
        mat = _letter_float(q, letters[0])
        for l in letters[1:]:
            b = _letter_float(q, l)
            mat = (
                mat[0] * b[0] + mat[1] * b[2],
                mat[0] * b[1] + mat[1] * b[3],
                mat[2] * b[0] + mat[3] * b[2],
                mat[2] * b[1] + mat[3] * b[3],
            )
        det = -1 if bin(bits).count("1") % 2 else 1
        tr = mat[0] + mat[3]
        total += complex(_trace_terms(np.array(tr), det, s, parity, 0.5**p))
    return total


# ---------------------------------------------------------------------------
# Euler products


@lru_cache(maxsize=32)
def _classes_cached(q: int, tag: str, X: float):
    return tuple(enumerate_conj_classes(q, tag, X))


def class_list(q: int, tag: str, X: float) -> tuple:
    return _classes_cached(q, tag, float(X))


def _check_halfplane(s, bound=1.0):
    if complex(s).real <= bound:
        raise ConvergenceError(f"Euler product needs Re s > {bound}, got s={s}")


def _log1m(z):
    """log(1 - z) on the principal branch, accurate for small z."""
    return np.log1p(-z)


def _prime_tail(X: float, sigma: float) -> float:
    """Estimated |log-sum| beyond N > X from the prime geodesic asymptotics, doubled."""
    return 2.0 * X ** (1.0 - sigma) / ((sigma - 1.0) * math.log(X))


def _pow_neg(N, s):
    return np.exp(-complex(s) * np.log(N))


def _euler_factor_log(N: float, s, dets=None, terms: int = INNER_TERMS, twist=0):
    """sum_k log(1 - det^(k+twist) N^-(s+k))."""
    ks = np.arange(terms)
    x = _pow_neg(N, s) * N ** (-ks.astype(float))
    if dets is None or dets == 1:
        sgn = 1.0
    else:
        sgn = np.where((ks + twist) % 2 == 0, 1.0, -1.0)
    return complex(np.sum(_log1m(sgn * x)))


def _make_value(logv, X, tail_log, which, s, **extra):
    value = cmath.exp(logv)
    return ZetaValue(
        value=value,
        log_value=logv,
        truncation=TruncationSpec(X=X),
        tail_estimate=float(abs(value) * tail_log),
        which=which,
        s=complex(s),
        extra=extra,
    )


def selberg_Z(q: int, s, X: float | None = None) -> ZetaValue:
    """Selberg zeta as a product over primitive Gamma classes with N <= X."""
    _check_halfplane(s)
    X = float(X or default_cutoff(q))
    logv = 0j
    for r in class_list(q, "Gamma", X):
        if r.n == 1:
            logv += _euler_factor_log(r.N, s)
    return _make_value(logv, X, _prime_tail(X, complex(s).real), "Z", s)


def selberg_Z_logsum(q: int, s, X: float | None = None) -> ZetaValue:
    """log Z = -sum over all hyperbolic classes of N^-s / (n (1 - N^-1))."""
    _check_halfplane(s)
    X = float(X or default_cutoff(q))
    logv = 0j
    for r in class_list(q, "Gamma", X):
        logv -= tr_tau(r.N, s) / r.n
    return _make_value(logv, X, _prime_tail(X, complex(s).real), "Z", s, form="logsum")


def _boundary_norm(q: int) -> float:
    G = make_group(q)
    return element_norm(G.g[q // 2])


def Z_pm(q: int, s, parity: str, X: float | None = None) -> ZetaValue:
    """Z_+ or Z_- as a product over primitive Gamma_tilde classes.

    For even q the classes coded by words in {g_m, Qg_m} are replaced by the
    closed-form boundary factor.
    """
    _check_halfplane(s)
    if parity not in ("+", "-"):
        raise DomainError("parity must be '+' or '-'")
    X = float(X or default_cutoff(q))
    twist = 1 if parity == "-" else 0
    logv = 0j
    for r in class_list(q, "Gamma_tilde", X):
        if r.n != 1 or r.boundary:
            continue
        logv += _euler_factor_log(r.N, s, dets=r.det, twist=twist)
    if q % 2 == 0:
        Nm = _boundary_norm(q)
        ell = np.arange(INNER_TERMS)
        expo = 2 * ell + (1 if parity == "-" else 0)
        logv += complex(np.sum(_log1m(_pow_neg(Nm, s) * Nm ** (-expo.astype(float)))))
    which = "Zplus" if parity == "+" else "Zminus"
    return _make_value(logv, X, _prime_tail(X, complex(s).real), which, s)


def _ratio_log(N: float, s, parity: str, power_scale: float, terms: int = INNER_TERMS):
    """sum_l c(l) log((1 +- x_l)/(1 -+ x_l)) with x_l = N^-(s+l), c(l) = power_scale*(-1)^l."""
    ell = np.arange(terms)
    x = _pow_neg(N, s) * N ** (-ell.astype(float))
    alt = np.where(ell % 2 == 0, 1.0, -1.0) * power_scale
    r = np.log1p(x) - np.log1p(-x)
    if parity == "+":
        r = -r
    return complex(np.sum(alt * r))


def ZV_pm(q: int, s, parity: str, X: float | None = None) -> ZetaValue:
    """Venkov's zeta for the Dirichlet (-) or Neumann (+) problem as a truncated product."""
    _check_halfplane(s)
    if parity not in ("+", "-"):
        raise DomainError("parity must be '+' or '-'")
    X = float(X or default_cutoff(q))
    logv = 0j
    for r in class_list(q, "Gamma", X):
        if r.n == 1:
            logv += 2 * _euler_factor_log(r.N, s)
    for r in class_list(q, "Gamma_tilde", X):
        if r.n == 1 and r.det == -1 and not r.boundary:
            logv += _ratio_log(r.N, s, parity, 2.0)
    if q % 2 == 0:
        G = make_group(q)
        NQm = element_norm(G.Q * G.g[q // 2])
        logv += _ratio_log(NQm, s, parity, 1.0)
    which = "ZVplus" if parity == "+" else "ZVminus"
    return _make_value(logv, X, 2 * _prime_tail(X, complex(s).real), which, s)


def Zc_pm(q: int, s, parity: str, terms: int = ZC_TERMS) -> ZetaValue:
    """Correction factor linking Z_+- and Venkov's zeta for even q."""
    if q % 2:
        raise DomainError("Z^c is defined for even q only")
    if parity not in ("+", "-"):
        raise DomainError("parity must be '+' or '-'")
    s = complex(s)
    if s.real < 0 or (s.real == 0 and s != 0):
        raise ConvergenceError("Z^c needs Re s > 0")
    G = make_group(q)
    N2 = element_norm(G.g[q // 2] ** 2)
    k = np.arange(terms)
    sign = np.where(k % 2 == 0, 1.0, -1.0) * (1 if parity == "-" else -1)
    x = _pow_neg(N2, s) * N2 ** (-k.astype(float))
    which = "Zcplus" if parity == "+" else "Zcminus"
    tail = float(abs(x[-1]))
    spec = TruncationSpec(X=N2, max_exp=terms)
    if s == 0:
        if parity == "-":
            return ZetaValue(0j, complex(-math.inf), spec, 0.0, which, s)
        raise PoleError("Z^c_+ has a pole at s = 0")
    logv = complex(np.sum(sign * _log1m(x)))
    return ZetaValue(cmath.exp(logv), logv, spec, tail, which, s)
