"""Independent reference computations used to validate the fast paths.

None of these share code with the operator discretization or the word
enumeration beyond the group generators themselves.
"""

from __future__ import annotations

import math
from functools import lru_cache

import mpmath
import numpy as np

from .errors import DomainError
from .hecke_core import make_group, spectral_norm_from_trace

__all__ = [
    "mayer_matrix",
    "mayer_det",
    "ball_elements",
    "brute_force_classes",
    "conjugacy_partition",
    "reduced_conjugates",
]


def mayer_matrix(s, n: int = 48, dps: int = 50) -> np.ndarray:
    """Mayer's operator for PSL2(Z) on power series about z = 1, truncated to degree n.

    M[j, k] = sum_l C(k, l) (-1)^(k-l) binom(-2s-l, j) zeta(2s+l+j, 2); the
    alternating sums cancel heavily, so they are formed at `dps` digits.
    """
    with mpmath.workdps(dps):
        s = mpmath.mpmathify(complex(s))
        z = [mpmath.zeta(2 * s + i, 2) for i in range(2 * n)]
        A = mpmath.matrix(n, n)
        for k in range(n):
            for l in range(k + 1):
                A[k, l] = mpmath.binomial(k, l) * (-1) ** (k - l)
        B = mpmath.matrix(n, n)
        for l in range(n):
            for j in range(n):
                B[l, j] = mpmath.binomial(-2 * s - l, j) * z[l + j]
        M = (A * B).T
        return np.array([[complex(M[j, k]) for k in range(n)] for j in range(n)])


def mayer_det(s, sign: int = 1, n: int = 48) -> complex:
    """det(1 - sign * L_Mayer,s) from the truncated power-series matrix."""
    M = mayer_matrix(s, n)
    return complex(np.linalg.det(np.eye(n) - sign * M))


def _normalize(m: np.ndarray) -> np.ndarray:
    # projective sign: first entry with |x| > tol is positive
    flat = m.reshape(len(m), 4)
    idx = np.argmax(np.abs(flat) > 1e-9, axis=1)
    sg = np.sign(flat[np.arange(len(m)), idx])
    return m * sg[:, None, None]


def _keys(m: np.ndarray):
    r = np.round(m.reshape(len(m), 4), 8) + 0.0
    return [tuple(row) for row in r]


@lru_cache(maxsize=16)
def ball_elements(q: int, radius: float, with_reflection: bool) -> np.ndarray:
    """All group elements (as float matrices mod sign) with every entry of modulus <= radius.

    Breadth-first search over S, T, T^-1 (and Q); every element in the ball is reached
    through a path that stays inside a slightly larger ball, so the search uses 4 * radius
    as its working bound and then filters.
    """
    G = make_group(q)
    gens = [G.S.as_array(), G.T.as_array(), G.T.inverse().as_array()]
    if with_reflection:
        gens.append(G.Q.as_array())
    work = 4.0 * radius
    start = np.eye(2)[None]
    seen = set(_keys(start))
    frontier = start
    found = [start]
    while len(frontier):
        nxt = []
        for gmat in gens:
            cand = _normalize(np.einsum("nij,jk->nik", frontier, gmat))
            ok = np.max(np.abs(cand.reshape(len(cand), 4)), axis=1) <= work
            cand = cand[ok]
            keep = []
            for key, row in zip(_keys(cand), cand):
                if key not in seen:
                    seen.add(key)
                    keep.append(row)
            if keep:
                nxt.append(np.array(keep))
        frontier = np.concatenate(nxt) if nxt else np.zeros((0, 2, 2))
        if len(frontier):
            found.append(frontier)
    allm = np.concatenate(found)
    inside = np.max(np.abs(allm.reshape(len(allm), 4)), axis=1) <= radius
    return allm[inside]


def _axis_meets_domain(mats: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Does the invariant geodesic of each matrix meet {lo <= Re z <= hi, |z| >= 1} (closed)?"""
    tol = 1e-9
    a, b, c, d = (mats[:, i, j] for i, j in ((0, 0), (0, 1), (1, 0), (1, 1)))
    out = np.zeros(len(mats), dtype=bool)
    vert = np.abs(c) < 1e-12
    if vert.any():
        with np.errstate(divide="ignore", invalid="ignore"):
            x = b[vert] / (d[vert] - a[vert])
        out[vert] = (x >= lo - tol) & (x <= hi + tol)
    k = ~vert
    if k.any():
        a, b, c, d = a[k], b[k], c[k], d[k]
        root = np.sqrt(np.maximum((d - a) ** 2 + 4 * b * c, 0.0))
        c0 = (a - d) / (2 * c)
        rad = np.abs(root / (2 * c))
        x0 = np.maximum(lo, c0 - rad)
        x1 = np.minimum(hi, c0 + rad)
        # on the semicircle |z|^2 = rad^2 - c0^2 + 2 c0 x is linear in x
        top = np.maximum(2 * c0 * x0, 2 * c0 * x1) + rad**2 - c0**2
        out[k] = (x0 <= x1 + tol) & (top >= 1 - tol)
    return out


def _domain(q: int, tilde: bool) -> tuple[float, float]:
    lam = make_group(q).lam_float
    return (0.0 if tilde else -lam / 2), lam / 2


def _hyperbolic_mask(mats: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    dets = np.rint(np.linalg.det(mats)).astype(int)
    trs = mats[:, 0, 0] + mats[:, 1, 1]
    hyper = np.where(dets == 1, np.abs(trs) > 2 + 1e-9, np.abs(trs) > 1e-9)
    return hyper, dets, trs


def reduced_conjugates(mat: np.ndarray, ball: np.ndarray, inv: np.ndarray, lo: float, hi: float) -> set:
    """Keys of the conjugates g mat g^-1 (g in the ball) whose axis crosses the fundamental domain."""
    conj = _normalize(np.einsum("nij,jk,nkl->nil", ball, mat, inv))
    return set(k for k, ok in zip(_keys(conj), _axis_meets_domain(conj, lo, hi)) if ok)


def conjugacy_partition(q: int, group_tag: str, mats, radius: float = 24.0) -> list[int]:
    """Class index for each hyperbolic matrix; equal indices mean conjugate in the group.

    Two elements are merged when they share a conjugate whose axis crosses the
    fundamental domain.  Raises if some element has no such conjugate in the ball.
    """
    tilde = group_tag == "Gamma_tilde"
    ball = ball_elements(q, radius, tilde)
    inv = np.linalg.inv(ball)
    lo, hi = _domain(q, tilde)
    owner: dict = {}
    parent = list(range(len(mats)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, mat in enumerate(mats):
        keys = reduced_conjugates(np.asarray(mat, dtype=float), ball, inv, lo, hi)
        if not keys:
            raise DomainError(f"no reduced conjugate within radius {radius}; enlarge the ball")
        for key in keys:
            j = owner.setdefault(key, i)
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[ri] = rj
    roots: dict = {}
    return [roots.setdefault(find(i), len(roots)) for i in range(len(mats))]


def brute_force_classes(q: int, group_tag: str, X: float, radius: float | None = None) -> list[tuple[float, int]]:
    """Sorted (N, det) of all hyperbolic conjugacy classes with N <= X, by matrix search.

    Each class has a representative whose axis crosses the closed fundamental domain;
    these are collected from a matrix ball and merged by conjugating with ball elements.
    """
    if group_tag not in ("Gamma", "Gamma_tilde"):
        raise DomainError(f"unknown group tag {group_tag!r}")
    tilde = group_tag == "Gamma_tilde"
    ball = ball_elements(q, radius or 24.0, tilde)
    lo, hi = _domain(q, tilde)
    hyper, dets, trs = _hyperbolic_mask(ball)
    norms = np.array([spectral_norm_from_trace(float(t), int(d)) if h else np.inf for t, d, h in zip(trs, dets, hyper)])
    keep = hyper & (norms <= X * (1 + 1e-12)) & _axis_meets_domain(ball, lo, hi)
    reps = ball[keep]
    if not len(reps):
        return []
    labels = conjugacy_partition(q, group_tag, reps, radius or 24.0)
    out = {}
    for lab, d, N in zip(labels, dets[keep], norms[keep]):
        out.setdefault(lab, (float(N), int(d)))
    return sorted(out.values())
