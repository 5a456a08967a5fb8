"""Branch tables of the slow and fast interval systems for G_q and the triangle group.

Endpoints are stored exactly as projective points (num : den) over Q(lambda_q), so
coincidences such as g_m^-1 . inf == 1 (q odd) are decided without rounding.
Parabolic families are kept symbolic and instantiated for a given exponent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import BoundaryNotice, DomainError
from .hecke_core import GroupElement, j_factor, make_group, mobius_act
from .transfer_operators import apply_slow_operator

__all__ = [
    "ExactPoint",
    "Branch",
    "BranchFamily",
    "BranchSystem",
    "SYSTEM_NAMES",
    "branch_table",
    "step",
    "induced_operator",
    "fast_operator_pointwise",
    "verify_partition",
    "verify_acceleration",
    "one_is_cuspidal",
    "chordal",
    "PartitionReport",
    "AccelerationReport",
]

SYSTEM_NAMES = ("F", "G", "FQ_odd", "GQ_odd", "FQ_even", "GQ_even")


@dataclass(frozen=True, eq=False)
class ExactPoint:
    """Point of the projective real line, num/den with entries in Q(lambda_q)."""

    num: object
    den: object

    @classmethod
    def rational(cls, q: int, r) -> "ExactPoint":
        f = make_group(q).field
        return cls(f.rational(Fraction(r)), f.one)

    @classmethod
    def infinity(cls, q: int) -> "ExactPoint":
        f = make_group(q).field
        return cls(f.one, f.zero)

    def is_inf(self) -> bool:
        return self.den.is_zero()

    def __float__(self):
        if self.is_inf():
            return math.inf
        return float(self.num) / float(self.den)

    def act(self, g: GroupElement) -> "ExactPoint":
        return ExactPoint(g.a * self.num + g.b * self.den, g.c * self.num + g.d * self.den)

    def same(self, other: "ExactPoint") -> bool:
        return (self.num * other.den - other.num * self.den).is_zero()

    def cmp(self, other: "ExactPoint") -> int:
        """Exact order on (-inf, inf]; infinity is treated as +inf."""
        if self.is_inf() or other.is_inf():
            return int(self.is_inf()) - int(other.is_inf())
        diff = (self.num * other.den - other.num * self.den).sign()
        return diff * self.den.sign() * other.den.sign()

    def to_json(self) -> dict:
        if self.is_inf():
            return {"value": "inf"}
        return {"num": [str(c) for c in self.num.coeffs], "den": [str(c) for c in self.den.coeffs], "value": float(self) + 0.0}

    def __repr__(self):
        return "inf" if self.is_inf() else f"{float(self):.12g}"


@dataclass(frozen=True)
class Branch:
    """x -> element.x on the open interval (lo, hi); weight * sign^signed.

    A branch with point=True is an isolated triple (lo, element.lo, weight).
    """

    lo: ExactPoint
    hi: ExactPoint
    element: GroupElement
    weight: Fraction
    signed: bool
    label: str
    point: bool = False
    n: int | None = None

    def weight_value(self, sign: int) -> float:
        return float(self.weight) * (sign if self.signed else 1)

    def contains(self, x: float) -> bool:
        return not self.point and float(self.lo) < x < float(self.hi)

    def image(self) -> tuple[ExactPoint, ExactPoint]:
        a, b = self.lo.act(self.element), self.hi.act(self.element)
        return (a, b) if a.cmp(b) <= 0 else (b, a)

    def to_json(self, sign: int = 1) -> dict:
        lo_img, hi_img = self.image()
        return {
            "label": self.label,
            "n": self.n,
            "point": self.point,
            "domain": [self.lo.to_json(), self.hi.to_json()],
            "image": [lo_img.to_json(), hi_img.to_json()],
            "weight": str(self.weight),
            "signed": self.signed,
            "weight_value": self.weight_value(sign),
        }


@dataclass(frozen=True)
class BranchFamily:
    """Parabolic family x -> pre * base^n . x for n >= 1.

    Endpoints are base^-(n + shift) . anchor, with anchor itself a fixed
    point transformed by an optional element (e.g. g_m^-1 . 0).
    """

    label: str
    base: GroupElement
    pre: GroupElement
    lo: tuple
    hi: tuple
    weight: Fraction
    signed: bool
    kind: str  # "g1": domains march to inf; "gq1": domains shrink to 0

    def _end(self, spec, n):
        shift, anchor = spec
        return anchor.act(self.base ** (-(n + shift)))

    def branch(self, n: int) -> Branch:
        return _family_branch(self, n)

    def _build(self, n: int) -> Branch:
        if n < 1:
            raise DomainError("family exponent must be >= 1")
        lo, hi = self._end(self.lo, n), self._end(self.hi, n)
        if lo.cmp(hi) > 0:
            lo, hi = hi, lo
        return Branch(lo, hi, self.pre * self.base**n, self.weight, self.signed, f"{self.label}^{n}", n=n)

    def candidates(self, x: float, lam: float) -> list[int]:
        if self.kind == "g1":
            n0 = int(math.floor(x / lam))
        else:
            n0 = int(math.floor(1.0 / (lam * x)))
        return [n for n in (n0 - 1, n0, n0 + 1) if n >= 1]


@lru_cache(maxsize=4096)
def _family_branch(fam: BranchFamily, n: int) -> Branch:
    return fam._build(n)


@dataclass
class BranchSystem:
    q: int
    name: str
    sign: int
    carrier: tuple
    branches: list = field(default_factory=list)
    families: list = field(default_factory=list)

    def instantiate(self, n_max: int) -> list[Branch]:
        out = list(self.branches)
        for fam in self.families:
            out += [fam.branch(n) for n in range(1, n_max + 1)]
        return out

    def to_json(self, n_max: int = 3) -> dict:
        return {
            "q": self.q,
            "name": self.name,
            "sign": self.sign,
            "carrier": [self.carrier[0].to_json(), self.carrier[1].to_json()],
            "branches": [b.to_json(self.sign) for b in self.instantiate(n_max)],
            "families": [
                {"label": f.label, "weight": str(f.weight), "signed": f.signed, "instantiated_up_to": n_max}
                for f in self.families
            ],
        }


def _mk(lo, hi, g, w, signed, label, point=False) -> Branch:
    if not point and lo.cmp(hi) > 0:
        lo, hi = hi, lo
    return Branch(lo, hi, g, Fraction(w), signed, label, point)


def _sign_of(parity) -> int:
    if parity in ("+", 1, "plus", "even", 0):
        return 1
    if parity in ("-", -1, "minus", "odd"):
        return -1
    raise DomainError(f"parity must be '+' or '-', got {parity!r}")


def branch_table(q: int, name: str, parity="+") -> BranchSystem:
    """Branch table of the named system; parity selects the sign carried by signed weights."""
    if name not in SYSTEM_NAMES:
        raise DomainError(f"unknown system {name!r}; choose from {SYSTEM_NAMES}")
    G = make_group(q)
    odd = q % 2 == 1
    if name.endswith("_odd") and not odd:
        raise DomainError(f"{name} requires odd q, got q={q}")
    if name.endswith("_even") and odd:
        raise DomainError(f"{name} requires even q, got q={q}")
    sign = _sign_of(parity)
    g, Q, m = G.g, G.Q, G.m
    zero = ExactPoint.rational(q, 0)
    one = ExactPoint.rational(q, 1)
    inf = ExactPoint.infinity(q)

    def pre(k, pt):
        return pt.act(g[k].inverse())

    if name == "F":
        sys = BranchSystem(q, name, sign, (zero, inf))
        for k in range(1, q):
            sys.branches.append(_mk(pre(k, zero), pre(k, inf), g[k], 1, False, f"g{k}"))
        return sys

    if name == "G":
        sys = BranchSystem(q, name, sign, (zero, inf))
        for k in range(2, q - 1):
            sys.branches.append(_mk(pre(k, zero), pre(k, inf), g[k], 1, False, f"g{k}"))
        ident = G.identity
        sys.families.append(BranchFamily("g1", g[1], ident, (0, zero), (1, zero), Fraction(1), False, "g1"))
        sys.families.append(BranchFamily(f"g{q-1}", g[q - 1], ident, (1, inf), (0, inf), Fraction(1), False, "gq1"))
        return sys

    if odd:
        carrier = (zero, one)
        ks = range(m, q) if name == "FQ_odd" else range(m, q - 1)
        sys = BranchSystem(q, name, sign, carrier)
        for k in ks:
            sys.branches.append(_mk(pre(k, zero), pre(k, one), g[k], 1, False, f"g{k}"))
            sys.branches.append(_mk(pre(k, one), pre(k, inf), Q * g[k], 1, True, f"Qg{k}"))
        if name == "GQ_odd":
            p = g[q - 1]
            sys.families.append(BranchFamily(f"g{q-1}", p, G.identity, (1, inf), (0, one), Fraction(1), False, "gq1"))
            sys.families.append(BranchFamily(f"Qg{q-1}", p, Q, (0, one), (0, inf), Fraction(1), True, "gq1"))
        return sys

    # even q: symmetrized relations with half weights on the g_m pair
    gm_inv = g[m].inverse()
    top = inf.act(gm_inv)  # g_m^-1 . inf
    sys = BranchSystem(q, name, sign, (zero, top))
    ks = range(m + 1, q) if name == "FQ_even" else range(m + 1, q - 1)
    for k in ks:
        gk_inv = g[k].inverse()
        a0 = zero.act(gk_inv)
        a1 = one.act(gk_inv)
        aM = top.act(gk_inv)  # g_k^-1 g_m^-1 . inf
        b0 = zero.act(gm_inv).act(gk_inv)  # g_k^-1 g_m^-1 . 0
        ainf = inf.act(gk_inv)
        sys.branches.append(_mk(a0, a1, g[k], 1, False, f"g{k}"))
        sys.branches.append(_mk(a1, aM, g[k], 1, False, f"g{k}"))
        sys.branches.append(_mk(b0, ainf, Q * g[k], 1, True, f"Qg{k}"))
        sys.branches.append(_mk(a1, a1, g[k], 1, False, f"g{k}", point=True))
        sys.branches.append(_mk(a1, a1, Q * g[k], 1, True, f"Qg{k}", point=True))
    half = Fraction(1, 2)
    c0 = zero.act(gm_inv)
    c2 = zero.act(gm_inv * gm_inv)
    d2 = inf.act(gm_inv * gm_inv)
    sys.branches += [
        _mk(c0, c2, g[m], half, False, f"g{m}"),
        _mk(c2, one, g[m], half, False, f"g{m}"),
        _mk(c2, one, Q * g[m], half, True, f"Qg{m}"),
        _mk(one, d2, g[m], half, False, f"g{m}"),
        _mk(one, d2, Q * g[m], half, True, f"Qg{m}"),
        _mk(d2, top, Q * g[m], half, True, f"Qg{m}"),
        _mk(one.act(gm_inv), one.act(gm_inv), g[m], half, False, f"g{m}", point=True),
        _mk(one.act(gm_inv), one.act(gm_inv), Q * g[m], half, True, f"Qg{m}", point=True),
    ]
    if name == "GQ_even":
        # fast system: the g_{q-1} chain collapsed into families, weights as for k > m
        p = g[q - 1]
        b_top = (0, top)
        sys.families.append(BranchFamily(f"g{q-1}", p, G.identity, (1, inf), (0, one), Fraction(1), False, "gq1"))
        sys.families.append(BranchFamily(f"g{q-1}", p, G.identity, (0, one), b_top, Fraction(1), False, "gq1"))
        sys.families.append(
            BranchFamily(f"Qg{q-1}", p, Q, (0, zero.act(gm_inv)), (0, inf), Fraction(1), True, "gq1")
        )
    return sys


def _endpoint_hit(x: float, e: ExactPoint) -> bool:
    v = float(e)
    return math.isfinite(v) and abs(x - v) <= 4 * np.finfo(float).eps * max(1.0, abs(v))


def _local_branches(sys: BranchSystem, x: float) -> list[Branch]:
    lam = make_group(sys.q).lam_float
    out = list(sys.branches)
    for fam in sys.families:
        out += [fam.branch(n) for n in fam.candidates(x, lam)]
    return out


def step(sys: BranchSystem, x: float) -> list[tuple[float, GroupElement, float]]:
    """All (image, element, weight) with x in a branch domain.

    Functions give one hit; the even-q relations can give two. Points at stored
    endpoints raise BoundaryNotice naming the adjacent branches.
    """
    x = float(x)
    lo, hi = (float(p) for p in sys.carrier)
    if not lo < x < hi:
        raise DomainError(f"x = {x} is outside the carrier ({lo}, {hi})")
    cands = _local_branches(sys, x)
    touching = [b.label for b in cands if _endpoint_hit(x, b.lo) or _endpoint_hit(x, b.hi)]
    if touching:
        raise BoundaryNotice(f"x = {x} is a branch endpoint; adjacent branches: {sorted(set(touching))}")
    return [(mobius_act(b.element, x), b.element, b.weight_value(sys.sign)) for b in cands if b.contains(x)]


def induced_operator(sys: BranchSystem, s, f, points, n_max: int = 60) -> np.ndarray:
    """(L f)(x) = sum over branches with h^-1.x in the domain of w * j_s(h^-1, x) f(h^-1.x)."""
    s = complex(s)
    branches = [(b, b.element.inverse()) for b in sys.instantiate(n_max) if not b.point]
    out = np.zeros(len(points), dtype=complex)
    for i, x in enumerate(points):
        acc = 0j
        for b, hinv in branches:
            y = mobius_act(hinv, x)
            if b.contains(y):
                acc += b.weight_value(sys.sign) * j_factor(hinv, x, s) * f(y)
        out[i] = acc
    return out


def fast_operator_pointwise(q: int, s, parity, f, points, n_max: int = 60) -> np.ndarray:
    """Pointwise action of the fast twisted operator in its 2x2 block form.

    On (0, g_{q-1}^-1.inf) only the +-Qg_{q-1}^n column and the finite row act;
    on the rest of the carrier the g_{q-1}^n terms join in.
    """
    G = make_group(q)
    sign = _sign_of(parity)
    s = complex(s)
    m = G.m
    g, Q = G.g, G.Q
    finite = []
    if q % 2:
        for k in range(m, q - 1):
            finite += [(g[k], 1.0), (Q * g[k], sign)]
    else:
        finite += [(g[m], 0.5), (Q * g[m], 0.5 * sign)]
        for k in range(m + 1, q - 1):
            finite += [(g[k], 1.0), (Q * g[k], sign)]
    p = g[q - 1]
    twisted = [(Q * p**n, sign) for n in range(1, n_max + 1)]
    plain = [(p**n, 1.0) for n in range(1, n_max + 1)]
    split = float(ExactPoint.infinity(q).act(p.inverse()))
    out = np.zeros(len(points), dtype=complex)
    for i, x in enumerate(points):
        terms = finite + twisted + (plain if x > split else [])
        acc = 0j
        for h, w in terms:
            hinv = h.inverse()
            acc += w * j_factor(hinv, x, s) * f(mobius_act(hinv, x))
        out[i] = acc
    return out


def one_is_cuspidal(q: int) -> bool:
    """Decide exactly whether 1 is a cusp: q odd gives g_m^-1.inf == 1, q even makes 1 a hyperbolic fixed point."""
    G = make_group(q)
    one = ExactPoint.rational(q, 1)
    inf = ExactPoint.infinity(q)
    if q % 2:
        return inf.act(G.g[G.m].inverse()).same(one)
    if one.act(G.g[G.m]).same(one):
        return False
    raise DomainError(f"could not decide the cusp status of 1 for q={q}")


@dataclass
class PartitionReport:
    q: int
    name: str
    samples: int
    violations: list
    hit_counts: dict
    operator_error: float | None
    tiling_exact: bool

    @property
    def ok(self) -> bool:
        return not self.violations and self.tiling_exact and (self.operator_error is None or self.operator_error <= 1e-12)

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "name": self.name,
            "samples": self.samples,
            "violations": self.violations[:20],
            "n_violations": len(self.violations),
            "hit_counts": {str(k): v for k, v in self.hit_counts.items()},
            "operator_error": self.operator_error,
            "tiling_exact": self.tiling_exact,
            "ok": self.ok,
        }


def _sample_carrier(sys: BranchSystem, rng, n: int) -> np.ndarray:
    lo, hi = float(sys.carrier[0]), float(sys.carrier[1])
    if math.isinf(hi):
        return np.exp(rng.normal(0.0, 2.0, n))
    return lo + (hi - lo) * rng.uniform(0.0, 1.0, n)


def _expected_pattern(sys: BranchSystem):
    """Closed-form coefficient of each element label in the slow or fast operator."""
    sign = sys.sign
    out = {}
    for b in sys.branches:
        out[b.label] = b.weight_value(sign)
    for fam in sys.families:
        out[fam.label] = float(fam.weight) * (sign if fam.signed else 1)
    return out


def _check_tiling(sys: BranchSystem, n_check: int = 4) -> bool:
    """Exact check: sorted non-point domains of each element label chain without gaps inside the carrier.

    For function systems all domains must chain from carrier start to carrier end.
    """
    brs = [b for b in sys.instantiate(n_check) if not b.point]
    # empty domains are legitimate (q = 3: the g_2^n branch onto (g_2^-1.inf, 1) = (1, 1))
    if any(b.lo.cmp(b.hi) > 0 for b in brs):
        return False
    brs = [b for b in brs if not b.lo.same(b.hi)]
    if sys.name in ("F", "FQ_odd"):
        brs.sort(key=lambda b: float(b.lo))
        if not brs[0].lo.same(sys.carrier[0]) or not brs[-1].hi.same(sys.carrier[1]):
            return False
        return all(a.hi.same(b.lo) for a, b in zip(brs, brs[1:]))
    return True


def verify_partition(sys: BranchSystem, samples: int = 10_000, *, seed: int = 0, s=2.0, operator_points: int = 100,
                     n_max: int = 60) -> PartitionReport:
    """Sample the carrier and check the branch pattern, plus the induced operator where a closed form exists."""
    rng = np.random.default_rng(seed)
    xs = _sample_carrier(sys, rng, samples)
    expected = _expected_pattern(sys)
    relation = sys.name.endswith("_even")
    violations = []
    counts: dict = {}
    for x in xs:
        try:
            hits = step(sys, x)
        except BoundaryNotice:
            continue
        counts[len(hits)] = counts.get(len(hits), 0) + 1
        if not hits:
            violations.append((float(x), "no branch"))
            continue
        if not relation:
            if len(hits) != 1:
                violations.append((float(x), f"{len(hits)} branches"))
            continue
        cands = [b for b in _local_branches(sys, x) if b.contains(x)]
        labels = [b.label.split("^")[0] for b in cands]
        if len(labels) != len(set(labels)):
            violations.append((float(x), "element repeated"))
        ks = {lab.lstrip("Q") for lab in labels}
        if len(ks) != 1 or len(hits) > 2:
            violations.append((float(x), f"mixed branches {labels}"))
        for lab, b in zip(labels, cands):
            if abs(b.weight_value(sys.sign) - expected[lab]) > 0:
                violations.append((float(x), f"weight of {lab}"))
    op_err = None
    if operator_points and sys.name in ("F", "FQ_odd", "FQ_even", "GQ_odd", "GQ_even"):
        ys = _sample_carrier(sys, rng, operator_points)

        def f(t):
            return 1.0 / (1.0 + t) ** 2 + 0.3j * math.exp(-t)

        got = induced_operator(sys, s, f, ys, n_max=n_max)
        if sys.name == "F":
            want = apply_slow_operator(sys.q, s, "full", f, ys)
        elif sys.name.startswith("FQ"):
            want = apply_slow_operator(sys.q, s, "+" if sys.sign > 0 else "-", f, ys)
        else:
            want = fast_operator_pointwise(sys.q, s, sys.sign, f, ys, n_max=n_max)
        op_err = float(np.max(np.abs(got - want) / np.maximum(1.0, np.abs(want))))
    return PartitionReport(sys.q, sys.name, samples, violations, counts, op_err, _check_tiling(sys))


@dataclass
class AccelerationReport:
    q: int
    n_max: int
    samples: int
    max_error_g1: float
    max_error_gq1: float

    @property
    def max_error(self) -> float:
        return max(self.max_error_g1, self.max_error_gq1)

    def ok(self, tol: float = 1e-13) -> bool:
        return self.max_error <= tol

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "n_max": self.n_max,
            "samples": self.samples,
            "max_error_g1": self.max_error_g1,
            "max_error_gq1": self.max_error_gq1,
        }


def _single(sys, x):
    hits = step(sys, x)
    if len(hits) != 1:
        raise DomainError(f"{sys.name} has {len(hits)} branches at x = {x}")
    return hits[0]


def chordal(a: float, b: float) -> float:
    """Chordal distance on the projective line; finite even when an image is near the cusp at infinity."""
    if math.isinf(a) or math.isinf(b):
        return 0.0 if a == b else 1.0 / math.sqrt(1.0 + min(abs(a), abs(b)) ** 2)
    return abs(a - b) / (math.sqrt(1.0 + a * a) * math.sqrt(1.0 + b * b))


def verify_acceleration(q: int, samples: int = 100, *, n_max: int = 20, seed: int = 0) -> AccelerationReport:
    """Compare n slow steps with one fast step on both parabolic families (chordal distance)."""
    F, Gs = branch_table(q, "F"), branch_table(q, "G")
    lam = make_group(q).lam_float
    rng = np.random.default_rng(seed)
    err1 = err2 = 0.0
    for n in range(1, n_max + 1):
        # interior of (n lam, (n+1) lam) and of (1/((n+1) lam), 1/(n lam))
        us = rng.uniform(0.01, 0.99, samples)
        for u in us:
            x = (n + u) * lam
            y = x
            for _ in range(n):
                y = _single(F, y)[0]
            z = _single(Gs, x)[0]
            err1 = max(err1, chordal(y, z))
            x = 1.0 / ((n + u) * lam)
            y = x
            for _ in range(n):
                y = _single(F, y)[0]
            z = _single(Gs, x)[0]
            err2 = max(err2, chordal(y, z))
    return AccelerationReport(q, n_max, samples, err1, err2)
