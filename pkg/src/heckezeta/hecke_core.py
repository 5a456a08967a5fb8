"""Exact arithmetic in Q(lambda_q) and the Hecke triangle group Gamma_q.

Elements of the number field are rational coefficient vectors in the power
basis 1, lambda, ..., lambda^(d-1), reduced modulo the minimal polynomial of
lambda_q = 2 cos(pi/q).  Group elements are 2x2 matrices over that field,
normalized projectively so that equality is exact.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
import sympy

from .errors import BranchError, ClassificationError, DomainError

__all__ = [
    "NumberField",
    "AlgebraicNumber",
    "GroupElement",
    "HeckeParams",
    "make_group",
    "minimal_polynomial",
    "mobius_act",
    "j_factor",
    "tau_apply",
    "norm",
    "classify_element",
]


def _laurent_to_trace_poly(coeffs):
    """Rewrite a palindromic polynomial z^(-d) P(z) as a polynomial in x = z + 1/z."""
    deg = len(coeffs) - 1
    d = deg // 2
    # Laurent coefficients indexed by exponent -d..d
    rest = {j - d: int(c) for j, c in enumerate(coeffs)}
    out = [0] * (d + 1)
    for k in range(d, -1, -1):
        a = rest.get(k, 0)
        out[k] = a
        if a:
            for i in range(k + 1):
                e = k - 2 * i
                rest[e] = rest.get(e, 0) - a * math.comb(k, i)
    if any(v for v in rest.values()):
        raise DomainError("polynomial is not palindromic")
    return out


@lru_cache(maxsize=None)
def minimal_polynomial(q: int) -> tuple[int, ...]:
    """Integer coefficients (constant term first) of the minimal polynomial of 2cos(pi/q).

    Obtained from the cyclotomic polynomial Phi_{2q} through x = z + 1/z, then
    selecting the rational factor with a root closest to 2cos(pi/q).
    """
    if q < 3:
        raise DomainError(f"q must be >= 3, got {q}")
    z, x = sympy.symbols("z x")
    phi = sympy.Poly(sympy.cyclotomic_poly(2 * q, z), z)
    low_first = [int(c) for c in reversed(phi.all_coeffs())]
    trace_coeffs = _laurent_to_trace_poly(low_first)
    poly = sympy.Poly(list(reversed(trace_coeffs)), x)
    target = 2.0 * math.cos(math.pi / q)
    best, best_dist = None, math.inf
    for fac, _ in sympy.factor_list(poly)[1]:
        roots = np.roots([float(c) for c in fac.all_coeffs()]) if fac.degree() > 0 else []
        for r in np.atleast_1d(roots):
            dist = abs(complex(r) - target)
            if dist < best_dist:
                best, best_dist = fac, dist
    lead = best.LC()
    coeffs = [sympy.Rational(c, lead) for c in reversed(best.all_coeffs())]
    if any(c.q != 1 for c in coeffs):
        raise DomainError("minimal polynomial is not monic over Z")
    return tuple(int(c) for c in coeffs)


class NumberField:
    """Q(lambda_q) with a fixed power basis."""

    _cache: dict[int, "NumberField"] = {}

    def __new__(cls, q: int):
        if q in cls._cache:
            return cls._cache[q]
        self = super().__new__(cls)
        self.q = q
        self.psi = minimal_polynomial(q)
        self.degree = len(self.psi) - 1
        # degree one (q = 3): the root is rational, so avoid the cosine rounding
        self.lam_float = -self.psi[0] / self.psi[1] if self.degree == 1 else 2.0 * math.cos(math.pi / q)
        self._powers = np.array([self.lam_float**i for i in range(self.degree)])
        # x^j mod psi for j < 2d-1, as coefficient vectors
        d = self.degree
        red = []
        for j in range(2 * d - 1):
            v = [0] * (2 * d - 1)
            v[j] = 1
            for top in range(len(v) - 1, d - 1, -1):
                c = v[top]
                if c:
                    v[top] = 0
                    for i in range(d):
                        v[top - d + i] -= c * self.psi[i]
            red.append(tuple(v[:d]))
        self._reduction = red
        cls._cache[q] = self
        return self

    def __reduce__(self):
        return (NumberField, (self.q,))

    def element(self, coeffs) -> "AlgebraicNumber":
        coeffs = list(coeffs) + [0] * (self.degree - len(coeffs))
        return AlgebraicNumber(self, tuple(Fraction(c) for c in coeffs))

    def rational(self, r) -> "AlgebraicNumber":
        return self.element([r])

    @property
    def zero(self):
        return self.rational(0)

    @property
    def one(self):
        return self.rational(1)

    @property
    def lam(self) -> "AlgebraicNumber":
        if self.degree == 1:
            # lambda is rational (q = 3 gives 1, q = 4, 6 are irrational)
            return self.rational(-self.psi[0])
        return self.element([0, 1])


class AlgebraicNumber:
    """Element of Q(lambda_q) stored as a rational vector in the power basis."""

    __slots__ = ("field", "coeffs", "_float")

    def __init__(self, field_: NumberField, coeffs: tuple):
        self.field = field_
        self.coeffs = coeffs
        self._float = None

    def _coerce(self, other):
        if isinstance(other, AlgebraicNumber):
            if other.field is not self.field:
                raise DomainError("mixing elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.rational(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return AlgebraicNumber(self.field, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicNumber(self.field, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return AlgebraicNumber(self.field, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        d = self.field.degree
        prod = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        prod[i + j] += a * b
        out = [Fraction(0)] * d
        for j, c in enumerate(prod):
            if c:
                for i, r in enumerate(self.field._reduction[j]):
                    if r:
                        out[i] += c * r
        return AlgebraicNumber(self.field, tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise DomainError("negative powers are not supported")
        result = self.field.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field.q, self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __float__(self):
        if self._float is None:
            self._float = float(np.dot([float(c) for c in self.coeffs], self.field._powers))
        return self._float

    def sign(self) -> int:
        """Exact sign of the real embedding (falls back to 60-digit evaluation near zero)."""
        if self.is_zero():
            return 0
        v = float(self)
        if abs(v) > 1e-9:
            return 1 if v > 0 else -1
        with mpmath.workdps(60):
            lam = 2 * mpmath.cos(mpmath.pi / self.field.q)
            w = sum(mpmath.mpf(c.numerator) / c.denominator * lam**i for i, c in enumerate(self.coeffs))
        return 1 if w > 0 else -1

    def to_json(self):
        return {"coeffs": [str(c) for c in self.coeffs], "value": float(self)}

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if i == 0 else f"{c}*lam^{i}")
        return "(" + (" + ".join(terms) or "0") + ")"


class GroupElement:
    """Projectively normalized element of PGL2 over Q(lambda_q) with det +-1."""

    __slots__ = ("a", "b", "c", "d", "det", "_class", "_hash")

    def __init__(self, a, b, c, d, *, normalize=True):
        det_val = a * d - b * c
        if det_val == 1:
            det = 1
        elif det_val == -1:
            det = -1
        else:
            raise DomainError(f"determinant must be +-1, got {det_val!r}")
        if normalize:
            for entry in (a, b, c, d):
                sg = entry.sign()
                if sg:
                    if sg < 0:
                        a, b, c, d = -a, -b, -c, -d
                    break
        self.a, self.b, self.c, self.d = a, b, c, d
        self.det = det
        self._class = None
        self._hash = None

    @property
    def field(self):
        return self.a.field

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        a = self.a * other.a + self.b * other.c
        b = self.a * other.b + self.b * other.d
        c = self.c * other.a + self.d * other.c
        d = self.c * other.b + self.d * other.d
        return GroupElement(a, b, c, d)

    def inverse(self) -> "GroupElement":
        if self.det == 1:
            return GroupElement(self.d, -self.b, -self.c, self.a)
        return GroupElement(-self.d, self.b, self.c, -self.a)

    def __pow__(self, n: int) -> "GroupElement":
        if n < 0:
            return self.inverse() ** (-n)
        f = self.field
        result = GroupElement(f.one, f.zero, f.zero, f.one)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def trace(self):
        return self.a + self.d

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.entries() == other.entries()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.entries())
        return self._hash

    def as_array(self) -> np.ndarray:
        return np.array([[float(self.a), float(self.b)], [float(self.c), float(self.d)]])

    def is_identity(self) -> bool:
        f = self.field
        return self.entries() == (f.one, f.zero, f.zero, f.one)

    def __repr__(self):
        return f"GroupElement([[{self.a!r}, {self.b!r}], [{self.c!r}, {self.d!r}]], det={self.det})"


@dataclass(frozen=True)
class HeckeParams:
    q: int
    field: NumberField
    lam: AlgebraicNumber
    m: int
    q_parity: str
    S: GroupElement
    T: GroupElement
    U: GroupElement
    Q: GroupElement
    g: dict = field(repr=False)

    @property
    def identity(self) -> GroupElement:
        f = self.field
        return GroupElement(f.one, f.zero, f.zero, f.one)

    @property
    def lam_float(self) -> float:
        return self.field.lam_float


@lru_cache(maxsize=None)
def make_group(q: int) -> HeckeParams:
    """Hecke triangle group data for q >= 3, with g_k = (U^k S)^(-1) for k = 1..q-1."""
    if not isinstance(q, int) or q < 3:
        raise DomainError(f"q must be an integer >= 3, got {q!r}")
    f = NumberField(q)
    lam = f.lam
    one, zero = f.one, f.zero
    S = GroupElement(zero, one, -one, zero)
    T = GroupElement(one, lam, zero, one)
    U = T * S
    Q = GroupElement(zero, one, one, zero)
    g = {}
    Uk = U
    for k in range(1, q):
        g[k] = (Uk * S).inverse()
        Uk = Uk * U
    m = (q + 1) // 2
    return HeckeParams(q, f, lam, m, "odd" if q % 2 else "even", S, T, U, Q, g)


def _is_inf(t) -> bool:
    return isinstance(t, (float, int)) and math.isinf(t) or (isinstance(t, complex) and cmath.isinf(t))


def _float_entries(g):
    if isinstance(g, GroupElement):
        return float(g.a), float(g.b), float(g.c), float(g.d)
    arr = np.asarray(g, dtype=float)
    return arr[0, 0], arr[0, 1], arr[1, 0], arr[1, 1]


def mobius_act(g, t):
    """Fractional linear action on the projective line; infinity is math.inf."""
    a, b, c, d = _float_entries(g)
    if _is_inf(t):
        return math.inf if c == 0 else a / c
    den = c * t + d
    if den == 0:
        return math.inf
    return (a * t + b) / den


def j_factor(g, t, s):
    """((ct+d)^(-2))^s on the principal branch."""
    _, _, c, d = _float_entries(g)
    den = c * t + d
    if den == 0:
        raise BranchError(f"denominator vanishes at t={t!r}")
    base = complex(den) ** -2
    if base.imag == 0 and base.real <= 0:
        raise BranchError(f"(ct+d)^-2 lies on the branch cut at t={t!r}")
    return cmath.exp(complex(s) * cmath.log(base))


def tau_apply(h, s, f, t):
    """tau_s(h) f(t) = j_s(h^-1, t) f(h^-1 . t)."""
    g = h.inverse() if isinstance(h, GroupElement) else np.linalg.inv(np.asarray(h, dtype=float))
    return j_factor(g, t, s) * f(mobius_act(g, t))


def classify_element(g: GroupElement) -> str:
    if g._class is not None:
        return g._class
    tr = g.trace()
    if g.det == 1:
        if g.is_identity():
            cls = "identity"
        else:
            sg = (tr * tr - 4).sign()
            cls = "hyperbolic" if sg > 0 else ("parabolic" if sg == 0 else "elliptic")
    else:
        cls = "elliptic" if tr.is_zero() else "hyperbolic"
    g._class = cls
    return cls


def spectral_norm_from_trace(tr: float, det: int) -> float:
    """N = rho^2 where rho is the larger eigenvalue modulus of a matrix with this trace and det."""
    rho = 0.5 * (abs(tr) + math.sqrt(tr * tr - 4.0 * det))
    return rho * rho


def norm(g: GroupElement) -> float:
    if classify_element(g) != "hyperbolic":
        raise ClassificationError(f"norm needs a hyperbolic element, got {classify_element(g)}")
    return spectral_norm_from_trace(float(g.trace()), g.det)
