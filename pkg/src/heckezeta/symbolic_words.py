"""Words over the generator alphabets Gen_G and Gen_{G^Q}, and conjugacy-class normal forms.

Alphabet "G" has letters g_k (k = 2..q-2) and parabolic powers g_1^n, g_{q-1}^n.
Alphabet "GQ" has letters g_k, Qg_k (k = m..q-2) and g_{q-1}^n, Qg_{q-1}^n.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, NamedTuple

import numpy as np

from .errors import AlphabetError, DomainError
from .hecke_core import GroupElement, make_group, spectral_norm_from_trace

__all__ = [
    "Letter",
    "Word",
    "ConjClassRecord",
    "TruncationWarning",
    "letter_alphabet",
    "is_reduced",
    "is_regular",
    "eps_and_k",
    "canonical_class",
    "enumerate_regular_words",
    "enumerate_conj_classes",
    "translate_coding",
    "b_set_tags",
    "is_boundary_word",
]

ALPHABETS = ("G", "GQ")
GROUP_TAGS = ("Gamma", "Gamma_tilde")


class TruncationWarning(UserWarning):
    pass


class Letter(NamedTuple):
    """A generator letter: optional Q prefix, base index k and exponent."""

    qflag: bool
    base: int
    exp: int = 1

    def toggled(self) -> "Letter":
        return Letter(not self.qflag, self.base, self.exp)

    def label(self) -> str:
        s = ("Q" if self.qflag else "") + f"g{self.base}"
        return s + (f"^{self.exp}" if self.exp != 1 else "")

    def to_json(self) -> dict:
        return {"q": bool(self.qflag), "base": int(self.base), "exp": int(self.exp)}


def _is_parabolic_base(q: int, base: int) -> bool:
    return base == 1 or base == q - 1


def _check_letter(q: int, letter: Letter, alphabet: str) -> None:
    if alphabet not in ALPHABETS:
        raise AlphabetError(f"unknown alphabet {alphabet!r}")
    m = (q + 1) // 2
    k, e = letter.base, letter.exp
    if e < 1:
        raise AlphabetError(f"exponent must be positive in {letter}")
    if alphabet == "G":
        ok = not letter.qflag and (
            (2 <= k <= q - 2 and e == 1) or _is_parabolic_base(q, k)
        )
    else:
        ok = (m <= k <= q - 2 and e == 1) or k == q - 1
    if not ok:
        raise AlphabetError(f"letter {letter.label()} is not in Gen_{alphabet} for q={q}")


def letter_alphabet(q: int, alphabet: str, max_exp: int = 1) -> list[Letter]:
    """All letters of the alphabet with exponents up to max_exp, in canonical order."""
    m = (q + 1) // 2
    out = []
    if alphabet == "G":
        out += [Letter(False, 1, e) for e in range(1, max_exp + 1)]
        out += [Letter(False, k, 1) for k in range(2, q - 1)]
        out += [Letter(False, q - 1, e) for e in range(1, max_exp + 1)]
    elif alphabet == "GQ":
        for flag in (False, True):
            out += [Letter(flag, k, 1) for k in range(m, q - 1)]
            out += [Letter(flag, q - 1, e) for e in range(1, max_exp + 1)]
    else:
        raise AlphabetError(f"unknown alphabet {alphabet!r}")
    return sorted(out)


@lru_cache(maxsize=None)
def _letter_float(q: int, letter: Letter) -> tuple[float, float, float, float]:
    lam = 2.0 * math.cos(math.pi / q)
    k, e = letter.base, letter.exp
    if k == 1:
        a, b, c, d = 1.0, -e * lam, 0.0, 1.0
    elif k == q - 1:
        a, b, c, d = 1.0, 0.0, -e * lam, 1.0
    else:
        arr = (make_group(q).g[k] ** e).as_array()
        a, b, c, d = (float(v) for v in arr.ravel())
    if letter.qflag:
        a, b, c, d = c, d, a, b
    return (a, b, c, d)


def _mul(p, r):
    return (
        p[0] * r[0] + p[1] * r[2],
        p[0] * r[1] + p[1] * r[3],
        p[2] * r[0] + p[3] * r[2],
        p[2] * r[1] + p[3] * r[3],
    )


def letter_element(q: int, letter: Letter) -> GroupElement:
    G = make_group(q)
    el = G.g[letter.base] ** letter.exp
    return G.Q * el if letter.qflag else el


@dataclass(frozen=True)
class Word:
    q: int
    letters: tuple

    def __post_init__(self):
        if not self.letters:
            raise DomainError("words must be nonempty")
        object.__setattr__(self, "letters", tuple(Letter(*l) for l in self.letters))

    def __len__(self):
        return len(self.letters)

    def __add__(self, other: "Word") -> "Word":
        return Word(self.q, self.letters + other.letters)

    @cached_property
    def element(self) -> GroupElement:
        el = letter_element(self.q, self.letters[0])
        for letter in self.letters[1:]:
            el = el * letter_element(self.q, letter)
        return el

    @cached_property
    def matrix(self) -> tuple:
        p = _letter_float(self.q, self.letters[0])
        for letter in self.letters[1:]:
            p = _mul(p, _letter_float(self.q, letter))
        return p

    @property
    def det(self) -> int:
        return -1 if self.eps % 2 else 1

    @property
    def eps(self) -> int:
        return sum(1 for l in self.letters if l.qflag)

    @property
    def kcount(self) -> int:
        m = (self.q + 1) // 2
        return sum(1 for l in self.letters if l.base == m)

    @property
    def trace(self) -> float:
        p = self.matrix
        return p[0] + p[3]

    @property
    def N(self) -> float:
        return spectral_norm_from_trace(self.trace, self.det)

    def label(self) -> str:
        return " ".join(l.label() for l in self.letters)

    def to_json(self) -> dict:
        return {"letters": [l.to_json() for l in self.letters]}


def _as_word(w, q=None) -> Word:
    if isinstance(w, Word):
        return w
    if q is None:
        raise DomainError("q is required when passing raw letters")
    return Word(q, tuple(w))


def is_reduced(w: Word, alphabet: str) -> bool:
    q = w.q
    for letter in w.letters:
        _check_letter(q, letter, alphabet)
    for x, y in zip(w.letters, w.letters[1:]):
        if alphabet == "G":
            if x.base == y.base and _is_parabolic_base(q, x.base):
                return False
        else:
            if x.base == q - 1 and y.base == q - 1 and not y.qflag:
                return False
    return True


def is_regular(w: Word, alphabet: str) -> bool:
    return is_reduced(w + w, alphabet)


def eps_and_k(w: Word) -> tuple[int, int]:
    return w.eps, w.kcount


def _period(seq: tuple) -> int:
    n = len(seq)
    for d in range(1, n + 1):
        if n % d == 0 and seq[d:] + seq[:d] == seq:
            return d
    return n


def _min_rotation(seq: tuple) -> tuple:
    return min(seq[i:] + seq[:i] for i in range(len(seq)))


def _flip_orbit(seq: tuple, m: int) -> set:
    """Closure under the moves (w_p, w_{p+1}) -> (Q w_p, Q w_{p+1}) for w_p of base m."""
    seen = {seq}
    stack = [seq]
    n = len(seq)
    while stack:
        cur = stack.pop()
        for p, letter in enumerate(cur):
            if letter.base != m:
                continue
            nxt = list(cur)
            nxt[p] = letter.toggled()
            j = (p + 1) % n
            if j == p:
                continue
            nxt[j] = nxt[j].toggled()
            t = tuple(nxt)
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return seen


def is_boundary_word(w: Word) -> bool:
    """Even q: every letter is g_m or Qg_m (the boundary geodesic family)."""
    m = (w.q + 1) // 2
    return w.q % 2 == 0 and all(l.base == m for l in w.letters)


@dataclass(frozen=True)
class ConjClassRecord:
    canonical_word: Word
    group_tag: str
    N: float
    ell: int
    n: int
    det: int
    eps: int
    kcount: int
    boundary: bool = False

    @property
    def primitive(self) -> bool:
        return self.n == 1

    @property
    def element(self) -> GroupElement:
        return self.canonical_word.element

    @property
    def key(self) -> tuple:
        return self.canonical_word.letters

    def to_json(self) -> dict:
        out = self.canonical_word.to_json()
        out.update(N=self.N, ell=self.ell, n=self.n, det=self.det, eps=self.eps, k=self.kcount)
        return out


def _canonical_letters(w: Word, group_tag: str) -> tuple[tuple, int]:
    seq = w.letters
    q = w.q
    if group_tag == "Gamma_tilde" and q % 2 == 0:
        variants = _flip_orbit(seq, (q + 1) // 2)
    else:
        variants = {seq}
    canon = min(_min_rotation(v) for v in variants)
    n = max(len(v) // _period(v) for v in variants)
    return canon, n


def canonical_class(w: Word, group_tag: str = "Gamma_tilde", q_parity: str | None = None) -> ConjClassRecord:
    """Normal form of the conjugacy class of a regular word.

    Gamma uses cyclic rotations of Gen_G words; Gamma_tilde uses cyclic rotations of
    Gen_{G^Q} words and, for even q, the Q-flip moves at letters of base m.
    """
    if group_tag not in GROUP_TAGS:
        raise DomainError(f"unknown group tag {group_tag!r}")
    alphabet = "G" if group_tag == "Gamma" else "GQ"
    if q_parity is not None and q_parity != ("odd" if w.q % 2 else "even"):
        raise DomainError("q_parity does not match q")
    if not is_regular(w, alphabet):
        raise DomainError(f"word {w.label()} is not regular")
    canon, n = _canonical_letters(w, group_tag)
    cw = Word(w.q, canon)
    return ConjClassRecord(
        canonical_word=cw,
        group_tag=group_tag,
        N=cw.N,
        ell=len(cw),
        n=n,
        det=cw.det,
        eps=cw.eps,
        kcount=cw.kcount,
        boundary=group_tag == "Gamma_tilde" and is_boundary_word(cw),
    )


def b_set_tags(w: Word) -> frozenset:
    """Membership of a Gen_{G^Q} word in the sets B_1..B_4."""
    q = w.q
    first, last = w.letters[0], w.letters[-1]
    starts_plain_parabolic = first.base == q - 1 and not first.qflag
    tags = set()
    if last.base == q - 1:
        tags.add(3)
        if not starts_plain_parabolic:
            tags.add(1)
    else:
        tags.add(4)
        if not starts_plain_parabolic:
            tags.add(2)
    return frozenset(tags)


def _pair_ok(q: int, alphabet: str, x: Letter, y: Letter) -> bool:
    if alphabet == "G":
        return not (x.base == y.base and _is_parabolic_base(q, x.base))
    return not (x.base == q - 1 and y.base == q - 1 and not y.qflag)


def _letter_families(q: int, alphabet: str):
    """(qflag, base, is_parabolic) triples in canonical order."""
    fams = sorted({(l.qflag, l.base) for l in letter_alphabet(q, alphabet, 1)})
    return [(f, b, _is_parabolic_base(q, b)) for f, b in fams]


def _frob2(p) -> float:
    return p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3]


def enumerate_regular_words(q: int, alphabet: str, n: int, max_exp: int = 1, max_norm: float | None = None) -> Iterator[tuple[Word, frozenset]]:
    """All reduced words of length n with exponents <= max_exp, with their B-set tags.

    With max_norm given, prefixes whose spectral radius squared already exceeds
    PREFIX_SLACK * max_norm are pruned.  Tags are empty for alphabet G.
    """
    if n < 1 or max_exp < 1:
        raise DomainError("need n >= 1 and max_exp >= 1")
    letters = letter_alphabet(q, alphabet, max_exp)
    for l in letters:
        _check_letter(q, l, alphabet)

    def rec(prefix, mat):
        if len(prefix) == n:
            w = Word(q, tuple(prefix))
            yield w, (b_set_tags(w) if alphabet == "GQ" else frozenset())
            return
        for l in letters:
            if prefix and not _pair_ok(q, alphabet, prefix[-1], l):
                continue
            p = _letter_float(q, l) if mat is None else _mul(mat, _letter_float(q, l))
            if max_norm is not None and _frob2(p) > PREFIX_SLACK * max_norm:
                continue
            yield from rec(prefix + [l], p)

    yield from rec([], None)


# Empirical constant: for the nonnegative letter matrices of both codings, the norm of
# a regular word is never smaller than 1/PREFIX_SLACK times the squared Frobenius norm
# of any of its prefixes (checked exhaustively at small scale in the test-suite).
PREFIX_SLACK = 16.0


def _dfs_words(q: int, alphabet: str, X: float, max_len: int, max_exp: int):
    """Regular words with N <= X whose first letter is minimal among their letters."""
    fams = _letter_families(q, alphabet)
    bound = PREFIX_SLACK * X
    truncated = False

    def letters_from(fam):
        flag, base, parab = fam
        if not parab:
            yield Letter(flag, base, 1)
            return
        e = 1
        while True:
            yield Letter(flag, base, e)
            e += 1

    out = []

    def rec(prefix, mat):
        nonlocal truncated
        first = prefix[0]
        last = prefix[-1]
        # close the word
        if _pair_ok(q, alphabet, last, first):
            tr = mat[0] + mat[3]
            det = -1 if sum(l.qflag for l in prefix) % 2 else 1
            hyperbolic = abs(tr) > 2 + 1e-12 if det == 1 else abs(tr) > 1e-12
            if hyperbolic:
                N = spectral_norm_from_trace(tr, det)
                if N <= X:
                    out.append(tuple(prefix))
        if len(prefix) >= max_len:
            truncated = True
            return
        for fam in fams:
            if fam[:2] < (first.qflag, first.base):
                continue
            prev_val = None
            for l in letters_from(fam):
                if l < first:
                    continue
                if l.exp > max_exp:
                    truncated = True
                    break
                if not _pair_ok(q, alphabet, last, l):
                    break
                p = _mul(mat, _letter_float(q, l))
                val = _frob2(p)
                if val > bound:
                    if prev_val is not None and val >= prev_val:
                        break
                    if not fam[2]:
                        break
                    prev_val = val
                    continue
                prev_val = val
                prefix.append(l)
                rec(prefix, p)
                prefix.pop()

    for fam in fams:
        prev_val = None
        for l in letters_from(fam):
            if l.exp > max_exp:
                truncated = True
                break
            p = _letter_float(q, l)
            val = _frob2(p)
            if val > bound:
                if prev_val is not None and val >= prev_val:
                    break
                if not fam[2]:
                    break
                prev_val = val
                continue
            prev_val = val
            rec([l], p)
    return out, truncated


def enumerate_conj_classes(
    q: int,
    group_tag: str,
    X: float,
    max_len: int = 200,
    max_exp: int = 10**6,
    primitive_only: bool = False,
) -> list[ConjClassRecord]:
    """Hyperbolic conjugacy classes with N <= X, sorted by (N, canonical word).

    Gamma classes come from regular Gen_G words, Gamma_tilde classes from regular
    Gen_{G^Q} words (for even q this includes the boundary family built from
    g_m and Qg_m, flagged via ``boundary``).
    """
    if X <= 1:
        raise DomainError("norm cutoff must exceed 1")
    if group_tag not in GROUP_TAGS:
        raise DomainError(f"unknown group tag {group_tag!r}")
    alphabet = "G" if group_tag == "Gamma" else "GQ"
    words, truncated = _dfs_words(q, alphabet, X, max_len, max_exp)
    if truncated:
        warnings.warn(
            f"class enumeration for q={q} hit the length/exponent caps; the list may be incomplete",
            TruncationWarning,
            stacklevel=2,
        )
    seen = {}
    for letters in words:
        w = Word(q, letters)
        canon, n = _canonical_letters(w, group_tag)
        if canon in seen:
            continue
        cw = Word(q, canon)
        seen[canon] = ConjClassRecord(
            canonical_word=cw,
            group_tag=group_tag,
            N=cw.N,
            ell=len(cw),
            n=n,
            det=cw.det,
            eps=cw.eps,
            kcount=cw.kcount,
            boundary=group_tag == "Gamma_tilde" and is_boundary_word(cw),
        )
    recs = [r for r in seen.values() if not primitive_only or r.n == 1]
    recs.sort(key=lambda r: (r.N, r.key))
    return recs


def translate_coding(seq, q: int | None = None) -> tuple[Word, int]:
    """Translate a Gen_G word into a Gen_{G^Q} word for odd q.

    Returns (word, delta) with product(word) = product(seq) * Q^delta.
    """
    w = _as_word(seq, q)
    q = w.q
    if q % 2 == 0:
        raise DomainError("coding translation is only defined for odd q")
    for letter in w.letters:
        _check_letter(q, letter, "G")
    m = (q + 1) // 2
    pending = 0
    out = []
    for letter in w.letters:
        k = q - letter.base if pending else letter.base
        if k >= m:
            out.append(Letter(False, k, letter.exp))
        else:
            out.append(Letter(True, q - k, letter.exp))
            pending ^= 1
    return Word(q, tuple(out)), pending
