import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heckezeta.errors import AlphabetError, DomainError
from heckezeta.hecke_core import make_group
from heckezeta.oracles import brute_force_classes
from heckezeta.symbolic_words import (
    Letter,
    Word,
    b_set_tags,
    canonical_class,
    enumerate_conj_classes,
    enumerate_regular_words,
    eps_and_k,
    is_reduced,
    is_regular,
    translate_coding,
)


def W(q, *letters):
    return Word(q, tuple(Letter(*l) for l in letters))


@pytest.mark.parametrize("q", [3, 4, 5, 6])
def test_forbidden_parabolic_pairs(q):
    p = q - 1
    assert not is_reduced(W(q, (False, p, 2), (False, p, 3)), "GQ")
    assert not is_reduced(W(q, (True, p, 2), (False, p, 3)), "GQ")
    assert is_reduced(W(q, (False, p, 2), (True, p, 3)), "GQ")


def test_regularity_examples():
    assert is_regular(W(3, (False, 1, 1), (False, 2, 1)), "G")
    assert not is_regular(W(5, (False, 4, 3)), "GQ")
    assert is_regular(W(5, (True, 4, 3)), "GQ")


def test_eps_and_k():
    assert eps_and_k(W(5, (True, 2, 1), (False, 4, 1)))[0] == 1
    assert eps_and_k(W(4, (False, 2, 1), (True, 2, 1))) == (1, 2)
    assert eps_and_k(W(6, (False, 5, 3), (True, 5, 5))) == (1, 0)


def test_alphabet_mismatch():
    with pytest.raises(AlphabetError):
        is_reduced(W(5, (True, 3, 1)), "G")


def test_doubled_word_period():
    p = W(5, (False, 3, 1), (True, 4, 2))
    rec = canonical_class(p + p, "Gamma_tilde")
    assert rec.n == 2
    assert rec.ell == 2 * len(p)


def test_length_one_words_q3():
    got = {w.label(): tags for w, tags in enumerate_regular_words(3, "GQ", 1, max_exp=2)}
    assert set(got) == {"g2", "g2^2", "Qg2", "Qg2^2"}
    assert all(3 in t for t in got.values())
    assert {k for k, t in got.items() if 1 in t} == {"Qg2", "Qg2^2"}


def test_length_one_words_q5():
    got = {w.label() for w, _ in enumerate_regular_words(5, "GQ", 1, max_exp=1)}
    assert got == {"g3", "Qg3", "g4", "Qg4"}


def test_smallest_q3_class():
    recs = enumerate_conj_classes(3, "Gamma", 7.0, primitive_only=True)
    assert len(recs) == 1
    assert recs[0].N == pytest.approx(6.854102, abs=1e-6)
    rot = canonical_class(W(3, (False, 2, 1), (False, 1, 1)), "Gamma")
    assert rot.key == recs[0].key


def test_cutoff_must_exceed_one():
    with pytest.raises(DomainError):
        enumerate_conj_classes(4, "Gamma", 1.0)


def test_translation_q5_single_letter():
    w, delta = translate_coding(W(5, (False, 2, 1)))
    assert w.label() == "Qg3"
    assert delta == 1
    G = make_group(5)
    lhs = (G.Q * G.g[3] * G.Q).as_array()
    assert np.allclose(lhs, G.g[2].as_array()) or np.allclose(lhs, -G.g[2].as_array())


def test_translation_keeps_upper_letters():
    w = W(5, (False, 3, 1), (False, 4, 2))
    out, delta = translate_coding(w)
    assert out == w and delta == 0


def test_translation_needs_odd_q():
    with pytest.raises(DomainError):
        translate_coding(W(4, (False, 2, 1)))


def _letter(q, qflag, base, exp):
    # only the parabolic bases carry exponents
    return (qflag, base, exp if base in (1, q - 1) else 1)


g_letters_q5 = st.lists(
    st.builds(lambda b, e: _letter(5, False, b, e), st.integers(1, 4), st.integers(1, 2)), min_size=1, max_size=5
)


@given(g_letters_q5)
def test_translation_preserves_product(letters):
    q = 5
    G = make_group(q)
    w = W(q, *letters)
    out, delta = translate_coding(w)
    lhs = w.element
    rhs = out.element * (G.Q if delta else G.identity)
    a, b = lhs.as_array(), rhs.as_array()
    assert np.allclose(a, b) or np.allclose(a, -b)


gq_letters_q5 = st.lists(
    st.builds(lambda f, b, e: _letter(5, f, b, e), st.booleans(), st.integers(3, 4), st.integers(1, 2)), min_size=1, max_size=5
)


@given(gq_letters_q5, st.integers(0, 4))
def test_canonical_class_rotation_invariant(letters, shift):
    w = W(5, *letters)
    if not is_regular(w, "GQ"):
        return
    shift %= len(letters)
    rot = W(5, *(letters[shift:] + letters[:shift]))
    a, b = canonical_class(w, "Gamma_tilde"), canonical_class(rot, "Gamma_tilde")
    assert a.key == b.key
    assert a.N == pytest.approx(w.N, rel=1e-10)


@given(gq_letters_q5)
def test_b_sets_cover_each_word_twice_at_most(letters):
    tags = b_set_tags(W(5, *letters))
    assert (3 in tags) != (4 in tags)
    assert tags <= {1, 2, 3, 4}


@pytest.mark.parametrize("q,tag,X", [(3, "Gamma", 60.0), (4, "Gamma_tilde", 40.0), (5, "Gamma", 30.0)])
def test_classes_match_matrix_ball(q, tag, X):
    ours = sorted((round(r.N, 8), r.det) for r in enumerate_conj_classes(q, tag, X))
    oracle = sorted((round(N, 8), d) for N, d in brute_force_classes(q, tag, X))
    assert ours == oracle
