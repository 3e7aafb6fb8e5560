from itertools import combinations
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from nicolai.errors import DomainError, SiteRangeError
from nicolai.fock import (FockState, MonomialTerm, SignedState, SuperchargeSpec, adjoint,
                          annihilate, apply_letter, apply_supercharge, apply_term, basis_states,
                          check_nilpotent, create, nicolai_supercharge, operator_matrix,
                          z2_supercharge)

import oracles


def S(n, *sites):
    return FockState.from_sites(n, sites)


def T(*letters):
    return MonomialTerm(tuple(letters))


def words_of(Q):
    return [(t.coefficient, [(l.kind.value, l.site) for l in t.letters]) for t in Q.terms]


def test_basis_states_small():
    assert basis_states(3, 0) == [S(3)]
    assert basis_states(3, 2) == [S(3, 1, 2), S(3, 1, 3), S(3, 2, 3)]


def test_basis_states_count():
    assert len(basis_states(17, 8)) == comb(17, 8) == 24310


@pytest.mark.parametrize("n", range(0, 9))
def test_basis_states_partition(n):
    seen = []
    for d in range(n + 1):
        states = basis_states(n, d)
        assert len(states) == comb(n, d)
        masks = [s.occupation for s in states]
        assert masks == sorted(masks) and len(set(masks)) == len(masks)
        assert all(s.degree == d for s in states)
        seen += masks
    assert sorted(seen) == list(range(2 ** n))


def test_basis_states_range():
    with pytest.raises(SiteRangeError):
        basis_states(3, 4)
    with pytest.raises(SiteRangeError):
        basis_states(3, -1)


def test_fock_state_validation():
    with pytest.raises(SiteRangeError):
        FockState(0b1000, 3)
    with pytest.raises(SiteRangeError):
        S(3, 4)
    assert S(5, 1, 3) == FockState(0b101, 5)
    assert S(5, 1, 3) != FockState(0b101, 6)
    assert S(5, 2, 4).site_list() == [2, 4]
    assert str(S(4, 1, 2)) == "{1,2}"


def test_apply_letter_examples():
    assert apply_letter(annihilate(2), S(3, 1, 2)) == SignedState(-1, S(3, 1))
    assert apply_letter(annihilate(2), S(3, 1, 3)) is None
    assert apply_letter(create(2), S(3, 1, 3)) == SignedState(-1, S(3, 1, 2, 3))


def test_apply_letter_out_of_range():
    with pytest.raises(SiteRangeError):
        apply_letter(create(4), S(3))


def test_apply_term_examples():
    assert apply_term(T(annihilate(1), create(2), annihilate(3)), S(3, 1, 3)) == (1, S(3, 2))
    assert apply_term(T(annihilate(1), annihilate(2), annihilate(3)), S(3, 1, 2, 3)) == (-1, S(3))
    assert apply_term(T(annihilate(1), create(2), annihilate(3)), S(3, 1, 2)) is None


def test_apply_term_matches_symbolic_oracle():
    n = 5
    terms = [T(annihilate(1), create(2), annihilate(3)), T(annihilate(2), annihilate(3), annihilate(4)),
             T(create(5), annihilate(1), create(3)), T(create(4), create(2))]
    for term in terms:
        word = [(l.kind.value, l.site) for l in term.letters]
        for d in range(n + 1):
            for mono in combinations(range(1, n + 1), d):
                got = apply_term(term, S(n, *mono))
                want = oracles.act_word(word, mono)
                if want is None:
                    assert got is None
                else:
                    assert got == (want[0], S(n, *want[1]))


def test_apply_supercharge_examples():
    assert apply_supercharge(nicolai_supercharge(1), S(3, 1, 3)) == [(1, S(3, 2))]
    assert apply_supercharge(nicolai_supercharge(1), S(3, 1, 2, 3)) == []
    assert apply_supercharge(z2_supercharge(4), S(4, 1, 2, 3)) == [(-1, S(4))]


def test_apply_supercharge_combines_like_terms():
    Q = SuperchargeSpec(3, (T(annihilate(1)), MonomialTerm((annihilate(1),), -1)), -1)
    assert apply_supercharge(Q, S(3, 1, 2)) == []


def test_nicolai_supercharge_shape():
    q1 = nicolai_supercharge(1)
    assert q1.sites == 3 and q1.degree == -1
    assert q1.terms == (T(annihilate(1), create(2), annihilate(3)),)
    q2 = nicolai_supercharge(2)
    assert q2.sites == 5
    assert q2.terms == (T(annihilate(1), create(2), annihilate(3)),
                        T(annihilate(3), create(4), annihilate(5)))
    q3 = nicolai_supercharge(3)
    assert (q3.sites, len(q3.terms), q3.degree) == (7, 3, -1)
    with pytest.raises(DomainError):
        nicolai_supercharge(0)


def test_z2_supercharge_shape():
    assert z2_supercharge(3).terms == (T(annihilate(1), annihilate(2), annihilate(3)),)
    assert len(z2_supercharge(5).terms) == 3
    assert z2_supercharge(2).terms == ()
    assert z2_supercharge(5).degree == -3
    with pytest.raises(DomainError):
        z2_supercharge(-1)


def test_adjoint_examples():
    a = adjoint(nicolai_supercharge(1))
    assert a.terms == (T(create(3), annihilate(2), create(1)),)
    assert a.degree == 1
    assert adjoint(z2_supercharge(3)).terms == (T(create(3), create(2), create(1)),)
    q = nicolai_supercharge(2)
    assert adjoint(adjoint(q)) == q


@pytest.mark.parametrize("Q", [nicolai_supercharge(2), z2_supercharge(5)])
def test_adjoint_is_transpose(Q):
    # <Q† x, y> = <x, Q y> in the orthonormal monomial basis
    assert (operator_matrix(adjoint(Q)) != operator_matrix(Q).T).nnz == 0


def test_mixed_degrees_rejected():
    with pytest.raises(DomainError):
        SuperchargeSpec(3, (T(annihilate(1)), T(annihilate(1), annihilate(2))), -1)


def test_duplicate_letters_rejected():
    with pytest.raises(DomainError):
        T(annihilate(1), annihilate(1))


def test_check_nilpotent_builtins():
    assert check_nilpotent(nicolai_supercharge(3))
    assert check_nilpotent(z2_supercharge(8))


def test_check_nilpotent_detects_failure():
    # c1 c2† c3 + c2 c3† c4 does not square to zero
    bad = SuperchargeSpec(4, (T(annihilate(1), create(2), annihilate(3)),
                              T(annihilate(2), create(3), annihilate(4))), -1)
    assert oracles.squares_to_zero(words_of(bad), 4) is False
    assert check_nilpotent(bad) is False


def test_check_nilpotent_overlapping_cubic_pattern():
    # every cross product repeats c1, so this one is in fact nilpotent
    q = SuperchargeSpec(4, (T(annihilate(1), annihilate(2), annihilate(3)),
                            T(annihilate(1), annihilate(3), annihilate(4))), -3)
    assert oracles.squares_to_zero(words_of(q), 4) is True
    assert check_nilpotent(q) is True


@pytest.mark.parametrize("n", range(1, 7))
def test_letters_square_to_zero(n):
    for j in range(1, n + 1):
        for letter in (annihilate(j), create(j)):
            for mask in range(2 ** n):
                first = apply_letter(letter, FockState(mask, n))
                if first is not None:
                    assert apply_letter(letter, first.state) is None


def _compose(first, second, s):
    """second . first applied to s, as {mask: coeff}."""
    out = {}
    a = apply_letter(first, s)
    if a is not None:
        b = apply_letter(second, a.state)
        if b is not None:
            out[b.state.occupation] = a.sign * b.sign
    return out


@pytest.mark.parametrize("n", range(1, 7))
def test_canonical_anticommutators(n):
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for mask in range(2 ** n):
                s = FockState(mask, n)
                acc = {}
                for k, v in _compose(create(j), annihilate(i), s).items():
                    acc[k] = acc.get(k, 0) + v
                for k, v in _compose(annihilate(i), create(j), s).items():
                    acc[k] = acc.get(k, 0) + v
                acc = {k: v for k, v in acc.items() if v}
                assert acc == ({mask: 1} if i == j else {})


@given(st.integers(1, 6).flatmap(lambda m: st.tuples(st.just(m), st.integers(0, 2 ** (2 * m + 1) - 1))))
def test_nicolai_lowers_degree_by_one(args):
    m, mask = args
    s = FockState(mask, 2 * m + 1)
    for _, t in apply_supercharge(nicolai_supercharge(m), s):
        assert t.degree == s.degree - 1


@given(st.integers(3, 12).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, 2 ** n - 1))))
def test_z2_lowers_degree_by_three(args):
    n, mask = args
    s = FockState(mask, n)
    for _, t in apply_supercharge(z2_supercharge(n), s):
        assert t.degree == s.degree - 3


@settings(deadline=None, max_examples=30)
@given(st.integers(1, 5), st.integers(0, 2 ** 11 - 1))
def test_apply_supercharge_matches_symbolic_oracle(m, mask):
    n = 2 * m + 1
    mask &= (1 << n) - 1
    s = FockState(mask, n)
    got = {t.occupation: c for c, t in apply_supercharge(nicolai_supercharge(m), s)}
    want = oracles.act_sum(oracles.nicolai_words(m), tuple(s.site_list()))
    assert got == {S(n, *k).occupation: v for k, v in want.items()}


def test_nilpotent_all_builtins_to_twenty():
    for m in range(1, 10):
        assert check_nilpotent(nicolai_supercharge(m))
    for n in range(0, 21):
        assert check_nilpotent(z2_supercharge(n))
