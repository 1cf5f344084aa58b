import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from negmoments.enumeration import (
    FamilySpec,
    family_count,
    from_lex_index,
    irreducibles,
    iterate,
    lex_index,
    mobius_int,
    multiplicative_table,
    prime_count,
    split_ranges,
)
from negmoments.fq import arith_fn, factorize, is_irreducible, is_squarefree


def test_examples():
    assert len(list(iterate(FamilySpec(3, 2)))) == 9
    assert len(list(iterate(FamilySpec(3, 3, "squarefree")))) == 18
    assert [p.coeffs for p in iterate(FamilySpec(3, 2, "irreducible"))] == [(1, 0, 1), (2, 1, 1), (2, 2, 1)]
    assert prime_count(3, 2) == 3 and prime_count(3, 3) == 8 and prime_count(5, 1) == 5


def test_degree_one_squarefree_count():
    # every linear monic is square-free
    assert family_count(FamilySpec(3, 1, "squarefree")) == 3
    assert len(list(iterate(FamilySpec(3, 1, "squarefree")))) == 3


@pytest.mark.parametrize("q", [3, 5, 7])
def test_stream_lengths(q):
    for n in range(0, 9):
        if q**n > 200_000:
            break
        for kind in ("monic", "squarefree", "irreducible"):
            spec = FamilySpec(q, n, kind)
            members = list(iterate(spec))
            assert len(members) == family_count(spec), (q, n, kind)


def test_members_pass_their_tests():
    for f in iterate(FamilySpec(5, 4, "squarefree")):
        assert is_squarefree(f.coeffs, 5)
    for p in iterate(FamilySpec(5, 3, "irreducible")):
        assert len(factorize(p).factors) == 1 and factorize(p).exponents == [1]


def test_lex_order():
    polys = [f.coeffs[:-1] for f in iterate(FamilySpec(3, 3))]
    assert polys == sorted(polys)
    for i, f in enumerate(iterate(FamilySpec(3, 3))):
        assert lex_index(f.coeffs, 3) == i and from_lex_index(i, 3, 3) == f


def test_prime_count_vs_ppt():
    for q in (3, 5, 7):
        for n in range(1, 13):
            c = prime_count(q, n)
            assert abs(c - q**n / n) <= 3 * q ** (n / 2) / n
            assert c == sum(mobius_int(d) * q ** (n // d) for d in range(1, n + 1) if n % d == 0) // n
        for n in range(1, 6):
            assert prime_count(q, n) == len(irreducibles(q, n)) == sum(1 for _ in (p for p in iterate(FamilySpec(q, n)) if is_irreducible(p.coeffs, q)))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 5]), st.integers(1, 5), st.integers(1, 7), st.sampled_from(["monic", "squarefree", "irreducible"]))
def test_range_split_visits_same_members(q, n, parts, kind):
    spec = FamilySpec(q, n, kind)
    whole = list(iterate(spec))
    pieces = []
    for lo, hi in split_ranges(q**n, parts):
        pieces.extend(iterate(spec, lo, hi))
    assert pieces == whole


def test_multiplicative_table_matches_factorization():
    for q, n in [(3, 5), (5, 3), (3, 6)]:
        tau = multiplicative_table(q, n, lambda d, e: 2 * e + 1, dtype=np.int64)
        mu = multiplicative_table(q, n, lambda d, e: -1 if e == 1 else 0, dtype=np.int64)
        for i, f in enumerate(iterate(FamilySpec(q, n))):
            a = arith_fn(f)
            assert tau[i] == a.tau_of_square and mu[i] == a.mu
