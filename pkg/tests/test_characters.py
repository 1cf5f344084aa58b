from fractions import Fraction
from itertools import product

import pytest

from negmoments.characters import (
    avg_chi_nonsquare,
    avg_chi_square,
    char_table,
    chi_D,
    is_square,
    jacobi_symbol,
    legendre,
    square_average_limit,
    prime_sums,
    residue_symbol,
)
from negmoments.enumeration import FamilySpec, irreducibles, iterate
from negmoments.fq import MonicPoly, factorize, pmul


def P(q, *c):
    return MonicPoly(q, c)


def all_polys(q, maxdeg, monic=False):
    out = [()] if not monic else []
    for n in range(maxdeg + 1):
        leads = [1] if monic else range(1, q)
        for low in product(range(q), repeat=n):
            for lc in leads:
                out.append(low + (lc,))
    return out


def by_factorization(f, Q, q):
    val = 1
    for p, e in factorize(MonicPoly(q, Q)).factors:
        val *= residue_symbol(f, p) ** e
    return val


def test_examples():
    x, x1 = P(3, 0, 1), P(3, 1, 1)
    assert residue_symbol(x, x1) == -1
    assert jacobi_symbol(x, x1) == -1
    assert residue_symbol(pmul(x1.coeffs, (0, 1), 3), x1) == 0
    f = (2, 1)
    assert residue_symbol(pmul(f, f, 3), P(3, 1, 0, 1)) == 1
    assert jacobi_symbol((0, 1), (0, 1, 1), 3) == 0
    assert chi_D(P(3, 2, 0, 1, 1), MonicPoly.one(3)) == 1
    assert chi_D(P(3, 0, 2, 0, 1), x) == 0


def test_legendre():
    assert [legendre(a, 5) for a in range(5)] == [0, 1, -1, -1, 1]
    assert [legendre(a, 3) for a in range(3)] == [0, 1, -1]


def test_unknown_modulus_rejected():
    with pytest.raises(ValueError):
        residue_symbol((0, 1), P(3, 0, 0, 1))
    with pytest.raises(ValueError):
        jacobi_symbol((1,), (1, 2), 3)


@pytest.mark.parametrize("q", [3, 5])
def test_jacobi_matches_factorization_definition(q):
    mods = [m for m in all_polys(q, 3, monic=True) if len(m) > 1]
    tops = all_polys(q, 3 if q == 3 else 2)
    for Q in mods:
        for f in tops:
            assert jacobi_symbol(f, Q, q) == by_factorization(f, Q, q), (f, Q)


def test_top_argument_multiplicative_q3():
    tops = all_polys(3, 2)
    for Q in all_polys(3, 3, monic=True):
        for f in tops:
            for g in tops:
                fg = pmul(f, g, 3)
                assert jacobi_symbol(fg, Q, 3) == jacobi_symbol(f, Q, 3) * jacobi_symbol(g, Q, 3)


def test_chi_D_multiplicative():
    monic = [MonicPoly(3, m) for m in all_polys(3, 2, monic=True)]
    for D in iterate(FamilySpec(3, 3, "squarefree")):
        for f in monic:
            for g in monic:
                assert chi_D(D, f * g) == chi_D(D, f) * chi_D(D, g)


def test_char_table_agrees_with_residue_symbol():
    for q in (3, 5):
        for d in (1, 2):
            for c in irreducibles(q, d):
                p = MonicPoly(q, c)
                table = char_table(c, q)
                for code in range(q**d):
                    digits = tuple((code // q**i) % q for i in range(d))
                    assert table[code] == residue_symbol(digits, p, check=False)


def test_prime_sums_match_scalar_symbols():
    q, n = 3, 5
    sums = prime_sums(q, n, 2, 0, q**n)
    for i, D in enumerate(iterate(FamilySpec(q, n))):
        for d in (1, 2):
            primes = irreducibles(q, d)
            chi = sum(jacobi_symbol(D.coeffs, p, q) for p in primes)
            cop = sum(jacobi_symbol(D.coeffs, p, q) ** 2 for p in primes)
            assert sums.chi[i, d - 1] == chi and sums.coprime[i, d - 1] == cop


def test_square_averages():
    x = P(3, 0, 1)
    assert avg_chi_square(3, 1, MonicPoly.one(3)) == 1
    vals = [avg_chi_square(3, g, x) for g in (1, 2, 3)]
    assert square_average_limit(x) == Fraction(3, 4)
    gaps = [abs(v - Fraction(3, 4)) for v in vals]
    assert gaps[0] > gaps[1] > gaps[2]
    assert square_average_limit(P(5, 0, 1)) == Fraction(5, 6)
    assert abs(avg_chi_square(5, 1, P(5, 0, 1)) - Fraction(5, 6)) < Fraction(1, 25)


def test_nonsquare_averages():
    x = P(3, 0, 1)
    for g in (1, 2):
        assert abs(avg_chi_nonsquare(3, g, x)) * 3**g <= 1
    p = P(3, 1, 0, 1)
    assert abs(avg_chi_nonsquare(3, 2, p)) < 1
    with pytest.raises(ValueError):
        avg_chi_nonsquare(3, 1, x * x)
    assert is_square(x * x) and not is_square(x)
