import math

import pytest

from negmoments.euler import a_const, zeta_q
from negmoments.lfunction import ShiftSpec, family_coeffs
from negmoments.moments import (
    asymptotic_rhs,
    compare_scan,
    family_moment,
    log_slope,
    moment_result,
    negative_moment,
    regime_classify,
    threshold_beta,
)


@pytest.fixture(scope="module")
def fam32():
    return family_coeffs(3, 2)


def test_k_zero_is_one():
    for q, g in [(3, 1), (3, 2), (5, 1)]:
        assert negative_moment(q, g, ShiftSpec(0.5, 0.0, 0)) == 1.0


def test_regression_baseline():
    assert negative_moment(3, 1, ShiftSpec(0.5, 0.0, 1)) == 0.9571428571428571


def test_large_beta(fam32):
    for beta in (10.0, 15.0):
        m = family_moment(fam32, ShiftSpec(beta, 0.0, 1))
        assert abs(m - 1) <= 10 * 3 ** -(0.5 + beta)
    assert abs(family_moment(fam32, ShiftSpec(10.0, 0.0, 2)) - 1) < 1e-3


def test_even_k_abs_identity(fam32):
    for k in (2, 4):
        for beta in (0.1, 0.6):
            s = ShiftSpec(beta, 0.0, k)
            assert family_moment(fam32, s) == family_moment(fam32, s, use_abs=True)


def test_threads_bit_identical():
    fam = family_coeffs(3, 3)
    for s in (ShiftSpec(0.2, 0.0, 1.5), ShiftSpec(0.3, 0.8, 2)):
        assert family_moment(fam, s, threads=1) == family_moment(fam, s, threads=4)


def test_asymptotic_rhs_examples():
    assert asymptotic_rhs(3, 1, 0.2) == 1.0
    assert asymptotic_rhs(5, 2, 0.4) == zeta_q(1.8, 5) * a_const(2, 0.4, 40, 5).value


def test_threshold_examples():
    assert threshold_beta(1, 100, 0) == pytest.approx(2 * math.log(100) / 800)
    assert threshold_beta(1, 100, 0) == pytest.approx(0.01151, abs=1e-5)
    assert threshold_beta(1, 100, 0.1) < threshold_beta(2, 100, 0.1) < threshold_beta(3, 100, 0.1)
    assert threshold_beta(2, 10**6, 0.1) < threshold_beta(2, 10**3, 0.1)


def test_regime_examples():
    g = 10**4
    assert regime_classify(g, g**-0.5, 1, 0.01) == "asymptotic"
    assert regime_classify(g, g**-2.0, 1, 0.01) == "third"
    assert regime_classify(g, 1 / g, 1, 0.01) == "second"
    assert regime_classify(g, 1 / g, 0.5, 0.01) == "second"
    assert regime_classify(g, 1 / g**0.8, 1.5, 0.01) in ("asymptotic", "improved")
    with pytest.raises(ValueError):
        regime_classify(1, 0.5, 1, 0.1)


def test_moment_result_rows(fam32):
    r = moment_result(fam32, ShiftSpec(0.4, 0.0, 1))
    assert r.rhs_prediction == 1.0 and r.rel_error == abs(r.moment - 1)
    assert r.family_size == 3**4 * 2
    r = moment_result(fam32, ShiftSpec(0.4, 0.5, 1))
    assert math.isnan(r.rhs_prediction)
    r = moment_result(fam32, ShiftSpec(0.4, 0.0, 1.5))
    assert math.isnan(r.rel_error)


def test_compare_scan(tmp_path):
    rows = compare_scan(3, 2, 2, [0.3, 0.6, 0.9], cache_dir=tmp_path)
    assert [r.shift.beta for r in rows] == [0.3, 0.6, 0.9]
    assert all(r.family_size == 162 for r in rows)
    assert set(rows[0].row()) == {"q", "g", "k", "beta", "t", "family_size", "moment", "rhs", "rel_error", "regime"}


def test_log_slope():
    xs = [1, 2, 4, 8]
    assert log_slope(xs, [x**-2 for x in xs]) == pytest.approx(-2)
