import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from qpentagon.qnumeric import (LI2_ONE, BoundsReport, DomainError, NumericError,
                                PreconditionError, QParams, bracket_x0, check_h_bound,
                                check_sandwich_e13, check_sandwich_e14,
                                check_sum_integral, e7_numeric, find_n0, find_x0,
                                h_integral, h_sum, inv_phi_series, li2, ln_g,
                                ln_g_integers, ln_I_g, ln_phi, ln_phi_tail_bound,
                                ln_S_g, log_derivative_g, phi_series, qbinomial_rhs,
                                qpoch_float, scaled_log_g_deviation, verify_qbinomial)

# reference values computed with mpmath at 40 digits
MP_LI2 = {0.3: 0.3261295100754760695300357, 0.9: 1.29971472300495872517106,
          0.999: 1.637022605276117742695799}
MP_LN_PHI_HALF_HALF = 1.242062094812414945797845
MP_LN_PHI_099_09 = 130.4793542869372706222949
MP_LN_G_09_5 = -6.580081112639886697703166


def _direct_ln_phi(x, q):
    # plain loop, no vectorization or tail bound
    s, n = 0.0, 0
    while True:
        t = -math.log(1 - x * q ** n)
        s += t
        if t < 1e-20:
            return s
        n += 1


# ---------------------------------------------------------------- li2

def test_li2_zero():
    assert li2(0.0) == 0.0


def test_li2_one_partial_sum_oracle():
    N = 200_000
    partial = math.fsum(1.0 / n ** 2 for n in range(1, N + 1))
    # tail lies between 1/(N+1) and 1/N
    assert partial + 1 / (N + 1) <= li2(1.0) + 1e-15
    assert li2(1.0) <= partial + 1 / N + 1e-15


def test_li2_half_closed_form():
    assert li2(0.5) == pytest.approx(math.pi ** 2 / 12 - math.log(2) ** 2 / 2, abs=1e-15)


@pytest.mark.parametrize("x", sorted(MP_LI2))
def test_li2_reference_values(x):
    assert abs(li2(x) - MP_LI2[x]) <= 1e-15 * (1 + MP_LI2[x])


def test_li2_domain():
    with pytest.raises(DomainError):
        li2(1.5)
    with pytest.raises(DomainError):
        li2(-0.1)


@settings(max_examples=200)
@given(st.floats(min_value=1e-6, max_value=1 - 1e-6))
def test_li2_reflection_property(x):
    lhs = li2(x) + li2(1 - x)
    rhs = LI2_ONE - math.log(x) * math.log(1 - x)
    assert abs(lhs - rhs) <= 1e-13


# ---------------------------------------------------------------- ln phi

def test_ln_phi_zero():
    assert ln_phi(0.0, QParams(0.7)) == 0.0


def test_ln_phi_direct_oracle():
    p = QParams(0.5)
    assert ln_phi(0.5, p) == pytest.approx(_direct_ln_phi(0.5, 0.5), abs=1e-15)
    assert ln_phi(0.5, p) == pytest.approx(MP_LN_PHI_HALF_HALF, abs=1e-15)


def test_ln_phi_near_one():
    p = QParams(0.99)
    assert ln_phi(0.9, p) == pytest.approx(MP_LN_PHI_099_09, rel=1e-13)
    assert ln_phi_tail_bound(p) == pytest.approx(1e-18 * 0.99 / 0.01)


def test_ln_phi_domain():
    with pytest.raises(DomainError):
        ln_phi(1.0, QParams(0.5))


@pytest.mark.parametrize("q", [0.1, 0.5, 0.9, 0.99, 0.999])
@pytest.mark.parametrize("x", [1e-8, 0.1, 0.5, 0.9, 0.999])
def test_ln_phi_functional_equation(q, x):
    p = QParams(q)
    assert abs(ln_phi(x, p) - ln_phi(x * q, p) + math.log1p(-x)) <= 1e-12 * max(1.0, ln_phi(x, p))


@pytest.mark.parametrize("q", [0.2, 0.5, 0.8, 0.95])
@pytest.mark.parametrize("x", [0.05, 0.4, 0.8])
def test_expansions_converge_to_phi(q, x):
    p = QParams(q)
    lp = ln_phi(x, p)
    assert phi_series(x, p) == pytest.approx(lp, rel=1e-9, abs=1e-12)
    if q <= 0.8:
        assert inv_phi_series(x, p) == pytest.approx(math.exp(-lp), rel=1e-9)


# ---------------------------------------------------------------- sandwiches

@pytest.mark.parametrize("q,x", [(0.5, 0.5), (0.99, 0.9), (0.999, 0.3), (0.3, 1e-6)])
def test_sandwich_e13(q, x):
    r = check_sandwich_e13(x, QParams(q))
    assert r.passed and r.strict
    if q == 0.99:
        assert 0 <= r.value <= -math.log(0.1)


def test_sandwich_e13_degenerates_at_zero():
    r = check_sandwich_e13(1e-12, QParams(0.5))
    assert max(abs(r.lower), abs(r.value), abs(r.upper)) < 1e-11


def test_sum_integral_phi_example():
    q, x = 0.5, 0.5
    f = lambda t: -math.log1p(-(q ** t) * x)
    r = check_sum_integral(f)
    assert r.passed and r.strict
    assert r.upper == pytest.approx(ln_phi(x, QParams(q)), abs=1e-14)
    assert r.value == pytest.approx(-li2(x) / math.log(q), rel=1e-10)


def test_sum_integral_zero_and_geometric():
    r = check_sum_integral(lambda t: 0.0, decreasing=True)
    assert r.lower == r.value == r.upper == 0.0
    r = check_sum_integral(lambda t: 2.0 ** -t)
    assert r.upper == pytest.approx(2.0, abs=1e-15)
    assert r.value == pytest.approx(1 / math.log(2), rel=1e-12)
    assert 0 <= r.upper - r.value <= 1


def test_sum_integral_finite_ranges():
    r = check_sum_integral(lambda t: t * t, 1, 5)
    # increasing: sum_1^5 <= int_1^6 <= sum_2^6
    assert r.lower == 55 and r.upper == 90
    assert r.value == pytest.approx((216 - 1) / 3)
    assert r.strict
    r = check_sum_integral(lambda t: math.exp(-t), 0, 10)
    assert r.strict


def test_sum_integral_errors():
    with pytest.raises(NumericError):
        check_sum_integral(lambda t: math.inf, 0, 3)
    with pytest.raises(DomainError):
        check_sum_integral(lambda t: t, 0, math.inf, decreasing=False)


def test_bounds_report_failure_reported():
    r = BoundsReport(0.0, 2.0, 1.0, "broken")
    assert not r.passed and "FAIL" in str(r)


# ---------------------------------------------------------------- g

def test_ln_g_at_zero():
    p = QParams(0.8, 0.3, 0.6)
    assert ln_g(0, p) == pytest.approx(ln_phi(0.3, p) - ln_phi(0.8, p), abs=1e-14)


@pytest.mark.parametrize("n", [0, 1, 3, 10])
def test_ln_g_integer_matches_qbinomial_summand(n):
    q, a, z = 0.7, 0.4, 0.6
    p = QParams(q, a, z)
    summand = qpoch_float(a, q, n) / qpoch_float(q, q, n) * z ** n
    expected = ln_phi(a, p) - ln_phi(q, p) + math.log(summand)
    assert ln_g(n, p) == pytest.approx(expected, abs=1e-13)


def test_ln_g_reference():
    assert ln_g(5, QParams(0.9, 0.5, 0.5)) == pytest.approx(MP_LN_G_09_5, abs=1e-13)


def test_ln_g_recurrence_matches_direct():
    p = QParams(0.97, 0.3, 0.8)
    vals = ln_g_integers(p, 200)
    for n in (0, 1, 57, 199):
        assert vals[n] == pytest.approx(ln_g(n, p), abs=1e-11)


# ---------------------------------------------------------------- h and g'/g

def test_h_sum_above_integral():
    r = check_h_bound(0.0, QParams(0.95, 0.3, 0.5))
    assert r.passed and r.strict


def test_h_vanish_at_infinity():
    p = QParams(0.9, 0.5, 0.5)
    assert h_sum(800, p) < 1e-30 and h_integral(800, p) < 1e-30


def test_h_integral_against_quadrature():
    p = QParams(0.9, 0.5, 0.5)
    x = 1.0
    hx = lambda t: p.q ** (x + t) / ((1 - p.q ** (1 + x + t)) * (1 - p.a * p.q ** (x + t)))
    ref, _ = integrate.quad(hx, 0, math.inf, epsabs=0, epsrel=1e-13)
    assert h_integral(x, p) == pytest.approx(ref, abs=1e-10)


def test_h_integral_q_equals_a_limit():
    p = QParams(0.6, 0.6, 0.5)
    hx = lambda t: 0.6 ** t / ((1 - 0.6 ** (1 + t)) * (1 - 0.6 ** (1 + t)))
    ref, _ = integrate.quad(hx, 0, math.inf, epsabs=0, epsrel=1e-13)
    assert h_integral(0.0, p) == pytest.approx(ref, rel=1e-10)
    near = QParams(0.6, 0.6 - 1e-13, 0.5)
    assert h_integral(0.0, near) == pytest.approx(ref, rel=1e-8)


def test_h_sum_decreasing_in_x():
    p = QParams(0.95, 0.3, 0.5)
    vals = [h_sum(x, p) for x in [0, 0.5, 1, 2, 5, 10, 40]]
    assert all(b < a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("q,a,z,x", [(0.95, 0.5, 0.5, 2.0), (0.9, 0.2, 0.7, 0.3),
                                     (0.99, 0.5, 0.5, 40.0), (0.5, 0.5, 0.5, 1.0)])
def test_log_derivative_finite_difference(q, a, z, x):
    p = QParams(q, a, z)
    step = (1 + abs(x)) * 1e-5
    fd = (ln_g(x + step, p) - ln_g(x - step, p)) / (2 * step)
    assert log_derivative_g(x, p) == pytest.approx(fd, abs=1e-6)


def test_log_derivative_limits():
    p = QParams(0.95, 0.5, 0.5)
    assert log_derivative_g(2000, p) == pytest.approx(math.log(0.5), abs=1e-12)
    assert p.unimodal_ok
    d0 = log_derivative_g(0, p)
    assert d0 >= math.log(p.z * (1 - p.a) / (1 - p.q)) > 0


def test_find_x0_and_n0():
    p = QParams(1 - 2.0 ** -8, 0.5, 0.5)
    x0 = find_x0(p)
    guess = math.log(2 / 3) / math.log(p.q)
    assert abs(x0 / guess - 1) < 0.02
    assert abs(log_derivative_g(x0, p)) <= 1e-8
    n0 = find_n0(p, x0)
    assert n0 in (math.floor(x0), math.floor(x0) + 1)
    peak = ln_g(n0, p)
    assert all(peak >= ln_g(n, p) for n in range(n0 - 2, n0 + 3))


def test_x0_drift_shrinks():
    ratios = []
    for k in (6, 8, 10):
        p = QParams(1 - 2.0 ** -k, 0.5, 0.5)
        ratios.append(abs(find_x0(p) * math.log(p.q) / math.log(2 / 3) - 1))
    assert ratios[0] > ratios[1] > ratios[2]


def test_unimodal_precondition():
    p = QParams(0.7, 0.5, 0.5)
    assert not p.unimodal_ok
    with pytest.raises(PreconditionError):
        find_x0(p)
    with pytest.raises(PreconditionError):
        bracket_x0(p)


# ---------------------------------------------------------------- S(g), I(g)

def test_qbinomial_rewritten_form():
    p = QParams(0.5, 0.3, 0.7)
    expected = ln_phi(0.3, p) + ln_phi(0.7, p) - ln_phi(0.5, p) - ln_phi(0.21, p)
    assert ln_S_g(p) == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("q,z", [(0.5, 0.5), (0.9, 0.3), (0.99, 0.9)])
def test_a_equals_q_telescopes(q, z):
    p = QParams(q, q, z)
    assert ln_S_g(p) == pytest.approx(-math.log1p(-z), abs=1e-10)
    assert qbinomial_rhs(p) == pytest.approx(-math.log1p(-z), abs=1e-10)


@pytest.mark.parametrize("q,a,z", [(0.5, 0.5, 0.5), (0.99, 0.2, 0.8), (0.3, 0.9, 0.1)])
def test_verify_qbinomial(q, a, z):
    assert verify_qbinomial(QParams(q, a, z)).passed


def test_ln_I_g_against_direct_quadrature():
    p = QParams(1 - 2.0 ** -4, 0.5, 0.5)
    # integrate g in x directly, an independent route from the xi substitution
    x0 = find_x0(p)
    peak = ln_g(x0, p)
    f = lambda x: math.exp(ln_g(x, p) - peak)
    ref = sum(integrate.quad(f, lo, hi, epsabs=0, epsrel=1e-12, limit=200)[0]
              for lo, hi in [(0, x0), (x0, 4 * x0), (4 * x0, math.inf)])
    assert ln_I_g(p) == pytest.approx(peak + math.log(ref), abs=1e-9)


def test_sandwich_e14():
    r = check_sandwich_e14(QParams(1 - 2.0 ** -6, 0.5, 0.5))
    assert r.passed and r.strict


@pytest.mark.parametrize("k", [5, 8])
@pytest.mark.parametrize("xi", [0.1, 0.5, 2 / 3, 0.95])
def test_scaled_limit_bound(k, xi):
    dev, bound = scaled_log_g_deviation(xi, QParams(1 - 2.0 ** -k, 0.5, 0.5))
    assert dev <= bound


def test_e7_numeric():
    lhs, rhs = e7_numeric(3, 4, 0.5)
    assert lhs == pytest.approx(rhs, rel=1e-14)


def test_qparams_validation():
    with pytest.raises(DomainError):
        QParams(1.0)
    with pytest.raises(DomainError):
        QParams(0.5, 0.0, 0.5)
    with pytest.raises(DomainError):
        QParams(0.5, tol_rel=0)
    assert QParams(0.8, 0.5, 0.5).unimodal_ok
    assert not QParams(0.75, 0.5, 0.5).unimodal_ok
