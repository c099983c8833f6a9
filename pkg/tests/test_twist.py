from fractions import Fraction

import pytest

from nagaolab.curves import BadPrimeError, curve_from_poly, curve_trace, hyperelliptic_trace
from nagaolab.finite_field import primes_in
from nagaolab.polynomials import IntPolynomial, PolynomialError, parse_polynomial
from nagaolab.twist import (
    MobiusTransform,
    PetersonError,
    average_trace,
    char_sum,
    fiber_trace,
    geometric_grid,
    nagao_series,
    permutes_roots,
    peterson_D,
    twist_surface,
    verify_factorization,
    verify_mixed_factorization,
)


def surface(f, d=None, mode="fast-twist"):
    fp = parse_polynomial(f)
    dp = parse_polynomial(d) if d else fp
    return twist_surface(fp, dp, mode)


def test_char_sum_known():
    assert char_sum(parse_polynomial("x^3+x"), 5) == -2
    for p in (5, 13, 101):
        assert char_sum(parse_polynomial("x^2"), p) == p - 1
        assert char_sum(parse_polynomial("x"), p) == 0


def test_fiber_trace_examples():
    s = surface("x^3+x")
    assert fiber_trace(s, 5, 1) == -2  # D(1)=2 nonsquare, a_5=2
    assert fiber_trace(s, 5, 2) == 0  # D(2) = 10 = 0 mod 5
    assert fiber_trace(s, 5, 0) == 0
    with pytest.raises(BadPrimeError):
        fiber_trace(s, 2, 0)


def test_average_trace_examples():
    s = surface("x^3+x")
    assert average_trace(s, 5) == Fraction(-4, 5)
    assert average_trace(s, 3) == 0
    # trace factor vanishes => A_p = 0 regardless of D
    s2 = surface("x^3+x", "x^3+x+1")
    assert average_trace(s2, 3) == 0


def test_mode_agreement_corpus():
    polys = [
        "x^3+x", "x^3+x+1", "x^3-x+3", "x^5-x+1", "x^5+x",
        "x^6+1", "x^6+2", "x^5+x^3+x", "x^3+2*x+5", "x^6+x^2+1",
    ]
    surfaces = [
        (surface(f, d), surface(f, d, "fiberwise"))
        for f, d in zip(polys, polys[1:] + polys[:1])
    ]
    for fast, fiber in surfaces:
        for p in primes_in(3, 2000):
            if p in fast.bad_primes:
                continue
            assert average_trace(fast, p) == average_trace(fiber, p)


def test_self_twist_identity_both_genera():
    # p * A_p = -a_p(f)^2 when D = f
    for f in ("x^3+x+1", "x^5-x+1"):
        s = surface(f)
        c = curve_from_poly(s.f)
        for p in primes_in(3, 10**4):
            if p in s.bad_primes:
                continue
            a = curve_trace(c, p).a
            assert p * average_trace(s, p) == -a * a


def test_nagao_series_empty_sum():
    s = surface("x^3+x")
    ns = nagao_series(s, 2, [2])
    assert ns.s1 == (0.0,) and ns.s2 == (0.0,) and ns.n_primes == (0,)


def test_nagao_series_records_are_exact():
    s = surface("x^3+x")
    ns = nagao_series(s, 200, [100, 200])
    for p, a_avg in ns.records:
        assert a_avg == average_trace(s, p)
        assert a_avg.denominator in (1, p)
    assert [p for p, _ in ns.records] == sorted(p for p, _ in ns.records)


def test_nagao_series_grid_validation():
    s = surface("x^3+x")
    with pytest.raises(ValueError):
        nagao_series(s, 100, [1000])


def test_nagao_series_matches_direct_sum():
    import math

    s = surface("x^3+x", "x^3+x+1")
    ns = nagao_series(s, 500, [500])
    good = [p for p in primes_in(3, 501) if p not in s.bad_primes]
    s1 = sum(-float(average_trace(s, p)) * math.log(p) for p in good) / 500
    s2 = sum(-float(average_trace(s, p)) for p in good) / len(good)
    assert ns.s1[0] == pytest.approx(s1, abs=1e-12)
    assert ns.s2[0] == pytest.approx(s2, abs=1e-12)


def test_geometric_grid():
    g = geometric_grid(10**5)
    assert g[0] == 1000 and g[-1] == 10**5
    assert g == sorted(set(g))
    assert geometric_grid(500) == [500]


def test_mobius_basics():
    with pytest.raises(PolynomialError):
        MobiusTransform(2, 2, 1, 1)  # determinant 0
    sig = MobiusTransform(0, 1, 1, 0)  # 1/x
    assert sig.at_infinity() == 0
    assert sig.inverse_at_infinity() == 0
    sig2 = MobiusTransform(1, 1, -3, 1)  # 3-cycle 0 -> 1 -> -1 -> 0
    assert sig2.at_infinity() == Fraction(-1, 3)
    assert sig2.inverse_at_infinity() == Fraction(1, 3)


def test_permutes_roots():
    f = parse_polynomial("x^3-x")
    assert permutes_roots(MobiusTransform(1, 1, -3, 1), f)
    assert permutes_roots(MobiusTransform(0, 1, 1, 0), parse_polynomial("x^5+2*x^4+3*x^3+3*x^2+2*x+1"))
    assert not permutes_roots(MobiusTransform(1, 1, 0, 1), f)  # x + 1


def test_peterson_palindromic_quintic():
    f = parse_polynomial("x^5+2*x^4+3*x^3+3*x^2+2*x+1")
    res = peterson_D(f, MobiusTransform(0, 1, 1, 0))
    # f(0) = 1 and sigma^{-1}(inf) = 0, so D(T) = f(T^2)
    assert res.D == parse_polynomial("T^10+2*T^8+3*T^6+3*T^4+2*T^2+1")
    assert res.multiplier == 1


def test_peterson_three_cycle_cubic():
    f = parse_polynomial("x^3-x")
    res = peterson_D(f, MobiusTransform(1, 1, -3, 1))
    # integral model of f(27 T^2 / 8 + 1/3), scaled by a square
    m = Fraction(res.multiplier)
    for t in (0, 1, 2, Fraction(1, 2)):
        want = f(Fraction(27, 8) * t * t + Fraction(1, 3)) * m * m
        assert res.D(t) == want
    assert verify_factorization(res.D, f, 2, 500).passed


def test_peterson_errors():
    f = parse_polynomial("x^3-x")
    with pytest.raises(PetersonError, match="pole at infinity"):
        peterson_D(f, MobiusTransform(-1, 0, 0, 1))  # sigma = -x
    with pytest.raises(PetersonError, match="permute"):
        peterson_D(f, MobiusTransform(1, 1, 1, 0))
    with pytest.raises(PetersonError, match="degree"):
        peterson_D(parse_polynomial("x^4+1"), MobiusTransform(0, 1, 1, 0))


def test_verify_factorization_identity_case():
    f = parse_polynomial("x^3+x+1")
    assert verify_factorization(f, f, 1, 1000).passed


def test_verify_factorization_failure_reports_least_prime():
    rep = verify_factorization(parse_polynomial("x^6+2"), parse_polynomial("x^3+x"), 2, 100)
    assert not rep.passed
    assert rep.first_failing_prime == 5


def test_verify_mixed_reduces_to_plain():
    f = parse_polynomial("x^3+x+1")
    e = curve_from_poly(f)
    assert verify_mixed_factorization(f, e, 1, [], 1000).passed


def test_verify_mixed_failure():
    f = parse_polynomial("x^3+x+1")
    e = curve_from_poly(f)
    other = curve_from_poly(parse_polynomial("x^3+2*x+3"))
    rep = verify_mixed_factorization(f, e, 1, [other], 200)
    assert not rep.passed
    # the reported prime is the least good one where the extra term is nonzero
    bad = set(e.bad_primes) | set(other.bad_primes)
    for p in primes_in(3, 200):
        if p in bad:
            continue
        if hyperelliptic_trace(other.f, p) != 0:
            assert rep.first_failing_prime == p
            break


def test_verify_mixed_rejects_higher_genus():
    with pytest.raises(PolynomialError):
        verify_mixed_factorization(
            parse_polynomial("x^3+x+1"),
            curve_from_poly(parse_polynomial("x^5-x+1")),
            1,
            [],
            100,
        )
