"""Randomized algebraic laws (hypothesis)."""
from fractions import Fraction

import mpmath
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from dunkl.algebra import Polynomial, directional_derivative, evaluate, format_poly, parse_poly
from dunkl.dunklops import D2, DunklParams, exp_apply, resolvent_apply
from dunkl.intertwine import build_vk
from dunkl.kernel import hyp1f1
from dunkl.pairing import pairing
from dunkl.reflection import preset

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def polys(dim, max_degree=4, max_terms=5):
    exps = st.tuples(*[st.integers(0, max_degree)] * dim).filter(lambda e: sum(e) <= max_degree)
    return st.dictionaries(exps, fractions, max_size=max_terms).map(lambda d: Polynomial(dim, d))


points2 = st.tuples(fractions, fractions)

FAST = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])

B2 = DunklParams.from_values(preset("B", 2), (1, Fraction(1, 2)))
B2_TABLE = build_vk(B2, 4)


@FAST
@given(polys(2), polys(2), polys(2))
def test_ring_axioms(p, q, r):
    zero = Polynomial.zero(2)
    assert p + q == q + p
    assert p * q == q * p
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p + zero == p and p - p == zero


@FAST
@given(polys(2), polys(2), points2)
def test_evaluation_is_a_homomorphism(p, q, x):
    assert evaluate(p * q, x) == evaluate(p, x) * evaluate(q, x)
    assert evaluate(p + q, x) == evaluate(p, x) + evaluate(q, x)


@FAST
@given(polys(2), polys(2), points2)
def test_leibniz_rule(p, q, xi):
    d = directional_derivative
    assert d(p * q, xi) == d(p, xi) * q + p * d(q, xi)


@FAST
@given(polys(3, 3))
def test_format_parse_round_trip(p):
    assert parse_poly(format_poly(p), 3) == p


@FAST
@given(polys(2), polys(2), fractions)
def test_dunkl_linearity(p, q, c):
    t = B2.dunkl((1, 2))
    assert t(p.scale(c) + q) == t(p).scale(c) + t(q)


@FAST
@given(polys(2))
def test_dunkl_commutativity_random(p):
    t1, t2 = B2.dunkl_axis(0), B2.dunkl_axis(1)
    assert t1(t2(p)) == t2(t1(p))


@FAST
@given(polys(1, 6), fractions, fractions)
def test_exp_semigroup_random(p, s, t):
    assert exp_apply(D2(), s, exp_apply(D2(), t, p)) == exp_apply(D2(), s + t, p)


@FAST
@given(polys(1, 6), fractions.filter(lambda v: v != 0))
def test_resolvent_random(p, lam):
    r = resolvent_apply(D2(), lam, p)
    assert r.scale(lam) - D2()(r) == p


@FAST
@given(polys(2), polys(2))
def test_pairing_symmetric_and_intertwined(p, q):
    assert pairing(B2, p, q) == pairing(B2, q, p)
    lhs = pairing(B2, B2_TABLE.apply(p), q)
    rhs = sum((c * q.coefficient(m) * Fraction(_fact(m)) for m, c in p.items()), Fraction(0))
    assert lhs == rhs


def _fact(m):
    out = 1
    for e in m:
        for j in range(2, e + 1):
            out *= j
    return out


@FAST
@given(polys(2))
def test_pairing_positive_semidefinite(p):
    assert pairing(B2, p, p) >= 0


@FAST
@given(polys(2), polys(2), fractions)
def test_vk_linear(p, q, c):
    assert B2_TABLE.apply(p.scale(c) + q) == B2_TABLE.apply(p).scale(c) + B2_TABLE.apply(q)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 4.0), st.floats(-6.0, 6.0), st.floats(-6.0, 6.0))
def test_hyp1f1_against_mpmath(k, re, im):
    z = complex(re, im)
    ours = hyp1f1(k, 2 * k + 1, z)
    ref = complex(mpmath.hyp1f1(k, 2 * k + 1, z))
    assert abs(ours - ref) <= 1e-12 * max(1.0, abs(ref))


@pytest.mark.parametrize("k", [Fraction(1, 2), 1, Fraction(5, 2)])
def test_rank_one_table_matches_mpmath_beta_integral(k):
    t = build_vk(DunklParams.from_values(preset("Z2", 1), (k,)), 6)
    k = Fraction(k)
    kf = mpmath.mpf(k.numerator) / k.denominator
    c = mpmath.gamma(kf + 0.5) / (mpmath.gamma(0.5) * mpmath.gamma(kf))
    # the density is (1 - t^2)^(k-1) (1 + t); t = sin(th) makes it smooth for k >= 1/2
    for n in range(7):
        val = c * mpmath.quad(lambda th: mpmath.sin(th) ** n * mpmath.cos(th) ** (2 * kf - 1) * (1 + mpmath.sin(th)),
                              [-mpmath.pi / 2, 0, mpmath.pi / 2])
        assert float(t.image((n,)).coefficient((n,))) == pytest.approx(float(val), abs=1e-12)
