import math
from fractions import Fraction

import pytest

from dunkl.algebra import FLOAT, Polynomial, basis, evaluate, linear_substitute, parse_poly, transpose
from dunkl.dunklops import (
    D2,
    DunklParams,
    NotDegreeLowering,
    PolyOperator,
    delta_1d,
    delta_alpha_apply,
    dunkl_apply,
    euler_approx,
    exp_apply,
    exp_conjugate_identity_check,
    identity_operator,
    lambda_ode_residual,
    lambda_odd_residual,
    lambda_s_apply,
    lambda_s_closed_form,
    lambda_s_operator,
    laplacian_apply,
    max_coefficient_error,
    minimum_principle_check,
    ode_poly_solve,
    operator_matrix,
    partial,
    resolvent_apply,
    trotter_approx,
    zero_operator,
)
from dunkl.reflection import preset

X = Polynomial.variable(1, 0)


def p1(text):
    return parse_poly(text, 1)


def z2(k):
    return DunklParams.from_values(preset("Z2", 1), (k,))


# Dunkl operators


@pytest.mark.parametrize("k", [0, Fraction(1, 2), 1, Fraction(5, 2), -Fraction(1, 3)])
def test_z2_dunkl_on_x(k):
    assert dunkl_apply(z2(k), (1,), X) == Polynomial.constant(1, 1 + 2 * k)
    assert dunkl_apply(z2(k), (1,), X ** 2) == 2 * X


def test_k_zero_is_directional_derivative():
    params = DunklParams.from_values(preset("B", 2), (0, 0))
    p = parse_poly("x1^3*x2 - 2*x2^2 + x1", 2)
    assert dunkl_apply(params, (2, -1), p) == p.diff(0).scale(2) - p.diff(1)


@pytest.mark.parametrize("roots,ks", [
    (preset("B", 2), (Fraction(1, 2), 1)),
    (preset("A", 3), (Fraction(5, 2),)),
    (preset("Z2", 3), (1, Fraction(1, 2), Fraction(5, 2))),
])
def test_commutativity_and_homogeneity(roots, ks):
    params = DunklParams.from_values(roots, ks)
    ts = [params.dunkl_axis(i) for i in range(roots.dim)]
    for m in basis(roots.dim, 4):
        img = ts[0].image(m)
        assert img.is_zero() or (img.is_homogeneous() and img.degree == sum(m) - 1)
        for a in ts:
            for b in ts:
                assert a(b.image(m)) == b(a.image(m))


def test_equivariance_b2():
    params = DunklParams.from_values(preset("B", 2), (Fraction(1, 2), 3))
    group = params.get_group()
    for g in group.elements:
        for m in basis(2, 3):
            p = Polynomial.monomial(m)
            for i in range(2):
                e = [0, 0]
                e[i] = 1
                # (g T_e g^{-1}) p versus T_{g e} p
                lhs = linear_substitute(dunkl_apply(params, e, linear_substitute(p, transpose(g))), g)
                rhs = dunkl_apply(params, group.act(g, e), p)
                assert lhs == rhs


def test_delta_1d_examples():
    params = z2(1)
    assert delta_alpha_apply(params, (1,), X ** 2) == Polynomial.constant(1, 2)
    assert delta_alpha_apply(params, (1,), X ** 4) == 4 * X ** 2
    assert delta_alpha_apply(params, (1,), Polynomial.constant(1, 7)).is_zero()
    for n in range(8):
        assert delta_1d()(X ** n) == delta_alpha_apply(params, (1,), X ** n)


def test_laplacian_examples():
    for k in (0, Fraction(1, 2), 3):
        assert laplacian_apply(z2(k), X ** 2) == Polynomial.constant(1, 2 + 4 * k)
    assert laplacian_apply(z2(1), X ** 4) == 20 * X ** 2
    params = DunklParams.from_values(preset("B", 2), (0, 0))
    p = parse_poly("x1^4 + x1*x2^3", 2)
    assert laplacian_apply(params, p) == p.diff(0).diff(0) + p.diff(1).diff(1)


@pytest.mark.parametrize("roots,ks", [
    (preset("B", 2), (Fraction(1, 2), Fraction(5, 2))),
    (preset("A", 3), (1,)),
    (preset("I2", m=6), (Fraction(1, 2), 2)),
    (preset("D", 3), (Fraction(3, 2),)),
])
def test_laplacian_two_routes_agree(roots, ks):
    params = DunklParams.from_values(roots, ks)
    for m in basis(roots.dim, 5):
        p = Polynomial.monomial(m)
        assert laplacian_apply(params, p, "dunkl") == laplacian_apply(params, p, "roots")


def test_laplacian_route_is_representative_independent():
    a = DunklParams.from_values(preset("B", 2), (1, Fraction(1, 2)))
    b = DunklParams.from_values(
        preset("B", 2).__class__(2, ((3, 0), (0, 2), (1, -1), (5, 5))), (1, Fraction(1, 2)))
    for m in basis(2, 4):
        p = Polynomial.monomial(m)
        assert laplacian_apply(a, p, "roots") == laplacian_apply(b, p, "roots")


def test_one_dimensional_square():
    k = Fraction(7, 3)
    t = z2(k).dunkl_axis(0)
    for n in range(9):
        assert t(t(X ** n)) == D2()(X ** n) + delta_1d()(X ** n).scale(2 * k)


# operator matrices


def test_operator_matrix_partial():
    assert operator_matrix(partial(1, 0), 1) == [[0, 1], [0, 0]]


def test_operator_matrix_delta_column():
    mat = operator_matrix(delta_1d(), 2)
    assert [row[2] for row in mat] == [2, 0, 0]


def test_degree_lowering_matrix_is_nilpotent():
    import numpy as np

    params = DunklParams.from_values(preset("B", 2), (1, 2))
    a = np.array(operator_matrix(params.dunkl_axis(0), 3), dtype=object)
    power = np.identity(a.shape[0], dtype=object)
    for _ in range(4):
        power = power.dot(a)
    assert not power.any()


def test_operator_linearity():
    params = DunklParams.from_values(preset("A", 3), (Fraction(1, 2),))
    t = params.dunkl((1, 2, 0))
    p = parse_poly("x1^2*x3 - x2", 3)
    q = parse_poly("3*x1*x2*x3 + 1/2*x3^2", 3)
    assert t(p.scale(3) + q) == t(p).scale(3) + t(q)


# exponentials, resolvents, product formulas


def test_exp_examples():
    t = Fraction(2, 7)
    assert exp_apply(D2(), t, X ** 2) == X ** 2 + Polynomial.constant(1, 2 * t)
    assert exp_apply(D2(), t, X ** 4) == X ** 4 + (X ** 2).scale(12 * t) + Polynomial.constant(1, 12 * t * t)
    assert exp_apply(D2(), 0, X ** 5 + X) == X ** 5 + X


def test_exp_semigroup_law():
    params = DunklParams.from_values(preset("B", 2), (1, Fraction(1, 2)))
    lap = params.laplacian_k
    p = parse_poly("x1^4*x2^2 - x1*x2 + 3", 2)
    s, t = Fraction(1, 3), Fraction(-5, 4)
    assert exp_apply(lap, s, exp_apply(lap, t, p)) == exp_apply(lap, s + t, p)


def test_exp_requires_degree_lowering():
    with pytest.raises(NotDegreeLowering):
        exp_apply(identity_operator(1), 1, X)


def test_exp_float_parameter_switches_mode():
    out = exp_apply(D2(), math.sqrt(2), X ** 2)
    assert out.mode == FLOAT
    assert out.coefficient((0,)) == pytest.approx(2 * math.sqrt(2))


def test_resolvent_examples():
    lam = Fraction(3)
    assert resolvent_apply(D2(), lam, X ** 2) == (X ** 2).scale(1 / lam) + Polynomial.constant(1, 2 / lam ** 2)
    assert resolvent_apply(D2(), lam, Polynomial.constant(1, 5)) == Polynomial.constant(1, Fraction(5, 3))
    assert resolvent_apply(D2(), 1, X ** 4) == X ** 4 + 12 * X ** 2 + Polynomial.constant(1, 24)
    with pytest.raises(ZeroDivisionError):
        resolvent_apply(D2(), 0, X)


def test_resolvent_inverts():
    params = DunklParams.from_values(preset("A", 3), (2,))
    lap = params.laplacian_k
    p = parse_poly("x1^3*x2 - x3^2 + x1", 3)
    lam = Fraction(-2, 5)
    r = resolvent_apply(lap, lam, p)
    assert r.scale(lam) - lap(r) == p


def test_euler_examples():
    for n in (1, 2, 5):
        assert euler_approx(D2(), n, X ** 2) == X ** 2 + Polynomial.constant(1, 2)
    assert euler_approx(D2(), 1, X ** 4) == X ** 4 + 12 * X ** 2 + Polynomial.constant(1, 24)
    assert euler_approx(D2(), 2, X ** 4) == X ** 4 + 12 * X ** 2 + Polynomial.constant(1, 18)


def test_trotter_examples():
    p = X ** 4
    target = X ** 4 + 20 * X ** 2 + Polynomial.constant(1, 60)
    b = 2 * delta_1d()
    assert exp_apply(D2() + b, 1, p) == target
    for n in (1, 3):
        assert trotter_approx(D2(), zero_operator(1), n, p) == exp_apply(D2(), 1, p)
    d11 = partial(2, 0) @ partial(2, 0)
    d22 = partial(2, 1) @ partial(2, 1)
    q = parse_poly("x1^4*x2^2 + x1^2", 2)
    for n in (1, 2, 4):
        assert trotter_approx(d11, d22, n, q) == exp_apply(d11 + d22, 1, q)


def test_euler_and_trotter_rates():
    p = X ** 6 + X ** 4
    b = 2 * delta_1d()
    target_e = exp_apply(D2(), 1, p)
    target_t = exp_apply(D2() + b, 1, p)
    for n in (8, 16, 32):
        e1 = max_coefficient_error(euler_approx(D2(), n, p), target_e)
        e2 = max_coefficient_error(euler_approx(D2(), 2 * n, p), target_e)
        assert e2 <= 0.75 * e1
        t1 = max_coefficient_error(trotter_approx(D2(), b, n, p), target_t)
        t2 = max_coefficient_error(trotter_approx(D2(), b, 2 * n, p), target_t)
        assert t2 <= 0.75 * t1


# the operators Lambda_s


def test_lambda_examples():
    s = Fraction(3, 4)
    assert lambda_s_apply(s, X ** 2) == Polynomial.constant(1, 2)
    assert lambda_s_apply(s, X ** 4) == 4 * X ** 2 + Polynomial.constant(1, 16 * s)
    assert lambda_s_apply(s, X).is_zero()
    for n in range(8):
        assert lambda_s_apply(0, X ** n) == delta_1d()(X ** n)


def test_lambda_ode_examples():
    s = Fraction(2, 9)
    assert lambda_ode_residual(s, X ** 2, Polynomial.constant(1, 2)).is_zero()
    assert lambda_ode_residual(s, X ** 4, 4 * X ** 2 + Polynomial.constant(1, 16 * s)).is_zero()
    assert lambda_ode_residual(s, X ** 2, Polynomial.constant(1, 3)) == -X


@pytest.mark.parametrize("s", [Fraction(1, 2), 1, Fraction(5, 2)])
def test_lambda_characterizations(s):
    for n in range(0, 10, 2):
        assert lambda_ode_residual(s, X ** n, lambda_s_apply(s, X ** n)).is_zero()
    for n in range(1, 10, 2):
        assert lambda_odd_residual(s, X ** n, lambda_s_apply(s, X ** n)).is_zero()


def test_lambda_operator_is_degree_lowering():
    assert lambda_s_operator(Fraction(1, 3)).is_degree_lowering(8)


def test_ode_solve_examples():
    assert ode_poly_solve(1, X) == Polynomial.constant(1, -1)
    assert ode_poly_solve(1, X ** 3) == -X ** 2 - Polynomial.constant(1, 2)
    assert ode_poly_solve(1, Polynomial.zero(1)).is_zero()
    with pytest.raises(ValueError):
        ode_poly_solve(1, X ** 2)


def test_ode_solve_general():
    c = Fraction(5, 3)
    p = p1("2*x1^7 - x1^3 + 1/2*x1")
    y = ode_poly_solve(c, p)
    assert y.is_even() and y.degree <= p.degree - 1
    assert y.diff(0).scale(c) - X * y == p


@pytest.mark.parametrize("p", [Polynomial.constant(1, 1), X, X ** 3, p1("x1^5 - 2*x1^2 + 1")])
def test_exp_conjugate_identity(p):
    for c in (1, Fraction(-2, 3)):
        assert exp_conjugate_identity_check(c, p).is_zero()


@pytest.mark.parametrize("s", [0.5, 1.0, 2.5])
def test_lambda_closed_form_half_convention(s):
    p = p1("x1^4 - 3*x1^3 + x1 + 2")
    q = lambda_s_apply(Fraction(s), p).to_float()
    for x in (-1.3, 0.4, 2.0):
        assert lambda_s_closed_form(s, p, x) == pytest.approx(evaluate(q, (x,)), rel=1e-9, abs=1e-9)


def test_lambda_closed_form_full_convention_disagrees():
    p = X ** 4
    s, x = 1.0, 0.7
    q = evaluate(lambda_s_apply(1, p).to_float(), (x,))
    full = lambda_s_closed_form(s, p, x, "full")
    half = lambda_s_closed_form(s, p, x, "half")
    assert abs(full - q) > 1e-3
    # the integral term is exactly doubled
    base = -x ** 4 / (2 * s)
    assert full - base == pytest.approx(2 * (half - base), rel=1e-10)


# minimum principle


def test_minimum_principle_examples():
    sq = X ** 2
    assert minimum_principle_check(delta_1d(), sq, (0,)).passed
    p = (X - Polynomial.constant(1, 1)) ** 2 * (X + Polynomial.constant(1, 1)) ** 2
    assert minimum_principle_check(lambda_s_operator(Fraction(1, 2)), p, (1,)).passed
    v = minimum_principle_check(-delta_1d(), sq, (0,))
    assert not v.passed and v.value == -2


def test_minimum_principle_requires_zero():
    with pytest.raises(ValueError):
        minimum_principle_check(delta_1d(), X ** 2, (1,))


def test_poly_operator_rejects_wrong_dimension():
    op = PolyOperator(2, lambda m: Polynomial.zero(2))
    with pytest.raises(ValueError):
        op(X)
