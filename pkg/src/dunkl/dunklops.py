"""Dunkl operators and the calculus of degree-lowering operators on polynomials.

A :class:`PolyOperator` is a linear map on polynomials defined by its values on
monomials.  Those values are cached, so the operator is effectively stored as
its matrix on the monomial basis, filled in degree by degree as needed.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .algebra import (
    EXACT,
    FLOAT,
    ModeError,
    Polynomial,
    basis,
    coefficient_vector,
    compose_linear,
    directional_derivative,
    divide_linear,
    evaluate,
    linear_substitute,
    scalar,
    transpose,
)
from .reflection import (
    MultiplicityFunction,
    ReflectionGroup,
    RootSystem,
    build_group,
    reflection_matrix,
)


class NotDegreeLowering(ValueError):
    pass


class PolyOperator:
    """Linear operator on polynomials in ``dim`` variables.

    ``on_monomial`` maps an exponent tuple to the image polynomial.  ``shift``
    records a known homogeneity degree (``-1`` for Dunkl operators, ``-2`` for
    Laplacians) and is informational; :meth:`is_degree_lowering` checks the
    property on basis monomials.
    """

    def __init__(self, dim: int, on_monomial: Callable[[tuple], Polynomial], *,
                 mode: str = EXACT, shift: int | None = None, name: str = ""):
        self.dim = dim
        self.mode = mode
        self.shift = shift
        self.name = name
        self._on_monomial = on_monomial
        self._cache: dict = {}
        self._lowering_checked = -1
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        return f"PolyOperator({self.name or '?'}, dim={self.dim})"

    def image(self, mono: tuple) -> Polynomial:
        img = self._cache.get(mono)
        if img is None:
            img = self._on_monomial(mono)
            with self._lock:
                self._cache.setdefault(mono, img)
        return img

    def __call__(self, p: Polynomial) -> Polynomial:
        if p.dim != self.dim:
            raise ValueError(f"operator on R^{self.dim} applied to polynomial on R^{p.dim}")
        out: dict = {}
        for mono, c in p.items():
            img = self.image(mono)
            if img.mode != p.mode:
                if img.mode == FLOAT:
                    raise ModeError("float operator applied to an exact polynomial")
                img = img.to_float()
            for m, v in img.items():
                out[m] = out.get(m, 0) + c * v
        return Polynomial._raw(self.dim, {m: v for m, v in out.items() if v != 0}, p.mode)

    # combinators ------------------------------------------------------------
    def __add__(self, other: "PolyOperator") -> "PolyOperator":
        return PolyOperator(self.dim, lambda m: self.image(m) + other.image(m), mode=self.mode,
                            shift=self.shift if self.shift == other.shift else None,
                            name=f"({self.name} + {other.name})")

    def __sub__(self, other: "PolyOperator") -> "PolyOperator":
        return self + (-1) * other

    def __neg__(self) -> "PolyOperator":
        return (-1) * self

    def __rmul__(self, c) -> "PolyOperator":
        c = scalar(c, self.mode)
        return PolyOperator(self.dim, lambda m: self.image(m).scale(c), mode=self.mode,
                            shift=self.shift, name=f"{c}*{self.name}")

    def __matmul__(self, other: "PolyOperator") -> "PolyOperator":
        shift = None if self.shift is None or other.shift is None else self.shift + other.shift
        return PolyOperator(self.dim, lambda m: self(other.image(m)), mode=self.mode,
                            shift=shift, name=f"{self.name}{other.name}")

    # structure ----------------------------------------------------------------
    def matrix(self, n: int) -> list[list]:
        """Matrix on the monomial basis of polynomials of degree <= n (columns = images)."""
        mons = basis(self.dim, n)
        cols = []
        for m in mons:
            img = self.image(m)
            if img.degree > n:
                raise ValueError(f"{self.name} does not map degree <= {n} into itself")
            cols.append(coefficient_vector(img, mons))
        return [list(r) for r in zip(*cols)]

    def is_degree_lowering(self, n: int) -> bool:
        if n <= self._lowering_checked:
            return True
        for m in basis(self.dim, n):
            img = self.image(m)
            if not img.is_zero() and img.degree >= sum(m):
                return False
        self._lowering_checked = n
        return True


def operator_matrix(A: PolyOperator, n: int) -> list[list]:
    return A.matrix(n)


# --------------------------------------------------------------------------
# classical operators


def _mono(m: tuple, mode: str) -> Polynomial:
    return Polynomial.monomial(m, 1, mode)


def identity_operator(dim: int, mode: str = EXACT) -> PolyOperator:
    return PolyOperator(dim, lambda m: _mono(m, mode), mode=mode, shift=0, name="I")


def zero_operator(dim: int, mode: str = EXACT) -> PolyOperator:
    return PolyOperator(dim, lambda m: Polynomial.zero(dim, mode), mode=mode, name="0")


def partial(dim: int, i: int, mode: str = EXACT) -> PolyOperator:
    return PolyOperator(dim, lambda m: _mono(m, mode).diff(i), mode=mode, shift=-1, name=f"d{i + 1}")


def directional(dim: int, xi: Sequence, mode: str = EXACT) -> PolyOperator:
    xi = tuple(scalar(c, mode) for c in xi)
    return PolyOperator(dim, lambda m: directional_derivative(_mono(m, mode), xi), mode=mode,
                        shift=-1, name=f"d_{xi}")


def laplacian(dim: int, mode: str = EXACT) -> PolyOperator:
    def on(m):
        p = _mono(m, mode)
        out = Polynomial.zero(dim, mode)
        for i in range(dim):
            out = out + p.diff(i).diff(i)
        return out

    return PolyOperator(dim, on, mode=mode, shift=-2, name="Lap")


# --------------------------------------------------------------------------
# Dunkl operators


@dataclass
class DunklParams:
    """Root system, multiplicity and working degree defining ``T_xi(k)``."""

    roots: RootSystem
    k: MultiplicityFunction
    n_max: int = 6
    group: ReflectionGroup | None = None
    _ops: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.k.root_system is not self.roots and self.k.root_system != self.roots:
            raise ValueError("multiplicity defined on a different root system")
        if self.n_max < 0:
            raise ValueError("n_max must be nonnegative")

    @classmethod
    def from_values(cls, roots: RootSystem, orbit_values: Sequence, n_max: int = 6) -> "DunklParams":
        return cls(roots, MultiplicityFunction(roots, tuple(orbit_values)), n_max)

    @property
    def dim(self) -> int:
        return self.roots.dim

    @property
    def mode(self) -> str:
        return self.roots.mode

    def get_group(self) -> ReflectionGroup:
        if self.group is None:
            self.group = build_group(self.roots)
        return self.group

    def _op(self, key, factory):
        op = self._ops.get(key)
        if op is None:
            op = self._ops.setdefault(key, factory())
        return op

    def difference_quotient(self, j: int) -> PolyOperator:
        """``f -> (f - f o sigma_alpha) / <alpha, x>`` for the j-th positive root."""
        alpha = self.roots.positive_roots[j]
        sigma = reflection_matrix(alpha)
        mode = self.mode

        def on(m):
            f = _mono(m, mode)
            return divide_linear(f - compose_linear(f, sigma), alpha)

        return self._op(("dq", j), lambda: PolyOperator(self.dim, on, mode=mode, shift=-1, name=f"q{j}"))

    def dunkl(self, xi: Sequence) -> PolyOperator:
        xi = tuple(scalar(c, self.mode) for c in xi)

        def make():
            ks = self.k.per_root
            dqs = [self.difference_quotient(j) for j in range(len(ks))]
            weights = [ks[j] * sum(a * b for a, b in zip(alpha, xi))
                       for j, alpha in enumerate(self.roots.positive_roots)]

            def on(m):
                f = _mono(m, self.mode)
                out = directional_derivative(f, xi)
                for w, q in zip(weights, dqs):
                    if w != 0:
                        out = out + q.image(m).scale(w)
                return out

            return PolyOperator(self.dim, on, mode=self.mode, shift=-1, name=f"T_{xi}")

        return self._op(("T", xi), make)

    def dunkl_axis(self, i: int) -> PolyOperator:
        e = [0] * self.dim
        e[i] = 1
        return self.dunkl(e)

    def delta_alpha(self, j: int) -> PolyOperator:
        """``<grad f, a>/<a, x> - |a|^2/2 * (f - f o sigma_a)/<a, x>^2`` (scale invariant in ``a``)."""
        alpha = self.roots.positive_roots[j]
        a2 = self.roots.squared_lengths[j]
        sigma = reflection_matrix(alpha)
        mode = self.mode

        def on(m):
            f = _mono(m, mode)
            lin = Polynomial.linear_form(alpha, mode)
            num = lin * directional_derivative(f, alpha) - (f - compose_linear(f, sigma)).scale(a2 / 2)
            return divide_linear(divide_linear(num, alpha), alpha)

        return self._op(("delta", j), lambda: PolyOperator(self.dim, on, mode=mode, shift=-2, name=f"delta{j}"))

    @property
    def laplacian_k(self) -> PolyOperator:
        """Generalized Laplacian as the sum of squared Dunkl operators."""
        def make():
            ts = [self.dunkl_axis(i) for i in range(self.dim)]

            def on(m):
                out = Polynomial.zero(self.dim, self.mode)
                for t in ts:
                    out = out + t(t.image(m))
                return out

            return PolyOperator(self.dim, on, mode=self.mode, shift=-2, name="Lap_k")

        return self._op("lapk", make)

    @property
    def laplacian_k_roots(self) -> PolyOperator:
        """Generalized Laplacian as ``Lap + 2 sum_a k(a) delta_a``."""
        return self._op("lapk_roots", lambda: laplacian(self.dim, self.mode) + self.L_k)

    @property
    def L_k(self) -> PolyOperator:
        def make():
            ks = self.k.per_root
            ds = [(ks[j], self.delta_alpha(j)) for j in range(len(ks))]

            def on(m):
                out = Polynomial.zero(self.dim, self.mode)
                for kj, d in ds:
                    if kj != 0:
                        out = out + d.image(m).scale(2 * kj)
                return out

            return PolyOperator(self.dim, on, mode=self.mode, shift=-2, name="L_k")

        return self._op("Lk", make)

    @property
    def laplacian(self) -> PolyOperator:
        return self._op("lap", lambda: laplacian(self.dim, self.mode))


def dunkl_apply(params: DunklParams, xi: Sequence, p: Polynomial) -> Polynomial:
    return params.dunkl(xi)(p)


def delta_alpha_apply(params: DunklParams, alpha: Sequence, p: Polynomial) -> Polynomial:
    return params.delta_alpha(params.roots.index_of(alpha))(p)


def laplacian_apply(params: DunklParams, p: Polynomial, via: str = "dunkl") -> Polynomial:
    """Generalized Laplacian; ``via="dunkl"`` sums ``T_i^2``, ``via="roots"`` uses the delta form."""
    if via == "dunkl":
        return params.laplacian_k(p)
    if via == "roots":
        return params.laplacian_k_roots(p)
    raise ValueError(f"unknown route {via!r}")


def conjugated(params: DunklParams, op: PolyOperator, g) -> PolyOperator:
    """``g o op o g^{-1}`` for the natural action ``(g p)(x) = p(g^{-1} x)``."""
    ginv = transpose(g)
    return PolyOperator(params.dim, lambda m: linear_substitute(op(linear_substitute(_mono(m, params.mode), ginv)), g),
                        mode=params.mode, name=f"g{op.name}g^-1")


# --------------------------------------------------------------------------
# functional calculus of degree-lowering operators


def _require_lowering(A: PolyOperator, n: int) -> None:
    if not A.is_degree_lowering(max(n, 0)):
        raise NotDegreeLowering(f"{A.name} is not degree-lowering up to degree {n}")


def _param(t, p: Polynomial):
    """Scalar parameter in the mode of ``p``; a float parameter moves exact input to float."""
    if isinstance(t, float) and p.mode == EXACT:
        return t, p.to_float()
    return scalar(t, p.mode), p


def exp_apply(A: PolyOperator, t, p: Polynomial) -> Polynomial:
    """``e^{tA} p`` as the terminating series ``sum_j t^j A^j p / j!``."""
    t, p = _param(t, p)
    _require_lowering(A, p.degree)
    out = p
    term = p
    j = 0
    while not term.is_zero():
        j += 1
        term = A(term).scale(t / j)
        out = out + term
    return out


def exp_operator(A: PolyOperator, t) -> PolyOperator:
    t = scalar(t, A.mode)
    return PolyOperator(A.dim, lambda m: exp_apply(A, t, _mono(m, A.mode)), mode=A.mode,
                        shift=0, name=f"exp({t}{A.name})")


def resolvent_apply(A: PolyOperator, lam, p: Polynomial) -> Polynomial:
    """``(lam I - A)^{-1} p`` as the finite Neumann series ``sum_j A^j p / lam^{j+1}``."""
    lam, p = _param(lam, p)
    if lam == 0:
        raise ZeroDivisionError("resolvent needs lambda != 0")
    _require_lowering(A, p.degree)
    inv = 1 / lam
    term = p.scale(inv)
    out = term
    while not term.is_zero():
        term = A(term).scale(inv)
        out = out + term
    return out


def euler_approx(A: PolyOperator, n: int, p: Polynomial) -> Polynomial:
    """``(I - A/n)^{-n} p``, i.e. ``n`` steps of ``n R(n; A)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    q = p
    for _ in range(n):
        q = resolvent_apply(A, n, q).scale(n)
    return q


def trotter_approx(A: PolyOperator, B: PolyOperator, n: int, p: Polynomial) -> Polynomial:
    """``(e^{A/n} e^{B/n})^n p``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    step = Fraction(1, n) if p.mode == EXACT else 1.0 / n
    q = p
    for _ in range(n):
        q = exp_apply(A, step, exp_apply(B, step, q))
    return q


def max_coefficient_error(p: Polynomial, q: Polynomial) -> float:
    return (p - q).max_abs_coefficient()


# --------------------------------------------------------------------------
# one-dimensional operators


@lru_cache(maxsize=None)
def D1(mode: str = EXACT) -> PolyOperator:
    return partial(1, 0, mode)


@lru_cache(maxsize=None)
def D2(mode: str = EXACT) -> PolyOperator:
    return laplacian(1, mode)


def _delta_1d_on(m: tuple, mode: str) -> Polynomial:
    # p'/x - (p(x) - p(-x)) / (2 x^2) on x^n: n x^{n-2} for even n, (n - 1) x^{n-2} for odd n
    n = m[0]
    if n < 2:
        return Polynomial.zero(1, mode)
    c = n if n % 2 == 0 else n - 1
    return Polynomial.monomial((n - 2,), c, mode)


@lru_cache(maxsize=None)
def delta_1d(mode: str = EXACT) -> PolyOperator:
    """The one-dimensional ``delta`` with ``T(k)^2 = D^2 + 2k delta``."""
    return PolyOperator(1, lambda m: _delta_1d_on(m, mode), mode=mode, shift=-2, name="delta")


@lru_cache(maxsize=None)
def lambda_s_operator(s) -> PolyOperator:
    """``e^{-sD^2} delta e^{sD^2}`` computed by exact three-stage conjugation."""
    mode = FLOAT if isinstance(s, float) else EXACT
    s = scalar(s, mode)
    if s < 0:
        raise ValueError("s must be >= 0")
    d2, delta = D2(mode), delta_1d(mode)

    def on(m):
        return exp_apply(d2, -s, delta(exp_apply(d2, s, _mono(m, mode))))

    return PolyOperator(1, on, mode=mode, shift=-2, name=f"Lambda_{s}")


def lambda_s_apply(s, p: Polynomial) -> Polynomial:
    if p.dim != 1:
        raise ValueError("Lambda_s acts on one-variable polynomials")
    if isinstance(s, (int, Fraction)):
        s = Fraction(s)
    return lambda_s_operator(s)(p)


def _x(mode: str) -> Polynomial:
    return Polynomial.variable(1, 0, mode)


def lambda_ode_residual(s, p: Polynomial, q: Polynomial) -> Polynomial:
    """``p' - (x q - 2 s q')``; vanishes exactly when ``q = Lambda_s p`` for even ``p``."""
    if not p.is_even():
        raise ValueError("p must be even")
    s = scalar(s, p.mode)
    return p.diff(0) - (_x(p.mode) * q - q.diff(0).scale(2 * s))


def lambda_odd_residual(s, p: Polynomial, q: Polynomial) -> Polynomial:
    """``d/dx(e^{sD^2} p / x) - e^{sD^2} q`` for odd ``p``; zero exactly when ``q = Lambda_s p``."""
    if not p.is_odd():
        raise ValueError("p must be odd")
    s = scalar(s, p.mode)
    ep = exp_apply(D2(p.mode), s, p)
    return divide_linear(ep, (1,)).diff(0) - exp_apply(D2(p.mode), s, q)


def ode_poly_solve(c, p: Polynomial) -> Polynomial:
    """Unique polynomial ``y`` with ``c y' - x y = p`` for odd ``p`` (``c > 0``).

    With ``y = sum a_j x^{2j}`` matching the coefficient of ``x^{2m+1}`` gives
    ``a_m = c (2m + 2) a_{m+1} - p_{2m+1}``, solved from the top down.
    """
    if p.dim != 1:
        raise ValueError("one-variable polynomial expected")
    if not p.is_odd():
        raise ValueError("p must be odd")
    c = scalar(c, p.mode)
    if c <= 0:
        raise ValueError("c must be positive")
    if p.is_zero():
        return Polynomial.zero(1, p.mode)
    n = (p.degree - 1) // 2
    a = [scalar(0, p.mode)] * (n + 2)
    for m in range(n, -1, -1):
        a[m] = c * (2 * m + 2) * a[m + 1] - p.coefficient((2 * m + 1,))
    return Polynomial(1, {(2 * j,): a[j] for j in range(n + 1)}, p.mode)


def exp_conjugate_identity_check(c, p: Polynomial) -> Polynomial:
    """``e^{cD^2}(x p) - x e^{cD^2} p - 2c e^{cD^2} p'`` (identically zero)."""
    c = scalar(c, p.mode)
    d2 = D2(p.mode)
    x = _x(p.mode)
    lhs = exp_apply(d2, c, x * p)
    rhs = x * exp_apply(d2, c, p) + exp_apply(d2, c, p.diff(0)).scale(2 * c)
    return lhs - rhs


def lambda_s_closed_form(s: float, p: Polynomial, x: float, convention: str = "half") -> float:
    """Integral formula for ``Lambda_s p(x)`` (``s > 0``) evaluated by adaptive quadrature.

    ``convention="half"`` integrates ``e^{-t^2/4s} ((t+x)/2 p(t) + (t-x)/2 p(-t))``
    over ``(-inf, x]``; ``convention="full"`` uses
    ``g(t) = e^{-t^2/4s} (t+x) p(t)`` in ``int_{-inf}^x g - int_{-x}^inf g``,
    which is exactly twice the integral term of the half convention.
    """
    from scipy.integrate import quad

    s = float(s)
    x = float(x)
    if s <= 0:
        raise ValueError("closed form needs s > 0")
    pf = p.to_float()

    def pv(t):
        return evaluate(pf, (t,))

    opts = dict(epsabs=1e-14, epsrel=1e-13, limit=200)
    if convention == "half":
        def f(t):
            return math.exp(-(t * t - x * x) / (4 * s)) * ((t + x) / 2 * pv(t) + (t - x) / 2 * pv(-t))

        integral = quad(f, -math.inf, x, **opts)[0]
    elif convention == "full":
        def g(t):
            return math.exp(-(t * t - x * x) / (4 * s)) * (t + x) * pv(t)

        integral = quad(g, -math.inf, x, **opts)[0] - quad(g, -x, math.inf, **opts)[0]
    else:
        raise ValueError(f"unknown convention {convention!r}")
    return -pv(x) / (2 * s) - integral / (4 * s * s)


# --------------------------------------------------------------------------
# positive minimum principle


@dataclass(frozen=True)
class Verdict:
    passed: bool
    value: object
    detail: str = ""

    def __bool__(self) -> bool:
        return self.passed


def minimum_principle_check(A: PolyOperator, p: Polynomial, x0: Sequence, tol: float = 0.0) -> Verdict:
    """Evaluate ``A p`` at a zero ``x0`` of the (caller-certified) nonnegative ``p``."""
    x0 = tuple(scalar(c, p.mode) for c in x0)
    at = evaluate(p, x0)
    if (p.mode == EXACT and at != 0) or (p.mode == FLOAT and abs(at) > tol):
        raise ValueError(f"p(x0) = {at} is not zero")
    value = evaluate(A(p), x0)
    passed = value >= 0 if p.mode == EXACT else value >= -tol
    return Verdict(bool(passed), value, f"{A.name} p(x0) = {value}")
