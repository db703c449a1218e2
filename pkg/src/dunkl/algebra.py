"""Scalars, vectors and sparse multivariate polynomials.

Two coefficient modes are supported. In ``"exact"`` mode every coefficient is a
:class:`fractions.Fraction`; in ``"float"`` mode every coefficient is a Python
float.  A polynomial carries its mode and arithmetic between modes raises
:class:`ModeError`.

Monomials are exponent tuples.  The global monomial order is graded
lexicographic: lower total degree first, and inside one degree the monomial
with the larger exponent of ``x1`` (then ``x2``, ...) comes first.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

EXACT = "exact"
FLOAT = "float"
MODES = (EXACT, FLOAT)

# relative size under which a float coefficient counts as zero in remainder tests
FLOAT_ZERO_TOL = 1e-9


class ModeError(TypeError):
    """Exact and float quantities were mixed."""


class DimensionError(ValueError):
    """Operands live in different ambient dimensions."""


class DivisionError(ArithmeticError):
    """An exact polynomial division left a nonzero remainder."""


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"unknown scalar mode {mode!r}, expected one of {MODES}")
    return mode


def scalar(value, mode: str = EXACT):
    """Coerce ``value`` into the scalar type of ``mode``.

    Strings like ``"3/2"`` are accepted.  A float can never enter exact mode.
    """
    if isinstance(value, str):
        value = Fraction(value.strip()) if mode == EXACT else float(Fraction(value.strip()))
    if mode == EXACT:
        if isinstance(value, (bool, float, complex, np.floating)):
            raise ModeError(f"float value {value!r} used in exact mode")
        if isinstance(value, Fraction):
            return value
        return Fraction(value)
    if isinstance(value, complex):
        raise ModeError("complex scalars are not polynomial coefficients")
    return float(value)


def scalar_mode(value) -> str:
    return FLOAT if isinstance(value, (float, np.floating)) else EXACT


def vector(values: Iterable, mode: str = EXACT) -> tuple:
    return tuple(scalar(v, mode) for v in values)


def dot(u: Sequence, v: Sequence):
    if len(u) != len(v):
        raise DimensionError(f"vectors of length {len(u)} and {len(v)}")
    return sum((a * b for a, b in zip(u, v)), 0)


def norm_sq(u: Sequence):
    return dot(u, u)


def mat_vec(m: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(dot(row, v) for row in m)


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> tuple:
    cols = list(zip(*b))
    return tuple(tuple(dot(row, col) for col in cols) for row in a)


def transpose(m: Sequence[Sequence]) -> tuple:
    return tuple(zip(*m))


def identity(n: int, mode: str = EXACT) -> tuple:
    one, zero = scalar(1, mode), scalar(0, mode)
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def is_orthogonal(g: Sequence[Sequence], tol: float = 0.0) -> bool:
    n = len(g)
    gtg = mat_mul(transpose(g), g)
    for i in range(n):
        for j in range(n):
            target = 1 if i == j else 0
            if abs(gtg[i][j] - target) > tol:
                return False
    return True


# --------------------------------------------------------------------------
# monomials


@lru_cache(maxsize=None)
def monomials(dim: int, degree: int) -> tuple:
    """Exponent tuples of total ``degree`` in ``dim`` variables, in global order."""
    if dim == 0:
        return ((),) if degree == 0 else ()
    out = []
    for first in range(degree, -1, -1):
        for rest in monomials(dim - 1, degree - first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def basis(dim: int, max_degree: int) -> tuple:
    """Monomial basis of polynomials of degree at most ``max_degree``."""
    out = []
    for n in range(max_degree + 1):
        out.extend(monomials(dim, n))
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(dim: int, degree: int) -> Mapping:
    return MappingProxyType({m: i for i, m in enumerate(monomials(dim, degree))})


def order_key(mono: tuple) -> tuple:
    """Sort key realizing the global graded lexicographic order."""
    return (sum(mono), tuple(-e for e in mono))


def factorial_of(mono: tuple) -> int:
    out = 1
    for e in mono:
        out *= math.factorial(e)
    return out


# --------------------------------------------------------------------------
# polynomials


class Polynomial:
    """Immutable sparse polynomial: exponent tuple -> coefficient."""

    __slots__ = ("dim", "mode", "_terms", "_hash")

    def __init__(self, dim: int, terms: Mapping | Iterable = (), mode: str = EXACT):
        self.dim = dim
        self.mode = check_mode(mode)
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict = {}
        for mono, c in items:
            mono = tuple(int(e) for e in mono)
            if len(mono) != dim:
                raise DimensionError(f"monomial {mono} in dimension {dim}")
            if any(e < 0 for e in mono):
                raise ValueError(f"negative exponent in {mono}")
            c = scalar(c, mode)
            if mono in clean:
                c = clean[mono] + c
            clean[mono] = c
        self._terms = {m: c for m, c in clean.items() if c != 0}
        self._hash = None

    # construction helpers -------------------------------------------------
    @classmethod
    def _raw(cls, dim: int, terms: dict, mode: str) -> "Polynomial":
        # terms must already be clean (coerced, no zeros)
        p = object.__new__(cls)
        p.dim, p.mode, p._terms, p._hash = dim, mode, terms, None
        return p

    @classmethod
    def zero(cls, dim: int, mode: str = EXACT) -> "Polynomial":
        return cls._raw(dim, {}, check_mode(mode))

    @classmethod
    def constant(cls, dim: int, c, mode: str = EXACT) -> "Polynomial":
        return cls(dim, {(0,) * dim: c}, mode)

    @classmethod
    def monomial(cls, exponents: Sequence[int], c=1, mode: str = EXACT) -> "Polynomial":
        return cls(len(exponents), {tuple(exponents): c}, mode)

    @classmethod
    def variable(cls, dim: int, i: int, mode: str = EXACT) -> "Polynomial":
        e = [0] * dim
        e[i] = 1
        return cls.monomial(e, 1, mode)

    @classmethod
    def linear_form(cls, coeffs: Sequence, mode: str = EXACT) -> "Polynomial":
        """The polynomial ``x -> <coeffs, x>``."""
        dim = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            e = [0] * dim
            e[i] = 1
            terms[tuple(e)] = c
        return cls(dim, terms, mode)

    # basic queries ----------------------------------------------------------
    @property
    def terms(self) -> Mapping:
        return MappingProxyType(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, mono: Sequence[int]):
        return self._terms.get(tuple(mono), scalar(0, self.mode))

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        return max((sum(m) for m in self._terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self._terms}) <= 1

    def sorted_terms(self) -> list:
        return sorted(self._terms.items(), key=lambda t: order_key(t[0]))

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.dim == other.dim and self._terms == other._terms
        if isinstance(other, (int, Fraction, float)):
            return self == Polynomial.constant(self.dim, other, scalar_mode(other) if self.is_zero() else self.mode)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"Polynomial({self.dim}, {format_poly(self)!r}, mode={self.mode!r})"

    def __str__(self) -> str:
        return format_poly(self)

    # arithmetic ----------------------------------------------------------
    def _check(self, other: "Polynomial") -> str:
        if self.dim != other.dim:
            raise DimensionError(f"dimensions {self.dim} and {other.dim}")
        if self.mode != other.mode:
            # a zero polynomial is mode-neutral
            if self.is_zero():
                return other.mode
            if other.is_zero():
                return self.mode
            raise ModeError(f"cannot combine {self.mode} and {other.mode} polynomials")
        return self.mode

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction, float, np.floating)):
            return Polynomial.constant(self.dim, scalar(other, self.mode), self.mode)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        mode = self._check(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = out.get(m, 0) + c
            if v == 0:
                out.pop(m, None)
            else:
                out[m] = v
        return Polynomial._raw(self.dim, out, mode)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.dim, {m: -c for m, c in self._terms.items()}, self.mode)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Polynomial":
        c = scalar(c, self.mode)
        if c == 0:
            return Polynomial.zero(self.dim, self.mode)
        return Polynomial._raw(self.dim, {m: v * c for m, v in self._terms.items()}, self.mode)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            mode = self._check(other)
            out: dict = {}
            for m1, c1 in self._terms.items():
                for m2, c2 in other._terms.items():
                    m = tuple(a + b for a, b in zip(m1, m2))
                    out[m] = out.get(m, 0) + c1 * c2
            return Polynomial._raw(self.dim, {m: c for m, c in out.items() if c != 0}, mode)
        if isinstance(other, (int, Fraction, float, np.floating)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, float, np.floating)):
            return self.scale(1 / scalar(other, self.mode))
        return NotImplemented

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(self.dim, 1, self.mode)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # calculus -------------------------------------------------------------
    def diff(self, i: int) -> "Polynomial":
        out = {}
        for m, c in self._terms.items():
            e = m[i]
            if e:
                mm = m[:i] + (e - 1,) + m[i + 1:]
                out[mm] = c * e
        return Polynomial._raw(self.dim, out, self.mode)

    def gradient(self) -> list:
        return [self.diff(i) for i in range(self.dim)]

    def __call__(self, x):
        return evaluate(self, x)

    def to_float(self) -> "Polynomial":
        return Polynomial._raw(self.dim, {m: float(c) for m, c in self._terms.items()}, FLOAT)

    def to_exact(self) -> "Polynomial":
        return Polynomial._raw(self.dim, {m: Fraction(c) for m, c in self._terms.items()}, EXACT)

    def homogeneous_part(self, n: int) -> "Polynomial":
        return Polynomial._raw(self.dim, {m: c for m, c in self._terms.items() if sum(m) == n}, self.mode)

    def truncate(self, n: int) -> "Polynomial":
        return Polynomial._raw(self.dim, {m: c for m, c in self._terms.items() if sum(m) <= n}, self.mode)

    def max_abs_coefficient(self) -> float:
        return max((abs(float(c)) for c in self._terms.values()), default=0.0)

    def is_even(self) -> bool:
        return all(sum(m) % 2 == 0 for m in self._terms)

    def is_odd(self) -> bool:
        return all(sum(m) % 2 == 1 for m in self._terms)


def as_poly(p, dim: int, mode: str = EXACT) -> Polynomial:
    if isinstance(p, Polynomial):
        return p
    if isinstance(p, str):
        return parse_poly(p, dim, mode)
    return Polynomial.constant(dim, p, mode)


def evaluate(p: Polynomial, x: Sequence):
    """Value of ``p`` at ``x``; works for any ring of scalars in ``x``."""
    if len(x) != p.dim:
        raise DimensionError(f"point of length {len(x)} for polynomial in {p.dim} variables")
    total = 0
    powers: list[dict] = [{} for _ in range(p.dim)]

    def power(i, e):
        cache = powers[i]
        if e not in cache:
            cache[e] = x[i] ** e
        return cache[e]

    for m, c in p.items():
        term = c
        for i, e in enumerate(m):
            if e:
                term = term * power(i, e)
        total = total + term
    if isinstance(total, int) and p.mode == EXACT:
        total = Fraction(total)
    return total


def directional_derivative(p: Polynomial, xi: Sequence) -> Polynomial:
    if len(xi) != p.dim:
        raise DimensionError("direction and polynomial dimension differ")
    out = Polynomial.zero(p.dim, p.mode)
    for i, c in enumerate(xi):
        if c != 0:
            out = out + p.diff(i).scale(c)
    return out


def homogeneous_parts(p: Polynomial) -> list:
    """``[(n, p_n), ...]`` in increasing degree, nonzero parts only."""
    buckets: dict = {}
    for m, c in p.items():
        buckets.setdefault(sum(m), {})[m] = c
    return [(n, Polynomial._raw(p.dim, buckets[n], p.mode)) for n in sorted(buckets)]


def compose_linear(p: Polynomial, m: Sequence[Sequence]) -> Polynomial:
    """The polynomial ``x -> p(m x)``; ``m`` is not required to be orthogonal."""
    dim = p.dim
    rows = [Polynomial.linear_form(row, p.mode) for row in m]
    cache: dict = {}

    def power(i, e):
        if (i, e) not in cache:
            cache[(i, e)] = rows[i] ** e
        return cache[(i, e)]

    out: dict = {}
    for mono, c in p.items():
        term = Polynomial.constant(dim, c, p.mode)
        for i, e in enumerate(mono):
            if e:
                term = term * power(i, e)
        for mm, cc in term.items():
            out[mm] = out.get(mm, 0) + cc
    return Polynomial._raw(dim, {k: v for k, v in out.items() if v != 0}, p.mode)


def linear_substitute(p: Polynomial, g: Sequence[Sequence]) -> Polynomial:
    """Natural action ``(g p)(x) = p(g^{-1} x)`` of an orthogonal matrix."""
    if len(g) != p.dim:
        raise DimensionError("matrix size and polynomial dimension differ")
    tol = 0.0 if p.mode == EXACT else 1e-12
    if not is_orthogonal(g, tol):
        raise ValueError("matrix is not orthogonal")
    return compose_linear(p, transpose(g))


def divide_linear(p: Polynomial, alpha: Sequence) -> Polynomial:
    """Exact quotient of ``p`` by the linear form ``<alpha, x>``.

    Raises :class:`DivisionError` when the remainder is nonzero (in float mode:
    larger than a relative tolerance).
    """
    dim = p.dim
    j = max(i for i, a in enumerate(alpha) if a != 0)
    aj = alpha[j]
    rest = [(i, a) for i, a in enumerate(alpha) if a != 0 and i != j]
    work = dict(p.items())
    quotient: dict = {}
    scale = p.max_abs_coefficient() or 1.0

    def key(m):
        # x_j first, then lexicographic on the rest
        return (m[j], m)

    while work:
        # pick the largest monomial in the (x_j, lex) order
        m = max(work, key=key)
        c = work.pop(m)
        if m[j] == 0:
            if p.mode == EXACT or abs(c) > FLOAT_ZERO_TOL * scale:
                raise DivisionError(f"{format_poly(p)} is not divisible by <{alpha}, x>")
            continue
        q = c / aj
        qm = m[:j] + (m[j] - 1,) + m[j + 1:]
        quotient[qm] = quotient.get(qm, 0) + q
        for i, a in rest:
            mm = list(qm)
            mm[i] += 1
            mm = tuple(mm)
            v = work.get(mm, 0) - q * a
            if v == 0:
                work.pop(mm, None)
            else:
                work[mm] = v
    return Polynomial._raw(dim, {m: c for m, c in quotient.items() if c != 0}, p.mode)


def even_part(p: Polynomial) -> Polynomial:
    return Polynomial._raw(p.dim, {m: c for m, c in p.items() if sum(m) % 2 == 0}, p.mode)


def odd_part(p: Polynomial) -> Polynomial:
    return Polynomial._raw(p.dim, {m: c for m, c in p.items() if sum(m) % 2 == 1}, p.mode)


def integrate_1d(p: Polynomial) -> Polynomial:
    """Antiderivative vanishing at 0 of a one-variable polynomial."""
    if p.dim != 1:
        raise DimensionError("integrate_1d needs a one-variable polynomial")
    return Polynomial._raw(1, {(m[0] + 1,): c / (m[0] + 1) for m, c in p.items()}, p.mode)


def coefficient_vector(p: Polynomial, monos: Sequence[tuple]) -> list:
    zero = scalar(0, p.mode)
    return [p._terms.get(m, zero) for m in monos]


def from_coefficients(dim: int, monos: Sequence[tuple], coeffs: Sequence, mode: str = EXACT) -> Polynomial:
    return Polynomial(dim, zip(monos, coeffs), mode)


# --------------------------------------------------------------------------
# text grammar

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][-+]?\d+)?(?:/\d+)?)|(?P<var>x(?P<idx>\d+))|(?P<op>[-+*^/()]))")


def parse_poly(text: str, dim: int | None = None, mode: str = EXACT) -> Polynomial:
    """Parse ``"3/2*x1^2*x2 - x2^3 + 1"``; variables are 1-based ``x1 .. xN``."""
    tokens = []
    pos = 0
    text = re.sub(r"\s+", "", text)
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial at {text[pos:]!r}")
        pos = m.end()
        if m.group("num"):
            tokens.append(("num", m.group("num")))
        elif m.group("var"):
            tokens.append(("var", int(m.group("idx"))))
        else:
            tokens.append(("op", m.group("op")))
    idx = [t[1] for t in tokens if t[0] == "var"]
    if any(i < 1 for i in idx):
        raise ValueError("variables are numbered from x1")
    need = max(idx, default=1)
    if dim is None:
        dim = need
    elif need > dim:
        raise DimensionError(f"x{need} used in dimension {dim}")

    terms: dict = {}
    i = 0
    if not tokens:
        raise ValueError("empty polynomial")
    while i < len(tokens):
        sign = 1
        while i < len(tokens) and tokens[i][0] == "op" and tokens[i][1] in "+-":
            if tokens[i][1] == "-":
                sign = -sign
            i += 1
        coeff = scalar(sign, mode)
        expo = [0] * dim
        expect_factor = True
        while i < len(tokens):
            kind, val = tokens[i]
            if expect_factor:
                if kind == "num":
                    coeff = coeff * scalar(val, mode)
                    i += 1
                elif kind == "var":
                    i += 1
                    e = 1
                    if i < len(tokens) and tokens[i] == ("op", "^"):
                        if i + 1 >= len(tokens) or tokens[i + 1][0] != "num" or not tokens[i + 1][1].isdigit():
                            raise ValueError("exponent must be a nonnegative integer")
                        e = int(tokens[i + 1][1])
                        i += 2
                    expo[val - 1] += e
                else:
                    raise ValueError(f"unexpected {val!r}")
                expect_factor = False
            else:
                if kind == "op" and val == "*":
                    expect_factor = True
                    i += 1
                elif kind == "op" and val in "+-":
                    break
                else:
                    raise ValueError(f"unexpected {val!r}")
        if expect_factor:
            raise ValueError("dangling operator")
        key = tuple(expo)
        terms[key] = terms.get(key, 0) + coeff
    return Polynomial(dim, terms, mode)


def _format_coeff(c) -> str:
    if isinstance(c, Fraction):
        return str(c)
    return repr(float(c))


def format_poly(p: Polynomial) -> str:
    """Inverse of :func:`parse_poly` (degree descending, ``x1``-heavy first)."""
    if p.is_zero():
        return "0"
    parts = []
    for mono, c in sorted(p.items(), key=lambda t: (-sum(t[0]), tuple(-e for e in t[0]))):
        neg = c < 0
        a = -c if neg else c
        factors = []
        for i, e in enumerate(mono):
            if e == 1:
                factors.append(f"x{i + 1}")
            elif e > 1:
                factors.append(f"x{i + 1}^{e}")
        if not factors:
            body = _format_coeff(a)
        elif a == 1:
            body = "*".join(factors)
        else:
            body = "*".join([_format_coeff(a)] + factors)
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts)


# --------------------------------------------------------------------------
# sampled A_r norm


def _sphere_directions(dim: int, samples: int) -> np.ndarray:
    """Deterministic nested direction set: the first ``s`` rows never change with ``samples``."""
    if dim == 1:
        return np.array([[1.0 if i % 2 == 0 else -1.0] for i in range(samples)])
    from scipy.stats import norm, qmc

    pts = qmc.Halton(d=dim, scramble=False).random(samples + 1)[1:]
    g = norm.ppf(pts)
    lens = np.linalg.norm(g, axis=1)
    ok = lens > 0
    g[ok] = g[ok] / lens[ok, None]
    g[~ok] = 0.0
    return g


def ar_norm_estimate(p: Polynomial, r, samples: int) -> float:
    """Sampled lower bound of ``sum_n sup_{|x| <= r} |p_n(x)|``.

    Each homogeneous part attains its sup over the ball on the sphere of radius
    ``r``, so only directions are sampled.  Increasing ``samples`` only adds
    points, so the estimate is nondecreasing in ``samples``.
    """
    r = float(r)
    if r <= 0:
        raise ValueError("radius must be positive")
    if samples < 1:
        raise ValueError("need at least one sample")
    dirs = _sphere_directions(p.dim, samples)
    total = 0.0
    for n, part in homogeneous_parts(p.to_float()):
        if n == 0:
            total += abs(part.coefficient((0,) * p.dim))
            continue
        best = max(abs(evaluate(part, tuple(d))) for d in dirs)
        total += best * r ** n
    return total
