"""Truncated Dunkl kernel, generalized Bessel function and explicit representing measures.

Kernel values are sums ``sum_{|mu| <= M} m_mu(x) z^mu / mu!`` over the moment
functions stored in an intertwiner table.  With an exact table and rational
inputs, real and imaginary parts are accumulated as Fractions; floats appear
only in the returned value.  Every value comes with the tail bound
``|x|^{|nu|} sum_{m > M - |nu|} (|x||z|)^m / m!``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import EXACT, Polynomial, compose_linear, dot, factorial_of, mat_vec, monomials
from .dunklops import DunklParams, Verdict
from .intertwine import (
    DegreeError,
    IntertwinerTable,
    beta_constant,
    beta_moment_exact,
    beta_moment_quad,
    build_vk,
)


class TailTooLarge(ValueError):
    pass


# --------------------------------------------------------------------------
# complex numbers as (re, im) pairs over the table's scalar field


def _to_real(v, mode):
    if mode == EXACT:
        return Fraction(v) if not isinstance(v, str) else Fraction(v.replace(" ", ""))
    return float(v)


def _to_pair(v, mode):
    if isinstance(v, tuple) and len(v) == 2:
        return _to_real(v[0], mode), _to_real(v[1], mode)
    if isinstance(v, complex):
        return _to_real(v.real, mode), _to_real(v.imag, mode)
    return _to_real(v, mode), _to_real(0, mode)


def _cmul(a, b):
    return a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]


def _cpowers(z, n, one):
    out = [(one, one * 0)]
    for _ in range(n):
        out.append(_cmul(out[-1], z))
    return out


def _pair_to_complex(p) -> complex:
    return complex(float(p[0]), float(p[1]))


def _norm(v) -> float:
    total = 0.0
    for c in v:
        if isinstance(c, tuple):
            total += float(c[0]) ** 2 + float(c[1]) ** 2
        else:
            total += abs(complex(c)) ** 2
    return math.sqrt(total)


def exp_tail(t: float, start: int) -> float:
    """``sum_{m >= start} t^m / m!`` for ``t >= 0``."""
    if start <= 0:
        return math.exp(t)
    if t == 0:
        return 0.0
    term = math.exp(start * math.log(t) - math.lgamma(start + 1))
    total, m = 0.0, start
    while term > 0.0 and (term > 1e-18 * total or m < t):
        total += term
        m += 1
        term *= t / m
    return total


# --------------------------------------------------------------------------
# truncation


@dataclass(frozen=True)
class KernelValue:
    value: complex
    tail: float
    order: int
    exact: tuple | None = None

    def record(self, point=None) -> dict:
        return {
            "point": point,
            "value_re": self.value.real,
            "value_im": self.value.imag,
            "tail_bound": self.tail,
            "order": self.order,
        }


class KernelTruncation:
    """``K^{(M)}(x, z) = sum_{n <= M} K_n(x, z)`` read off an intertwiner table."""

    def __init__(self, table: IntertwinerTable, M: int | None = None):
        M = table.n_max if M is None else M
        if M > table.n_max:
            raise DegreeError(f"order {M} exceeds table order {table.n_max}")
        self.table = table
        self.M = M

    @classmethod
    def build(cls, params: DunklParams, M: int) -> "KernelTruncation":
        return cls(build_vk(params, M), M)

    @property
    def params(self) -> DunklParams:
        return self.table.params

    @property
    def dim(self) -> int:
        return self.table.dim

    @property
    def mode(self) -> str:
        return self.table.mode

    def tail(self, x, z, nu=None) -> float:
        s = 0 if nu is None else sum(nu)
        ax = _norm(x)
        return ax ** s * exp_tail(ax * _norm(z), self.M - s + 1)

    def series(self, x: Sequence, z: Sequence, nu: Sequence[int] | None = None) -> tuple:
        """Exact-field value of ``d_z^nu K^{(M)}(x, z)`` as an ``(re, im)`` pair."""
        mode, dim = self.mode, self.dim
        xs = [_to_real(c, mode) for c in x]
        zs = [_to_pair(c, mode) for c in z]
        if len(xs) != dim or len(zs) != dim:
            raise ValueError(f"points must have {dim} coordinates")
        nu = tuple(nu) if nu is not None else (0,) * dim
        one = _to_real(1, mode)
        xpow = []
        for c in xs:
            row = [one]
            for _ in range(self.M):
                row.append(row[-1] * c)
            xpow.append(row)
        zpow = [_cpowers(c, self.M, one) for c in zs]
        re = im = one * 0
        for n in range(sum(nu), self.M + 1):
            mat = self.table.matrices[n]
            mons = monomials(dim, n)
            ys = []
            for mu in mons:
                lam = tuple(a - b for a, b in zip(mu, nu))
                if min(lam) < 0:
                    ys.append(None)
                    continue
                w = (one, one * 0)
                for i, e in enumerate(lam):
                    w = _cmul(w, zpow[i][e])
                f = factorial_of(lam)
                ys.append((w[0] / f, w[1] / f))
            for r, mon in enumerate(mons):
                xr = one
                for i, e in enumerate(mon):
                    xr = xr * xpow[i][e]
                if xr == 0:
                    continue
                row = mat[r]
                sr = si = one * 0
                for c, y in enumerate(ys):
                    if y is not None and row[c] != 0:
                        sr += row[c] * y[0]
                        si += row[c] * y[1]
                re += xr * sr
                im += xr * si
        return re, im

    def homogeneous(self, n: int, y: Sequence) -> Polynomial:
        """``K_n(., y)`` as a polynomial in ``x`` for a real point ``y``."""
        if n > self.M:
            raise DegreeError(f"degree {n} exceeds order {self.M}")
        mode, dim = self.mode, self.dim
        ys = [_to_real(c, mode) for c in y]
        mons = monomials(dim, n)
        weights = []
        for mu in mons:
            w = _to_real(1, mode)
            for c, e in zip(ys, mu):
                w *= c ** e
            weights.append(w / factorial_of(mu))
        mat = self.table.matrices[n]
        terms = {}
        for r, mon in enumerate(mons):
            terms[mon] = sum((mat[r][c] * weights[c] for c in range(len(mons))), _to_real(0, mode))
        return Polynomial(dim, terms, mode)


def kernel_eval(tr: KernelTruncation, x: Sequence, y: Sequence, nu=None) -> KernelValue:
    pair = tr.series(x, y, nu)
    return KernelValue(_pair_to_complex(pair), tr.tail(x, y, nu), tr.M,
                       pair if tr.mode == EXACT else None)


def bessel_eval(tr: KernelTruncation, x: Sequence, y: Sequence) -> KernelValue:
    """``J(x, y) = |G|^{-1} sum_g K(x, g y)``."""
    group = tr.params.get_group()
    mode = tr.mode
    zs = [_to_pair(c, mode) for c in y]
    re_part = [c[0] for c in zs]
    im_part = [c[1] for c in zs]
    sr = si = _to_real(0, mode)
    for g in group.elements:
        gz = list(zip(mat_vec(g, re_part), mat_vec(g, im_part)))
        a, b = tr.series(x, gz)
        sr += a
        si += b
    n = group.order
    pair = (sr / n, si / n)
    return KernelValue(_pair_to_complex(pair), tr.tail(x, y), tr.M, pair if mode == EXACT else None)


def kernel_bound_check(tr: KernelTruncation, x, z, nu=None, tol: float = 1e-10) -> Verdict:
    """``|d_z^nu K(x, z)| <= |x|^{|nu|} e^{|x| |Re z|}`` up to tail and ``tol``."""
    nu = tuple(nu) if nu is not None else (0,) * tr.dim
    val = kernel_eval(tr, x, z, nu)
    if val.tail > tol:
        raise TailTooLarge(f"tail bound {val.tail:.3e} exceeds {tol:.1e} at x={x}, z={z}")
    ax = _norm(x)
    re_z = math.sqrt(sum(float(_to_pair(c, tr.mode)[0]) ** 2 for c in z))
    bound = ax ** sum(nu) * math.exp(ax * re_z)
    mag = abs(val.value)
    margin = bound + val.tail + tol - mag
    return Verdict(margin >= 0, margin, f"|value| = {mag!r}, bound = {bound!r}, tail = {val.tail:.2e}")


def kernel_recursion_residual(tr: KernelTruncation, xi: Sequence, y: Sequence, n: int) -> Polynomial:
    """``T_xi K_{n+1}(., y) - <xi, y> K_n(., y)``; zero for a correct table."""
    if n + 1 > tr.M:
        raise DegreeError(f"needs n + 1 <= {tr.M}")
    mode = tr.mode
    ys = [_to_real(c, mode) for c in y]
    xis = [_to_real(c, mode) for c in xi]
    upper = tr.homogeneous(n + 1, ys)
    lower = tr.homogeneous(n, ys)
    return tr.params.dunkl(xis)(upper) - lower.scale(dot(xis, ys))


def kernel_symmetry_residual(tr: KernelTruncation, x: Sequence, y: Sequence) -> list:
    """``K_n(x, y) - K_n(y, x)`` for every ``n <= M`` (real points)."""
    out = []
    for n in range(tr.M + 1):
        a = tr.homogeneous(n, y)(tuple(_to_real(c, tr.mode) for c in x))
        b = tr.homogeneous(n, x)(tuple(_to_real(c, tr.mode) for c in y))
        out.append(a - b)
    return out


def kernel_positivity_scan(tr: KernelTruncation, xs, ys) -> Verdict:
    """``K^{(M)}(x, y) > tail`` at every pair of real points (so ``K(x, y) > 0``)."""
    worst = None
    for x in xs:
        for y in ys:
            v = kernel_eval(tr, x, y)
            margin = v.value.real - v.tail
            if worst is None or margin < worst[0]:
                worst = (margin, x, y)
    if worst is None:
        return Verdict(True, None, "no points")
    return Verdict(worst[0] > 0, worst[0], f"smallest margin at x={worst[1]}, y={worst[2]}")


# --------------------------------------------------------------------------
# Gram matrices and a small Hermitian eigenvalue solver


def _tridiagonalize(a: np.ndarray):
    """Householder reduction of a real symmetric matrix; returns (diagonal, offdiagonal)."""
    a = np.array(a, dtype=float)
    n = len(a)
    for j in range(n - 2):
        x = a[j + 1:, j].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        if x[0] > 0:
            alpha = -alpha
        v = x.copy()
        v[0] -= alpha
        vn = np.linalg.norm(v)
        if vn == 0.0:
            continue
        v /= vn
        h = np.eye(n)
        h[j + 1:, j + 1:] -= 2.0 * np.outer(v, v)
        a = h @ a @ h
    return np.diag(a).copy(), np.array([a[i + 1, i] for i in range(n - 1)])


def _sturm_count(d, e, lam) -> int:
    """Number of eigenvalues of the tridiagonal matrix below ``lam``."""
    count = 0
    q = d[0] - lam
    if q < 0:
        count += 1
    for i in range(1, len(d)):
        if q == 0.0:
            q = 1e-300
        q = d[i] - lam - e[i - 1] ** 2 / q
        if q < 0:
            count += 1
    return count


def _tridiagonal_eigenvalues(d, e) -> list:
    n = len(d)
    if n == 0:
        return []
    radius = [abs(e[i - 1]) if i > 0 else 0.0 for i in range(n)]
    for i in range(n - 1):
        radius[i] += abs(e[i])
    lo = min(d[i] - radius[i] for i in range(n))
    hi = max(d[i] + radius[i] for i in range(n))
    span = max(hi - lo, 1e-300)
    out = []
    for k in range(n):
        a, b = lo - 1e-12 * span, hi + 1e-12 * span
        for _ in range(200):
            mid = 0.5 * (a + b)
            if mid in (a, b):
                break
            if _sturm_count(d, e, mid) > k:
                b = mid
            else:
                a = mid
        out.append(0.5 * (a + b))
    return out


def hermitian_eigenvalues(h) -> list:
    """Ascending eigenvalues of a Hermitian matrix.

    The matrix ``A + iB`` is embedded as the real symmetric ``[[A, -B], [B, A]]``,
    whose spectrum is that of ``h`` with every eigenvalue doubled.
    """
    h = np.asarray(h, dtype=complex)
    h = 0.5 * (h + h.conj().T)
    a, b = h.real, h.imag
    big = np.block([[a, -b], [b, a]])
    d, e = _tridiagonalize(big)
    vals = _tridiagonal_eigenvalues(d, e)
    return vals[::2]


@dataclass(frozen=True)
class GramResult:
    lambda_min: float
    tail: float
    passed: bool
    matrix: np.ndarray
    asymmetry: float


def gram_psd_check(tr: KernelTruncation, points: Sequence, y: Sequence, tol: float = 1e-8,
                   function: str = "K") -> GramResult:
    """Smallest eigenvalue of ``[F(x_i - x_j, i y)]`` for ``F`` the kernel or the Bessel function."""
    evaluator = {"K": kernel_eval, "J": bessel_eval}[function]
    mode = tr.mode
    pts = [[_to_real(c, mode) for c in p] for p in points]
    iy = [(_to_real(0, mode), _to_real(c, mode)) for c in y]
    m = len(pts)
    mat = np.zeros((m, m), dtype=complex)
    tail = 0.0
    for i in range(m):
        for j in range(m):
            diff = [a - b for a, b in zip(pts[i], pts[j])]
            v = evaluator(tr, diff, iy)
            tail = max(tail, v.tail)
            mat[i, j] = v.value
    if tail > tol:
        raise TailTooLarge(f"tail bound {tail:.3e} exceeds {tol:.1e}; raise the order")
    asym = float(np.abs(mat - mat.conj().T).max()) if m else 0.0
    lam = hermitian_eigenvalues(mat)[0] if m else 0.0
    lam = float(lam)
    return GramResult(lam, tail, bool(lam >= -(m * tail + tol)), mat, asym)


# --------------------------------------------------------------------------
# rank-one representing measures and their products


@dataclass(frozen=True)
class Measure1D:
    """``mu_x``: the law of ``x t`` with ``t`` distributed as ``c_k (1-t)^{k-1} (1+t)^k dt`` on [-1, 1].

    ``k = 0`` or ``x = 0`` give the point mass at ``x``.
    """

    x: Fraction
    k: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "k", Fraction(self.k))
        if self.k < 0:
            raise ValueError("k must be nonnegative")

    @property
    def is_point_mass(self) -> bool:
        return self.k == 0 or self.x == 0

    def support(self) -> tuple:
        if self.is_point_mass:
            return self.x, self.x
        return -abs(self.x), abs(self.x)

    def density(self, xi: float) -> float:
        """Lebesgue density in ``xi`` (only for the continuous case)."""
        if self.is_point_mass:
            raise ValueError("point mass has no density")
        t = xi / float(self.x)
        if not -1.0 < t < 1.0:
            return 0.0
        k = float(self.k)
        return beta_constant(k) * (1 - t) ** (k - 1) * (1 + t) ** k / abs(float(self.x))

    def scaled(self, r) -> "Measure1D":
        return Measure1D(self.x * Fraction(r), self.k)


@dataclass(frozen=True)
class ProductMeasure:
    """``mu_x`` for ``Z_2^N``: the product of the coordinate measures."""

    factors: tuple

    @classmethod
    def of(cls, x: Sequence, ks: Sequence) -> "ProductMeasure":
        if len(x) != len(ks):
            raise ValueError("one multiplicity per coordinate expected")
        return cls(tuple(Measure1D(a, k) for a, k in zip(x, ks)))

    @property
    def x(self) -> tuple:
        return tuple(f.x for f in self.factors)

    def scaled(self, r) -> "ProductMeasure":
        return ProductMeasure(tuple(f.scaled(r) for f in self.factors))

    def support(self) -> tuple:
        return tuple(f.support() for f in self.factors)


def measure_moments(mu, n, method: str = "quadrature"):
    """``int xi^n dmu_x`` (``n`` an integer for Measure1D, a multi-index for products)."""
    if isinstance(mu, ProductMeasure):
        if len(n) != len(mu.factors):
            raise ValueError("multi-index length mismatch")
        out = Fraction(1) if method == "exact" else 1.0
        for f, e in zip(mu.factors, n):
            out *= measure_moments(f, e, method)
        return out
    if method == "exact":
        b = Fraction(1) if mu.is_point_mass else beta_moment_exact(mu.k, n)
        return b * mu.x ** n
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    b = 1.0 if mu.is_point_mass else beta_moment_quad(mu.k, n)
    return b * float(mu.x) ** n


def _reflected(mu, g):
    """Measure at ``g x`` for a diagonal sign matrix ``g`` (or ``g = -1`` in rank one)."""
    if isinstance(mu, Measure1D):
        s = g if not isinstance(g, (tuple, list)) else g[0][0]
        return Measure1D(mu.x * s, mu.k), (s,)
    signs = tuple(g[i][i] for i in range(len(g)))
    if any(g[i][j] != 0 for i in range(len(g)) for j in range(len(g)) if i != j):
        raise ValueError("explicit measures are available for sign changes only")
    return ProductMeasure(tuple(Measure1D(f.x * s, f.k) for f, s in zip(mu.factors, signs))), signs


def measure_transform_check(mu, r, g, degree: int = 6, tol: float = 1e-10) -> Verdict:
    """Scaling ``mu_{rx} = mu_x(r^{-1} .)`` and equivariance ``mu_{gx} = mu_x(g^{-1} .)`` at the moment level."""
    r = Fraction(r)
    if r <= 0:
        raise ValueError("r must be positive")
    dim = 1 if isinstance(mu, Measure1D) else len(mu.factors)
    moved, signs = _reflected(mu, g)
    scaled = mu.scaled(r)
    worst = 0.0
    for n in range(degree + 1):
        for nu in monomials(dim, n):
            idx = nu[0] if dim == 1 else nu
            base_q = measure_moments(mu, idx)
            base_e = measure_moments(mu, idx, "exact")
            sign = 1
            for s, e in zip(signs, nu):
                sign *= s ** e
            pairs = [
                (measure_moments(scaled, idx), float(r) ** n * base_q),
                (measure_moments(moved, idx), sign * base_q),
            ]
            for a, b in pairs:
                worst = max(worst, abs(a - b))
            if measure_moments(scaled, idx, "exact") != r ** n * base_e:
                return Verdict(False, nu, f"exact scaling fails at {nu}")
            if measure_moments(moved, idx, "exact") != sign * base_e:
                return Verdict(False, nu, f"exact equivariance fails at {nu}")
    return Verdict(worst <= tol, worst, f"max quadrature moment discrepancy {worst:.2e}")


def moment_equivariance_residuals(table: IntertwinerTable, g) -> list:
    """Monomials ``nu`` where ``V_k(p o g) != (V_k p) o g`` for ``p = x^nu`` (empty when consistent)."""
    bad = []
    for n in range(table.n_max + 1):
        for nu in monomials(table.dim, n):
            p = Polynomial.monomial(nu, 1, table.mode)
            if table.apply(compose_linear(p, g)) != compose_linear(table.image(nu), g):
                bad.append(nu)
    return bad


def moment_scaling_residuals(table: IntertwinerTable, r, x: Sequence) -> list:
    """``m_nu(r x) - r^{|nu|} m_nu(x)`` for every tabulated monomial."""
    r = Fraction(r) if table.mode == EXACT else float(r)
    out = []
    rx = tuple(r * c for c in x)
    for n in range(table.n_max + 1):
        for nu in monomials(table.dim, n):
            m = table.image(nu)
            out.append(m(rx) - r ** n * m(tuple(x)))
    return out


def support_hull_check(mu, x=None) -> Verdict:
    """Support of ``mu_x`` lies in the convex hull of the sign-change orbit of ``x``."""
    if isinstance(mu, Measure1D):
        mu = ProductMeasure((mu,))
    pt = tuple(mu.x) if x is None else tuple(Fraction(c) for c in x)
    if pt != mu.x:
        raise ValueError("measure belongs to a different point")
    n = len(pt)
    orbit = set()
    for mask in range(2 ** n):
        orbit.add(tuple(-c if mask >> i & 1 else c for i, c in enumerate(pt)))
    box = mu.support()
    # the hull of the orbit is the box prod [-|x_i|, |x_i|]; a box lies in it iff its corners do
    hull_box = tuple((-abs(c), abs(c)) for c in pt)
    inside = all(h[0] <= s[0] and s[1] <= h[1] for s, h in zip(box, hull_box))
    corners_in_orbit = all(
        tuple(h[mask >> i & 1] for i, h in enumerate(hull_box)) in orbit for mask in range(2 ** n)
    )
    orbit_in_hull = all(h[0] <= c <= h[1] for p in orbit for c, h in zip(p, hull_box))
    equal = box == hull_box
    ok = inside and corners_in_orbit and orbit_in_hull
    return Verdict(ok, equal, f"support {box}, orbit hull {hull_box}")


# --------------------------------------------------------------------------
# confluent hypergeometric oracle


def hyp1f1(a: float, b: float, z: complex, rtol: float = 1e-17) -> complex:
    """Kummer's series, switching to ``e^z 1F1(b - a, b, -z)`` when ``Re z < 0``."""
    if b <= 0 and float(b).is_integer():
        raise ValueError("b must not be a nonpositive integer")
    z = complex(z)
    if z.real < 0:
        return cmath.exp(z) * hyp1f1(b - a, b, -z, rtol)
    term = 1.0 + 0j
    total = term
    n = 0
    while True:
        term *= (a + n) / (b + n) * z / (n + 1)
        total += term
        n += 1
        if abs(term) <= rtol * abs(total) and n > abs(z):
            return total
        if n > 10000:
            raise RuntimeError("1F1 series did not converge")


def rank_one_kernel_closed(k: float, x: float, y: complex) -> complex:
    """``e^{xy} 1F1(k, 2k + 1, -2xy)``, the rank-one kernel."""
    w = complex(x) * complex(y)
    return cmath.exp(w) * hyp1f1(float(k), 2 * float(k) + 1, -2 * w)

