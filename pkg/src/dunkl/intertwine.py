"""The intertwining operator ``V_k``, built degree by degree.

For a monomial ``x^nu`` of degree ``n`` the image ``u = V_k(x^nu)`` is the
unique homogeneous polynomial of degree ``n`` with

    T_{e_i}(k) u = nu_i V_k(x^{nu - e_i}),   i = 1..N.

All these constraints are stacked into one linear system per degree; its
coefficient matrix does not depend on ``nu``, so one elimination serves every
monomial of the degree.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg
from .algebra import (
    EXACT,
    FLOAT,
    Polynomial,
    coefficient_vector,
    homogeneous_parts,
    monomial_index,
    monomials,
    scalar,
)
from .dunklops import DunklParams
from .reflection import MultiplicityFunction, RootSystem, coordinate_axes_only


class SingularMultiplicityError(ArithmeticError):
    def __init__(self, degree: int, rank: int | None, size: int):
        super().__init__(
            f"intertwining system singular in degree {degree} (rank {rank}, need {size})"
        )
        self.degree = degree
        self.rank = rank
        self.size = size


class DegreeError(ValueError):
    pass


@dataclass
class IntertwinerTable:
    """Per-degree matrices of ``V_k`` on the monomial basis of homogeneous polynomials.

    ``matrices[n][r][c]`` is the coefficient of ``monomials(N, n)[r]`` in
    ``V_k(monomials(N, n)[c])``.
    """

    params: DunklParams
    matrices: list = field(default_factory=list)

    @property
    def n_max(self) -> int:
        return len(self.matrices) - 1

    @property
    def dim(self) -> int:
        return self.params.dim

    @property
    def mode(self) -> str:
        return self.params.mode

    def image(self, nu: Sequence[int]) -> Polynomial:
        nu = tuple(nu)
        n = sum(nu)
        if n > self.n_max:
            raise DegreeError(f"degree {n} exceeds table order {self.n_max}")
        col = monomial_index(self.dim, n)[nu]
        mat = self.matrices[n]
        mons = monomials(self.dim, n)
        return Polynomial(self.dim, {m: mat[r][col] for r, m in enumerate(mons)}, self.mode)

    def apply(self, p: Polynomial) -> Polynomial:
        out = Polynomial.zero(self.dim, self.mode)
        for n, part in homogeneous_parts(p):
            if n > self.n_max:
                raise DegreeError(f"degree {n} exceeds table order {self.n_max}")
            mat = self.matrices[n]
            mons = monomials(self.dim, n)
            idx = monomial_index(self.dim, n)
            acc = [0] * len(mons)
            for m, c in part.items():
                col = idx[m]
                for r in range(len(mons)):
                    v = mat[r][col]
                    if v != 0:
                        acc[r] += c * v
            out = out + Polynomial(self.dim, zip(mons, acc), p.mode)
        return out

    __call__ = apply

    def extend(self, n_max: int) -> "IntertwinerTable":
        """Add degrees up to ``n_max`` in place."""
        while self.n_max < n_max:
            self.matrices.append(_solve_degree(self.params, self.n_max + 1, self.matrices[-1]))
        return self

    def perturbed(self, degree: int, row: int, col: int, delta) -> "IntertwinerTable":
        """Copy with one matrix entry changed (fault injection for negative controls)."""
        mats = [[list(r) for r in m] for m in self.matrices]
        mats[degree][row][col] += scalar(delta, self.mode)
        return IntertwinerTable(self.params, mats)

    # persistence ----------------------------------------------------------
    def to_json(self) -> dict:
        def enc(v):
            return str(v) if self.mode == EXACT else repr(float(v))

        roots = self.params.roots
        return {
            "group": {
                "name": roots.name,
                "positive_roots": [[enc(c) for c in r] for r in roots.positive_roots],
            },
            "k": [enc(v) for v in self.params.k.orbit_values],
            "mode": self.mode,
            "order": "graded-lex",
            "degrees": {
                str(n): [[enc(v) for v in row] for row in mat] for n, mat in enumerate(self.matrices)
            },
        }

    @classmethod
    def from_json(cls, data: dict) -> "IntertwinerTable":
        mode = data["mode"]
        dec = Fraction if mode == EXACT else float
        g = data["group"]
        roots = RootSystem(
            len(g["positive_roots"][0]),
            tuple(tuple(dec(c) for c in r) for r in g["positive_roots"]),
            mode,
            g.get("name", ""),
        )
        k = MultiplicityFunction(roots, tuple(dec(v) for v in data["k"]))
        degrees = data["degrees"]
        mats = [[[dec(v) for v in row] for row in degrees[str(n)]] for n in range(len(degrees))]
        return cls(DunklParams(roots, k, len(mats) - 1), mats)

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)

    @classmethod
    def load(cls, path) -> "IntertwinerTable":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _solve_degree(params: DunklParams, n: int, prev: list) -> list:
    dim, mode = params.dim, params.mode
    mons = monomials(dim, n)
    lower = monomials(dim, n - 1)
    lower_idx = monomial_index(dim, n - 1)
    ts = [params.dunkl_axis(i) for i in range(dim)]

    # columns: stacked coefficient vectors of (T_1 x^mu, ..., T_N x^mu)
    columns = []
    for mu in mons:
        col = []
        for t in ts:
            col.extend(coefficient_vector(t.image(mu), lower))
        columns.append(col)
    matrix = [list(r) for r in zip(*columns)]

    rhs = []
    zero = scalar(0, mode)
    for nu in mons:
        vec = []
        for i in range(dim):
            if nu[i] == 0:
                vec.extend([zero] * len(lower))
                continue
            src = nu[:i] + (nu[i] - 1,) + nu[i + 1:]
            c = lower_idx[src]
            vec.extend(nu[i] * prev[r][c] for r in range(len(lower)))
        rhs.append(vec)

    if mode == EXACT:
        try:
            cols = linalg.solve(matrix, rhs)
        except linalg.SingularSystemError as err:
            raise SingularMultiplicityError(n, err.rank, len(mons)) from err
    else:
        a = np.array(matrix, dtype=float)
        b = np.array(rhs, dtype=float).T
        rk = np.linalg.matrix_rank(a, tol=1e-10 * max(1.0, np.abs(a).max()))
        if rk < len(mons):
            raise SingularMultiplicityError(n, int(rk), len(mons))
        x, *_ = np.linalg.lstsq(a, b, rcond=None)
        resid = np.abs(a @ x - b).max() if b.size else 0.0
        if resid > 1e-8 * max(1.0, np.abs(b).max()):
            raise SingularMultiplicityError(n, int(rk), len(mons))
        cols = x.T.tolist()
    return [list(r) for r in zip(*cols)]


def build_vk(params: DunklParams, n_max: int | None = None) -> IntertwinerTable:
    """Construct ``V_k`` on homogeneous polynomials of degree ``0..n_max``."""
    n_max = params.n_max if n_max is None else n_max
    one = scalar(1, params.mode)
    table = IntertwinerTable(params, [[[one]]])
    return table.extend(n_max)


def vk_apply(table: IntertwinerTable, p: Polynomial) -> Polynomial:
    return table.apply(p)


def moment_function(table: IntertwinerTable, nu: Sequence[int]) -> Polynomial:
    """``m_{k,nu} = V_k(x^nu)``."""
    return table.image(nu)


def intertwining_residuals(table: IntertwinerTable, n_max: int | None = None):
    """Yield ``(nu, i, T_i V_k x^nu - nu_i V_k x^{nu - e_i})`` for every monomial and axis."""
    params = table.params
    n_max = table.n_max if n_max is None else n_max
    for n in range(n_max + 1):
        for nu in monomials(params.dim, n):
            v = table.image(nu)
            for i in range(params.dim):
                lhs = params.dunkl_axis(i)(v)
                if nu[i]:
                    src = nu[:i] + (nu[i] - 1,) + nu[i + 1:]
                    lhs = lhs - table.image(src).scale(nu[i])
                yield nu, i, lhs


# --------------------------------------------------------------------------
# rank one: explicit integral representation


def beta_constant(k: float) -> float:
    """``Gamma(k + 1/2) / (Gamma(1/2) Gamma(k))``, normalizing the rank-one density."""
    k = float(k)
    if k <= 0:
        raise ValueError("k must be positive")
    return math.exp(math.lgamma(k + 0.5) - math.lgamma(0.5) - math.lgamma(k))


def beta_moment_quad(k, n: int) -> float:
    """``c_k int_{-1}^1 t^n (1-t)^{k-1} (1+t)^k dt`` by algebraic-weight Gauss-Kronrod quadrature."""
    from scipy.integrate import quad

    k = float(k)
    if k <= 0:
        raise ValueError("k must be positive")
    # weight='alg' integrates f(t) (t+1)^a (1-t)^b exactly in the singular factor
    val, _ = quad(lambda t: t ** n, -1.0, 1.0, weight="alg", wvar=(k, k - 1.0),
                  epsabs=1e-15, epsrel=1e-13, limit=200)
    return beta_constant(k) * val


def beta_moment_exact(k, n: int) -> Fraction:
    """Closed form of the same moment: a ratio of Pochhammer symbols.

    Writing the density as ``(1 - t^2)^{k-1} (1 + t)`` reduces the integral to
    Beta functions: ``(1/2)_m / (k + 1/2)_m`` with ``m = ceil(n / 2)``.
    """
    k = Fraction(k)
    if k <= 0:
        raise ValueError("k must be positive")
    m = (n + 1) // 2
    out = Fraction(1)
    for j in range(m):
        out *= Fraction(1, 2) + j
        out /= k + Fraction(1, 2) + j
    return out


def vk_1d_closed(k, p: Polynomial, method: str = "quadrature") -> Polynomial:
    """``V_k p`` for ``Z_2`` from the integral representation, coefficientwise."""
    if p.dim != 1:
        raise ValueError("one-variable polynomial expected")
    if method == "quadrature":
        return Polynomial(1, {m: float(c) * beta_moment_quad(k, m[0]) for m, c in p.items()}, FLOAT)
    if method == "exact":
        return Polynomial(1, {m: c * beta_moment_exact(k, m[0]) for m, c in p.items()}, p.mode)
    raise ValueError(f"unknown method {method!r}")


def vk_z2n_tensor(ks: Sequence, nu: Sequence[int]):
    """Coefficient of ``x^nu`` in ``V_k(x^nu)`` for ``Z_2^N``: a product of rank-one moments."""
    if len(ks) != len(nu):
        raise ValueError("one multiplicity per coordinate expected")
    out = Fraction(1)
    for k, e in zip(ks, nu):
        if k == 0:
            continue
        out *= beta_moment_exact(k, e)
    return out


def vk_z2n_table_check(table: IntertwinerTable) -> list:
    """Mismatches between a generic table and the product formula (empty list = agreement)."""
    roots = table.params.roots
    if not coordinate_axes_only(roots) or len(roots.positive_roots) != roots.dim:
        raise ValueError("product formula needs the group Z_2^N")
    ks = [None] * roots.dim
    for j, r in enumerate(roots.positive_roots):
        axis = next(i for i, c in enumerate(r) if c != 0)
        ks[axis] = table.params.k.per_root[j]
    bad = []
    for n in range(table.n_max + 1):
        for nu in monomials(roots.dim, n):
            expect = Polynomial.monomial(nu, vk_z2n_tensor(ks, nu), table.mode)
            got = table.image(nu)
            if got != expect:
                bad.append((nu, got, expect))
    return bad


def moment_inequality_violations(table: IntertwinerTable, points) -> list:
    """Witnesses against ``m_nu(x)^2 <= m_{2nu}(x)`` and ``m_nu(x)^2 <= |x|^{2|nu|}``.

    Squared forms keep everything rational; only ``|2nu| <= n_max`` is tested.
    """
    bad = []
    dim = table.dim
    for n in range(table.n_max // 2 + 1):
        for nu in monomials(dim, n):
            m = table.image(nu)
            m2 = table.image(tuple(2 * e for e in nu))
            for x in points:
                x = tuple(x)
                v = m(x)
                r2 = sum(c * c for c in x)
                if v * v > m2(x):
                    bad.append(("square", nu, x))
                if v * v > r2 ** n:
                    bad.append(("norm", nu, x))
    return bad
