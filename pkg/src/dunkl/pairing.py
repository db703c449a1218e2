"""The Dunkl pairing ``[p, q]_k = (p(T) q)(0)`` and its Gaussian integral form."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import EXACT, Polynomial, evaluate, factorial_of, homogeneous_parts, monomials, scalar
from .dunklops import DunklParams, Verdict, exp_apply
from .intertwine import IntertwinerTable
from .reflection import coordinate_axes_only


class QuadratureError(RuntimeError):
    pass


def pairing(params: DunklParams, p: Polynomial, q: Polynomial):
    """Replace ``x_i`` by ``T_{e_i}(k)`` in ``p``, apply to ``q`` and evaluate at 0."""
    mode = params.mode
    total = scalar(0, mode)
    by_degree = dict(homogeneous_parts(q))
    ts = [params.dunkl_axis(i) for i in range(params.dim)]
    origin = (0,) * params.dim
    for nu, c in p.items():
        part = by_degree.get(sum(nu))
        if part is None:
            continue
        r = part
        for i, e in enumerate(nu):
            for _ in range(e):
                r = ts[i](r)
        total += c * r.coefficient(origin)
    return total


def classical_pairing(p: Polynomial, q: Polynomial):
    """``[p, q]_0 = (p(d) q)(0) = sum_nu nu! p_nu q_nu``."""
    total = scalar(0, p.mode)
    for nu, c in p.items():
        d = q.coefficient(nu)
        if d != 0:
            total += c * d * factorial_of(nu)
    return total


def pairing_identity_residual(table: IntertwinerTable, p: Polynomial, q: Polynomial):
    """``[V_k p, q]_k - [p, q]_0``."""
    return pairing(table.params, table.apply(p), q) - classical_pairing(p, q)


def pairing_matrix(params: DunklParams, n: int) -> list:
    """``G[a][b] = [x^{mu_a}, x^{mu_b}]_k`` over ``monomials(N, n)``."""
    dim = params.dim
    mons = monomials(dim, n)
    ts = [params.dunkl_axis(i) for i in range(dim)]
    origin = (0,) * dim
    cols = []
    for nu in mons:
        images = {origin: Polynomial.monomial(nu, 1, params.mode)}
        for d in range(1, n + 1):
            for mu in monomials(dim, d):
                i = max(j for j, e in enumerate(mu) if e)
                src = mu[:i] + (mu[i] - 1,) + mu[i + 1:]
                images[mu] = ts[i](images[src])
        cols.append([images[mu].coefficient(origin) for mu in mons])
    return [list(r) for r in zip(*cols)]


def pairing_identity_matrix_residual(table: IntertwinerTable, n: int) -> list:
    """``V_n^T G_n - diag(nu!)``: every entry is a residual ``[V_k x^mu, x^nu]_k - [x^mu, x^nu]_0``."""
    mons = monomials(table.dim, n)
    g = pairing_matrix(table.params, n)
    v = table.matrices[n]
    size = len(mons)
    out = []
    for a in range(size):
        row = []
        for b in range(size):
            s = sum((v[r][a] * g[r][b] for r in range(size)), scalar(0, table.mode))
            if a == b:
                s -= factorial_of(mons[a])
            row.append(s)
        out.append(row)
    return out


def pairing_positivity_check(params: DunklParams, p: Polynomial) -> Verdict:
    if params.mode != EXACT:
        raise ValueError("positivity of the pairing is checked in exact mode")
    if not params.k.is_nonnegative():
        raise ValueError("needs k >= 0")
    v = pairing(params, p, p)
    return Verdict(v >= 0, v, f"[p,p]_k = {v}")


# --------------------------------------------------------------------------
# weight and Gaussian quadrature


@dataclass(frozen=True)
class QuadSpec:
    nodes_per_axis: int = 24
    radius_cutoff: float = 8.0
    tolerance: float = 1e-10

    @classmethod
    def from_dict(cls, d: dict | None) -> "QuadSpec":
        d = d or {}
        return cls(int(d.get("nodes_per_axis", cls.nodes_per_axis)),
                   float(d.get("radius_cutoff", cls.radius_cutoff)),
                   float(d.get("tolerance", cls.tolerance)))


class WeightData:
    """``w_k(x) = prod_a |<a, x>|^{2 k(a)}`` and the Gaussian normalization."""

    def __init__(self, params: DunklParams):
        self.params = params
        self.roots = np.array([[float(c) for c in r] for r in params.roots.positive_roots])
        self.exponents = np.array([2.0 * float(k) for k in params.k.per_root])
        self._gauss: dict = {}

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(np.prod(np.abs(self.roots @ x) ** self.exponents))

    def evaluate_many(self, xs: np.ndarray) -> np.ndarray:
        return np.prod(np.abs(xs @ self.roots.T) ** self.exponents, axis=1)

    def gauss_constant(self, spec: QuadSpec = QuadSpec()) -> float:
        """``1 / int e^{-|x|^2/2} w_k(x) dx`` with the rule used for pairing integrals."""
        if spec not in self._gauss:
            one = Polynomial.constant(self.params.dim, 1.0, "float")
            self._gauss[spec] = 1.0 / gaussian_integral(self, one, spec)
        return self._gauss[spec]


def _axis_multiplicities(params: DunklParams) -> list:
    ks = [0.0] * params.dim
    for j, r in enumerate(params.roots.positive_roots):
        axis = next(i for i, c in enumerate(r) if c != 0)
        ks[axis] += float(params.k.per_root[j])
    return ks


def _generalized_hermite_rule(k: float, n: int):
    """Symmetric nodes/weights for ``int f(x) |x|^{2k} e^{-x^2/2} dx`` (2n nodes, none at 0)."""
    from scipy.special import roots_genlaguerre

    u, w = roots_genlaguerre(n, k - 0.5)
    x = np.sqrt(2.0 * u)
    scale = 2.0 ** (k - 0.5)
    return np.concatenate([-x[::-1], x]), scale * np.concatenate([w[::-1], w])


def _tensor_gauss(poly: Polynomial, ks: list, n: int) -> float:
    rules = [_generalized_hermite_rule(k, n) for k in ks]
    total = 0.0
    for mono, c in poly.items():
        term = float(c)
        for (x, w), e in zip(rules, mono):
            term *= float(np.dot(w, x ** e))
        total += term
    return total


def _polar_2d(weight: WeightData, poly: Polynomial, tol: float) -> float:
    from scipy.integrate import quad

    gamma = float(sum(weight.exponents)) / 2.0
    # mirror directions cut the circle into arcs with algebraic endpoint singularities
    cuts = set()
    for a in weight.roots:
        phi = math.atan2(a[1], a[0]) + math.pi / 2
        for shift in (0.0, math.pi):
            cuts.add((phi + shift) % (2 * math.pi))
    cuts = sorted(cuts) + [min(cuts) + 2 * math.pi]
    total = 0.0
    for n, part in homogeneous_parts(poly):
        radial = 2.0 ** ((n + 2 * gamma) / 2) * math.gamma((n + 2 * gamma + 2) / 2)

        def f(theta, part=part):
            d = (math.cos(theta), math.sin(theta))
            return evaluate(part, d) * weight(d)

        ang = 0.0
        for a, b in zip(cuts[:-1], cuts[1:]):
            val, err = quad(f, a, b, epsabs=tol * 1e-3, epsrel=tol, limit=400)
            if err > max(tol, tol * abs(val)) * 10:
                raise QuadratureError(f"angular integral did not converge (error {err:.2e})")
            ang += val
        total += radial * ang
    return total


def _offset_tensor(weight: WeightData, poly: Polynomial, spec: QuadSpec) -> float:
    # Gauss-Legendre nodes on [-R, R]; an even node count keeps the coordinate
    # planes out, the irrational shift keeps the other mirrors out
    n = spec.nodes_per_axis + (spec.nodes_per_axis % 2)
    t, w = np.polynomial.legendre.leggauss(n)
    R = spec.radius_cutoff
    t = R * t + R * 1e-3 * math.sqrt(2) / n
    w = R * w
    grids = np.meshgrid(*([t] * poly.dim), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    wts = np.ones(len(pts))
    for ws in np.meshgrid(*([w] * poly.dim), indexing="ij"):
        wts = wts * ws.ravel()
    vals = np.array([evaluate(poly, tuple(p)) for p in pts])
    gauss = np.exp(-0.5 * np.sum(pts * pts, axis=1))
    return float(np.sum(wts * vals * gauss * weight.evaluate_many(pts)))


def gaussian_integral(weight: WeightData, poly: Polynomial, spec: QuadSpec = QuadSpec()) -> float:
    """``int poly(x) e^{-|x|^2/2} w_k(x) dx``.

    Product groups use a tensor generalized Gauss-Hermite rule (exact for
    polynomials up to its degree; the result is cross-checked against a rule
    with twice the nodes), planar groups use polar coordinates with an
    adaptive angular integral split at the mirrors, and anything else falls
    back to an offset tensor Gauss-Legendre grid on ``[-R, R]^N``.
    """
    params = weight.params
    poly = poly.to_float()
    if coordinate_axes_only(params.roots):
        ks = _axis_multiplicities(params)
        n = max(spec.nodes_per_axis, poly.degree // 2 + 2)
        a = _tensor_gauss(poly, ks, n)
        b = _tensor_gauss(poly, ks, 2 * n)
        if abs(a - b) > spec.tolerance * max(1.0, abs(b)):
            raise QuadratureError(f"tensor rule unstable: {a!r} vs {b!r}")
        return b
    if params.dim == 2:
        return _polar_2d(weight, poly, spec.tolerance)
    return _offset_tensor(weight, poly, spec)


def gaussian_pairing_quadrature(params: DunklParams, p: Polynomial, q: Polynomial,
                                spec: QuadSpec = QuadSpec(), weight: WeightData | None = None) -> float:
    """``c_k int e^{-Lap_k/2} p  e^{-Lap_k/2} q  e^{-|x|^2/2} w_k dx`` numerically."""
    if not params.k.is_nonnegative():
        raise ValueError("the Gaussian form needs k >= 0")
    weight = weight or WeightData(params)
    lap = params.laplacian_k
    half = Fraction(-1, 2) if params.mode == EXACT else -0.5
    pp = exp_apply(lap, half, p)
    qq = exp_apply(lap, half, q)
    integral = gaussian_integral(weight, (pp * qq).to_float(), spec)
    return weight.gauss_constant(spec) * integral
