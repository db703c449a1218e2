"""Nonnegative test polynomials, rational grids and exact sign scans.

Deciding whether a polynomial is nonnegative is hard, so the families here
are nonnegative by construction (squares, sums and products of squares,
times powers of ``|x|^2``).  They probe a subfamily of the nonnegative cone.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from ..algebra import EXACT, Polynomial, basis, format_poly


@dataclass(frozen=True)
class TestPolynomialFamily:
    dim: int
    count: int = 50
    max_degree: int = 6
    seed: int = 0
    coefficient_range: int = 3

    __test__ = False  # not a pytest class

    def _random_poly(self, rng: random.Random, degree: int) -> Polynomial:
        terms = {}
        for mono in basis(self.dim, degree):
            if rng.random() < 0.6:
                c = rng.randint(-self.coefficient_range, self.coefficient_range)
                if c:
                    terms[mono] = Fraction(c, rng.choice((1, 1, 2)))
        if not terms:
            terms[(0,) * self.dim] = Fraction(1)
        return Polynomial(self.dim, terms, EXACT)

    def _norm_sq(self) -> Polynomial:
        return sum((Polynomial.variable(self.dim, i) ** 2 for i in range(self.dim)),
                   Polynomial.zero(self.dim))

    def generate(self) -> list:
        """``count`` pairs ``(label, p)`` with ``p >= 0`` on R^N and ``deg p <= max_degree``."""
        rng = random.Random(self.seed)
        half = self.max_degree // 2
        out = [("|x|^2", self._norm_sq())]
        kinds = ("square", "sum_of_squares", "product_of_squares", "norm_power_times_square")
        i = 0
        while len(out) < self.count:
            kind = kinds[i % len(kinds)]
            i += 1
            if kind == "square":
                p = self._random_poly(rng, rng.randint(1, half)) ** 2
            elif kind == "sum_of_squares":
                p = Polynomial.zero(self.dim)
                for _ in range(rng.randint(2, 3)):
                    p = p + self._random_poly(rng, rng.randint(1, half)) ** 2
            elif kind == "product_of_squares":
                a = rng.randint(1, max(1, half - 1))
                b = rng.randint(1, max(1, half - a))
                p = self._random_poly(rng, a) ** 2 * self._random_poly(rng, b) ** 2
            else:
                m = rng.randint(1, half)
                q = self._random_poly(rng, rng.randint(0, half - m))
                p = self._norm_sq() ** m * q ** 2
            if p.is_zero() or p.degree > self.max_degree:
                continue
            out.append((f"{kind}:{format_poly(p)}", p))
        return out


def zero_touching_1d(count: int = 50, seed: int = 0, max_degree: int = 6) -> list:
    """``(p, zeros)`` with ``p = prod (x - a_i)^2 * r`` (``r`` a positive square plus constant)."""
    rng = random.Random(seed)
    x = Polynomial.variable(1, 0)
    out = [(x ** 2 * (x - 1) ** 2, [Fraction(0), Fraction(1)])]
    while len(out) < count:
        nz = rng.randint(1, max_degree // 2)
        zeros = sorted({Fraction(rng.randint(-6, 6), rng.choice((1, 2, 4))) for _ in range(nz)})
        p = Polynomial.constant(1, 1)
        for a in zeros:
            p = p * (x - Polynomial.constant(1, a)) ** 2
        spare = max_degree - p.degree
        if spare >= 2 and rng.random() < 0.5:
            c = Fraction(rng.randint(-3, 3), 2)
            p = p * ((x - Polynomial.constant(1, c)) ** 2 + Polynomial.constant(1, Fraction(1, 4)))
        out.append((p, zeros))
    return out


# --------------------------------------------------------------------------
# grids


@dataclass(frozen=True)
class DyadicGrid:
    """Points ``a / 2^j`` with integer ``a`` inside the closed ball of the given radius."""

    dim: int
    exponent: int
    numerators: tuple
    radius: Fraction

    @property
    def points(self) -> list:
        d = 2 ** self.exponent
        return [tuple(Fraction(a, d) for a in p) for p in self.numerators]

    def __len__(self) -> int:
        return len(self.numerators)


def dyadic_ball_grid(dim: int, radius=2, min_points: int = 1000) -> DyadicGrid:
    """Finest-needed dyadic grid of the ball with at least ``min_points`` points."""
    radius = Fraction(radius)
    j = 0
    while True:
        d = 2 ** j
        bound = math.floor(radius * d)
        r2 = radius * radius * d * d
        pts = tuple(p for p in product(range(-bound, bound + 1), repeat=dim)
                    if sum(a * a for a in p) <= r2)
        if len(pts) >= min_points:
            return DyadicGrid(dim, j, pts, radius)
        j += 1


# --------------------------------------------------------------------------
# exact sign scans with integer arithmetic


@dataclass(frozen=True)
class ScanResult:
    minimum: Fraction
    argmin: tuple
    negatives: int
    points: int

    @property
    def ok(self) -> bool:
        return self.negatives == 0


class GridScanner:
    """Evaluate many polynomials on one dyadic grid exactly.

    On ``x = a / 2^j`` a polynomial of degree ``<= D`` times ``L 2^{jD}`` (``L``
    the common denominator of its coefficients) is an integer polynomial in
    ``a``; monomial values of ``a`` are tabulated once per grid.
    """

    def __init__(self, grid: DyadicGrid, max_degree: int):
        self.grid = grid
        self.max_degree = max_degree
        self.monos = basis(grid.dim, max_degree)
        self.table = []
        for p in grid.numerators:
            pw = [[1] * (max_degree + 1) for _ in p]
            for i, a in enumerate(p):
                for e in range(1, max_degree + 1):
                    pw[i][e] = pw[i][e - 1] * a
            row = {}
            for m in self.monos:
                v = 1
                for i, e in enumerate(m):
                    v *= pw[i][e]
                row[m] = v
            self.table.append(row)

    def _integerize(self, p: Polynomial) -> tuple:
        if p.mode != EXACT:
            raise ValueError("exact scans need exact polynomials")
        if p.degree > self.max_degree:
            raise ValueError(f"degree {p.degree} exceeds scanner degree {self.max_degree}")
        den = 1
        for _, c in p.items():
            den = den * c.denominator // math.gcd(den, c.denominator)
        j, D = self.grid.exponent, self.max_degree
        terms = [(m, int(c * den) * 2 ** (j * (D - sum(m)))) for m, c in p.items()]
        return terms, Fraction(1, den * 2 ** (j * D))

    def scan(self, p: Polynomial) -> ScanResult:
        terms, scale = self._integerize(p)
        best, arg, neg = None, None, 0
        for idx, row in enumerate(self.table):
            v = 0
            for m, c in terms:
                v += c * row[m]
            if v < 0:
                neg += 1
            if best is None or v < best:
                best, arg = v, idx
        d = 2 ** self.grid.exponent
        point = tuple(Fraction(a, d) for a in self.grid.numerators[arg])
        return ScanResult(best * scale, point, neg, len(self.table))
