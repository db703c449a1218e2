"""Root systems, finite reflection groups and multiplicity functions.

Root representatives are stored with rational coordinates and arbitrary
lengths; every formula that depends on the normalization carries ``|alpha|^2``
explicitly, so nothing here requires the roots to have squared length 2.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .algebra import (
    EXACT,
    FLOAT,
    DimensionError,
    check_mode,
    dot,
    identity,
    mat_mul,
    mat_vec,
    norm_sq,
    scalar,
    vector,
)

DEFAULT_CLOSURE_BOUND = 10**6
_FLOAT_DIGITS = 9


class RootSystemError(ValueError):
    pass


class ClosureBoundExceeded(RuntimeError):
    pass


def reflect(alpha: Sequence, x: Sequence) -> tuple:
    """``sigma_alpha(x) = x - 2 <alpha, x> / |alpha|^2 * alpha``."""
    if len(alpha) != len(x):
        raise DimensionError("root and point dimensions differ")
    a2 = norm_sq(alpha)
    if a2 == 0:
        raise RootSystemError("zero root")
    f = 2 * dot(alpha, x) / a2
    return tuple(xi - f * ai for xi, ai in zip(x, alpha))


def reflection_matrix(alpha: Sequence) -> tuple:
    a2 = norm_sq(alpha)
    if a2 == 0:
        raise RootSystemError("zero root")
    n = len(alpha)
    return tuple(
        tuple((1 if i == j else 0) - 2 * alpha[i] * alpha[j] / a2 for j in range(n))
        for i in range(n)
    )


def _line_key(v: Sequence, mode: str) -> tuple:
    """Canonical key of the line spanned by ``v`` (sign and length forgotten)."""
    if mode == EXACT:
        lead = next(c for c in v if c != 0)
        return tuple(c / lead for c in v)
    length = math.sqrt(sum(float(c) ** 2 for c in v))
    unit = [float(c) / length for c in v]
    lead = next(c for c in unit if abs(c) > 1e-7)
    sign = 1.0 if lead > 0 else -1.0
    return tuple(round(sign * c, _FLOAT_DIGITS) + 0.0 for c in unit)


def _matrix_key(g, mode: str) -> tuple:
    if mode == EXACT:
        return tuple(tuple(r) for r in g)
    return tuple(tuple(round(float(c), _FLOAT_DIGITS) + 0.0 for c in r) for r in g)


@dataclass(frozen=True)
class RootSystem:
    """Positive roots with their orbit partition under the generated group."""

    dim: int
    positive_roots: tuple
    mode: str = EXACT
    name: str = ""
    squared_lengths: tuple = field(init=False)
    orbits: tuple = field(init=False)

    def __post_init__(self):
        check_mode(self.mode)
        roots = tuple(vector(r, self.mode) for r in self.positive_roots)
        if not roots:
            raise RootSystemError("empty root system")
        for r in roots:
            if len(r) != self.dim:
                raise DimensionError(f"root {r} not in dimension {self.dim}")
            if all(c == 0 for c in r):
                raise RootSystemError("zero root")
        keys = [_line_key(r, self.mode) for r in roots]
        if len(set(keys)) != len(keys):
            raise RootSystemError("two positive roots span the same line")
        object.__setattr__(self, "positive_roots", roots)
        object.__setattr__(self, "squared_lengths", tuple(norm_sq(r) for r in roots))
        self._check_closure(keys)
        object.__setattr__(self, "orbits", self._orbit_partition(keys))

    def _check_closure(self, keys):
        lines = set(keys)
        for a in self.positive_roots:
            for b in self.positive_roots:
                if _line_key(reflect(a, b), self.mode) not in lines:
                    raise RootSystemError(
                        f"reflection of {b} in {a} leaves the root system"
                    )

    def _orbit_partition(self, keys) -> tuple:
        index = {k: i for i, k in enumerate(keys)}
        parent = list(range(len(keys)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for a in self.positive_roots:
            for j, b in enumerate(self.positive_roots):
                i = index[_line_key(reflect(a, b), self.mode)]
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
        groups: dict = {}
        for i in range(len(keys)):
            groups.setdefault(find(i), []).append(i)
        return tuple(tuple(g) for g in sorted(groups.values(), key=lambda g: g[0]))

    @property
    def orbit_of_root(self) -> tuple:
        out = [0] * len(self.positive_roots)
        for o, members in enumerate(self.orbits):
            for i in members:
                out[i] = o
        return tuple(out)

    def index_of(self, v: Sequence) -> int:
        """Index of the positive root spanning the same line as ``v``."""
        key = _line_key(v, self.mode)
        for i, r in enumerate(self.positive_roots):
            if _line_key(r, self.mode) == key:
                return i
        raise KeyError(f"{v} is not proportional to a root")

    def describe(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "mode": self.mode,
            "positive_roots": [[str(c) for c in r] for r in self.positive_roots],
            "orbits": [list(o) for o in self.orbits],
        }


@dataclass(frozen=True)
class ReflectionGroup:
    root_system: RootSystem
    elements: tuple
    generators: tuple

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def dim(self) -> int:
        return self.root_system.dim

    @property
    def mode(self) -> str:
        return self.root_system.mode

    def __len__(self) -> int:
        return len(self.elements)

    def act(self, g, v: Sequence) -> tuple:
        return mat_vec(g, v)

    def reflections(self) -> list:
        """Elements that are reflections: involutions with a one-dimensional (-1)-eigenspace."""
        n = self.dim
        out = []
        ident = identity(n, self.mode)
        for g in self.elements:
            if _matrix_key(mat_mul(g, g), self.mode) != _matrix_key(ident, self.mode):
                continue
            trace = sum(g[i][i] for i in range(n))
            # involution with eigenvalues +-1: trace = n - 2 * (dim of -1 eigenspace)
            if abs(trace - (n - 2)) < 1e-9:
                out.append(g)
        return out

    def orbit(self, v: Sequence) -> list:
        seen = {}
        for g in self.elements:
            w = mat_vec(g, v)
            seen.setdefault(_matrix_key([w], self.mode), w)
        return list(seen.values())


def build_group(roots: RootSystem, bound: int = DEFAULT_CLOSURE_BOUND) -> ReflectionGroup:
    """Enumerate the group generated by the root reflections by product closure."""
    mode = roots.mode
    gens = tuple(reflection_matrix(a) for a in roots.positive_roots)
    ident = identity(roots.dim, mode)
    elements = {_matrix_key(ident, mode): ident}
    queue = deque([ident])
    while queue:
        g = queue.popleft()
        for s in gens:
            h = mat_mul(g, s)
            key = _matrix_key(h, mode)
            if key not in elements:
                if len(elements) >= bound:
                    raise ClosureBoundExceeded(
                        f"more than {bound} group elements; is the group finite?"
                    )
                elements[key] = h
                queue.append(h)
    ordered = sorted(elements.items(), key=lambda kv: kv[0])
    # keep the identity first
    ordered.sort(key=lambda kv: kv[0] != _matrix_key(ident, mode))
    return ReflectionGroup(roots, tuple(g for _, g in ordered), gens)


@dataclass(frozen=True)
class MultiplicityFunction:
    """One value per orbit of roots."""

    root_system: RootSystem
    orbit_values: tuple

    def __post_init__(self):
        vals = tuple(scalar(v, self.root_system.mode) for v in self.orbit_values)
        if len(vals) != len(self.root_system.orbits):
            raise ValueError(
                f"{len(self.root_system.orbits)} orbit values needed, got {len(vals)}"
            )
        object.__setattr__(self, "orbit_values", vals)

    @classmethod
    def constant(cls, roots: RootSystem, k) -> "MultiplicityFunction":
        return cls(roots, (k,) * len(roots.orbits))

    @property
    def per_root(self) -> tuple:
        return tuple(self.orbit_values[o] for o in self.root_system.orbit_of_root)

    def __call__(self, alpha: Sequence):
        return self.per_root[self.root_system.index_of(alpha)]

    @property
    def gamma(self):
        return sum(self.per_root, scalar(0, self.root_system.mode))

    def is_nonnegative(self) -> bool:
        return all(v >= 0 for v in self.orbit_values)

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.orbit_values)


# --------------------------------------------------------------------------
# presets


def _unit(n: int, i: int) -> list:
    v = [0] * n
    v[i] = 1
    return v


def _z2n(n):
    return [_unit(n, i) for i in range(n)]


def _a(n):
    if n < 2:
        raise ValueError("A_{N-1} needs N >= 2")
    return [[(1 if t == i else -1 if t == j else 0) for t in range(n)] for i in range(n) for j in range(i + 1, n)]


def _d(n):
    if n < 2:
        raise ValueError("D_N needs N >= 2")
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            out.append([(1 if t == i else -1 if t == j else 0) for t in range(n)])
            out.append([(1 if t in (i, j) else 0) for t in range(n)])
    return out


def _b(n):
    return _z2n(n) + _d(n) if n >= 2 else _z2n(n)


_G2_IN_R3 = [
    [1, -1, 0], [0, 1, -1], [1, 0, -1],
    [2, -1, -1], [1, -2, 1], [1, 1, -2],
]


def _dihedral_float(m):
    return [[-math.sin(j * math.pi / m), math.cos(j * math.pi / m)] for j in range(m)]


def preset(name: str, N: int | None = None, m: int | None = None, mode: str = EXACT) -> RootSystem:
    """Standard root systems: ``Z2`` (Z_2^N), ``A`` (A_{N-1} in R^N), ``B``, ``D``, ``I2``.

    ``I2(m)`` is exact only for ``m`` in {2, 3, 4, 6}; ``m = 3`` and ``m = 6`` are
    then realized in R^3 (as A_2 and G_2 in the sum-zero plane) because a
    rational planar realization does not exist.
    """
    check_mode(mode)
    key = name.upper().replace("_", "")
    if key in ("Z2", "Z2N"):
        roots, label = _z2n(N or 1), f"Z2^{N or 1}"
    elif key == "A":
        roots, label = _a(N), f"A{N - 1}"
    elif key == "B":
        roots, label = _b(N), f"B{N}"
    elif key == "D":
        roots, label = _d(N), f"D{N}"
    elif key == "I2":
        if m is None or m < 2:
            raise ValueError("I2(m) needs m >= 2")
        label = f"I2({m})"
        if mode == FLOAT:
            roots = _dihedral_float(m)
        elif m == 2:
            roots = _z2n(2)
        elif m == 3:
            roots = _a(3)
        elif m == 4:
            roots = _b(2)
        elif m == 6:
            roots = _G2_IN_R3
        else:
            raise ValueError(f"I2({m}) has no rational realization; use float mode")
    else:
        raise ValueError(f"unknown preset {name!r}")
    if mode == FLOAT:
        roots = [[float(c) for c in r] for r in roots]
    return RootSystem(len(roots[0]), tuple(tuple(r) for r in roots), mode, label)


builtin_presets = preset


def coordinate_axes_only(roots: RootSystem) -> bool:
    """True when every root is a coordinate axis (the group is Z_2^N-like)."""
    return all(sum(1 for c in r if c != 0) == 1 for r in roots.positive_roots)

