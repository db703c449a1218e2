"""Verification suites.

``suite_identities`` and the two positivity suites run entirely in exact
rational arithmetic; ``suite_numeric`` collects the quadrature, series and
eigenvalue checks that need floats.
"""
from __future__ import annotations

import random
from fractions import Fraction

from ..algebra import EXACT, Polynomial, basis, linear_substitute, parse_poly, transpose
from ..dunklops import (
    D2,
    DunklParams,
    delta_1d,
    euler_approx,
    exp_apply,
    exp_conjugate_identity_check,
    lambda_odd_residual,
    lambda_ode_residual,
    lambda_s_apply,
    lambda_s_closed_form,
    lambda_s_operator,
    max_coefficient_error,
    minimum_principle_check,
    ode_poly_solve,
    trotter_approx,
)
from ..intertwine import (
    IntertwinerTable,
    beta_moment_quad,
    build_vk,
    intertwining_residuals,
    moment_inequality_violations,
    vk_z2n_table_check,
)
from ..kernel import (
    KernelTruncation,
    Measure1D,
    ProductMeasure,
    TailTooLarge,
    gram_psd_check,
    kernel_bound_check,
    kernel_eval,
    kernel_positivity_scan,
    kernel_recursion_residual,
    kernel_symmetry_residual,
    measure_moments,
    measure_transform_check,
    moment_equivariance_residuals,
    rank_one_kernel_closed,
    support_hull_check,
)
from ..pairing import (
    QuadSpec,
    WeightData,
    gaussian_pairing_quadrature,
    pairing,
    pairing_identity_matrix_residual,
    pairing_matrix,
)
from ..reflection import preset
from .config import Config, ConfigError
from .families import GridScanner, TestPolynomialFamily, dyadic_ball_grid, zero_touching_1d
from .report import Report

IDENTITY = "exact identity"
THEOREM = "positivity theorem"
ORACLE = "independent oracle"
BOUND = "analytic bound"
CONSTRUCTION = "by construction"


def _exact_params(config: Config) -> DunklParams:
    if config.mode != EXACT:
        raise ConfigError("this suite runs in exact mode only")
    return config.params()


def _size(r):
    return r.max_abs_coefficient() if isinstance(r, Polynomial) else abs(r)


def _zero_check(report: Report, name: str, inputs: dict, items) -> None:
    """Record one check from ``(input, residual)`` pairs; passes iff every residual is exactly 0."""
    worst, witness, count = Fraction(0), None, 0
    for w, r in items:
        count += 1
        s = _size(r)
        if s != 0 and (witness is None or s > worst):
            worst, witness = s, {"input": w, "residual": r}
    inputs = dict(inputs, cases=count)
    report.add(name, inputs, IDENTITY, witness is None, residual=worst, witness=witness)


def _z2(k) -> DunklParams:
    return DunklParams.from_values(preset("Z2", 1), [k])


# --------------------------------------------------------------------------
# identities


def _rank_one_identities(report: Report, ks, n: int) -> None:
    x = Polynomial.variable(1, 0)
    mons = [Polynomial.monomial((j,), 1) for j in range(n + 1)]
    odd = [m for j, m in enumerate(mons) if j % 2]
    even = [m for j, m in enumerate(mons) if j % 2 == 0]
    for k in ks:
        t = _z2(k).dunkl_axis(0)
        rhs = D2() + 2 * Fraction(k) * delta_1d()
        _zero_check(report, "rank_one_square", {"k": k, "degree": n},
                    ((m, t(t(m)) - rhs(m)) for m in mons))
    cs = (Fraction(1, 2), Fraction(1), Fraction(2))
    _zero_check(report, "exp_conjugation_commutator", {"c": cs, "degree": n},
                ((f"c={c}: {m}", exp_conjugate_identity_check(c, m)) for c in cs for m in mons))
    _zero_check(report, "lambda_even_ode", {"s": cs, "degree": n},
                ((f"s={s}: {m}", lambda_ode_residual(s, m, lambda_s_apply(s, m))) for s in cs for m in even))
    _zero_check(report, "lambda_odd_characterization", {"s": cs, "degree": n},
                ((f"s={s}: {m}", lambda_odd_residual(s, m, lambda_s_apply(s, m))) for s in cs for m in odd))

    def solved(c, p):
        y = ode_poly_solve(c, p)
        return y.diff(0).scale(c) - x * y - p

    _zero_check(report, "ode_solve_substitute", {"c": cs, "degree": n},
                ((f"c={c}: {m}", solved(c, m)) for c in cs for m in odd))


def suite_identities(config: Config, table: IntertwinerTable | None = None) -> Report:
    """Exact residuals of the operator identities, ``V_k``, the pairing and the kernel recursion."""
    report = Report("identities")
    params = table.params if table is not None else _exact_params(config)
    if params.mode != EXACT:
        raise ConfigError("this suite runs in exact mode only")
    n = config.n_max
    dim = params.dim
    B = basis(dim, n)
    monos = [Polynomial.monomial(m, 1) for m in B]
    group = {"roots": params.roots.name, "k": params.k.orbit_values, "degree": n}

    ts = [params.dunkl_axis(i) for i in range(dim)]
    _zero_check(report, "dunkl_commutativity", group,
                ((f"i={i}, j={j}: {m}", ts[i](ts[j](m)) - ts[j](ts[i](m)))
                 for i in range(dim) for j in range(i + 1, dim) for m in monos))

    def conjugated(g, i, m):
        gt = transpose(g)
        lhs = linear_substitute(ts[i](linear_substitute(m, gt)), g)
        return lhs - params.dunkl([row[i] for row in g])(m)

    _zero_check(report, "dunkl_equivariance", group,
                ((f"g={g}, i={i}: {m}", conjugated(g, i, m))
                 for g in params.get_group().elements for i in range(dim) for m in monos))
    lap, lap_roots = params.laplacian_k, params.laplacian_k_roots
    _zero_check(report, "laplacian_two_formulas", group,
                ((m, lap(m) - lap_roots(m)) for m in monos))

    _rank_one_identities(report, sorted(set(params.k.orbit_values)), n)

    if table is None:
        table = build_vk(params, n)
    _zero_check(report, "intertwining", group,
                ((f"nu={nu}, i={i}", r) for nu, i, r in intertwining_residuals(table, min(n, table.n_max))))
    _zero_check(report, "pairing_identity", group,
                ((f"degree {d}, entry ({a}, {b})", v)
                 for d in range(min(n, table.n_max) + 1)
                 for a, row in enumerate(pairing_identity_matrix_residual(table, d))
                 for b, v in enumerate(row)))

    def asym(d):
        g = pairing_matrix(params, d)
        return [(f"degree {d}, entry ({a}, {b})", g[a][b] - g[b][a])
                for a in range(len(g)) for b in range(a + 1, len(g))]

    _zero_check(report, "pairing_symmetry", group,
                (item for d in range(n + 1) for item in asym(d)))

    tr = KernelTruncation(table, min(n, table.n_max))
    rng = random.Random(config.seed)
    ys = [tuple(Fraction(rng.randint(-4, 4), rng.choice((1, 2, 3))) for _ in range(dim)) for _ in range(2)]
    axes = [tuple(1 if j == i else 0 for j in range(dim)) for i in range(dim)]
    _zero_check(report, "kernel_recursion", dict(group, y=ys),
                ((f"xi={xi}, y={y}, n={d}", kernel_recursion_residual(tr, xi, y, d))
                 for xi in axes for y in ys for d in range(tr.M)))
    _zero_check(report, "kernel_symmetry", dict(group, points=ys),
                ((f"x={ys[0]}, y={ys[1]}, n={d}", r)
                 for d, r in enumerate(kernel_symmetry_residual(tr, ys[0], ys[1]))))
    return report.finish()


# --------------------------------------------------------------------------
# positivity


def _family(config: Config, dim: int) -> list:
    fam = config.family
    return TestPolynomialFamily(dim, int(fam.get("count", 50)),
                                int(fam.get("max_degree", min(6, config.n_max))),
                                int(fam.get("seed", config.seed))).generate()


def _grid(config: Config, dim: int):
    g = config.grid
    return dyadic_ball_grid(dim, Fraction(str(g.get("radius", 2))), int(g.get("min_points", 1000)))


def _scan_family(report: Report, name: str, inputs: dict, scanner: GridScanner, pairs) -> None:
    """``pairs`` yields ``(label, polynomial)``; every value on the grid must be >= 0."""
    worst, witness, polys = None, None, 0
    for label, q in pairs:
        polys += 1
        res = scanner.scan(q)
        if worst is None or res.minimum < worst:
            worst = res.minimum
        if not res.ok and witness is None:
            witness = {"p": label, "point": res.argmin, "value": res.minimum, "image": q}
    inputs = dict(inputs, polynomials=polys, grid_points=len(scanner.grid))
    report.add(name, inputs, THEOREM, witness is None, margin=worst, witness=witness)


def _require_nonnegative(params: DunklParams) -> None:
    if not params.k.is_nonnegative():
        raise ConfigError("positivity suites need k >= 0")


def suite_positivity_vk(config: Config, table: IntertwinerTable | None = None) -> Report:
    """``V_k p >= 0`` on a rational grid for every polynomial of a nonnegative family."""
    report = Report("positivity_vk")
    params = table.params if table is not None else _exact_params(config)
    _require_nonnegative(params)
    dim = params.dim
    family = _family(config, dim)
    deg = max(p.degree for _, p in family)
    if table is None:
        table = build_vk(params, deg)
    grid = _grid(config, dim)
    scanner = GridScanner(grid, deg)
    inputs = {"roots": params.roots.name, "k": params.k.orbit_values, "seed": config.seed}
    _scan_family(report, "family_nonnegative", inputs, scanner, family)
    report.checks[-1].expected_provenance = CONSTRUCTION
    _scan_family(report, "vk_nonnegative", inputs, scanner,
                 ((label, table.apply(p)) for label, p in family))
    sample = grid.points[:: max(1, len(grid) // 200)]
    bad = moment_inequality_violations(table, sample)
    report.add("moment_inequalities", dict(inputs, points=len(sample)), THEOREM, not bad,
               residual=len(bad), witness=bad[:1] or None)
    return report.finish()


def semigroup_operator(params: DunklParams, s, t):
    """``p -> e^{-s Lap} e^{t L_k} e^{s Lap} p``."""
    lap, lk = params.laplacian, params.L_k
    s, t = Fraction(s), Fraction(t)
    return lambda p: exp_apply(lap, -s, exp_apply(lk, t, exp_apply(lap, s, p)))


def heat_corrected_operator(params: DunklParams):
    """``p -> e^{-Lap/2} e^{Lap_k/2} p``."""
    lap, lapk = params.laplacian, params.laplacian_k
    half = Fraction(1, 2)
    return lambda p: exp_apply(lap, -half, exp_apply(lapk, half, p))


def scan_operator_positivity(report: Report, name: str, inputs: dict, op, family, scanner) -> None:
    _scan_family(report, name, inputs, scanner, ((label, op(p)) for label, p in family))


def suite_semigroup_positivity(config: Config) -> Report:
    """Positivity of the conjugated semigroups and the minimum principle for ``Lambda_s``."""
    report = Report("semigroup_positivity")
    params = _exact_params(config)
    _require_nonnegative(params)
    dim = params.dim
    family = _family(config, dim)
    deg = max(p.degree for _, p in family)
    scanner = GridScanner(_grid(config, dim), deg)
    base = {"roots": params.roots.name, "k": params.k.orbit_values, "seed": config.seed}

    scan_operator_positivity(report, "heat_corrected_exponential", base,
                             heat_corrected_operator(params), family, scanner)

    values = (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2))
    combos = [(s, t) for s in values for t in values]
    per = max(4, len(family) // 8)
    for c, (s, t) in enumerate(combos):
        chosen = [family[(c * per + i) % len(family)] for i in range(per)]
        scan_operator_positivity(report, "conjugated_semigroup", dict(base, s=s, t=t),
                                 semigroup_operator(params, s, t), chosen, scanner)

    zero_family = zero_touching_1d(int(config.family.get("count", 50)), config.seed)
    for s in (Fraction(1, 2), Fraction(1)):
        op = lambda_s_operator(s)
        worst, witness, cases = None, None, 0
        for p, zeros in zero_family:
            for z in zeros:
                cases += 1
                v = minimum_principle_check(op, p, (z,))
                if worst is None or v.value < worst:
                    worst = v.value
                if not v.passed and witness is None:
                    witness = {"p": p, "x0": z, "value": v.value}
        report.add("lambda_minimum_principle", {"s": s, "polynomials": len(zero_family), "cases": cases},
                   THEOREM, witness is None, margin=worst, witness=witness)
    return report.finish()


# --------------------------------------------------------------------------
# numerics


KS = (Fraction(1, 2), Fraction(1), Fraction(5, 2))


def numeric_oracles(config: Config | None = None) -> Report:
    report = Report("numeric_oracles")
    spec = config.quad_spec if config is not None else QuadSpec()

    for k in KS:
        table = build_vk(_z2(k), 6)
        diff = max(abs(float(table.image((n,)).coefficient((n,))) - beta_moment_quad(k, n)) for n in range(7))
        report.add("rank_one_moments", {"k": k, "degrees": "0..6"}, ORACLE, diff <= 1e-10, residual=diff)

    for ks in ((Fraction(1, 2), Fraction(5, 2)), (Fraction(1), Fraction(2), Fraction(1, 2))):
        params = DunklParams.from_values(preset("Z2", len(ks)), list(ks))
        bad = vk_z2n_table_check(build_vk(params, 6))
        report.add("product_group_tensor_form", {"k": ks, "degree": 6}, ORACLE, not bad,
                   residual=len(bad), witness=bad[:1] or None)

    worst = 0.0
    for p in ("x1^2", "x1^3", "x1^4"):
        poly = parse_poly(p, 1)
        for s in (Fraction(1, 2), Fraction(1)):
            q = lambda_s_apply(s, poly)
            for x in (-1, 0, 1):
                worst = max(worst, abs(lambda_s_closed_form(float(s), poly, x) - float(q((Fraction(x),)))))
    report.add("lambda_closed_form", {"p": ["x^2", "x^3", "x^4"], "s": ["1/2", "1"], "x": [-1, 0, 1]},
               ORACLE, worst <= 1e-8, residual=worst)

    cases = [((k,), _z2(k)) for k in KS]
    cases += [(ks, DunklParams.from_values(preset("Z2", 2), list(ks)))
              for ks in ((Fraction(1, 2), Fraction(1)), (Fraction(5, 2), Fraction(1, 2)))]
    for ks, params in cases:
        weight = WeightData(params)
        monos = [Polynomial.monomial(m, 1) for m in basis(params.dim, 4)]
        worst = 0.0
        for p in monos:
            for q in monos:
                exact = pairing(params, p, q)
                approx = gaussian_pairing_quadrature(params, p, q, spec, weight)
                worst = max(worst, abs(approx - float(exact)) / max(1.0, abs(float(exact))))
        report.add("pairing_gaussian_integral", {"dim": params.dim, "k": ks, "degree": 4},
                   ORACLE, worst <= 1e-8, residual=worst)
    return report.finish()


def _grid_1d(radius=2, steps=9):
    h = Fraction(2 * radius, steps - 1)
    return [-Fraction(radius) + i * h for i in range(steps)]


def numeric_kernel(config: Config | None = None) -> Report:
    report = Report("numeric_kernel")
    grid = _grid_1d()
    for k in KS:
        tr = KernelTruncation.build(_z2(k), 30)
        worst = 0.0
        for x in grid:
            for y in grid:
                if abs(x * y) <= 2:
                    v = kernel_eval(tr, [x], [y]).value
                    worst = max(worst, abs(v - rank_one_kernel_closed(float(k), float(x), float(y))))
        report.add("rank_one_kernel_vs_1f1", {"k": k, "order": 30, "range": "|xy| <= 2"}, ORACLE,
                   worst <= 1e-10, residual=worst)

        for nu in ((0,), (1,)):
            worst_margin = None
            for x in grid:
                for y in grid:
                    v = kernel_bound_check(tr, [x], [(0, y)], nu, tol=1e-10)
                    worst_margin = v.value if worst_margin is None else min(worst_margin, v.value)
            report.add("kernel_bound", {"k": k, "nu": nu, "grid": "9x9, |x|,|y| <= 2"}, BOUND,
                       worst_margin >= 0, margin=worst_margin)

        pos = kernel_positivity_scan(tr, [[x] for x in grid], [[y] for y in grid])
        report.add("kernel_positive_real", {"k": k, "grid": "9x9"}, THEOREM, pos.passed, margin=pos.value)

        tr40 = KernelTruncation.build(_z2(k), 40)
        for pts in (_grid_1d(1, 5), _grid_1d(1, 8)):
            for y in (Fraction(1), Fraction(2)):
                g = gram_psd_check(tr40, [[p] for p in pts], [y], tol=1e-8)
                report.add("gram_psd", {"k": k, "points": pts, "y": y, "function": "K"}, THEOREM,
                           g.passed, margin=g.lambda_min + len(pts) * g.tail + 1e-8)
                gj = gram_psd_check(tr40, [[p] for p in pts], [y], tol=1e-8, function="J")
                report.add("gram_psd", {"k": k, "points": pts, "y": y, "function": "J"}, THEOREM,
                           gj.passed, margin=gj.lambda_min + len(pts) * gj.tail + 1e-8)

    if config is not None and config.mode == EXACT and config.params().dim > 1:
        _group_kernel_checks(report, config)
    return report.finish()


def _group_kernel_checks(report: Report, config: Config) -> None:
    params = config.params()
    dim = params.dim
    order = int(config.grid.get("kernel_order", 16))
    tr = KernelTruncation.build(params, order)
    rng = random.Random(config.seed)

    def point(r):
        while True:
            p = [Fraction(rng.randint(-4, 4), 4) * r for _ in range(dim)]
            if sum(c * c for c in p) <= r * r:
                return p

    xs = [point(1) for _ in range(6)]
    ys = [point(1) for _ in range(4)]
    try:
        worst = None
        for x in xs:
            for y in ys:
                for nu in [(0,) * dim, (1,) + (0,) * (dim - 1)]:
                    v = kernel_bound_check(tr, x, [(0, c) for c in y], nu, tol=1e-10)
                    worst = v.value if worst is None else min(worst, v.value)
        report.add("group_kernel_bound", {"roots": params.roots.name, "order": order}, BOUND,
                   worst >= 0, margin=worst)
        pts = [point(Fraction(1, 2)) for _ in range(6)]
        for fn in ("K", "J"):
            g = gram_psd_check(tr, pts, ys[0], tol=1e-8, function=fn)
            report.add("group_gram_psd", {"roots": params.roots.name, "points": pts, "y": ys[0],
                                          "function": fn}, THEOREM, g.passed,
                       margin=g.lambda_min + len(pts) * g.tail + 1e-8)
    except TailTooLarge as err:
        report.add("group_kernel_tail", {"roots": params.roots.name, "order": order}, BOUND, False,
                   witness=str(err))


def numeric_measures(config: Config | None = None) -> Report:
    report = Report("numeric_measures")
    xs = (Fraction(1), Fraction(2), Fraction(-3, 2))
    for k in KS:
        table = build_vk(_z2(k), 6)
        worst = 0.0
        for x in xs:
            mu = Measure1D(x, k)
            for n in range(7):
                worst = max(worst, abs(measure_moments(mu, n) - float(table.image((n,))((x,)))))
        report.add("rank_one_measure_moments", {"k": k, "x": xs, "degrees": "0..6"}, ORACLE,
                   worst <= 1e-10, residual=worst)
    ks = (Fraction(1, 2), Fraction(5, 2))
    table = build_vk(DunklParams.from_values(preset("Z2", 2), list(ks)), 6)
    worst = 0.0
    for x in ((Fraction(1), Fraction(2)), (Fraction(-1, 2), Fraction(3, 2))):
        mu = ProductMeasure.of(x, ks)
        for nu in basis(2, 6):
            worst = max(worst, abs(measure_moments(mu, nu) - float(table.image(nu)(x))))
    report.add("product_measure_moments", {"k": ks, "degrees": "0..6"}, ORACLE, worst <= 1e-10, residual=worst)

    for mu in (Measure1D(1, 1), Measure1D(Fraction(-3, 2), Fraction(1, 2)),
               ProductMeasure.of((1, 2), ks)):
        for r in (1, 2, Fraction(1, 3)):
            signs = (-1,) if isinstance(mu, Measure1D) else ((-1, 0), (0, 1))
            g = -1 if isinstance(mu, Measure1D) else signs
            v = measure_transform_check(mu, r, g)
            report.add("measure_scaling_equivariance", {"x": mu.x, "r": r}, IDENTITY, v.passed,
                       residual=v.value)
        h = support_hull_check(mu)
        report.add("support_in_orbit_hull", {"x": mu.x}, THEOREM, h.passed, witness=None if h.passed else h.detail)

    # equivariance of V_k itself for every group element (exact, general group)
    for name, N, k in (("B", 2, [1, Fraction(1, 2)]), ("A", 3, [1])):
        params = DunklParams.from_values(preset(name, N), k)
        table = build_vk(params, 4)
        bad = [nu for g in params.get_group().elements for nu in moment_equivariance_residuals(table, g)]
        report.add("vk_group_equivariance", {"roots": params.roots.name, "degree": 4}, IDENTITY, not bad,
                   residual=len(bad))
    return report.finish()


def convergence_errors(k=1, degrees=(4, 5, 6), ns=(8, 16, 32, 64)) -> dict:
    """Coefficient errors of the Euler and Trotter approximations of ``e^{D^2 + 2k delta}``."""
    k = Fraction(k)
    a = D2()
    b = 2 * k * delta_1d()
    out = {"euler": {}, "trotter": {}}
    for d in degrees:
        p = Polynomial.monomial((d,), 1)
        exact = exp_apply(a + b, 1, p)
        for n in ns:
            out["euler"][(d, n)] = max_coefficient_error(euler_approx(a + b, n, p), exact)
            out["trotter"][(d, n)] = max_coefficient_error(trotter_approx(a, b, n, p), exact)
    return out


def numeric_convergence(config: Config | None = None) -> Report:
    report = Report("numeric_convergence")
    errs = convergence_errors()
    for scheme in ("euler", "trotter"):
        for d in (4, 5, 6):
            ratios = [errs[scheme][(d, 2 * n)] / errs[scheme][(d, n)] for n in (8, 16, 32)]
            worst = max(float(r) for r in ratios)
            report.add("convergence_rate", {"scheme": scheme, "p": f"x^{d}", "n": [8, 16, 32]}, BOUND,
                       worst <= 0.75, margin=0.75 - worst)
    return report.finish()


def suite_numeric(config: Config | None = None) -> Report:
    report = Report("numeric")
    for part in (numeric_oracles, numeric_kernel, numeric_measures, numeric_convergence):
        report.extend(part(config))
    return report.finish()


SUITES = {
    "identities": suite_identities,
    "positivity_vk": suite_positivity_vk,
    "semigroup_positivity": suite_semigroup_positivity,
    "numeric": suite_numeric,
}
