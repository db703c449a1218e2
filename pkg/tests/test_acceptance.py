"""Acceptance criteria, one test per criterion, each at its stated tolerance."""
from fractions import Fraction

import pytest

from dunkl.algebra import Polynomial
from dunkl.dunklops import DunklParams, delta_1d, exp_apply, minimum_principle_check
from dunkl.harness.config import config_from_dict
from dunkl.harness.families import GridScanner, dyadic_ball_grid
from dunkl.harness.report import Report
from dunkl.harness.suites import (
    _family,
    numeric_convergence,
    numeric_kernel,
    numeric_measures,
    numeric_oracles,
    scan_operator_positivity,
    suite_identities,
    suite_positivity_vk,
    suite_semigroup_positivity,
)
from dunkl.intertwine import build_vk

H, ONE, FIVE_H = "1/2", "1", "5/2"

GROUPS = {
    "B2": {"preset": "B", "N": 2},
    "A2": {"preset": "A", "N": 3},
    "Z2^3": {"preset": "Z2", "N": 3},
}

IDENTITY_CASES = [
    ("B2", [H, ONE]),
    ("B2", [FIVE_H, H]),
    ("B2", [ONE, FIVE_H]),
    ("A2", [H]),
    ("A2", [ONE]),
    ("A2", [FIVE_H]),
    ("Z2^3", [H, ONE, FIVE_H]),
    ("Z2^3", [ONE, "2", H]),
]

POSITIVITY_CASES = [
    ("Z2", {"preset": "Z2", "N": 1}, [ONE]),
    ("B2", GROUPS["B2"], [ONE, H]),
    ("A2", GROUPS["A2"], [FIVE_H]),
    ("Z2^3", GROUPS["Z2^3"], [H, ONE, FIVE_H]),
]


def config(group, values, **extra):
    return config_from_dict(dict({"group": group, "multiplicity": {"orbit_values": values}, "n_max": 6},
                                 **extra))


def summarize(reports):
    failed = [f"{r.suite}:{c.name}" for r in reports for c in r.failures()]
    total = sum(len(r.checks) for r in reports)
    return not failed, f"{total} checks" + (f", failed: {failed[:5]}" if failed else "")


def test_criterion_1_exact_identities(verdict):
    reports = []
    for name, values in IDENTITY_CASES:
        reports.append(suite_identities(config(GROUPS[name], values)))
    ok, detail = summarize(reports)
    verdict("criterion 1: exact identity residuals vanish on degree <= 6 (B2, A2, Z2^3)", ok, detail)
    assert ok, detail


def test_criterion_2_oracle_agreement(verdict):
    report = numeric_oracles()
    ok, detail = summarize([report])
    names = {c.name for c in report.checks}
    assert names == {"rank_one_moments", "product_group_tensor_form", "lambda_closed_form",
                     "pairing_gaussian_integral"}
    verdict("criterion 2: builder vs integral oracle, tensor form, closed form, Gaussian pairing", ok, detail)
    assert ok, detail


def _negative_controls():
    """Each injected fault must be caught; returns ``(label, caught)`` pairs."""
    out = []
    for name, group, values in POSITIVITY_CASES:
        cfg = config(group, values)
        table = build_vk(cfg.params(), 6).perturbed(2, 0, 0, -10)
        out.append((f"perturbed table {name}", not suite_positivity_vk(cfg, table).passed))

    # e^{-Lap/2} alone is not a positive operator
    cfg = config({"preset": "Z2", "N": 1}, [ONE])
    params = cfg.params()
    report = Report("control")
    family = _family(cfg, 1)
    scanner = GridScanner(dyadic_ball_grid(1), max(p.degree for _, p in family))
    scan_operator_positivity(report, "inverse_heat", {}, lambda p: exp_apply(params.laplacian, Fraction(-1, 2), p),
                             family, scanner)
    out.append(("inverse heat operator", not report.passed))

    # the minimum principle fails for -delta
    x = Polynomial.variable(1, 0)
    out.append(("minimum principle for -delta", not minimum_principle_check(-delta_1d(), x ** 2, (0,)).passed))
    return out


def test_criterion_3_positivity(verdict):
    reports = []
    sizes = []
    for name, group, values in POSITIVITY_CASES:
        cfg = config(group, values)
        r = suite_positivity_vk(cfg)
        reports.append(r)
        reports.append(suite_semigroup_positivity(cfg))
        scan = next(c for c in r.checks if c.name == "vk_nonnegative")
        sizes.append((name, scan.inputs["polynomials"], scan.inputs["grid_points"]))
    assert all(n >= 50 and g >= 1000 for _, n, g in sizes), sizes
    ok, detail = summarize(reports)
    controls = _negative_controls()
    missed = [label for label, caught in controls if not caught]
    passed = ok and not missed
    detail += f"; {len(controls) - len(missed)}/{len(controls)} negative controls caught"
    verdict("criterion 3: positivity scans with zero violations; injected faults fail", passed, detail)
    assert ok, detail
    assert not missed, missed


def test_criterion_4_kernel(verdict):
    cfg = config(GROUPS["B2"], [ONE, H])
    report = numeric_kernel(cfg)
    ok, detail = summarize([report])
    names = {c.name for c in report.checks}
    assert {"rank_one_kernel_vs_1f1", "kernel_bound", "gram_psd", "group_kernel_bound", "group_gram_psd"} <= names
    assert all(len(c.inputs["points"]) <= 8 for c in report.checks if "gram" in c.name)
    verdict("criterion 4: kernel vs 1F1, bounds on the 9x9 grid, Gram matrices PSD", ok, detail)
    assert ok, detail


def test_criterion_5_measures(verdict):
    report = numeric_measures()
    ok, detail = summarize([report])
    verdict("criterion 5: explicit measures match moments, transform exactly, sit in the orbit hull", ok, detail)
    assert ok, detail


def test_criterion_6_convergence(verdict):
    report = numeric_convergence()
    ok, detail = summarize([report])
    worst = max(0.75 - c.margin for c in report.checks)
    verdict("criterion 6: Euler and Trotter error ratios <= 0.75", ok, f"{detail}, worst ratio {worst:.3f}")
    assert ok, detail
