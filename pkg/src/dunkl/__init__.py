"""Exact computations with Dunkl operators and the intertwining operator ``V_k``."""
from .algebra import EXACT, FLOAT, Polynomial, basis, format_poly, monomials, parse_poly
from .dunklops import DunklParams, dunkl_apply, exp_apply, laplacian_apply, lambda_s_apply
from .intertwine import IntertwinerTable, SingularMultiplicityError, build_vk, moment_function
from .kernel import KernelTruncation, bessel_eval, gram_psd_check, kernel_eval
from .pairing import QuadSpec, gaussian_pairing_quadrature, pairing
from .reflection import MultiplicityFunction, RootSystem, build_group, preset

__all__ = [
    "EXACT",
    "FLOAT",
    "DunklParams",
    "IntertwinerTable",
    "KernelTruncation",
    "MultiplicityFunction",
    "Polynomial",
    "QuadSpec",
    "RootSystem",
    "SingularMultiplicityError",
    "basis",
    "bessel_eval",
    "build_group",
    "build_vk",
    "dunkl_apply",
    "exp_apply",
    "format_poly",
    "gaussian_pairing_quadrature",
    "gram_psd_check",
    "kernel_eval",
    "lambda_s_apply",
    "laplacian_apply",
    "moment_function",
    "monomials",
    "pairing",
    "parse_poly",
    "preset",
]
