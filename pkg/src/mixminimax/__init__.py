"""Minimax rate constructions for estimating normal location mixtures.

Hypercube families of Gaussian mixtures built from Gaussian-weighted
Hermite perturbations, numerical certificates for the hypotheses of
Assouad's lemma under squared L2 and squared Hellinger loss, and a Monte
Carlo study of the sinc-kernel estimator whose risk matches the L2 rate.
"""
from .assouad import AssouadCertificate, assouad_bound, certify, rate_table, target_rate
from .divergences import affinity_mc, chi_sq, hellinger_sq, l2_sq, tv_quadrature
from .family_hellinger import (
    FamilyConfigH,
    absorb_transform,
    hellinger_schedule,
    make_hellinger_family,
    sandwich_check,
)
from .family_l2 import (
    FamilyConfigL2,
    l2_schedule,
    make_l2_family,
    positivity_check,
)
from .hermite_fourier import gaussian_smoothing, lemma22_inverse
from .integrate import QuadratureSpec, convolve_numeric, fourier_numeric, integrate_real
from .mixture import MixtureFamily, PerturbationSpec
from .reporting import package_version
from .sinc import RiskReport, SampleSet, analytic_growth_check, mise_mc, sample_mixture, sinc_estimate
from .special import GaussianDensity, hermite, hermite_normalized

__version__ = package_version()

__all__ = [
    "AssouadCertificate",
    "FamilyConfigH",
    "FamilyConfigL2",
    "GaussianDensity",
    "MixtureFamily",
    "PerturbationSpec",
    "QuadratureSpec",
    "RiskReport",
    "SampleSet",
    "absorb_transform",
    "affinity_mc",
    "analytic_growth_check",
    "assouad_bound",
    "certify",
    "chi_sq",
    "convolve_numeric",
    "fourier_numeric",
    "gaussian_smoothing",
    "hellinger_schedule",
    "hellinger_sq",
    "hermite",
    "hermite_normalized",
    "integrate_real",
    "l2_schedule",
    "l2_sq",
    "lemma22_inverse",
    "make_hellinger_family",
    "make_l2_family",
    "mise_mc",
    "positivity_check",
    "rate_table",
    "sample_mixture",
    "sandwich_check",
    "sinc_estimate",
    "target_rate",
    "tv_quadrature",
]
