"""Nonlinear spectral decomposition with the total-variation flow, and
semi-inner-product measures of how separable two signals are."""

__version__ = "0.1.0"

from .grid import (DomainError, GridMismatchError, GridSpec, ParameterError, Signal,
                   inner_product, l2_norm, split_mean)
from .tv import (Subgradient, TvConfig, VectorField, default_tau, div, grad, prox_tv,
                 subgradient, tv_value)
from .flow import FlowParams, FlowTrajectory, extinction_time, run_flow
from .spectral import (FilterSpec, SpectralDecomposition, Spectrum, apply_filter,
                       check_phi_orthogonality, parseval_ratio, reconstruct, spectrum,
                       transform)
from .sip import (FunctionalHandle, MeasureReport, angle, angle_sym_a, angle_sym_g,
                  bregman, full_report, hsip, lis_defect, lis_measure, lq_handle,
                  lq_subgradient, orth_measure, sip, tv_handle)
from .eigen import (Eigenpair, eigen_flow_solution, eigen_residual, make_box_1d,
                    make_disc_2d, rayleigh_lambda)
from .decomp import (DecompositionResult, MeasureCurve, experiment_1d_distance,
                     experiment_blobs, experiment_two_discs, separate)

__all__ = [
    "DomainError", "GridMismatchError", "GridSpec", "ParameterError", "Signal",
    "inner_product", "l2_norm", "split_mean", "Subgradient", "TvConfig", "VectorField",
    "default_tau", "div", "grad", "prox_tv", "subgradient", "tv_value", "FlowParams",
    "FlowTrajectory", "extinction_time", "run_flow", "FilterSpec",
    "SpectralDecomposition", "Spectrum", "apply_filter", "check_phi_orthogonality",
    "parseval_ratio", "reconstruct", "spectrum", "transform", "FunctionalHandle",
    "MeasureReport", "angle", "angle_sym_a", "angle_sym_g", "bregman", "full_report",
    "hsip", "lis_defect", "lis_measure", "lq_handle", "lq_subgradient", "orth_measure",
    "sip", "tv_handle", "Eigenpair", "eigen_flow_solution", "eigen_residual",
    "make_box_1d", "make_disc_2d", "rayleigh_lambda", "DecompositionResult",
    "MeasureCurve", "experiment_1d_distance", "experiment_blobs",
    "experiment_two_discs", "separate",
]
