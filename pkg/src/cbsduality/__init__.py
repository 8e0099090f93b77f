"""Coherent backscattering of light by two harmonically trapped atoms.

A two-atom double-scattering geometry realizes a two-way interferometer:
the photon visits the atoms in one of two orders (way A or way B). Atomic
recoil and thermal motion leak which-path information into the motional
state and degrade the interference contrast. This package computes the
interference visibility V, the a-priori predictability P and the analytic
which-path distinguishability D for that geometry, at zero and finite
temperature, and validates the closed-form results against exact 4D
quadrature and a brute-force truncated Fock-space oracle.

Everything is expressed in natural units with the atomic linewidth
Gamma = 1: times in 1/Gamma, frequencies in Gamma.
"""

from .params import (
    PhysParams,
    DerivedParams,
    ParameterError,
    derive,
    cross_section_ratio,
    recoil_displacement_ratio,
    solve_theta_for_xi_sq,
)
from .correlator import (
    Event,
    EventList,
    NeutralityViolation,
    kernel_diff,
    log_correlator,
    correlator,
)
from .amplitudes import (
    PathLabel,
    TraceKind,
    events_T,
    adjoint_reversed,
    trace_integrand,
    make_integrand,
)
from .quadrature import QuadratureSpec, QuadResult, integrate4d
from .fock import (
    FockOp,
    displacement_matrix,
    thermal_state,
    oracle_correlator,
    oracle_distinguishability,
    suggest_fock_dim,
    trace_norm,
)
from .observables import (
    Regime,
    DualityReport,
    visibility,
    predictability,
    distinguishability_analytic,
    visibility_asymptotic,
    duality_sum_analytic,
    full_report,
)

__version__ = "0.1.0"

__all__ = [
    "PhysParams", "DerivedParams", "ParameterError", "derive",
    "cross_section_ratio", "recoil_displacement_ratio", "solve_theta_for_xi_sq",
    "Event", "EventList", "NeutralityViolation", "kernel_diff",
    "log_correlator", "correlator",
    "PathLabel", "TraceKind", "events_T", "adjoint_reversed",
    "trace_integrand", "make_integrand",
    "QuadratureSpec", "QuadResult", "integrate4d",
    "FockOp", "displacement_matrix", "thermal_state", "oracle_correlator",
    "oracle_distinguishability", "suggest_fock_dim", "trace_norm",
    "Regime", "DualityReport", "visibility", "predictability",
    "distinguishability_analytic", "visibility_asymptotic",
    "duality_sum_analytic", "full_report",
]
