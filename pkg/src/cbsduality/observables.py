"""Duality observables: visibility, predictability, distinguishability.

The two-way interferometer obeys V^2 + D^2 <= 1. The quadrature route
gives V and P exactly (within numerical error) from three trace
integrals; D is NOT computed by full quadrature. The trace-class norm
defining D lives on an infinite-dimensional oscillator space and has no
tractable exact form for the un-expanded transition operators, so D is
provided through the regime closed forms,

    zero temperature:   D^2 = rho^2 + 2 zeta^2       (saturates the duality)
    finite temperature: D   = (2/sqrt(pi)) (|delta|/|gamma|) xi_cl,

with the truncated-Fock check of the finite-T chain living in
fock.oracle_distinguishability. Regime flags annotate but never block:
exploratory sweeps should not crash at regime edges.

"Zero temperature" is a thermal statement (nbar = 0), not omega_ho -> 0;
the quadrature V at T = 0 is still taken at a small nonzero trap
frequency.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .amplitudes import TraceKind, make_integrand
from .params import PhysParams, derive
from .quadrature import QuadratureSpec, QuadResult, integrate4d

# advisory regime thresholds (flags only, never hard limits)
ZERO_T_SMALL = 0.05          # chi, zeta smallness for the zero-T closed forms
FINITE_T_THETA_MAX = 0.1     # shallow-trap thermal limit theta << 1
FINITE_T_XI_SQ_MAX = 0.5     # xi_cl^2 beyond which the linear-in-xi D fails
RECOIL_CONTAMINATION = 0.01  # chi / xi_cl^2 above which recoil is not negligible


class Regime(enum.Enum):
    ZERO_T = "zeroT"
    FINITE_T = "finiteT"


class QuantityResult(NamedTuple):
    value: float
    error: float
    converged: bool
    evaluations: int


@dataclass(frozen=True)
class DualityReport:
    """Everything the CLI reports for one parameter point."""

    delta: float
    omega_ho: float
    omega_R: float
    nbar: float
    theta: float
    mu: float
    xi_cl_sq: float
    V: float
    V_err: float
    P: float
    P_err: float
    D_analytic: float
    D_regime: str
    duality_sum: float
    duality_sum_err: float
    I_A: float
    I_B: float
    I_err: float
    flags: tuple[str, ...] = field(default=())
    converged: bool = True

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["flags"] = list(self.flags)
        return d


def _intensities(p: PhysParams, spec: QuadratureSpec) -> dict[TraceKind, QuadResult]:
    """The three trace integrals; at mu = 0 way B is way A exactly."""
    out = {TraceKind.I_A: integrate4d(make_integrand(TraceKind.I_A, p), spec)}
    if p.mu == 0.0:
        out[TraceKind.I_B] = out[TraceKind.I_A]
    else:
        out[TraceKind.I_B] = integrate4d(make_integrand(TraceKind.I_B, p), spec)
    out[TraceKind.INT] = integrate4d(make_integrand(TraceKind.INT, p), spec)
    return out


def _vis_from(res: dict[TraceKind, QuadResult]) -> QuantityResult:
    ia, ib = res[TraceKind.I_A], res[TraceKind.I_B]
    it = res[TraceKind.INT]
    denom = ia.value.real + ib.value.real
    v = 2.0 * abs(it.value) / denom
    err = (2.0 * it.abs_error_estimate / denom
           + v * (ia.abs_error_estimate + ib.abs_error_estimate) / denom)
    conv = ia.converged and ib.converged and it.converged
    evals = ia.evaluations + ib.evaluations + it.evaluations
    return QuantityResult(v, err, conv, evals)


def _pred_from(res: dict[TraceKind, QuadResult]) -> QuantityResult:
    ia, ib = res[TraceKind.I_A], res[TraceKind.I_B]
    denom = ia.value.real + ib.value.real
    pval = abs(ia.value.real - ib.value.real) / denom
    err = (1.0 + pval) * (ia.abs_error_estimate + ib.abs_error_estimate) / denom
    return QuantityResult(pval, err, ia.converged and ib.converged,
                          ia.evaluations + ib.evaluations)


def visibility(p: PhysParams, spec: QuadratureSpec | None = None) -> QuantityResult:
    """CBS contrast V = 2|<T_A^dag T_B>| / (I_A + I_B), by 4D quadrature."""
    return _vis_from(_intensities(p, spec or QuadratureSpec()))


def predictability(p: PhysParams, spec: QuadratureSpec | None = None) -> QuantityResult:
    """A-priori which-way information P = |I_A - I_B| / (I_A + I_B)."""
    return _pred_from(_intensities(p, spec or QuadratureSpec()))


def regime_flags(p: PhysParams, regime: Regime) -> tuple[str, ...]:
    """Advisory validity flags for the closed-form D and V expressions."""
    d = derive(p)
    flags = []
    if not p.shallow_trap:
        flags.append("shallow-trap")
    if regime is Regime.ZERO_T:
        if p.nbar != 0.0:
            flags.append("zero-t-regime")
        elif d.chi > ZERO_T_SMALL or math.sqrt(d.zeta_sq) > ZERO_T_SMALL:
            flags.append("zero-t-regime")
    else:
        if p.theta > FINITE_T_THETA_MAX or d.xi_cl_sq > FINITE_T_XI_SQ_MAX:
            flags.append("finite-t-regime")
        if d.xi_cl_sq > 0.0 and d.chi / d.xi_cl_sq > RECOIL_CONTAMINATION:
            flags.append("recoil-contamination")
    return tuple(flags)


def distinguishability_analytic(p: PhysParams, regime: Regime) -> float:
    """Closed-form which-path distinguishability in the stated regime.

    ZERO_T:   sqrt(rho^2 + 2 zeta^2), the saturating value 1 - V^2 for a
              pure detector state (valid for chi, zeta << 1 at nbar = 0).
    FINITE_T: (2/sqrt(pi)) (|delta|/|gamma|) xi_cl, the thermal momentum-
              modulus expectation result (valid for theta << 1). Vanishes
              at exact resonance in both regimes.
    """
    d = derive(p)
    if Regime(regime) is Regime.ZERO_T:
        return math.sqrt(d.rho**2 + 2.0 * d.zeta_sq)
    return (2.0 / math.sqrt(math.pi)) * abs(p.delta) / math.sqrt(d.gamma_sq) \
        * math.sqrt(d.xi_cl_sq)


def visibility_asymptotic(p: PhysParams, regime: Regime) -> float:
    """Leading-order closed-form visibility (clipped at 0 out of regime).

    ZERO_T: V^2 = 1 - rho^2 - 2 zeta^2; FINITE_T: V^2 = 1 - 2 xi_cl^2.
    """
    d = derive(p)
    if Regime(regime) is Regime.ZERO_T:
        v2 = 1.0 - d.rho**2 - 2.0 * d.zeta_sq
    else:
        v2 = 1.0 - 2.0 * d.xi_cl_sq
    return math.sqrt(max(0.0, v2))


def duality_sum_analytic(p: PhysParams) -> float:
    """Closed-form V^2 + D^2 at finite temperature, to order xi_cl^2.

    1 - 2 [1 - (2/pi) delta^2/|gamma|^2] xi_cl^2. The bracket stays in
    (1 - 2/pi, 1]: delta^2/|gamma|^2 < 1, so the deficit never vanishes
    at finite temperature; the duality is not saturated because a thermal
    detector state is not a pure one.
    """
    d = derive(p)
    bracket = 1.0 - (2.0 / math.pi) * p.delta**2 / d.gamma_sq
    return 1.0 - 2.0 * bracket * d.xi_cl_sq


def full_report(p: PhysParams, spec: QuadratureSpec | None = None) -> DualityReport:
    """Quadrature V and P plus regime-selected analytic D, with flags."""
    spec = spec or QuadratureSpec()
    res = _intensities(p, spec)
    vis = _vis_from(res)
    pred = _pred_from(res)
    regime = Regime.ZERO_T if p.nbar == 0.0 else Regime.FINITE_T
    d_an = distinguishability_analytic(p, regime)
    dsum = vis.value**2 + d_an**2
    dsum_err = 2.0 * vis.value * vis.error
    flags = list(regime_flags(p, regime))
    if not (vis.converged and pred.converged):
        flags.append("quad-not-converged")
    ia = res[TraceKind.I_A]
    ib = res[TraceKind.I_B]
    rel_imag = max(abs(ia.value.imag) / max(abs(ia.value.real), 1e-300),
                   abs(ib.value.imag) / max(abs(ib.value.real), 1e-300))
    if rel_imag > 1e-6:
        flags.append("intensity-imag-residual")
    der = derive(p)
    return DualityReport(
        delta=p.delta, omega_ho=p.omega_ho, omega_R=p.omega_R,
        nbar=p.nbar, theta=p.theta, mu=p.mu, xi_cl_sq=der.xi_cl_sq,
        V=vis.value, V_err=vis.error, P=pred.value, P_err=pred.error,
        D_analytic=d_an, D_regime=regime.value,
        duality_sum=dsum, duality_sum_err=dsum_err,
        I_A=ia.value.real, I_B=ib.value.real,
        I_err=ia.abs_error_estimate + ib.abs_error_estimate,
        flags=tuple(flags),
        converged=vis.converged and pred.converged,
    )
