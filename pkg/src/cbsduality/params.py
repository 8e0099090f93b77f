"""Physical parameters and closed-form derived quantities.

Units and conventions
---------------------
The atomic linewidth sets the scale: Gamma = 1. All frequencies (detuning
delta, trap frequency omega_ho, recoil frequency omega_R) are in units of
Gamma, all times in units of 1/Gamma. The complex detuning is

    gamma = delta + i/2,      |gamma|^2 = delta^2 + 1/4.

The atomic mass m, the probe wavevector k_in and the oscillator length
l_ho never appear individually: only the combinations

    omega_R  = hbar k_in^2 / (2 m)          (recoil frequency)
    eta^2    = k_in^2 l_ho^2 = omega_R / omega_ho   (Lamb-Dicke parameter^2)

enter any observable, so those two frequencies plus the geometry cosine
mu = nhat . khat_in fully specify the problem.

Temperature enters either as the thermal occupation nbar of the (isotropic)
trap or as the scaled inverse temperature theta = beta hbar omega_ho; the
two are equivalent via nbar = 1/(exp(theta) - 1).

Derived small parameters (all dimensionless):

    chi       = omega_R / |gamma|                       free recoil
    rho       = 4 mu (delta/|gamma|) chi                a-priori imbalance
    zeta^2    = 4 omega_R omega_ho / |gamma|^2          trap at T = 0
    xi^2      = coth(theta/2) zeta^2                    trap at finite T
    xi_cl^2   = (2/theta) zeta^2                        classical Doppler limit

Note on v_rms: xi_cl = 2 k_in v_rms / |gamma| holds with the *per-axis*
(1D) thermal rms velocity v_rms = sqrt(k_B T / m). That reading is forced
by consistency: with the 1D value, (2 k v_rms / |gamma|)^2 equals the
theta << 1 limit of xi^2 = coth(theta/2) zeta^2 exactly
(coth(theta/2) -> 2/theta and 4 omega_R omega_ho * (2/theta) =
(2 k v_rms)^2 with v_rms^2 = k_B T/m). A 3D reading would be off by 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# The shallow-trap assumption omega_ho << Gamma underlies every closed form
# in this package; computation proceeds above this threshold but results
# are flagged as outside the validity regime.
SHALLOW_TRAP_LIMIT = 0.1


class ParameterError(ValueError):
    """Invalid physical parameter; the message names the violated invariant."""


def _nbar_from_theta(theta: float) -> float:
    if theta == math.inf:
        return 0.0
    return 1.0 / math.expm1(theta)


def _theta_from_nbar(nbar: float) -> float:
    if nbar == 0.0:
        return math.inf
    return math.log1p(1.0 / nbar)


@dataclass(frozen=True)
class PhysParams:
    """Dimensionless physical configuration of the two-atom CBS geometry.

    Parameters
    ----------
    delta : float
        Probe detuning (in units of Gamma).
    omega_ho : float
        Trap frequency, > 0 (in units of Gamma).
    omega_R : float
        Recoil frequency, >= 0 (in units of Gamma).
    mu : float
        Geometry cosine nhat . khat_in, in [-1, 1]; nhat is the unit
        vector joining the two trap centers.
    nbar, theta : float, optional
        Thermal occupation (>= 0) or scaled inverse temperature (> 0).
        Give at most one; the other is derived. Default is nbar = 0
        (motional ground state, theta = inf).
    """

    delta: float
    omega_ho: float
    omega_R: float
    mu: float = 0.0
    nbar: float = None  # type: ignore[assignment]
    theta: float = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.nbar is not None and self.theta is not None:
            raise ParameterError("give either nbar or theta, not both")
        if self.nbar is None and self.theta is None:
            object.__setattr__(self, "nbar", 0.0)
        if self.theta is None:
            if self.nbar < 0.0:
                raise ParameterError("nbar must be >= 0")
            object.__setattr__(self, "theta", _theta_from_nbar(self.nbar))
        if self.nbar is None:
            if not self.theta > 0.0:
                raise ParameterError("theta must be > 0")
            object.__setattr__(self, "nbar", _nbar_from_theta(self.theta))
        for name in ("delta", "omega_ho", "omega_R", "mu", "nbar", "theta"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not math.isfinite(self.delta):
            raise ParameterError("delta must be finite")
        if not self.omega_ho > 0.0:
            raise ParameterError("omega_ho must be > 0")
        if self.omega_R < 0.0:
            raise ParameterError("omega_R must be >= 0")
        if abs(self.mu) > 1.0:
            raise ParameterError("mu must lie in [-1, 1]")
        if self.nbar < 0.0:
            raise ParameterError("nbar must be >= 0")
        if not self.theta > 0.0:
            raise ParameterError("theta must be > 0")

    @property
    def gamma(self) -> complex:
        """Complex detuning gamma = delta + i Gamma/2 (Gamma = 1)."""
        return complex(self.delta, 0.5)

    @property
    def gamma_abs(self) -> float:
        return math.hypot(self.delta, 0.5)

    @property
    def shallow_trap(self) -> bool:
        """True when omega_ho is inside the shallow-trap validity regime."""
        return self.omega_ho < SHALLOW_TRAP_LIMIT


@dataclass(frozen=True)
class DerivedParams:
    """Closed-form small parameters derived from a :class:`PhysParams`.

    All fields are nonnegative except rho, which carries the sign of
    mu * delta.
    """

    gamma_sq: float   # |gamma|^2 = delta^2 + 1/4
    chi: float        # omega_R / |gamma|
    zeta_sq: float    # 4 omega_R omega_ho / |gamma|^2
    xi_sq: float      # coth(theta/2) * zeta_sq
    xi_cl_sq: float   # (2/theta) * zeta_sq, classical Doppler limit
    eta_sq: float     # omega_R / omega_ho, squared Lamb-Dicke parameter
    rho: float        # 4 mu (delta/|gamma|) chi


def _coth_half(theta: float) -> float:
    # coth(theta/2) = 1 + 2/(e^theta - 1), exact and stable for theta -> inf
    if theta == math.inf:
        return 1.0
    return 1.0 + 2.0 / math.expm1(theta)


def derive(p: PhysParams) -> DerivedParams:
    """Evaluate all closed-form derived quantities for a parameter set."""
    g2 = p.delta * p.delta + 0.25
    g = math.sqrt(g2)
    chi = p.omega_R / g
    zeta_sq = 4.0 * p.omega_R * p.omega_ho / g2
    xi_sq = _coth_half(p.theta) * zeta_sq
    xi_cl_sq = 0.0 if p.theta == math.inf else 2.0 * zeta_sq / p.theta
    eta_sq = p.omega_R / p.omega_ho
    rho = 4.0 * p.mu * (p.delta / g) * chi
    return DerivedParams(gamma_sq=g2, chi=chi, zeta_sq=zeta_sq, xi_sq=xi_sq,
                         xi_cl_sq=xi_cl_sq, eta_sq=eta_sq, rho=rho)


def cross_section_ratio(delta: float) -> float:
    """Resonant scattering cross section relative to its peak value.

    sigma(delta)/sigma_0 = 1 / (1 + (2 delta)^2) with Gamma = 1; in (0, 1].
    A small frequency change on the slope of this Lorentzian is what makes
    the two scattering orders distinguishable a priori.
    """
    return 1.0 / (1.0 + 4.0 * delta * delta)


def recoil_displacement_ratio(p: PhysParams) -> float:
    """Recoil displacement of the first scatterer over the ground-state size.

    The first atom picks up one photon recoil and travels
    dx = v_rec * dt during the scattering time dt = 2/|gamma| (twice the
    resonant dwell time per atom); relative to the oscillator length this
    is exactly 2 zeta. Which-path information becomes available once the
    ratio approaches one.
    """
    d = derive(p)
    return 2.0 * math.sqrt(d.zeta_sq)


def solve_theta_for_xi_sq(xi_sq_target: float, zeta_sq: float) -> float:
    """Invert xi^2 = coth(theta/2) zeta^2 for theta.

    Closed form: coth(theta/2) = r  =>  theta = ln((r+1)/(r-1)) with
    r = xi^2/zeta^2. Requires xi^2 > zeta^2 (r > 1); equality is the
    zero-temperature limit theta -> inf.
    """
    if zeta_sq <= 0.0:
        raise ParameterError("zeta_sq must be > 0 to back-solve a temperature")
    r = xi_sq_target / zeta_sq
    if r <= 1.0:
        raise ParameterError(
            "requested xi^2 <= zeta^2: unreachable (coth(theta/2) >= 1)")
    return math.log((r + 1.0) / (r - 1.0))
