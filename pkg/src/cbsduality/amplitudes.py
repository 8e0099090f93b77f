"""Transition-operator event lists and the trace integrands for V, P.

A photon arriving with wavevector k_in is detected at exact backscattering
k_out = -k_in after scattering once off each atom. Way A scatters first
off atom 1, propagates along nhat (k' = k_in nhat), then scatters off
atom 2; way B is the reverse order. In the time representation the
double-scattering amplitude for way A carries, read right to left,

    e^{i k_in . R_1(-s-t)}  photon absorbed by atom 1, a time s+t ago
    e^{-i k' . R_1(-s)}     re-emitted toward atom 2
    e^{+i k' . R_2(-s)}     absorbed by atom 2 (propagation time neglected)
    e^{-i k_out . R_2(0)}   emitted into the detector now

weighted by exp(i gamma (s+t)) and integrated over the two resonant dwell
times s, t >= 0. Way B follows by swapping the atoms and reversing k'.
Only the fluctuation parts u_j enter the events: the static trap-center
phases are identical for A and B at exact backscattering and cancel in
every ratio, so they are dropped at construction. Overall prefactors of
the transition operators are set to 1; intensities are reported in these
arbitrary units and every observable is a ratio.

The three trace quantities used downstream are

    I_A  ~ <T_A^dag T_A>,  I_B ~ <T_B^dag T_B>,  INT ~ <T_A^dag T_B>,

each an integral over (s, t, s', t') of a phase times the Gaussian
correlator G of an eight-factor, per-atom-neutral product (the adjoint
contributes the reversed, negated events at primed times).
"""

from __future__ import annotations

import enum
from functools import lru_cache

import numpy as np

from .correlator import Event, EventList
from .params import PhysParams


class PathLabel(enum.Enum):
    """The two scattering orders (which atom is visited first)."""
    A = "A"
    B = "B"


class TraceKind(enum.Enum):
    """Which trace quantity an integrand represents."""
    I_A = "I_A"
    I_B = "I_B"
    INT = "INT"


# (left path X, right path Y) of <T_X^dag T_Y> for each kind
_KIND_PATHS = {
    TraceKind.I_A: (PathLabel.A, PathLabel.A),
    TraceKind.I_B: (PathLabel.B, PathLabel.B),
    TraceKind.INT: (PathLabel.A, PathLabel.B),
}

# Symbolic events: (atom, alpha_k, alpha_n, c_s, c_t) with time = c_s*s + c_t*t.
# Way A, left-to-right operator order; from e^{-i k_out R_2(0)} with
# k_out = -k_in, then the k' pair at -s, then the absorption at -s-t.
_SYM_A = (
    (2, +1, 0, 0, 0),
    (2, 0, +1, -1, 0),
    (1, 0, -1, -1, 0),
    (1, +1, 0, -1, -1),
)
# Way B: atoms swapped, nhat -> -nhat.
_SYM_B = tuple((3 - atom, ak, -an, cs, ct) for (atom, ak, an, cs, ct) in _SYM_A)
_SYM = {PathLabel.A: _SYM_A, PathLabel.B: _SYM_B}


def events_T(path: PathLabel, s: float, t: float) -> EventList:
    """Event list of the transition-operator integrand for one path.

    s is the dwell time at the second scatterer, t the additional dwell
    at the first; both must be >= 0.
    """
    if s < 0 or t < 0:
        raise ValueError("dwell times s, t must be >= 0")
    return EventList.of(
        Event(atom, ak, an, cs * s + ct * t)
        for (atom, ak, an, cs, ct) in _SYM[PathLabel(path)])


def adjoint_reversed(ev: EventList) -> EventList:
    """Events of the adjoint operator: reversed order, negated q, same times."""
    return EventList.of(e.negated() for e in reversed(ev.events))


@lru_cache(maxsize=64)
def _pair_plan(kind: TraceKind, mu: float) -> tuple[tuple[float, tuple[int, int, int, int]], ...]:
    """Same-atom pair sum of the eight-factor product, as a compiled plan.

    Returns ((coeff, (c_s, c_t, c_s', c_t')), ...) such that

        log G = sum coeff * K(c_s*s + c_t*t + c_s'*s' + c_t'*t')

    for the product adjoint(T_X(s', t')) T_Y(s, t). Pairs with equal
    coefficient vectors are merged; zero time-differences and zero
    couplings are dropped. Also verifies per-atom neutrality of the
    combined product once, at plan-build time.
    """
    X, Y = _KIND_PATHS[kind]
    # adjoint part: reversed, negated, times on the primed axes
    left = [(atom, -ak, -an, (0, 0, cs, ct))
            for (atom, ak, an, cs, ct) in reversed(_SYM[X])]
    right = [(atom, ak, an, (cs, ct, 0, 0))
             for (atom, ak, an, cs, ct) in _SYM[Y]]
    evs = left + right
    for atom in (1, 2):
        sk = sum(ak for (a, ak, an, c) in evs if a == atom)
        sn = sum(an for (a, ak, an, c) in evs if a == atom)
        if (sk, sn) != (0, 0):
            from .correlator import NeutralityViolation
            raise NeutralityViolation(
                f"trace product for {kind} not neutral on atom {atom}")
    plan: dict[tuple[int, int, int, int], float] = {}
    for i in range(len(evs)):
        for j in range(i + 1, len(evs)):
            a1, k1, n1, c1 = evs[i]
            a2, k2, n2, c2 = evs[j]
            if a1 != a2:
                continue
            dot = k1 * k2 + n1 * n2 + mu * (k1 * n2 + n1 * k2)
            if dot == 0.0:
                continue
            dc = (c1[0] - c2[0], c1[1] - c2[1], c1[2] - c2[2], c1[3] - c2[3])
            if dc == (0, 0, 0, 0):
                continue
            plan[dc] = plan.get(dc, 0.0) - dot
    return tuple((coeff, dc) for dc, coeff in plan.items() if coeff != 0.0)


class ReducedIntegrand:
    """Trace integrand with the damping envelope factored out.

    full(s, t, s', t')    = e^{i gamma (s+t)} e^{-i gamma* (s'+t')} G(...)
    reduced(s, t, s', t') = full * e^{+(s+t+s'+t')/2}
                          = e^{i delta (s+t-s'-t')} G(...)

    The reduced form is bounded (|G| <= 1) and free of the exponential
    envelope, which quadrature rules factor into their weights; it is the
    numerically safe form at large node coordinates, where full underflows.
    Both forms broadcast over ndarray arguments.
    """

    has_reduced = True

    def __init__(self, kind: TraceKind, p: PhysParams):
        self.kind = TraceKind(kind)
        self.p = p
        self._plan = _pair_plan(self.kind, p.mu)

    def reduced(self, s, t, sp, tp):
        p = self.p
        expo = 1j * p.delta * ((s + t) - (sp + tp))
        scale = p.omega_R / p.omega_ho
        for coeff, (cs, ct, csp, ctp) in self._plan:
            dt = 0.0
            if cs:
                dt = dt + cs * s
            if ct:
                dt = dt + ct * t
            if csp:
                dt = dt + csp * sp
            if ctp:
                dt = dt + ctp * tp
            e = np.expm1(-1j * p.omega_ho * dt)
            expo = expo + (coeff * scale) * ((p.nbar + 1.0) * e
                                             + p.nbar * np.conj(e))
        return np.exp(expo)

    def full(self, s, t, sp, tp):
        damp = np.exp(-0.5 * (np.asarray(s) + t + sp + tp))
        return damp * self.reduced(s, t, sp, tp)

    def __call__(self, s, t, sp, tp):
        return self.full(s, t, sp, tp)


def make_integrand(kind: TraceKind, p: PhysParams) -> ReducedIntegrand:
    """Integrand object for one trace kind, ready for integrate4d."""
    return ReducedIntegrand(kind, p)


def trace_integrand(kind: TraceKind, s: float, t: float, sp: float, tp: float,
                    p: PhysParams) -> complex:
    """Pointwise value of the I_A / I_B / INT integrand (full form).

    All time arguments must be >= 0. Equals
    e^{i gamma (s+t)} e^{-i gamma* (s'+t')} times the closed-form Gaussian
    correlator of the eight-factor product; at omega_R = 0 the correlator
    is 1 and only the phases remain.
    """
    if min(s, t, sp, tp) < 0:
        raise ValueError("time arguments must be >= 0")
    return complex(ReducedIntegrand(kind, p).full(float(s), float(t),
                                                  float(sp), float(tp)))
