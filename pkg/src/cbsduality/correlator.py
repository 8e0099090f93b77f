"""Thermal Gaussian correlators of ordered displacement-exponential products.

The transition operators consist solely of factors exp(i q . u_j(t)) with
u_j(t) the interaction-picture displacement of atom j in an isotropic
harmonic trap. For a thermal state every such ordered product has a
closed-form expectation value: the exponent is linear in Gaussian
operators, so the trace is a Gaussian integral.

Ordering convention
-------------------
List order equals left-to-right operator order: events[0] is the leftmost
factor in the product. With X_a = i q_a . u(t_a) and all commutators
[X_a, X_b] scalar, the exact identity is

    log <e^{X_1} ... e^{X_N}> = sum_{a<b} <X_a X_b> + (1/2) sum_a <X_a^2>,

where a < b means "a stands to the LEFT of b". Getting this ordering wrong
flips the sign of the odd (imaginary) part of the exponent and is the most
likely silent failure; the truncated-Fock oracle cross-checks it.

Kernel differences
------------------
Under per-atom neutrality (the wavevectors acting on each atom sum to
zero) the equal-time pieces <X_a^2> ~ C(0) cancel exactly against the
cross terms and only kernel DIFFERENCES survive:

    log G = sum_{a<b, same atom} (- q_a . q_b) K(t_a - t_b),
    K(dt) = k_in^2 [C(dt) - C(0)]
          = (omega_R/omega_ho) [ (nbar+1)(e^{-i omega_ho dt} - 1)
                                 + nbar (e^{+i omega_ho dt} - 1) ].

The cancellation is done analytically, not numerically: C(0) diverges as
omega_ho -> 0 while K stays finite, which is what makes the free-atom
limit reachable without precision loss. K is evaluated with expm1 so the
shallow-trap expansion

    K(dt) -> -i omega_R dt - (xi^2 |gamma|^2 / 8) dt^2 + O(omega_ho^3 dt^3)

emerges without catastrophic cancellation. Cross-atom pairs contribute
nothing (independent traps); the sum runs over same-atom pairs only, so
the result factorizes over atoms by construction. The trap is isotropic,
so the 3D dot product q_a . q_b is all the geometry that enters.

Wavevectors are stored in units of k_in as integer components along
khat_in and nhat; dot products need only the geometry cosine mu:

    q_a . q_b = ak_a ak_b + an_a an_b + mu (ak_a an_b + an_a ak_b).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .params import PhysParams


class NeutralityViolation(ValueError):
    """An atom's wavevectors do not sum to zero.

    Raised by the closed-form correlator, which only supports neutral
    products (every trace-type quantity in this package is neutral; a
    violation signals a malformed event list). The Fock oracle handles
    the general case and is the tool for deliberate non-neutral checks.
    """


@dataclass(frozen=True)
class Event:
    """One factor exp(i q . u_atom(time)) of an operator product.

    q = alpha_k * khat_in + alpha_n * nhat in units of k_in, with
    alpha_k, alpha_n in {-1, 0, +1} and not both zero (null factors are
    not stored). Times are in units of 1/Gamma.
    """

    atom: int
    alpha_k: int
    alpha_n: int
    time: float

    def __post_init__(self):
        if self.atom not in (1, 2):
            raise ValueError(f"atom must be 1 or 2, got {self.atom}")
        if self.alpha_k not in (-1, 0, 1) or self.alpha_n not in (-1, 0, 1):
            raise ValueError("alpha_k, alpha_n must be in {-1, 0, +1}")
        if self.alpha_k == 0 and self.alpha_n == 0:
            raise ValueError("null event (q = 0) must not be stored")

    def negated(self) -> "Event":
        return Event(self.atom, -self.alpha_k, -self.alpha_n, self.time)


def q_dot(a: Event, b: Event, mu: float) -> float:
    """Dot product q_a . q_b in units of k_in^2."""
    return (a.alpha_k * b.alpha_k + a.alpha_n * b.alpha_n
            + mu * (a.alpha_k * b.alpha_n + a.alpha_n * b.alpha_k))


@dataclass(frozen=True)
class EventList:
    """Ordered product of Events; position in the tuple = operator order."""

    events: tuple[Event, ...]

    @classmethod
    def of(cls, events: Iterable[Event]) -> "EventList":
        return cls(tuple(events))

    def __iter__(self) -> Iterator[Event]:
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)

    def __add__(self, other: "EventList") -> "EventList":
        return EventList(self.events + other.events)

    def net_q(self, atom: int) -> tuple[int, int]:
        """Summed (alpha_k, alpha_n) of the events acting on one atom."""
        ak = sum(e.alpha_k for e in self.events if e.atom == atom)
        an = sum(e.alpha_n for e in self.events if e.atom == atom)
        return ak, an

    def is_neutral(self, atom: int) -> bool:
        return self.net_q(atom) == (0, 0)

    def require_neutral(self) -> None:
        for atom in (1, 2):
            if not self.is_neutral(atom):
                raise NeutralityViolation(
                    f"atom {atom} wavevectors sum to {self.net_q(atom)}, "
                    "expected (0, 0)")


def kernel_diff(dt, p: PhysParams):
    """Thermal kernel difference K(dt) = k_in^2 [C(dt) - C(0)].

    Accepts a scalar or ndarray dt and broadcasts. Uses expm1 so that the
    shallow-trap regime omega_ho*|dt| << 1 keeps full relative accuracy.
    For omega_R = 0 the kernel vanishes identically.
    """
    e = np.expm1(-1j * p.omega_ho * np.asarray(dt, dtype=float))
    out = (p.omega_R / p.omega_ho) * ((p.nbar + 1.0) * e + p.nbar * np.conj(e))
    if np.ndim(dt) == 0:
        return complex(out)
    return out


def log_correlator(events: EventList, p: PhysParams) -> complex:
    """log G for the thermal expectation of an ordered, neutral product.

    G = <e^{X_1} ... e^{X_N}> with X_a = i q_a . u_{atom_a}(t_a); the list
    must be per-atom neutral (NeutralityViolation otherwise). |G| <= 1
    always: it is the expectation of a product of unitaries in a
    normalized state.
    """
    events.require_neutral()
    evs = events.events
    total = 0.0 + 0.0j
    for i in range(len(evs)):
        for j in range(i + 1, len(evs)):
            a, b = evs[i], evs[j]
            if a.atom != b.atom:
                continue
            dot = q_dot(a, b, p.mu)
            if dot == 0.0 or a.time == b.time:
                continue
            total += -dot * kernel_diff(a.time - b.time, p)
    return complex(total)


def correlator(events: EventList, p: PhysParams) -> complex:
    """G itself; see :func:`log_correlator`."""
    return complex(np.exp(log_correlator(events, p)))
