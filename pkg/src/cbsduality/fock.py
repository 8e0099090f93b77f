"""Truncated Fock-space oracle: brute-force checks of the Gaussian engine.

Everything the closed-form correlator claims can be recomputed the hard
way on a truncated single-mode Fock space: displacement matrices in the
analytic Laguerre form, diagonal thermal states, ordered matrix products,
traces and trace-class norms. The oracle is deliberately independent of
the kernel-difference bookkeeping (it never cancels anything analytically)
so it catches ordering and sign errors there; a matrix-exponential route
for the displacement operator is kept in the test suite as the oracle of
the oracle.

Mode decomposition. All wavevectors live in span{khat_in, nhat}, and the
trap is isotropic, so each atom contributes two orthonormal modes:

    e1 = khat_in,   e2 = (nhat - mu khat_in)/sqrt(1 - mu^2)

with q-components q.e1 = alpha_k + mu alpha_n, q.e2 = alpha_n sqrt(1-mu^2).
A factor e^{i q . u(t)} becomes a product of per-mode displacements
D(c) = exp(c adag - c* a) with

    c = i eta (q . e_axis) e^{+i omega_ho t},     eta = sqrt(omega_R/omega_ho),

since u(t) = l_ho (adag e^{i omega_ho t} + a e^{-i omega_ho t}) per axis and
k_in l_ho = eta. The thermal expectation of the ordered product is the
product of four independent single-mode traces.

Per-atom neutrality is NOT required here: the oracle handles the general
case, which is what enables negative tests of the closed form's dropped
C(0) pieces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .correlator import EventList
from .params import PhysParams, derive

# thermal weight beyond the truncation must stay below this, else flagged
THERMAL_TAIL_TOL = 1e-12
DIST_TAIL_TOL = 1e-10


@dataclass(frozen=True)
class FockOp:
    """Dense operator on a truncated Fock space with provenance metadata."""

    dim: int
    matrix: np.ndarray
    tag: str = ""
    flags: tuple[str, ...] = field(default=())

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.dim, self.dim):
            raise ValueError(f"matrix shape {m.shape} != ({self.dim}, {self.dim})")
        if not np.all(np.isfinite(m.view(float))):
            raise ValueError("matrix entries must be finite")
        object.__setattr__(self, "matrix", m)

    def unitarity_defect(self, interior: int | None = None) -> float:
        """max |U^dag U - I| over the leading interior block.

        Operators stored here are restrictions of infinite-dimensional
        ones, so the outer corner is always corrupted at O(1): displacing
        the edge state |N-1> pushes weight past the cutoff no matter how
        large N is. The meaningful truncation diagnostic is the defect on
        the interior columns a state of interest actually occupies;
        default block is the leading half.
        """
        k = self.dim // 2 if interior is None else interior
        d = self.matrix.conj().T @ self.matrix - np.eye(self.dim)
        return float(np.abs(d[:k, :k]).max())


def displacement_matrix(c: complex, N: int, tag: str = "") -> FockOp:
    """D(c) = exp(c adag - c* a) on an N-dimensional Fock space.

    The closed form of the matrix elements is the associated-Laguerre
    expression (for m >= n)

        <m|D(c)|n> = sqrt(n!/m!) c^{m-n} e^{-|c|^2/2} L_n^{(m-n)}(|c|^2),

    evaluated here by its defining row recurrence

        <m|D|n> = ( c <m-1|D|n> + sqrt(n) <m-1|D|n-1> ) / sqrt(m),

    which follows from a D = D (a + c). Every intermediate value is a
    matrix element of a unitary, so nothing overflows even for |c|^2 of
    order N (the direct prefactor-times-polynomial form does, which is why
    the tests cross-check this construction against both the explicit
    Laguerre formula at small |c| and a truncated matrix exponential).
    O(N^2). Flagged when |c|^2 > N: no truncation of this size can hold
    the displaced state.
    """
    if N < 2:
        raise ValueError("Fock dimension must be >= 2")
    c = complex(c)
    x = abs(c) ** 2
    flags = ("truncation-inadequate",) if x > N else ()
    D = np.empty((N, N), dtype=complex)
    n = np.arange(N)
    sqn = np.sqrt(n)
    # top row: <0|D|n> = (-c*)^n / sqrt(n!) e^{-x/2}, built multiplicatively
    row = np.empty(N, dtype=complex)
    row[0] = math.exp(-x / 2.0)
    for k in range(1, N):
        row[k] = row[k - 1] * (-c.conjugate()) / sqn[k]
    D[0] = row
    for m in range(1, N):
        shifted = np.empty(N, dtype=complex)
        shifted[0] = 0.0
        shifted[1:] = D[m - 1, :-1]
        D[m] = (c * D[m - 1] + sqn * shifted) / math.sqrt(m)
    return FockOp(N, D, tag=tag or f"D({c:.6g})", flags=flags)


def thermal_state(nbar: float, N: int, tag: str = "") -> FockOp:
    """Thermal density matrix, renormalized to unit trace AFTER truncation.

    Diagonal Boltzmann weights (nbar/(nbar+1))^n; nbar = 0 gives the
    ground-state projector. Flagged when the discarded tail weight
    (nbar/(nbar+1))^N exceeds 1e-12.
    """
    if nbar < 0:
        raise ValueError("nbar must be >= 0")
    if N < 2:
        raise ValueError("Fock dimension must be >= 2")
    if nbar == 0.0:
        w = np.zeros(N)
        w[0] = 1.0
        tail = 0.0
    else:
        r = nbar / (nbar + 1.0)
        w = r ** np.arange(N)
        tail = r**N  # exact geometric tail weight
        w = w / w.sum()
    flags = ("thermal-tail",) if tail > THERMAL_TAIL_TOL else ()
    rho = np.zeros((N, N), dtype=complex)
    rho[np.arange(N), np.arange(N)] = w
    return FockOp(N, rho, tag=tag or f"thermal(nbar={nbar:g})", flags=flags)


def trace_norm(X: FockOp) -> float:
    """Trace-class norm tr|X| = tr sqrt(X^dag X): the sum of singular values."""
    s = np.linalg.svd(X.matrix, compute_uv=False)
    return float(s.sum())


def _mode_components(events: EventList, mu: float):
    """Per (atom, axis) lists of (q_component, time)."""
    root = math.sqrt(max(0.0, 1.0 - mu * mu))
    comps: dict[tuple[int, int], list[tuple[float, float]]] = {}
    for e in events:
        proj = {1: e.alpha_k + mu * e.alpha_n, 2: e.alpha_n * root}
        for axis in (1, 2):
            q = proj[axis]
            if q != 0.0:
                comps.setdefault((e.atom, axis), []).append((q, e.time))
    return comps


def suggest_fock_dim(events: EventList, p: PhysParams) -> int:
    """Truncation adequate for oracle_correlator at ~1e-10 relative error.

    Rule of thumb calibrated against dimension-doubling: cover the thermal
    occupation (40 per unit nbar) and the worst per-mode accumulated
    displacement S = eta * sum |q.e_axis| with headroom
    (S + 7)^2 (2 nbar + 1)/2, then round up to a multiple of 16.
    """
    eta = math.sqrt(derive(p).eta_sq)
    smax = 0.0
    for comp in _mode_components(events, p.mu).values():
        smax = max(smax, eta * sum(abs(q) for q, _ in comp))
    n = max(64.0, 40.0 * (p.nbar + 1.0),
            (smax + 7.0) ** 2 * (2.0 * p.nbar + 1.0) / 2.0)
    return int(math.ceil(n / 16.0) * 16)


def oracle_correlator(events: EventList, p: PhysParams,
                      N: int | None = None) -> complex:
    """Thermal expectation of an ordered product, by brute-force matrices.

    Builds the time-evolved displacement matrix of every factor per mode,
    applies the product in operator order (leftmost factor first) to the
    thermally occupied basis states, and multiplies the four mode
    expectations. Only basis states with non-negligible Boltzmann weight
    (relative 1e-18, far below the comparison targets) are propagated, so
    the cost is O(factors * K * N^2) with K thermal states instead of a
    chain of full N^3 matrix products. N defaults to
    suggest_fock_dim(events, p).
    """
    if N is None:
        N = suggest_fock_dim(events, p)
    eta = math.sqrt(derive(p).eta_sq)
    rho = thermal_state(p.nbar, N)
    weights = np.real(np.diag(rho.matrix))
    K = int(np.sum(weights > 1e-18 * weights[0]))
    total = 1.0 + 0.0j
    for comp in _mode_components(events, p.mu).values():
        mats = [displacement_matrix(1j * eta * q * np.exp(1j * p.omega_ho * t),
                                    N).matrix
                for q, t in comp]
        # V = (M_1 ... M_k) restricted to the occupied columns
        V = np.zeros((N, K), dtype=complex)
        V[np.arange(K), np.arange(K)] = 1.0
        for M in reversed(mats):
            V = M @ V
        total *= np.sum(weights[:K] * V[np.arange(K), np.arange(K)])
    return complex(total)


def oracle_distinguishability(p: PhysParams, N: int) -> float:
    """Numerical trace-norm distinguishability in the shallow-trap limit.

    To leading order in the Lamb-Dicke expansion the which-path detector
    observable is the momentum of the antisymmetric mode of the two atoms
    along khat_in, and

        D = (2 sqrt(2) |delta| / |gamma|^2) sqrt(omega_R omega_ho)
            * tr| rho_N M | ,      M = i (bdag - b),

    computed on the truncated space with the renormalized thermal state
    rho_N. Here b is the NORMALIZED antisymmetric mode ([b, bdag] = 1);
    this normalization is fixed by requiring the classical limit
    theta -> 0 to reproduce D = (2/sqrt(pi)) (|delta|/|gamma|) xi_cl
    exactly (the paper-level intermediate normalization of the mode with
    commutator 2 is convention-dependent; the final form is not). The
    positive thermal factor is NOT commuted out of the norm: the oracle
    evaluates tr|rho p| directly, so it tests that approximation instead
    of assuming it.

    Preconditions are advisory: computation proceeds outside theta <= 0.1
    or with an inadequate truncation (thermal tail e^{-theta N} > 1e-10),
    but those regimes are the caller's responsibility; see the companion
    validation suite for the convergence study.
    """
    if N < 2:
        raise ValueError("Fock dimension must be >= 2")
    theta = p.theta
    if theta == math.inf:
        weights = np.zeros(N)
        weights[0] = 1.0
    else:
        weights = np.exp(-theta * np.arange(N))
        weights = weights / weights.sum()
    sq = np.sqrt(np.arange(1.0, N))
    M = np.zeros((N, N), dtype=complex)
    M[np.arange(1, N), np.arange(N - 1)] = 1j * sq   # i bdag
    M[np.arange(N - 1), np.arange(1, N)] = -1j * sq  # -i b
    VM = weights[:, None] * M
    g2 = p.delta * p.delta + 0.25
    pref = 2.0 * math.sqrt(2.0) * abs(p.delta) / g2 * math.sqrt(p.omega_R * p.omega_ho)
    return pref * float(np.linalg.svd(VM, compute_uv=False).sum())


def distinguishability_tail_dim(theta: float, minimum: int = 400) -> int:
    """Truncation meeting the thermal-tail precondition e^{-theta N} <= 1e-10."""
    if theta == math.inf:
        return minimum
    need = math.ceil(-math.log(DIST_TAIL_TOL) / theta)
    return max(minimum, need)
