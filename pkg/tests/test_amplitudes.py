import cmath
import math

import numpy as np
import pytest

from cbsduality import (EventList, PathLabel, PhysParams, TraceKind,
                        adjoint_reversed, events_T, log_correlator,
                        make_integrand, oracle_correlator, trace_integrand)
from cbsduality.amplitudes import _KIND_PATHS


def P(**kw):
    base = dict(delta=0.0, omega_ho=1e-4, omega_R=0.01, mu=0.0, nbar=0.0)
    base.update(kw)
    return PhysParams(**base)


def combined_events(kind: TraceKind, s, t, sp, tp) -> EventList:
    X, Y = _KIND_PATHS[kind]
    return adjoint_reversed(events_T(X, sp, tp)) + events_T(Y, s, t)


def test_way_a_event_structure():
    ev = events_T(PathLabel.A, 1.5, 2.5)
    rows = [(e.atom, e.alpha_k, e.alpha_n, e.time) for e in ev]
    assert rows == [(2, 1, 0, 0.0), (2, 0, 1, -1.5),
                    (1, 0, -1, -1.5), (1, 1, 0, -4.0)]
    # an amplitude alone is not neutral: each atom keeps one net recoil
    assert ev.net_q(1) == (1, -1)   # k_in - nhat
    assert ev.net_q(2) == (1, 1)    # k_in + nhat


def test_way_b_is_swapped_and_reflected():
    a = events_T(PathLabel.A, 1.0, 2.0)
    b = events_T(PathLabel.B, 1.0, 2.0)
    assert [(e.atom, e.alpha_k, e.alpha_n, e.time) for e in b] == \
        [(3 - e.atom, e.alpha_k, -e.alpha_n, e.time) for e in a]


def test_negative_times_rejected():
    with pytest.raises(ValueError):
        events_T(PathLabel.A, -1.0, 0.0)
    with pytest.raises(ValueError):
        events_T(PathLabel.B, 0.0, -0.1)


def test_adjoint_reversed_basics():
    assert adjoint_reversed(EventList.of([])).events == ()
    ev = events_T(PathLabel.A, 1.0, 2.0)
    adj = adjoint_reversed(ev)
    assert [(e.atom, e.alpha_k, e.alpha_n) for e in adj] == \
        [(1, -1, 0), (1, 0, 1), (2, 0, -1), (2, -1, 0)]
    assert [e.time for e in adj] == [e.time for e in reversed(ev.events)]
    # double application is the identity
    assert adjoint_reversed(adj) == ev


def test_trace_products_are_neutral():
    for kind in TraceKind:
        ev = combined_events(kind, 0.3, 1.1, 2.0, 0.7)
        assert ev.is_neutral(1) and ev.is_neutral(2)
    # and mixed-path products in the other order too
    mixed = adjoint_reversed(events_T(PathLabel.B, 1.0, 2.0)) + \
        events_T(PathLabel.A, 0.5, 0.25)
    assert mixed.is_neutral(1) and mixed.is_neutral(2)


def test_integrand_without_recoil_is_pure_phase():
    p = P(omega_R=0.0, delta=0.7)
    s, t, sp, tp = 0.3, 1.2, 0.8, 2.0
    expected = cmath.exp(1j * p.gamma * (s + t)) * \
        cmath.exp(-1j * p.gamma.conjugate() * (sp + tp))
    for kind in TraceKind:
        assert trace_integrand(kind, s, t, sp, tp, p) == \
            pytest.approx(expected, rel=1e-14)


def test_integrand_matches_correlator_times_phase():
    # the vectorized pair-plan path must agree with the generic engine
    rng = np.random.default_rng(5)
    for _ in range(5):
        p = P(delta=float(rng.uniform(-1, 1)), mu=float(rng.uniform(-1, 1)),
              nbar=float(rng.uniform(0, 2)), omega_ho=10 ** rng.uniform(-4, -2))
        s, t, sp, tp = rng.uniform(0, 4, size=4)
        for kind in TraceKind:
            ev = combined_events(kind, s, t, sp, tp)
            expected = cmath.exp(1j * p.gamma * (s + t)) \
                * cmath.exp(-1j * p.gamma.conjugate() * (sp + tp)) \
                * cmath.exp(log_correlator(ev, p))
            got = trace_integrand(kind, s, t, sp, tp, p)
            assert got == pytest.approx(expected, rel=1e-12)


def test_integrand_against_fock_oracle():
    # INT integrand at (1,1,1,1): phase * G with G from the brute-force oracle
    p = P(delta=0.0, omega_R=0.01, omega_ho=1e-4, nbar=0.0, mu=0.0)
    ev = combined_events(TraceKind.INT, 1.0, 1.0, 1.0, 1.0)
    g = oracle_correlator(ev, p)
    expected = cmath.exp(1j * p.gamma * 2) * cmath.exp(-1j * p.gamma.conjugate() * 2) * g
    assert trace_integrand(TraceKind.INT, 1, 1, 1, 1, p) == \
        pytest.approx(expected, rel=1e-9)
    # and one thermal, asymmetric case
    p2 = P(delta=0.4, omega_R=2e-3, omega_ho=1e-2, nbar=1.2, mu=0.6)
    ev2 = combined_events(TraceKind.INT, 0.7, 2.0, 1.3, 0.2)
    g2 = oracle_correlator(ev2, p2)
    expected2 = cmath.exp(1j * p2.gamma * 2.7) \
        * cmath.exp(-1j * p2.gamma.conjugate() * 1.5) * g2
    assert trace_integrand(TraceKind.INT, 0.7, 2.0, 1.3, 0.2, p2) == \
        pytest.approx(expected2, rel=1e-9)


def test_way_b_integrand_is_mu_reflected_way_a():
    p_plus = P(mu=0.6, delta=0.3, nbar=0.5)
    p_minus = P(mu=-0.6, delta=0.3, nbar=0.5)
    for args in ((0.5, 1.0, 2.0, 0.1), (3.0, 0.2, 0.4, 1.0)):
        assert trace_integrand(TraceKind.I_B, *args, p_plus) == \
            pytest.approx(trace_integrand(TraceKind.I_A, *args, p_minus),
                          rel=1e-13)


def test_conjugation_symmetry_swapping_primed_times():
    # integrand(kind; s,t,s',t') = conj(integrand(kind; s',t',s,t)) for the
    # diagonal kinds; this is what makes I_A and I_B real after integration
    p = P(delta=0.8, mu=0.4, nbar=0.9)
    s, t, sp, tp = 0.3, 2.2, 1.4, 0.6
    for kind in (TraceKind.I_A, TraceKind.I_B):
        a = trace_integrand(kind, s, t, sp, tp, p)
        b = trace_integrand(kind, sp, tp, s, t, p)
        assert a == pytest.approx(b.conjugate(), rel=1e-13)


def test_b_equals_a_at_mu_zero():
    p = P(mu=0.0, delta=0.5, nbar=0.3)
    fa = make_integrand(TraceKind.I_A, p)
    fb = make_integrand(TraceKind.I_B, p)
    s = np.linspace(0.1, 3, 4)
    va = fa.reduced(s[:, None], 1.0, s[None, :], 0.5)
    vb = fb.reduced(s[:, None], 1.0, s[None, :], 0.5)
    np.testing.assert_allclose(va, vb, rtol=1e-14)


def test_reduced_times_envelope_equals_full():
    p = P(delta=0.2, omega_R=1e-3, nbar=0.1)
    f = make_integrand(TraceKind.INT, p)
    s, t, sp, tp = 1.0, 2.0, 0.5, 0.25
    env = math.exp(-0.5 * (s + t + sp + tp))
    assert f.full(s, t, sp, tp) == pytest.approx(
        env * f.reduced(s, t, sp, tp), rel=1e-14)
