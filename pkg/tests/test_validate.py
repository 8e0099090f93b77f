import numpy as np

from cbsduality import kernel_diff
from cbsduality.validate import (check_oracle_equivalence,
                                 check_quadrature_envelope,
                                 check_quadrature_separable,
                                 check_truncation_guard, random_neutral_case)


def test_fast_checks_pass():
    assert check_quadrature_envelope().passed
    assert check_quadrature_separable().passed
    assert check_truncation_guard().passed


def test_oracle_equivalence_small_sample():
    res = check_oracle_equivalence(cases=15, seed=1)
    assert res.passed, res.line()


def test_sign_flipped_kernel_is_caught():
    # mutation sanity: a sign error in the kernel must blow up equivalence
    def flipped(dt, p):
        return -kernel_diff(dt, p)

    res = check_oracle_equivalence(cases=5, seed=1, kernel_override=flipped)
    assert not res.passed
    assert res.measured > 1e-3


def test_undersized_fock_dim_is_caught():
    res = check_oracle_equivalence(cases=5, seed=1, fock_dim=8)
    assert not res.passed


def test_random_cases_are_neutral_and_usable():
    rng = np.random.default_rng(0)
    for _ in range(10):
        ev, p = random_neutral_case(rng)
        assert ev.is_neutral(1) and ev.is_neutral(2)
        assert len(ev) <= 8
        assert p.omega_R / p.omega_ho <= 0.3
        assert p.nbar <= 2.0
