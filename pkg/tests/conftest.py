import math

import pytest

from cbsduality import PhysParams, QuadratureSpec, derive, visibility, predictability


def acceptance_line(tag: str, passed: bool, detail: str) -> None:
    """One visible pass/fail line per acceptance criterion (run with -s)."""
    status = "PASS" if passed else "FAIL"
    print(f"\nACCEPTANCE {tag}: {status}  {detail}")


@pytest.fixture(scope="session")
def zero_t_grid():
    """Shared zero-temperature grid for the saturation and predictability
    criteria: nbar = 0, omega_ho = 1e-4, chi <= 0.05, mu in {0, 1}, with
    detunings spanning the asymmetric regime. Returns a list of dicts with
    params, derived quantities and quadrature V, P.
    """
    rows = []
    spec = QuadratureSpec(order=48)
    for delta in (0.25, 0.5, 1.0):
        for chi in (0.01, 0.02, 0.05):
            for mu in (0.0, 1.0):
                g = math.hypot(delta, 0.5)
                p = PhysParams(delta=delta, omega_ho=1e-4, omega_R=chi * g,
                               mu=mu, nbar=0.0)
                d = derive(p)
                vis = visibility(p, spec)
                pred = predictability(p, spec)
                rows.append(dict(p=p, d=d, vis=vis, pred=pred,
                                 delta=delta, chi=chi, mu=mu))
    return rows
