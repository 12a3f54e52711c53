"""Random model and state generators shared by the test modules."""

import numpy as np

from lrosc.invariant import InvariantCoefficients
from lrosc.quadratic import NCParams, PhysicalParams
from lrosc.schedule import Polynomial, Sinusoid, Sum


def random_static(rng, e=1.0):
    """Constant physical parameters with positive springs (stable, positive-definite H)."""
    return PhysicalParams(
        mu1=rng.uniform(0.5, 2.0),
        mu2=rng.uniform(0.5, 2.0),
        k1=rng.uniform(0.3, 2.0),
        k2=rng.uniform(0.3, 2.0),
        alpha01=rng.uniform(-1.0, 1.0),
        alpha02=rng.uniform(-1.0, 1.0),
        e=e,
    )


def _wiggle(rng, base, rel=0.2, freq=(0.2, 1.2)):
    return Sinusoid(base, rel * base * rng.uniform(-1, 1), rng.uniform(*freq), rng.uniform(0, 2 * np.pi))


def random_dynamic(rng, horizon=10.0):
    """Smooth time-dependent schedules mixing sinusoids and low-order polynomials.

    The polynomial drift is kept small enough that masses and springs stay
    positive on ``[0, horizon]``.
    """
    drift = 0.1 / horizon
    return PhysicalParams(
        mu1=_wiggle(rng, rng.uniform(0.7, 1.5)),
        mu2=Sum((_wiggle(rng, rng.uniform(0.7, 1.5)), Polynomial((0.0, drift * rng.uniform(-1, 1))))),
        k1=_wiggle(rng, rng.uniform(0.5, 2.0)),
        k2=Sum((_wiggle(rng, rng.uniform(0.5, 2.0)), Polynomial((0.0, 0.0, 0.01 * drift * rng.uniform(-1, 1))))),
        alpha01=Sinusoid(rng.uniform(-0.5, 0.5), rng.uniform(0, 0.3), rng.uniform(0.2, 1.0), rng.uniform(0, 6)),
        alpha02=Polynomial((rng.uniform(-0.5, 0.5), 0.02 * rng.uniform(-1, 1))),
    )


def random_nc(rng, dynamic=False):
    def sched(lo, hi):
        base = rng.uniform(lo, hi)
        return _wiggle(rng, base, 0.1) if dynamic else base

    return NCParams(
        theta=rng.uniform(-0.8, 0.8),
        eta=rng.uniform(-0.8, 0.8),
        m1=sched(0.5, 2.0),
        m2=sched(0.5, 2.0),
        omega1=sched(0.5, 1.5),
        omega2=sched(0.5, 1.5),
    )


def random_spd(rng, n=4, floor=0.3):
    A = rng.normal(size=(n, n))
    return A @ A.T + floor * np.eye(n)


def random_coefficients(rng):
    """Coefficients of a random positive-definite invariant (physical regime)."""
    return InvariantCoefficients.from_form(random_spd(rng))


#: criterion number -> (passed, detail), filled by the acceptance suite
ACCEPTANCE = {}


def record(n, ok, detail):
    ACCEPTANCE[n] = (bool(ok), detail)
    print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok
