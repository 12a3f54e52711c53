import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lrosc.errors import ConfigError, DomainError
from lrosc.schedule import (
    Constant,
    Exponential,
    Function,
    Polynomial,
    Sinusoid,
    Sum,
    Tabulated,
    as_schedule,
    schedule_from_dict,
)

finite = st.floats(-5, 5, allow_nan=False)


def test_constant_and_derivative():
    c = Constant(2.5)
    assert c(3.0) == 2.5 and c.derivative(1.0) == 0.0 and c.is_constant


def test_polynomial_ascending_order():
    p = Polynomial((1.0, 2.0, 3.0))
    assert p(2.0) == pytest.approx(1 + 4 + 12)
    assert p.derivative(2.0) == pytest.approx(2 + 12)


def test_sinusoid_and_exponential_derivatives_match_difference_quotient():
    for s in (Sinusoid(1.0, 0.3, 1.7, 0.2), Exponential(0.5, 0.2, -0.3)):
        h = 1e-6
        fd = (s(0.7 + h) - s(0.7 - h)) / (2 * h)
        assert s.derivative(0.7) == pytest.approx(fd, rel=1e-8)


def test_tabulated_is_c1_and_has_domain():
    t = np.linspace(0, 1, 11)
    s = Tabulated(tuple(t), tuple(np.sin(t)))
    assert s(0.55) == pytest.approx(np.sin(0.55), abs=1e-4)
    with pytest.raises(DomainError):
        s(1.5)
    with pytest.raises(DomainError):
        s(np.array([0.5, 1.5]))


def test_sum_and_addition():
    s = Sinusoid(1.0, 0.5, 2.0) + 1.0
    assert isinstance(s, Sum)
    assert s(0.0) == pytest.approx(2.0)


@given(finite, finite, st.floats(0.01, 3), finite)
def test_dict_round_trip(offset, amp, freq, phase):
    s = Sinusoid(offset, amp, freq, phase)
    s2 = schedule_from_dict(s.to_dict())
    assert s2 == s
    assert s2.to_dict() == s.to_dict()


def test_schedule_dict_errors():
    with pytest.raises(ConfigError):
        schedule_from_dict({"type": "nope"})
    with pytest.raises(ConfigError):
        schedule_from_dict("1.0")
    with pytest.raises(ConfigError):
        schedule_from_dict(True)


def test_function_wraps_callables_but_does_not_serialize():
    f = as_schedule(lambda t: 2 * t)
    assert isinstance(f, Function) and f(1.5) == 3.0
    with pytest.raises(ConfigError):
        f.to_dict()


@settings(max_examples=50)
@given(st.lists(finite, min_size=1, max_size=4), st.floats(-3, 3))
def test_polynomial_round_trip_and_array_eval(coeffs, t):
    p = Polynomial(tuple(coeffs))
    assert schedule_from_dict(p.to_dict()) == p
    arr = p(np.array([t, t]))
    assert arr[0] == pytest.approx(p(t))
