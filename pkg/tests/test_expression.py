import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heavenly.expression import (
    ExpressionError,
    ExpressionSyntaxError,
    UnknownIdentifier,
    parse_expression,
    self_test,
)


def test_precedence():
    assert parse_expression("1 + 2 * 3")() == 7
    assert parse_expression("2 ^ 3 ^ 2")() == 512
    assert parse_expression("-2 ^ 2")() == -4
    assert parse_expression("2 ** 3")() == 8
    assert parse_expression("(1 + 2) * 3")() == 9
    assert parse_expression("pi")() == pytest.approx(np.pi)


def test_evaluates_on_arrays():
    x = np.linspace(0, 1, 5)
    e = parse_expression("sin(x) * exp(-t) + log(1 + x)")
    assert np.allclose(e(x=x, t=0.5), np.sin(x) * np.exp(-0.5) + np.log1p(x))


def test_variables():
    assert parse_expression("sin(x1 + 2*x2) + y*t").variables() == {"x1", "x2", "y", "t"}


@pytest.mark.parametrize(
    "text, pos, kind",
    [
        ("sin(x", 5, ExpressionSyntaxError),
        ("1 +", 3, ExpressionSyntaxError),
        ("x $ 2", 2, ExpressionSyntaxError),
        ("tan(x)", 0, UnknownIdentifier),
        ("2 * z", 4, UnknownIdentifier),
        ("", 0, ExpressionSyntaxError),
        ("(x))", 3, ExpressionSyntaxError),
    ],
)
def test_errors_report_position(text, pos, kind):
    with pytest.raises(kind) as info:
        parse_expression(text)
    assert info.value.position == pos
    assert isinstance(info.value, ValueError) and isinstance(info.value, ExpressionError)


def test_mixed_derivative():
    e = parse_expression("sin(x + y) * t^2")
    d = e.derivative(x=1, t=1)
    assert d(x=0.3, y=0.2, t=2.0) == pytest.approx(np.cos(0.5) * 4.0)
    assert parse_expression("x^y").derivative(y=1)(x=2.0, y=3.0) == pytest.approx(8 * np.log(2))


def test_self_test_on_composite():
    e = parse_expression("exp(sin(x) * y) / (2 + cos(t)) + log(2 + x^2)")
    assert self_test(e, {"x": 0.4, "y": -0.7, "t": 1.1}) < 1e-8


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(1, 4))
def test_derivative_of_polynomial_trig(a, b, k):
    e = parse_expression(f"{a!r} * sin({k}*x) + {b!r} * x^3")
    x = 0.37
    want = a * k * np.cos(k * x) + 3 * b * x**2
    assert e.derivative(x=1)(x=x) == pytest.approx(want, abs=1e-12)
