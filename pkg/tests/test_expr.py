import jax.numpy as jnp
import numpy as np
import pytest

from weylscope.expr import ExprError, parse

X = np.array([2.0, 3.0, 0.5])


@pytest.mark.parametrize(
    "text, expected",
    [
        ("1+x1^2", 5.0),
        ("-x2^2", -9.0),
        ("2^3^2", 512.0),
        ("x1*x2/4", 1.5),
        ("(1+x3)*2", 3.0),
        ("exp(0)+sin(0)+cos(0)", 2.0),
        ("+x1 - -x2", 5.0),
        ("1e-1*x1", 0.2),
    ],
)
def test_evaluate(text, expected):
    assert parse(text).evaluate(X, np) == pytest.approx(expected)


def test_max_var_and_jax_namespace():
    e = parse("exp(x3) + x1*sin(x2)")
    assert e.max_var == 3
    assert parse("4.5").max_var == 0
    f = e.compile(jnp)
    assert float(f(jnp.asarray(X))) == pytest.approx(np.exp(0.5) + 2 * np.sin(3.0))


@pytest.mark.parametrize(
    "text, column",
    [
        ("1+*x1", 3),
        ("x1**2", 3),
        ("1 + y", 5),
        ("x0 + 1", 1),
        ("2*tan(x1)", 3),
        ("exp(x1, x2)", 1),
        ("x1 if x2 else 1", 1),
        ("'a'", 1),
        ("x1^2 + foo", 8),
    ],
)
def test_errors_report_column(text, column):
    with pytest.raises(ExprError) as info:
        parse(text)
    assert info.value.column == column
    assert f"column {column}" in str(info.value)


def test_non_string_and_empty():
    with pytest.raises(ExprError):
        parse(3)
    with pytest.raises(ExprError):
        parse("   ")
