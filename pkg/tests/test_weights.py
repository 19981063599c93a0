import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wbergman import expr
from wbergman.errors import InvalidArgument, WeightDomainError, WeightSyntaxError
from wbergman.weights import (
    Angular, ExpModulus, Expression, Gaussian, RadialAngularProduct, StandardAlpha,
    dilation_ratio, evaluate_weight, parse_weight, unit_weight, weight_from_name,
)


def test_parse_examples():
    w = parse_weight("exp(-2*absz^2)", 2)
    assert evaluate_weight(w, [0, 0]) == 1.0
    assert evaluate_weight(parse_weight("(1-r1^2)*(1-r2^2)", 2), [0, 0]) == 1.0
    v = evaluate_weight(parse_weight("exp(-(x1^2+x2^2))", 2), [0.5, 0.5j])
    assert v == pytest.approx(math.exp(-0.25), rel=1e-15)


def test_parse_nonradial_gaussian_reference_value():
    # z = (1, i): x1 = 1, x2 = 0; evaluated through the AST because z lies on the boundary
    ast = expr.parse("exp(-(x1^2+x2^2))", 2)
    pts = np.array([[1.0, 1j]])
    assert float(expr.evaluate(ast, expr.point_variables(pts))[0]) == pytest.approx(
        0.3678794412, abs=1e-10)


@pytest.mark.parametrize("src, value", [
    ("2^3^2", 512.0), ("-2^2", -4.0), ("(-2)^2", 4.0), ("2^-1", 0.5),
    ("8/4/2", 1.0), ("1-2-3", -4.0), ("2*3+4*5", 26.0), ("--3", 3.0),
    ("pow(2, 10)", 1024.0), ("sqrt(16) + abs(-1) + log(1) + cos(0) + sin(0)", 6.0),
])
def test_precedence_and_associativity(src, value):
    ast = expr.parse(src, 1)
    assert float(expr.evaluate(ast, expr.point_variables(np.zeros((1, 1), complex)))) == value


@pytest.mark.parametrize("src, offset", [
    ("1 + $", 4), ("exp(1", 5), ("foo(1)", 0), ("x3", 0), ("(1+2))", 5), ("", 0),
    ("1 +", 3), ("\u00a0\u00a0$", 4),
])
def test_syntax_errors_report_byte_offset(src, offset):
    with pytest.raises(WeightSyntaxError) as exc:
        expr.parse(src, 2)
    assert exc.value.offset == offset


def test_variable_index_out_of_range():
    with pytest.raises(WeightSyntaxError, match="out of range"):
        parse_weight("r3", 2)
    with pytest.raises(WeightSyntaxError):
        parse_weight("th0", 2)


@pytest.mark.parametrize("src", ["x1^0.5", "log(x1 - 1)", "sqrt(-1 - r1)", "1/(x1 - x1)"])
def test_domain_errors(src):
    w = parse_weight(src, 1)
    with pytest.raises(WeightDomainError):
        w(np.array([[-0.5 + 0.1j]]))


def test_nonpositive_weight_rejected_with_point():
    w = parse_weight("x1", 1)
    with pytest.raises(WeightDomainError) as exc:
        evaluate_weight(w, [-0.25])
    assert exc.value.point is not None


def test_builtin_values():
    assert evaluate_weight(StandardAlpha(1, 1.0), [0]) == 2.0
    assert evaluate_weight(Gaussian(2, 1.0), [0.5, 0.5]) == pytest.approx(0.6065306597, abs=1e-10)
    assert evaluate_weight(ExpModulus(1), [0]) == 1.0


def test_evaluate_weight_requires_interior():
    with pytest.raises(InvalidArgument):
        evaluate_weight(StandardAlpha(1, 1.0), [1.0])
    with pytest.raises(InvalidArgument):
        evaluate_weight(ExpModulus(2), [0.8, 0.8])


def test_dilation_ratio_examples():
    rng = np.random.default_rng(0)
    g = Gaussian(2, 1.5)
    sa = StandardAlpha(1, 1.0)
    ang = Angular(2, "(4*pi^2 - th1^2) * (1 + th2)")
    for _ in range(200):
        r = rng.uniform(0.05, 0.999)
        z = r * rng.uniform(0, 0.999, 2) * np.exp(2j * np.pi * rng.uniform(size=2))
        assert dilation_ratio(g, z, r, 0) <= 1.0
        assert dilation_ratio(ang, z, r, 0) == pytest.approx(1.0, abs=1e-12)
        assert dilation_ratio(sa, z[:1], r, math.ceil(2 * 1.0 + 1)) <= 1.0


def test_dilation_ratio_argument_checks():
    with pytest.raises(InvalidArgument):
        dilation_ratio(Gaussian(1, 1.0), [0.6], 0.5, 0)
    with pytest.raises(InvalidArgument):
        dilation_ratio(Gaussian(1, 1.0), [0.1], 1.0, 0)


def test_angular_rejects_other_variables():
    with pytest.raises(InvalidArgument):
        Angular(1, "r1 + th1")
    with pytest.raises(InvalidArgument):
        RadialAngularProduct(1, "th1", "1")


def test_angular_argument_convention_at_origin():
    w = Angular(1, "1 + th1")
    assert evaluate_weight(w, [0.0]) == 1.0
    assert evaluate_weight(w, [-0.5]) == pytest.approx(1 + math.pi)
    assert evaluate_weight(w, [-0.5j]) == pytest.approx(1 + 1.5 * math.pi)


def test_angular_scaling_invariance_sampled():
    w = Angular(2, "exp(cos(th1)) * (2 + sin(th2))")
    rng = np.random.default_rng(1)
    z = 0.5 * rng.uniform(size=(500, 2)) * np.exp(2j * np.pi * rng.uniform(size=(500, 2)))
    t = rng.uniform(0.1, 1.9, size=(500, 2))
    assert np.allclose(w(z * t), w(z), rtol=1e-12, atol=0)


def test_gaussian_rotation_invariance():
    w = Gaussian(3, 0.7)
    rng = np.random.default_rng(2)
    z = 0.5 * (rng.normal(size=(300, 3)) + 1j * rng.normal(size=(300, 3))) / 3
    u = np.exp(2j * np.pi * rng.uniform(size=(300, 3)))
    assert np.max(np.abs(w(u * z) - w(z))) <= 1e-12


def test_expression_matches_builtin_gaussian():
    beta = 1.3
    builtin = Gaussian(2, beta)
    parsed = parse_weight(f"exp(-{beta!r}*absz^2)", 2)
    rng = np.random.default_rng(3)
    z = 0.7 * rng.uniform(size=(1000, 2)) * np.exp(2j * np.pi * rng.uniform(size=(1000, 2)))
    assert np.max(np.abs(parsed(z) - builtin(z))) <= 1e-12


def test_weight_from_name_variants():
    assert isinstance(weight_from_name("standard_alpha", 2, alpha=1), StandardAlpha)
    assert weight_from_name("gaussian_real", 1, beta=2).mode == "real"
    assert isinstance(weight_from_name("product:r1|2+cos(th1)", 1), RadialAngularProduct)
    assert isinstance(weight_from_name("angular:1+th1", 1), Angular)
    assert isinstance(weight_from_name("expr:1+r1", 1), Expression)
    assert weight_from_name("unit", 2) == unit_weight(2)
    with pytest.raises(InvalidArgument):
        weight_from_name("bogus", 1)


# --- round trip of the pretty printer -------------------------------------

names = st.sampled_from(["x1", "y2", "r1", "th2", "absz", "pi"])
numbers = st.floats(0, 1e6, allow_nan=False, allow_infinity=False).map(
    lambda v: expr.Num(float(v)))
leaves = st.one_of(numbers, names.map(lambda s: expr.parse(s, 2)))


def _extend(children):
    return st.one_of(
        st.builds(expr.Neg, children),
        st.builds(expr.BinOp, st.sampled_from(["+", "-", "*", "/", "^"]), children, children),
        st.builds(lambda a: expr.Call("exp", (a,)), children),
        st.builds(lambda a, b: expr.Call("pow", (a, b)), children, children),
    )


asts = st.recursive(leaves, _extend, max_leaves=12)


@given(asts)
@settings(max_examples=300)
def test_pretty_print_round_trip(ast):
    text = expr.to_source(ast)
    again = expr.parse(text, 2)
    assert again == ast
    assert expr.to_source(again) == text
