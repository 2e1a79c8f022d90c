import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ermakov.errors import (
    DomainError, ExprSyntaxError, MissingBindingError, QuadratureError, UndeclaredVariableError,
)
from ermakov.expr import (
    BinOp, Call, Const, ExprAst, Neg, Var, constant, derivative, evaluate, integral, jet, parse,
    to_source,
)


def test_parse_and_eval_polynomial():
    assert evaluate(parse("x^2+1", ["x"]), {"x": 2}) == 5


def test_three_distinct_names():
    ast = parse("c1/tau^2 + c2", ["tau", "c1", "c2"])
    assert ast.free_vars == {"tau", "c1", "c2"}
    assert evaluate(ast, {"tau": 1, "c1": 2, "c2": 3}) == 5


def test_syntax_error_offset():
    with pytest.raises(ExprSyntaxError) as err:
        parse("x +* 2", ["x"])
    assert err.value.offset == 3
    assert "offset 3" in str(err.value)


@pytest.mark.parametrize("src,offset", [("(x", 2), ("x)", 1), ("sin x", 4), ("", 0), ("2 $ 3", 2)])
def test_syntax_error_offsets(src, offset):
    with pytest.raises(ExprSyntaxError) as err:
        parse(src, ["x"])
    assert err.value.offset == offset


def test_offset_counts_bytes():
    with pytest.raises(ExprSyntaxError) as err:
        parse("x + é", ["x"])
    assert err.value.offset == 4


def test_undeclared_variable_named():
    with pytest.raises(UndeclaredVariableError) as err:
        parse("x + zeta", ["x"])
    assert err.value.name == "zeta"


@pytest.mark.parametrize("src,bindings,value", [
    ("sin(t)", {"t": 0.0}, 0.0),
    ("sqrt(1+t^2)", {"t": 1.0}, math.sqrt(2)),
    ("2^3^2", {}, 512.0),
    ("-2^2", {}, -4.0),
    ("2**3", {}, 8.0),
    ("1 - 2 - 3", {}, -4.0),
    ("8 / 4 / 2", {}, 1.0),
    ("2 * -3", {}, -6.0),
    ("pi", {}, math.pi),
    ("abs(-3) + tanh(0) + exp(0) + ln(1) + cos(0)", {}, 5.0),
])
def test_eval_examples(src, bindings, value):
    assert evaluate(parse(src, ["t"]), bindings) == pytest.approx(value, abs=1e-15)


def test_declared_pi_is_a_variable():
    assert evaluate(parse("pi + 1", ["pi"]), {"pi": 2.0}) == 3.0


@pytest.mark.parametrize("src,x", [("1/x", 0.0), ("ln(x)", 0.0), ("ln(x)", -1.0),
                                   ("sqrt(x)", -1.0), ("x^0.5", -2.0), ("exp(x)", 1000.0)])
def test_domain_errors(src, x):
    with pytest.raises(DomainError):
        evaluate(parse(src, ["x"]), {"x": x})


def test_missing_binding():
    with pytest.raises(MissingBindingError):
        evaluate(parse("x + y", ["x", "y"]), {"x": 1.0})


def test_ast_is_immutable():
    ast = parse("x", ["x"])
    with pytest.raises(AttributeError):
        ast.root = Const(1.0)


@pytest.mark.parametrize("src,x,order,value", [
    ("sin(t)", 0.0, 1, 1.0),
    ("sqrt(1+t^2)", 0.0, 2, 1.0),
    ("t^3", 2.0, 1, 12.0),
    ("t^3", 2.0, 2, 12.0),
    ("5", 1.0, 1, 0.0),
])
def test_derivative_examples(src, x, order, value):
    assert derivative(parse(src, ["t"]), "t", {"t": x}, order) == pytest.approx(value, abs=1e-14)


def test_derivative_matches_central_difference():
    ast = parse("x^3", ["x"])
    h = 1e-5
    fd = (ast(2 + h) - ast(2 - h)) / (2 * h)
    assert abs(derivative(ast, "x", {"x": 2.0}) - fd) <= 1e-6


def test_jet_returns_all_orders():
    f, d1, d2 = jet(parse("exp(2*t)", ["t"]), "t", 0.5)
    e = math.exp(1.0)
    assert (f, d1, d2) == pytest.approx((e, 2 * e, 4 * e), rel=1e-15)


def test_derivative_domain_error():
    with pytest.raises(DomainError):
        derivative(parse("sqrt(t)", ["t"]), "t", {"t": 0.0})


# --- AD versus central differences for every node kind -----------------------

NODE_KINDS = {
    "const": ("3.5 + 0*x", (-3, 3)),
    "var": ("x", (-3, 3)),
    "neg": ("-x", (-3, 3)),
    "add": ("x + y", (-3, 3)),
    "sub": ("y - x", (-3, 3)),
    "mul": ("x * y", (-3, 3)),
    "div": ("y / x", (0.3, 3)),
    "pow_const": ("x^3.5", (0.2, 3)),
    "pow_var": ("y^x", (-2, 2)),
    "pow_both": ("x^x", (0.2, 2.5)),
    "sin": ("sin(x)", (-3, 3)),
    "cos": ("cos(x)", (-3, 3)),
    "exp": ("exp(x)", (-3, 3)),
    "ln": ("ln(x)", (0.1, 5)),
    "sqrt": ("sqrt(x)", (0.1, 5)),
    "abs": ("abs(x)", (0.1, 3)),
    "abs_neg": ("abs(x)", (-3, -0.1)),
    "tanh": ("tanh(x)", (-3, 3)),
}


def _close(ad, fd, rtol):
    # relative, with an absolute floor where the derivative itself is small
    return abs(ad - fd) <= rtol * max(1.0, abs(fd))


@pytest.mark.parametrize("kind", sorted(NODE_KINDS))
def test_ad_matches_fd_per_node_kind(kind):
    src, (lo, hi) = NODE_KINDS[kind]
    ast = parse(src, ["x", "y"])
    rng = random.Random(kind)
    h = 1e-5
    for _ in range(50):
        x = rng.uniform(lo, hi)
        y = rng.uniform(0.5, 2.0)
        fd1 = (ast(x + h, y) - ast(x - h, y)) / (2 * h)
        ad1 = derivative(ast, "x", {"x": x, "y": y}, 1)
        assert _close(ad1, fd1, 1e-6), (x, ad1, fd1)
        g = lambda z: derivative(ast, "x", {"x": z, "y": y}, 1)
        fd2 = (g(x + h) - g(x - h)) / (2 * h)
        ad2 = derivative(ast, "x", {"x": x, "y": y}, 2)
        assert _close(ad2, fd2, 1e-6), (x, ad2, fd2)


# --- quadrature ------------------------------------------------------------------


def test_integral_examples():
    tau = ["tau", "c1", "c2", "c3", "c4"]
    assert integral(parse("tau", tau), "tau", 0, 1, {"c1": 0, "c2": 0, "c3": 0, "c4": 0}) == pytest.approx(0.5, abs=1e-14)
    assert integral(constant(1.0, ["tau"]), "tau", 1, 3) == pytest.approx(2.0, abs=1e-14)
    G = parse("c1/tau^2 + c2 + c3*tau + c4*tau^2", tau)
    value = integral(G, "tau", 1, 2, {"c1": 1, "c2": 1, "c3": 1, "c4": 1})
    assert value == pytest.approx(0.5 + 1 + 1.5 + 7 / 3, abs=1e-13)


def test_integral_reversed_limits():
    f = parse("exp(x)", ["x"])
    assert integral(f, "x", 1, 0) == pytest.approx(-(math.e - 1), abs=1e-13)


def test_integral_domain_error_inside_interval():
    with pytest.raises(DomainError):
        integral(parse("1/x", ["x"]), "x", -1, 1)


def test_integral_budget_exhausted():
    with pytest.raises(QuadratureError):
        integral(parse("sin(1/x)", ["x"]), "x", 1e-6, 1, tol=1e-15)


@pytest.mark.parametrize("src,a,b,c", [("exp(-x^2)", -1.0, 0.3, 2.0), ("1/(1+x^2)", 0, 5, 40),
                                        ("sqrt(x)*sin(3*x)", 0.01, 1.0, 7.0)])
def test_integral_additive(src, a, b, c):
    tol = 1e-10
    f = parse(src, ["x"])
    lhs = integral(f, "x", a, b, tol=tol) + integral(f, "x", b, c, tol=tol)
    assert abs(lhs - integral(f, "x", a, c, tol=tol)) <= 2 * tol


# --- print / parse round trip ----------------------------------------------------

VARS = ("x", "y")
leaf = st.one_of(
    st.floats(-5, 5, allow_nan=False).map(lambda v: Const(round(v, 3))),
    st.sampled_from(VARS).map(Var),
)


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.tuples(st.sampled_from("+-*/"), children, children).map(lambda t: BinOp(*t)),
        st.tuples(children, st.integers(0, 3)).map(lambda t: BinOp("^", t[0], Const(float(t[1])))),
        st.tuples(st.sampled_from(["sin", "cos", "tanh", "abs"]), children).map(lambda t: Call(*t)),
        children.map(lambda c: Call("exp", Call("sin", c))),
    )


trees = st.recursive(leaf, _extend, max_leaves=12)


def _eval_or_error(ast, vals):
    try:
        return ast(*vals)
    except DomainError:
        return "domain"


@settings(max_examples=150, deadline=None)
@given(trees)
def test_print_parse_round_trip(tree):
    ast = ExprAst(tree, VARS)
    again = parse(to_source(tree), VARS)
    rng = random.Random(to_source(tree))
    for _ in range(100):
        vals = (rng.uniform(-3, 3), rng.uniform(-3, 3))
        a, b = _eval_or_error(ast, vals), _eval_or_error(again, vals)
        if a == "domain" or b == "domain":
            assert a == b
        elif math.isfinite(a):
            assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


def test_printer_precedence():
    assert to_source(parse("(a-b)-(c-d)", "abcd").root) == "a - b - (c - d)"
    assert to_source(parse("(2^3)^2", []).root) == "(2.0 ^ 3.0) ^ 2.0"
    assert parse(to_source(parse("-(x^2)", ["x"]).root), ["x"])(3.0) == -9.0
