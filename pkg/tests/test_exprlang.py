import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from indefgeom import exprlang as el
from indefgeom.errors import (
    DomainError,
    ExprSyntaxError,
    InputError,
    NonConstantExponentError,
    UnknownIdentifierError,
)

TX = ["t", "x1"]


def test_parse_pow_sub_tree():
    e = el.parse_expr("x1^2 - t^2", TX)
    assert e == el.BinOp("-", el.Pow(el.Var("x1", 1), 2.0), el.Pow(el.Var("t", 0), 2.0))


def test_parse_product_tree():
    e = el.parse_expr("sin(q)*sin(q)", ["q", "p"])
    s = el.Func("sin", el.Var("q", 0))
    assert e == el.BinOp("*", s, s)


def test_trailing_operator_offset():
    with pytest.raises(ExprSyntaxError) as info:
        el.parse_expr("x1 + ", TX)
    assert info.value.offset == 5


@pytest.mark.parametrize(
    "text, exc",
    [
        ("y + 1", UnknownIdentifierError),
        ("x1^t", NonConstantExponentError),
        ("(x1", ExprSyntaxError),
        ("x1 $ 2", ExprSyntaxError),
        ("tan(x1)", UnknownIdentifierError),
    ],
)
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        el.parse_expr(text, TX)


def test_coordinate_clashing_with_function():
    with pytest.raises(InputError):
        el.parse_expr("exp", ["exp"])


def test_left_associativity():
    e = el.parse_expr("8 - 2 - 1", [])
    assert el.eval_expr(e, []) == 5.0
    assert el.eval_expr(el.parse_expr("2^3^2", []), []) == 64.0
    assert el.eval_expr(el.parse_expr("-2^2", []), []) == -4.0


def test_eval_examples():
    assert el.eval_expr(el.parse_expr("x1^2 - t^2", TX), [1.0, 2.0]) == 3.0
    assert el.eval_expr(el.parse_expr("exp(0*q)", ["q"]), [12.3]) == 1.0


def test_domain_error_names_subexpression():
    with pytest.raises(DomainError) as info:
        el.eval_expr(el.parse_expr("x1 + 1/t", TX), [0.0, 1.0])
    assert info.value.subexpr == "1/t"
    with pytest.raises(DomainError):
        el.eval_expr(el.parse_expr("log(t)", TX), [-1.0, 0.0])


def test_compiled_matches_interpreter_and_reports_domain():
    exprs = [el.parse_expr(s, TX) for s in ["x1^2 - t^2", "sin(t)*exp(x1)", "sqrt(x1)"]]
    f = el.compile_exprs(exprs)
    p = [0.3, 1.7]
    np.testing.assert_array_equal(f(p), [el.eval_expr(e, p) for e in exprs])
    with pytest.raises(DomainError) as info:
        f([0.0, -1.0])
    assert info.value.subexpr == "sqrt(x1)"


def test_diff_examples():
    d = el.diff_expr(el.parse_expr("sin(q)^2", ["q"]), "q")
    for q in np.linspace(-2, 2, 7):
        assert el.eval_expr(d, [q]) == pytest.approx(2 * math.sin(q) * math.cos(q), abs=1e-14)
    assert el.diff_expr(el.parse_expr("x1^2", TX), "t") == el.ZERO
    e = el.parse_expr("q^3", ["q"])
    for _ in range(3):
        e = el.diff_expr(e, "q")
    assert e == el.Const(6.0)


def test_diff_folding_keeps_size_bounded():
    e = el.parse_expr("x1*x1*t", TX)
    d4 = el.diff_expr(el.diff_expr(el.diff_expr(el.diff_expr(e, "x1"), "x1"), "t"), "t")
    assert d4 == el.ZERO


def _random_expr(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.6:
            return rng.choice(["x0", "x1", "x2"])
        return f"{rng.uniform(0.1, 2.0):.3f}"
    kind = rng.integers(6)
    a = _random_expr(rng, depth - 1)
    if kind == 0:
        return f"({a} + {_random_expr(rng, depth - 1)})"
    if kind == 1:
        return f"({a} - {_random_expr(rng, depth - 1)})"
    if kind == 2:
        return f"({a} * {_random_expr(rng, depth - 1)})"
    if kind == 3:
        return f"({a}) / (2 + ({_random_expr(rng, depth - 1)})^2)"
    if kind == 4:
        return f"({a})^{int(rng.integers(2, 4))}"
    return f"{rng.choice(['sin', 'cos', 'exp', 'sinh'])}(0.5*({a}))"


def test_derivative_matches_central_difference():
    rng = np.random.default_rng(3)
    coords = ["x0", "x1", "x2"]
    h = 1e-5
    for _ in range(100):
        e = el.parse_expr(_random_expr(rng, 4), coords)
        p = rng.uniform(-1, 1, 3)
        k = int(rng.integers(3))
        d = el.eval_expr(el.diff_expr(e, coords[k]), p)
        hp, hm = p.copy(), p.copy()
        hp[k] += h
        hm[k] -= h
        fd = (el.eval_expr(e, hp) - el.eval_expr(e, hm)) / (2 * h)
        assert abs(d - fd) <= 1e-6 * (1 + abs(d))


def test_diff_is_linear():
    rng = np.random.default_rng(5)
    coords = ["x0", "x1", "x2"]
    for _ in range(30):
        a, b = _random_expr(rng, 3), _random_expr(rng, 3)
        combo = el.parse_expr(f"2.5*({a}) - 0.75*({b})", coords)
        da = el.diff_expr(el.parse_expr(a, coords), "x1")
        db = el.diff_expr(el.parse_expr(b, coords), "x1")
        p = rng.uniform(-1, 1, 3)
        lhs = el.eval_expr(el.diff_expr(combo, "x1"), p)
        rhs = 2.5 * el.eval_expr(da, p) - 0.75 * el.eval_expr(db, p)
        assert abs(lhs - rhs) <= 1e-12 * (1 + abs(lhs))


def test_substitute_composes():
    e = el.parse_expr("x0*x1 + sin(x0)", ["x0", "x1"])
    sub = {"x0": el.parse_expr("2*y", ["y", "z"]), "x1": el.parse_expr("z - y", ["y", "z"])}
    c = el.substitute(e, sub)
    y, z = 0.4, -1.3
    assert el.eval_expr(c, [y, z]) == pytest.approx(2 * y * (z - y) + math.sin(2 * y))
    assert el.free_coords(c) == {"y", "z"}


_atoms = st.one_of(
    st.sampled_from(["a", "b", "c"]),
    st.integers(0, 50).map(str),
    st.floats(0.01, 100, allow_nan=False).map(lambda v: f"{v:.4g}"),
)


def _extend(children):
    return st.one_of(
        st.tuples(children, st.sampled_from(["+", "-", "*", "/"]), children).map(
            lambda t: f"({t[0]}) {t[1]} ({t[2]})"
        ),
        children.map(lambda s: f"-({s})"),
        st.tuples(children, st.integers(-3, 4)).map(lambda t: f"({t[0]})^{t[1]}"),
        st.tuples(st.sampled_from(el.FUNCTIONS), children).map(lambda t: f"{t[0]}({t[1]})"),
    )


expr_text = st.recursive(_atoms, _extend, max_leaves=12)


@given(expr_text)
def test_render_round_trip(text):
    coords = ["a", "b", "c"]
    e = el.parse_expr(text, coords)
    assert el.parse_expr(el.render(e), coords) == e
