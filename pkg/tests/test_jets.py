"""Tests for truncated Taylor arithmetic."""

import math

import numpy as np
import numpy.polynomial.polynomial as P
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from src.renormgeo.core.exceptions import JetDomainError
from src.renormgeo.services import jets
from src.renormgeo.services.jets import (
    Jet,
    graded_indices,
    jet_apply,
    jet_det,
    jet_inverse,
    jet_variable,
    jet_variables,
)

# ===== Layout =====


def test_graded_indices_order():
    """Multi-indices come by total degree, then in descending lexicographic order."""
    assert graded_indices(2, 2) == ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))


def test_coefficient_count_limit():
    """Four variables at order four give the 70-coefficient maximum."""
    x = jet_variable(0, 0.3, 4, 4)
    assert x.coeffs.shape[0] == 70


def test_layout_rejects_too_many_variables():
    """Charts have at most four parameters, so a fifth variable is a domain error."""
    with pytest.raises(JetDomainError) as info:
        jet_variable(0, 0.0, 5, 2)
    assert info.value.details["num_vars"] == 5


# ===== Arithmetic =====


def test_product_of_variables_is_exact():
    """(u0 u1) has the single degree-2 coefficient 1 and value u0 u1."""
    x, y = jet_variables(np.array([0.5, -2.0]), 3)
    p = x * y
    assert p.value == pytest.approx(-1.0)
    assert p.partial((1, 0)) == pytest.approx(-2.0)
    assert p.partial((0, 1)) == pytest.approx(0.5)
    assert p.partial((1, 1)) == pytest.approx(1.0)
    assert p.coefficient((2, 0)) == pytest.approx(0.0)


def test_polynomial_truncates_above_order():
    """x^5 expanded at 0 to order 4 has no nonzero coefficient."""
    x = jet_variable(0, 0.0, 1, 4)
    assert np.allclose((x**5).coeffs, 0.0)


def test_division_by_zero_jet_raises():
    """A jet whose value vanishes cannot be inverted."""
    x = jet_variable(0, 0.0, 1, 2)
    with pytest.raises(JetDomainError):
        _ = 1.0 / x


def test_scalar_division_by_zero_raises():
    """Dividing by a zero scalar is rejected."""
    x = jet_variable(0, 1.0, 1, 2)
    with pytest.raises(JetDomainError):
        _ = x / 0.0


def test_mixed_orders_truncate_to_lower():
    """Combining jets of different order keeps the lower order."""
    a = jet_variable(0, 1.0, 2, 4)
    b = jet_variable(1, 2.0, 2, 2)
    assert (a + b).order == 2
    assert (a * b).order == 2


def test_batched_jets_act_pointwise():
    """A batch of points behaves like the same points one at a time."""
    points = np.array([[0.2, 0.7], [1.1, -0.4], [0.0, 0.3]])
    u, v = jet_variables(points, 3)
    f = jets.sin(u) * jets.exp(v)
    for k, point in enumerate(points):
        a, b = jet_variables(point, 3)
        single = jets.sin(a) * jets.exp(b)
        assert np.allclose(f.coeffs[:, k], single.coeffs)


# ===== Elementary functions =====


@given(st.floats(min_value=-3.0, max_value=3.0))
@settings(max_examples=40, deadline=None)
def test_pythagorean_identity(x0: float):
    """sin^2 + cos^2 is the constant jet 1 at every point."""
    x = jet_variable(0, x0, 1, 4)
    total = jets.sin(x) ** 2 + jets.cos(x) ** 2
    assert total.value == pytest.approx(1.0)
    assert np.allclose(total.coeffs[1:], 0.0, atol=1e-12)


@given(st.floats(min_value=0.1, max_value=5.0))
@settings(max_examples=40, deadline=None)
def test_exp_log_inverse(x0: float):
    """exp(log x) reproduces x to every order."""
    x = jet_variable(0, x0, 1, 4)
    y = jets.exp(jets.log(x))
    assert np.allclose(y.coeffs, x.coeffs, atol=1e-12)


@given(st.floats(min_value=0.2, max_value=4.0), st.floats(min_value=-2.0, max_value=2.0))
@settings(max_examples=40, deadline=None)
def test_power_laws(x0: float, c: float):
    """x^c * x^-c is one and sqrt agrees with pow(0.5)."""
    x = jet_variable(0, x0, 1, 4)
    one = jet_apply("pow", x, c) * jet_apply("pow", x, -c)
    assert np.allclose(one.coeffs, Jet.constant(1.0, 1, 4).coeffs, atol=1e-10)
    assert np.allclose(jets.sqrt(x).coeffs, jets.power(x, 0.5).coeffs)


def test_atan_series_matches_closed_form():
    """The atan series has derivatives 1/(1+x^2) and -2x/(1+x^2)^2."""
    x0 = 0.7
    x = jets.atan(jet_variable(0, x0, 1, 4))
    assert x.value == pytest.approx(math.atan(x0))
    assert x.partial((1,)) == pytest.approx(1 / (1 + x0**2))
    assert x.partial((2,)) == pytest.approx(-2 * x0 / (1 + x0**2) ** 2)


@pytest.mark.parametrize("name", ["log", "sqrt"])
def test_domain_errors_name_function_and_value(name: str):
    """log and sqrt of a non-positive value report the function and the value."""
    x = jet_variable(0, -0.5, 1, 2)
    with pytest.raises(JetDomainError) as info:
        jet_apply(name, x)  # type: ignore[arg-type]
    assert info.value.details["function"] == name
    assert info.value.details["value"] == pytest.approx(-0.5)


def test_pow_without_exponent_rejected():
    """pow needs its exponent."""
    with pytest.raises(JetDomainError):
        jet_apply("pow", jet_variable(0, 1.0, 1, 2))


# ===== Calculus =====


def test_chain_rule_against_finite_differences():
    """Second partials of a composite field agree with central differences."""

    def field(u: float, v: float) -> float:
        return math.sin(u * v) * math.exp(u) / math.sqrt(1 + v * v)

    point = np.array([0.4, 0.9])
    u, v = jet_variables(point, 4)
    f = jets.sin(u * v) * jets.exp(u) / jets.sqrt(1 + v * v)
    h = 1e-4
    fuu = (field(0.4 + h, 0.9) - 2 * field(0.4, 0.9) + field(0.4 - h, 0.9)) / h**2
    fuv = (
        field(0.4 + h, 0.9 + h)
        - field(0.4 + h, 0.9 - h)
        - field(0.4 - h, 0.9 + h)
        + field(0.4 - h, 0.9 - h)
    ) / (4 * h * h)
    hessian = f.hessian()
    assert hessian[0, 0] == pytest.approx(fuu, rel=1e-5)
    assert hessian[0, 1] == pytest.approx(fuv, rel=1e-5)
    assert hessian[0, 1] == pytest.approx(hessian[1, 0])


def test_derivative_lowers_order():
    """d/du of u^3 v is 3 u^2 v, one order lower."""
    u, v = jet_variables(np.array([2.0, 0.5]), 4)
    d = (u**3 * v).derivative(0)
    assert d.order == 3
    assert d.value == pytest.approx(3 * 4.0 * 0.5)
    assert d.partial((0, 1)) == pytest.approx(12.0)


def test_partial_beyond_order_rejected():
    """Asking for a derivative above the jet order is a domain error."""
    x = jet_variable(0, 1.0, 1, 2)
    with pytest.raises(JetDomainError):
        x.partial((3,))


# ===== Expansion and composition =====

ELEMENTARY_TAGS = ["sin", "cos", "exp", "log", "sqrt", "atan", "pow"]
POSITIVE_DOMAIN = {"log", "sqrt", "pow"}


@given(st.integers(min_value=1, max_value=4), st.data())
@settings(max_examples=60, deadline=None)
def test_polynomial_jets_match_binomial_expansion(num_vars: int, data: st.DataObject):
    """Taylor coefficients of a degree-4 polynomial re-expanded about x0 are exact."""
    alphas = graded_indices(num_vars, 4)
    unit = st.floats(min_value=-1.0, max_value=1.0)
    point = data.draw(st.lists(unit, min_size=num_vars, max_size=num_vars))
    weights = data.draw(st.lists(unit, min_size=len(alphas), max_size=len(alphas)))

    variables = jet_variables(np.array(point), 4)
    poly = Jet.constant(0.0, num_vars, 4)
    for weight, alpha in zip(weights, alphas, strict=True):
        term = Jet.constant(weight, num_vars, 4)
        for x, a in zip(variables, alpha, strict=True):
            term = term * x**a
        poly = poly + term

    for beta in alphas:
        expected = 0.0
        for weight, alpha in zip(weights, alphas, strict=True):
            if all(a >= b for a, b in zip(alpha, beta, strict=True)):
                expected += weight * math.prod(
                    math.comb(a, b) * x0 ** (a - b)
                    for a, b, x0 in zip(alpha, beta, point, strict=True)
                )
        assert abs(float(poly.coefficient(beta)) - expected) <= 1e-13 * max(1.0, abs(expected))


@given(
    st.sampled_from(ELEMENTARY_TAGS),
    st.sampled_from(ELEMENTARY_TAGS),
    st.floats(min_value=-1.5, max_value=1.5),
    st.floats(min_value=-1.5, max_value=1.5),
    st.floats(min_value=0.2, max_value=2.0),
)
@settings(max_examples=100, deadline=None)
def test_composition_matches_series_substitution(
    outer: str, inner: str, c_outer: float, c_inner: float, x0: float
):
    """f(g(x)) as one jet equals f's series at g(x0) with g's jet substituted."""
    x = jet_variable(0, x0, 1, 4)
    g = jet_apply(inner, x, c_inner if inner == "pow" else None)  # type: ignore[arg-type]
    y0 = float(g.value)
    assume(outer not in POSITIVE_DOMAIN or y0 > 0.25)
    c = c_outer if outer == "pow" else None

    composed = jet_apply(outer, g, c).coeffs  # type: ignore[arg-type]
    series = jet_apply(outer, jet_variable(0, y0, 1, 4), c).coeffs  # type: ignore[arg-type]

    shift = g.coeffs.copy()
    shift[0] = 0.0
    expected = np.zeros(5)
    bound = np.zeros(5)
    power_, power_abs = np.array([1.0]), np.array([1.0])
    for k in range(5):
        expected[: power_.size] += series[k] * power_
        bound[: power_abs.size] += abs(series[k]) * power_abs
        power_ = P.polymul(power_, shift)[:5]
        power_abs = P.polymul(power_abs, np.abs(shift))[:5]

    assert np.all(np.abs(composed - expected) <= 1e-12 * np.maximum(1.0, bound))
    # First-order chain rule.
    assert composed[1] == pytest.approx(series[1] * g.coeffs[1], rel=1e-12, abs=1e-12)


# ===== Matrices =====


def test_det_and_inverse_of_metric_like_matrix():
    """Adjugate inverse times the matrix is the identity to every order."""
    u, v = jet_variables(np.array([0.3, 0.8]), 3)
    m = [[1 + u * u, u * v, u], [u * v, 2 + v * v, v], [u, v, 3 + u]]
    inverse, det = jet_inverse(m)
    values = np.array([[float(entry.value) for entry in row] for row in m])
    assert det.value == pytest.approx(np.linalg.det(values))
    for i in range(3):
        for j in range(3):
            entry = inverse[i][0] * m[0][j] + inverse[i][1] * m[1][j] + inverse[i][2] * m[2][j]
            expected = 1.0 if i == j else 0.0
            assert entry.value == pytest.approx(expected, abs=1e-12)
            assert np.allclose(entry.coeffs[1:], 0.0, atol=1e-10)


def test_det_of_diagonal():
    """The determinant of a diagonal matrix is the product of its entries."""
    x, y = jet_variables(np.array([1.5, 2.0]), 2)
    zero = Jet.constant(0.0, 2, 2)
    det = jet_det([[x, zero], [zero, y]])
    assert np.allclose(det.coeffs, (x * y).coeffs)
