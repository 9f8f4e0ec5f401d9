import math

import pytest
from hypothesis import given, strategies as st

from afescale.errors import DomainError
from afescale.numerics import (
    DEFAULT_CONSTANTS,
    PhysicalConstants,
    db_to_linear,
    dbm_to_watt,
    linear_to_db,
    q_function,
    q_inverse,
    upper_incomplete_gamma_half,
    watt_to_dbm,
)
from oracles import gamma_half_quad, q_inverse_brentq, q_quad


def test_constants_defaults():
    c = PhysicalConstants()
    assert c.boltzmann_k == 1.380649e-23
    assert c.temperature == 290.0
    assert c.input_resistance == 50.0
    assert c.kt == pytest.approx(4.0038821e-21, rel=1e-7)
    assert DEFAULT_CONSTANTS == c


@pytest.mark.parametrize("kwargs", [{"temperature": 0}, {"input_resistance": -1}, {"boltzmann_k": 0}])
def test_constants_reject_nonpositive(kwargs):
    with pytest.raises(DomainError):
        PhysicalConstants(**kwargs)


def test_db_conversions():
    assert db_to_linear(20) == pytest.approx(100.0)
    assert db_to_linear(-3) == pytest.approx(0.501187, rel=1e-6)
    assert linear_to_db(1000) == pytest.approx(30.0)
    assert dbm_to_watt(-30) == pytest.approx(1e-6)
    assert dbm_to_watt(0) == pytest.approx(1e-3)
    assert watt_to_dbm(1.0) == pytest.approx(30.0)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan])
def test_linear_to_db_rejects(bad):
    with pytest.raises(DomainError):
        linear_to_db(bad)


@given(st.floats(min_value=-200, max_value=200))
def test_db_roundtrip(x):
    assert linear_to_db(db_to_linear(x)) == pytest.approx(x, abs=1e-9)


def test_q_known_values():
    assert q_function(0.0) == 0.5
    assert q_function(1.0) == pytest.approx(0.15865525393145707, rel=1e-14)
    assert q_function(-1.0) == pytest.approx(1 - 0.15865525393145707, rel=1e-14)


def test_q_inverse_small_probabilities():
    # Pe = 1e-6 gives Q^-1(Pe/4); computed independently at 40 digits.
    assert q_inverse(2.5e-7) == pytest.approx(5.0263128360566849, rel=1e-12)
    assert q_inverse(2.5e-4) == pytest.approx(3.4807564043462128, rel=1e-12)


def test_q_inverse_symmetry_and_centre():
    assert q_inverse(0.5) == 0.0
    assert q_inverse(0.9) == pytest.approx(-q_inverse(0.1), rel=1e-14)


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5, math.nan])
def test_q_inverse_domain(p):
    with pytest.raises(DomainError):
        q_inverse(p)


def test_gamma_half_domain_and_origin():
    assert upper_incomplete_gamma_half(0.0) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    with pytest.raises(DomainError):
        upper_incomplete_gamma_half(-1e-9)


@given(st.floats(min_value=1e-6, max_value=1 - 1e-6))
def test_q_inverse_roundtrip(p):
    assert q_function(q_inverse(p)) == pytest.approx(p, rel=1e-10)


@given(st.floats(min_value=-8, max_value=8), st.floats(min_value=1e-3, max_value=4))
def test_q_monotone_decreasing(x, dx):
    assert q_function(x + dx) <= q_function(x)
    if x >= -5:  # below that Q rounds to 1 - tiny and may tie
        assert q_function(x + dx) < q_function(x)


@given(st.floats(min_value=0, max_value=50), st.floats(min_value=1e-3, max_value=5))
def test_gamma_half_monotone(x, dx):
    assert upper_incomplete_gamma_half(x + dx) <= upper_incomplete_gamma_half(x)


@pytest.mark.parametrize("x", [-3.0, -0.5, 0.3, 1.7, 4.0, 6.5])
def test_q_against_quadrature(x):
    assert q_function(x) == pytest.approx(q_quad(x), rel=1e-8)


@pytest.mark.parametrize("p", [0.3, 1e-2, 1e-5, 2.5e-7, 1e-12])
def test_q_inverse_against_brentq(p):
    assert q_inverse(p) == pytest.approx(q_inverse_brentq(p), rel=1e-8)


@pytest.mark.parametrize("x", [1e-4, 0.1, 1.0, 4.6, 20.0])
def test_gamma_half_against_quadrature(x):
    assert upper_incomplete_gamma_half(x) == pytest.approx(gamma_half_quad(x), rel=1e-8)
