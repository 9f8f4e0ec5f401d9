import math

import pytest
from hypothesis import given, settings, strategies as st

from afescale.afe import (
    BlockFoM,
    ChainFoM,
    FrontEndDesign,
    Scenario,
    block_power,
    dynamic_range,
    f_from_noise_power,
    iip3_from_im3,
    iip3_power_from_voltage,
    iip3_voltage_from_power,
    im3_from_iip3,
    kappa_circuit,
    noise_power,
    optimal_power,
    optimal_power_circuit_form,
    optimal_power_system_form,
    required_noise_power,
    scenario_to_design,
    sndr,
)
from afescale.errors import DomainError, InfeasibleDesignError
from afescale.numerics import DEFAULT_CONSTANTS, PhysicalConstants

KT = 1.380649e-23 * 290.0


def test_dynamic_range():
    assert dynamic_range(1.0, 1.0) == 1.0
    assert dynamic_range(4e-4, 2e-19) == pytest.approx(2e15)
    assert dynamic_range(8e-4, 2e-19) == pytest.approx(2 * dynamic_range(4e-4, 2e-19))
    with pytest.raises(DomainError):
        dynamic_range(0.0, 1.0)


def test_block_power():
    assert block_power(BlockFoM("lna", 1e-12), 1e9) == pytest.approx(1e-3)
    b = BlockFoM("x", 3e-12)
    assert block_power(b, 10e6) == pytest.approx(10 * block_power(b, 1e6))
    with pytest.raises(DomainError):
        BlockFoM("bad", 0.0)


def test_kappa_circuit():
    p = 3.7e-15
    assert kappa_circuit([BlockFoM("a", p)]) == pytest.approx(p, rel=1e-14)
    assert kappa_circuit([BlockFoM("a", p), BlockFoM("b", p)]) == pytest.approx(8 * p, rel=1e-14)
    assert kappa_circuit([BlockFoM("a", 1e-3), BlockFoM("b", 8e-3)]) == pytest.approx(2.7e-2, rel=1e-14)
    assert ChainFoM.from_values([1e-3, 8e-3]).kappa_circuit == pytest.approx(2.7e-2, rel=1e-14)
    with pytest.raises(DomainError):
        kappa_circuit([])


def test_circuit_form_arithmetic():
    chain = ChainFoM.from_values([1e-3])
    denom = (11 - 1) * KT * 50.0
    assert denom == pytest.approx(2.0019e-18, rel=1e-4)
    for x in (1.0, 7.5, 1e6):
        # v^2 equal to the denominator times X leaves X * kappa
        assert optimal_power_circuit_form(denom * x, 11.0, chain) == pytest.approx(x * 1e-3, rel=1e-12)


def test_circuit_form_large_f_limit():
    chain = ChainFoM.from_values([1e-12, 2e-12])
    powers = [optimal_power_circuit_form(1e-2, f, chain) for f in (1e2, 1e6, 1e12, 1e18)]
    assert all(a > b for a, b in zip(powers, powers[1:]))
    assert powers[-1] < 1e-15 * powers[0]
    with pytest.raises(InfeasibleDesignError):
        optimal_power_circuit_form(1e-2, 1.0, chain)


def test_noise_power():
    assert noise_power(10.0, 1e6) == pytest.approx(4.0039e-14, rel=1e-4)
    assert noise_power(1.0 + 1e-15, 2e6) == pytest.approx(KT * 2e6, rel=1e-12)
    assert f_from_noise_power(noise_power(37.0, 5e6), 5e6) == pytest.approx(37.0, rel=1e-12)


def test_iip3_voltage_power():
    assert iip3_power_from_voltage(1.0, 50.0) == pytest.approx(0.02)
    assert iip3_power_from_voltage(0.5, 50.0) == pytest.approx(0.01)
    assert iip3_voltage_from_power(iip3_power_from_voltage(0.37)) == pytest.approx(0.37, rel=1e-15)


def test_im3_iip3():
    assert im3_from_iip3(2e-3, 2e-3) == pytest.approx(2e-3, rel=1e-14)
    assert iip3_from_im3(1e-15, 1e-6) == pytest.approx(3.1623e-2, rel=1e-4)
    assert im3_from_iip3(1e-2, 2e-6) == pytest.approx(8 * im3_from_iip3(1e-2, 1e-6), rel=1e-12)


def test_sndr():
    assert sndr(1e-9, 1e-12, 0.0) == pytest.approx(1000.0)
    assert sndr(1e-9, 1e-12, 0.1) == pytest.approx(909.0909090909, rel=1e-12)
    assert required_noise_power(1e-9, sndr(1e-9, 3e-12, 0.2), 0.2) == pytest.approx(3e-12, rel=1e-12)


def test_scenario_to_design_example():
    d = scenario_to_design(Scenario(100.0, 1e6, 1e-10, 1e-6, 0.1))
    assert d.p_n == pytest.approx(9.0909e-13, rel=1e-4)
    # arithmetic oracle: p_n / (k T B)
    assert d.f_afe == pytest.approx((1e-10 / 110.0) / (KT * 1e6), rel=1e-12)
    assert d.f_afe == pytest.approx(227.0524, rel=1e-6)
    assert d.p_iip3 == pytest.approx(math.sqrt(1e-18 / d.p_im3), rel=1e-12)
    assert d.alpha_im3 == pytest.approx(0.1, rel=1e-12)


def test_scenario_infeasible_when_noise_floor_too_high():
    # p_n below the k T B floor needs F < 1
    with pytest.raises(InfeasibleDesignError):
        scenario_to_design(Scenario(1e6, 1e9, 1e-12, 1e-6, 0.1))


def test_invalid_scenarios():
    with pytest.raises(DomainError):
        Scenario(100.0, 1e6, 1e-10, 0.0, 0.1)
    with pytest.raises(DomainError):
        Scenario(100.0, -1.0, 1e-10, 1e-6, 0.1)
    with pytest.raises(InfeasibleDesignError):
        FrontEndDesign(1e-12, 1e-13, 1e-3, 1.0, 1e-1, 1e6)


def test_doubling_interference():
    chain = ChainFoM.from_values([1e-12, 5e-12])
    s = Scenario(100.0, 1e6, 1e-10, 1e-6, 0.1)
    s2 = Scenario(100.0, 1e6, 1e-10, 2e-6, 0.1)
    assert optimal_power(s2, chain) / optimal_power(s, chain) == pytest.approx(2**1.5, rel=1e-12)


def test_constants_override_changes_result():
    chain = ChainFoM.from_values([1e-12])
    hot = PhysicalConstants(temperature=580.0)
    assert optimal_power_circuit_form(1e-2, 10.0, chain, hot) == pytest.approx(
        0.5 * optimal_power_circuit_form(1e-2, 10.0, chain, DEFAULT_CONSTANTS), rel=1e-12
    )


scenarios = st.builds(
    Scenario,
    sndr=st.floats(1.0, 1e5),
    bandwidth_b=st.floats(1e3, 1e9),
    p_s=st.floats(1e-11, 1e-6),
    p_i=st.floats(1e-9, 1e-2),
    alpha_im3=st.floats(1e-3, 1.0),
)
chains = st.lists(st.floats(1e-16, 1e-9), min_size=1, max_size=5).map(ChainFoM.from_values)


def _feasible(s):
    try:
        return scenario_to_design(s)
    except InfeasibleDesignError:
        return None


@settings(max_examples=200)
@given(scenarios, chains)
def test_two_forms_agree(s, chain):
    d = _feasible(s)
    if d is None:
        return
    circuit = optimal_power_circuit_form(d.v_iip3_sq, d.f_afe, chain, d.constants)
    system = optimal_power_system_form(d, s.p_i, chain)
    assert system == pytest.approx(circuit, rel=1e-12)


@given(scenarios)
def test_sndr_round_trip(s):
    d = _feasible(s)
    if d is None:
        return
    assert sndr(s.p_s, d.p_n, d.alpha_im3) == pytest.approx(s.sndr, rel=1e-12)


@given(scenarios, chains, st.floats(1.01, 10.0))
def test_power_monotone_in_interference_and_bandwidth(s, chain, k):
    d = _feasible(s)
    if d is None:
        return
    base = optimal_power(s, chain)
    more_i = Scenario(s.sndr, s.bandwidth_b, s.p_s, s.p_i * k, s.alpha_im3)
    assert optimal_power(more_i, chain) > base
    # wider band at the same p_n means a lower noise factor, hence more power
    wider = scenario_to_design(s)
    if wider.f_afe / k > 1:
        p_wide = optimal_power_circuit_form(wider.v_iip3_sq, wider.f_afe / k, chain)
        assert p_wide > base


@given(st.floats(1.0001, 1e4), st.floats(1e3, 1e9))
def test_noise_power_round_trip(f, b):
    assert f_from_noise_power(noise_power(f, b), b) == pytest.approx(f, rel=1e-12)


@given(st.floats(1e-8, 1e2))
def test_iip3_voltage_round_trip(v2):
    assert iip3_voltage_from_power(iip3_power_from_voltage(v2)) == pytest.approx(v2, rel=1e-14)


@given(st.floats(1e-9, 1.0), st.floats(1e-12, 1e-3))
def test_iip3_im3_round_trip(p_iip3, p_i):
    assert iip3_from_im3(im3_from_iip3(p_iip3, p_i), p_i) == pytest.approx(p_iip3, rel=1e-12)
