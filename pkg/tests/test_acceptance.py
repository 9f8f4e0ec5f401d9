"""Acceptance criteria 1-7; a PASS/FAIL line per criterion prints at the end of the run."""

import math
import time
from collections import defaultdict

import numpy as np
import pytest
from click.testing import CliRunner

from afescale.adaptive import (
    AdaptationPolicy,
    FadingModel,
    InterferenceModel,
    compare_with_baseline,
    expected_scaling_continuous,
    expected_scaling_interference,
    expected_scaling_two_step,
    monte_carlo_fading,
)
from afescale.afe import ChainFoM, Scenario, optimal_power_circuit_form, scenario_to_design
from afescale.chain import CascadeTargets, verify_gain_independence
from afescale.cli import cli
from afescale.link import (
    CodedSystem,
    coded_afe_efficiency_gain,
    coded_receiver_report,
    coding_power_scaling,
    load_coded_systems,
    qam_efficiency_ratio,
)
from afescale.montecarlo import MonteCarloConfig
from afescale.numerics import q_function, q_inverse, upper_incomplete_gamma_half
from afescale.scaling import (
    LAWS,
    ScenarioPair,
    derive_post_design,
    law_value,
    power_scaling_general,
    scaled_scenario,
)
from oracles import continuous_fading_quad, gamma_half_quad, q_inverse_brentq, q_quad

_ELAPSED: dict[int, float] = defaultdict(float)


def budget(number, seconds):
    """Run the body under a per-criterion wall-clock budget shared by its tests."""

    class _Timer:
        def __enter__(self):
            self.t0 = time.perf_counter()

        def __exit__(self, *exc):
            _ELAPSED[number] += time.perf_counter() - self.t0
            if exc[0] is None:
                assert _ELAPSED[number] < seconds, f"criterion {number} took {_ELAPSED[number]:.2f} s"

    return _Timer()


# 1 -------------------------------------------------------------------------

def _random_chains(n_chains=24, seed=20240):
    rng = np.random.default_rng(seed)
    for i in range(n_chains):
        n = i % 4 + 1
        p_c = 10.0 ** (-20.0 + 4.0 * rng.random(n))
        f_target = 1.0 + 10.0 ** rng.uniform(-1.0, 1.5)
        v_target = 10.0 ** rng.uniform(-4.0, 0.0)
        gain_sets = [tuple(10.0 ** rng.uniform(-1.0, 2.0, n)) for _ in range(3)]
        yield i, ChainFoM.from_values(p_c), CascadeTargets(f_target, v_target), gain_sets


@pytest.mark.acceptance(1, "closed-form optimum vs multi-start optimizer")
@pytest.mark.parametrize("i, chain, targets, gain_sets", list(_random_chains()), ids=lambda v: None)
def test_c1_closed_form_vs_optimizer(i, chain, targets, gain_sets):
    with budget(1, 60.0):
        report = verify_gain_independence(targets, chain, gain_sets, n_starts=8, seed=i)
    closed = optimal_power_circuit_form(targets.v_iip3_target_sq, targets.f_target, chain, targets.constants)
    for res in report.results:
        assert abs(res.power - closed) / closed < 1e-4
    assert report.max_pairwise_spread < 1e-3


# 2 -------------------------------------------------------------------------

@pytest.mark.acceptance(2, "coded receiver table within 3%")
def test_c2_table():
    with budget(2, 1.0):
        uncoded_bitrate, systems = load_coded_systems()
        rows = coded_receiver_report(35e-3, systems, uncoded_bitrate=uncoded_bitrate)
    uncoded, cc, turbo = rows
    expected = [
        (cc.afe_power, 4.26e-3), (turbo.afe_power, 0.82e-3),
        (cc.total_power, 4.82e-3), (turbo.total_power, 9.12e-3),
        (uncoded.efficiency, 0.76e9), (cc.efficiency, 2.77e9), (turbo.efficiency, 0.96e9),
    ]
    for got, ref in expected:
        assert abs(got - ref) / ref <= 0.03, (got, ref)


# 3 -------------------------------------------------------------------------

@pytest.mark.acceptance(3, "interference-adaptive example")
def test_c3_interference():
    with budget(3, 1.0):
        model = InterferenceModel(1e-2, 0.1, 10.0)
        e = expected_scaling_interference(model)
        cmp = compare_with_baseline(35e-3, model, 10e-3)
    assert e == pytest.approx(0.3846, abs=5e-5)
    assert abs(100 * (1 - e) - 60.0) <= 2.0
    assert 100 * (1 - e) == pytest.approx(61.5, abs=0.05)
    assert cmp.adaptive_afe == pytest.approx(13.46e-3, rel=1e-3)
    assert abs(cmp.adaptive_afe - 14e-3) / 14e-3 <= 0.05
    assert cmp.total == pytest.approx(23.46e-3, rel=1e-3)
    assert abs(cmp.savings_pct - 30.0) <= 5.0


# 4 -------------------------------------------------------------------------

@pytest.mark.acceptance(4, "fading-adaptive closed forms at outage 1%, tuning range 20 dB")
def test_c4_fading():
    with budget(4, 30.0):
        m = FadingModel(0.01)
        mu = 100.0
        cont = expected_scaling_continuous(m, mu)
        two = expected_scaling_two_step(m, mu)
        quad = continuous_fading_quad(m.phi_min, mu)
        mc = MonteCarloConfig(samples=1_000_000, seed=4, confidence=0.99)
        mc_cont = monte_carlo_fading(m, AdaptationPolicy("continuous", mu), mc)
        mc_two = monte_carlo_fading(m, AdaptationPolicy("two-step", mu), mc)
    assert cont <= 0.05
    assert abs(cont - quad) <= 1e-6
    assert mc_cont.ci_low <= cont <= mc_cont.ci_high
    direct = 1.0 - (1.0 - 100.0**-1.5) * math.exp(-100.0 * -math.log(0.99))
    assert two == pytest.approx(direct, rel=1e-14)
    assert abs(two - 0.6343) <= 1e-4
    assert mc_two.ci_low <= two <= mc_two.ci_high


# 5 -------------------------------------------------------------------------

def _slope(law, f1, sigmas):
    y = [law_value(law, s, f1) for s in sigmas]
    return np.polyfit(np.log(sigmas), np.log(y), 1)[0]


@pytest.mark.acceptance(5, "scaling-law log-log slopes")
def test_c5_slopes():
    expected = {"bandwidth": 1.0, "sndr": 1.5, "signal": -1.5, "interference": 1.5}
    with budget(5, 5.0):
        sigmas = np.geomspace(0.1, 10.0, 81)
        slopes = {law: _slope(law, 1000.0, sigmas) for law in LAWS}
        for f1 in np.geomspace(1.001, 1e6, 60):
            vals = np.array([law_value("interference", s, f1) for s in sigmas])
            local = np.log(vals[1:] / vals[:-1]) / np.log(sigmas[1:] / sigmas[:-1])
            assert np.all(np.abs(local - 1.5) < 1e-12)
    for law, slope in slopes.items():
        assert abs(slope - expected[law]) <= 0.02, (law, slope)


# 6 -------------------------------------------------------------------------

@pytest.mark.acceptance(6, "special functions vs quadrature oracles")
def test_c6_special_functions():
    with budget(6, 10.0):
        for x in np.linspace(-6.0, 6.0, 121):
            assert q_function(x) == pytest.approx(q_quad(x), rel=1e-8)
        for x in np.linspace(6.0, 30.0, 25):
            assert q_function(x) == pytest.approx(q_quad(x), rel=1e-8)
        for p in np.concatenate((np.geomspace(1e-15, 0.5, 80), 1.0 - np.geomspace(1e-9, 0.5, 30))):
            assert q_inverse(p) == pytest.approx(q_inverse_brentq(p), rel=1e-8, abs=1e-12)
        for x in np.geomspace(1e-8, 50.0, 100):
            assert upper_incomplete_gamma_half(x) == pytest.approx(gamma_half_quad(x), rel=1e-8)


# 7 -------------------------------------------------------------------------

SQUARE = [4**k for k in range(1, 9)]


@pytest.mark.acceptance(7, "property suites")
def test_c7_qam_efficiency_exhaustive():
    for i, m1 in enumerate(SQUARE):
        for m2 in SQUARE[: i + 1]:
            assert qam_efficiency_ratio(m1, m2) >= 1.0


@pytest.mark.acceptance(7, "property suites")
def test_c7_coded_gain():
    for r_c in (1.0, 0.9, 0.75, 2 / 3, 0.5, 1 / 3, 0.25, 0.1):
        for g_db in np.linspace(0.01, 12.0, 200):
            code = CodedSystem.from_db("c", r_c, g_db)
            assert coded_afe_efficiency_gain(code, coding_power_scaling(code)) > 1.0


@pytest.mark.acceptance(7, "property suites")
def test_c7_two_route_identity():
    chain = ChainFoM.from_values([1e-13, 4e-13, 2e-13])
    pre = Scenario(sndr=100.0, bandwidth_b=1e6, p_s=1e-10, p_i=1e-6, alpha_im3=0.1)
    d1 = scenario_to_design(pre)
    p1 = optimal_power_circuit_form(d1.v_iip3_sq, d1.f_afe, chain, d1.constants)
    for law in LAWS:
        for sigma in np.geomspace(0.05, 20.0, 41):
            if law in ("bandwidth", "sndr") and sigma >= d1.f_afe:
                continue
            closed = law_value(law, sigma, d1.f_afe)
            d2 = derive_post_design(law, sigma, d1)
            route1 = optimal_power_circuit_form(d2.v_iip3_sq, d2.f_afe, chain, d2.constants) / p1
            route2 = power_scaling_general(ScenarioPair(pre, scaled_scenario(law, sigma, pre)), chain).sigma_p
            assert route1 == pytest.approx(closed, rel=1e-12)
            assert route2 == pytest.approx(closed, rel=1e-12)


@pytest.mark.acceptance(7, "property suites")
def test_c7_mc_csv_byte_identical(tmp_path):
    cfg = tmp_path / "fading.yaml"
    cfg.write_text(
        "monte_carlo: {samples: 100000, seed: 99}\n"
        "fading: {omega: [0.01, 0.1], mu: [3 dB, 20 dB], policies: [two-step, continuous]}\n"
    )
    blobs = []
    for workers in ("1", "1", "3", "8"):
        out = tmp_path / f"w{workers}-{len(blobs)}"
        res = CliRunner().invoke(cli, ["--config", str(cfg), "--out", str(out), "--workers", workers, "fading"])
        assert res.exit_code == 0, res.output
        blobs.append((out / "fading.csv").read_bytes())
    assert len(set(blobs)) == 1
