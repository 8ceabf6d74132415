import numpy as np
import pytest

from rfiqkd.channel import ChannelParams
from rfiqkd.errors import ConfigError, InfeasibleParamsError, SearchFailureError
from rfiqkd.optimizer import (
    DEFAULT_LOWER,
    DEFAULT_UPPER,
    OptimizerConfig,
    Scenario,
    evaluate,
    objective,
    optimize,
    unbiased_baseline,
)
from rfiqkd.params import ProtocolParams, is_feasible
from rfiqkd.security import SecurityConfig, SecurityMode
from rfiqkd.statistics import FluctuationConfig

# first verified run, identical from the structured pipeline and both kernels
BASELINE_50KM_RATE = 0.00010798464857861708


def test_objective_golden_value(scenario_50km, baseline_params):
    r = objective(baseline_params, scenario_50km)
    assert r > 0
    assert r == pytest.approx(BASELINE_50KM_RATE, rel=1e-12)
    assert r == pytest.approx(evaluate(baseline_params, scenario_50km).rate, rel=1e-12)


def test_objective_bit_identical(scenario_50km, baseline_params):
    assert objective(baseline_params, scenario_50km) == objective(baseline_params, scenario_50km)


def test_objective_opaque_channel(scenario_50km, baseline_params):
    assert objective(baseline_params, scenario_50km.at(distance=2000.0)) == 0.0


def test_objective_rejects_infeasible(scenario_50km):
    with pytest.raises(InfeasibleParamsError):
        objective(ProtocolParams(0.5, 0.1, 0.6, 0.6, *[1 / 3] * 6), scenario_50km)
    with pytest.raises(InfeasibleParamsError):
        evaluate(ProtocolParams(0.5, 0.1, 0.6, 0.6, *[1 / 3] * 6), scenario_50km)


def test_config_validation():
    with pytest.raises(ConfigError):
        OptimizerConfig(n_starts=0)
    with pytest.raises(ConfigError):
        OptimizerConfig(seed=-1)
    with pytest.raises(ConfigError):
        OptimizerConfig(lower=(0.5,) * 10, upper=(0.4,) * 10)


def test_baseline_ideal_detectors_at_zero_distance():
    sc = Scenario(channel=ChannelParams(eta=1.0, y0=1e-9, ed=0.0), distance=0.0,
                  fluctuation=FluctuationConfig(1e11, 0.0))
    params, rep = unbiased_baseline(sc)
    assert 0.1 < params.mu <= 1.0
    assert rep.rate > 0
    assert params.nu == 0.1 and params.p_mu == pytest.approx(1 / 3)


def test_baseline_deterministic(scenario_50km):
    a, ra = unbiased_baseline(scenario_50km)
    b, rb = unbiased_baseline(scenario_50km)
    assert a == b and ra == rb


def test_baseline_mu_is_a_local_maximum(scenario_50km):
    params, rep = unbiased_baseline(scenario_50km)
    for dmu in (-1e-3, 1e-3):
        p = ProtocolParams.unbiased(mu=params.mu + dmu, nu=0.1)
        assert objective(p, scenario_50km) <= rep.rate + 1e-15


def test_high_loss_returns_baseline_with_no_key(fast_opt, scenario_50km):
    sc = scenario_50km.at(distance=500.0)
    params, rep = optimize(sc, fast_opt)
    base, _ = unbiased_baseline(sc)
    assert rep.rate == 0.0 and rep.no_key
    assert params == base


def test_order_of_magnitude_over_baseline(scenario_50km):
    params, rep = optimize(scenario_50km)
    _, base = unbiased_baseline(scenario_50km)
    assert rep.rate >= 10 * base.rate
    assert is_feasible(params)


def test_seed_determinism(scenario_50km, fast_opt):
    a = optimize(scenario_50km, fast_opt)
    b = optimize(scenario_50km, fast_opt)
    assert a == b


def test_parallel_matches_sequential(scenario_50km):
    seq = optimize(scenario_50km, OptimizerConfig(n_starts=3, seed=11))
    par = optimize(scenario_50km, OptimizerConfig(n_starts=3, seed=11, workers=2))
    assert seq == par


def test_start_count_monotonicity(scenario_50km):
    sc = scenario_50km.at(distance=80.0, channel=ChannelParams(beta=10.0))
    rates = [optimize(sc, OptimizerConfig(n_starts=n, seed=3))[1].rate for n in range(1, 6)]
    assert all(b >= a for a, b in zip(rates, rates[1:]))


@pytest.mark.parametrize("distance", [0.0, 40.0, 90.0, 130.0])
def test_dominance_over_baseline(distance, fast_opt, scenario_50km):
    sc = scenario_50km.at(distance=distance)
    params, rep = optimize(sc, fast_opt)
    _, base = unbiased_baseline(sc)
    assert rep.rate >= base.rate - 1e-12
    assert is_feasible(params)


def test_bb84_optimum_is_z_x_only(scenario_50km, fast_opt):
    sc = scenario_50km.at(security=SecurityConfig(mode=SecurityMode.BB84))
    params, rep = optimize(sc, fast_opt)
    assert is_feasible(params, bb84=True)
    assert rep.rate > 0
    assert np.isnan(rep.c_value)


def test_literal_mode_optimizes(scenario_50km, fast_opt):
    sc = scenario_50km.at(security=SecurityConfig(mode=SecurityMode.RFI_LITERAL_EQ13))
    params, rep = optimize(sc, fast_opt)
    assert rep.rate > 0 and rep.mode is SecurityMode.RFI_LITERAL_EQ13


def test_warm_start_is_used(scenario_50km, fast_opt):
    best, rep = optimize(scenario_50km, OptimizerConfig(n_starts=8, seed=1))
    warm, rep_w = optimize(scenario_50km, OptimizerConfig(n_starts=1, seed=99), extra_starts=(best,))
    assert rep_w.rate >= rep.rate - 1e-15


def test_search_failure_when_box_has_no_feasible_point(scenario_50km):
    lower = list(DEFAULT_LOWER)
    upper = list(DEFAULT_UPPER)
    lower[1], upper[1] = 0.45, 0.5   # nu
    lower[0], upper[0] = 0.2, 0.4    # mu, always below nu
    cfg = OptimizerConfig(n_starts=1, lower=tuple(lower), upper=tuple(upper))
    with pytest.raises(SearchFailureError):
        optimize(scenario_50km, cfg)
