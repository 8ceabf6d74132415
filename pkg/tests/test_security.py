import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rfiqkd.channel import XY_PAIRS, BasisPair, ChannelParams, simulate_observations, single_photon_error
from rfiqkd.decoy import SinglePhotonBounds, estimate_all, y1_lower
from rfiqkd.errors import ConfigError, IncompleteBoundsError
from rfiqkd.params import ProtocolParams
from rfiqkd.security import (
    SecurityConfig,
    SecurityMode,
    bb84_key_rate,
    binary_entropy,
    compute_c,
    eve_information,
    key_rate,
    phase_terms,
    rfi_key_rate,
)
from rfiqkd.statistics import FluctuationConfig


def entropy_oracle(x):
    # natural-log form, independent of the log2 implementation
    if x in (0.0, 1.0):
        return 0.0
    return -(x * math.log(x) + (1 - x) * math.log1p(-x)) / math.log(2)


def test_binary_entropy_examples():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.11) == pytest.approx(0.49991595816452800, rel=1e-13)
    for bad in (-1e-9, 1.0 + 1e-9):
        with pytest.raises(ValueError):
            binary_entropy(bad)


@given(st.floats(0.0, 1.0))
def test_binary_entropy_matches_oracle(x):
    assert binary_entropy(x) == pytest.approx(entropy_oracle(x), abs=1e-12)


def e1_map(xx, xy, yx, yy, zz=0.0):
    return {BasisPair.ZZ: zz, BasisPair.XX: xx, BasisPair.XY: xy, BasisPair.YX: yx, BasisPair.YY: yy}


def test_compute_c_examples():
    assert compute_c(e1_map(0.5, 0.5, 0.5, 0.5)) == 0.0
    assert compute_c(e1_map(0.0, 0.5, 0.5, 0.0)) == 2.0
    with pytest.raises(IncompleteBoundsError):
        compute_c({BasisPair.XX: 0.1, BasisPair.YY: 0.1})


@pytest.mark.parametrize("beta", [0.0, 10.0, 20.0, 37.0, 45.0, 60.0])
def test_compute_c_single_photon_exact(beta):
    ch = ChannelParams(ed=0.015, beta=beta)
    c = compute_c({p: single_photon_error(ch, p) for p in XY_PAIRS})
    assert c == pytest.approx(1.8818, abs=1e-12)


def eve_oracle(e, c):
    """Straight transcription with the phi' = 0 limit handled explicitly."""
    phi = min(math.sqrt(c / 2) / (1 - e), 1.0)
    inner = max(c / 2 - (1 - e) ** 2 * phi ** 2, 0.0)
    varphi = 0.0 if e == 0 else min(math.sqrt(inner) / e, 1.0)
    return (1 - e) * entropy_oracle((1 + phi) / 2) + e * entropy_oracle((1 + varphi) / 2)


def test_eve_information_examples():
    assert eve_information(0.0, 2.0) == 0.0
    for e in (0.0, 0.1, 0.3, 0.5):
        assert eve_information(e, 0.0) == 1.0
    phi, varphi = phase_terms(0.25, 1.0)
    assert phi == pytest.approx(0.94280904158206337, rel=1e-13)
    assert varphi == 0.0
    # 40-digit evaluation gives 0.390473948926579
    assert eve_information(0.25, 1.0) == pytest.approx(0.39047394892657934, rel=1e-12)
    assert eve_information(0.25, 1.0) == pytest.approx(0.39048, abs=1e-4)


@given(e=st.floats(0.0, 0.5), c=st.floats(0.0, 4.0))
def test_eve_information_matches_oracle(e, c):
    assert eve_information(e, c) == pytest.approx(eve_oracle(e, c), abs=1e-9)
    assert 0.0 <= eve_information(e, c) <= 1.0 + 1e-12


@given(e=st.floats(0.0, 0.5), c=st.floats(0.0, 4.0))
def test_phi_clamp_identity(e, c):
    phi, varphi = phase_terms(e, c)
    if math.sqrt(c / 2) < 1 - e:
        assert phi < 1.0
        assert abs(varphi) <= 1e-10


@given(e=st.floats(0.0, 0.5), c1=st.floats(0.0, 4.0), c2=st.floats(0.0, 4.0))
def test_eve_information_nonincreasing_in_c(e, c1, c2):
    lo, hi = sorted((c1, c2))
    assert eve_information(e, hi) <= eve_information(e, lo) + 1e-12


def ideal_lossless_inputs():
    """mu=0.5, nu=0.1 on a lossless, noiseless, dark-count-free channel at gamma=0."""
    ch = ChannelParams(eta=1.0, y0=0.0, ed=0.0, alpha=0.2, beta=0.0)
    p = ProtocolParams.unbiased(0.5, 0.1)
    stats = simulate_observations(ch, p, 0.0)
    bounds = estimate_all(stats, p, FluctuationConfig(1e11, 0.0))
    return p, stats, bounds


def test_ideal_rate_per_sifted_pulse():
    p, stats, bounds = ideal_lossless_inputs()
    assert bounds.y1_zz_lower == pytest.approx(0.99027584059553124, rel=1e-12)
    rep = rfi_key_rate(p, stats, bounds, SecurityConfig(f=1.0))
    assert rep.c_value == pytest.approx(2.0, abs=1e-12)
    assert rep.i_e == pytest.approx(0.0, abs=1e-12)
    assert rep.raw_rate / rep.prefactor == pytest.approx(0.30031632944694509, rel=1e-12)
    assert rep.raw_rate / rep.prefactor == pytest.approx(0.30034, abs=5e-5)
    assert rep.prefactor == pytest.approx(1 / 27, rel=1e-15)


def test_modes_agree_on_ideal_channel():
    p, stats, bounds = ideal_lossless_inputs()
    a = rfi_key_rate(p, stats, bounds, SecurityConfig(mode=SecurityMode.RFI_IE))
    b = rfi_key_rate(p, stats, bounds, SecurityConfig(mode=SecurityMode.RFI_LITERAL_EQ13))
    assert a.rate == b.rate
    assert not a.no_key


def test_zero_yield_means_no_key(table1):
    p = ProtocolParams.unbiased()
    stats = simulate_observations(table1, p, 50.0)
    bounds = SinglePhotonBounds(0.0, {pair: 0.5 for pair in BasisPair})
    for mode in SecurityMode:
        rep = key_rate(p, stats, bounds, SecurityConfig(mode=mode))
        assert rep.rate == 0.0
        assert rep.no_key


def test_bb84_full_phase_error_gives_no_key(table1):
    p = ProtocolParams.bb84(0.5, 0.1, 0.5, 0.25, 0.5, 0.5, 0.5)
    stats = simulate_observations(table1, p, 10.0, bb84=True)
    bounds = SinglePhotonBounds(0.02, {BasisPair.ZZ: 0.02, BasisPair.XX: 0.5})
    rep = bb84_key_rate(p, stats, bounds, SecurityConfig(mode=SecurityMode.BB84))
    assert rep.raw_rate <= 0.0
    assert rep.rate == 0.0 and rep.no_key


def test_rfi_rate_refuses_bb84_mode(table1):
    p, stats, bounds = ideal_lossless_inputs()
    with pytest.raises(ConfigError):
        rfi_key_rate(p, stats, bounds, SecurityConfig(mode=SecurityMode.BB84))


def test_security_config_validation():
    with pytest.raises(ConfigError):
        SecurityConfig(f=0.9)


def test_report_invariants(table1):
    p = ProtocolParams.unbiased()
    for beta in (0.0, 20.0):
        ch = ChannelParams(beta=beta)
        stats = simulate_observations(ch, p, 40.0)
        bounds = estimate_all(stats, p, FluctuationConfig())
        rep = rfi_key_rate(p, stats, bounds, SecurityConfig())
        assert 0.0 <= rep.c_value <= 4.0
        assert 0.0 <= rep.phi <= 1.0 and 0.0 <= rep.varphi <= 1.0
        assert 0.0 <= rep.i_e <= 1.0
        if rep.phi < 1.0:
            assert rep.varphi == 0.0
        assert rep.rate >= 0.0


def test_rate_nonincreasing_in_distance(table1):
    p = ProtocolParams(0.6, 0.08, 0.8, 0.1, 0.9, 0.05, 0.3, 0.4, 0.9, 0.05)
    for mode in (SecurityMode.RFI_IE, SecurityMode.RFI_LITERAL_EQ13):
        rates = []
        for d in (0.0, 25.0, 50.0, 75.0, 100.0):
            stats = simulate_observations(table1, p, d)
            rep = rfi_key_rate(p, stats, estimate_all(stats, p, FluctuationConfig()),
                               SecurityConfig(mode=mode))
            rates.append(rep.rate)
        assert all(a >= b for a, b in zip(rates, rates[1:]))
        assert rates[0] > 0


def test_y1_helper_consistent_with_estimate(table1):
    p = ProtocolParams.unbiased()
    stats = simulate_observations(table1, p, 50.0)
    b = estimate_all(stats, p, FluctuationConfig(1e11, 0.0))
    direct = y1_lower(p.mu, p.nu, stats.q["mu"][BasisPair.ZZ], stats.q["nu"][BasisPair.ZZ], stats.q0)
    assert b.y1_zz_lower == direct
