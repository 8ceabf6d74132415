import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rfiqkd.errors import ConfigError, DegenerateSelectionError, NoVacuumError, ZeroObservationError
from rfiqkd.statistics import (
    FluctuationConfig,
    effective_count,
    error_gain_upper,
    gain_lower,
    gain_upper,
    vacuum_bounds,
)

N11 = FluctuationConfig(1e11, 5.0)


def test_effective_count():
    assert effective_count(N11, 1.0) == 1e11
    assert effective_count(N11, 1 / 27) == pytest.approx(3.7037037037037037e9, rel=1e-15)
    with pytest.raises(DegenerateSelectionError):
        effective_count(N11, 0.0)


def test_config_validation():
    with pytest.raises(ConfigError):
        FluctuationConfig(0.5, 5.0)
    with pytest.raises(ConfigError):
        FluctuationConfig(1e9, -1.0)


@pytest.mark.parametrize("bound", [gain_upper, gain_lower, error_gain_upper])
def test_gamma_zero_is_identity(bound):
    assert bound(1e-4, 1e9, 0.0) == 1e-4
    assert bound(0.0, 1e9, 0.0) == 0.0


@pytest.mark.parametrize("bound", [gain_upper, error_gain_upper])
def test_upper_examples(bound):
    assert bound(1e-4, 1e9, 5.0) == pytest.approx(1.0158113883008419e-4, rel=1e-13)
    # raw value 2.2678 is capped
    assert bound(0.5, 4.0, 5.0) == 1.0


def test_lower_examples():
    assert gain_lower(1e-4, 1e9, 5.0) == pytest.approx(0.98418861169915810e-4, rel=1e-13)
    assert gain_lower(1e-8, 1e4, 5.0) == 0.0


@pytest.mark.parametrize("bound", [gain_upper, gain_lower, error_gain_upper])
def test_zero_observation_with_fluctuation(bound):
    with pytest.raises(ZeroObservationError):
        bound(0.0, 1e9, 5.0)


def test_vacuum_bounds():
    b = vacuum_bounds(3e-6, FluctuationConfig(1e11, 0.0), 1 / 3)
    assert b.lower == b.upper == b.central == 3e-6

    b = vacuum_bounds(3e-6, N11, 1 / 3)
    assert b.lower == pytest.approx(2.9525658350974743e-6, rel=1e-12)
    assert b.upper == pytest.approx(3.0474341649025257e-6, rel=1e-12)
    # values quoted with the operation's example are rounded at the 5th digit
    assert b.lower == pytest.approx(2.95255e-6, rel=1e-5)
    assert b.upper == pytest.approx(3.04745e-6, rel=1e-5)

    b = vacuum_bounds(3e-6, FluctuationConfig(1e6, 5.0), 1 / 3)
    assert b.lower == 0.0
    assert b.upper > 3e-6

    with pytest.raises(NoVacuumError):
        vacuum_bounds(3e-6, N11, 0.0)


def test_vacuum_without_dark_counts_has_zero_width():
    b = vacuum_bounds(0.0, N11, 0.2)
    assert (b.lower, b.central, b.upper) == (0.0, 0.0, 0.0)


@given(q=st.floats(1e-9, 1.0), n=st.floats(1.0, 1e14), gamma=st.floats(0.0, 10.0))
def test_bound_ordering(q, n, gamma):
    assert 0.0 <= gain_lower(q, n, gamma) <= q <= gain_upper(q, n, gamma) <= 1.0


@given(q=st.floats(1e-9, 1.0), n=st.floats(1.0, 1e14),
       g1=st.floats(0.0, 10.0), g2=st.floats(0.0, 10.0))
def test_gamma_monotonicity(q, n, g1, g2):
    lo, hi = sorted((g1, g2))
    assert gain_upper(q, n, lo) <= gain_upper(q, n, hi)
    assert gain_lower(q, n, lo) >= gain_lower(q, n, hi)


@pytest.mark.parametrize("q", [1e-5, 1e-4, 3e-3])
def test_width_halves_when_count_quadruples(q):
    def rel_width(n):
        return (gain_upper(q, n, 5.0) - gain_lower(q, n, 5.0)) / q

    w1, w4 = rel_width(1e9), rel_width(4e9)
    assert w1 == pytest.approx(2 * 5.0 / math.sqrt(1e9 * q), rel=1e-12)
    assert w1 / w4 == pytest.approx(2.0, rel=1e-12)
