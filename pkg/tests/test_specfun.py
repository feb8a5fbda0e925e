"""Tests for the self-contained special-function kernel."""

import math

import numpy as np
import pytest

from anharmonic.specfun import (
    GAMMA_OVERFLOW_THRESHOLD,
    cot,
    gamma,
    gamma_with_error,
    log_sum_exp,
)

# Reference values frozen once from a 30-digit multiprecision evaluation.
GAMMA_ORACLES = {
    0.25: 3.6256099082219083119,
    1.0 / 3.0: 2.6789385347077476337,
    1.25: 0.90640247705547707798,
    4.0 / 3.0: 0.89297951156924921122,
    1.75: 0.91906252684888323385,
    11.0 / 6.0: 0.94065585825677163438,
    2.25: 1.1330030963193463475,
    0.1: 9.5135076986687318363,
    29.5: 1.6348125198274266444e30,
}


def test_half_integer_values():
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-13)
    assert gamma(1.5) == pytest.approx(math.sqrt(math.pi) / 2.0, rel=1e-13)


def test_frozen_oracles():
    for x, want in GAMMA_ORACLES.items():
        assert gamma(x) == pytest.approx(want, rel=1e-13), f"gamma({x})"


def test_recurrence_property():
    rng = np.random.default_rng(20260819)
    for x in rng.uniform(0.1, 30.0, size=1000):
        ratio = gamma(x + 1.0) / gamma(x)
        assert ratio == pytest.approx(x, rel=1e-12)


def test_integer_factorials():
    for n in range(0, 21):
        assert gamma(n + 1.0) == pytest.approx(math.factorial(n), rel=1e-12)


def test_agrees_with_stdlib_gamma():
    # math.gamma is an independent double-precision reference.
    for x in np.linspace(0.11, 170.0, 1700):
        assert gamma(float(x)) == pytest.approx(math.gamma(float(x)), rel=5e-13)


def test_domain_and_overflow_errors():
    with pytest.raises(ValueError):
        gamma(0.0)
    with pytest.raises(ValueError):
        gamma(-1.5)
    with pytest.raises(OverflowError):
        gamma(GAMMA_OVERFLOW_THRESHOLD)
    with pytest.raises(OverflowError):
        gamma(200.0)


def test_error_bound_report():
    for x in (0.1, 0.4, 0.5, 2.0, 17.5, 30.0):
        r = gamma_with_error(x)
        assert r.value == gamma(x)
        assert r.value > 0.0
        assert 0.0 < r.relative_error_bound <= 1e-13
    wide = gamma_with_error(100.0)
    assert wide.relative_error_bound <= 5e-13
    assert wide.value == pytest.approx(math.gamma(100.0), rel=5e-13)


def test_cot_examples():
    assert abs(cot(math.pi / 2.0)) < 1e-15
    assert cot(math.pi / 4.0) == pytest.approx(1.0, rel=1e-14)
    assert cot(math.pi / 3.0) == pytest.approx(1.0 / math.sqrt(3.0), rel=1e-14)


def test_cot_matches_reciprocal_tangent():
    rng = np.random.default_rng(7)
    for x in rng.uniform(0.2, math.pi - 0.2, size=200):
        assert cot(float(x)) == pytest.approx(1.0 / math.tan(float(x)), rel=1e-12)


def test_cot_pole_guard():
    for x in (0.0, math.pi, -3.0 * math.pi):
        with pytest.raises(ValueError):
            cot(x)


def test_log_sum_exp_values():
    assert log_sum_exp([0.0, 0.0]) == pytest.approx(math.log(2.0), rel=1e-14)
    # Values far outside exp() range must not overflow.
    assert log_sum_exp([1000.0, 1000.0]) == pytest.approx(1000.0 + math.log(2.0), rel=1e-14)
    assert log_sum_exp([-math.inf, 0.0]) == pytest.approx(0.0, abs=1e-300)
    assert log_sum_exp([-math.inf, -math.inf]) == -math.inf
    rng = np.random.default_rng(11)
    for _ in range(100):
        a, b = rng.normal(scale=50.0, size=2)
        assert log_sum_exp([a, b]) == pytest.approx(float(np.logaddexp(a, b)), rel=1e-13)


def test_log_sum_exp_empty_rejected():
    with pytest.raises(ValueError):
        log_sum_exp([])
