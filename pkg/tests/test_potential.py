"""Tests for potential families, transforms, and the JSON codec."""

import math

import numpy as np
import pytest

from anharmonic.errors import ConfigError
from anharmonic.potential import (
    PlainSum,
    PotentialSpec,
    Quartic,
    SampledTable,
    ShiftedPower,
    Step,
    TruncatedWeierstrass,
    WindowedCosine,
    Q_power_expansion,
    action_Q,
    cos_transform,
    dump_spec,
    eval_q,
    load_spec,
    mean_integral,
    shifted_cos_transform,
    sin_transform,
    spec_from_dict,
    spec_to_dict,
    turning_point,
)

HARM = PlainSum(terms=((1.0, 2.0),))
QUART = PlainSum(terms=((1.0, 4.0),))
MIXED = PlainSum(terms=((1.0, 2.0), (1.0, 4.0)))
STEP = Step(height=0.5, lo=-1.0, hi=1.0)
WC = WindowedCosine(amplitude=0.3, frequency=5.0, lo=-0.5, hi=1.5)
WEIER = TruncatedWeierstrass(tau=0.5, levels=6)

_TBL_X = np.linspace(-0.9, 0.9, 7)
TBL = SampledTable(
    abscissae=tuple(_TBL_X), values=tuple(np.cos(_TBL_X) - math.cos(0.9))
)

SPEC_H = PotentialSpec(confining=HARM, b=1.0)


def test_family_evaluation():
    assert HARM.evaluate_scalar(1.5) == pytest.approx(2.25)
    assert MIXED.evaluate_scalar(-2.0) == pytest.approx(20.0)
    assert ShiftedPower(shift=1.0, exponent=3.0).evaluate_scalar(0.5) == pytest.approx(1.5**3)
    qt = Quartic(offset=1.0)
    assert qt.evaluate_scalar(1.0) == pytest.approx(4.0)
    assert qt.derivative_scalar(1.0) == pytest.approx(8.0)
    assert MIXED.alpha == 4.0
    TruncatedWeierstrass()  # defaults must validate


def test_turning_point():
    spec_mixed = PotentialSpec(confining=MIXED, b=1.1)
    # Root of a^4 + a^2 = 100, frozen from a multiprecision solve.
    assert turning_point(spec_mixed, 100.0) == pytest.approx(
        3.0842328377167624054, rel=1e-12
    )
    assert turning_point(SPEC_H, 25.0) == pytest.approx(5.0, rel=1e-12)


def test_action_closed_forms():
    # alpha=2, x0=1, lam=4: the integral evaluates to 2*pi/3 - sqrt(3)/2.
    assert action_Q(SPEC_H, 1.0, 4.0) == pytest.approx(
        2.0 * math.pi / 3.0 - math.sqrt(3.0) / 2.0, rel=1e-10
    )
    lam = 1.0e6
    exact = lam / 2.0 * (math.pi / 2.0 - math.asin(1.0 / math.sqrt(lam))) - 0.5 * math.sqrt(
        lam - 1.0
    )
    assert action_Q(SPEC_H, 1.0, lam) == pytest.approx(exact, rel=1e-10)
    assert Q_power_expansion(1.0, lam, 2.0) == pytest.approx(784398.16356411497628, rel=1e-13)
    assert Q_power_expansion(1.0, lam, 2.0) == pytest.approx(exact, rel=1e-12)


def test_action_domain():
    assert action_Q(SPEC_H, 2.0, 4.0) == 0.0  # x0 at the turning point
    with pytest.raises(ValueError):
        action_Q(SPEC_H, 0.5, 4.0)  # x0 below the matching radius
    with pytest.raises(ValueError):
        turning_point(SPEC_H, 0.5)  # energy below the potential level q0(b)


def test_mean_integrals():
    assert mean_integral(SPEC_H) == pytest.approx(-4.0 / 3.0, rel=1e-12)
    with_step = PotentialSpec(
        confining=HARM, perturbation=Step(height=0.5, lo=-0.9, hi=0.9), b=1.0
    )
    assert mean_integral(with_step) == pytest.approx(-4.0 / 3.0 + 0.9, rel=1e-12)
    quart_b2 = PotentialSpec(confining=QUART, b=2.0)
    assert mean_integral(quart_b2) == pytest.approx(-256.0 / 5.0, rel=1e-12)


def test_lacunary_resonance_moments():
    # At the resonant frequencies 2^k the cosine moment over the support
    # picks out exactly one term: pi * 2^(-k*tau).
    for k in (1, 3, 6):
        got = WEIER.cos_moment(2.0**k, -math.pi, math.pi)
        assert got == pytest.approx(math.pi * 2.0 ** (-k * 0.5), rel=1e-12), f"k={k}"
    assert WEIER.integral() == pytest.approx(0.0, abs=1e-14)
    assert WEIER.truncation_tail_bound() == pytest.approx(2.0**-3.0 / (2.0**0.5 - 1.0))
    assert WEIER.sup_bound() == pytest.approx(sum(2.0 ** (-j * 0.5) for j in range(1, 7)))
    assert WEIER.max_frequency() == 64.0


def test_step_moments():
    assert STEP.cos_moment(math.pi, -2.0, 2.0) == pytest.approx(0.0, abs=1e-15)
    assert STEP.cos_moment(math.pi / 2.0, -2.0, 2.0) == pytest.approx(2.0 / math.pi, rel=1e-12)
    assert STEP.sin_moment(1.7, -2.0, 2.0) == pytest.approx(0.0, abs=1e-15)
    assert STEP.cos_moment(2.0, 0.25, 3.0) == pytest.approx(
        0.5 * (math.sin(2.0) - math.sin(0.5)) / 2.0, rel=1e-12
    )
    assert STEP.integral() == pytest.approx(1.0, rel=1e-14)


def test_closed_forms_match_quadrature():
    rng = np.random.default_rng(20260819)
    worst = 0.0
    for pert in (STEP, WC, WEIER, TBL):
        lo, hi = pert.support()
        for _ in range(25):
            om = float(rng.uniform(0.0, 200.0))
            worst = max(
                worst,
                abs(pert.cos_moment(om, lo, hi) - cos_transform(pert, om, lo, hi, method="quadrature")),
                abs(pert.sin_moment(om, lo, hi) - sin_transform(pert, om, lo, hi, method="quadrature")),
            )
    assert worst < 1e-8
    # The automatic method dispatches to the closed-form moments.
    assert cos_transform(WEIER, 8.0) == pytest.approx(
        WEIER.cos_moment(8.0, -math.pi, math.pi), rel=1e-12
    )


def _harmonic_shifted_moment(w: float) -> float:
    # Closed form of the integral of (s^2 - 1) cos(w s) over [-1, 1].
    i_s2 = math.sin(w) / w + 2.0 * math.cos(w) / w**2 - 2.0 * math.sin(w) / w**3
    i_1 = math.sin(w) / w
    return 2.0 * (i_s2 - i_1)


def test_shifted_cos_transform():
    for w in (1.0, 7.3, 40.0):
        assert shifted_cos_transform(SPEC_H, w) == pytest.approx(
            _harmonic_shifted_moment(w), rel=1e-9, abs=1e-12
        ), f"w={w}"


def test_eval_q_vectorized():
    spec = PotentialSpec(confining=HARM, perturbation=WC, b=2.0)
    x = np.array([-1.0, 0.0, 0.7, 1.8])
    np.testing.assert_allclose(eval_q(spec, x), x**2 + WC.evaluate(x), atol=1e-15)


def test_sampled_table_against_dense_trapezoid():
    fine = np.linspace(_TBL_X[0], _TBL_X[-1], 200001)
    vals = np.interp(fine, _TBL_X, np.cos(_TBL_X) - math.cos(0.9))
    assert TBL.integral() == pytest.approx(float(np.trapezoid(vals, fine)), rel=1e-8)
    assert TBL.cos_moment(13.0, -1.0, 1.0) == pytest.approx(
        float(np.trapezoid(vals * np.cos(13.0 * fine), fine)), abs=1e-7
    )


def test_construction_validation():
    with pytest.raises(ConfigError):
        PlainSum(terms=((1.0, 2.0), (1.0, 2.0)))  # duplicate exponent
    with pytest.raises(ConfigError):
        PlainSum(terms=((-1.0, 2.0),))  # nonpositive leading coefficient
    with pytest.raises(ConfigError):
        # Perturbation support [-1, 1] must sit strictly inside (-b, b).
        PotentialSpec(confining=HARM, perturbation=STEP, b=0.5)


def test_json_round_trip_all_families():
    specs = (
        SPEC_H,
        PotentialSpec(confining=HARM, perturbation=Step(0.5, -0.9, 0.9), b=1.0),
        PotentialSpec(confining=QUART, b=2.0),
        PotentialSpec(confining=HARM, perturbation=WC, b=2.0),
        PotentialSpec(
            confining=ShiftedPower(shift=1.0, exponent=3.0), perturbation=WEIER, b=3.5
        ),
        PotentialSpec(confining=Quartic(offset=1.0), perturbation=TBL, b=1.0),
    )
    for spec in specs:
        assert spec_from_dict(spec_to_dict(spec)) == spec
        assert load_spec(dump_spec(spec)) == spec


def test_dict_codec_validation():
    good = spec_to_dict(SPEC_H)
    bad_version = dict(good, schema_version=99)
    with pytest.raises(ConfigError):
        spec_from_dict(bad_version)
    bad_family = dict(good, confining={"family": "nope"})
    with pytest.raises(ConfigError):
        spec_from_dict(bad_family)


def test_specs_hashable():
    # Scenario caching keys on the frozen spec objects.
    specs = {
        SPEC_H,
        PotentialSpec(confining=HARM, perturbation=WC, b=2.0),
        PotentialSpec(confining=Quartic(offset=1.0), perturbation=WEIER, b=3.9),
    }
    assert len(specs) == 3
