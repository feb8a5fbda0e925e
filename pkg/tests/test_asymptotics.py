"""Tests for expansion constants, predictors, quantization, and traces."""

import math

import numpy as np
import pytest

from anharmonic.asymptotics import (
    constants,
    counting_asymptotic,
    d2_asymptotic,
    eigenvalue_expansion,
    expansion_report,
    halfline_expansion,
    heat_trace_leading,
    heat_trace_sum,
    heat_trace_tail,
    power_law_slope,
    quantization_solve,
    quartic_Q_coefficients,
    quartic_action_sum,
    report_from_csv,
    report_from_json,
    report_to_csv,
    report_to_json,
    thm2_residual,
)
from anharmonic.errors import ConfigError, NoRootError
from anharmonic.potential import (
    PlainSum,
    PotentialSpec,
    Quartic,
    Step,
    TruncatedWeierstrass,
    Zero,
    action_Q,
)

# Frozen 30-digit reference values for the closed-form constants.
C1_4 = 1.1128357888987642484
C1_3 = 1.0711882232522239909
C2_4 = 0.011918121304715831063
D2COEF_3 = 0.005718767703773829696
D2_4_1E4 = 1.1918121304715831063e-5
A_4 = 0.87401918476403993682
HARM_TRACE_005 = 9.9958345482908392804

ZERO = Zero()
WEIER = TruncatedWeierstrass(tau=0.5, levels=6)
STEP = Step(height=0.3, lo=0.2, hi=1.2)
HARM = PotentialSpec(confining=PlainSum(terms=((1.0, 2.0),)), b=1.0)
QUART = PotentialSpec(confining=PlainSum(terms=((1.0, 4.0),)), b=1.0)


def test_constants_oracles():
    c2 = constants(2.0, ZERO)
    assert c2.C1 == pytest.approx(1.0, abs=5e-16)
    assert c2.C0 == 0.0
    assert c2.C2 == 0.0
    assert constants(1.0, ZERO).C2 == 0.0  # the (alpha - 1) factor vanishes
    c4 = constants(4.0, ZERO)
    assert c4.C1 == pytest.approx(C1_4, abs=1e-15)
    assert c4.C2 == pytest.approx(C2_4, abs=1e-15)
    c3 = constants(3.0, ZERO)
    assert c3.C1 == pytest.approx(C1_3, abs=5e-15)
    assert c3.C2 == pytest.approx(D2COEF_3, abs=1e-15)
    # The action coefficient is pi * C1 / 4.
    assert math.pi * c4.C1 / 4.0 == pytest.approx(A_4, abs=1e-15)


def test_constants_mean_term():
    assert constants(2.0, STEP).C0 == pytest.approx(0.3 / math.pi, abs=1e-15)
    assert abs(constants(2.0, WEIER).C0) < 1e-15  # mean-free by construction


def test_second_order_decay_coefficient():
    assert d2_asymptotic(2.0, 123.0) == 0.0
    assert d2_asymptotic(1.5, 123.0) == 0.0
    assert d2_asymptotic(4.0, 1e4) == pytest.approx(D2_4_1E4, abs=1e-19)
    assert d2_asymptotic(3.0, 1.0) == pytest.approx(D2COEF_3, abs=1e-17)
    assert constants(4.0, ZERO).C2 == pytest.approx(d2_asymptotic(4.0, 1.0), abs=1e-17)
    with pytest.raises(ConfigError):
        d2_asymptotic(4.0, 0.0)


def test_harmonic_expansion_is_exact():
    c2 = constants(2.0, ZERO)
    e10 = eigenvalue_expansion(c2, ZERO, 10)
    assert e10.predicted == pytest.approx(19.0, abs=1e-13)
    assert e10.term2 == 0.0 and e10.term3 == 0.0 and e10.term4 == 0.0


def test_quartic_fourth_term_closed_form():
    c4 = constants(4.0, ZERO)
    e4 = eigenvalue_expansion(c4, ZERO, 10)
    t4_direct = (8.0 / 6.0) * c4.C2 * c4.C1 ** (-10.0 / 6.0) * 19.0 ** (-2.0 / 3.0)
    assert e4.term4 == pytest.approx(t4_direct, abs=1e-18)


def test_residual_plumbing():
    e = eigenvalue_expansion(constants(2.0, ZERO), ZERO, 10, oracle=19.0)
    assert e.residual == 19.0 - e.predicted


def test_quantization_harmonic():
    qd = quantization_solve(HARM, 10, "D_type")
    qn = quantization_solve(HARM, 10, "N_type")
    assert qd.lam == pytest.approx(39.0, abs=5e-3)
    assert qn.lam == pytest.approx(37.0, abs=5e-3)
    assert qd.mu == pytest.approx(qd.lam - 1.0, abs=1e-12)
    assert qd.d2 == 0.0
    # The stored correction reproduces the phase-balance identity.
    gap = qd.Q + math.pi / 4.0 + HARM.b * math.sqrt(qd.mu) - 10.0 * math.pi
    assert gap == pytest.approx(qd.correction, abs=1e-9)


def test_quantization_no_root_at_bottom():
    # The first almost-even level sits below the admissible search window.
    with pytest.raises(NoRootError):
        quantization_solve(HARM, 1, "N_type")


def test_quantization_merged_sequence_interlaces():
    merged = []
    for j in range(2, 41):
        merged.append(quantization_solve(HARM, j, "N_type").lam)
        merged.append(quantization_solve(HARM, j, "D_type").lam)
    assert all(a < b for a, b in zip(merged, merged[1:]))


def test_quantization_tracks_expansion():
    # Both predictors approximate the same eigenvalue, so their gap must
    # shrink like 1/lam (checked as |gap| * lam bounded by 5).
    pert_spec = PotentialSpec(
        confining=PlainSum(terms=((1.0, 2.0),)),
        b=2.0,
        perturbation=Step(height=0.5, lo=-0.9, hi=0.9),
    )
    pc = constants(2.0, pert_spec.perturbation)
    worst = 0.0
    for k in (20, 21, 100, 200):
        if k % 2 == 0:
            ctx = quantization_solve(pert_spec, k // 2, "D_type")
        else:
            ctx = quantization_solve(pert_spec, (k + 1) // 2, "N_type")
        pred = eigenvalue_expansion(pc, pert_spec.perturbation, k).predicted
        worst = max(worst, abs(ctx.lam - pred) * pred)
    assert worst <= 5.0


def test_phase_identity_residual_harmonic():
    assert abs(thm2_residual(HARM, 50, 99.0)) <= 0.02


def test_halfline_expansions_exact_for_harmonic():
    c2 = constants(2.0, ZERO)
    assert halfline_expansion(c2, ZERO, 5, "dirichlet") == pytest.approx(19.0, abs=1e-13)
    assert halfline_expansion(c2, ZERO, 5, "neumann") == pytest.approx(17.0, abs=1e-13)


def test_counting_leading_term():
    assert counting_asymptotic(HARM, 99.0) == pytest.approx(49.4786, abs=2e-3)
    with pytest.raises(ConfigError):
        counting_asymptotic(HARM, HARM.q_floor())


def test_heat_trace_leading():
    assert heat_trace_leading(2.0, 0.05) == pytest.approx(10.0, abs=1e-12)
    shifted = heat_trace_leading(2.0, 0.05, c_shift=1.0)
    assert shifted == pytest.approx(10.0 - 0.05**-0.5 / math.sqrt(math.pi), abs=1e-12)


def test_heat_trace_sum_and_tail():
    lams = np.arange(1, 1001, dtype=np.float64) * 2.0 - 1.0
    # Frozen value of sum(exp(-0.05 * (2n - 1))) = 1 / (2 sinh 0.05).
    assert heat_trace_sum(lams, 0.05) == pytest.approx(HARM_TRACE_005, abs=1e-9)
    tail_est = heat_trace_tail(HARM, 0.05, 99.0)
    tail_true = math.exp(-0.05 * 101.0) / (1.0 - math.exp(-0.1))
    assert tail_est == pytest.approx(tail_true, rel=0.1)


def test_quartic_action_coefficients():
    a = quartic_Q_coefficients(0.0, 1.0)
    assert a[0] == pytest.approx(A_4, abs=2e-9)
    assert a[1] == pytest.approx(-1.0, abs=1e-9)
    assert abs(a[2]) < 1e-6
    assert a[5] == pytest.approx(-0.5, abs=1e-3)


def test_quartic_action_sum_reconstructs_exact_action():
    # Re-adding the two convention adjustments turns the coefficient list
    # back into a plain basis fit of the action integral; on held-out
    # energies the fit reproduces the exact integral to near machine
    # precision relative accuracy.
    g = list(quartic_Q_coefficients(0.0, 1.0))
    g[1] += 1.0
    g[5] += 0.25 * (2.0 / 5.0)
    worst = 0.0
    for lam in np.geomspace(2e4, 5e7, 18):
        target = action_Q(QUART, 1.0, float(lam)) + math.sqrt(float(lam) - 1.0)
        got = quartic_action_sum(tuple(g), float(lam))
        worst = max(worst, abs(got - target) / abs(target))
    assert worst <= 1e-9


def test_quartic_action_sum_offset_well():
    c, b = 1.0, 1.0
    spec = PotentialSpec(confining=Quartic(offset=c), b=b)
    q_int = 2.0 * (b**5 / 5.0 + 2.0 * c * b**3 / 3.0 + c * c * b)
    g = list(quartic_Q_coefficients(c, b))
    g[1] += 1.0
    g[5] += 0.25 * q_int
    worst = 0.0
    for lam in np.geomspace(1e4, 1e8, 16):
        target = action_Q(spec, b, float(lam)) + b * math.sqrt(float(lam) - spec.q_floor())
        got = quartic_action_sum(tuple(g), float(lam))
        worst = max(worst, abs(got - target) / abs(target))
    assert worst <= 1e-9


def test_term_order_sanity():
    spec4 = constants(4.0, STEP)
    for n in (10, 100, 1000):
        e = eigenvalue_expansion(spec4, STEP, n)
        assert e.term1 > abs(e.term2) > abs(e.term4) > 0.0, f"n={n}"


def test_power_law_slope():
    xs = np.array([1.0, 2.0, 4.0, 8.0])
    assert power_law_slope(xs, 3.0 * xs**-1.5) == pytest.approx(-1.5, abs=1e-12)
    assert power_law_slope(xs, xs**2.0, weights=[1, 2, 3, 4]) == pytest.approx(2.0, abs=1e-12)


def test_report_round_trips():
    c4 = constants(4.0, STEP)
    rep = expansion_report(c4, STEP, range(5, 9), oracles={5: 10.0, 7: 20.0})
    assert report_from_csv(report_to_csv(rep)).entries == rep.entries
    rt = report_from_json(report_to_json(rep))
    assert rt.entries == rep.entries
    assert rt.constants == rep.constants
    assert (
        report_to_csv(rep).splitlines()[0]
        == "n,term1,term2,term3,term4,predicted,oracle,residual"
    )
