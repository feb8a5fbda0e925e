"""Tests for the banded eigenvalue solver and its certification logic."""

import math

import numpy as np
import pytest

from anharmonic.eigensolve import (
    BoundaryProblem,
    boundary_angle,
    classify_angle,
    design_problem,
    solve_range,
    spectrum_from_csv,
    spectrum_from_json,
    spectrum_to_csv,
    spectrum_to_json,
    sturm_count,
)
from anharmonic.errors import ConfigError, TruncationMarginError
from anharmonic.potential import PlainSum, PotentialSpec, Step

HARM = PotentialSpec(confining=PlainSum(terms=((1.0, 2.0),)), b=0.5)
QUART = PotentialSpec(confining=PlainSum(terms=((1.0, 4.0),)), b=0.5)


@pytest.fixture(scope="module")
def prob():
    return design_problem(HARM, 25.0, h_target=2e-3)


@pytest.fixture(scope="module")
def spect(prob):
    return solve_range(prob, HARM, 1, 10, 1e-8)


def test_sturm_counts(prob):
    # Harmonic eigenvalues are 1, 3, 5, ...: five of them below 9.5.
    assert sturm_count(prob, HARM, 9.5) == 5
    assert sturm_count(prob, HARM, 0.5) == 0


def test_halfline_counts():
    probN = design_problem(HARM, 25.0, geometry="half_line", bc_at_zero="neumann", h_target=2e-3)
    probD = design_problem(HARM, 25.0, geometry="half_line", bc_at_zero="dirichlet", h_target=2e-3)
    assert sturm_count(probN, HARM, 6.0) == 2  # 1 and 5
    assert sturm_count(probD, HARM, 6.0) == 1  # 3 only


def test_truncation_margin_enforced(prob):
    with pytest.raises(TruncationMarginError):
        sturm_count(prob, HARM, HARM.q0_scalar(prob.truncation_radius) - 10.0)


def test_harmonic_eigenvalues_and_tags(spect):
    lams = spect.eigenvalues()
    want = np.arange(1.0, 20.0, 2.0)
    assert float(np.max(np.abs(lams - want))) < 1e-6
    assert [e.type_tag for e in spect.entries] == ["N_type", "D_type"] * 5
    assert all(e.est_error > 0.0 for e in spect.entries)


def test_certification_brackets_exactly_one_count(prob):
    s = solve_range(prob, HARM, 3, 6, 1e-6, polish=False, classify=False)
    for e in s.entries:
        hi = sturm_count(prob, HARM, e.lam + 1e-6)
        lo = sturm_count(prob, HARM, e.lam - 1e-6)
        assert hi - lo == 1, f"index {e.n} not certified"


def test_boundary_angle_classification(prob, spect):
    lams = spect.eigenvalues()
    phi1 = boundary_angle(prob, HARM, float(lams[0]))
    phi2 = boundary_angle(prob, HARM, float(lams[1]))
    assert classify_angle(phi1) == "N_type"
    assert classify_angle(phi2) == "D_type"


def test_unclassified_below_matching_level():
    # The classification angle normalizes the slope by sqrt(lam - q0(b)),
    # so it is undefined for eigenvalues at or below the potential level at
    # the matching radius: those entries must keep the "unknown" tag.
    spec = PotentialSpec(confining=PlainSum(terms=((1.0, 2.0),)), b=2.0)
    problem = design_problem(spec, 25.0, h_target=2e-3)
    s = solve_range(problem, spec, 1, 4, 1e-8)
    assert [e.type_tag for e in s.entries] == ["unknown", "unknown", "N_type", "D_type"]
    with pytest.raises(ConfigError):
        boundary_angle(problem, spec, s.entries[0].lam)


def test_quartic_ground_state():
    probq = design_problem(QUART, 30.0, h_target=1e-3)
    s = solve_range(probq, QUART, 1, 1, 1e-9)
    assert s.entries[0].lam == pytest.approx(1.060362090484, abs=5e-9)


def test_minmax_monotonicity_under_step():
    stepspec = PotentialSpec(
        confining=PlainSum(terms=((1.0, 2.0),)),
        perturbation=Step(height=1.0, lo=-1.0, hi=1.0),
        b=1.5,
    )
    base = PotentialSpec(confining=PlainSum(terms=((1.0, 2.0),)), b=1.5)
    ps = design_problem(stepspec, 25.0, h_target=2e-3)
    pb = design_problem(base, 25.0, h_target=2e-3)
    with_step = solve_range(ps, stepspec, 1, 8, 1e-8).eigenvalues()
    without = solve_range(pb, base, 1, 8, 1e-8).eigenvalues()
    # Adding a nonnegative bump bounded by 1 shifts every eigenvalue by [0, 1].
    for s_val, b_val in zip(with_step, without):
        assert -1e-7 <= s_val - b_val <= 1.0 + 1e-7


def test_full_line_merges_half_line_spectra(spect):
    probN = design_problem(HARM, 25.0, geometry="half_line", bc_at_zero="neumann", h_target=2e-3)
    probD = design_problem(HARM, 25.0, geometry="half_line", bc_at_zero="dirichlet", h_target=2e-3)
    sN = solve_range(probN, HARM, 1, 5, 1e-8)
    sD = solve_range(probD, HARM, 1, 5, 1e-8)
    merged = np.sort(np.concatenate([sN.eigenvalues(), sD.eigenvalues()]))
    assert float(np.max(np.abs(merged - spect.eigenvalues()))) < 2e-8


def test_fd2_scheme_agrees_after_polish(prob, spect):
    prob_fd = BoundaryProblem(
        geometry="full_line",
        truncation_radius=prob.truncation_radius,
        grid_step=prob.grid_step,
        scheme="fd2",
    )
    s_fd = solve_range(prob_fd, HARM, 1, 5, 1e-8, classify=False)
    assert float(np.max(np.abs(s_fd.eigenvalues() - spect.eigenvalues()[:5]))) < 1e-7


def _richardson_order(scheme: str, steps, n: int = 5) -> float:
    vals = []
    for h in steps:
        L = 7.0
        p = BoundaryProblem(
            geometry="full_line", truncation_radius=L, grid_step=L / round(L / h), scheme=scheme
        )
        s = solve_range(p, HARM, n, n, 1e-10, polish=False, classify=False)
        vals.append(s.entries[0].lam)
    e1 = abs(vals[0] - vals[1])
    e2 = abs(vals[1] - vals[2])
    return math.log2(e1 / e2)


def test_scheme_convergence_orders():
    assert _richardson_order("fd2", [0.04, 0.02, 0.01]) == pytest.approx(2.0, abs=0.2)
    assert _richardson_order("numerov", [0.08, 0.04, 0.02]) == pytest.approx(4.0, abs=0.2)


def test_truncation_insensitivity(prob, spect):
    cells_big = round(prob.cells * 1.2)
    p_big = BoundaryProblem(
        geometry="full_line",
        truncation_radius=cells_big * prob.grid_step,
        grid_step=prob.grid_step,
        scheme="numerov",
    )
    s_big = solve_range(p_big, HARM, 1, 10, 1e-8, classify=False)
    assert float(np.max(np.abs(s_big.eigenvalues() - spect.eigenvalues()))) < 1e-9


def test_worker_count_does_not_change_bytes(prob):
    s1 = solve_range(prob, HARM, 1, 10, 1e-8, workers=1)
    s4 = solve_range(prob, HARM, 1, 10, 1e-8, workers=4)
    assert spectrum_to_json(s1) == spectrum_to_json(s4)
    assert spectrum_to_csv(s1) == spectrum_to_csv(s4)


def test_codec_round_trips(spect):
    assert spectrum_from_json(spectrum_to_json(spect)) == spect
    back = spectrum_from_csv(spectrum_to_csv(spect))
    assert [(e.n, e.lam, e.type_tag, e.phi, e.est_error) for e in back.entries] == [
        (e.n, e.lam, e.type_tag, e.phi, e.est_error) for e in spect.entries
    ]


def test_problem_validation(prob):
    with pytest.raises(ConfigError):
        # The grid step must divide the truncation radius exactly.
        BoundaryProblem(geometry="full_line", truncation_radius=5.0, grid_step=0.3)
    with pytest.raises(ConfigError):
        solve_range(prob, HARM, 1, 5, 1e-12)  # below the tolerance floor
