"""Independent numerical oracle for -y'' + q(x) y = lambda y.

Discretizes the operator on a truncated interval (Numerov or second-order
finite differences), counts eigenvalues below a shift with certified Sturm
pivot counts, brackets each requested index by bisection, and polishes the
bracket on the continuous problem with Pruefer-phase shooting. Boundary data
of the eigenfunction at x = 0 feeds the D_type/N_type classification.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import solve_banded

from .errors import (
    ConfigError,
    MissedIndexError,
    NumericalFailure,
    TruncationMarginError,
)
from .potential import FloatArray, PotentialSpec, spec_from_dict, spec_to_dict

SCHEMA_VERSION = 1

TRUNCATION_MARGIN = 25.0  # q0(L) must clear lambda by this much
FREQUENCY_RESOLUTION = 16  # grid points per shortest perturbation period

GEOMETRIES = ("full_line", "half_line")
BOUNDARY_CONDITIONS = ("dirichlet", "neumann")
SCHEMES = ("numerov", "fd2")

__all__ = [
    "SCHEMA_VERSION",
    "TRUNCATION_MARGIN",
    "BoundaryProblem",
    "SpectrumEntry",
    "Spectrum",
    "design_problem",
    "sturm_count",
    "solve_range",
    "boundary_angle",
    "classify_angle",
    "default_workers",
    "spectrum_to_dict",
    "spectrum_from_dict",
    "spectrum_to_csv",
    "spectrum_from_csv",
]


# ---------------------------------------------------------------------------
# Problem and spectrum containers

@dataclass(frozen=True, slots=True)
class BoundaryProblem:
    """Truncated discretization domain for the eigenvalue oracle.

    The full line is truncated to [-L, L] with Dirichlet walls; the half line
    to [0, L] with the requested condition at 0 and a Dirichlet wall at L.
    ``grid_step`` must divide ``truncation_radius`` so that 0 and +-L are
    grid nodes; :func:`design_problem` constructs compliant instances.
    """

    geometry: str
    truncation_radius: float
    grid_step: float
    bc_at_zero: str | None = None
    scheme: str = "numerov"

    def __post_init__(self) -> None:
        if self.geometry not in GEOMETRIES:
            raise ConfigError(f"geometry must be one of {GEOMETRIES}")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}")
        if self.geometry == "half_line":
            if self.bc_at_zero not in BOUNDARY_CONDITIONS:
                raise ConfigError(
                    f"half_line requires bc_at_zero in {BOUNDARY_CONDITIONS}"
                )
        elif self.bc_at_zero is not None:
            raise ConfigError("bc_at_zero only applies to half_line geometry")
        if not (self.truncation_radius > 0.0 and math.isfinite(self.truncation_radius)):
            raise ConfigError("truncation_radius must be positive and finite")
        if not (0.0 < self.grid_step < self.truncation_radius):
            raise ConfigError("grid_step must lie in (0, truncation_radius)")
        ratio = self.truncation_radius / self.grid_step
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise ConfigError("grid_step must divide truncation_radius")

    @property
    def cells(self) -> int:
        """Number of grid cells between 0 and the truncation radius."""
        return round(self.truncation_radius / self.grid_step)


@dataclass(frozen=True, slots=True)
class SpectrumEntry:
    n: int
    lam: float
    type_tag: str
    phi: float
    est_error: float


@dataclass(frozen=True)
class Spectrum:
    """Computed eigenvalues with boundary classification and error bars."""

    entries: tuple[SpectrumEntry, ...]
    meta: dict = field(default_factory=dict, compare=True)

    def validate(self) -> None:
        """Check strict increase, contiguous indexing, and simple gaps."""
        prev: SpectrumEntry | None = None
        for e in self.entries:
            if e.n < 1:
                raise MissedIndexError(f"index {e.n} out of range")
            if prev is not None:
                if e.n != prev.n + 1:
                    raise MissedIndexError(
                        f"indices not contiguous: {prev.n} then {e.n}"
                    )
                gap = e.lam - prev.lam
                if gap <= max(e.est_error, prev.est_error):
                    raise MissedIndexError(
                        f"gap {gap!r} between n={prev.n} and n={e.n} is not "
                        "resolved beyond the reported error"
                    )
            prev = e

    def eigenvalues(self) -> FloatArray:
        return np.array([e.lam for e in self.entries], dtype=np.float64)

    def indices(self) -> tuple[int, ...]:
        return tuple(e.n for e in self.entries)


def classify_angle(phi: float) -> str:
    """D_type when |sin phi| >= |cos phi|, else N_type."""
    return "D_type" if abs(math.sin(phi)) >= abs(math.cos(phi)) else "N_type"


def default_workers() -> int:
    """Worker count from ANHARMONIC_THREADS (default 1)."""
    raw = os.environ.get("ANHARMONIC_THREADS", "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError as exc:
        raise ConfigError(f"ANHARMONIC_THREADS must be an integer, got {raw!r}") from exc


# ---------------------------------------------------------------------------
# Problem design

def design_problem(
    spec: PotentialSpec,
    lambda_max: float,
    geometry: str = "full_line",
    bc_at_zero: str | None = None,
    scheme: str = "numerov",
    h_target: float = 1e-3,
    margin: float = TRUNCATION_MARGIN,
) -> BoundaryProblem:
    """Choose a truncation radius and grid step for eigenvalues up to lambda_max.

    The radius satisfies q0(L) >= lambda_max + margin (plus slack so counting
    stays legal slightly above lambda_max); the step divides the perturbation
    breakpoints where they are commensurate, resolves the highest perturbation
    frequency with FREQUENCY_RESOLUTION points per period, and divides L.
    """
    if lambda_max <= spec.q_floor():
        raise ConfigError("lambda_max must exceed q0(b)")
    omega = spec.perturbation.max_frequency()
    h = h_target
    if omega > 0.0:
        h = min(h, (2.0 * math.pi / omega) / FREQUENCY_RESOLUTION)

    # Snap h to divide the breakpoint lattice when one exists.
    points = sorted(
        {abs(p) for p in spec.perturbation.breakpoints() if abs(p) > 1e-12}
    )
    if points:
        gaps = [points[0]] + [b - a for a, b in zip(points, points[1:])]
        pitch = min(g for g in gaps if g > 1e-9)
        for divisor in range(1, 10):
            candidate = pitch / divisor
            candidate = candidate / math.ceil(candidate / h)
            if all(
                abs(p / candidate - round(p / candidate)) < 1e-9
                for p in points
            ):
                h = candidate
                break

    # Radius: clear the margin with slack so bracketing above lambda_max stays
    # within the counting precondition, then extend until the semiclassical
    # decay budget 2 * integral of sqrt(q0 - lambda_max) over the forbidden
    # region is large enough that the truncation shift is far below any tol.
    from .potential import turning_point  # local import avoids cycle at load

    from scipy.integrate import quad

    turning = turning_point(spec, lambda_max)
    radius = max(turning_point(spec, lambda_max + 2.0 * margin), spec.b + 1.0)
    q0s = spec.confining.evaluate_scalar

    def decay_budget(L: float) -> float:
        value, _ = quad(
            lambda s: math.sqrt(max(q0s(s) - lambda_max, 0.0)),
            turning,
            L,
            limit=200,
        )
        return 2.0 * value

    while decay_budget(radius) < 46.0:
        radius *= 1.1
    cells = math.ceil(radius / h - 1e-12)
    return BoundaryProblem(
        geometry=geometry,
        truncation_radius=cells * h,
        grid_step=h,
        bc_at_zero=bc_at_zero,
        scheme=scheme,
    )


# ---------------------------------------------------------------------------
# Grid sampling

_JUMP_SNAP = 1e-9


@lru_cache(maxsize=16)
def _grid_samples(problem: BoundaryProblem, spec: PotentialSpec) -> tuple[FloatArray, FloatArray, float]:
    """Interior nodes, potential samples, and the doubling factor at the fold.

    Returns (x, q, first_scale): the unknown-node abscissae, q sampled there
    (jump nodes take the mean of one-sided limits), and the factor applied to
    the first off-diagonal product (2 for the Neumann fold at 0, else 1).
    """
    L = problem.truncation_radius
    h = problem.grid_step
    m = problem.cells
    if problem.geometry == "full_line":
        x = (np.arange(1, 2 * m) - m) * h
        first_scale = 1.0
    elif problem.bc_at_zero == "dirichlet":
        x = np.arange(1, m) * h
        first_scale = 1.0
    else:  # half-line Neumann: node 0 is an unknown, even reflection at 0
        x = np.arange(0, m) * h
        first_scale = 2.0
    if x.size < 5:
        raise ConfigError("grid too coarse: fewer than 5 interior nodes")

    q = spec.confining.evaluate(np.abs(x)) + spec.perturbation.evaluate(x)

    # Mean-of-limits convention where a jump lands exactly on a node.
    for p in spec.perturbation.breakpoints():
        if abs(p) >= L:
            continue
        i = int(round((p - x[0]) / h))
        if 0 <= i < x.size and abs(x[i] - p) <= _JUMP_SNAP * (1.0 + abs(p)):
            delta = _JUMP_SNAP * (1.0 + abs(p))
            v_mean = 0.5 * (
                spec.perturbation.evaluate_scalar(p - delta)
                + spec.perturbation.evaluate_scalar(p + delta)
            )
            q[i] = spec.confining.evaluate_scalar(abs(x[i])) + v_mean
    q.setflags(write=False)
    x.setflags(write=False)
    return x, q, first_scale


# ---------------------------------------------------------------------------
# Pivot counting kernel (numba-compiled with an identical pure-python fallback)

def _pivot_count_impl(q, lam, h, numerov, first_scale):
    """Negative-pivot count of the shifted tridiagonal factorization.

    Returns (count, min_c) where min_c is the smallest Numerov weight
    1 - h^2 (q_i - lam)/12; the caller must reject min_c <= 0.
    """
    n = q.shape[0]
    inv_h2 = 1.0 / (h * h)
    twelfth = h * h / 12.0
    count = 0
    min_c = 1.0e300
    if numerov:
        f_prev = q[0] - lam
        c_prev = 1.0 - twelfth * f_prev
        if c_prev < min_c:
            min_c = c_prev
        d_prev = 2.0 * inv_h2 + (5.0 / 6.0) * f_prev
        if d_prev == 0.0:
            d_prev = -1.0e-300
        if d_prev < 0.0:
            count += 1
        for i in range(1, n):
            f_i = q[i] - lam
            c_i = 1.0 - twelfth * f_i
            if c_i < min_c:
                min_c = c_i
            coupling = c_prev * c_i * inv_h2 * inv_h2
            if i == 1:
                coupling *= first_scale
            d = 2.0 * inv_h2 + (5.0 / 6.0) * f_i - coupling / d_prev
            if d == 0.0:
                d = -1.0e-300
            if d < 0.0:
                count += 1
            c_prev = c_i
            d_prev = d
    else:
        d_prev = 2.0 * inv_h2 + (q[0] - lam)
        if d_prev == 0.0:
            d_prev = -1.0e-300
        if d_prev < 0.0:
            count += 1
        for i in range(1, n):
            coupling = inv_h2 * inv_h2
            if i == 1:
                coupling *= first_scale
            d = 2.0 * inv_h2 + (q[i] - lam) - coupling / d_prev
            if d == 0.0:
                d = -1.0e-300
            if d < 0.0:
                count += 1
            d_prev = d
        min_c = 1.0
    return count, min_c


try:  # pragma: no cover - exercised implicitly by every count
    import numba

    _pivot_count = numba.njit(cache=True, nogil=True)(_pivot_count_impl)
except Exception:  # pragma: no cover - numba unavailable or compile failure
    _pivot_count = _pivot_count_impl


def sturm_count(problem: BoundaryProblem, spec: PotentialSpec, lam: float) -> int:
    """Number of discrete-operator eigenvalues <= lam, by pivot signs.

    Exact for the discretized pencil: the factorization pivots of the shifted
    matrix carry its inertia, and the pencil's eigenvalue curves are strictly
    decreasing in the shift, so negative pivots biject with crossings below.
    """
    floor = spec.q0_scalar(problem.truncation_radius) - TRUNCATION_MARGIN
    if not lam < floor:
        raise TruncationMarginError(
            f"shift {lam!r} violates q0(L) - {TRUNCATION_MARGIN} = {floor!r}; "
            "increase the truncation radius"
        )
    _, q, first_scale = _grid_samples(problem, spec)
    count, min_c = _pivot_count(
        q, float(lam), problem.grid_step, problem.scheme == "numerov", first_scale
    )
    if min_c <= 0.0:
        raise NumericalFailure(
            "grid too coarse for this shift: a Numerov weight went nonpositive"
        )
    return int(count)


# ---------------------------------------------------------------------------
# Pruefer-phase shooting on the continuous problem

def _phase_breakpoints(spec: PotentialSpec, lo: float, hi: float) -> list[float]:
    pts = {lo, hi, 0.0} | set(spec.perturbation.breakpoints())
    return sorted(p for p in pts if lo <= p <= hi)


def _integrate_phase(
    q_of: "callable", edges: list[float], theta0: float
) -> tuple[float, float]:
    """March theta' = cos^2 + (lam-q) sin^2 across the pieces with sensitivity."""

    def rhs(x: float, u: np.ndarray) -> list[float]:
        theta, theta_lam = u
        s = math.sin(theta)
        c = math.cos(theta)
        depth = q_of(x)  # provides lam - q(x)
        return [
            c * c + depth * s * s,
            s * s + (depth - 1.0) * 2.0 * s * c * theta_lam,
        ]

    state = np.array([theta0, 0.0])
    for x1, x2 in zip(edges, edges[1:]):
        if x2 <= x1:
            continue
        sol = solve_ivp(
            rhs, (x1, x2), state, method="DOP853", rtol=1e-10, atol=1e-12
        )
        if not sol.success:
            raise NumericalFailure(
                f"phase integration failed on [{x1}, {x2}]: {sol.message}"
            )
        state = sol.y[:, -1]
    return float(state[0]), float(state[1])


def _matching_point(problem: BoundaryProblem, spec: PotentialSpec) -> float:
    """Interior matching abscissa: the sampled minimum of q.

    Matching there keeps both one-sided phases sensitive to the eigenvalue;
    shooting across a deep classically forbidden region would damp the
    sensitivity exponentially and destroy the Newton refinement.
    """
    x, q, _ = _grid_samples(problem, spec)
    return float(x[int(np.argmin(q))])


def _shoot_phase(
    problem: BoundaryProblem, spec: PotentialSpec, lam: float
) -> tuple[float, float]:
    """Two-sided phase sum at the matching point and its lambda-derivative.

    Integrates the phase from the left boundary forward and from the right
    wall backward (via reflection); at an eigenvalue the phases satisfy
    theta_left + theta_right = n pi.
    """
    if problem.geometry == "full_line":
        left, theta0 = -problem.truncation_radius, 0.0
    elif problem.bc_at_zero == "dirichlet":
        left, theta0 = 0.0, 0.0
    else:
        left, theta0 = 0.0, 0.5 * math.pi
    right = problem.truncation_radius
    confining = spec.confining.evaluate_scalar
    perturbation = spec.perturbation.evaluate_scalar

    def depth(x: float) -> float:
        return lam - confining(x) - perturbation(x)

    x_m = _matching_point(problem, spec)
    theta_l, slope_l = _integrate_phase(
        depth, _phase_breakpoints(spec, left, x_m), theta0
    )
    # Reflected coordinate t = right - x turns the backward march into the
    # same initial-value problem with potential q(right - t).
    right_edges = sorted(
        right - p for p in _phase_breakpoints(spec, x_m, right)
    )
    theta_r, slope_r = _integrate_phase(
        lambda t: depth(right - t), right_edges, 0.0
    )
    return theta_l + theta_r, slope_l + slope_r


def _polish_bracket(
    problem: BoundaryProblem,
    spec: PotentialSpec,
    n: int,
    lo: float,
    hi: float,
    tol: float,
) -> tuple[float, float]:
    """Newton-refine theta(L; lam) = n pi near [lo, hi]; return (lam, est_error)."""
    target = n * math.pi
    width = hi - lo
    lam = 0.5 * (lo + hi)
    # The continuous eigenvalue can sit slightly outside the discrete bracket
    # (by the discretization error), so allow a guarded widening.
    window = max(100.0 * tol, 1e-5 * (1.0 + abs(lam)))
    last_step = width
    residual = math.inf
    slope = 1.0
    for _ in range(12):
        theta, slope = _shoot_phase(problem, spec, lam)
        residual = theta - target
        if slope <= 0.0:
            raise NumericalFailure("phase derivative lost positivity")
        step = -residual / slope
        last_step = step
        new_lam = lam + step
        if abs(new_lam - 0.5 * (lo + hi)) > window:
            raise MissedIndexError(
                f"continuous root for n={n} left the certified bracket"
            )
        if new_lam == lam:
            lam = new_lam
            break
        lam = new_lam
        if abs(step) < 1e-14 * (1.0 + abs(lam)):
            break
    est = max(width, abs(last_step), abs(residual) / slope, 1e-13 * (1.0 + abs(lam)))
    return lam, est


# ---------------------------------------------------------------------------
# Eigenvector boundary data

def _matrix_bands(
    problem: BoundaryProblem, spec: PotentialSpec, lam: float
) -> np.ndarray:
    """Banded storage of the shifted discrete operator for solve_banded."""
    _, q, first_scale = _grid_samples(problem, spec)
    n = q.size
    h = problem.grid_step
    inv_h2 = 1.0 / (h * h)
    f = q - lam
    ab = np.zeros((3, n))
    if problem.scheme == "numerov":
        diag = 2.0 * inv_h2 + (5.0 / 6.0) * f
        upper = -inv_h2 + f / 12.0
        lower = -inv_h2 + f / 12.0
        ab[0, 1:] = upper[1:]
        ab[1, :] = diag
        ab[2, :-1] = lower[:-1]
    else:
        ab[0, 1:] = -inv_h2
        ab[1, :] = 2.0 * inv_h2 + f
        ab[2, :-1] = -inv_h2
    ab[0, 1] *= first_scale
    return ab


def _eigenvector(
    problem: BoundaryProblem, spec: PotentialSpec, lam: float, n: int
) -> FloatArray:
    """Inverse iteration for the discrete eigenvector nearest lam."""
    x, q, _ = _grid_samples(problem, spec)
    size = q.size
    # Sine profile with the target oscillation count: deterministic and never
    # orthogonal to the sought parity class.
    v = np.sin(n * math.pi * (np.arange(1, size + 1)) / (size + 1))
    shift = 0.0
    for attempt in range(4):
        try:
            ab = _matrix_bands(problem, spec, lam + shift)
            w = v.copy()
            for _ in range(3):
                w = solve_banded((1, 1), ab, w)
                norm = np.max(np.abs(w))
                if not (norm > 0.0 and math.isfinite(norm)):
                    raise np.linalg.LinAlgError("inverse iteration degenerated")
                w = w / norm
            return w
        except (np.linalg.LinAlgError, ValueError):
            shift = (1e-9 + 10.0 ** attempt * 1e-9) * (1.0 + abs(lam))
    raise NumericalFailure(f"inverse iteration failed near lam={lam!r}")


def boundary_angle(
    problem: BoundaryProblem, spec: PotentialSpec, lambda_eigen: float
) -> float:
    """Boundary angle phi in [0, 2 pi) of the eigenfunction at x = 0.

    phi = atan2(y'(0)/sqrt(lambda - q(b)), y(0)) for the sign-normalized
    eigenfunction; full-line geometry only.
    """
    if problem.geometry != "full_line":
        raise ConfigError("boundary_angle is defined for full_line geometry")
    mu = lambda_eigen - spec.q_floor()
    if mu < 0.0:
        raise ConfigError("lambda_eigen must be at least q0(b)")
    m = problem.cells
    # Index of x = 0 among interior unknowns (x[i] = (i+1-m) h).
    j0 = m - 1
    v = _eigenvector(problem, spec, lambda_eigen, max(1, _index_hint(problem, spec, lambda_eigen)))
    return _angle_from_vector(v, j0, problem.grid_step, mu)


def _index_hint(problem: BoundaryProblem, spec: PotentialSpec, lam: float) -> int:
    try:
        return max(1, sturm_count(problem, spec, lam + 1e-9 * (1.0 + abs(lam))))
    except TruncationMarginError:
        return 1


def _angle_from_vector(v: FloatArray, j0: int, h: float, mu: float) -> float:
    if not 2 <= j0 <= v.size - 3:
        raise NumericalFailure("grid too small to form boundary derivatives")
    y0 = v[j0]
    yp0 = (8.0 * (v[j0 + 1] - v[j0 - 1]) - (v[j0 + 2] - v[j0 - 2])) / (12.0 * h)
    if abs(y0) < 1e-12 and abs(yp0) < 1e-12:
        raise NumericalFailure("degenerate boundary data: y(0) and y'(0) both vanish")
    # Eigenfunctions are defined up to sign; fix it so the angle is unique.
    if y0 < 0.0 or (abs(y0) < 1e-12 and yp0 < 0.0):
        y0, yp0 = -y0, -yp0
    phi = math.atan2(yp0, math.sqrt(mu) * y0)
    if phi < 0.0:
        phi += 2.0 * math.pi
    return phi


# ---------------------------------------------------------------------------
# Range solver

def _bracket_indices(
    problem: BoundaryProblem,
    spec: PotentialSpec,
    n_lo: int,
    n_hi: int,
    tol: float,
) -> dict[int, tuple[float, float]]:
    """Bisection brackets of width <= tol for each index, sharing counts."""
    _, q, _ = _grid_samples(problem, spec)
    lo = float(np.min(q)) - 1.0
    while sturm_count(problem, spec, lo) > 0:
        lo -= max(10.0, abs(lo))
    # Probe upward for an upper bound, capped just under the counting
    # precondition so the probe itself stays legal.
    floor = spec.q0_scalar(problem.truncation_radius) - TRUNCATION_MARGIN
    cap = floor - 1e-9 * (1.0 + abs(floor))
    hi = min(lo + 10.0, cap)
    while sturm_count(problem, spec, hi) < n_hi:
        if hi >= cap:
            raise TruncationMarginError(
                f"index {n_hi} is beyond the truncation budget: only "
                f"{sturm_count(problem, spec, hi)} eigenvalues lie under "
                f"q0(L) - {TRUNCATION_MARGIN}"
            )
        hi = min(lo + 2.0 * (hi - lo), cap)
    c_lo = 0
    c_hi = sturm_count(problem, spec, hi)

    brackets: dict[int, tuple[float, float]] = {}
    stack = [(lo, c_lo, hi, c_hi)]
    while stack:
        a, ca, b, cb = stack.pop()
        # Target indices inside (ca, cb] clipped to the requested window.
        first = max(ca + 1, n_lo)
        last = min(cb, n_hi)
        if first > last:
            continue
        mid = 0.5 * (a + b)
        if b - a <= tol or not a < mid < b:
            if first != last:
                raise MissedIndexError(
                    f"indices {first}..{last} are not separated at width {b - a!r}"
                )
            brackets[first] = (a, b)
            continue
        cm = sturm_count(problem, spec, mid)
        if not ca <= cm <= cb:
            raise MissedIndexError(
                f"count at {mid!r} fell outside [{ca}, {cb}]: {cm}"
            )
        stack.append((a, ca, mid, cm))
        stack.append((mid, cm, b, cb))
    missing = [n for n in range(n_lo, n_hi + 1) if n not in brackets]
    if missing:
        raise MissedIndexError(f"no bracket found for indices {missing}")
    return brackets


def _halfline_tag(problem: BoundaryProblem) -> tuple[str, float]:
    if problem.bc_at_zero == "dirichlet":
        return "D_type", 0.5 * math.pi
    return "N_type", 0.0


def solve_range(
    problem: BoundaryProblem,
    spec: PotentialSpec,
    n_lo: int,
    n_hi: int,
    tol: float,
    *,
    polish: bool = True,
    classify: bool = True,
    workers: int | None = None,
) -> Spectrum:
    """Eigenvalues n_lo..n_hi, Sturm-bracketed to width tol, then polished.

    With ``polish`` the bracket midpoint is refined by Pruefer shooting on the
    continuous problem; ``est_error`` is max(bracket width, shooting residual
    converted to eigenvalue units). ``classify`` adds boundary angles and
    D/N tags on the full line (half-line tags follow the boundary condition).
    Disjoint index blocks are processed concurrently when ``workers`` (or
    ANHARMONIC_THREADS) exceeds 1; results are independent of the worker count.
    """
    if n_lo < 1 or n_hi < n_lo:
        raise ConfigError("need 1 <= n_lo <= n_hi")
    if tol < 1e-10:
        raise ConfigError("tol must be >= 1e-10")
    omega = spec.perturbation.max_frequency()
    if omega > 0.0 and problem.grid_step > (2.0 * math.pi / omega) / FREQUENCY_RESOLUTION:
        raise ConfigError(
            "grid_step does not resolve the perturbation frequency: need "
            f"h <= {(2.0 * math.pi / omega) / FREQUENCY_RESOLUTION!r}"
        )
    brackets = _bracket_indices(problem, spec, n_lo, n_hi, tol)

    j0 = problem.cells - 1
    mu_floor = spec.q_floor()

    def finish(n: int) -> SpectrumEntry:
        lo, hi = brackets[n]
        width = hi - lo
        if polish:
            lam, est = _polish_bracket(problem, spec, n, lo, hi, tol)
        else:
            lam, est = 0.5 * (lo + hi), width
        tag, phi = "unknown", 0.0
        if classify:
            if problem.geometry == "full_line":
                # The angle normalization divides y'(0) by sqrt(lam - q(b)),
                # so the classification is only defined above q(b); entries
                # below that threshold keep the "unknown" tag.
                mu = lam - mu_floor
                if mu > 0.0:
                    try:
                        v = _eigenvector(problem, spec, lam, n)
                        phi = _angle_from_vector(v, j0, problem.grid_step, mu)
                        tag = classify_angle(phi)
                    except NumericalFailure:
                        tag, phi = "unknown", 0.0
            else:
                tag, phi = _halfline_tag(problem)
        return SpectrumEntry(n=n, lam=lam, type_tag=tag, phi=phi, est_error=est)

    indices = list(range(n_lo, n_hi + 1))
    count = workers if workers is not None else default_workers()
    if count > 1 and len(indices) > 1:
        with ThreadPoolExecutor(max_workers=count) as pool:
            entries = list(pool.map(finish, indices))
    else:
        entries = [finish(n) for n in indices]

    spectrum = Spectrum(
        entries=tuple(entries),
        meta={
            "schema_version": SCHEMA_VERSION,
            "geometry": problem.geometry,
            "bc_at_zero": problem.bc_at_zero,
            "truncation_radius": problem.truncation_radius,
            "grid_step": problem.grid_step,
            "scheme": problem.scheme,
            "tol": tol,
            "polish": polish,
            "potential": spec_to_dict(spec),
        },
    )
    spectrum.validate()
    return spectrum


# ---------------------------------------------------------------------------
# Serialization

def spectrum_to_dict(spectrum: Spectrum) -> dict:
    return {
        "meta": dict(spectrum.meta),
        "eigenvalues": [
            {
                "n": e.n,
                "lambda": e.lam,
                "type": e.type_tag,
                "phi": e.phi,
                "est_error": e.est_error,
            }
            for e in spectrum.entries
        ],
    }


def spectrum_from_dict(data: dict) -> Spectrum:
    try:
        entries = tuple(
            SpectrumEntry(
                n=int(row["n"]),
                lam=float(row["lambda"]),
                type_tag=str(row["type"]),
                phi=float(row["phi"]),
                est_error=float(row["est_error"]),
            )
            for row in data["eigenvalues"]
        )
        meta = dict(data.get("meta", {}))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed spectrum payload: {exc}") from exc
    if "potential" in meta:
        spec_from_dict(meta["potential"])  # validates the embedded potential
    return Spectrum(entries=entries, meta=meta)


def spectrum_to_json(spectrum: Spectrum) -> str:
    return json.dumps(spectrum_to_dict(spectrum), indent=2, sort_keys=False) + "\n"


def spectrum_from_json(text: str) -> Spectrum:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid spectrum JSON: {exc}") from exc
    return spectrum_from_dict(data)


def spectrum_to_csv(spectrum: Spectrum) -> str:
    lines = ["n,lambda,type,phi,est_error"]
    for e in spectrum.entries:
        lines.append(f"{e.n},{e.lam!r},{e.type_tag},{e.phi!r},{e.est_error!r}")
    return "\n".join(lines) + "\n"


def spectrum_from_csv(text: str) -> Spectrum:
    lines = [ln for ln in text.strip().splitlines() if ln]
    if not lines or lines[0] != "n,lambda,type,phi,est_error":
        raise ConfigError("spectrum CSV must start with 'n,lambda,type,phi,est_error'")
    entries = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 5:
            raise ConfigError(f"malformed spectrum CSV row: {ln!r}")
        entries.append(
            SpectrumEntry(
                n=int(parts[0]),
                lam=float(parts[1]),
                type_tag=parts[2],
                phi=float(parts[3]),
                est_error=float(parts[4]),
            )
        )
    return Spectrum(entries=tuple(entries), meta={})
