"""Reconstruction algorithms behind a common report interface.

Seven families: dense least squares (pinv), correlation and its
differential variant (corr/dgi), gradient descent with exact step (gd),
conjugate gradient on the normal equations (cgd), Poisson maximum
likelihood with backtracking line search (poisson), per-measurement
alternating projection (ap), and augmented-Lagrangian l1 minimization
with a DCT or gradient prior (cs-dct/cs-tv).

All iterative solvers share one stopping protocol: stop when the change
of the measurement residual norm ||b - Ax|| between consecutive
iterations falls below a threshold (default 1e-2), with a minimum of 30
iterations and a cap of 3x the pixel count.
"""

import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import (
    InvalidArgumentError,
    LineSearchFailureError,
    NumericalFailureError,
    SingularSystemError,
    UnknownSolverError,
    DomainError,
)
from .model import Image, MeasurementSet, PatternSet, devectorize
from .transforms import LinearOperator, dct_operator, gradient_operator, soft_threshold

__all__ = [
    "StopCriteria",
    "SolverState",
    "LineSearchParams",
    "AlmParams",
    "SolverReport",
    "pinv_solve",
    "corr_reconstruct",
    "dgi_reconstruct",
    "gd_gradient",
    "gd_optimal_step",
    "gd_solve",
    "cgd_solve",
    "poisson_objective",
    "poisson_gradient",
    "backtracking_search",
    "poisson_solve",
    "ap_update",
    "ap_solve",
    "alm_solve",
    "solver_registry",
    "get_solver",
]

EPS_DIV = 1e-12  # sign-preserving clamp for a_i.x denominators


@dataclass
class StopCriteria:
    """Shared iteration-stopping protocol for all iterative solvers."""

    residual_change_threshold: float = 1e-2
    min_iterations: int = 30
    max_iterations_factor: float = 3.0

    def max_iterations(self, n: int) -> int:
        cap = int(round(self.max_iterations_factor * n))
        return max(self.min_iterations, cap, 1)


@dataclass
class SolverState:
    """Loop state of the gradient-descent family (exposed for inspection)."""

    x: np.ndarray
    p: np.ndarray
    step: float
    r: np.ndarray
    k: int


@dataclass
class LineSearchParams:
    """Backtracking (Armijo) parameters; ranges follow the standard recipe."""

    alpha: float = 0.1
    beta: float = 0.5

    def __post_init__(self):
        if not 0.01 <= self.alpha <= 0.3:
            raise InvalidArgumentError("alpha must lie in [0.01, 0.3]")
        if not 0.1 <= self.beta <= 0.8:
            raise InvalidArgumentError("beta must lie in [0.1, 0.8]")


@dataclass
class AlmParams:
    """Penalty/multiplier schedule for the augmented-Lagrangian solver."""

    mu1_init: float = 1.0
    mu2_init: float = 1.0
    rho: float = 1.05
    mu_max: float = 1e6

    def __post_init__(self):
        if self.mu1_init <= 0 or self.mu2_init <= 0:
            raise InvalidArgumentError("penalty weights must be positive")
        if self.rho <= 1:
            raise InvalidArgumentError("rho must exceed 1")


@dataclass
class SolverReport:
    """Reconstruction plus per-iteration trace.

    trace entries are (iteration, residual_norm, objective_value).
    """

    image: Image
    iterations: int
    wall_time: float
    trace: list
    terminated_by: str  # residual_change | max_iterations | exact
    warning_count: int = 0


class _StopTracker:
    """Applies the residual-change / min / max iteration protocol."""

    def __init__(self, stop: StopCriteria, n: int):
        self.stop = stop
        self.max_iter = stop.max_iterations(n)
        self.prev = None

    def check(self, k: int, rnorm: float) -> Optional[str]:
        prev, self.prev = self.prev, rnorm
        if (
            prev is not None
            and k >= self.stop.min_iterations
            and abs(rnorm - prev) < self.stop.residual_change_threshold
        ):
            return "residual_change"
        if k >= self.max_iter:
            return "max_iterations"
        return None


def _finish(x, width, height, k, t0, trace, terminated_by, warnings=0) -> SolverReport:
    return SolverReport(
        image=devectorize(x, width, height),
        iterations=k,
        wall_time=time.perf_counter() - t0,
        trace=trace,
        terminated_by=terminated_by,
        warning_count=warnings,
    )


def _check_dims(patterns: PatternSet, meas: MeasurementSet):
    if meas.m != patterns.m:
        raise InvalidArgumentError(
            f"measurement count {meas.m} != pattern count {patterns.m}"
        )


# ---------------------------------------------------------------- non-iterative


def pinv_solve(
    patterns: PatternSet, meas: MeasurementSet, width: int, height: int
) -> SolverReport:
    """Dense least squares x = (A^T A)^{-1} A^T b; requires m >= n full rank."""
    _check_dims(patterns, meas)
    t0 = time.perf_counter()
    A, b = patterns.rows, meas.values
    if patterns.m < patterns.n:
        raise SingularSystemError(
            f"m={patterns.m} < n={patterns.n}: normal equations are rank-deficient"
        )
    x, _, rank, s = np.linalg.lstsq(A, b, rcond=None)
    cond_normal = np.inf if s[-1] <= 0 else (s[0] / s[-1]) ** 2
    if rank < patterns.n or cond_normal > 1e12:
        raise SingularSystemError(
            f"A^T A condition estimate {cond_normal:.2e} exceeds 1e12"
        )
    rnorm = float(np.linalg.norm(b - A @ x))
    trace = [(0, rnorm, rnorm**2)]
    return _finish(x, width, height, 0, t0, trace, "exact")


def corr_reconstruct(
    patterns: PatternSet, meas: MeasurementSet, width: int, height: int
) -> SolverReport:
    """Conventional correlation: x = {b_i a_i} - {b_i}{a_i}."""
    _check_dims(patterns, meas)
    t0 = time.perf_counter()
    A, b = patterns.rows, meas.values
    x = (b @ A) / patterns.m - b.mean() * A.mean(axis=0)
    rnorm = float(np.linalg.norm(b - A @ x))
    return _finish(x, width, height, 0, t0, [(0, rnorm, rnorm**2)], "exact")


def dgi_reconstruct(
    patterns: PatternSet, meas: MeasurementSet, width: int, height: int
) -> SolverReport:
    """Differential correlation: x = {b_i a_i} - ({b_i}/{s_i}) {s_i a_i}."""
    _check_dims(patterns, meas)
    t0 = time.perf_counter()
    A, b, s = patterns.rows, meas.values, patterns.intensities
    s_mean = s.mean()
    if s_mean == 0:
        raise InvalidArgumentError("all patterns are zero: mean intensity is 0")
    x = (b @ A) / patterns.m - (b.mean() / s_mean) * ((s @ A) / patterns.m)
    rnorm = float(np.linalg.norm(b - A @ x))
    return _finish(x, width, height, 0, t0, [(0, rnorm, rnorm**2)], "exact")


# ------------------------------------------------------------- gradient descent


def gd_gradient(patterns: PatternSet, x: np.ndarray, meas: MeasurementSet) -> np.ndarray:
    """Gradient of ||Ax - b||^2: p = 2 A^T (Ax - b)."""
    A = patterns.rows
    return 2.0 * (A.T @ (A @ x - meas.values))


def gd_optimal_step(
    patterns: PatternSet, p: np.ndarray, r: np.ndarray
) -> Optional[float]:
    """Exact minimizing step for the quadratic objective along direction p.

    step = -(p^T A^T r) / (p^T A^T A p) with r = b - Ax.  Returns None
    when Ap = 0 (converged: no progress possible along p).
    """
    Ap = patterns.rows @ p
    denom = float(Ap @ Ap)
    if denom == 0.0:
        return None
    return -float(Ap @ r) / denom


def gd_solve(
    patterns: PatternSet,
    meas: MeasurementSet,
    width: int,
    height: int,
    stop: Optional[StopCriteria] = None,
) -> SolverReport:
    """Steepest descent with the exact line-search step, x0 = 0."""
    _check_dims(patterns, meas)
    stop = stop or StopCriteria()
    t0 = time.perf_counter()
    A, b, n = patterns.rows, meas.values, patterns.n
    state = SolverState(x=np.zeros(n), p=np.zeros(n), step=0.0, r=b.copy(), k=0)
    tracker = _StopTracker(stop, n)
    trace = []
    terminated = "max_iterations"
    while True:
        state.k += 1
        state.p = gd_gradient(patterns, state.x, meas)
        state.r = b - A @ state.x
        step = gd_optimal_step(patterns, state.p, state.r)
        if step is not None:
            state.step = step
            state.x = state.x - step * state.p
            state.r = b - A @ state.x
        rnorm = float(np.linalg.norm(state.r))
        obj = rnorm**2
        if not np.isfinite(obj):
            raise NumericalFailureError("objective diverged", iteration=state.k)
        trace.append((state.k, rnorm, obj))
        why = tracker.check(state.k, rnorm)
        if why:
            terminated = why
            break
    return _finish(state.x, width, height, state.k, t0, trace, terminated)


def cgd_solve(
    patterns: PatternSet,
    meas: MeasurementSet,
    width: int,
    height: int,
    stop: Optional[StopCriteria] = None,
    normal_residual_rtol: float = 1e-12,
) -> SolverReport:
    """Conjugate gradient on the normal equations A^T A x = A^T b, x0 = 0.

    The n x n system is never materialized; each step applies A then A^T.
    First search direction is steepest descent.  Terminates early
    ("exact") when the normal-equation residual drops below
    max(1e-12, normal_residual_rtol * ||A^T b||), bypassing the minimum
    iteration count.
    """
    _check_dims(patterns, meas)
    stop = stop or StopCriteria()
    t0 = time.perf_counter()
    A, b, n = patterns.rows, meas.values, patterns.n
    bp = A.T @ b
    bp_norm = float(np.linalg.norm(bp))
    exact_tol = max(1e-12, normal_residual_rtol * bp_norm)

    x = np.zeros(n)
    r = bp.copy()  # normal-equation residual b' - A'x
    rr = float(r @ r)
    p = r.copy()
    tracker = _StopTracker(stop, n)
    trace = []
    k = 0
    terminated = "max_iterations"
    while True:
        if np.sqrt(rr) <= exact_tol:
            terminated = "exact"
            break
        k += 1
        Ap = A @ p
        q = A.T @ Ap
        denom = float(p @ q)
        if denom <= 1e-300:
            raise NumericalFailureError(
                "p^T A'p is numerically zero: semidefinite system", iteration=k
            )
        alpha = rr / denom
        x = x + alpha * p
        r = r - alpha * q
        rr_new = float(r @ r)
        p = r + (rr_new / rr) * p
        rr = rr_new
        rnorm = float(np.linalg.norm(b - A @ x))
        trace.append((k, rnorm, rnorm**2))
        why = tracker.check(k, rnorm)
        if why:
            terminated = why
            break
    if not trace:
        rnorm = float(np.linalg.norm(b - A @ x))
        trace = [(0, rnorm, rnorm**2)]
    return _finish(x, width, height, k, t0, trace, terminated)


# ------------------------------------------------------ Poisson max. likelihood


def poisson_objective(patterns: PatternSet, x: np.ndarray, meas: MeasurementSet) -> float:
    """Negative Poisson log-likelihood: sum(a_i.x - b_i log(a_i.x)).

    Requires a_i.x > 0 for every pattern; b_i = 0 entries contribute only
    the linear term.
    """
    b = meas.values
    if np.any(b < 0):
        raise InvalidArgumentError("Poisson measurements must be >= 0")
    ax = patterns.rows @ x
    if np.any(ax <= 0):
        raise DomainError("a_i.x must be positive for the Poisson likelihood")
    log_terms = np.where(b > 0, b * np.log(ax), 0.0)
    return float(np.sum(ax - log_terms))


def _clamp_signed(v: np.ndarray, eps: float = EPS_DIV) -> np.ndarray:
    """Clamp magnitudes below eps to eps, keeping sign (0 treated as +)."""
    sign = np.where(v < 0, -1.0, 1.0)
    return sign * np.maximum(np.abs(v), eps)


def poisson_gradient(patterns: PatternSet, x: np.ndarray, meas: MeasurementSet) -> np.ndarray:
    """Gradient of the negative log-likelihood: A^T ((Ax - b) / Ax)."""
    A, b = patterns.rows, meas.values
    ax = A @ x
    ratio = (ax - b) / _clamp_signed(ax)
    return A.T @ ratio


def backtracking_search(
    objective: Callable[[np.ndarray], float],
    x: np.ndarray,
    p: np.ndarray,
    params: Optional[LineSearchParams] = None,
    max_shrinks: int = 200,
) -> float:
    """First step in {1, beta, beta^2, ...} passing the Armijo test.

    Accepts the first step with L(x + step*p) <= L(x) - alpha*step*p.p;
    p must be a descent direction (pass the negated gradient).
    """
    params = params or LineSearchParams()
    f0 = objective(x)
    pp = float(p @ p)
    step = 1.0
    for _ in range(max_shrinks + 1):
        trial = objective(x + step * p)
        if trial <= f0 - params.alpha * step * pp:
            return step
        step *= params.beta
    raise LineSearchFailureError(
        "no acceptable step after 200 shrinks: non-descent direction or broken objective"
    )


def poisson_solve(
    patterns: PatternSet,
    meas: MeasurementSet,
    width: int,
    height: int,
    stop: Optional[StopCriteria] = None,
    ls: Optional[LineSearchParams] = None,
) -> SolverReport:
    """Poisson maximum-likelihood descent with backtracking step size.

    Negative measurements (possible after Gaussian noise) are clamped to
    0 and counted in the report; x0 is a small positive constant so the
    likelihood's Ax > 0 domain constraint holds at the start.
    """
    _check_dims(patterns, meas)
    stop = stop or StopCriteria()
    ls = ls or LineSearchParams()
    t0 = time.perf_counter()
    A, n = patterns.rows, patterns.n

    clamped = int(np.count_nonzero(meas.values < 0))
    b = np.maximum(meas.values, 0.0)
    meas_pos = MeasurementSet(values=b, noise_sigma=meas.noise_sigma,
                              noise_seed=meas.noise_seed)

    def guarded_objective(v):
        ax = A @ v
        if np.any(ax <= 0):
            return np.inf
        log_terms = np.where(b > 0, b * np.log(ax), 0.0)
        return float(np.sum(ax - log_terms))

    x = np.full(n, 1e-6)
    tracker = _StopTracker(stop, n)
    trace = []
    k = 0
    terminated = "max_iterations"
    while True:
        k += 1
        grad = poisson_gradient(patterns, x, meas_pos)
        direction = -grad
        step = backtracking_search(guarded_objective, x, direction, ls)
        x = x + step * direction
        rnorm = float(np.linalg.norm(b - A @ x))
        obj = guarded_objective(x)
        if not np.isfinite(rnorm):
            raise NumericalFailureError("residual diverged", iteration=k)
        trace.append((k, rnorm, obj))
        why = tracker.check(k, rnorm)
        if why:
            terminated = why
            break
    return _finish(x, width, height, k, t0, trace, terminated, warnings=clamped)


# -------------------------------------------------------- alternating projection


def ap_update(a: np.ndarray, b_i: float, x: np.ndarray) -> np.ndarray:
    """One measurement's correction of the estimate.

    x' = x - [a (.) (a (.) x)] / max(a)^2 * (a.x - b_i)/(a.x), with the
    a.x denominator clamped sign-preservingly.  All-zero patterns leave x
    unchanged.
    """
    a = np.asarray(a, dtype=np.float64)
    amax = float(a.max(initial=0.0))
    if amax <= 0.0:
        return x.copy()
    ax = float(a @ x)
    denom = ax if abs(ax) >= EPS_DIV else (EPS_DIV if ax >= 0 else -EPS_DIV)
    factor = (ax - b_i) / denom
    return x - (a * a * x) / amax**2 * factor


def ap_solve(
    patterns: PatternSet,
    meas: MeasurementSet,
    width: int,
    height: int,
    stop: Optional[StopCriteria] = None,
) -> SolverReport:
    """Sweeps every measurement in ascending order, once per outer iteration."""
    _check_dims(patterns, meas)
    stop = stop or StopCriteria()
    t0 = time.perf_counter()
    A, b, n = patterns.rows, meas.values, patterns.n
    zero_rows = int(np.count_nonzero(patterns.intensities == 0))
    x = np.full(n, 1e-6)
    tracker = _StopTracker(stop, n)
    trace = []
    k = 0
    terminated = "max_iterations"
    while True:
        k += 1
        for i in range(patterns.m):
            x = ap_update(A[i], b[i], x)
        rnorm = float(np.linalg.norm(b - A @ x))
        if not np.isfinite(rnorm):
            raise NumericalFailureError("residual diverged", iteration=k)
        trace.append((k, rnorm, rnorm**2))
        why = tracker.check(k, rnorm)
        if why:
            terminated = why
            break
    return _finish(x, width, height, k, t0, trace, terminated, warnings=zero_rows * k)


# --------------------------------------------------------- augmented Lagrangian


def _inner_cg(matvec, rhs, x0, rtol=1e-8, maxit=500):
    """Plain CG for the SPD inner system of the x-update."""
    x = x0.copy()
    r = rhs - matvec(x)
    rr = float(r @ r)
    target = (rtol * float(np.linalg.norm(rhs))) ** 2
    if rr <= max(target, 1e-300):
        return x, True
    p = r.copy()
    for _ in range(maxit):
        q = matvec(p)
        denom = float(p @ q)
        if denom <= 1e-300:
            return x, False
        alpha = rr / denom
        x += alpha * p
        r -= alpha * q
        rr_new = float(r @ r)
        if rr_new <= max(target, 1e-300):
            return x, True
        p = r + (rr_new / rr) * p
        rr = rr_new
    return x, False


def alm_solve(
    patterns: PatternSet,
    meas: MeasurementSet,
    prior: LinearOperator,
    width: int,
    height: int,
    params: Optional[AlmParams] = None,
    stop: Optional[StopCriteria] = None,
) -> SolverReport:
    """l1-minimization of the prior coefficients subject to Px = c, Ax = b.

    Alternates: soft-threshold update of c, an inner-CG solve of the SPD
    system (mu1 P^T P + mu2 A^T A) x = mu1 P^T(c - y1/mu1)
    + mu2 A^T(b - y2/mu2), multiplier ascent for y1/y2, then geometric
    growth of mu1/mu2 capped at mu_max.  Use the DCT prior for sparse
    representation, the gradient prior for total variation.
    """
    _check_dims(patterns, meas)
    if prior.in_dim != patterns.n:
        raise InvalidArgumentError("prior operator dimension != pixel count")
    params = params or AlmParams()
    stop = stop or StopCriteria()
    t0 = time.perf_counter()
    A, b, n = patterns.rows, meas.values, patterns.n

    x = np.zeros(n)
    y1 = np.zeros(prior.out_dim)
    y2 = np.zeros(patterns.m)
    mu1, mu2 = params.mu1_init, params.mu2_init

    tracker = _StopTracker(stop, n)
    trace = []
    k = 0
    terminated = "max_iterations"
    while True:
        k += 1
        Px = prior.apply(x)
        c = soft_threshold(Px + y1 / mu1, 1.0 / mu1)
        rhs = mu1 * prior.apply_transpose(c - y1 / mu1) + mu2 * (A.T @ (b - y2 / mu2))

        def matvec(v, _mu1=mu1, _mu2=mu2):
            return _mu1 * prior.apply_transpose(prior.apply(v)) + _mu2 * (A.T @ (A @ v))

        x, ok = _inner_cg(matvec, rhs, x)
        if not ok:
            raise NumericalFailureError(
                "inner CG did not converge within 500 iterations", iteration=k
            )
        Px = prior.apply(x)
        Ax = A @ x
        y1 = y1 + mu1 * (Px - c)
        y2 = y2 + mu2 * (Ax - b)
        mu1 = min(params.rho * mu1, params.mu_max)
        mu2 = min(params.rho * mu2, params.mu_max)

        rnorm = float(np.linalg.norm(Ax - b))
        obj = float(np.abs(Px).sum())
        if not np.isfinite(rnorm):
            raise NumericalFailureError("residual diverged", iteration=k)
        trace.append((k, rnorm, obj))
        why = tracker.check(k, rnorm)
        if why:
            terminated = why
            break
    return _finish(x, width, height, k, t0, trace, terminated)


# ---------------------------------------------------------------------- registry


def _cs_dct(patterns, meas, width, height, stop=None):
    return alm_solve(patterns, meas, dct_operator(width, height), width, height, stop=stop)


def _cs_tv(patterns, meas, width, height, stop=None):
    return alm_solve(
        patterns, meas, gradient_operator(width, height), width, height, stop=stop
    )


def _pinv(patterns, meas, width, height, stop=None):
    return pinv_solve(patterns, meas, width, height)


def _corr(patterns, meas, width, height, stop=None):
    return corr_reconstruct(patterns, meas, width, height)


def _dgi(patterns, meas, width, height, stop=None):
    return dgi_reconstruct(patterns, meas, width, height)


_REGISTRY = [
    ("pinv", _pinv),
    ("corr", _corr),
    ("dgi", _dgi),
    ("gd", gd_solve),
    ("cgd", cgd_solve),
    ("poisson", poisson_solve),
    ("ap", ap_solve),
    ("cs-dct", _cs_dct),
    ("cs-tv", _cs_tv),
]


def solver_registry():
    """Stable (name, solver) pairs; every solver has the same call shape:
    solver(patterns, meas, width, height, stop=None) -> SolverReport."""
    return list(_REGISTRY)


def get_solver(name: str):
    for key, fn in _REGISTRY:
        if key == name:
            return fn
    valid = ", ".join(key for key, _ in _REGISTRY)
    raise UnknownSolverError(f"unknown solver {name!r}; valid names: {valid}")
