"""Worst-case and stochastic condition numbers at a point.

Worst-case quantities come from exact formulas (spectral norm, weighted
1-norm). Stochastic quantities default to the linearized estimator: the
limit of vanishing perturbation size is taken analytically, so samples
are drawn from the first-order model instead of finite differences. A
finite-delta mode exists to validate that treatment empirically. Losses
of precision are reported in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from . import closed_forms
from .problems import Jacobian, Problem, evaluate, jacobian
from .sampling import BallRegion, SampleStream, sample_ball

# Fixed seed for the power-iteration start vector: spectral_norm stays a
# pure function of its matrix argument.
_POWER_START_SEED = 0x51AB1E


class DegenerateOutputError(ArithmeticError):
    """The condition number's denominator f_j(x) (or ||f(x)||) is zero."""


class PowerIterationError(RuntimeError):
    """Power iteration failed to converge; carries the last iterate/residual."""

    def __init__(self, message: str, last_iterate: np.ndarray, residual: float):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual


@dataclass
class EstimatorConfig:
    """How the Monte-Carlo estimators run.

    mode "linearized" samples the first-order model directly;
    "finite-delta" evaluates f at perturbed points for each delta in
    ``deltas`` (strictly decreasing) and reports the trend.
    """

    stream: SampleStream
    samples: int = 100_000
    mode: str = "linearized"
    deltas: tuple[float, ...] | None = None
    confidence: float = 0.99

    def __post_init__(self):
        if self.samples < 100:
            raise ValueError("samples must be >= 100")
        if self.mode not in ("linearized", "finite-delta"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError("confidence must lie in (0, 1)")
        if self.mode == "finite-delta":
            if not self.deltas:
                raise ValueError("finite-delta mode needs a non-empty deltas list")
            d = tuple(float(v) for v in self.deltas)
            if any(v <= 0.0 for v in d) or any(a <= b for a, b in zip(d, d[1:])):
                raise ValueError("deltas must be positive and strictly decreasing")
            self.deltas = d

    @property
    def z_value(self) -> float:
        return float(ndtri(0.5 * (1.0 + self.confidence)))


@dataclass
class DeltaPoint:
    """One finite-delta estimate in a sweep."""

    delta: float
    estimate: float
    half_width: float
    log_estimate: float
    log_half_width: float
    underflowed: bool


@dataclass
class StochasticEstimate:
    """A Monte-Carlo mean with its confidence half-width, plus the matching
    bit-loss estimate (mean of log2 of the same samples).

    ``log_skewness`` is a diagnostic: the log of a near-zero sample is
    heavy-tailed, and strong skew warns that the normal-theory half-width
    is optimistic. ``exact`` is filled when a closed form exists.
    """

    estimate: float
    half_width: float
    log_estimate: float
    log_half_width: float
    log_skewness: float
    samples: int
    confidence: float
    exact: float | None = None
    by_delta: list[DeltaPoint] = field(default_factory=list)


@dataclass
class ConditionReport:
    """All six condition quantities at a point.

    ``wnc``/``wcc`` entries are None when the corresponding output is
    exactly zero there; the degenerate flags say which. Stochastic
    entries for flagged outputs are skipped (None) rather than failing
    the whole report.
    """

    problem: str
    point: np.ndarray
    m: int
    n: int
    k: int
    wnc: float | None
    wcc: list[float | None]
    snc: StochasticEstimate | None
    scc: list[StochasticEstimate | None]
    degenerate_norm: bool
    degenerate_outputs: list[int]


def _gram_top_eigenvalue_2x2(small: np.ndarray) -> float:
    a, b, c = small[0, 0], small[0, 1], small[1, 1]
    return 0.5 * (a + c) + math.hypot(0.5 * (a - c), b)


def spectral_norm(matrix, rtol: float = 1e-12, max_iter: int = 10_000) -> float:
    """Largest singular value via power iteration on the Gram operator.

    Matrices whose smaller dimension is <= 2 use the closed-form
    symmetric eigenvalue instead. The start vector comes from a fixed
    internal stream, so the result is a pure function of the matrix.
    Non-convergence raises :class:`PowerIterationError` with the last
    iterate and residual attached.
    """
    if isinstance(matrix, Jacobian):
        matrix = matrix.matrix
    b = np.asarray(matrix, dtype=float)
    if b.ndim != 2:
        raise ValueError("matrix must be two-dimensional")
    if not np.all(np.isfinite(b)):
        raise ValueError("matrix entries must be finite")
    n, m = b.shape
    if min(n, m) == 1:
        return float(np.linalg.norm(b))
    if min(n, m) == 2:
        small = b @ b.T if n <= m else b.T @ b
        return math.sqrt(max(_gram_top_eigenvalue_2x2(small), 0.0))
    if not np.any(b):
        return 0.0
    stream = SampleStream(_POWER_START_SEED)
    v = stream.normals(m)
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(max_iter):
        w = b @ v
        z = b.T @ w
        zn = float(np.linalg.norm(z))
        if zn == 0.0:
            # start vector was in the null space; restart
            v = stream.normals(m)
            v /= np.linalg.norm(v)
            sigma = 0.0
            continue
        new_sigma = float(np.linalg.norm(w))
        v = z / zn
        if abs(new_sigma - sigma) <= rtol * new_sigma:
            return new_sigma
        sigma = new_sigma
    residual = float(np.linalg.norm(b.T @ (b @ v) - sigma * sigma * v))
    raise PowerIterationError(
        f"power iteration did not reach rtol={rtol} in {max_iter} iterations",
        last_iterate=v,
        residual=residual,
    )


def wnc(problem: Problem, x) -> float:
    """Worst-case norm-wise condition number ||x|| sigma_1 / ||f(x)||."""
    x = np.asarray(x, dtype=float).reshape(-1)
    y = evaluate(problem, x)
    fnorm = float(np.linalg.norm(y))
    if fnorm == 0.0:
        raise DegenerateOutputError(f"{problem.name}: f(x) = 0, condition number is infinite")
    return float(np.linalg.norm(x)) * spectral_norm(jacobian(problem, x)) / fnorm


def componentwise_weights(problem: Problem, x, j: int) -> np.ndarray:
    """g with g_i = x_i * (gradient of output j)_i; drives the componentwise
    quantities."""
    x = np.asarray(x, dtype=float).reshape(-1)
    jac = jacobian(problem, x)
    if not 0 <= j < problem.n:
        raise ValueError(f"output index {j} out of range for n={problem.n}")
    return x * jac.matrix[j]


def wcc(problem: Problem, x, j: int) -> float:
    """Worst-case componentwise condition number ||g||_1 / |f_j(x)|."""
    x = np.asarray(x, dtype=float).reshape(-1)
    y = evaluate(problem, x)
    if y[j] == 0.0:
        raise DegenerateOutputError(
            f"{problem.name}: f_{j}(x) = 0, condition number is infinite"
        )
    g = componentwise_weights(problem, x, j)
    return float(np.sum(np.abs(g))) / abs(float(y[j]))


_CHUNK = 1 << 16


def _mean_half_width(values: np.ndarray, z: float) -> tuple[float, float]:
    n = values.size
    mean = float(np.mean(values))
    sd = float(np.std(values, ddof=1))
    return mean, z * sd / math.sqrt(n)


def _log2_stats(values: np.ndarray, z: float) -> tuple[float, float, float]:
    logs = np.log2(values)
    n = logs.size
    mean = float(np.mean(logs))
    sd = float(np.std(logs, ddof=1))
    centered = logs - mean
    skew = float(np.mean(centered**3)) / sd**3 if sd > 0.0 else 0.0
    return mean, z * sd / math.sqrt(n), skew


def _resample_zeros(values: np.ndarray, redraw, what: str) -> np.ndarray:
    # zero samples break the log estimator; they have probability zero and
    # are redrawn from the continuing stream
    for _ in range(100):
        idx = np.flatnonzero(values == 0.0)
        if idx.size == 0:
            return values
        values[idx] = redraw(idx.size)
    raise RuntimeError(f"persistent zero samples while estimating {what}")


def _ball_model_values(mat: np.ndarray, stream: SampleStream, n_samples: int) -> np.ndarray:
    """||J u|| for u uniform in the unit ball, drawn in fixed-size chunks."""
    m = mat.shape[1]
    region = BallRegion(np.zeros(m), 1.0)

    def draw(count: int) -> np.ndarray:
        u = sample_ball(region, stream, size=count)
        return np.linalg.norm(mat @ u.T, axis=0)

    out = np.empty(n_samples)
    done = 0
    while done < n_samples:
        take = min(_CHUNK, n_samples - done)
        out[done:done + take] = draw(take)
        done += take
    return _resample_zeros(out, draw, "norm-wise amplification")


def _cube_dot_values(g: np.ndarray, stream: SampleStream, n_samples: int) -> np.ndarray:
    """|u . g| for u uniform on [-1, 1]^m, drawn in fixed-size chunks."""
    m = g.size

    def draw(count: int) -> np.ndarray:
        u = stream.symmetric(count * m).reshape(count, m)
        return np.abs(u @ g)

    out = np.empty(n_samples)
    done = 0
    while done < n_samples:
        take = min(_CHUNK, n_samples - done)
        out[done:done + take] = draw(take)
        done += take
    return _resample_zeros(out, draw, "componentwise amplification")


def snc(problem: Problem, x, cfg: EstimatorConfig) -> StochasticEstimate:
    """Stochastic norm-wise condition number and loss of precision.

    Linearized mode averages ||J' u|| * ||x|| / ||f(x)|| over u uniform in
    the unit ball (and the log2 of the same samples for the bit loss).
    When n = 1 the exact closed-form value is attached as well.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    y = evaluate(problem, x)
    fnorm = float(np.linalg.norm(y))
    if fnorm == 0.0:
        raise DegenerateOutputError(f"{problem.name}: f(x) = 0, condition number is infinite")
    exact = None
    if problem.n == 1:
        ratio, _ = closed_forms.snc_wnc_exact(problem.m)
        exact = wnc(problem, x) * ratio
    if cfg.mode == "finite-delta":
        points = _finite_delta_points(problem, x, cfg, norm_wise=True)
        head = next((p for p in points if not p.underflowed), points[-1])
        return StochasticEstimate(
            estimate=head.estimate, half_width=head.half_width,
            log_estimate=head.log_estimate, log_half_width=head.log_half_width,
            log_skewness=math.nan, samples=cfg.samples, confidence=cfg.confidence,
            exact=exact, by_delta=points,
        )
    mat = jacobian(problem, x).matrix
    scale = float(np.linalg.norm(x)) / fnorm
    values = _ball_model_values(mat, cfg.stream, cfg.samples) * scale
    z = cfg.z_value
    est, hw = _mean_half_width(values, z)
    log_est, log_hw, skew = _log2_stats(values, z)
    return StochasticEstimate(est, hw, log_est, log_hw, skew,
                              cfg.samples, cfg.confidence, exact=exact)


def scc(problem: Problem, x, j: int, cfg: EstimatorConfig) -> StochasticEstimate:
    """Stochastic componentwise condition number and loss of precision for
    output j.

    Linearized mode averages |u . g| / |f_j(x)| over u uniform on
    [-1, 1]^m. With at most 3 nonzero weights the exact value from the
    piecewise-polynomial convolution is attached.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    y = evaluate(problem, x)
    if y[j] == 0.0:
        raise DegenerateOutputError(
            f"{problem.name}: f_{j}(x) = 0, condition number is infinite"
        )
    g = componentwise_weights(problem, x, j)
    denom = abs(float(y[j]))
    exact = None
    if np.count_nonzero(g) <= 3:
        exact = closed_forms.exact_mean_abs_weighted_sum(g) / denom
    if cfg.mode == "finite-delta":
        points = _finite_delta_points(problem, x, cfg, norm_wise=False, j=j)
        head = next((p for p in points if not p.underflowed), points[-1])
        return StochasticEstimate(
            estimate=head.estimate, half_width=head.half_width,
            log_estimate=head.log_estimate, log_half_width=head.log_half_width,
            log_skewness=math.nan, samples=cfg.samples, confidence=cfg.confidence,
            exact=exact, by_delta=points,
        )
    values = _cube_dot_values(g, cfg.stream, cfg.samples) / denom
    z = cfg.z_value
    est, hw = _mean_half_width(values, z)
    log_est, log_hw, skew = _log2_stats(values, z)
    return StochasticEstimate(est, hw, log_est, log_hw, skew,
                              cfg.samples, cfg.confidence, exact=exact)


def _points_from_diffs(deltas, all_diffs, denom: float, z: float) -> list[DeltaPoint]:
    points = []
    for delta, diffs in zip(deltas, all_diffs):
        values = diffs / (delta * denom)
        positive = values[values > 0.0]
        if positive.size < 2:  # the difference underflowed to zero
            points.append(DeltaPoint(delta, 0.0, 0.0, math.nan, math.nan, True))
            continue
        est, hw = _mean_half_width(values, z)
        log_est, log_hw, _ = _log2_stats(positive, z)
        points.append(DeltaPoint(delta, est, hw, log_est, log_hw, False))
    return points


def _finite_delta_points(problem: Problem, x, cfg: EstimatorConfig,
                         norm_wise: bool, j: int = 0) -> list[DeltaPoint]:
    """Finite-delta estimates sharing one set of direction samples.

    Reusing the directions across deltas makes the deviation from the
    linearized value a clean O(delta) signal instead of Monte-Carlo noise.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    y = evaluate(problem, x)
    denom = float(np.linalg.norm(y)) if norm_wise else abs(float(y[j]))
    if norm_wise:
        u = sample_ball(BallRegion(np.zeros(problem.m), 1.0), cfg.stream, size=cfg.samples)
        scales = float(np.linalg.norm(x)) * np.ones(problem.m)
    else:
        u = cfg.stream.symmetric(cfg.samples * problem.m).reshape(cfg.samples, problem.m)
        scales = np.abs(x)
    all_diffs = []
    for delta in cfg.deltas:
        offsets = delta * scales * u
        diffs = np.empty(cfg.samples)
        for i in range(cfg.samples):
            fx = evaluate(problem, x + offsets[i])
            if norm_wise:
                diffs[i] = np.linalg.norm(fx - y)
            else:
                diffs[i] = abs(float(fx[j]) - float(y[j]))
        all_diffs.append(diffs)
    return _points_from_diffs(cfg.deltas, all_diffs, denom, cfg.z_value)


@dataclass
class SweepReport:
    """Finite-delta estimates next to linearized values on shared samples."""

    problem: str
    point: np.ndarray
    deltas: tuple[float, ...]
    snc_linearized: float | None
    snc_by_delta: list[DeltaPoint]
    scc_linearized: list[float | None]
    scc_by_delta: list[list[DeltaPoint]]
    degenerate_norm: bool
    degenerate_outputs: list[int]


def delta_sweep(problem: Problem, x, cfg: EstimatorConfig) -> SweepReport:
    """Empirical validation of the vanishing-perturbation limit.

    One block of ball directions and one block of cube directions is
    drawn up front and reused for the linearized values and for every
    delta, so |finite-delta - linearized| carries only the Taylor
    remainder, not fresh Monte-Carlo noise. For linear problems the two
    agree to rounding for every delta.
    """
    if not cfg.deltas:
        raise ValueError("delta_sweep needs a non-empty deltas list")
    x = np.asarray(x, dtype=float).reshape(-1)
    y = evaluate(problem, x)
    mat = jacobian(problem, x).matrix
    z = cfg.z_value
    subs = cfg.stream.split(2)
    u_ball = sample_ball(BallRegion(np.zeros(problem.m), 1.0), subs[0], size=cfg.samples)
    u_cube = subs[1].symmetric(cfg.samples * problem.m).reshape(cfg.samples, problem.m)

    fnorm = float(np.linalg.norm(y))
    degenerate_norm = fnorm == 0.0
    xnorm = float(np.linalg.norm(x))
    live = [j for j in range(problem.n) if y[j] != 0.0]
    degenerate_outputs = [j for j in range(problem.n) if y[j] == 0.0]
    weights = {j: x * mat[j] for j in live}

    snc_lin = None
    if not degenerate_norm:
        snc_lin = float(np.mean(np.linalg.norm(mat @ (xnorm * u_ball).T, axis=0))) / fnorm
    scc_lin: list[float | None] = [None] * problem.n
    for j in live:
        scc_lin[j] = float(np.mean(np.abs(u_cube @ weights[j]))) / abs(float(y[j]))

    ball_diffs = {d: np.empty(cfg.samples) for d in cfg.deltas}
    cube_diffs = {d: np.empty((cfg.samples, len(live))) for d in cfg.deltas}
    for delta in cfg.deltas:
        ball_offsets = delta * xnorm * u_ball
        cube_offsets = delta * np.abs(x) * u_cube
        for i in range(cfg.samples):
            if not degenerate_norm:
                fb = evaluate(problem, x + ball_offsets[i])
                ball_diffs[delta][i] = np.linalg.norm(fb - y)
            if live:
                fc = evaluate(problem, x + cube_offsets[i])
                cube_diffs[delta][i] = np.abs(fc[live] - y[live])

    snc_points: list[DeltaPoint] = []
    if not degenerate_norm:
        snc_points = _points_from_diffs(
            cfg.deltas, [ball_diffs[d] for d in cfg.deltas], fnorm, z)
    scc_points: list[list[DeltaPoint]] = [[] for _ in range(problem.n)]
    for col, j in enumerate(live):
        scc_points[j] = _points_from_diffs(
            cfg.deltas, [cube_diffs[d][:, col] for d in cfg.deltas],
            abs(float(y[j])), z)

    return SweepReport(
        problem=problem.name,
        point=x.copy(),
        deltas=tuple(cfg.deltas),
        snc_linearized=snc_lin,
        snc_by_delta=snc_points,
        scc_linearized=scc_lin,
        scc_by_delta=scc_points,
        degenerate_norm=degenerate_norm,
        degenerate_outputs=degenerate_outputs,
    )


def report(problem: Problem, x, cfg: EstimatorConfig) -> ConditionReport:
    """All six quantities at x. Outputs with f_j(x) = 0 are flagged rather
    than failing the whole report; the stream is split per estimator so
    the layout is deterministic."""
    x = np.asarray(x, dtype=float).reshape(-1)
    y = evaluate(problem, x)
    streams = cfg.stream.split(1 + problem.n)

    degenerate_norm = bool(np.linalg.norm(y) == 0.0)
    wnc_value = None if degenerate_norm else wnc(problem, x)
    snc_value = None
    if not degenerate_norm:
        sub = EstimatorConfig(stream=streams[0], samples=cfg.samples, mode=cfg.mode,
                              deltas=cfg.deltas, confidence=cfg.confidence)
        snc_value = snc(problem, x, sub)

    wcc_values: list[float | None] = []
    scc_values: list[StochasticEstimate | None] = []
    degenerate_outputs: list[int] = []
    for j in range(problem.n):
        if y[j] == 0.0:
            degenerate_outputs.append(j)
            wcc_values.append(None)
            scc_values.append(None)
            continue
        wcc_values.append(wcc(problem, x, j))
        sub = EstimatorConfig(stream=streams[1 + j], samples=cfg.samples, mode=cfg.mode,
                              deltas=cfg.deltas, confidence=cfg.confidence)
        scc_values.append(scc(problem, x, j, sub))

    return ConditionReport(
        problem=problem.name,
        point=x.copy(),
        m=problem.m,
        n=problem.n,
        k=min(problem.m, problem.n),
        wnc=wnc_value,
        wcc=wcc_values,
        snc=snc_value,
        scc=scc_values,
        degenerate_norm=degenerate_norm,
        degenerate_outputs=degenerate_outputs,
    )
