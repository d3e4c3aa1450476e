"""Empirical checks of the analytic building blocks behind the algorithms.

Each probe measures a quantity the analysis predicts (unbiasedness of the
sign correlation, Hamming/geodesic agreement of one-bit embeddings, the
restricted approximate invertibility slope on an annulus, orthogonal
decomposition residuals, Gaussian widths of sparse balls, the metric
projection inequality) and reports the observed deviation or fit, never the
asymptotic constants, which live beyond desk scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, SamplingExhaustedError
from .model import as_vector, gen_gaussian_matrix, gen_sparse_signal, sign_quantize
from .rng import generator_for, substream_seed
from .sparse_ops import geodesic_distance, hamming_distance, hard_threshold, sparse_dual_norm

_SQRT_HALF_PI = math.sqrt(math.pi / 2.0)


def check_unbiasedness(y, m: int, trials: int, seed: int) -> float:
    """Max coordinate deviation of the averaged sign correlation from y.

    Averages sqrt(pi/2)/(trials*m) * A^T sign(A y) over ``trials`` fresh
    ensembles; the population mean is exactly y for unit y.
    """
    y = as_vector(y)
    if abs(float(np.linalg.norm(y)) - 1.0) > 1e-9:
        raise InvalidArgumentError("y must be unit norm within 1e-9")
    if trials < 1 or m < 1 or trials * m < 10_000:
        raise InvalidArgumentError("need trials*m >= 10^4 measurements")
    acc = np.zeros(y.size)
    for t in range(trials):
        A = gen_gaussian_matrix(substream_seed(seed, t), m, y.size).matrix
        acc += A.T @ np.where(A @ y > 0, 1.0, -1.0)
    estimate = _SQRT_HALF_PI / (trials * m) * acc
    return float(np.max(np.abs(estimate - y)))


def embedding_gap(A, x, y) -> float:
    """|hamming(sign(Ax), sign(Ay)) - geodesic(x, y)| for one pair."""
    bx = sign_quantize(A.matrix @ as_vector(x))
    by = sign_quantize(A.matrix @ as_vector(y))
    return abs(hamming_distance(bx, by) - geodesic_distance(x, y))


def check_embedding(N: int, s: int, m: int, pairs: int, seed: int) -> float:
    """Max embedding gap over random s-sparse unit pairs on one ensemble."""
    if pairs < 1:
        raise InvalidArgumentError("pairs must be >= 1")
    A = gen_gaussian_matrix(substream_seed(seed, 0), m, N)
    worst = 0.0
    for k in range(pairs):
        x = gen_sparse_signal(substream_seed(seed, 1, 2 * k), N, s)
        y = gen_sparse_signal(substream_seed(seed, 1, 2 * k + 1), N, s)
        worst = max(worst, embedding_gap(A, x, y))
    return worst


@dataclass(frozen=True)
class RaicProbeConfig:
    """Sampling plan for the restricted approximate invertibility probe.

    Samples s-sparse unit y with r_lb <= ||x - y|| <= r_ub around a fixed
    seeded x and fits lhs ~ fitted_delta * ||x - y|| + fitted_eta. nu defaults
    to sqrt(pi/2)/m. r_lb = 0 is allowed as a diagnostic (admits y = x).
    """

    N: int
    s: int
    m: int
    samples: int
    seed: int
    r_lb: float = 0.1
    r_ub: float = 0.5
    nu: float | None = None
    retry_budget: int = 100_000

    def __post_init__(self):
        if not 1 <= self.s <= self.N:
            raise InvalidArgumentError("need 1 <= s <= N")
        if self.m < 1 or self.samples < 1:
            raise InvalidArgumentError("m and samples must be >= 1")
        if not 0.0 <= self.r_lb <= self.r_ub <= 2.0:
            raise InvalidArgumentError("need 0 <= r_lb <= r_ub <= 2")
        if self.nu is not None and self.nu <= 0:
            raise InvalidArgumentError("nu must be positive")

    @property
    def effective_nu(self) -> float:
        return self.nu if self.nu is not None else _SQRT_HALF_PI / self.m


@dataclass
class RaicProbeResult:
    """Fitted slope/intercept plus the raw (distance, lhs) cloud."""

    fitted_delta: float
    fitted_eta: float
    max_residual: float
    per_sample: list[tuple[float, float]] = field(default_factory=list)


def _sparse_point_at_distance(
    x: np.ndarray, s: int, target: float, rng: np.random.Generator, budget: int
) -> np.ndarray:
    """s-sparse unit y at prescribed Euclidean distance from s-sparse unit x.

    Builds y = cos(t)*u + sin(t)*g on a support overlapping x's, where u is the
    renormalized restriction of x and g an orthogonal unit direction, so
    ||x - y||^2 = 2 - 2*||x|_S||*cos(t) hits the target exactly.
    """
    n = x.size
    supp = np.flatnonzero(x)
    j_max = min(s, n - s)
    for _ in range(budget):
        j = int(rng.integers(0, j_max + 1)) if j_max > 0 else 0
        kept = rng.choice(supp, size=s - j, replace=False) if s - j > 0 else np.empty(0, int)
        if j > 0:
            pool = np.setdiff1d(np.arange(n), supp, assume_unique=True)
            fresh = rng.choice(pool, size=j, replace=False)
            support = np.concatenate([kept, fresh]).astype(int)
        else:
            support = kept.astype(int)
        base = np.zeros(n)
        base[support] = x[support]
        c = float(np.linalg.norm(base))
        if c < 1e-15:
            continue
        cos_t = (2.0 - target**2) / (2.0 * c)
        if abs(cos_t) > 1.0:
            continue
        u = base / c
        sin_t = math.sqrt(max(0.0, 1.0 - cos_t**2))
        if sin_t < 1e-15:
            return cos_t * u
        g = np.zeros(n)
        g[support] = rng.standard_normal(support.size)
        g -= np.dot(g, u) * u
        gn = float(np.linalg.norm(g))
        if gn < 1e-12:
            continue
        return cos_t * u + (sin_t / gn) * g
    raise SamplingExhaustedError(
        f"no admissible s-sparse point at distance {target} within {budget} attempts"
    )


def raic_probe(cfg: RaicProbeConfig) -> RaicProbeResult:
    """Measure ||nu*A^T(sign(Ax)-sign(Ay)) - (x-y)|| in the sparse dual norm.

    Distances are stratified across the annulus; the fit is least squares with
    the intercept clamped to be nonnegative, and max_residual is the largest
    excess of any sample above the fitted line.
    """
    x = gen_sparse_signal(substream_seed(cfg.seed, 0), cfg.N, cfg.s).values
    A = gen_gaussian_matrix(substream_seed(cfg.seed, 1), cfg.m, cfg.N).matrix
    sign_x = np.where(A @ x > 0, 1.0, -1.0)
    nu = cfg.effective_nu

    cloud: list[tuple[float, float]] = []
    width = cfg.r_ub - cfg.r_lb
    for k in range(cfg.samples):
        rng = generator_for(substream_seed(cfg.seed, 2, k))
        target = cfg.r_lb + (k + rng.uniform(0.0, 1.0)) * width / cfg.samples
        y = _sparse_point_at_distance(x, cfg.s, target, rng, cfg.retry_budget)
        sign_y = np.where(A @ y > 0, 1.0, -1.0)
        lhs = sparse_dual_norm(nu * (A.T @ (sign_x - sign_y)) - (x - y), cfg.s)
        cloud.append((float(np.linalg.norm(x - y)), float(lhs)))
    cloud.sort()

    d = np.array([p[0] for p in cloud])
    lhs = np.array([p[1] for p in cloud])
    delta, eta = _nonneg_intercept_fit(d, lhs)
    residuals = lhs - (delta * d + eta)
    return RaicProbeResult(
        fitted_delta=float(delta),
        fitted_eta=float(eta),
        max_residual=float(np.max(residuals)),
        per_sample=cloud,
    )


def _nonneg_intercept_fit(d: np.ndarray, lhs: np.ndarray) -> tuple[float, float]:
    if d.size == 1 or float(np.ptp(d)) == 0.0:
        # degenerate cloud: attribute everything to the intercept
        return 0.0, float(np.mean(lhs))
    slope, intercept = np.polyfit(d, lhs, 1)
    if intercept < 0.0:
        intercept = 0.0
        slope = float(np.dot(d, lhs) / np.dot(d, d))
    return float(slope), float(intercept)


def raic_level_sweep(
    N: int,
    s: int,
    m: int,
    annuli: list[tuple[float, float]],
    samples: int,
    seed: int,
    nu: float | None = None,
) -> list[RaicProbeResult]:
    """Per-annulus-level fits (one RaicProbeResult per (r_lb, r_ub) level)."""
    results = []
    for idx, (lb, ub) in enumerate(annuli):
        cfg = RaicProbeConfig(
            N=N, s=s, m=m, samples=samples, seed=substream_seed(seed, idx), r_lb=lb, r_ub=ub, nu=nu
        )
        results.append(raic_probe(cfg))
    return results


def decomposition_check(a, x, y) -> tuple[float, float, float]:
    """Residuals of the split of a along (x-y), (x+y), and their complement.

    Returns (reconstruction residual, |<b, u>|, |<b, v>|) where u, v are the
    normalized difference/sum directions and b is the remainder; all three are
    zero up to rounding for unit x, y.
    """
    a = as_vector(a)
    x = as_vector(x)
    y = as_vector(y)
    if not a.shape == x.shape == y.shape:
        raise InvalidArgumentError("vectors must share one length")
    for name, v in (("x", x), ("y", y)):
        if abs(float(np.linalg.norm(v)) - 1.0) > 1e-9:
            raise InvalidArgumentError(f"{name} must be unit norm within 1e-9")
    diff = x - y
    summ = x + y
    if not np.any(diff) or not np.any(summ):
        raise InvalidArgumentError("x = +/-y leaves the directions undefined")
    u = diff / np.linalg.norm(diff)
    v = summ / np.linalg.norm(summ)
    cu = float(np.dot(a, u))
    cv = float(np.dot(a, v))
    b = a - cu * u - cv * v
    recon = float(np.linalg.norm(a - (cu * u + cv * v + b)))
    return recon, abs(float(np.dot(b, u))), abs(float(np.dot(b, v)))


def gaussian_width_estimate(N: int, s: int, trials: int, seed: int) -> float:
    """Monte Carlo mean of the sparse dual norm of a standard Gaussian vector.

    Estimates the Gaussian width of the unit 2s-sparse ball (the norm of the
    top-2s magnitudes, averaged over draws).
    """
    if trials < 100:
        raise InvalidArgumentError("need trials >= 100")
    if not 1 <= s <= N:
        raise InvalidArgumentError("need 1 <= s <= N")
    rng = generator_for(seed)
    k = min(2 * s, N)
    total = 0.0
    remaining = trials
    batch = max(1, min(trials, 2**22 // max(N, 1)))
    while remaining > 0:
        rows = min(batch, remaining)
        h = np.abs(rng.standard_normal((rows, N)))
        top = np.partition(h, N - k, axis=1)[:, N - k:]
        total += float(np.sqrt((top * top).sum(axis=1)).sum())
        remaining -= rows
    return total / trials


def projection_inequality_check(samples: int, N: int, s: int, seed: int) -> float:
    """Search for violations of ||T_s(w) - z|| <= 2*dual_norm(w - z, s).

    z ranges over random s-sparse unit vectors and w over perturbations of z
    at scales from 1e-3 to 1e3, including disjoint-support and aligned
    corners. Returns the largest observed lhs - rhs (nonpositive up to
    rounding; the inequality is deterministic).
    """
    if samples < 1:
        raise InvalidArgumentError("samples must be >= 1")
    if not 1 <= s <= N:
        raise InvalidArgumentError("need 1 <= s <= N")
    rng = generator_for(seed)
    worst = -math.inf
    for k in range(samples):
        z = np.zeros(N)
        supp = rng.choice(N, size=s, replace=False)
        vals = rng.standard_normal(s)
        while not np.all(vals):
            vals = rng.standard_normal(s)
        z[supp] = vals / np.linalg.norm(vals)
        kind = k % 5
        scale = 10.0 ** rng.uniform(-3.0, 3.0)
        if kind == 0:
            w = z + 10.0 ** rng.uniform(-3.0, 1.0) * rng.standard_normal(N)
        elif kind == 1:
            w = z.copy()
            pert_supp = rng.choice(N, size=min(2 * s, N), replace=False)
            w[pert_supp] += scale * rng.standard_normal(pert_supp.size)
        elif kind == 2:
            w = np.zeros(N)
            pool = np.setdiff1d(np.arange(N), supp)
            if pool.size == 0:
                w = -scale * z
            else:
                far = rng.choice(pool, size=min(s, pool.size), replace=False)
                w[far] = scale * rng.standard_normal(far.size)
        elif kind == 3:
            w = rng.uniform(-2.0, 2.0) * scale * z
        else:
            w = rng.standard_normal(N)
        lhs = float(np.linalg.norm(hard_threshold(w, s) - z))
        rhs = 2.0 * sparse_dual_norm(w - z, s)
        worst = max(worst, lhs - rhs)
    return worst
