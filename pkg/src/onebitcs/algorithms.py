"""Reconstruction algorithms for one-bit and linear sparse recovery.

nbiht_run iterates
    z_{k+1} = x_k + (tau/m) A^T (b - sign(A x_k))
    x_{k+1} = normalize(hard_threshold(z_{k+1}, s))
from a unit s-sparse start. biht_run runs the same update without the sphere
normalization (a subgradient step for the sign-consistency objective) and
normalizes only the reported final estimate. iht_run is the classical linear
baseline x_{k+1} = hard_threshold(x_k + (1/m) A^T (y - A x_k), s), and
one_shot_estimate is the single gradient step from zero,
normalize(hard_threshold((tau/m) A^T b, s)).

Any iterate whose (quantized or linear) measurements already match the data is
a fixed point of the corresponding step map; runs stop there, on iterate
movement below stop_tol, on the iteration budget, or on a degenerate
(all-zero) thresholded iterate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateIterateError, InvalidArgumentError
from .model import BinaryObservation, MeasurementEnsemble, as_vector, gen_sparse_signal
from .sparse_ops import hamming_distance, hard_threshold, normalize

DEFAULT_TAU = math.sqrt(math.pi / 2.0)  # the step size making the first iterate unbiased

INIT_MODES = ("random_sparse", "matched_filter", "provided")
DEGENERATE_POLICIES = ("keep_previous", "fail")


@dataclass(frozen=True)
class AlgorithmConfig:
    """Shared knobs for the iterative reconstructions.

    tau is ignored by iht_run (the linear step is fixed at 1/m). stop_tol acts
    on iterate movement ||x_{k+1} - x_k||_2.
    """

    s: int
    tau: float = DEFAULT_TAU
    max_iters: int = 500
    stop_tol: float = 1e-10
    init: str = "random_sparse"
    init_seed: int = 0
    init_vector: np.ndarray | None = None
    degenerate_policy: str = "keep_previous"

    def __post_init__(self):
        if self.s < 1:
            raise InvalidArgumentError("s must be >= 1")
        if not self.tau > 0:
            raise InvalidArgumentError("tau must be positive")
        if self.max_iters < 1:
            raise InvalidArgumentError("max_iters must be >= 1")
        if self.stop_tol < 0:
            raise InvalidArgumentError("stop_tol must be nonnegative")
        if self.init not in INIT_MODES:
            raise InvalidArgumentError(f"unknown init {self.init!r}")
        if self.degenerate_policy not in DEGENERATE_POLICIES:
            raise InvalidArgumentError(f"unknown degenerate_policy {self.degenerate_policy!r}")
        if self.init == "provided" and self.init_vector is None:
            raise InvalidArgumentError("init='provided' needs init_vector")


@dataclass
class IterateTrace:
    """Per-iterate history of one run; all sequences share one length."""

    iterates: list[np.ndarray]
    sign_agreement: list[float]
    errors_vs_truth: list[float] | None
    stop_reason: str
    estimate: np.ndarray = field(default=None)  # unit final for nbiht/biht, raw for iht

    @property
    def final(self) -> np.ndarray:
        return self.iterates[-1]

    @property
    def iterations_used(self) -> int:
        return len(self.iterates) - 1

    @property
    def final_error(self) -> float | None:
        return self.errors_vs_truth[-1] if self.errors_vs_truth is not None else None


def _signs(matrix: np.ndarray, x: np.ndarray) -> np.ndarray:
    # x is s-sparse in the hot loop; gathering its support keeps the forward
    # product at m*s instead of m*N flops.
    nz = np.flatnonzero(x)
    if 0 < nz.size <= matrix.shape[1] // 8:
        y = matrix[:, nz] @ x[nz]
    else:
        y = matrix @ x
    return np.where(y > 0, 1.0, -1.0)


def _sign_gradient(matrix: np.ndarray, bits: np.ndarray, signs: np.ndarray) -> np.ndarray:
    # A^T (b - sign(A x)); the residual is sparse near sign consistency, so sum
    # only the disagreeing rows when few enough.
    residual = bits - signs
    rows = np.flatnonzero(residual)
    if rows.size == 0:
        return np.zeros(matrix.shape[1])
    if rows.size <= matrix.shape[0] // 8:
        return residual[rows] @ matrix[rows]
    return matrix.T @ residual


def _unwrap(A: MeasurementEnsemble, b) -> tuple[np.ndarray, np.ndarray]:
    matrix = A.matrix
    bits = b.bits if isinstance(b, BinaryObservation) else np.asarray(b, dtype=np.float64)
    if bits.shape != (matrix.shape[0],):
        raise InvalidArgumentError(
            f"observation length {bits.size} != ensemble m {matrix.shape[0]}"
        )
    return matrix, bits


def nbiht_step(
    A: MeasurementEnsemble,
    b,
    x_k,
    tau: float,
    s: int,
    degenerate_policy: str = "keep_previous",
) -> np.ndarray:
    """One normalized update from the unit s-sparse iterate x_k."""
    matrix, bits = _unwrap(A, b)
    x = as_vector(x_k)
    if x.shape != (matrix.shape[1],):
        raise InvalidArgumentError("iterate length does not match ensemble N")
    z = x + (tau / matrix.shape[0]) * _sign_gradient(matrix, bits, _signs(matrix, x))
    t = hard_threshold(z, s)
    if not np.any(t):
        if degenerate_policy == "fail":
            raise DegenerateIterateError("hard threshold produced the zero vector")
        return x.copy()
    return normalize(t)


def _initial_iterate(A: MeasurementEnsemble, b, cfg: AlgorithmConfig) -> np.ndarray:
    if cfg.init == "matched_filter":
        return one_shot_estimate(A, b, cfg.s, cfg.tau)
    if cfg.init == "provided":
        x0 = as_vector(cfg.init_vector)
        if x0.shape != (A.N,):
            raise InvalidArgumentError("init_vector length does not match ensemble N")
        if np.count_nonzero(x0) > cfg.s:
            raise InvalidArgumentError("init_vector is not s-sparse")
        if abs(float(np.linalg.norm(x0)) - 1.0) > 1e-9:
            raise InvalidArgumentError("init_vector must be unit norm within 1e-9")
        return x0.copy()
    return gen_sparse_signal(cfg.init_seed, A.N, cfg.s).values.copy()


def _binary_descent(
    A: MeasurementEnsemble,
    b,
    cfg: AlgorithmConfig,
    truth,
    normalized: bool,
) -> IterateTrace:
    matrix, bits = _unwrap(A, b)
    m = matrix.shape[0]
    truth_v = None if truth is None else as_vector(truth)

    x = _initial_iterate(A, b, cfg)
    signs = _signs(matrix, x)
    iterates = [x]
    agreement = [1.0 - hamming_distance(signs, bits)]
    errors = None if truth_v is None else [float(np.linalg.norm(x - truth_v))]

    stop_reason = "max_iters"
    for _ in range(cfg.max_iters):
        if np.array_equal(signs, bits):
            stop_reason = "converged"  # sign consistency: fixed point of the step map
            break
        z = x + (cfg.tau / m) * _sign_gradient(matrix, bits, signs)
        t = hard_threshold(z, cfg.s)
        if not np.any(t):
            if cfg.degenerate_policy == "fail":
                raise DegenerateIterateError("hard threshold produced the zero vector")
            stop_reason = "degenerate"
            break
        x_new = normalize(t) if normalized else t
        signs = _signs(matrix, x_new)
        iterates.append(x_new)
        agreement.append(1.0 - hamming_distance(signs, bits))
        if errors is not None:
            errors.append(float(np.linalg.norm(x_new - truth_v)))
        movement = float(np.linalg.norm(x_new - x))
        x = x_new
        if movement < cfg.stop_tol:
            stop_reason = "converged"
            break

    estimate = x if normalized else (normalize(x) if np.any(x) else x)
    return IterateTrace(iterates, agreement, errors, stop_reason, estimate)


def nbiht_run(A: MeasurementEnsemble, b, cfg: AlgorithmConfig, truth=None) -> IterateTrace:
    """Run the normalized iteration; every trace entry is unit and s-sparse."""
    return _binary_descent(A, b, cfg, truth, normalized=True)


def biht_run(A: MeasurementEnsemble, b, cfg: AlgorithmConfig, truth=None) -> IterateTrace:
    """Run the unnormalized iteration; only the reported estimate is normalized."""
    return _binary_descent(A, b, cfg, truth, normalized=False)


def iht_run(A: MeasurementEnsemble, y, cfg: AlgorithmConfig, truth=None) -> IterateTrace:
    """Classical hard-thresholding descent on linear measurements y = Ax."""
    matrix = A.matrix
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (matrix.shape[0],):
        raise InvalidArgumentError(f"measurement length {y.size} != ensemble m {matrix.shape[0]}")
    m = matrix.shape[0]
    truth_v = None if truth is None else as_vector(truth)
    b = np.where(y > 0, 1.0, -1.0)

    x = _initial_iterate(A, BinaryObservation(bits=b), cfg)
    iterates = [x]
    agreement = [1.0 - hamming_distance(_signs(matrix, x), b)]
    errors = None if truth_v is None else [float(np.linalg.norm(x - truth_v))]

    stop_reason = "max_iters"
    for _ in range(cfg.max_iters):
        residual = y - matrix @ x
        x_new = hard_threshold(x + matrix.T @ residual / m, cfg.s)
        movement = float(np.linalg.norm(x_new - x))
        if movement == 0.0:
            stop_reason = "converged"  # fixed point
            break
        iterates.append(x_new)
        agreement.append(1.0 - hamming_distance(_signs(matrix, x_new), b))
        if errors is not None:
            errors.append(float(np.linalg.norm(x_new - truth_v)))
        x = x_new
        if movement < cfg.stop_tol:
            stop_reason = "converged"
            break

    return IterateTrace(iterates, agreement, errors, stop_reason, estimate=x)


def one_shot_estimate(A: MeasurementEnsemble, b, s: int, tau: float = DEFAULT_TAU) -> np.ndarray:
    """Single-step linear estimator normalize(hard_threshold((tau/m) A^T b, s))."""
    matrix, bits = _unwrap(A, b)
    z = (tau / matrix.shape[0]) * (matrix.T @ bits)
    t = hard_threshold(z, s)
    if not np.any(t):
        raise DegenerateIterateError("one-shot estimate thresholded to zero")
    return normalize(t)
