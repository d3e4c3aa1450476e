"""Domain types and the one-bit measurement model b = sign(Ax).

Sign convention: sign(w) = +1 for w > 0 and -1 otherwise, including w = 0.
All generated arrays are frozen (read-only) after construction; every
constructor is a pure function of its seed and parameters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError
from .rng import generator_for


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.flags.writeable = False
    return a


def as_vector(x) -> np.ndarray:
    """Unwrap SparseVector/UnitSparseVector/array-likes to a float64 vector."""
    if isinstance(x, UnitSparseVector):
        x = x.inner
    if isinstance(x, SparseVector):
        return x.values
    return np.asarray(x, dtype=np.float64)


@dataclass(frozen=True)
class SparseVector:
    """Length-N real vector with at most ``sparsity_budget`` nonzero entries."""

    values: np.ndarray
    sparsity_budget: int

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        if self.sparsity_budget < 1:
            raise InvalidArgumentError("sparsity_budget must be >= 1")
        if self.values.ndim != 1 or self.values.size < self.sparsity_budget:
            raise InvalidArgumentError("need a 1-d vector with N >= sparsity_budget")
        nnz = int(np.count_nonzero(self.values))
        if nnz > self.sparsity_budget:
            raise InvalidArgumentError(
                f"{nnz} nonzeros exceed sparsity budget {self.sparsity_budget}"
            )

    @property
    def n(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class UnitSparseVector:
    """SparseVector constrained to the unit sphere (1e-12 relative tolerance)."""

    inner: SparseVector

    def __post_init__(self):
        norm = float(np.linalg.norm(self.inner.values))
        if abs(norm - 1.0) > 1e-12:
            raise InvalidArgumentError(f"vector norm {norm!r} is not 1 within 1e-12")

    @property
    def values(self) -> np.ndarray:
        return self.inner.values

    @property
    def sparsity_budget(self) -> int:
        return self.inner.sparsity_budget

    @property
    def n(self) -> int:
        return self.inner.n


@dataclass(frozen=True)
class MeasurementEnsemble:
    """m x N matrix of i.i.d. standard Gaussian entries plus its seed.

    Rows are the measurement vectors. Regenerating from the same (seed, m, N)
    yields a bitwise-identical matrix.
    """

    matrix: np.ndarray
    seed: int
    m: int = field(default=-1)
    N: int = field(default=-1)

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))
        if self.matrix.ndim != 2:
            raise InvalidArgumentError("matrix must be 2-d")
        m, n = self.matrix.shape
        object.__setattr__(self, "m", m if self.m == -1 else self.m)
        object.__setattr__(self, "N", n if self.N == -1 else self.N)
        if (self.m, self.N) != self.matrix.shape:
            raise InvalidArgumentError("declared (m, N) disagree with matrix shape")
        if self.m < 1 or self.N < 1:
            raise InvalidArgumentError("m and N must be >= 1")


@dataclass(frozen=True)
class BinaryObservation:
    """Length-m vector of quantized measurements, entries exactly -1 or +1."""

    bits: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "bits", _frozen(self.bits))
        if self.bits.ndim != 1:
            raise InvalidArgumentError("bits must be 1-d")
        if not np.all(np.abs(self.bits) == 1.0):
            raise InvalidArgumentError("bits must contain only -1 and +1")

    @property
    def m(self) -> int:
        return self.bits.size


def gen_gaussian_matrix(seed: int, m: int, N: int) -> MeasurementEnsemble:
    """Draw an m x N standard Gaussian ensemble from the named generator."""
    if m < 1 or N < 1:
        raise InvalidArgumentError(f"matrix dimensions must be positive, got m={m}, N={N}")
    matrix = generator_for(seed).standard_normal((m, N))
    return MeasurementEnsemble(matrix=matrix, seed=int(seed))


SUPPORT_RULES = ("uniform_random", "first_s")
VALUE_RULES = ("gaussian", "rademacher", "flat")


def gen_sparse_signal(
    seed: int,
    N: int,
    s: int,
    support_rule: str = "uniform_random",
    value_rule: str = "gaussian",
) -> UnitSparseVector:
    """Draw a unit-norm signal with exactly s nonzeros on the chosen support."""
    if not 1 <= s <= N:
        raise InvalidArgumentError(f"need 1 <= s <= N, got s={s}, N={N}")
    if support_rule not in SUPPORT_RULES:
        raise InvalidArgumentError(f"unknown support_rule {support_rule!r}")
    if value_rule not in VALUE_RULES:
        raise InvalidArgumentError(f"unknown value_rule {value_rule!r}")
    rng = generator_for(seed)
    if support_rule == "first_s":
        support = np.arange(s)
    else:
        support = np.sort(rng.choice(N, size=s, replace=False))
    if value_rule == "flat":
        vals = np.ones(s)
    elif value_rule == "rademacher":
        vals = rng.integers(0, 2, size=s) * 2.0 - 1.0
    else:
        vals = rng.standard_normal(s)
        while np.any(vals == 0.0):  # keep exactly s nonzeros
            vals = rng.standard_normal(s)
    out = np.zeros(N)
    out[support] = vals / np.linalg.norm(vals)
    return UnitSparseVector(SparseVector(values=out, sparsity_budget=s))


def sign_quantize(v) -> BinaryObservation:
    """Elementwise one-bit quantizer: +1 where v > 0, -1 otherwise (0 -> -1)."""
    v = np.asarray(v, dtype=np.float64)
    return BinaryObservation(bits=np.where(v > 0, 1.0, -1.0))


def linear_measurements(
    A: MeasurementEnsemble, x, noise_std: float = 0.0, noise_seed: int = 0
) -> np.ndarray:
    """Pre-quantization measurements Ax + eps with eps ~ N(0, noise_std^2).

    eps is identically zero when noise_std == 0 (no draw is consumed).
    """
    x = as_vector(x)
    if x.shape != (A.N,):
        raise InvalidArgumentError(f"signal length {x.size} != ensemble N {A.N}")
    if noise_std < 0:
        raise InvalidArgumentError("noise_std must be nonnegative")
    y = A.matrix @ x
    if noise_std > 0:
        y = y + generator_for(noise_seed).normal(0.0, noise_std, size=A.m)
    return y


def measure(A: MeasurementEnsemble, x, noise_std: float = 0.0, noise_seed: int = 0) -> BinaryObservation:
    """Quantized measurements sign(Ax + eps); scale-invariant in x when noiseless."""
    return sign_quantize(linear_measurements(A, x, noise_std, noise_seed))
