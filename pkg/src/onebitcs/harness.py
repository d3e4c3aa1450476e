"""Seeded Monte Carlo sweeps over m, slope fitting, and the run manifest.

Each (m, trial) instance draws its signal, ensemble, and noise from substreams
of the master seed, so every algorithm in a cell sees the same instance
(paired comparison) and any execution order or worker count reproduces the
same records bitwise. Records are canonically sorted by
(algorithm, m, trial_index) before they are returned.
"""

from __future__ import annotations

import datetime as _dt
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__ as _pkg_version
from .algorithms import (
    DEFAULT_TAU,
    AlgorithmConfig,
    biht_run,
    iht_run,
    nbiht_run,
    one_shot_estimate,
)
from .errors import DegenerateIterateError, InvalidArgumentError, SamplingExhaustedError
from .model import SUPPORT_RULES, VALUE_RULES, gen_gaussian_matrix, gen_sparse_signal, sign_quantize
from .rng import GAUSSIAN_TRANSFORM, RNG_ALGORITHM, SUBSTREAM_RULE, generator_for, substream_seed
from .sparse_ops import hamming_distance
from .theory import ScheduleConstants

ALGORITHMS = ("biht", "iht", "nbiht", "one_shot")  # canonical order fixes seed roles

_ROLE_SIGNAL = 0
_ROLE_MATRIX = 1
_ROLE_NOISE = 2
_ROLE_INIT_BASE = 3


@dataclass(frozen=True)
class SweepConfig:
    """Grid and algorithm settings for one sweep."""

    n: int
    s: int
    m_grid: tuple[int, ...]
    algorithms: tuple[str, ...]
    trials_per_cell: int
    master_seed: int
    noise_std: float = 0.0
    tau: float = DEFAULT_TAU
    max_iters: int = 500
    stop_tol: float = 1e-10
    init: str = "random_sparse"
    degenerate_policy: str = "keep_previous"
    support_rule: str = "uniform_random"
    value_rule: str = "gaussian"

    def __post_init__(self):
        object.__setattr__(self, "m_grid", tuple(int(m) for m in self.m_grid))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        if not 1 <= self.s <= self.n:
            raise InvalidArgumentError("need 1 <= s <= n")
        if not self.m_grid or any(m < 1 for m in self.m_grid):
            raise InvalidArgumentError("m_grid must hold positive integers")
        if any(b <= a for a, b in zip(self.m_grid, self.m_grid[1:])):
            raise InvalidArgumentError("m_grid must be strictly increasing")
        if self.trials_per_cell < 1:
            raise InvalidArgumentError("trials_per_cell must be >= 1")
        if not self.algorithms:
            raise InvalidArgumentError("need at least one algorithm")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise InvalidArgumentError(f"unknown algorithms: {sorted(unknown)}")
        if self.noise_std < 0:
            raise InvalidArgumentError("noise_std must be nonnegative")
        if self.support_rule not in SUPPORT_RULES:
            raise InvalidArgumentError(f"unknown support_rule {self.support_rule!r}")
        if self.value_rule not in VALUE_RULES:
            raise InvalidArgumentError(f"unknown value_rule {self.value_rule!r}")


@dataclass(frozen=True)
class SweepRecord:
    """One (algorithm, m, trial) outcome row."""

    algorithm: str
    m: int
    N: int
    s: int
    trial_index: int
    final_l2_error: float
    iterations_used: int
    sign_agreement: float
    stop_reason: str
    wall_time_ms: float

    def comparable(self) -> tuple:
        """All fields except wall_time_ms (excluded from reproducibility)."""
        return (
            self.algorithm,
            self.m,
            self.N,
            self.s,
            self.trial_index,
            self.final_l2_error,
            self.iterations_used,
            self.sign_agreement,
            self.stop_reason,
        )


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce a sweep's records bitwise."""

    config: SweepConfig
    rng_algorithm: str
    gaussian_transform: str
    substream_rule: str
    numpy_version: str
    package_version: str
    constants: dict
    created_utc: str
    cell_seeds: dict  # (m, trial) -> {"signal": int, "matrix": int, "noise": int, "init.<algo>": int}


def cell_seed_table(cfg: SweepConfig, m_index: int, trial: int) -> dict[str, int]:
    """Derived substream seeds for one (m, trial) instance.

    The instance streams depend only on (master_seed, instance index), so all
    algorithms in the cell share the drawn (x, A, noise); each algorithm gets
    its own init stream at a role fixed by the canonical algorithm order.
    """
    instance = m_index * cfg.trials_per_cell + trial
    seeds = {
        "signal": substream_seed(cfg.master_seed, instance, _ROLE_SIGNAL),
        "matrix": substream_seed(cfg.master_seed, instance, _ROLE_MATRIX),
        "noise": substream_seed(cfg.master_seed, instance, _ROLE_NOISE),
    }
    for algo in cfg.algorithms:
        role = _ROLE_INIT_BASE + ALGORITHMS.index(algo)
        seeds[f"init.{algo}"] = substream_seed(cfg.master_seed, instance, role)
    return seeds


def build_manifest(cfg: SweepConfig, constants: ScheduleConstants | None = None) -> RunManifest:
    constants = constants or ScheduleConstants()
    cells = {}
    for m_index, m in enumerate(cfg.m_grid):
        for trial in range(cfg.trials_per_cell):
            cells[(m, trial)] = cell_seed_table(cfg, m_index, trial)
    return RunManifest(
        config=cfg,
        rng_algorithm=RNG_ALGORITHM,
        gaussian_transform=GAUSSIAN_TRANSFORM,
        substream_rule=SUBSTREAM_RULE,
        numpy_version=np.__version__,
        package_version=_pkg_version,
        constants=dict(constants.as_dict(), c10_is_placeholder_derived=constants.c10_is_placeholder_derived),
        created_utc=_dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        cell_seeds=cells,
    )


def _sphere_error(estimate: np.ndarray, truth: np.ndarray) -> float:
    norm = float(np.linalg.norm(estimate))
    unit = estimate / norm if norm > 0 else estimate
    return float(np.linalg.norm(unit - truth))


def _run_cell(cfg: SweepConfig, m: int, trial: int, seeds: dict[str, int]) -> list[SweepRecord]:
    x = gen_sparse_signal(seeds["signal"], cfg.n, cfg.s, cfg.support_rule, cfg.value_rule)
    A = gen_gaussian_matrix(seeds["matrix"], m, cfg.n)
    lin = A.matrix @ x.values
    if cfg.noise_std > 0:
        lin = lin + generator_for(seeds["noise"]).normal(0.0, cfg.noise_std, size=m)
    b = sign_quantize(lin)

    records = []
    for algo in sorted(cfg.algorithms):
        algo_cfg = AlgorithmConfig(
            s=cfg.s,
            tau=cfg.tau,
            max_iters=cfg.max_iters,
            stop_tol=cfg.stop_tol,
            init=cfg.init,
            init_seed=seeds[f"init.{algo}"],
            degenerate_policy=cfg.degenerate_policy,
        )
        start = time.perf_counter()
        try:
            if algo == "one_shot":
                estimate = one_shot_estimate(A, b, cfg.s, cfg.tau)
                error = _sphere_error(estimate, x.values)
                agreement = 1.0 - hamming_distance(sign_quantize(A.matrix @ estimate), b)
                iterations, reason = 1, "one_shot"
            else:
                run = {"nbiht": nbiht_run, "biht": biht_run}.get(algo)
                trace = (
                    run(A, b, algo_cfg, truth=x)
                    if run is not None
                    else iht_run(A, lin, algo_cfg, truth=x)
                )
                error = _sphere_error(trace.estimate, x.values)
                agreement = trace.sign_agreement[-1]
                iterations, reason = trace.iterations_used, trace.stop_reason
        except (DegenerateIterateError, SamplingExhaustedError) as exc:
            # a failed cell is recorded, never fatal to the sweep
            error, agreement, iterations, reason = 2.0, 0.0, 0, f"error: {exc}"
        wall_ms = (time.perf_counter() - start) * 1e3
        records.append(
            SweepRecord(
                algorithm=algo,
                m=m,
                N=cfg.n,
                s=cfg.s,
                trial_index=trial,
                final_l2_error=error,
                iterations_used=iterations,
                sign_agreement=agreement,
                stop_reason=reason,
                wall_time_ms=wall_ms,
            )
        )
    return records


def _run_cell_task(task) -> list[SweepRecord]:
    cfg, m, trial, seeds = task
    return _run_cell(cfg, m, trial, seeds)


def run_sweep(
    cfg: SweepConfig,
    workers: int = 1,
    constants: ScheduleConstants | None = None,
) -> tuple[list[SweepRecord], RunManifest]:
    """Execute all (algorithm, m, trial) cells; return sorted records + manifest."""
    manifest = build_manifest(cfg, constants)
    tasks = [
        (cfg, m, trial, manifest.cell_seeds[(m, trial)])
        for m in cfg.m_grid
        for trial in range(cfg.trials_per_cell)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_cell = list(pool.map(_run_cell_task, tasks, chunksize=1))
    else:
        per_cell = [_run_cell_task(t) for t in tasks]
    records = [rec for cell in per_cell for rec in cell]
    records.sort(key=lambda r: (r.algorithm, r.m, r.trial_index))
    return records, manifest


def run_from_manifest(
    manifest: RunManifest, workers: int = 1
) -> tuple[list[SweepRecord], RunManifest]:
    """Re-execute a sweep from its manifest; records must match bitwise."""
    cfg = manifest.config
    rederived = build_manifest(cfg).cell_seeds
    if rederived != manifest.cell_seeds:
        raise InvalidArgumentError("manifest cell seeds do not match the declared config")
    return run_sweep(cfg, workers=workers)


def fit_slope(
    records: list[SweepRecord], algorithm: str, error_stat: str = "median"
) -> tuple[float, float, float]:
    """OLS fit of log(error statistic per m) against log(m).

    Returns (slope, intercept, r_squared). Needs at least 3 distinct m values
    and strictly positive statistics.
    """
    if error_stat not in ("median", "mean"):
        raise InvalidArgumentError(f"unknown error_stat {error_stat!r}")
    by_m: dict[int, list[float]] = {}
    for rec in records:
        if rec.algorithm == algorithm:
            by_m.setdefault(rec.m, []).append(rec.final_l2_error)
    if len(by_m) < 3:
        raise InvalidArgumentError("need records at >= 3 distinct m values")
    stat = np.median if error_stat == "median" else np.mean
    ms = sorted(by_m)
    values = np.array([stat(by_m[m]) for m in ms], dtype=float)
    if np.any(values <= 0):
        raise InvalidArgumentError("error statistic must be positive for a log-log fit")
    xs = np.log(np.array(ms, dtype=float))
    ys = np.log(values)
    slope, intercept = np.polyfit(xs, ys, 1)
    fitted = slope * xs + intercept
    ss_res = float(np.sum((ys - fitted) ** 2))
    ss_tot = float(np.sum((ys - np.mean(ys)) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 and ss_res == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), float(r_squared)


def error_stat_by_m(
    records: list[SweepRecord], algorithm: str, error_stat: str = "median"
) -> list[tuple[int, float]]:
    """(m, statistic) series for one algorithm, ordered by m."""
    by_m: dict[int, list[float]] = {}
    for rec in records:
        if rec.algorithm == algorithm:
            by_m.setdefault(rec.m, []).append(rec.final_l2_error)
    stat = np.median if error_stat == "median" else np.mean
    return [(m, float(stat(by_m[m]))) for m in sorted(by_m)]


def manifest_config_dict(manifest: RunManifest) -> dict:
    """Flat dict of the manifest's config snapshot (for text serialization)."""
    return asdict(manifest.config)
