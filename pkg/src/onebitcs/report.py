"""Persistence and plotting: CSV records, key-value manifests, log-log SVG.

The CSV header is fixed; floats are written with repr so parsing them back is
exact. The manifest is a flat ``key = value`` text file (keys documented in
the README) sufficient to rerun the sweep bitwise. The SVG is self-contained
with log10 axes, one polyline per algorithm series, and a slope annotation
text node per fitted series.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

from .errors import InvalidArgumentError
from .harness import RunManifest, SweepConfig, SweepRecord, build_manifest, error_stat_by_m, fit_slope

CSV_HEADER = (
    "algorithm,m,N,s,trial_index,final_l2_error,iterations_used,"
    "sign_agreement,stop_reason,wall_time_ms"
)
CSV_FIELDS = CSV_HEADER.split(",")

_SERIES_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def write_records_csv(records: list[SweepRecord], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_FIELDS)
        for rec in records:
            writer.writerow(
                [
                    rec.algorithm,
                    rec.m,
                    rec.N,
                    rec.s,
                    rec.trial_index,
                    repr(rec.final_l2_error),
                    rec.iterations_used,
                    repr(rec.sign_agreement),
                    rec.stop_reason,
                    repr(rec.wall_time_ms),
                ]
            )
    return path


def read_records_csv(path) -> list[SweepRecord]:
    path = Path(path)
    records = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_FIELDS:
            raise InvalidArgumentError(f"unexpected CSV header in {path}")
        for row in reader:
            records.append(
                SweepRecord(
                    algorithm=row[0],
                    m=int(row[1]),
                    N=int(row[2]),
                    s=int(row[3]),
                    trial_index=int(row[4]),
                    final_l2_error=float(row[5]),
                    iterations_used=int(row[6]),
                    sign_agreement=float(row[7]),
                    stop_reason=row[8],
                    wall_time_ms=float(row[9]),
                )
            )
    return records


def _manifest_lines(manifest: RunManifest) -> list[str]:
    cfg = manifest.config
    lines = [
        "manifest_version = 1",
        f"created_utc = {manifest.created_utc}",
        f"package_version = {manifest.package_version}",
        f"numpy_version = {manifest.numpy_version}",
        f"rng.algorithm = {manifest.rng_algorithm}",
        f"rng.gaussian_transform = {manifest.gaussian_transform}",
        f"rng.substream_rule = {manifest.substream_rule}",
        f"config.n = {cfg.n}",
        f"config.s = {cfg.s}",
        f"config.m_grid = {','.join(str(m) for m in cfg.m_grid)}",
        f"config.algorithms = {','.join(cfg.algorithms)}",
        f"config.trials_per_cell = {cfg.trials_per_cell}",
        f"config.master_seed = {cfg.master_seed}",
        f"config.noise_std = {cfg.noise_std!r}",
        f"config.tau = {cfg.tau!r}",
        f"config.max_iters = {cfg.max_iters}",
        f"config.stop_tol = {cfg.stop_tol!r}",
        f"config.init = {cfg.init}",
        f"config.degenerate_policy = {cfg.degenerate_policy}",
        f"config.support_rule = {cfg.support_rule}",
        f"config.value_rule = {cfg.value_rule}",
    ]
    for key in sorted(manifest.constants):
        lines.append(f"constants.{key} = {manifest.constants[key]!r}")
    for (m, trial), seeds in sorted(manifest.cell_seeds.items()):
        for role in sorted(seeds):
            lines.append(f"cell.{m}.{trial}.{role} = {seeds[role]}")
    return lines


def write_manifest(manifest: RunManifest, path) -> Path:
    path = Path(path)
    path.write_text("\n".join(_manifest_lines(manifest)) + "\n")
    return path


def load_manifest(path) -> RunManifest:
    """Parse a manifest file back into a RunManifest (seeds are re-derived and checked)."""
    path = Path(path)
    if not path.exists():
        raise InvalidArgumentError(f"manifest not found: {path}")
    kv: dict[str, str] = {}
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InvalidArgumentError(f"malformed manifest line: {line!r}")
        key, value = line.split("=", 1)
        kv[key.strip()] = value.strip()
    try:
        cfg = SweepConfig(
            n=int(kv["config.n"]),
            s=int(kv["config.s"]),
            m_grid=tuple(int(v) for v in kv["config.m_grid"].split(",")),
            algorithms=tuple(kv["config.algorithms"].split(",")),
            trials_per_cell=int(kv["config.trials_per_cell"]),
            master_seed=int(kv["config.master_seed"]),
            noise_std=float(kv["config.noise_std"]),
            tau=float(kv["config.tau"]),
            max_iters=int(kv["config.max_iters"]),
            stop_tol=float(kv["config.stop_tol"]),
            init=kv["config.init"],
            degenerate_policy=kv["config.degenerate_policy"],
            support_rule=kv.get("config.support_rule", "uniform_random"),
            value_rule=kv.get("config.value_rule", "gaussian"),
        )
    except KeyError as exc:
        raise InvalidArgumentError(f"manifest {path} is missing key {exc}") from exc
    manifest = build_manifest(cfg)
    stored = {}
    for key, value in kv.items():
        if key.startswith("cell."):
            m, trial, role = key[len("cell."):].split(".", 2)
            stored.setdefault((int(m), int(trial)), {})[role] = int(value)
    if stored and stored != manifest.cell_seeds:
        raise InvalidArgumentError(f"stored cell seeds in {path} disagree with the config")
    return RunManifest(
        config=cfg,
        rng_algorithm=kv.get("rng.algorithm", manifest.rng_algorithm),
        gaussian_transform=kv.get("rng.gaussian_transform", manifest.gaussian_transform),
        substream_rule=kv.get("rng.substream_rule", manifest.substream_rule),
        numpy_version=kv.get("numpy_version", manifest.numpy_version),
        package_version=kv.get("package_version", manifest.package_version),
        constants=manifest.constants,
        created_utc=kv.get("created_utc", manifest.created_utc),
        cell_seeds=manifest.cell_seeds,
    )


def render_loglog_svg(
    series: dict[str, list[tuple[float, float]]],
    annotations: list[str] | None = None,
    theory_curve: list[tuple[float, float]] | None = None,
    title: str = "error vs m",
) -> str:
    """Self-contained SVG: log10 axes, one polyline per series."""
    width, height = 640, 480
    left, right, top, bottom = 70, 20, 40, 50
    plots = {name: [(x, y) for x, y in pts if x > 0 and y > 0] for name, pts in series.items()}
    plots = {name: pts for name, pts in plots.items() if pts}
    curves = dict(plots)
    if theory_curve:
        curves["theory"] = [(x, y) for x, y in theory_curve if x > 0 and y > 0]

    all_pts = [p for pts in curves.values() for p in pts]
    if not all_pts:
        raise InvalidArgumentError("nothing to plot")
    lx = [math.log10(p[0]) for p in all_pts]
    ly = [math.log10(p[1]) for p in all_pts]
    x_lo, x_hi = min(lx), max(lx)
    y_lo, y_hi = min(ly), max(ly)
    x_hi = x_hi if x_hi > x_lo else x_lo + 1.0
    y_hi = y_hi if y_hi > y_lo else y_lo + 1.0
    span_x = x_hi - x_lo
    span_y = y_hi - y_lo

    def px(x: float) -> float:
        return left + (math.log10(x) - x_lo) / span_x * (width - left - right)

    def py(y: float) -> float:
        return height - bottom - (math.log10(y) - y_lo) / span_y * (height - top - bottom)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="monospace" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.0f}" y="20" text-anchor="middle">{title}</text>',
        f'<line x1="{left}" y1="{height - bottom}" x2="{width - right}" y2="{height - bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{height - bottom}" stroke="black"/>',
        f'<text x="{width / 2:.0f}" y="{height - 12}" text-anchor="middle">log10 m</text>',
        f'<text x="16" y="{height / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {height / 2:.0f})">log10 error</text>',
    ]
    for tick in range(math.floor(x_lo), math.ceil(x_hi) + 1):
        if x_lo <= tick <= x_hi:
            x = left + (tick - x_lo) / span_x * (width - left - right)
            parts.append(
                f'<line x1="{x:.1f}" y1="{height - bottom}" x2="{x:.1f}" y2="{height - bottom + 5}" stroke="black"/>'
            )
            parts.append(
                f'<text x="{x:.1f}" y="{height - bottom + 18}" text-anchor="middle">{tick}</text>'
            )
    for tick in range(math.floor(y_lo), math.ceil(y_hi) + 1):
        if y_lo <= tick <= y_hi:
            y = height - bottom - (tick - y_lo) / span_y * (height - top - bottom)
            parts.append(f'<line x1="{left - 5}" y1="{y:.1f}" x2="{left}" y2="{y:.1f}" stroke="black"/>')
            parts.append(f'<text x="{left - 8}" y="{y + 4:.1f}" text-anchor="end">{tick}</text>')

    legend_y = top + 8
    for idx, (name, pts) in enumerate(sorted(curves.items())):
        color = "#555555" if name == "theory" else _SERIES_COLORS[idx % len(_SERIES_COLORS)]
        dash = ' stroke-dasharray="6 4"' if name == "theory" else ""
        coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in sorted(pts))
        parts.append(
            f'<polyline id="series-{name}" fill="none" stroke="{color}" stroke-width="1.5"{dash} '
            f'points="{coords}"/>'
        )
        parts.append(f'<text x="{width - right - 160}" y="{legend_y}" fill="{color}">{name}</text>')
        legend_y += 16
    for note in annotations or []:
        parts.append(f'<text class="slope-annotation" x="{left + 10}" y="{legend_y}">{note}</text>')
        legend_y += 16
    parts.append("</svg>")
    return "\n".join(parts)


def emit_report(
    records: list[SweepRecord],
    manifest: RunManifest,
    out_dir,
    error_stat: str = "median",
    theory_curve: list[tuple[float, float]] | None = None,
) -> dict[str, Path | None]:
    """Write records.csv, manifest.txt, and (when records exist) plot.svg."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        paths: dict[str, Path | None] = {
            "csv": write_records_csv(records, out_dir / "records.csv"),
            "manifest": write_manifest(manifest, out_dir / "manifest.txt"),
            "svg": None,
        }
        if records:
            algorithms = sorted({rec.algorithm for rec in records})
            series = {a: [(float(m), v) for m, v in error_stat_by_m(records, a, error_stat)] for a in algorithms}
            annotations = []
            for algo in algorithms:
                try:
                    slope, _, r2 = fit_slope(records, algo, error_stat)
                    annotations.append(f"{algo}: slope {slope:+.3f} (r2={r2:.3f})")
                except InvalidArgumentError:
                    pass  # fewer than 3 m values: plot without a fit
            svg = render_loglog_svg(
                series,
                annotations,
                theory_curve,
                title=f"{error_stat} error vs m (N={manifest.config.n}, s={manifest.config.s})",
            )
            svg_path = out_dir / "plot.svg"
            svg_path.write_text(svg)
            paths["svg"] = svg_path
        return paths
    except OSError as exc:
        raise OSError(f"cannot write report under {out_dir}: {exc}") from exc
