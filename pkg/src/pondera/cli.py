"""Command-line entry point: single-point evaluation, sweeps, figure recipes.

Outputs are plain files for post-hoc analysis: RFC-4180 CSV grids, a
manifest.json sufficient to re-run the command, and self-contained SVG
plots when requested.  Exit codes: 0 ok, 2 usage/validation error,
3 unstable-only results.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import asdict
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .params import ConfigError, PhysicalConfig, config_from_dict, derive_rates
from .sweeps import (
    CompareResult,
    MetricGrid,
    SweepAxis,
    compare_conventional,
    evaluate_single,
    noise_ratio_map,
    sweep_angles,
    sweep_frequency,
    sweep_strength,
)

FIGURES = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7")
PLOT_METRICS = ("e_n", "duan_a1", "duan_opt", "genoni_delta", "delta_diff",
                "kappa_paper", "kappa_diff", "noise_ratio")
EXIT_OK = 0
EXIT_USAGE = 2
EXIT_UNSTABLE = 3


def recipe_text(name: str) -> str:
    """Raw JSON text of a bundled recipe config."""
    return resources.files("pondera").joinpath(f"recipes/{name}").read_text()


def _parse_axis(spec: str, name: str, unit: str, scale: float = 1.0) -> SweepAxis:
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"axis '{name}' must be start:stop:count (got {spec!r})")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ValueError(f"axis '{name}': {exc}") from exc
    if count < 1:
        raise ValueError(f"axis '{name}' needs count >= 1 (got {count})")
    if count == 1:
        values = (start * scale,)
    else:
        values = tuple(float(v) * scale for v in np.linspace(start, stop, count))
    return SweepAxis(name, values, unit)


def _apply_override(doc: dict, assignment: str) -> None:
    """Apply one dotted-path --set assignment (JSON value; null deletes)."""
    if "=" not in assignment:
        raise ValueError(f"--set expects key=value (got {assignment!r})")
    key, raw = assignment.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw  # bare strings allowed
    node = doc
    tokens = key.strip().split(".")

    def descend(n, tok):
        name, idx = tok, None
        if tok.endswith("]") and "[" in tok:
            name, rest = tok.split("[", 1)
            idx = int(rest[:-1])
        if name:
            if name not in n:
                raise ValueError(f"--set path {key!r}: unknown key {name!r}")
            n = n[name]
        if idx is not None:
            if not isinstance(n, list) or idx >= len(n):
                raise ValueError(f"--set path {key!r}: bad index in {tok!r}")
            n = n[idx]
        return n

    for tok in tokens[:-1]:
        node = descend(node, tok)
    last = tokens[-1]
    if last.endswith("]") and "[" in last:
        name, rest = last.split("[", 1)
        idx = int(rest[:-1])
        target = node[name] if name else node
        if value is None:
            target[idx] = None
        else:
            target[idx] = value
    else:
        if value is None:
            node.pop(last, None)
        else:
            node[last] = value


def load_config_doc(args) -> tuple[dict, PhysicalConfig]:
    path = Path(args.config)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    # convenience flags desugar to overrides, applied before --set
    if getattr(args, "r", None) is not None:
        for j in (0, 1):
            _apply_override(doc, f"squeezers[{j}].r={args.r}")
            _apply_override(doc, f"squeezers[{j}].mu=null")
            _apply_override(doc, f"squeezers[{j}].pump_power_W=null")
    if getattr(args, "temp", None) is not None:
        _apply_override(doc, f"temperature_K={args.temp}")
    for assignment in args.set or []:
        _apply_override(doc, assignment)
    return doc, config_from_dict(doc, lenient=args.lenient)


def config_hash(doc: dict) -> str:
    canonical = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def write_grid_csv(grid: MetricGrid, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in grid.csv_rows():
            writer.writerow(row)


def _plot_grid(grid: MetricGrid, out_dir: Path, prefix: str = "") -> list[dict]:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    entries = []
    cmap = "viridis"
    for metric in PLOT_METRICS:
        data = grid.column(metric)
        data = np.where(np.isfinite(data), data, np.nan)
        if np.all(np.isnan(data)):
            continue
        fname = f"{prefix}{metric}.svg"
        fig, ax = plt.subplots(figsize=(5.0, 4.0))
        if len(grid.axes) == 2:
            x = grid.axes[1].values
            y = grid.axes[0].values
            im = ax.pcolormesh(x, y, data, cmap=cmap, shading="nearest")
            fig.colorbar(im, ax=ax, label=metric)
            ax.set_xlabel(f"{grid.axes[1].name} [{grid.axes[1].unit}]")
            ax.set_ylabel(f"{grid.axes[0].name} [{grid.axes[0].unit}]")
            scale = {"vmin": float(np.nanmin(data)), "vmax": float(np.nanmax(data))}
        else:
            ax.plot(grid.axes[0].values, data)
            if grid.axes[0].name.startswith("omega"):
                ax.set_xscale("log")
            ax.set_xlabel(f"{grid.axes[0].name} [{grid.axes[0].unit}]")
            ax.set_ylabel(metric)
            scale = {"ymin": float(np.nanmin(data)), "ymax": float(np.nanmax(data))}
        ax.set_title(f"{metric} ({grid.kind})")
        fig.tight_layout()
        fig.savefig(out_dir / fname, format="svg", metadata={"Date": None})
        plt.close(fig)
        entries.append({"file": fname, "metric": metric, "colormap": cmap, **scale})
    return entries


def _plot_compare(result: CompareResult, out_dir: Path) -> list[dict]:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    entries = []
    for metric in ("e_n", "duan_a1", "duan_opt"):
        fname = f"compare_{metric}.svg"
        fig, ax = plt.subplots(figsize=(5.0, 4.0))
        for arm, grid in result.grids().items():
            ax.plot(grid.axes[0].values, grid.column(metric), label=arm)
        ax.set_xlabel("mu [W^-1/2]")
        ax.set_ylabel(metric)
        ax.legend()
        fig.tight_layout()
        fig.savefig(out_dir / fname, format="svg", metadata={"Date": None})
        plt.close(fig)
        entries.append({"file": fname, "metric": metric, "colormap": None})
    return entries


def write_manifest(out_dir: Path, *, argv, doc, seed, outputs, plots,
                   analysis_omega, wall_clock) -> None:
    manifest = {
        "command": " ".join(["pondera"] + list(argv)),
        "argv": list(argv),
        "engine_version": __version__,
        "backend": kernels.backend_name(),
        "seed": seed,
        "config_hash": config_hash(doc),
        "config": doc,
        "analysis_omega_rad_s": analysis_omega,
        "wall_clock_s": wall_clock,
        "outputs": outputs,
        "plots": plots,
    }
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    return int(os.environ.get("PONDERA_SEED", "0"))


def cmd_point(args, argv) -> int:
    doc, cfg = load_config_doc(args)
    omega = 2 * math.pi * args.omega_hz if args.omega_hz is not None else None
    record, omega_used = evaluate_single(cfg, omega=omega, noise_mode=args.noise_mode)
    payload = asdict(record)
    payload.pop("coords")
    payload.update({
        "analysis_omega_rad_s": omega_used,
        "engine_version": __version__,
        "backend": kernels.backend_name(),
        "config_hash": config_hash(doc),
    })
    text = json.dumps(payload, indent=2)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n")
    return EXIT_OK if record.stable else EXIT_UNSTABLE


def _sweep_grids(args, cfg, seed) -> tuple[dict[str, MetricGrid], float | None]:
    kind = args.kind
    threads = args.threads
    mode = args.noise_mode
    if kind in ("angles", "noise-ratio"):
        if not (args.theta1 and args.theta2):
            raise ValueError(f"sweep {kind} requires --theta1 and --theta2")
        ax1 = _parse_axis(args.theta1, "theta1", "rad")
        ax2 = _parse_axis(args.theta2, "theta2", "rad")
        fn = sweep_angles if kind == "angles" else noise_ratio_map
        grid = fn(cfg, ax1, ax2, threads=threads, seed=seed, noise_mode=mode)
        return {"grid": grid}, grid.analysis_omega
    if kind == "strength":
        if not args.mu:
            raise ValueError("sweep strength requires --mu")
        ax = _parse_axis(args.mu, "mu", "W^-1/2")
        grid = sweep_strength(cfg, ax, threads=threads, seed=seed, noise_mode=mode)
        return {"grid": grid}, grid.analysis_omega
    if kind == "frequency":
        if not args.omega:
            raise ValueError("sweep frequency requires --omega (Hz)")
        ax = _parse_axis(args.omega, "omega_rad_s", "rad/s", scale=2 * math.pi)
        grid = sweep_frequency(cfg, ax, threads=threads, seed=seed, noise_mode=mode)
        return {"grid": grid}, None
    if kind == "compare":
        if not args.mu:
            raise ValueError("sweep compare requires --mu")
        ax = _parse_axis(args.mu, "mu", "W^-1/2")
        result = compare_conventional(cfg, ax, coupling_ppm=args.coupling_ppm,
                                      threads=threads, seed=seed, noise_mode=mode)
        grids = {f"grid_{k}": v for k, v in result.grids().items()}
        return grids, result.omc_lossless.analysis_omega
    raise ValueError(f"unknown sweep kind {kind!r}")


def cmd_sweep(args, argv) -> int:
    t0 = time.monotonic()
    seed = _resolve_seed(args)
    doc, cfg = load_config_doc(args)
    grids, analysis_omega = _sweep_grids(args, cfg, seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = []
    plots = []
    for name, grid in grids.items():
        fname = f"{name}.csv"
        write_grid_csv(grid, out_dir / fname)
        outputs.append(fname)
        if args.plot:
            prefix = "" if len(grids) == 1 else f"{name}_"
            plots.extend(_plot_grid(grid, out_dir, prefix))
    write_manifest(out_dir, argv=argv, doc=doc, seed=seed,
                   outputs=outputs, plots=plots, analysis_omega=analysis_omega,
                   wall_clock=time.monotonic() - t0)
    all_unstable = all(not r.stable for g in grids.values() for r in g.records)
    return EXIT_UNSTABLE if all_unstable else EXIT_OK


def _angle_axis(name: str, count: int, span: float = 2 * math.pi) -> SweepAxis:
    step = span / count
    return SweepAxis(name, tuple(i * step for i in range(count)), "rad")


def _gaussianity_angles(cfg, threads, seed) -> tuple[float, float]:
    """Angles where input squeezing most increases output Gaussianity."""
    ax1 = _angle_axis("theta1", 16, math.pi)
    ax2 = _angle_axis("theta2", 16, math.pi)
    grid = sweep_angles(cfg, ax1, ax2, threads=threads, seed=seed)
    dd = grid.column("delta_diff")
    i, j = np.unravel_index(int(np.nanargmin(dd)), dd.shape)
    return ax1.values[i], ax2.values[j]


def cmd_reproduce(args, argv) -> int:
    t0 = time.monotonic()
    seed = _resolve_seed(args)
    fig = args.figure
    threads = args.threads
    out_dir = Path(args.out_dir if args.out_dir else f"reproduce_{fig}")
    out_dir.mkdir(parents=True, exist_ok=True)
    recipes = {
        "fig2": "table1.json", "fig3": "fig3.json", "fig4": "table1.json",
        "fig5": "table1.json", "fig6": "fig6.json", "fig7": "fig7.json",
    }
    doc = json.loads(recipe_text(recipes[fig]))
    cfg = config_from_dict(doc)
    analysis_omega = None
    plots = []
    outputs = []

    def emit(name: str, grid: MetricGrid, prefix: str = "") -> None:
        fname = f"{name}.csv"
        write_grid_csv(grid, out_dir / fname)
        outputs.append(fname)
        plots.extend(_plot_grid(grid, out_dir, prefix))

    if fig in ("fig2", "fig3", "fig4"):
        n = 32 if fig == "fig3" else 64
        ax1 = _angle_axis("theta1", n)
        ax2 = _angle_axis("theta2", n)
        fn = noise_ratio_map if fig == "fig4" else sweep_angles
        grid = fn(cfg, ax1, ax2, threads=threads, seed=seed)
        analysis_omega = grid.analysis_omega
        emit("grid", grid)
    elif fig == "fig5":
        ax = SweepAxis("mu", tuple(float(v) for v in np.linspace(0.0, 30.0, 31)),
                       "W^-1/2")
        result = compare_conventional(cfg, ax, threads=threads, seed=seed)
        analysis_omega = result.omc_lossless.analysis_omega
        for arm, grid in result.grids().items():
            fname = f"grid_{arm}.csv"
            write_grid_csv(grid, out_dir / fname)
            outputs.append(fname)
        plots.extend(_plot_compare(result, out_dir))
    elif fig == "fig6":
        th1, th2 = _gaussianity_angles(cfg, threads, seed)
        sqz = [dict(s, theta_rad=t) for s, t in zip(doc["squeezers"], (th1, th2))]
        cfg = config_from_dict(dict(doc, squeezers=sqz))
        gamma_c = derive_rates(cfg).gamma_c
        omegas = tuple(float(v) for v in np.geomspace(gamma_c * 1e-5, gamma_c * 10, 81))
        grid = sweep_frequency(cfg, SweepAxis("omega_rad_s", omegas, "rad/s"),
                               threads=threads, seed=seed)
        emit("grid", grid)
    elif fig == "fig7":
        th1, th2 = _gaussianity_angles(cfg, threads, seed)
        ax = SweepAxis("mu", tuple(float(v) for v in np.linspace(0.0, 50.0, 51)),
                       "W^-1/2")
        grid = sweep_strength(cfg, ax, theta_fixed=(th1, th2),
                              threads=threads, seed=seed)
        analysis_omega = grid.analysis_omega
        emit("grid", grid)

    write_manifest(out_dir, argv=argv, doc=doc, seed=seed, outputs=outputs,
                   plots=plots, analysis_omega=analysis_omega,
                   wall_clock=time.monotonic() - t0)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pondera",
        description="Squeezed-light ponderomotive optomechanics simulator")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", required=True,
                       help="path to a JSON config document")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="dotted-path config override, e.g. squeezers[0].r=0")
        p.add_argument("--lenient", action="store_true",
                       help="ignore unknown config keys")
        p.add_argument("--r", type=float, default=None,
                       help="set both squeezers' strength r")
        p.add_argument("--temp", type=float, default=None,
                       help="set the temperature in K")
        p.add_argument("--noise-mode", default="sideband_squeezed",
                       choices=["sideband_squeezed", "paper_literal"])
        p.add_argument("--seed", type=int, default=None,
                       help="RNG seed (default: $PONDERA_SEED or 0)")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads for grid evaluation")

    p_point = sub.add_parser("point", help="evaluate one configuration")
    add_common(p_point)
    p_point.add_argument("--omega-hz", type=float, default=None,
                         help="analysis sideband frequency in Hz (default: auto)")
    p_point.add_argument("--out", help="also write the record to this JSON file")
    p_point.set_defaults(func=cmd_point)

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep")
    p_sweep.add_argument("kind", choices=["angles", "strength", "frequency",
                                          "noise-ratio", "compare"])
    add_common(p_sweep)
    p_sweep.add_argument("--theta1", help="axis start:stop:count (rad)")
    p_sweep.add_argument("--theta2", help="axis start:stop:count (rad)")
    p_sweep.add_argument("--mu", help="axis start:stop:count (W^-1/2)")
    p_sweep.add_argument("--omega", help="axis start:stop:count (Hz)")
    p_sweep.add_argument("--coupling-ppm", type=float, default=50.0,
                         help="input-coupling of the lossy compare arm (ppm)")
    p_sweep.add_argument("--out-dir", default="pondera_out")
    p_sweep.add_argument("--plot", action="store_true",
                         help="write per-metric SVG plots")
    p_sweep.set_defaults(func=cmd_sweep)

    p_rep = sub.add_parser("reproduce", help="run a canned figure recipe")
    p_rep.add_argument("figure", choices=list(FIGURES))
    p_rep.add_argument("--out-dir", default=None)
    p_rep.add_argument("--seed", type=int, default=None)
    p_rep.add_argument("--threads", type=int, default=None)
    p_rep.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, argv)
    except (ConfigError, ValueError) as exc:
        print(f"pondera: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
