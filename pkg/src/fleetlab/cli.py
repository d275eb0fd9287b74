"""Command-line front door: simulate | analyze | causal | econ | all.

Artifacts are plain CSV/JSON written with 6-significant-digit floats and LF
line endings, so repeated runs with the same config and seed are
byte-identical. The exit code doubles as the acceptance gate: nonzero iff
any tolerance check fails.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
from pathlib import Path

import pandas as pd

from . import __version__
from .config import ConfigError, SimConfig, config_hash, load_config, spawn_stream
from .economics import build_econ_report
from .engine import PanelDataset, run_cross_sectional, run_staggered_rollout
from .fleet import OperationalMode, fleet_frame, make_fleet
from .causal import heterogeneity, run_causal_suite
from .report import (
    PROFILES,
    collect_failures,
    table1_productivity,
    table2_components,
    table4_skill,
    table5_causal,
    table7_correlations,
    validate_panel_frame,
)
from .stats import correlation_matrix
from .weather import generate_weather_series

STAGES = ("simulate", "analyze", "causal", "econ")


def _write_csv(frame: pd.DataFrame, path: Path) -> None:
    try:
        frame.to_csv(path, index=False, float_format="%.6g", lineterminator="\n")
    except OSError as exc:
        raise SystemExit(f"error: cannot write {path}: {exc}") from exc


def _write_json(obj, path: Path) -> None:
    try:
        path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n")
    except OSError as exc:
        raise SystemExit(f"error: cannot write {path}: {exc}") from exc


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _update_manifest(out_dir: Path, cfg: SimConfig, new_files: list[Path]) -> None:
    """Record every emitted file with its content hash; timestamps stay null
    so the manifest itself is deterministic."""
    path = out_dir / "manifest.json"
    manifest = {
        "tool_version": __version__,
        "config_hash": config_hash(cfg),
        "seed": cfg.seed,
        "timestamps": None,
        "files": {},
    }
    if path.exists():
        try:
            old = json.loads(path.read_text())
            if old.get("config_hash") == manifest["config_hash"]:
                manifest["files"] = old.get("files", {})
        except (json.JSONDecodeError, OSError):
            pass
    for f in new_files:
        manifest["files"][f.name] = _sha256(f)
    manifest["files"] = dict(sorted(manifest["files"].items()))
    _write_json(manifest, path)


def _load_panel(path: Path, experiment: str, cfg: SimConfig) -> PanelDataset:
    if not path.exists():
        raise SystemExit(f"error: panel file not found: {path}")
    frame = pd.read_csv(path)
    try:
        validate_panel_frame(frame, experiment)
    except ValueError as exc:
        raise SystemExit(f"error: {path}: {exc}") from exc
    return PanelDataset(frame, experiment, {"config_hash": config_hash(cfg), "seed": cfg.seed})


def cmd_simulate(cfg: SimConfig, out_dir: Path) -> list[str]:
    cross = run_cross_sectional(cfg)
    rollout = run_staggered_rollout(cfg)
    weather_frame = generate_weather_series(cfg, spawn_stream(cfg, "weather"))
    fleet = fleet_frame(make_fleet(cfg, spawn_stream(cfg, "fleet")))
    files = []
    for name, frame in (
        ("cross_sectional.csv", cross.frame),
        ("rollout.csv", rollout.frame),
        ("weather.csv", weather_frame),
        ("fleet.csv", fleet),
    ):
        path = out_dir / name
        _write_csv(frame, path)
        files.append(path)
    _update_manifest(out_dir, cfg, files)
    return []


def cmd_analyze(cfg: SimConfig, out_dir: Path, profile_name: str) -> list[str]:
    profile = PROFILES[profile_name]
    panel = _load_panel(out_dir / "cross_sectional.csv", "cross_sectional", cfg)
    tables = {
        "table1_productivity": table1_productivity(panel, profile),
        "table2_components": table2_components(panel, cfg, profile),
        "table4_skill": table4_skill(cfg, profile),
        "table7_correlations": table7_correlations(correlation_matrix(panel), profile),
    }
    files = []
    for name, frame in tables.items():
        path = out_dir / f"{name}.csv"
        _write_csv(frame, path)
        files.append(path)
    _update_manifest(out_dir, cfg, files)
    return collect_failures(tables)


def cmd_causal(cfg: SimConfig, out_dir: Path, profile_name: str, n_placebo: int = 50) -> list[str]:
    profile = PROFILES[profile_name]
    panel = _load_panel(out_dir / "rollout.csv", "rollout", cfg)
    suite = run_causal_suite(panel, cfg, n_placebo=n_placebo)
    tables = {"table5_causal": table5_causal(suite, profile)}
    files = []
    path = out_dir / "table5_causal.csv"
    _write_csv(tables["table5_causal"], path)
    files.append(path)
    if suite.event_study is not None:
        path = out_dir / "event_study.csv"
        _write_csv(suite.event_study.frame(), path)
        files.append(path)
    if suite.placebo is not None:
        path = out_dir / "placebo.csv"
        _write_csv(suite.placebo.frame(), path)
        files.append(path)
    het = []
    for dim in ("skill", "weather", "daytype"):
        t = heterogeneity(panel, dim)
        t.insert(0, "dimension", dim)
        het.append(t)
    path = out_dir / "heterogeneity.csv"
    _write_csv(pd.concat(het, ignore_index=True), path)
    files.append(path)
    _update_manifest(out_dir, cfg, files)
    return collect_failures(tables)


def cmd_econ(
    cfg: SimConfig,
    out_dir: Path,
    working_days: int | None = None,
    discount_rate: float = 0.05,
    horizon_years: int = 5,
) -> list[str]:
    panel = _load_panel(out_dir / "cross_sectional.csv", "cross_sectional", cfg)
    f = panel.frame
    trad = f.loc[f["mode"] == OperationalMode.TRADITIONAL.value, "daily_earnings"].mean()
    ai = f.loc[f["mode"] == OperationalMode.WEATHER_AWARE_AI.value, "daily_earnings"].mean()
    report = build_econ_report(
        traditional_daily=float(trad),
        weather_ai_daily=float(ai),
        working_days=working_days if working_days is not None else cfg.working_days_per_year,
        discount_rate=discount_rate,
        horizon_years=horizon_years,
        route_uplift=cfg.route_only_total_pct / 100.0,
    )
    files = []
    path = out_dir / "econ_report.json"
    _write_json(report.to_dict(), path)
    files.append(path)
    path = out_dir / "econ_comparison.csv"
    _write_csv(report.comparison, path)
    files.append(path)
    path = out_dir / "econ_sensitivity.csv"
    _write_csv(report.sensitivity_table, path)
    files.append(path)
    _update_manifest(out_dir, cfg, files)

    ratios = report.sensitivity_table["ratio"]
    failures = []
    if not ((ratios - 6.4).abs() <= 0.2).all():
        failures.append("econ_sensitivity:ratio")
    return failures


def _build_config(args) -> SimConfig:
    cfg = load_config(args.config) if args.config else SimConfig()
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="fleetlab", description="Deterministic weather-driven taxi fleet laboratory"
    )
    parser.add_argument("--config", type=Path, default=None, help="JSON config file")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--out-dir", type=Path, default=Path("out"), help="artifact directory")
    parser.add_argument(
        "--tolerance-profile", choices=sorted(PROFILES), default="default",
        help="tolerance bands for the built-in checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", help="generate panels and write the raw CSVs")
    sub.add_parser("analyze", help="productivity, component, skill, and correlation tables")
    p_causal = sub.add_parser("causal", help="five-method causal suite")
    p_causal.add_argument("--placebo-draws", type=int, default=50)
    p_econ = sub.add_parser("econ", help="ROI, payback, NPV, sensitivity")
    p_econ.add_argument("--working-days", type=int, default=None)
    p_econ.add_argument("--discount-rate", type=float, default=0.05)
    p_econ.add_argument("--horizon-years", type=int, default=5)
    p_all = sub.add_parser("all", help="simulate, analyze, causal, econ in order")
    p_all.add_argument("--skip", action="append", choices=STAGES, default=[])
    p_all.add_argument("--placebo-draws", type=int, default=50)
    p_all.add_argument("--working-days", type=int, default=None)
    p_all.add_argument("--discount-rate", type=float, default=0.05)
    p_all.add_argument("--horizon-years", type=int, default=5)

    args = parser.parse_args(argv)
    try:
        cfg = _build_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out_dir = args.out_dir
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create {out_dir}: {exc}", file=sys.stderr)
        return 2

    failures: list[str] = []
    try:
        if args.command == "simulate":
            failures = cmd_simulate(cfg, out_dir)
        elif args.command == "analyze":
            failures = cmd_analyze(cfg, out_dir, args.tolerance_profile)
        elif args.command == "causal":
            failures = cmd_causal(cfg, out_dir, args.tolerance_profile, args.placebo_draws)
        elif args.command == "econ":
            failures = cmd_econ(
                cfg, out_dir, args.working_days, args.discount_rate, args.horizon_years
            )
        elif args.command == "all":
            stages = [s for s in STAGES if s not in args.skip]
            if "simulate" in stages:
                failures += cmd_simulate(cfg, out_dir)
            if "analyze" in stages:
                failures += cmd_analyze(cfg, out_dir, args.tolerance_profile)
            if "causal" in stages:
                failures += cmd_causal(cfg, out_dir, args.tolerance_profile, args.placebo_draws)
            if "econ" in stages:
                failures += cmd_econ(
                    cfg, out_dir, args.working_days, args.discount_rate, args.horizon_years
                )
    except SystemExit as exc:
        print(exc, file=sys.stderr)
        return 2

    if failures:
        print("FAILED checks:", file=sys.stderr)
        for f in failures:
            print(f"  - {f}", file=sys.stderr)
        return 1
    print(f"ok: {args.command} complete, artifacts in {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
