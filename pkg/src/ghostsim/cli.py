"""Command-line front end.

Subcommands:

* ``ghostsim run <config.toml>`` or ``ghostsim run --preset ding-fig3``
  executes a scenario and writes patterns plus ``report.txt`` into the
  output directory;
* ``ghostsim validate <config.toml>`` checks a config without running it.

Configs are TOML with quantity strings ("1530 nm", "32.5 cm", bare numbers
are meters).  Exit codes: 0 success, 1 unexpected package error, 2 config
problem, 3 physics precondition, 4 grid resource bound, 5 comparison
tolerance breach under ``--check``.

Outputs are deterministic: fixed float formatting, no timestamps, and
single-threaded FFTs unless GHOSTSIM_THREADS says otherwise, so identical
inputs give byte-identical files.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from . import analysis, engine, oracle
from .engine import Scenario
from .errors import (
    AnalysisError,
    ConfigError,
    GhostsimError,
    PhysicsPreconditionError,
    ResourceBoundError,
)
from .oracle import GridSpec
from .pattern import Pattern, write_density_binary, write_pattern_csv

__all__ = ["RunConfig", "parse_quantity", "validate_config", "serialize_config", "main"]

MODES = ("analytic", "oracle", "compare")
FORMATS = ("csv", "binary")
LENS_MODELS = ("exact", "thin")
CHECK_TOLERANCE = 1e-6  # --check gate on analytic-vs-oracle deviation

_UNITS = {"nm": 1e-9, "um": 1e-6, "µm": 1e-6, "mm": 1e-3, "cm": 1e-2, "m": 1.0}
_QUANTITY = re.compile(
    r"\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(nm|um|µm|mm|cm|m)?\s*"
)


def parse_quantity(value, field: str) -> float:
    """Length in meters from a number or a string like '32.5 cm'."""
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ConfigError(f"{field}: expected a length, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    m = _QUANTITY.fullmatch(value.strip())
    if m:
        try:
            return float(m.group(1)) * _UNITS[m.group(2) or "m"]
        except ValueError:
            pass
    raise ConfigError(f"{field}: cannot parse quantity {value!r}")


@dataclass(frozen=True)
class RunConfig:
    """Everything one invocation needs; see the README for the TOML schema."""

    scenario: Scenario
    mode: str = "analytic"
    y1_values: tuple[float, ...] = (0.0,)
    bucket_widths: tuple[float, ...] = ()
    marginal1: bool = True
    density2d: bool = False
    fringe_report: bool = True
    grid: GridSpec | None = None
    lens_model: str = "exact"
    output_dir: str = "out"
    format: str = "csv"


def preset_config(name: str) -> RunConfig:
    if name != "ding-fig3":
        raise ConfigError(f"unknown preset {name!r}; available presets: ding-fig3")
    scenario = Scenario.from_gamma(
        lambda1=1530e-9,
        lambda2=780e-9,
        L1=1.15,
        L2=0.325,
        d=0.5e-3,
        slit_width=0.1e-3,
        gamma=0.11e-3,
    )
    return RunConfig(scenario=scenario)


def _section(raw: dict, name: str, errors: list[str]) -> dict:
    sec = raw.get(name, {})
    if not isinstance(sec, dict):
        errors.append(f"{name}: must be a table")
        return {}
    return dict(sec)


def _take_quantity(sec: dict, section: str, key: str, errors: list[str]):
    if key not in sec:
        return None
    try:
        return parse_quantity(sec.pop(key), f"{section}.{key}")
    except ConfigError as exc:
        errors.append(str(exc))
        return None


def _build_scenario(sec: dict, errors: list[str]) -> Scenario | None:
    values = {}
    for key in ("lambda1", "lambda2", "L1", "L2", "d", "slit_width"):
        present = key in sec
        v = _take_quantity(sec, "scenario", key, errors)
        if not present:
            errors.append(f"scenario.{key}: missing")
        values[key] = v
    gamma = _take_quantity(sec, "scenario", "gamma", errors)
    ell_sigma = _take_quantity(sec, "scenario", "ell_sigma", errors)
    omega = _take_quantity(sec, "scenario", "Omega", errors)
    f = _take_quantity(sec, "scenario", "f", errors)
    d_total = _take_quantity(sec, "scenario", "D", errors)
    for key in sec:
        errors.append(f"scenario.{key}: unknown key")
    if gamma is not None and ell_sigma is not None:
        errors.append("scenario: give gamma or ell_sigma, not both")
    if gamma is None and ell_sigma is None:
        errors.append("scenario: one of gamma or ell_sigma is required")
    if any(v is None for v in values.values()) or errors:
        return None
    try:
        if gamma is not None:
            s = Scenario.from_gamma(gamma=gamma, Omega=omega, f=f, **values)
        else:
            s = Scenario(ell_sigma=ell_sigma, Omega=omega, f=f, **values)
    except ConfigError as exc:
        errors.extend(str(exc).splitlines())
        return None
    if d_total is not None and abs(d_total - (s.L1 + 2.0 * s.L2)) > 1e-12 * d_total:
        errors.append(
            f"scenario.D: {d_total:g} is inconsistent with L1 + 2*L2 = "
            f"{s.L1 + 2.0 * s.L2:g}"
        )
        return None
    return s


def _build_grid(sec: dict, scenario: Scenario | None, errors: list[str]) -> GridSpec | None:
    if not sec:
        return None
    n1 = sec.pop("n1", 2048)
    n2 = sec.pop("n2", n1)
    e1 = _take_quantity(sec, "grid", "extent1", errors)
    e2 = _take_quantity(sec, "grid", "extent2", errors)
    for key in sec:
        errors.append(f"grid.{key}: unknown key")
    if (e1 is None) != (e2 is None):
        errors.append("grid: give both extent1 and extent2 or neither")
        return None
    try:
        if e1 is not None:
            return GridSpec(n1=n1, n2=n2, extent1=e1, extent2=e2)
        if scenario is not None:
            return oracle.auto_grid(scenario, n1, n2)
    except (ConfigError, ResourceBoundError) as exc:
        errors.extend(str(exc).splitlines())
    return None


def _config_from_dict(raw: dict) -> RunConfig:
    errors: list[str] = []
    known = {"scenario", "run", "outputs", "grid"}
    for key in raw:
        if key not in known:
            errors.append(f"{key}: unknown section")

    scenario = _build_scenario(_section(raw, "scenario", errors), errors)

    run = _section(raw, "run", errors)
    mode = run.pop("mode", "analytic")
    fmt = run.pop("format", "csv")
    outdir = run.pop("out", "out")
    for key in run:
        errors.append(f"run.{key}: unknown key")
    if mode not in MODES:
        errors.append(f"run.mode: must be one of {MODES}, got {mode!r}")
    if fmt not in FORMATS:
        errors.append(f"run.format: must be one of {FORMATS}, got {fmt!r}")
    if not isinstance(outdir, str) or not outdir:
        errors.append(f"run.out: must be a non-empty path, got {outdir!r}")

    outputs = _section(raw, "outputs", errors)
    try:
        y1_values = tuple(
            parse_quantity(v, "outputs.y1") for v in outputs.pop("y1", [0.0])
        )
    except ConfigError as exc:
        errors.append(str(exc))
        y1_values = (0.0,)
    try:
        bucket_widths = tuple(
            parse_quantity(v, "outputs.bucket_widths")
            for v in outputs.pop("bucket_widths", [])
        )
    except ConfigError as exc:
        errors.append(str(exc))
        bucket_widths = ()
    marginal1 = outputs.pop("marginal1", True)
    density2d = outputs.pop("density", False)
    fringe_report = outputs.pop("fringe_report", True)
    for key in outputs:
        errors.append(f"outputs.{key}: unknown key")
    for name, val in (("marginal1", marginal1), ("density", density2d),
                      ("fringe_report", fringe_report)):
        if not isinstance(val, bool):
            errors.append(f"outputs.{name}: must be true or false, got {val!r}")

    grid_sec = _section(raw, "grid", errors)
    lens_model = grid_sec.pop("lens_model", "exact")
    if lens_model not in LENS_MODELS:
        errors.append(
            f"grid.lens_model: must be one of {LENS_MODELS}, got {lens_model!r}"
        )
    grid = _build_grid(grid_sec, scenario, errors)

    if errors or scenario is None:
        raise ConfigError("\n".join(errors) or "scenario: missing")
    return RunConfig(
        scenario=scenario,
        mode=mode,
        y1_values=y1_values,
        bucket_widths=bucket_widths,
        marginal1=marginal1,
        density2d=density2d,
        fringe_report=fringe_report,
        grid=grid,
        lens_model=lens_model,
        output_dir=outdir,
        format=fmt,
    )


def validate_config(path) -> RunConfig:
    """Parse and validate a TOML config; raises ConfigError listing every problem."""
    p = Path(path)
    try:
        raw = tomllib.loads(p.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such file")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: TOML parse error: {exc}")
    return _config_from_dict(raw)


def serialize_config(rc: RunConfig) -> str:
    """Canonical TOML for a RunConfig; parsing it back gives an equal config."""
    s = rc.scenario
    lines = ["[scenario]"]
    for key in ("lambda1", "lambda2", "L1", "L2", "d", "slit_width", "ell_sigma"):
        lines.append(f"{key} = {getattr(s, key)!r}")
    if s.Omega is not None:
        lines.append(f"Omega = {s.Omega!r}")
    if s.f is not None:
        lines.append(f"f = {s.f!r}")
    lines += [
        "",
        "[run]",
        f'mode = "{rc.mode}"',
        f'format = "{rc.format}"',
        f'out = "{rc.output_dir}"',
        "",
        "[outputs]",
        "y1 = [" + ", ".join(repr(v) for v in rc.y1_values) + "]",
        "bucket_widths = [" + ", ".join(repr(v) for v in rc.bucket_widths) + "]",
        f"marginal1 = {str(rc.marginal1).lower()}",
        f"density = {str(rc.density2d).lower()}",
        f"fringe_report = {str(rc.fringe_report).lower()}",
    ]
    if rc.grid is not None or rc.lens_model != "exact":
        lines += ["", "[grid]"]
        if rc.grid is not None:
            g = rc.grid
            lines += [
                f"n1 = {g.n1}",
                f"n2 = {g.n2}",
                f"extent1 = {g.extent1!r}",
                f"extent2 = {g.extent2!r}",
            ]
        lines.append(f'lens_model = "{rc.lens_model}"')
    return "\n".join(lines) + "\n"


# -- run command -------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.9e}"


def _fringe_lines(label: str, pattern: Pattern) -> list[str]:
    try:
        rep = analysis.extract_fringes(pattern)
    except AnalysisError as exc:
        return [f"  {label}: unavailable ({exc})"]
    lines = [
        f"  {label}:",
        f"    spacing          = {_fmt(rep.spacing)} m "
        f"(+/- {_fmt(rep.spacing_uncertainty)})",
        f"    visibility       = {_fmt(rep.visibility)}",
        f"    n_peaks          = {rep.n_peaks}",
    ]
    for flag in rep.flags:
        lines.append(f"    flag: {flag}")
    return lines


def _write_pattern(outdir: Path, stem: str, pattern: Pattern, produced: list[str]) -> None:
    name = f"{stem}.csv"
    write_pattern_csv(outdir / name, pattern)
    produced.append(name)


def _gnuplot_script(produced: list[str]) -> str:
    lines = [
        "set datafile separator ','",
        "set xlabel 'position [m]'",
        "set ylabel 'density'",
        "set key outside",
    ]
    plots = [
        f"'{name}' using 1:2 with lines title '{Path(name).stem}'"
        for name in produced
        if name.endswith(".csv") and name.startswith("pattern_")
    ]
    if plots:
        lines.append("plot \\")
        lines.append(", \\\n".join("  " + p for p in plots))
    return "\n".join(lines) + "\n"


def run_config(rc: RunConfig, check: bool = False, gnuplot: bool = False) -> int:
    """Execute a validated RunConfig; returns the process exit code."""
    outdir = Path(rc.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    produced: list[str] = []
    s = rc.scenario

    jd = engine.joint_density(s)
    widths = engine.fringe_width(s)
    unc = engine.uncertainties(s)
    y2 = engine.suggested_y2_grid(jd)

    report: list[str] = ["ghostsim run report", "==================="]
    report += ["", "[scenario]"]
    for key in ("lambda1", "lambda2", "L1", "L2", "d", "slit_width", "ell_sigma"):
        report.append(f"  {key:<10} = {_fmt(getattr(s, key))} m")
    omega_note = "" if s.Omega is not None else "  (defaulted to 10*max(d, gamma))"
    report.append(f"  {'Omega':<10} = {_fmt(s.omega)} m{omega_note}")
    if s.f is not None:
        report.append(f"  {'f':<10} = {_fmt(s.f)} m")
    report += [
        "",
        "[derived]",
        f"  gamma      = {_fmt(s.gamma)} m",
        f"  D          = {_fmt(s.D)} m",
        f"  X          = {_fmt(s.X)} m",
        "",
        "[fringe widths, particle 2]",
        f"  w2 exact       = {_fmt(widths.exact)} m",
        f"  w2 simplified  = {_fmt(widths.simplified)} m",
        f"  w2 Young-equiv = {_fmt(widths.young_equivalent)} m",
        "",
        "[phase gradients]",
        f"  theta1 = {_fmt(jd.theta1)} rad/m",
        f"  theta2 = {_fmt(jd.theta2)} rad/m",
        "",
        "[slit conditioning]",
        f"  pass_probability = {_fmt(jd.slit.pass_probability)}",
        f"  y0_prime         = {_fmt(jd.slit.y0_prime)} m",
        f"  Gamma            = {_fmt(jd.slit.Gamma.real)} "
        f"{'+' if jd.slit.Gamma.imag >= 0 else '-'} "
        f"{_fmt(abs(jd.slit.Gamma.imag))}j m^2",
        f"  mode_overlap     = {_fmt(jd.slit.mode_overlap)}",
        "",
        "[regime]",
        f"  correlation margin = {_fmt(jd.regime.margin)} "
        f"(good: {'yes' if jd.regime.good_correlation else 'no'})",
        f"  slit mode overlap  = {_fmt(jd.regime.slit_mode_overlap)} "
        f"(orthogonal-mode regime: {'yes' if jd.regime.orthogonal_modes else 'no'})",
        f"  far-field ratio    = {_fmt(jd.regime.simplified_ratio)} "
        f"(simplified w2 within 1%: {'yes' if jd.regime.simplified_ok else 'no'})",
        f"  default path       = {jd.default_path}",
    ]
    for w in jd.regime.warnings:
        report.append(f"  warning: {w}")
    report += [
        "",
        "[uncertainties]",
        f"  dy      = {_fmt(unc.dy)} m",
        f"  dk      = {_fmt(unc.dk)} 1/m",
        f"  product = {_fmt(unc.product)}",
    ]

    # closed-vs-exact diagnostic on a small central patch
    probe1 = np.linspace(-2e-4, 2e-4, 21)
    probe2 = np.linspace(-0.45 * float(y2[-1]), 0.45 * float(y2[-1]), 41)
    dev = jd.closed_vs_exact(probe1[:, None], probe2[None, :])
    report += [
        "",
        "[evaluation]",
        f"  closed-vs-exact max deviation (central patch, rel. peak) = {_fmt(dev)}",
    ]

    y1_cover = 2.5 * math.sqrt(jd.Delta1) + abs(jd.y0)
    for y1v in rc.y1_values:
        if abs(y1v) > y1_cover:
            report.append(
                f"  warning: slice y1 = {_fmt(y1v)} m lies outside the "
                f"particle-1 envelope (|y1| > {_fmt(y1_cover)} m); expect no counts"
            )

    slices: list[Pattern] = []
    if rc.mode in ("analytic", "compare"):
        for i, y1v in enumerate(rc.y1_values):
            p = engine.coincidence_slice(jd, y1v, y2)
            slices.append(p)
            _write_pattern(outdir, f"pattern_slice{i}", p, produced)
        for i, w in enumerate(rc.bucket_widths):
            p = engine.bucket_average(jd, rc.y1_values[0], w, y2)
            _write_pattern(outdir, f"pattern_bucket{i}", p, produced)
        if rc.marginal1:
            p = engine.marginal_particle1(jd, engine.suggested_y1_grid(jd))
            _write_pattern(outdir, "pattern_marginal1", p, produced)

    breach = False
    if rc.mode in ("oracle", "compare"):
        grid = rc.grid if rc.grid is not None else oracle.auto_grid(s)
        gs = oracle.run_pipeline(s, grid, lens_model=rc.lens_model)
        report += [
            "",
            "[oracle]",
            f"  grid = {grid.n1} x {grid.n2}, extents = "
            f"{_fmt(grid.extent1)} m x {_fmt(grid.extent2)} m",
            f"  norm drift (non-slit stages) = {_fmt(oracle.norm_drift(gs))}",
        ]
        if s.f is not None:
            report.insert(-1, f"  lens model = {rc.lens_model}")
        for label, value in gs.norm_history:
            report.append(f"    norm after {label:<18} = {_fmt(value)}")
        for diag in gs.diagnostics:
            report.append(f"  note: {diag}")
        for i, y1v in enumerate(rc.y1_values):
            g = oracle.grid_slice(gs, y1v)
            _write_pattern(outdir, f"pattern_oracle_slice{i}", g, produced)
            if rc.mode == "compare":
                a = engine.coincidence_slice(jd, g.y1_fixed, g.axes[0], path="exact")
                cmp_ = analysis.compare_patterns(a, g)
                report.append(
                    f"  slice y1={_fmt(g.y1_fixed)}: max deviation = "
                    f"{_fmt(cmp_.max_abs_deviation)}, rms = {_fmt(cmp_.rms_deviation)}, "
                    f"spacing ratio = {_fmt(cmp_.spacing_ratio) if not math.isnan(cmp_.spacing_ratio) else 'nan'}"
                )
                breach = breach or cmp_.max_abs_deviation > CHECK_TOLERANCE
        if rc.mode == "compare":
            od = oracle.density(gs)
            a2 = Pattern(
                od.axes,
                jd.evaluate_exact(od.axes[0][:, None], od.axes[1][None, :]),
                label="analytic-density",
            )
            cmp2 = analysis.compare_patterns(a2, od)
            report.append(
                f"  2D density: max deviation = {_fmt(cmp2.max_abs_deviation)}, "
                f"rms = {_fmt(cmp2.rms_deviation)}"
            )
            breach = breach or cmp2.max_abs_deviation > CHECK_TOLERANCE
            if rc.density2d:
                if rc.format == "binary":
                    write_density_binary(outdir / "joint.bin", od)
                    produced.append("joint.bin")
                else:
                    _write_joint_csv(outdir / "joint.csv", od)
                    produced.append("joint.csv")
        elif rc.density2d:
            od = oracle.density(gs)
            if rc.format == "binary":
                write_density_binary(outdir / "joint.bin", od)
                produced.append("joint.bin")
            else:
                _write_joint_csv(outdir / "joint.csv", od)
                produced.append("joint.csv")
        if rc.marginal1 and rc.mode == "oracle":
            spec = gs.spec
            inten = gs.psi.real**2 + gs.psi.imag**2
            vals = inten.sum(axis=1) * spec.dy2
            vals /= vals.sum() * spec.dy1
            _write_pattern(
                outdir, "pattern_marginal1",
                Pattern((spec.axis1(),), vals, label="marginal1"), produced,
            )

    if rc.density2d and rc.mode == "analytic":
        a2_axes = (engine.suggested_y1_grid(jd, 512), y2)
        a2 = Pattern(
            a2_axes,
            jd.evaluate(a2_axes[0][:, None], a2_axes[1][None, :]),
            label="analytic-density",
        )
        if rc.format == "binary":
            write_density_binary(outdir / "joint.bin", a2)
            produced.append("joint.bin")
        else:
            _write_joint_csv(outdir / "joint.csv", a2)
            produced.append("joint.csv")

    if rc.fringe_report:
        report += ["", "[fringes]"]
        if slices:
            for i, p in enumerate(slices):
                report += _fringe_lines(f"slice y1={_fmt(p.y1_fixed)}", p)
        elif rc.mode == "oracle":
            g = oracle.grid_slice(gs, rc.y1_values[0])
            report += _fringe_lines(f"oracle slice y1={_fmt(g.y1_fixed)}", g)

    report += ["", "[files]"]
    for name in produced:
        report.append(f"  {name}")

    (outdir / "report.txt").write_text("\n".join(report) + "\n", encoding="ascii")
    if gnuplot:
        (outdir / "plot.gp").write_text(_gnuplot_script(produced), encoding="ascii")

    if check and rc.mode == "compare" and breach:
        print(
            f"check failed: analytic-vs-oracle deviation exceeds {CHECK_TOLERANCE:g}",
            file=sys.stderr,
        )
        return 5
    return 0


def _write_joint_csv(path, p: Pattern) -> None:
    y1, y2 = p.axes
    rows = ["y1,y2,value"]
    fmt = "%.17g"
    for i, a in enumerate(y1):
        sa = fmt % a
        row = p.values[i]
        rows.extend(f"{sa},{fmt % b},{fmt % v}" for b, v in zip(y2, row))
    with open(path, "w", newline="\n", encoding="ascii") as fh:
        fh.write("\n".join(rows) + "\n")


# -- argument handling -------------------------------------------------------


def _apply_overrides(rc: RunConfig, args) -> RunConfig:
    scen_over = {}
    for field in ("lambda1", "lambda2", "f", "d"):
        raw = getattr(args, field)
        if raw is not None:
            scen_over[field] = parse_quantity(raw, f"--{field}")
    if scen_over:
        rc = dataclasses.replace(
            rc, scenario=dataclasses.replace(rc.scenario, **scen_over)
        )
    if args.y1 is not None:
        rc = dataclasses.replace(rc, y1_values=(parse_quantity(args.y1, "--y1"),))
    if args.bucket_width is not None:
        rc = dataclasses.replace(
            rc, bucket_widths=(parse_quantity(args.bucket_width, "--bucket-width"),)
        )
    if args.mode is not None:
        rc = dataclasses.replace(rc, mode=args.mode)
    if args.format is not None:
        rc = dataclasses.replace(rc, format=args.format)
    if args.out is not None:
        rc = dataclasses.replace(rc, output_dir=args.out)
    return rc


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ghostsim",
        description="Two-color ghost-interference simulator",
    )
    sub = p.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="execute a scenario and write outputs")
    runp.add_argument("config", nargs="?", help="TOML config file")
    runp.add_argument("--preset", help="built-in scenario (ding-fig3)")
    runp.add_argument("--mode", choices=MODES, help="evaluation mode")
    runp.add_argument("--check", action="store_true",
                      help="exit 5 if compare-mode deviation exceeds 1e-6")
    runp.add_argument("--out", help="output directory")
    runp.add_argument("--format", choices=FORMATS, help="2D density format")
    runp.add_argument("--lambda1", help="override wavelength 1 (e.g. 780nm)")
    runp.add_argument("--lambda2", help="override wavelength 2")
    runp.add_argument("--f", help="override lens focal length")
    runp.add_argument("--d", help="override slit separation")
    runp.add_argument("--bucket-width", help="emit one bucket average of this width")
    runp.add_argument("--y1", help="fixed detector-1 position for slices")
    runp.add_argument("--gnuplot-script", action="store_true",
                      help="also write plot.gp next to the CSVs")

    valp = sub.add_parser("validate", help="check a config file")
    valp.add_argument("config")
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            rc = validate_config(args.config)
            print(f"ok: mode={rc.mode}, output_dir={rc.output_dir}")
            return 0
        if args.config and args.preset:
            raise ConfigError("give a config file or --preset, not both")
        if args.config:
            rc = validate_config(args.config)
        elif args.preset:
            rc = preset_config(args.preset)
        else:
            raise ConfigError("a config file or --preset is required")
        rc = _apply_overrides(rc, args)
        if args.check and (args.mode or rc.mode) != "compare":
            raise ConfigError("--check requires --mode compare")
        return run_config(rc, check=args.check, gnuplot=args.gnuplot_script)
    except ConfigError as exc:
        print(f"config error:\n{exc}", file=sys.stderr)
        return 2
    except PhysicsPreconditionError as exc:
        print(f"physics precondition violated: {exc}", file=sys.stderr)
        return 3
    except ResourceBoundError as exc:
        print(f"resource bound: {exc}", file=sys.stderr)
        return 4
    except GhostsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
