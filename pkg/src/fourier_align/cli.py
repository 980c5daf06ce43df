"""Command-line front end.

Exit codes: 0 ok, 2 I/O or unreadable input, 3 shape or precondition
violation, 4 bad config file.  JSON documents go to stdout only when
``--json -``; diagnostics always go to stderr.  Angles on the command line and
in JSON are in degrees.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .fusion import AVERAGE_GROUPS, IDENTITY_TRUNCATE, FusionConfig, ProjectionSpec, faafusion_trace
from .geometry import PatchSpec, alignment_angle, rotate
from .grid import GridFormatError, grid_to_csv, grid_to_pgm, guess_format, read_grid, read_pgm
from .spectral import FaeConfig, centered_dft2, fae, polar_resample, power_spectrum
from .synthbench import band_limited_image, bench_angle_sweep, bench_equivariance

EXIT_OK, EXIT_IO, EXIT_SHAPE, EXIT_CONFIG = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


class InputError(OSError):
    pass


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _load(path: str, fmt: str | None) -> tuple[np.ndarray, dict]:
    fmt = fmt or guess_format(path)
    try:
        if fmt == "pgm":
            g, magic, maxval = read_pgm(path)
            meta = {"path": str(path), "format": "pgm", "pgm_magic": magic, "maxval": maxval}
        else:
            g = read_grid(path, fmt)
            meta = {"path": str(path), "format": fmt}
    except (OSError, GridFormatError) as exc:
        raise InputError(str(exc)) from exc
    meta["shape"] = list(g.shape)
    return g, meta


def _save(g: np.ndarray, path: str, meta: dict, normalize: bool = False) -> None:
    if meta["format"] == "pgm":
        maxval = meta.get("maxval", 255)
        out_of_range = g.min() < 0 or g.max() > maxval
        grid_to_pgm(g, path, normalize=normalize or out_of_range,
                    binary=meta.get("pgm_magic") == "P5", maxval=maxval)
    else:
        grid_to_csv(g, path)


def _emit(doc: dict, target: str | None) -> None:
    text = json.dumps(doc, indent=2, allow_nan=False)
    if target in (None, "-"):
        sys.stdout.write(text + "\n")
    else:
        Path(target).write_text(text + "\n")
        doc["outputs"].append({"path": str(target), "kind": "json"})


def _result(command: str, inputs, outputs=None, metrics=None, **extra) -> dict:
    return {"command": command, "input": inputs, "outputs": outputs or [],
            "metrics": metrics or {}, "exit_code": 0, **extra}


def _fae_config(bins: int = 180, window: str = "none") -> FaeConfig:
    return FaeConfig(n_theta=2 * bins, window=window)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_estimate(args) -> dict:
    g, meta = _load(args.input, args.format)
    est = fae(g, _fae_config(args.bins, args.window))
    metrics = {"theta_hat_deg": est.theta_hat_deg, "degenerate": est.degenerate,
               "total_energy": est.total_energy}
    doc = _result("estimate", meta, metrics=metrics, **metrics,
                  histogram=est.histogram.tolist())
    _emit(doc, args.json)
    return doc


def cmd_align(args) -> dict:
    g, meta = _load(args.input, args.format)
    cfg = _fae_config(args.bins, args.window)
    est = fae(g, cfg)
    delta = alignment_angle(np.radians(args.theta0), est)
    out = g.copy() if delta == 0 else rotate(g, delta)
    _save(out, args.out, meta)
    metrics = {"theta_hat_deg": est.theta_hat_deg, "theta0_deg": args.theta0,
               "delta_theta_deg": float(np.degrees(delta)), "degenerate": est.degenerate}
    doc = _result("align", meta, [{"path": args.out, "kind": meta["format"]}], metrics, **metrics)
    _emit(doc, args.json if args.json else args.out + ".json")
    return doc


def cmd_spectrum(args) -> dict:
    g, meta = _load(args.input, args.format)
    if g.shape[0] != g.shape[1] or g.shape[0] % 2 or g.shape[0] < 4:
        raise ValueError(f"spectrum needs a square, even grid of side >= 4, got {g.shape}")
    stem = Path(args.input).with_suffix("")
    out_power = args.out_power or f"{stem}_power.pgm"
    out_polar = args.out_polar or f"{stem}_polar.csv"
    power = power_spectrum(centered_dft2(g))
    grid_to_pgm(np.log1p(power.data), out_power, normalize=True)
    polar = polar_resample(power, _fae_config(args.bins))
    grid_to_csv(polar.data, out_polar)
    column_sums = polar.data.sum(axis=0)
    metrics = {"peak_theta_deg": float(np.degrees(polar.theta[int(np.argmax(column_sums))])),
               "n_rho": polar.n_rho, "n_theta": polar.n_theta, "rho_max": polar.rho_max}
    doc = _result("spectrum", meta,
                  [{"path": out_power, "kind": "pgm"}, {"path": out_polar, "kind": "csv"}],
                  metrics)
    _emit(doc, args.json)
    return doc


_CONFIG_KEYS = {"c_mid", "kernel", "stride", "padding", "normalize_fold", "n_theta", "n_rho",
                "energy_floor", "window", "proj_low", "proj_high", "proj_out"}


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def load_fusion_config(path) -> FusionConfig:
    """Parse a ``key=value`` fusion config; ``#`` starts a comment line."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise InputError(str(exc)) from exc
    values: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = (value, lineno)

    def get(key, conv, default=None):
        if key not in values:
            return default
        text, lineno = values[key]
        try:
            return conv(text)
        except (ValueError, OSError, GridFormatError) as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from None

    def projection(text: str, out_side: bool) -> ProjectionSpec | None:
        if text in ("identity", IDENTITY_TRUNCATE):
            return None if out_side else ProjectionSpec(IDENTITY_TRUNCATE, c_mid)
        if text == AVERAGE_GROUPS:
            if out_side:
                raise ValueError("average_groups cannot widen channels back")
            return ProjectionSpec(AVERAGE_GROUPS, c_mid)
        return ProjectionSpec.from_csv(path.parent / text)

    c_mid = get("c_mid", int)
    padding = get("padding", lambda t: t if t == "same" else int(t), 0)
    try:
        patch = PatchSpec(kernel=get("kernel", int, 8), stride=get("stride", int),
                          padding=padding,
                          normalize_fold=get("normalize_fold", _parse_bool, True))
        fae_cfg = FaeConfig(n_theta=get("n_theta", int, 360), n_rho=get("n_rho", int),
                            energy_floor=get("energy_floor", float, 1e-8),
                            window=get("window", str, "none"))
        projections = {}
        for name in ("proj_low", "proj_high", "proj_out"):
            out_side = name == "proj_out"
            projections[name] = get(name, lambda t: projection(t, out_side))
        return FusionConfig(c_mid=c_mid, patch=patch, fae=fae_cfg, **projections)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def cmd_fuse(args) -> dict:
    low, meta = _load(args.low, None)
    high, high_meta = _load(args.high, None)
    cfg = load_fusion_config(args.config) if args.config else FusionConfig()
    trace = faafusion_trace(low[None], high[None], cfg)
    _save(trace.output[0], args.out, meta)
    rotated = int(np.count_nonzero(trace.rotation))
    metrics = {"patches": int(trace.rotation.size), "rotated_patches": rotated,
               "max_abs_rotation_deg": float(np.degrees(np.abs(trace.rotation).max()))}
    doc = _result("fuse", {"low": meta, "high": high_meta},
                  [{"path": args.out, "kind": meta["format"]}], metrics)
    _emit(doc, args.json)
    return doc


def cmd_bench(args) -> dict:
    cfg = _fae_config(args.bins)
    if args.suite == "angles":
        angles = np.radians(np.arange(0.0, 180.0, args.step))
        report = bench_angle_sweep(args.H, args.a, args.b, angles, cfg,
                                   antialias=not args.no_antialias,
                                   oracle_step_deg=args.oracle_step or None)
    else:
        angles = np.radians([float(a) for a in args.angles.split(",") if a.strip()])
        report = bench_equivariance(band_limited_image(args.H, seed=args.seed), angles, cfg)
    print(f"{report.suite}: {len(report.rows)} rows in {report.runtime_ms:.0f} ms",
          file=sys.stderr)
    outputs = []
    if args.csv:
        report.to_csv(args.csv)
        outputs.append({"path": args.csv, "kind": "csv"})
    doc = _result("bench", {"suite": args.suite}, outputs, dict(report.summary),
                  **report.to_dict(include_runtime=args.timing))
    _emit(doc, args.json)
    return doc


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fourier-align",
                                     description="Fourier angle estimation and alignment")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, json_default="-"):
        p.add_argument("--format", choices=("pgm", "csv"), default=None,
                       help="input format (default: from the file suffix)")
        p.add_argument("--bins", type=int, default=180, help="angle bins over [0, 180) deg")
        p.add_argument("--json", default=json_default,
                       help="JSON result path, '-' for stdout")

    p = sub.add_parser("estimate", help="estimate the dominant spectral angle")
    p.add_argument("--input", required=True)
    p.add_argument("--window", choices=("none", "hann"), default="none")
    common(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("align", help="rotate the dominant angle onto --theta0")
    p.add_argument("--input", required=True)
    p.add_argument("--theta0", type=float, default=0.0, help="reference angle in degrees")
    p.add_argument("--out", required=True)
    p.add_argument("--window", choices=("none", "hann"), default="none")
    common(p, json_default=None)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("spectrum", help="export log-power PGM and polar energy CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--out-power")
    p.add_argument("--out-polar")
    common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("fuse", help="fuse a low-level grid with a half-size high-level grid")
    p.add_argument("--low", required=True)
    p.add_argument("--high", required=True)
    p.add_argument("--config", help="key=value fusion config file")
    p.add_argument("--out", required=True)
    p.add_argument("--json", default="-")
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("bench", help="run a synthetic benchmark suite")
    p.add_argument("--suite", choices=("angles", "equivariance"), default="angles")
    p.add_argument("--H", type=int, default=64)
    p.add_argument("--a", type=float, default=20.0)
    p.add_argument("--b", type=float, default=6.0)
    p.add_argument("--step", type=float, default=5.0, help="pose step in degrees")
    p.add_argument("--no-antialias", action="store_true")
    p.add_argument("--oracle-step", type=float, default=0.25,
                   help="dense oracle resolution in degrees (0 disables)")
    p.add_argument("--angles", default="15,30,45,60,90",
                   help="equivariance rotation angles in degrees")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bins", type=int, default=180)
    p.add_argument("--csv", help="also write the per-row table as CSV")
    p.add_argument("--timing", action="store_true", help="include runtime_ms in the JSON")
    p.add_argument("--json", default="-")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SHAPE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
