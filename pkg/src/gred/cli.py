"""Command-line interface.

Every subcommand reads an optional JSON config file and applies flag
overrides on top.  Config sections:

    system   N, C, d, M, B, K          (physical network parameters)
    control  p_max, x_min, x_max, w, alpha, beta
    orbit    x0, transient, samples
    scan     w_lo, w_hi, points, refine_tol, diameter_tol

Exit status: 0 on success, 2 on configuration or validation errors,
1 on runtime failures.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import chaos as chaos_mod
from . import stability
from .classic import SystemParams
from .errors import ConfigError, GredError
from .model import ControlParams, NormalizedModel
from .special import BetaShape
from .sweep import (
    ModelSpec,
    SweepAxis,
    WBifScan,
    alpha_beta_grid,
    bifurcation_sweep,
    w_bif_status,
    write_bif_csv,
    write_grid_csv,
)

_SECTIONS = {
    "system": ("N", "C", "d", "M", "B", "K"),
    "control": ("p_max", "x_min", "x_max", "w", "alpha", "beta"),
    "orbit": ("x0", "transient", "samples"),
    "scan": ("w_lo", "w_hi", "points", "refine_tol", "diameter_tol"),
}

_CONTROL_DEFAULTS = {
    "p_max": 0.5,
    "x_min": 0.2,
    "x_max": 0.6,
    "w": 0.15,
    "alpha": 1.0,
    "beta": 1.0,
}

_ORBIT_DEFAULTS = {"x0": None, "transient": 500, "samples": 50}

_SCAN_DEFAULTS = {
    "w_lo": 0.01,
    "w_hi": 0.99,
    "points": 50,
    "refine_tol": 1e-4,
    "diameter_tol": 1e-4,
}


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    for section, content in raw.items():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown config section '{section}'")
        if not isinstance(content, dict):
            raise ConfigError(f"config section '{section}' must be an object")
        for key in content:
            if key not in _SECTIONS[section]:
                raise ConfigError(f"unknown config key '{section}.{key}'")
    return raw


def _merged(section: str, cfg: dict, args: argparse.Namespace, defaults: dict) -> dict:
    out = dict(defaults)
    out.update(cfg.get(section, {}))
    for key in _SECTIONS[section]:
        flag = getattr(args, f"{section}_{key}", None)
        if flag is not None:
            out[key] = flag
    return out


def _number(section: str, key: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"config key '{section}.{key}' must be a number, got {value!r}")
    return float(value)


def _build_system(cfg: dict, args: argparse.Namespace) -> SystemParams | None:
    merged = _merged("system", cfg, args, {})
    if not merged:
        return None
    for key in ("N", "C", "d", "M", "B"):
        if key not in merged:
            raise ConfigError(f"missing config key 'system.{key}'")
    kwargs = {k: _number("system", k, v) for k, v in merged.items()}
    kwargs["B"] = int(kwargs["B"])
    try:
        return SystemParams(**kwargs)
    except GredError as e:
        raise ConfigError(f"invalid system parameters: {e}") from e


def _build_control(cfg: dict, args: argparse.Namespace) -> ControlParams:
    merged = _merged("control", cfg, args, _CONTROL_DEFAULTS)
    vals = {k: _number("control", k, v) for k, v in merged.items()}
    try:
        return ControlParams(
            p_max=vals["p_max"],
            x_min=vals["x_min"],
            x_max=vals["x_max"],
            w=vals["w"],
            shape=BetaShape(vals["alpha"], vals["beta"]),
        )
    except GredError as e:
        raise ConfigError(f"invalid control parameters: {e}") from e


def _build_spec(cfg: dict, args: argparse.Namespace) -> ModelSpec:
    control = _build_control(cfg, args)
    system = _build_system(cfg, args)
    if system is None:
        raise ConfigError("missing 'system' section (need system.N, C, d, M, B)")
    return ModelSpec(control=control, system=system)


def _build_model(cfg: dict, args: argparse.Namespace) -> NormalizedModel:
    try:
        return _build_spec(cfg, args).build()
    except ConfigError:
        raise
    except GredError as e:
        raise ConfigError(str(e)) from e


def _orbit_settings(cfg: dict, args: argparse.Namespace) -> dict:
    merged = _merged("orbit", cfg, args, _ORBIT_DEFAULTS)
    out = {
        "transient": int(_number("orbit", "transient", merged["transient"])),
        "samples": int(_number("orbit", "samples", merged["samples"])),
        "x0": None,
    }
    if merged["x0"] is not None:
        out["x0"] = _number("orbit", "x0", merged["x0"])
    return out


def _scan_settings(cfg: dict, args: argparse.Namespace) -> WBifScan:
    merged = _merged("scan", cfg, args, _SCAN_DEFAULTS)
    try:
        return WBifScan(
            w_lo=_number("scan", "w_lo", merged["w_lo"]),
            w_hi=_number("scan", "w_hi", merged["w_hi"]),
            coarse=int(_number("scan", "points", merged["points"])),
            refine_tol=_number("scan", "refine_tol", merged["refine_tol"]),
            diameter_tol=_number("scan", "diameter_tol", merged["diameter_tol"]),
        )
    except GredError as e:
        raise ConfigError(f"invalid scan settings: {e}") from e


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file")
    g = p.add_argument_group("system overrides")
    for key in _SECTIONS["system"]:
        g.add_argument(f"--{key}", dest=f"system_{key}", type=float)
    g = p.add_argument_group("control overrides")
    for key in _SECTIONS["control"]:
        flag = key.replace("_", "-")
        g.add_argument(f"--{flag}", dest=f"control_{key}", type=float)


def _add_orbit_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("orbit overrides")
    g.add_argument("--x0", dest="orbit_x0", type=float)
    g.add_argument("--transient", dest="orbit_transient", type=int)
    g.add_argument("--samples", dest="orbit_samples", type=int)


def _add_scan_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("scan overrides")
    g.add_argument("--w-lo", dest="scan_w_lo", type=float)
    g.add_argument("--w-hi", dest="scan_w_hi", type=float)
    g.add_argument("--scan-points", dest="scan_points", type=int)
    g.add_argument("--refine-tol", dest="scan_refine_tol", type=float)
    g.add_argument("--diameter-tol", dest="scan_diameter_tol", type=float)


def _out_stream(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _cmd_model(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    m = _build_model(cfg, args)
    fp = m.fixed_point()
    print(f"a1 = {m.a1:.12g}")
    print(f"a2 = {m.a2:.12g}")
    print(f"theta_l = {m.theta_l:.12g}")
    print(f"theta_r = {m.theta_r:.12g}")
    print(f"continuous_at_theta_r = {str(m.continuous_at_theta_r).lower()}")
    if fp is None:
        print("x_star = none")
    else:
        print(f"x_star = {fp.x_star:.12g}")
    return 0


def _cmd_verdict(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    m = _build_model(cfg, args)
    v = stability.verdict(m)
    if args.json:
        print(json.dumps(v.to_dict(), indent=2))
    else:
        print(v.format_report())
    return 0


def _cmd_chaos(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    m = _build_model(cfg, args)
    orbit = _orbit_settings(cfg, args)
    cert = chaos_mod.li_yorke_certificate(m)
    x0 = orbit["x0"]
    if x0 is None:
        x0 = 0.5 * (m.theta_l + m.theta_r)
    lam = chaos_mod.lyapunov(
        m,
        chaos_mod.OrbitConfig(
            x0=x0, transient=orbit["transient"], samples=chaos_mod.LYAPUNOV_SAMPLES
        ),
    )
    out = cert.to_dict()
    out["lyapunov"] = lam
    out["lyapunov_x0"] = x0
    print(json.dumps(out, indent=2))
    return 0


def _cmd_bif(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    spec = _build_spec(cfg, args)
    orbit = _orbit_settings(cfg, args)
    try:
        axis = SweepAxis(parameter=args.param, lo=args.lo, hi=args.hi, points=args.points)
    except GredError as e:
        raise ConfigError(str(e)) from e
    rows = bifurcation_sweep(
        spec,
        axis,
        transient=orbit["transient"],
        samples=orbit["samples"],
        lyap_samples=args.lyap_samples,
        workers=args.workers,
        continuation=args.continuation,
    )
    fh, owned = _out_stream(args.out)
    try:
        write_bif_csv(rows, fh)
    finally:
        if owned:
            fh.close()
    return 0


def _cmd_wbif(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    spec = _build_spec(cfg, args)
    scan = _scan_settings(cfg, args)
    value, status = w_bif_status(spec, scan)
    if value is None:
        print(f"w_bif = not_found ({status})")
    else:
        print(f"w_bif = {value:.12g}")
    return 0


def _cmd_grid(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    spec = _build_spec(cfg, args)
    scan = _scan_settings(cfg, args)
    cells = alpha_beta_grid(
        spec,
        alpha_lo=args.alpha_lo,
        alpha_hi=args.alpha_hi,
        beta_lo=args.beta_lo,
        beta_hi=args.beta_hi,
        points=args.points,
        scan=scan,
        workers=args.workers,
    )
    fh, owned = _out_stream(args.out)
    try:
        write_grid_csv(cells, fh)
    finally:
        if owned:
            fh.close()
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gred",
        description="Generalized RED queue dynamics: models, stability, chaos, sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("model", help="print the normalized model constants")
    _add_common_flags(p)
    p.set_defaults(func=_cmd_model)

    p = sub.add_parser("verdict", help="global-stability certification report")
    _add_common_flags(p)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=_cmd_verdict)

    p = sub.add_parser("chaos", help="Li-Yorke certificate and Lyapunov exponent")
    _add_common_flags(p)
    _add_orbit_flags(p)
    p.set_defaults(func=_cmd_chaos)

    p = sub.add_parser("bif", help="bifurcation sweep to CSV")
    _add_common_flags(p)
    _add_orbit_flags(p)
    p.add_argument("--param", required=True, help="swept parameter name")
    p.add_argument("--lo", required=True, type=float)
    p.add_argument("--hi", required=True, type=float)
    p.add_argument("--points", required=True, type=int)
    p.add_argument("--lyap-samples", type=int, default=5000)
    p.add_argument("--continuation", action="store_true")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default=None, help="output CSV path (default stdout)")
    p.set_defaults(func=_cmd_bif)

    p = sub.add_parser("wbif", help="bifurcation point of the averaging weight")
    _add_common_flags(p)
    _add_scan_flags(p)
    p.set_defaults(func=_cmd_wbif)

    p = sub.add_parser("grid", help="w_bif over an (alpha, beta) grid, to CSV")
    _add_common_flags(p)
    _add_scan_flags(p)
    p.add_argument("--alpha-lo", type=float, default=0.002)
    p.add_argument("--alpha-hi", type=float, default=1.5)
    p.add_argument("--beta-lo", type=float, default=0.002)
    p.add_argument("--beta-hi", type=float, default=1.5)
    p.add_argument("--points", type=int, default=40)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default=None, help="output CSV path (default stdout)")
    p.set_defaults(func=_cmd_grid)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code else 0
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except GredError as e:
        print(f"validation error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"runtime error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
