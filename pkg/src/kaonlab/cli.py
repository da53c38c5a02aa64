"""Command-line interface.

Subcommands: constants | asymmetry-scan | chsh-max | fit-zeta | wigner |
probe.  Every command is deterministic: the same configuration produces
byte-identical data output (no timestamps; run metadata only on request via
--with-metadata).

Exit codes: 0 success, 2 configuration error (bad config file, flags or
state names), 3 data error (missing/invalid data files), 4 math error
(e.g. asking for a violation threshold when nothing is violated).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bell import maximize_s
from .constants import CONFIG_ENV_VAR, PhysicalConstants, load_config
from .decoherence import (
    Basis,
    FitMode,
    bundled_cplear_path,
    fit_zeta,
    modified_asymmetry,
    read_asymmetry_csv,
)
from .evolution import joint_outcome_table
from .states import NAMED_STATE_KINDS, named_state
from .wigner import (
    two_times_scan,
    violation_threshold,
    wigner_equal_times,
    wigner_t0,
    wigner_two_times,
    zeta_lower_bound,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_MATH = 4


class _CliError(Exception):
    def __init__(self, message: str, code: int) -> None:
        super().__init__(message)
        self.code = code


def _fmt(value: float) -> str:
    return format(value, ".12g")


def _write_output(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _metadata_lines(args: argparse.Namespace) -> list[str]:
    if getattr(args, "with_metadata", False):
        return [f"# generated by kaonlab {__version__}"]
    return []


def _constants_from_args(args: argparse.Namespace) -> PhysicalConstants:
    try:
        config_path = args.config or os.environ.get(CONFIG_ENV_VAR)
        if config_path:
            constants = load_config(config_path)
        else:
            constants = PhysicalConstants()
        overrides = {}
        if args.tau_s is not None:
            overrides["tau_s"] = args.tau_s
        if args.tau_l is not None:
            overrides["tau_l"] = args.tau_l
        if args.delta_m is not None:
            overrides["delta_m"] = args.delta_m
        if overrides or args.epsilon_abs is not None or args.epsilon_phase_deg is not None:
            eps = constants.epsilon
            constants = PhysicalConstants(
                tau_s=overrides.get("tau_s", constants.tau_s),
                tau_l=overrides.get("tau_l", constants.tau_l),
                delta_m=overrides.get("delta_m", constants.delta_m),
                epsilon=eps,
            )
            magnitude = abs(constants.epsilon)
            phase = math.degrees(np.angle(constants.epsilon))
            if args.epsilon_abs is not None:
                magnitude = args.epsilon_abs
            if args.epsilon_phase_deg is not None:
                phase = args.epsilon_phase_deg
            constants = constants.with_epsilon(magnitude, phase)
        if getattr(args, "no_decays", False):
            constants = constants.without_decays()
        elif getattr(args, "gamma_l_zero", False):
            constants = constants.with_gamma_l_zero()
        return constants
    except (OSError, ValueError) as exc:
        raise _CliError(f"configuration error: {exc}", EXIT_CONFIG) from exc


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help=f"config file (fallback: ${CONFIG_ENV_VAR})")
    parser.add_argument("--tau-s", type=float, help="K_S lifetime [s]")
    parser.add_argument("--tau-l", type=float, help="K_L lifetime [s]")
    parser.add_argument("--delta-m", type=float, help="mass splitting [1/s]")
    parser.add_argument("--epsilon-abs", type=float, help="|epsilon|")
    parser.add_argument("--epsilon-phase-deg", type=float, help="arg(epsilon) [deg]")
    parser.add_argument(
        "--gamma-l-zero", action="store_true", help="switch off the K_L decay rate"
    )
    parser.add_argument(
        "--no-decays", action="store_true", help="switch off both decay rates"
    )
    parser.add_argument(
        "--format", choices=("table", "csv", "json"), default="table", dest="fmt"
    )
    parser.add_argument("--out", help="write output to this path instead of stdout")
    parser.add_argument(
        "--with-metadata",
        action="store_true",
        help="prepend a generator comment (off by default to keep outputs reproducible)",
    )


def _render_rows(
    rows: list[tuple[str, str]], fmt: str, meta: list[str], json_obj: dict
) -> str:
    if fmt == "json":
        return json.dumps(json_obj, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        lines = meta + ["key,value"] + [f"{k},{v}" for k, v in rows]
        return "\n".join(lines) + "\n"
    width = max(len(k) for k, _ in rows)
    lines = meta + [f"{k.ljust(width)}  {v}" for k, v in rows]
    return "\n".join(lines) + "\n"


# -- subcommands ----------------------------------------------------------------

def _cmd_constants(args: argparse.Namespace) -> int:
    c = _constants_from_args(args)
    eps = c.epsilon
    rows = [
        ("tau_s [s]", _fmt(c.tau_s)),
        ("tau_l [s]", _fmt(c.tau_l)),
        ("tau_l/tau_s", _fmt(c.tau_l / c.tau_s)),
        ("delta_m [1/s]", _fmt(c.delta_m)),
        ("epsilon_abs", _fmt(abs(eps))),
        ("epsilon_phase_deg", _fmt(math.degrees(np.angle(eps)) if eps != 0 else 0.0)),
        ("epsilon_re", _fmt(eps.real)),
        ("epsilon_im", _fmt(eps.imag)),
        ("gamma_s [1/s]", _fmt(c.gamma_s)),
        ("gamma_l [1/s]", _fmt(c.gamma_l)),
        ("gamma [1/s]", _fmt(c.gamma)),
        ("delta_gamma [1/s]", _fmt(c.delta_gamma)),
        ("x", _fmt(c.x)),
        ("delta_m_hat [rad/tau_s]", _fmt(c.delta_m_hat)),
        ("gamma_s_hat [1/tau_s]", _fmt(c.gamma_s_hat)),
        ("gamma_l_hat [1/tau_s]", _fmt(c.gamma_l_hat)),
    ]
    notes = []
    if abs(eps) == 0.0:
        notes.append("note: epsilon = 0, K_S coincides with the CP eigenstate K1")
    json_obj = {k: float(v) for k, v in rows}
    if notes:
        json_obj["notes"] = notes
    text = _render_rows(rows, args.fmt, _metadata_lines(args), json_obj)
    if notes and args.fmt != "json":
        text += "\n".join(notes) + "\n"
    _write_output(text, args.out)
    return EXIT_OK


def _cmd_asymmetry_scan(args: argparse.Namespace) -> int:
    c = _constants_from_args(args)
    if args.dt_max <= 0:
        raise _CliError("--dt-max must be positive", EXIT_CONFIG)
    if args.steps < 2:
        raise _CliError("--steps must be at least 2", EXIT_CONFIG)
    try:
        zetas = [float(z) for z in args.zeta.split(",") if z.strip() != ""]
    except ValueError as exc:
        raise _CliError(f"bad --zeta list: {exc}", EXIT_CONFIG) from exc
    if not zetas:
        raise _CliError("--zeta list is empty", EXIT_CONFIG)
    basis = Basis(args.basis)
    dt = np.linspace(0.0, args.dt_max, args.steps)
    curves: dict[float, list[float]] = {}
    for zeta in zetas:
        try:
            curves[zeta] = [
                modified_asymmetry(basis, float(t), 0.0, zeta, c, allow_extended=True)
                for t in dt
            ]
        except ValueError as exc:
            raise _CliError(f"scan failed: {exc}", EXIT_MATH) from exc
    header = "dt," + ",".join(f"A[zeta={zeta:g}]" for zeta in zetas)
    lines = _metadata_lines(args)
    lines.append("# time unit: tau_S; asymmetry vs time difference, " + basis.value + " basis")
    lines.append(header)
    for i, t in enumerate(dt):
        lines.append(
            ",".join([_fmt(float(t))] + [_fmt(curves[z][i]) for z in zetas])
        )
    _write_output("\n".join(lines) + "\n", args.out)
    if args.plot:
        from .plotting import render_asymmetry_scan

        render_asymmetry_scan([float(t) for t in dt], curves, args.plot)
    return EXIT_OK


def _cmd_chsh_max(args: argparse.Namespace) -> int:
    c = _constants_from_args(args)
    if args.grid_steps < 2:
        raise _CliError("--grid-steps must be at least 2", EXIT_CONFIG)
    if args.refine_iters < 0 or args.seeds < 1:
        raise _CliError("--refine-iters must be >= 0 and --seeds >= 1", EXIT_CONFIG)
    name = {"photon": "photon", "kaon": "kaon_strangeness",
            "generalized": "generalized_restricted"}[args.system]
    bounds = None
    if name == "kaon_strangeness":
        bounds = ((0.0, args.t_max),) + ((0.0, 2.0 * math.pi),) * 3
    elif name == "generalized_restricted":
        bounds = ((0.0, args.t_max),) * 4
    try:
        report = maximize_s(
            name,
            c,
            bounds=bounds,
            grid_steps=args.grid_steps,
            refine_iters=args.refine_iters,
            seeds=args.seeds,
        )
    except ValueError as exc:
        raise _CliError(f"maximization failed: {exc}", EXIT_MATH) from exc
    obj = report.as_dict()
    bound = 2.0 if name != "generalized_restricted" else 1.0
    violated = report.best_value > bound
    banner = (
        f"VIOLATION (bound {bound:g}): max S = {_fmt(report.best_value)}"
        if violated
        else f"NO VIOLATION (bound {bound:g}): max S = {_fmt(report.best_value)} <= {bound:g}"
    )
    obj["bound"] = bound
    obj["violated"] = violated
    rows = [
        ("system", args.system),
        ("best_value", _fmt(report.best_value)),
        ("grid_best_value", _fmt(report.grid_best_value)),
        ("evaluations", str(report.evaluations)),
    ] + [
        (f"argmax[{n}]", _fmt(v))
        for n, v in zip(report.param_names, report.best_params)
    ]
    text = _render_rows(rows, args.fmt, _metadata_lines(args), obj)
    if args.fmt != "json":
        text += banner + "\n"
    _write_output(text, args.out)
    return EXIT_OK


def _cmd_fit_zeta(args: argparse.Namespace) -> int:
    c = _constants_from_args(args)
    path = Path(args.data) if args.data else bundled_cplear_path()
    if not path.exists():
        raise _CliError(f"data file not found: {path}", EXIT_DATA)
    try:
        points = read_asymmetry_csv(path)
    except ValueError as exc:
        raise _CliError(f"data error: {exc}", EXIT_DATA) from exc
    basis = Basis(args.basis)
    mode = (
        FitMode.CORRECTED_THEORY_SCALING
        if args.mode == "corrected"
        else FitMode.RAW_MODEL
    )
    try:
        result = fit_zeta(points, basis, mode, c)
    except ValueError as exc:
        raise _CliError(f"fit failed: {exc}", EXIT_DATA) from exc
    obj = result.as_dict()
    warning = None
    if result.sigma_minus + result.sigma_plus > 0.5:
        warning = (
            "warning: wide interval; this basis/mode barely constrains zeta "
            "(qualitative comparison only)"
        )
        obj["warning"] = warning
    if args.fmt == "json":
        text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    else:
        rows = [
            ("zeta_hat", _fmt(result.zeta_hat)),
            ("sigma_minus", _fmt(result.sigma_minus)),
            ("sigma_plus", _fmt(result.sigma_plus)),
            ("chi2_min", _fmt(result.chi2_min)),
            ("ndf", str(result.ndf)),
            ("basis", result.basis.value),
            ("mode", result.mode.value),
        ]
        text = _render_rows(rows, args.fmt, _metadata_lines(args), obj)
        summary = (
            f"zeta = {result.zeta_hat:.3f} -{result.sigma_minus:.3f} "
            f"+{result.sigma_plus:.3f} (chi2/ndf = {result.chi2_min:.3f}/{result.ndf})"
        )
        text += summary + "\n"
        if warning:
            text += warning + "\n"
    _write_output(text, args.out)
    return EXIT_OK


def _wigner_eval_rows(tag: str, ev) -> tuple[list[tuple[str, str]], dict]:
    rows = [
        ("scenario", tag),
        ("lhs", _fmt(ev.lhs)),
        ("rhs", _fmt(ev.rhs)),
        ("violated", str(ev.violated).lower()),
        ("times", ",".join(_fmt(t) for t in ev.times)),
    ]
    obj = {
        "scenario": tag,
        "lhs": ev.lhs,
        "rhs": ev.rhs,
        "violated": ev.violated,
        "times": list(ev.times),
    }
    if ev.h_value is not None:
        rows.append(("h", _fmt(ev.h_value)))
        obj["h"] = ev.h_value
    if ev.epsilon_route_violated is not None:
        rows.append(("epsilon_route_violated", str(ev.epsilon_route_violated).lower()))
        obj["epsilon_route_violated"] = ev.epsilon_route_violated
    return rows, obj


def _cmd_wigner(args: argparse.Namespace) -> int:
    c = _constants_from_args(args)
    scenario = args.scenario
    try:
        if scenario == "t0":
            rows, obj = _wigner_eval_rows("t0", wigner_t0(c))
        elif scenario == "equal-times":
            rows, obj = _wigner_eval_rows(
                f"equal-times t={args.t:g}", wigner_equal_times(args.t, c)
            )
        elif scenario == "two-times":
            rows, obj = _wigner_eval_rows(
                f"two-times t_a={args.t_a:g} t_b={args.t_b:g}",
                wigner_two_times(args.t_a, args.t_b, c),
            )
        elif scenario == "threshold":
            value = violation_threshold(c, tol=args.tol)
            rows = [("scenario", "threshold"), ("threshold [tau_S]", _fmt(value))]
            obj = {"scenario": "threshold", "threshold": value}
        elif scenario == "zeta-bound":
            bound = zeta_lower_bound(c)
            if bound.vacuous:
                rows = [("scenario", "zeta-bound"), ("constraint", "none (Re eps <= |eps|^2)")]
                obj = {"scenario": "zeta-bound", "vacuous": True}
            else:
                rows = [("scenario", "zeta-bound"), ("zeta_lower_bound", _fmt(bound.value))]
                obj = {"scenario": "zeta-bound", "vacuous": False, "value": bound.value}
        else:  # region
            if args.resolution <= 0 or args.t_a_max < 0 or args.t_b_max < 0:
                raise _CliError(
                    "--resolution must be positive and scan bounds nonnegative",
                    EXIT_CONFIG,
                )
            t_a = np.arange(0.0, args.t_a_max + args.resolution / 2, args.resolution)
            t_b = np.arange(0.0, args.t_b_max + args.resolution / 2, args.resolution)
            scan = two_times_scan(t_a, t_b, c)
            lines = _metadata_lines(args)
            lines.append("# time unit: tau_S; generalized inequality, bound 1")
            lines.append("t_a,t_b,lhs,rhs,violated")
            for a, b, lhs, rhs, flag in scan:
                lines.append(
                    f"{_fmt(a)},{_fmt(b)},{_fmt(lhs)},{_fmt(rhs)},{int(flag)}"
                )
            _write_output("\n".join(lines) + "\n", args.out)
            if args.plot:
                from .plotting import render_wigner_region

                render_wigner_region(scan, args.plot)
            return EXIT_OK
    except ValueError as exc:
        raise _CliError(f"wigner evaluation failed: {exc}", EXIT_MATH) from exc
    _write_output(
        _render_rows(rows, args.fmt, _metadata_lines(args), obj), args.out
    )
    return EXIT_OK


def _cmd_probe(args: argparse.Namespace) -> int:
    c = _constants_from_args(args)
    try:
        left = named_state(args.left, c)
        right = named_state(args.right, c)
    except ValueError as exc:
        raise _CliError(str(exc), EXIT_CONFIG) from exc
    try:
        table = joint_outcome_table(left, args.t_l, right, args.t_r, c)
    except ValueError as exc:
        raise _CliError(f"probe failed: {exc}", EXIT_MATH) from exc
    rows = [
        ("left", f"{args.left} @ t={args.t_l:g}"),
        ("right", f"{args.right} @ t={args.t_r:g}"),
        ("p_yy", _fmt(table.p_yy)),
        ("p_yn", _fmt(table.p_yn)),
        ("p_ny", _fmt(table.p_ny)),
        ("p_nn", _fmt(table.p_nn)),
        ("sum", _fmt(table.total)),
    ]
    obj = {
        "left": args.left,
        "t_l": args.t_l,
        "right": args.right,
        "t_r": args.t_r,
        "p_yy": table.p_yy,
        "p_yn": table.p_yn,
        "p_ny": table.p_ny,
        "p_nn": table.p_nn,
    }
    _write_output(_render_rows(rows, args.fmt, _metadata_lines(args), obj), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kaonlab",
        description="Entangled neutral-kaon probabilities, Bell tests and decoherence fits "
        "(all times in units of tau_S).",
    )
    parser.add_argument("--version", action="version", version=f"kaonlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="report stored and derived constants")
    _common_flags(p)
    p.set_defaults(handler=_cmd_constants)

    p = sub.add_parser("asymmetry-scan", help="asymmetry vs time difference for several zeta")
    _common_flags(p)
    p.add_argument("--dt-max", type=float, default=5.0)
    p.add_argument("--steps", type=int, default=101)
    p.add_argument("--zeta", default="0,0.13,1", help="comma-separated zeta values")
    p.add_argument("--basis", choices=("mass", "strangeness"), default="mass")
    p.add_argument("--plot", help="also render the curves to this image path")
    p.set_defaults(handler=_cmd_asymmetry_scan)

    p = sub.add_parser("chsh-max", help="maximize a Bell-CHSH S-function")
    _common_flags(p)
    p.add_argument("--system", choices=("photon", "kaon", "generalized"), default="photon")
    p.add_argument("--grid-steps", type=int, default=32)
    p.add_argument("--refine-iters", type=int, default=2000)
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--t-max", type=float, default=4.0, help="upper time bound [tau_S]")
    p.set_defaults(handler=_cmd_chsh_max)

    p = sub.add_parser("fit-zeta", help="chi-square fit of the decoherence parameter")
    _common_flags(p)
    p.add_argument("--data", help="asymmetry CSV (default: bundled CPLEAR points)")
    p.add_argument("--basis", choices=("mass", "strangeness"), default="mass")
    p.add_argument("--mode", choices=("corrected", "raw"), default="corrected")
    p.set_defaults(handler=_cmd_fit_zeta)

    p = sub.add_parser("wigner", help="Wigner-type inequality scenarios")
    _common_flags(p)
    p.add_argument(
        "--scenario",
        choices=("t0", "equal-times", "two-times", "threshold", "zeta-bound", "region"),
        default="t0",
    )
    p.add_argument("--t", type=float, default=0.0, help="equal-times t [tau_S]")
    p.add_argument("--t-a", type=float, default=0.0)
    p.add_argument("--t-b", type=float, default=2.0)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--t-a-max", type=float, default=1.0)
    p.add_argument("--t-b-max", type=float, default=6.0)
    p.add_argument("--resolution", type=float, default=0.05)
    p.add_argument("--plot", help="render the region scan to this image path")
    p.set_defaults(handler=_cmd_wigner)

    p = sub.add_parser("probe", help="joint outcome table for two detections")
    _common_flags(p)
    p.add_argument("--left", choices=NAMED_STATE_KINDS, default="K0")
    p.add_argument("--right", choices=NAMED_STATE_KINDS, default="K0bar")
    p.add_argument("--t-l", type=float, default=0.0)
    p.add_argument("--t-r", type=float, default=0.0)
    p.set_defaults(handler=_cmd_probe)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except _CliError as exc:
        print(f"kaonlab: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
