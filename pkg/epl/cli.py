#!/usr/bin/env python3

import argparse
import csv
import io
import logging
import sys
from pathlib import Path
from typing import Any, List, Optional, Sequence

from .checks import relative_residual
from .errors import DomainError, EplError, NumericalFailure, VerificationFailure
from .logger import append_log
from .logging_config import file_logging_requested, get_logger
from .pade import interpolation_residuals, shift_T, solve_interpolation
from .painleve import fev_residual, gev_residual, point_from_pade, step_traced
from .schema import build_report_structure, complex_pair
from .settings import RunConfig, build_settings
from .special_functions import ell_gamma, gen_pochhammer, theta_pochhammer, theta_terms, v_series
from .storage.json_store import dumps_report, save_json
from .suites import SUITE_NAMES, run_suites
from .utils import parse_complex

logger = logging.getLogger(__name__)

ORBIT_HEADER = ["step", "re_f", "im_f", "re_g", "im_g", "fev_residual", "gev_residual", "pade_crosscheck"]


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.out:
        path = Path(cfg.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as f:
            f.write(text)
        logger.info("wrote %s", path)
    else:
        sys.stdout.write(text)


def _emit_report(command: str, cfg: RunConfig, body: dict) -> None:
    report = build_report_structure(command, cfg.to_dict(), body)
    if cfg.out:
        save_json(Path(cfg.out), report)
        logger.info("wrote %s", cfg.out)
    else:
        sys.stdout.write(dumps_report(report))


def _value_body(value: Any, **extra: Any) -> dict:
    z = complex(value)
    body = {"re": z.real, "im": z.imag}
    body.update(extra)
    return body


def _fmt(value: Any) -> str:
    return "" if value is None else f"{float(value):.16e}"


# ===========================
# SPECIAL FUNCTION COMMANDS
# ===========================

def theta_command(args: Any, cfg: RunConfig) -> int:
    b = cfg.bases if args.p is None else cfg.bases.with_p(parse_complex(args.p))
    value, terms = theta_terms(parse_complex(args.x), b)
    _emit_report("theta", cfg, _value_body(value, terms_used=terms, p=complex_pair(b.p)))
    return 0


def gamma_command(args: Any, cfg: RunConfig) -> int:
    b = cfg.bases if args.p is None else cfg.bases.with_p(parse_complex(args.p))
    x = parse_complex(args.x)
    if args.mode == "gamma":
        value = ell_gamma(x, b)
    elif args.mode == "pochhammer":
        if args.s is None:
            raise DomainError("pochhammer mode needs --s")
        s = float(args.s)
        value = theta_pochhammer(x, int(s) if s.is_integer() else s, b)
    else:
        if args.v is None or args.length is None:
            raise DomainError("genpoch mode needs --v and --length")
        value = gen_pochhammer(x, parse_complex(args.v), args.length, b)
    _emit_report("gamma", cfg, _value_body(value, mode=args.mode))
    return 0


def vseries_command(args: Any, cfg: RunConfig) -> int:
    b = cfg.bases
    us = [parse_complex(u) for u in args.us]
    value = v_series(parse_complex(args.u0), us, parse_complex(args.z), b)
    _emit_report("vseries", cfg, _value_body(value, terms=len(us) + 1))
    return 0


# ===========================
# PADE-SOLVE COMMAND
# ===========================

def pade_solve_command(args: Any, cfg: RunConfig) -> int:
    b, P = cfg.bases, cfg.pade
    tol = cfg.tol("solve")
    ip = solve_interpolation(P, b, residual_tol=float("inf"))
    residuals = [float(r) for r in interpolation_residuals(ip, P, b)]

    extracted = None
    if P.n >= 1:
        point, _ = point_from_pade(P, cfg.gauge, b)
        extracted = {"f": complex_pair(point.f), "g": complex_pair(point.g)}

    passed = max(residuals) <= tol
    _emit_report("pade-solve", cfg, {
        "u": [complex_pair(c) for c in ip.u],
        "v": [complex_pair(c) for c in ip.v],
        "residuals": [{"s": s, "residual": r} for s, r in enumerate(residuals)],
        "extracted": extracted,
        "passed": passed,
    })
    if not passed:
        raise VerificationFailure(f"grid residual {max(residuals):.3e} above {tol:.1e}")
    return 0


# ===========================
# ORBIT COMMAND
# ===========================

def orbit_rows(cfg: RunConfig, steps: int) -> List[List[str]]:
    b, P, c = cfg.bases, cfg.pade, cfg.gauge
    if steps < 0:
        raise DomainError("steps must be >= 0")
    if P.n < 1:
        raise DomainError("the orbit starts from an extracted point and needs n >= 1")
    if steps > P.n:
        raise DomainError(f"each step lowers n by one: at most {P.n} steps from n = {P.n}")

    point, S = point_from_pade(P, c, b)
    rows = [["0", _fmt(point.f.real), _fmt(point.f.imag), _fmt(point.g.real), _fmt(point.g.imag),
             "", "", ""]]
    for k in range(1, steps + 1):
        try:
            trace = step_traced(point, S, b)
        except EplError as exc:
            raise NumericalFailure(f"step {k} failed: {exc}", step=k)
        fev = fev_residual(point.f, trace.point.f, trace.g_anchor.x, S, b)
        gev = gev_residual(point.g, trace.point.g, trace.fbar_anchor.x, S, b)
        P = shift_T(P, b)
        crosscheck = None
        if P.n >= 1:
            expected, _ = point_from_pade(P, c, b)
            crosscheck = max(relative_residual(trace.point.f, expected.f),
                             relative_residual(trace.point.g, expected.g))
        point, S = trace.point, trace.params
        logger.info("orbit step %d done (fev %.2e, gev %.2e)", k, float(fev), float(gev))
        rows.append([str(k), _fmt(point.f.real), _fmt(point.f.imag), _fmt(point.g.real),
                     _fmt(point.g.imag), _fmt(fev), _fmt(gev), _fmt(crosscheck)])
    return rows


def orbit_command(args: Any, cfg: RunConfig) -> int:
    rows = orbit_rows(cfg, args.steps)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(ORBIT_HEADER)
    writer.writerows(rows)
    _emit(buffer.getvalue(), cfg)
    return 0


# ===========================
# VERIFY COMMAND
# ===========================

def verify_command(args: Any, cfg: RunConfig) -> int:
    names = list(SUITE_NAMES) if args.suite == "all" else [args.suite]
    reports = run_suites(names, cfg)
    passed = all(r.passed for r in reports)
    _emit_report("verify", cfg, {
        "suites": [r.to_dict() for r in reports],
        "passed": passed,
    })
    if not passed:
        failed = [f"{r.suite}.{rec.name}" for r in reports for rec in r.failures()]
        raise VerificationFailure(f"{len(failed)} check(s) failed: {', '.join(failed)}")
    return 0


# ===========================
# CLI PARSER
# ===========================

def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON (or YAML) config file", default=None)
    common.add_argument("--seed", type=int, default=None, help="Seed for every random draw")
    common.add_argument("--precision-bits", type=int, default=None,
                        help="Working precision (overrides EPL_PRECISION_BITS)")
    common.add_argument("--tol", type=float, default=None, help="Override every tolerance")
    common.add_argument("--profile", default=None, help="Sample sizes: default or acceptance")
    common.add_argument("--out", default=None, help="Write output here instead of stdout")
    common.add_argument("--log", default=None, help="Append a JSON line per run to this file")
    common.add_argument("--verbose", action="store_true", default=False, help="Debug logging")
    return common


def _size_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--m", type=int, default=None, help="Degree m of V")
    parser.add_argument("--n", type=int, default=None, help="Degree n of U")


def build_cli() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="epl", description="Elliptic Painleve / Pade interpolation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_options()

    # THETA
    p_theta = sub.add_parser("theta", parents=[common], help="Evaluate theta(x; p)")
    p_theta.add_argument("--x", required=True, help="Argument, e.g. 0.5, 1+0.2j or 1,0.2")
    p_theta.add_argument("--p", default=None, help="Elliptic base (default from config)")

    # GAMMA
    p_gamma = sub.add_parser("gamma", parents=[common], help="Elliptic Gamma and Pochhammer symbols")
    p_gamma.add_argument("--mode", choices=["gamma", "pochhammer", "genpoch"], default="gamma")
    p_gamma.add_argument("--x", required=True)
    p_gamma.add_argument("--p", default=None)
    p_gamma.add_argument("--s", default=None, help="Pochhammer length (non-integer uses Gamma)")
    p_gamma.add_argument("--v", default=None, help="Step of the generalized Pochhammer")
    p_gamma.add_argument("--length", type=int, default=None, help="Length of the generalized Pochhammer")

    # VSERIES
    p_vs = sub.add_parser("vseries", parents=[common], help="Terminating very-well-poised series")
    p_vs.add_argument("--u0", required=True)
    p_vs.add_argument("--us", nargs="+", required=True)
    p_vs.add_argument("--z", required=True)

    # PADE-SOLVE
    p_solve = sub.add_parser("pade-solve", parents=[common], help="Solve the interpolation problem")
    _size_options(p_solve)

    # ORBIT
    p_orbit = sub.add_parser("orbit", parents=[common], help="Iterate the T-evolution, CSV output")
    _size_options(p_orbit)
    p_orbit.add_argument("--steps", type=int, required=True)

    # VERIFY
    p_verify = sub.add_parser("verify", parents=[common], help="Run verification suites")
    _size_options(p_verify)
    p_verify.add_argument("--suite", choices=list(SUITE_NAMES) + ["all"], default="all")

    return parser


COMMANDS = {
    "theta": theta_command,
    "gamma": gamma_command,
    "vseries": vseries_command,
    "pade-solve": pade_solve_command,
    "orbit": orbit_command,
    "verify": verify_command,
}


# ===========================
# MAIN
# ===========================

def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_cli().parse_args(argv)
    if args.verbose:
        logging.getLogger("epl").setLevel(logging.DEBUG)
    if file_logging_requested():
        get_logger("epl", level=logging.DEBUG if args.verbose else logging.INFO)

    cfg = None
    try:
        cfg = build_settings(args, args.config)
        code = COMMANDS[args.command](args, cfg)
        message = "ok"
    except (EplError, ZeroDivisionError) as exc:
        if isinstance(exc, ZeroDivisionError):
            exc = NumericalFailure(f"division by zero: {exc}")
        code = exc.exit_code
        message = f"{type(exc).__name__}: {exc}"
        if getattr(exc, "step", None) is not None:
            message += f" (step {exc.step})"
        logger.error("%s failed: %s", args.command, message)
        print(f"ERROR: {message}", file=sys.stderr)

    log_path = args.log or (cfg.log if cfg else None)
    if log_path:
        append_log(Path(log_path), {
            "event": args.command,
            "seed": cfg.seed if cfg else args.seed,
            "status": message,
            "exit_code": code,
        })
    return code


if __name__ == "__main__":
    sys.exit(main())
