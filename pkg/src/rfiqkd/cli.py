"""Command-line interface.

Subcommands ``scan-distance``, ``scan-pulses``, ``compare`` write CSV;
``optimize`` prints a single-point key-rate report as JSON.

Exit codes: 0 success, 2 configuration/validation/I-O error, 3 numerical error.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict, replace

from . import kernel
from .errors import ConfigError, NumericalError, QKDError
from .optimizer import optimize, unbiased_baseline
from .scan import (
    CSV_COLUMNS,
    MODES,
    ScanIOError,
    ScanSpec,
    emit_csv,
    format_row,
    parse_config,
    run_comparison,
    run_distance_scan,
    run_pulse_scan,
)
from .security import SecurityMode

log = logging.getLogger("rfiqkd")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _beta_list(text):
    try:
        return tuple(float(v) for v in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid angle list {text!r}") from None


def _u64(text):
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value scan configuration file")
    common.add_argument("--out", help="output CSV path (scans) or JSON path (optimize)")
    common.add_argument("--seed", type=_u64)
    common.add_argument("--beta", type=_beta_list, help="rotation angle(s) in degrees, comma separated")
    common.add_argument("--n-total", type=float, help="total pulses N")
    common.add_argument("--gamma", type=float, help="fluctuation width in standard deviations")
    common.add_argument("--mode", choices=MODES)
    common.add_argument("--security-mode", type=SecurityMode.parse,
                        help="rfi-ie (default) or rfi-literal")
    common.add_argument("--n-starts", type=int)
    common.add_argument("--distance", type=float,
                        help="fixed distance in km (scan-pulses, optimize)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="rfiqkd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("scan-distance", parents=[common], help="key rate versus distance")
    sub.add_parser("scan-pulses", parents=[common], help="key rate versus total pulses N")
    sub.add_parser("compare", parents=[common], help="biased RFI versus biased BB84")
    sub.add_parser("optimize", parents=[common], help="optimize a single point")
    return parser


def spec_from_args(args) -> ScanSpec:
    spec = parse_config(args.config) if args.config else ScanSpec()
    overrides = {
        "seed": args.seed,
        "beta_list": args.beta,
        "n_total": args.n_total,
        "gamma": args.gamma,
        "mode": args.mode,
        "security_mode": args.security_mode,
        "n_starts": args.n_starts,
        "out": args.out,
        "distance_start": args.distance,
    }
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if "distance_start" in overrides:
        overrides["distance_stop"] = max(spec.distance_stop, overrides["distance_start"])
    return replace(spec, **overrides)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, SecurityMode):
        return obj.value
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def _optimize_point(spec: ScanSpec) -> dict:
    beta = spec.beta_list[0]
    scenario = spec.scenario(spec.mode, beta, spec.distance_start, spec.n_total)
    if spec.mode == "rfi-unbiased":
        params, report = unbiased_baseline(scenario)
    else:
        params, report = optimize(scenario, spec.optimizer_config())
    return _jsonable({
        "scenario": {
            "mode": spec.mode,
            "beta_deg": beta,
            "distance_km": spec.distance_start,
            "n_pulses": spec.n_total,
            "gamma": spec.gamma,
            "channel": asdict(scenario.channel),
            "f": scenario.security.f,
            "security_mode": scenario.security.mode,
        },
        "optimizer": asdict(spec.optimizer_config()),
        "kernel": kernel.BACKEND,
        "params": params.as_dict(),
        "report": asdict(report),
    })


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        spec = spec_from_args(args)
        log.info("kernel backend: %s", kernel.BACKEND)
        if args.command == "optimize":
            text = json.dumps(_optimize_point(spec), indent=2, sort_keys=True)
            if spec.out:
                try:
                    with open(spec.out, "w") as fh:
                        fh.write(text + "\n")
                except OSError as exc:
                    raise ScanIOError(f"cannot write {spec.out}: {exc.strerror or exc}") from exc
            else:
                print(text)
            return EXIT_OK
        if args.command == "scan-distance":
            rows = run_distance_scan(spec)
        elif args.command == "scan-pulses":
            rows = run_pulse_scan(spec)
        else:
            rows = run_comparison(spec)
        out = spec.out or sys.stdout
        if out is sys.stdout:
            print(",".join(CSV_COLUMNS))
            for row in rows:
                print(format_row(row))
        else:
            emit_csv(rows, out)
            log.info("wrote %d rows to %s", len(rows), out)
        return EXIT_OK
    except (ConfigError, ScanIOError) as exc:
        print(f"rfiqkd: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"rfiqkd: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except QKDError as exc:
        print(f"rfiqkd: error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
