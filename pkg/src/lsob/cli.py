"""Command line interface.

    lsob compute --config example1 --n 12 [--out report.json]
    lsob verify  --config example5 --n-max 12
    lsob electro --config example5 --n 12 [--out report.json] [--csv zeros.csv]

``--config`` takes a JSON file or the name of a shipped fixture.  Exit codes:
0 success, 2 configuration error, 3 computation or identity failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time

from .config import fixture_names, load_config
from .errors import ConfigError, LsobError
from .pipeline import DEFAULT_DIGITS, compute_record, electro_record, fmt, header, verify_records
from .structure import SobolevSequence

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_COMPUTE = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which matches the config-error code
    pass


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lsob", description="Laguerre-Sobolev polynomials, structure checks and zero electrostatics.")
    p.add_argument("--list-fixtures", action="store_true", help="print the shipped config names and exit")
    sub = p.add_subparsers(dest="command")

    def common(sp):
        sp.add_argument("--config", required=True, help="JSON config file or fixture name")
        sp.add_argument("--digits", type=int, default=DEFAULT_DIGITS, help="significant digits for big floats")
        sp.add_argument("--timings", action="store_true", help="add wall-clock timings (breaks byte-identical output)")

    c = sub.add_parser("compute", help="S_n, its mass derivatives and sigma_n")
    common(c)
    c.add_argument("--n", type=int, help="degree (defaults to the config's n)")
    c.add_argument("--out", help="write the JSON report here instead of stdout")

    v = sub.add_parser("verify", help="exact identity suite for n = 1..n_max")
    common(v)
    v.add_argument("--n-max", type=int, help="largest degree (defaults to the config's n)")
    v.add_argument("--out", help="write the JSON report here instead of stdout")

    e = sub.add_parser("electro", help="electrostatic model and Hessian classification")
    common(e)
    e.add_argument("--n", type=int, help="degree (defaults to the config's n)")
    e.add_argument("--fixed", help="comma-separated 1-based charges to pin in the conditional problem")
    e.add_argument("--out", help="write the JSON report here instead of stdout")
    e.add_argument("--csv", help="write index, zero, gradient_component, eigenvalue rows here")
    return p


def _emit(report: dict, out: str | None):
    text = json.dumps(report, indent=2, sort_keys=False) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _degree(args_n, run, what):
    n = args_n if args_n is not None else run.n
    if n is None:
        raise ConfigError(f"no {what} given on the command line or in the config")
    if n < 0:
        raise ConfigError(f"{what} must be nonnegative")
    return n


def _write_csv(path, record, rep, digits):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "zero", "gradient_component", "eigenvalue"])
        eig = rep.hessian_eigenvalues
        for k, z in enumerate(record["zeros"]):
            g = fmt(rep.gradient[k], digits) if k < len(rep.gradient) else ""
            lam = fmt(eig[k], digits) if k < len(eig) else ""
            zs = z if isinstance(z, str) else f"{z['re']}{'+' if not z['im'].startswith('-') else ''}{z['im']}j"
            w.writerow([k + 1, zs, g, lam])


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.list_fixtures:
        print("\n".join(fixture_names()))
        return EXIT_OK
    if not args.command:
        build_parser().print_help()
        return EXIT_CONFIG
    try:
        cfg_run = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    cfg = cfg_run.sobolev
    report = header(cfg, args.command, cfg_run.source)
    t0 = time.perf_counter()
    try:
        if args.command == "compute":
            n = _degree(args.n, cfg_run, "--n")
            report["result"] = compute_record(cfg, n, digits=args.digits)
            status = EXIT_OK
        elif args.command == "verify":
            n_max = _degree(args.n_max, cfg_run, "--n-max")
            checks = verify_records(cfg, n_max)
            failed = [c for c in checks if not c["passed"]]
            report["checks"] = checks
            report["summary"] = {"total": len(checks), "failed": len(failed), "passed": not failed}
            status = EXIT_OK if not failed else EXIT_COMPUTE
            for c in failed:
                print(f"FAIL n={c['n']} {c['check']}: {c['detail']}", file=sys.stderr)
        else:
            n = _degree(args.n, cfg_run, "--n")
            if n < 1:
                raise ConfigError("electro needs n >= 1")
            fixed = None
            if args.fixed is not None:
                try:
                    fixed = [int(s) for s in args.fixed.split(",") if s.strip()]
                except ValueError:
                    raise ConfigError("--fixed must be comma-separated integers") from None
            record, rep = electro_record(cfg, n, SobolevSequence(cfg), args.digits, fixed)
            report["result"] = record
            if args.csv:
                _write_csv(args.csv, record, rep, args.digits)
            status = EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (LsobError, ArithmeticError, ValueError) as exc:
        print(f"computation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    if args.timings:
        report["timings"] = {"seconds": round(time.perf_counter() - t0, 6)}
    _emit(report, args.out)
    return status


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
