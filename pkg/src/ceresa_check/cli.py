"""Command line driver: ``ceresa-check verify|scan|selftest``."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import report
from .errors import CeresaError
from .numeric import AUTO, EXTENDED, STANDARD
from .selftest import SUITES, run_suite
from .volume import (
    DEFAULT_MARGIN,
    DEFAULT_TARGET_FRAC_ERROR,
    NONTRIVIAL,
    Curve,
    max_k,
    verdict,
)

log = logging.getLogger("ceresa_check")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2
EXIT_SELFTEST = 3
EXIT_USAGE = 64
EXIT_INTERRUPTED = 130

CONFIG_ENV = "CERESA_CHECK_CONFIG"
N_MIN, N_MAX = 4, 10**6
TARGET_MIN, TARGET_MAX = 1e-12, 1e-3
DEFAULTS = {
    "precision": AUTO,
    "target_frac_error": DEFAULT_TARGET_FRAC_ERROR,
    "margin_factor": DEFAULT_MARGIN,
    "threads": 1,
    "output": "human",
    "k": "1",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class ScanConfig:
    n_from: int
    n_to: int
    k: int | str
    precision: str
    target_frac_error: float
    margin_factor: float
    threads: int
    output: str
    cross_check: bool = False
    timing: bool = False

    def __post_init__(self):
        if not (N_MIN <= self.n_from <= self.n_to <= N_MAX):
            raise UsageError(f"N range must satisfy {N_MIN} <= from <= to <= {N_MAX}")
        if not (TARGET_MIN <= self.target_frac_error <= TARGET_MAX):
            raise UsageError(f"target-frac-error must lie in [{TARGET_MIN:g}, {TARGET_MAX:g}]")
        if not self.margin_factor > 0:
            raise UsageError("margin-factor must be positive")
        if self.threads < 1:
            raise UsageError("threads must be >= 1")
        if self.precision not in (AUTO, STANDARD, EXTENDED):
            raise UsageError(f"unknown precision {self.precision!r}")
        if self.output not in ("json", "csv", "human"):
            raise UsageError(f"unknown output {self.output!r}")
        if self.k != "max" and (not isinstance(self.k, int) or self.k < 1):
            raise UsageError("k must be a positive integer or 'max'")

    def tasks(self) -> list[tuple[int, int]]:
        out = []
        for n in range(self.n_from, self.n_to + 1):
            ks = range(1, max_k(n) + 1) if self.k == "max" else [self.k]
            out.extend((n, k) for k in ks)
        return out


def load_config_file() -> dict:
    path = os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"config file {path} must hold a JSON object")
    unknown = set(data) - set(DEFAULTS)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return data


def _resolve(args, name: str, file_cfg: dict):
    value = getattr(args, name, None)
    if value is not None:
        return value
    return file_cfg.get(name, DEFAULTS[name])


def _parse_k(raw) -> int | str:
    if raw == "max":
        return "max"
    try:
        return int(raw)
    except (TypeError, ValueError):
        raise UsageError(f"k must be a positive integer or 'max', got {raw!r}") from None


def build_config(args, n_from: int, n_to: int) -> ScanConfig:
    file_cfg = load_config_file()
    return ScanConfig(
        n_from=n_from,
        n_to=n_to,
        k=_parse_k(_resolve(args, "k", file_cfg)),
        precision=_resolve(args, "precision", file_cfg),
        target_frac_error=float(_resolve(args, "target_frac_error", file_cfg)),
        margin_factor=float(_resolve(args, "margin_factor", file_cfg)),
        threads=int(_resolve(args, "threads", file_cfg)),
        output=_resolve(args, "output", file_cfg),
        cross_check=bool(getattr(args, "cross_check", False)),
        timing=bool(getattr(args, "timing", False)),
    )


def _emit_header(cfg: ScanConfig, out) -> None:
    if cfg.output == "csv":
        out.write(report.format_csv([report.CSV_COLUMNS]))


def _render(cfg: ScanConfig, cert, seconds) -> str:
    secs = seconds if cfg.timing else None
    if cfg.output == "json":
        return report.to_json(cert) + "\n"
    if cfg.output == "csv":
        return report.format_csv([report.csv_row(cert, secs)])
    text = report.human(cert)
    if secs is not None:
        text += f"\n  seconds       {secs:.3f}"
    return text + "\n"


def _render_failure(cfg: ScanConfig, curve: Curve, k: int, message: str, seconds) -> str:
    secs = seconds if cfg.timing else None
    if cfg.output == "json":
        return json.dumps(report.failure_dict(curve, k, message)) + "\n"
    if cfg.output == "csv":
        return report.format_csv([report.failure_row(curve.n, k, message, secs)])
    return f"{curve} k={k}: inconclusive\n  note: {message}\n"


def evaluate_task(task) -> tuple[str, str]:
    """Worker entry point: returns (verdict, rendered text). Never raises for
    numerical failures so one bad N cannot stop a scan."""
    cfg, curve, k = task
    t0 = time.perf_counter()
    try:
        cert = verdict(curve, k, cfg.margin_factor, cfg.target_frac_error, cfg.precision, cfg.cross_check)
    except (CeresaError, ArithmeticError) as exc:
        msg = f"evaluation failed: {type(exc).__name__}: {exc}"
        return "inconclusive", _render_failure(cfg, curve, k, msg, time.perf_counter() - t0)
    return cert.verdict, _render(cfg, cert, time.perf_counter() - t0)


def cmd_verify(args) -> int:
    n = args.n
    cfg = build_config(args, n, n) if N_MIN <= n <= N_MAX else None
    if cfg is None:
        raise UsageError(f"N must lie in [{N_MIN}, {N_MAX}]")
    if args.curve == "fermat":
        curve, k = Curve.fermat(n), args.k_value
    else:
        curve, k = Curve.quotient(n, args.m), 1
    _emit_header(cfg, sys.stdout)
    try:
        cert = verdict(curve, k, cfg.margin_factor, cfg.target_frac_error, cfg.precision, cfg.cross_check)
    except CeresaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    sys.stdout.write(_render(cfg, cert, None))
    return EXIT_OK if cert.verdict == NONTRIVIAL else EXIT_INCONCLUSIVE


def cmd_scan(args) -> int:
    cfg = build_config(args, args.n_from, args.n_to)
    jobs = [(cfg, Curve.fermat(n), k) for n, k in cfg.tasks()]
    out = sys.stdout
    _emit_header(cfg, out)
    verdicts: list[str] = []
    pool = ProcessPoolExecutor(max_workers=cfg.threads) if cfg.threads > 1 and len(jobs) > 1 else None
    try:
        results = pool.map(evaluate_task, jobs, chunksize=1) if pool else map(evaluate_task, jobs)
        for v, text in results:  # map preserves submission order
            verdicts.append(v)
            out.write(text)
            out.flush()
    except KeyboardInterrupt:
        out.flush()
        print(f"interrupted after {len(verdicts)} of {len(jobs)} rows", file=sys.stderr)
        if pool:
            pool.shutdown(wait=False, cancel_futures=True)
        return EXIT_INTERRUPTED
    finally:
        if pool:
            pool.shutdown(wait=True, cancel_futures=True)
    print(report.summary(verdicts), file=sys.stderr)
    return EXIT_OK if all(v == NONTRIVIAL for v in verdicts) else EXIT_INCONCLUSIVE


def cmd_selftest(args) -> int:
    names = args.suite or list(SUITES)
    failed = []
    for name in names:
        t0 = time.perf_counter()
        res = run_suite(name, trials=args.trials, n=args.n)
        status = "pass" if res.passed else "FAIL"
        print(
            f"{name:12s} {status} trials={res.trials} max_residual={res.max_residual:.3e} "
            f"tolerance={res.tolerance:.3e} seconds={time.perf_counter() - t0:.2f}"
        )
        if not res.passed:
            failed.append(name)
            for f in res.failures[:10]:
                print(f"  {name}: {f}", file=sys.stderr)
    if failed:
        print(f"failed suites: {', '.join(failed)}", file=sys.stderr)
        return EXIT_SELFTEST
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", choices=("json", "csv", "human"), default=None)
    p.add_argument("--precision", choices=(AUTO, STANDARD, EXTENDED), default=None)
    p.add_argument("--target-frac-error", type=float, default=None, dest="target_frac_error")
    p.add_argument("--margin-factor", type=float, default=None, dest="margin_factor")
    p.add_argument("--cross-check", action="store_true", help="also evaluate every h-term by quadrature")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ceresa-check", description="Numerical nontriviality certificates for Ceresa cycles.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ver = sub.add_parser("verify", help="certify a single curve")
    vsub = ver.add_subparsers(dest="curve", required=True, parser_class=_Parser)
    vf = vsub.add_parser("fermat")
    vf.add_argument("--n", type=int, required=True)
    vf.add_argument("--k", type=int, default=1, dest="k_value")
    _add_common(vf)
    vq = vsub.add_parser("quotient")
    vq.add_argument("--n", type=int, required=True)
    vq.add_argument("--m", type=int, required=True)
    _add_common(vq)

    sc = sub.add_parser("scan", help="certify f(N, k) over a range of N")
    sc.add_argument("--from", type=int, required=True, dest="n_from")
    sc.add_argument("--to", type=int, required=True, dest="n_to")
    sc.add_argument("--k", default=None, help="integer or 'max' for every admitted k")
    sc.add_argument("--threads", type=int, default=None)
    sc.add_argument("--timing", action="store_true", help="fill the seconds column (breaks byte-determinism)")
    _add_common(sc)

    st = sub.add_parser("selftest", help="run the oracle suites")
    st.add_argument("--suite", action="append", choices=tuple(SUITES))
    st.add_argument("--trials", type=int, default=None)
    st.add_argument("--n", type=int, default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    handler = {"verify": cmd_verify, "scan": cmd_scan, "selftest": cmd_selftest}[args.command]
    try:
        return handler(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"ceresa-check: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
