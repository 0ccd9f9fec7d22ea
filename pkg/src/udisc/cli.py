"""Command-line front end.

Exit codes: 0 distinguishable (or success), 2 not distinguishable (or a
failed cross-check), 1 input or usage error.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import io as uio
from .errors import HypothesisViolated, UdiscError
from .lattice import (
    MAX_STATES,
    LatticeSpec,
    closed_form_bound,
    coherent_overlap,
    fock_cutoff,
    fock_truncated_state,
    gaussian_sum_terms,
    ring_count,
    threshold_scan,
    two_state_upper_bound,
)
from .linalg import eig_hermitian
from .mixed import MixedFamily, build_mixed_povm, mixed_verdict
from .povm import build_optimal_povm, validate
from .pure import StateFamily, dual_family, gram, max_uniform_success, verdict
from .sampling import random_coherent_point, random_mixed, random_states

EXIT_OK, EXIT_ERROR, EXIT_NOT_DISTINGUISHABLE = 0, 1, 2
DEFAULT_TOL = 1e-9
COMMANDS = ("discriminate", "mixed", "vnl-scan", "bounds", "crosscheck")
MAX_N = max(n for n in range(1, 100) if ring_count(n) <= MAX_STATES)

log = logging.getLogger("udisc")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    input_path: str | None = None
    output_path: str | None = None
    format: str = "json"
    tol: float = DEFAULT_TOL
    n_max: int | None = None
    omega1: complex | None = None
    omega2: complex | None = None
    seed: int = 0

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.format not in ("json", "csv"):
            raise UsageError(f"--format must be json or csv, got {self.format!r}")
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise UsageError(f"--tol must be positive, got {self.tol}")
        if self.n_max is not None and self.n_max < 1:
            raise UsageError(f"--n-max must be >= 1, got {self.n_max}")


def default_tol() -> float:
    raw = os.environ.get("UDISC_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        return float(raw)
    except ValueError:
        raise UsageError(f"UDISC_TOL={raw!r} is not a number") from None


def _complex_arg(text: str) -> complex:
    try:
        re, im = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 're,im', got {text!r}") from None
    return complex(re, im)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", dest="input_path", help="input JSON file")
    common.add_argument("--output", dest="output_path", help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--tol", type=float, default=None, help="tolerance (default 1e-9 or $UDISC_TOL)")
    common.add_argument("--n-max", dest="n_max", type=int, default=None)
    common.add_argument("--omega1", type=_complex_arg, default=None, metavar="RE,IM")
    common.add_argument("--omega2", type=_complex_arg, default=None, metavar="RE,IM")
    common.add_argument("--seed", type=int, default=0)

    parser = _Parser(prog="udisc", description="Unambiguous discrimination of quantum state families.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "discriminate": "verdict and optimal POVM for a pure-state family",
        "mixed": "kernel criterion and witness POVM for a mixed-state family",
        "vnl-scan": "q_n for square truncations of a von Neumann lattice (CSV by default)",
        "bounds": "lower and upper bounds for a von Neumann lattice",
        "crosscheck": "randomized consistency checks",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def parse_config(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    fmt = args.format or ("csv" if args.command == "vnl-scan" else "json")
    tol = args.tol if args.tol is not None else default_tol()
    return RunConfig(
        command=args.command,
        input_path=args.input_path,
        output_path=args.output_path,
        format=fmt,
        tol=tol,
        n_max=args.n_max,
        omega1=args.omega1,
        omega2=args.omega2,
        seed=args.seed,
    )


def _emit(config: RunConfig, text: str) -> None:
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _kv_rows(d: dict) -> list:
    return [["key", "value"], *([k, v] for k, v in d.items())]


def _report_csv(summary: dict, report) -> str:
    text = uio.csv_text(_kv_rows(summary))
    if report is not None:
        text += "\n" + uio.csv_text(report.table())
    return text


def _require_input(config: RunConfig) -> str:
    if not config.input_path:
        raise UsageError(f"{config.command} needs --input")
    return config.input_path


def cmd_discriminate(config: RunConfig) -> int:
    family = uio.load_state_family(_require_input(config))
    gf = gram(family)
    v = verdict(gf, config.tol)
    report = validate(build_optimal_povm(gf, config.tol), gf) if v.distinguishable else None
    if config.format == "json":
        payload = {"verdict": v.to_dict(), "confusion": report.to_dict() if report else None}
        _emit(config, uio.dumps_json(payload))
    else:
        _emit(config, _report_csv(v.to_dict(), report))
    return EXIT_OK if v.distinguishable else EXIT_NOT_DISTINGUISHABLE


def cmd_mixed(config: RunConfig) -> int:
    family = uio.load_mixed_family(_require_input(config))
    mv = mixed_verdict(family, config.tol)
    report = validate(build_mixed_povm(family, mv), family) if mv.distinguishable else None
    if config.format == "json":
        payload = {"verdict": mv.to_dict(), "confusion": report.to_dict() if report else None}
        _emit(config, uio.dumps_json(payload))
    else:
        summary = {
            "distinguishable": mv.distinguishable,
            "failing_index": mv.failing_index,
            "criteria_agree": mv.criteria_agree,
            "tolerance_used": mv.tolerance_used,
        }
        _emit(config, _report_csv(summary, report))
    return EXIT_OK if mv.distinguishable else EXIT_NOT_DISTINGUISHABLE


def _lattice(config: RunConfig) -> tuple[LatticeSpec, int | None]:
    n_max = config.n_max
    if config.input_path:
        spec, file_n = uio.load_lattice_spec(config.input_path)
        if n_max is None:
            n_max = file_n
        return spec, n_max
    if config.omega1 is None or config.omega2 is None:
        raise UsageError(f"{config.command} needs --input or both --omega1 and --omega2")
    return LatticeSpec(config.omega1, config.omega2), n_max


def cmd_vnl_scan(config: RunConfig) -> int:
    spec, n_max = _lattice(config)
    if n_max is None:
        raise UsageError("vnl-scan needs --n-max (or n_max in the input file)")
    if not 1 <= n_max <= MAX_N:
        raise UsageError(f"n_max must be in 1..{MAX_N}, got {n_max}")
    scan = threshold_scan(spec, n_max, tol=config.tol)
    if config.format == "csv":
        _emit(config, uio.scan_csv(scan))
    else:
        _emit(config, uio.dumps_json(uio.scan_json(scan)))
    return EXIT_OK


def cmd_bounds(config: RunConfig) -> int:
    spec, _ = _lattice(config)
    partial, tail = gaussian_sum_terms(spec, 20)
    try:
        closed = closed_form_bound(spec)
    except HypothesisViolated:
        closed = None
    result = {
        "S": spec.area,
        "gaussian_sum_bound": 1.0 - partial - tail,
        "gaussian_sum_tail": tail,
        "closed_form_bound": closed,
        "two_state_upper_bound": two_state_upper_bound(spec),
    }
    if config.format == "json":
        _emit(config, uio.dumps_json(result))
    else:
        _emit(config, uio.csv_text(_kv_rows(result)))
    return EXIT_OK


def run_crosschecks(seed: int, trials: int = 200) -> list[dict]:
    """Independent-route comparisons on seeded random instances."""
    rng = np.random.default_rng(seed)
    checks = []

    err = 0.0
    for _ in range(trials):
        d = int(rng.integers(2, 21))
        psi = random_states(2, d, rng)
        q = max_uniform_success(gram(StateFamily(psi)))
        err = max(err, abs(q - (1 - abs(np.vdot(psi[0], psi[1])))))
    checks.append({"check": "two_state_formula", "trials": trials, "max_error": err, "tolerance": 1e-10})

    err = 0.0
    for _ in range(trials):
        z, w = random_coherent_point(6.0, rng), random_coherent_point(6.0, rng)
        n = max(fock_cutoff(z), fock_cutoff(w))
        fock = np.vdot(fock_truncated_state(z, n), fock_truncated_state(w, n))
        err = max(err, abs(fock - coherent_overlap(z, w)))
    checks.append({"check": "coherent_vs_fock", "trials": trials, "max_error": err, "tolerance": 1e-10})

    err = 0.0
    for _ in range(trials // 4):
        n = int(rng.integers(2, 9))
        d = int(rng.integers(n, 13))
        gf = gram(StateFamily(random_states(n, d, rng)))
        gi = dual_family(gf).gram_inverse
        err = max(err, abs(eig_hermitian(gi).lambda_max * gf.lambda_min - 1.0))
    checks.append({"check": "dual_bessel_reciprocity", "trials": trials // 4, "max_error": err, "tolerance": 1e-8})

    disagree = 0
    for _ in range(trials):
        n = int(rng.integers(1, 5))
        d = int(rng.integers(1, 7))
        mv = mixed_verdict(MixedFamily(random_mixed(n, d, rng)))
        disagree += not mv.criteria_agree
    checks.append({"check": "mixed_kernel_vs_range", "trials": trials, "max_error": float(disagree), "tolerance": 0.0})

    for c in checks:
        c["pass"] = bool(c["max_error"] <= c["tolerance"])
    return checks


def cmd_crosscheck(config: RunConfig) -> int:
    checks = run_crosschecks(config.seed)
    if config.format == "json":
        _emit(config, uio.dumps_json({"seed": config.seed, "checks": checks}))
    else:
        cols = ["check", "trials", "max_error", "tolerance", "pass"]
        _emit(config, uio.csv_text([cols, *([c[k] for k in cols] for c in checks)]))
    return EXIT_OK if all(c["pass"] for c in checks) else EXIT_NOT_DISTINGUISHABLE


HANDLERS = {
    "discriminate": cmd_discriminate,
    "mixed": cmd_mixed,
    "vnl-scan": cmd_vnl_scan,
    "bounds": cmd_bounds,
    "crosscheck": cmd_crosscheck,
}


def run(config: RunConfig) -> int:
    return HANDLERS[config.command](config)


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="udisc: %(levelname)s: %(message)s")
    try:
        config = parse_config(sys.argv[1:] if argv is None else argv)
        return run(config)
    except UsageError as exc:
        print(f"udisc: usage error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except UdiscError as exc:
        print(f"udisc: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"udisc: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
