"""``superkvn verify <suite>`` and ``superkvn emit <kind>``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage or
configuration errors.  Reports are JSON with sorted keys; the wall time is
the only field that changes between runs with the same seed and config.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import os
import random
import shutil
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import suites
from .phase_flow import PolynomialObservable

DEFAULT_OUT = "superkvn_out"
ENV_OUT = "SUPERKVN_OUT"

PLOT_KINDS = {
    "wave_snapshot": ("wave_snapshot.csv", ["q", "p", "re_psi", "im_psi", "rho"]),
    "kernel_table": ("kernel_table.csv", ["q0", "q1", "abs_k_discrete", "abs_k_oracle", "rel_error"]),
    "epsilon_sweep": ("epsilon_sweep.csv", ["eps", "classical_residual", "quantum_residual"]),
}

# key -> parser; anything else in a config file is an error
CONFIG_KEYS = {
    "seed": int,
    "out": str,
    "hamiltonian": str,
    "n": int,
    "grid_points": int,
    "grid_min": float,
    "grid_max": float,
    "kvn_tol": float,
    "slices": int,
    "epsilon": Fraction,
    "epsilons": lambda s: [Fraction(x.strip()) for x in s.split(",") if x.strip()],
    "potential": str,
    "path_degree": int,
    "hbar": Fraction,
}


class ConfigError(ValueError):
    pass


def load_config(path) -> dict:
    """Line-oriented ``key = value`` file; ``#`` starts a comment."""
    text = Path(path).read_text()
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#",), inline_comment_prefixes=("#",))
    try:
        parser.read_string("[suite]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    out = {}
    for key, raw in parser["suite"].items():
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}: unknown key {key!r}")
        try:
            out[key] = CONFIG_KEYS[key](raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"{path}: bad value for {key}: {exc}") from None
    return out


def validate_config(cfg: dict):
    for key in ("kvn_tol",):
        if key in cfg and not cfg[key] > 0:
            raise ConfigError(f"{key} must be positive")
    if "slices" in cfg and cfg["slices"] < 2:
        raise ConfigError("slices must be at least 2")
    if "grid_points" in cfg and cfg["grid_points"] < 8:
        raise ConfigError("grid_points must be at least 8")
    if "epsilon" in cfg and not cfg["epsilon"] > 0:
        raise ConfigError("epsilon must be positive; the quantum family needs a regulator")
    if "hbar" in cfg and not cfg["hbar"] > 0:
        raise ConfigError("hbar must be positive")
    if "path_degree" in cfg and not 1 <= cfg["path_degree"] <= 6:
        raise ConfigError("path_degree must be between 1 and 6")
    if "n" in cfg and cfg["n"] < 1:
        raise ConfigError("n must be at least 1")
    for key in ("hamiltonian", "potential"):
        if key in cfg:
            try:
                PolynomialObservable.from_expr(cfg[key], cfg.get("n", 1) if key == "hamiltonian" else 1)
            except Exception as exc:  # sympy raises a zoo of types
                raise ConfigError(f"cannot parse {key}: {exc}") from None


def output_dir(cli_value: str | None, cfg: dict) -> Path:
    env = os.environ.get(ENV_OUT)
    if env:
        return Path(env)
    return Path(cli_value or cfg.get("out") or DEFAULT_OUT)


def _config_echo(cfg: dict) -> dict:
    def plain(v):
        if isinstance(v, Fraction):
            return str(v)
        if isinstance(v, list):
            return [plain(x) for x in v]
        return v

    return {k: plain(v) for k, v in sorted(cfg.items()) if k != "out"}


def _run_one(name: str, rng: random.Random, cfg: dict, out: Path) -> list:
    runner = suites.RUNNERS[name]
    if name in suites.WRITES_ARTIFACTS:
        checks = runner(rng, cfg, out)
    else:
        checks = runner(rng, cfg)
    return checks


def run_suite(name: str, cfg: dict, out: Path) -> dict:
    seed = int(cfg.get("seed", 0))
    rng = random.Random(seed)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    records = []
    names = suites.SUITES if name == "all" else (name,)
    for suite in names:
        for check in _run_one(suite, rng, cfg, out):
            rec = check.as_dict()
            rec["suite"] = suite
            records.append(rec)
    status = "pass" if all(r["status"] == "pass" for r in records) else "fail"
    return {
        "suite": name,
        "seed": seed,
        "status": status,
        "config": _config_echo(cfg),
        "checks": records,
        "wall_time_s": time.perf_counter() - start,
    }


def report_body(report: dict) -> str:
    """Serialized report without the wall time; equal across reruns."""
    body = {k: v for k, v in report.items() if k != "wall_time_s"}
    return json.dumps(body, sort_keys=True, indent=2, ensure_ascii=False)


def write_report(report: dict, out: Path) -> Path:
    path = out / f"report_{report['suite']}.json"
    path.write_text(json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    return path


def _cmd_verify(args) -> int:
    try:
        cfg = load_config(args.config) if args.config else {}
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.slices is not None:
            cfg["slices"] = args.slices
        if args.epsilon is not None:
            cfg["epsilon"] = Fraction(args.epsilon)
        validate_config(cfg)
    except (OSError, ConfigError, ValueError, ZeroDivisionError) as exc:
        print(f"superkvn: {exc}", file=sys.stderr)
        return 2
    out = output_dir(args.out, cfg)
    report = run_suite(args.suite, cfg, out)
    path = write_report(report, out)
    for rec in report["checks"]:
        print(f"{rec['status'].upper():4}  {rec['suite']:<13} {rec['name']:<36} {rec['residual']:.3e}")
    print(f"{report['status'].upper()}  {args.suite}  seed={report['seed']}  report={path}")
    return 0 if report["status"] == "pass" else 1


def _cmd_emit(args) -> int:
    fname, header = PLOT_KINDS[args.kind]
    source = Path(args.source or DEFAULT_OUT) / fname
    env = os.environ.get(ENV_OUT)
    if not (env or args.out):
        print("superkvn: emit needs --out DIR (or SUPERKVN_OUT)", file=sys.stderr)
        return 2
    target_dir = Path(env) if env else Path(args.out)
    if not source.is_file():
        print(f"superkvn: {source} not found; run the suite that produces it first", file=sys.stderr)
        return 2
    with source.open(newline="") as fh:
        first = next(csv.reader(fh), None)
    if first != header:
        print(f"superkvn: {source} has header {first}, expected {header}", file=sys.stderr)
        return 2
    target_dir.mkdir(parents=True, exist_ok=True)
    target = target_dir / fname
    if source.resolve() != target.resolve():
        shutil.copyfile(source, target)
    print(target)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="superkvn", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run a suite of checks and write a JSON report")
    v.add_argument("suite", choices=suites.SUITES + ("all",))
    v.add_argument("--seed", type=int)
    v.add_argument("--config", help="key = value configuration file")
    v.add_argument("--out", help=f"output directory (default {DEFAULT_OUT}; {ENV_OUT} overrides)")
    v.add_argument("--slices", type=int, help="time slices for the oscillator kernel")
    v.add_argument("--epsilon", help="regulator for the quantum vierbein family, e.g. 1 or 1/2")
    v.set_defaults(func=_cmd_verify)
    e = sub.add_parser("emit", help="export plot data produced by an earlier verify run")
    e.add_argument("kind", choices=sorted(PLOT_KINDS))
    e.add_argument("--out", help=f"target directory ({ENV_OUT} overrides)")
    e.add_argument("--from", dest="source", help=f"directory of the earlier run (default {DEFAULT_OUT})")
    e.set_defaults(func=_cmd_emit)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
