"""Command-line front end: code construction plus the four experiment
drivers, each writing one CSV.

Exit codes: 0 success, 2 configuration problem, 3 I/O problem, 4 internal
error.  Every experiment needs a seed: --seed, the QKDR_SEED environment
variable, or an auto-drawn seed that is logged to stderr.
"""

from __future__ import annotations

import argparse
import math
import os
import secrets
import sys

import numpy as np

from . import experiments
from .blind_ldpc import LdpcSessionParams
from .blind_polar import PolarSessionParams
from .channel import QberTrace, load_qber_trace, synth_fluctuating_trace
from .ldpc import (construct_ldpc_peg, default_degree_sequence, load_alist,
                   save_alist)
from .polar import PolarCodeSpec, construct_polar

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_INTERNAL = 4


class ConfigError(Exception):
    pass


def _parse_float_list(text: str):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad number list {text!r}: {exc}")


def _parse_int_list(text: str):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad integer list {text!r}: {exc}")


def _resolve_seed(value) -> int:
    if value is not None:
        return int(value)
    env = os.environ.get("QKDR_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"QKDR_SEED is not an integer: {env!r}")
    seed = secrets.randbits(63)
    print(f"auto-seed: {seed}", file=sys.stderr)
    return seed


def _read_text(path: str) -> str:
    if not os.path.exists(path):
        raise ConfigError(f"file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write_text(path: str, text: str):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise IOError(f"cannot write {path}: {exc}")


# ---------------------------------------------------------------------------
# option plumbing
# ---------------------------------------------------------------------------


def _load_config_file(path: str) -> dict:
    cfg = {}
    for lineno, line in enumerate(_read_text(path).splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, _, value = stripped.partition("=")
        cfg[key.strip()] = value.strip()
    return cfg


_CONFIG_KEYS = {
    "experiment", "protocol", "family", "frame", "rate", "alpha", "delta",
    "deltas", "step5star", "list_size", "crc", "design_q", "assumed_q",
    "max_iters", "construction", "polar_spec", "ldpc_alist", "q", "q_grid",
    "trace", "synth_blocks", "mean_q", "sigma", "targets", "pool_rates",
    "blocks", "seed", "output", "jobs",
}


def _merged_options(args, cfg: dict) -> dict:
    for key in cfg:
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config key: {key}")
    opts = dict(cfg)
    for key in _CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            opts[key] = flag
    return opts


def _opt(opts, key, default=None, cast=str):
    if key not in opts or opts[key] is None:
        return default
    value = opts[key]
    if cast is bool and isinstance(value, str):
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"bad boolean for {key}: {value!r}")
    try:
        return cast(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {value!r} ({exc})")


def _build_ldpc_code(opts):
    path = _opt(opts, "ldpc_alist")
    if path:
        return load_alist(_read_text(path))
    N = _opt(opts, "frame", 2048, int)
    rate = _opt(opts, "rate", None, float)
    if rate is None or not 0.0 < rate < 1.0:
        raise ConfigError(f"need an LDPC rate in (0, 1), got {rate}")
    M = round((1.0 - rate) * N)
    profile = "r07" if rate >= 0.65 else "r06"
    return construct_ldpc_peg(N, M, default_degree_sequence(N, profile))


def _build_polar_code(opts, q_hint: float):
    path = _opt(opts, "polar_spec")
    if path:
        return PolarCodeSpec.from_text(_read_text(path))
    N = _opt(opts, "frame", 2048, int)
    n = int(round(math.log2(N)))
    if 2 ** n != N:
        raise ConfigError(f"polar frame length must be a power of two, got {N}")
    rate = _opt(opts, "rate", None, float)
    alpha = _opt(opts, "alpha", 0.0, float)
    if rate is None:
        raise ConfigError("need a rate for polar construction")
    K = math.ceil(N * rate / (1.0 - alpha)) if alpha else round(N * rate)
    c = _opt(opts, "crc", 24, int)
    design_q = _opt(opts, "design_q", q_hint, float)
    method = _opt(opts, "construction", "mc")
    return construct_polar(n, K, c, design_q, method=method)


def _q_hint(opts) -> float:
    for key in ("q", "mean_q"):
        v = _opt(opts, key, None, float)
        if v:
            return v
    grid = _opt(opts, "q_grid")
    if grid:
        vals = grid if isinstance(grid, list) else _parse_float_list(grid)
        return float(np.mean(vals))
    return 0.036


def _build_session(opts) -> experiments.SessionParams:
    protocol = _opt(opts, "protocol")
    if protocol == "blind-ldpc":
        code = _build_ldpc_code(opts)
        return LdpcSessionParams(
            code=code,
            alpha=_opt(opts, "alpha", 0.1, float),
            delta=_opt(opts, "delta", 30, int),
            use_step5_star=_opt(opts, "step5star", True, bool),
            prg_seed=0,
            assumed_qber=_opt(opts, "assumed_q", None, float),
            max_iters=_opt(opts, "max_iters", 100, int))
    if protocol == "blind-polar":
        code = _build_polar_code(opts, _q_hint(opts))
        return PolarSessionParams(
            code=code,
            delta=_opt(opts, "delta", 33, int),
            list_size=_opt(opts, "list_size", 64, int),
            prg_seed=0,
            assumed_qber=_opt(opts, "assumed_q", None, float))
    raise ConfigError(f"unknown protocol: {protocol!r} (expected blind-ldpc "
                      f"or blind-polar)")


def _build_trace(opts) -> QberTrace:
    sources = [s for s in ("trace", "synth_blocks") if _opt(opts, s)]
    if len(sources) != 1:
        raise ConfigError("specify exactly one of trace= or synth_blocks=")
    if sources[0] == "trace":
        return load_qber_trace(_read_text(_opt(opts, "trace")))
    return synth_fluctuating_trace(
        _opt(opts, "synth_blocks", None, int),
        _opt(opts, "mean_q", 0.036, float),
        _opt(opts, "sigma", 0.004, float),
        _resolve_seed(_opt(opts, "seed")))


def _require_output(opts) -> str:
    out = _opt(opts, "output")
    if not out:
        raise ConfigError("an output path is required (output= or -o)")
    return out


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cmd_construct(args) -> int:
    if args.kind == "polar":
        N = 2 ** args.n
        K = round(args.rate * N)
        spec = construct_polar(args.n, K, args.crc, args.design_q,
                               method=args.construction)
        _write_text(args.output, spec.to_text())
    else:
        if not 0.0 < args.rate < 1.0:
            raise ConfigError(f"LDPC rate must be in (0, 1), got {args.rate}")
        M = round((1.0 - args.rate) * args.frame)
        if args.degrees_file:
            degrees = _parse_int_list(_read_text(args.degrees_file))
        else:
            profile = {"default-r07": "r07", "default-r06": "r06"}.get(args.degrees)
            if profile is None:
                raise ConfigError(f"unknown degree profile: {args.degrees!r}")
            degrees = default_degree_sequence(args.frame, profile)
        spec = construct_ldpc_peg(args.frame, M, degrees)
        _write_text(args.output, save_alist(spec))
    return EXIT_OK


def _experiment_kind(opts) -> str:
    kind = _opt(opts, "experiment")
    if kind not in ("sweep", "cdf", "tradeoff", "noninteractive"):
        raise ConfigError(f"unknown experiment: {kind!r}")
    return kind


def _run_experiment(opts) -> int:
    kind = _experiment_kind(opts)
    seed = _resolve_seed(_opt(opts, "seed"))
    opts = dict(opts)
    opts["seed"] = seed
    jobs = _opt(opts, "jobs", 1, int)
    out = _require_output(opts)

    if kind == "sweep":
        grid = _opt(opts, "q_grid")
        if grid is None:
            raise ConfigError("sweep needs q_grid=")
        grid = grid if isinstance(grid, list) else _parse_float_list(grid)
        params = _build_session(opts)
        result = experiments.sweep_fixed_qber(
            params, grid, _opt(opts, "blocks", 100, int), seed, jobs=jobs)
        _write_text(out, experiments.sweep_to_csv(result))
    elif kind == "cdf":
        q = _opt(opts, "q", None, float)
        if q is None:
            raise ConfigError("cdf needs q=")
        params = _build_session(opts)
        result = experiments.disclosed_bits_cdf(
            params, q, _opt(opts, "blocks", 1000, int), seed, jobs=jobs)
        _write_text(out, experiments.cdf_to_csv(result))
    elif kind == "tradeoff":
        deltas = _opt(opts, "deltas")
        if deltas is None:
            raise ConfigError("tradeoff needs deltas=")
        deltas = deltas if isinstance(deltas, list) else _parse_int_list(deltas)
        trace = _build_trace(opts)
        params = _build_session(opts)
        points = experiments.tradeoff_curve(params, deltas, trace, seed,
                                            jobs=jobs)
        _write_text(out, experiments.tradeoff_to_csv(points))
    else:
        family = _opt(opts, "family")
        if family not in ("ldpc", "polar"):
            raise ConfigError("noninteractive needs family=ldpc or family=polar")
        targets = _opt(opts, "targets", "1.0,1.1,1.2,1.3,1.4,1.5,1.6,1.7,1.8,1.9")
        targets = targets if isinstance(targets, list) else _parse_float_list(targets)
        q_mean = _opt(opts, "mean_q", 0.036, float)
        pool = None
        if family == "ldpc":
            rates = _opt(opts, "pool_rates", "0.55,0.6,0.65,0.7,0.75")
            rates = rates if isinstance(rates, list) else _parse_float_list(rates)
            N = _opt(opts, "frame", 2048, int)
            pool = [construct_ldpc_peg(
                        N, round((1.0 - r) * N),
                        default_degree_sequence(N, "r07" if r >= 0.65 else "r06"))
                    for r in rates]
        points = experiments.noninteractive_fer(
            targets, q_mean, _opt(opts, "blocks", 1000, int), seed,
            family=family, ldpc_pool=pool,
            alpha=_opt(opts, "alpha", 0.05, float),
            crc_len=_opt(opts, "crc", 24, int),
            list_size=_opt(opts, "list_size", 64, int), jobs=jobs)
        _write_text(out, experiments.noninteractive_to_csv(points))
    return EXIT_OK


def _add_common_options(sub):
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--jobs", type=int, default=None)
    sub.add_argument("-o", "--output", default=None)
    sub.add_argument("--protocol", default=None,
                     choices=["blind-ldpc", "blind-polar"])
    sub.add_argument("--frame", type=int, default=None)
    sub.add_argument("--rate", type=float, default=None)
    sub.add_argument("--alpha", type=float, default=None)
    sub.add_argument("--delta", type=int, default=None)
    sub.add_argument("--deltas", default=None)
    sub.add_argument("--step5star", default=None)
    sub.add_argument("--list-size", dest="list_size", type=int, default=None)
    sub.add_argument("--crc", type=int, default=None)
    sub.add_argument("--design-q", dest="design_q", type=float, default=None)
    sub.add_argument("--assumed-q", dest="assumed_q", type=float, default=None)
    sub.add_argument("--max-iters", dest="max_iters", type=int, default=None)
    sub.add_argument("--construction", default=None,
                     choices=["mc", "bhattacharyya"])
    sub.add_argument("--polar-spec", dest="polar_spec", default=None)
    sub.add_argument("--ldpc-alist", dest="ldpc_alist", default=None)
    sub.add_argument("--q", type=float, default=None)
    sub.add_argument("--q-grid", dest="q_grid", default=None)
    sub.add_argument("--trace", default=None)
    sub.add_argument("--synth-blocks", dest="synth_blocks", type=int,
                     default=None)
    sub.add_argument("--mean-q", dest="mean_q", type=float, default=None)
    sub.add_argument("--sigma", type=float, default=None)
    sub.add_argument("--targets", default=None)
    sub.add_argument("--pool-rates", dest="pool_rates", default=None)
    sub.add_argument("--family", default=None, choices=["ldpc", "polar"])
    sub.add_argument("--blocks", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qkdr",
        description="Blind information reconciliation simulator for QKD "
                    "sifted keys (polar and LDPC codes).")
    subs = parser.add_subparsers(dest="command", required=True)

    con = subs.add_parser("construct", help="construct a code and write its "
                                            "spec file")
    con_subs = con.add_subparsers(dest="kind", required=True)
    cp = con_subs.add_parser("polar", help="write a polar spec file")
    cp.add_argument("--n", type=int, required=True, help="frame = 2**n")
    cp.add_argument("--rate", type=float, required=True)
    cp.add_argument("--crc", type=int, default=24)
    cp.add_argument("--design-q", dest="design_q", type=float, required=True)
    cp.add_argument("--construction", default="mc",
                    choices=["mc", "bhattacharyya"])
    cp.add_argument("-o", "--output", required=True)
    cl = con_subs.add_parser("ldpc", help="write an alist file")
    cl.add_argument("--n", dest="frame", type=int, required=True)
    cl.add_argument("--rate", type=float, required=True)
    cl.add_argument("--degrees", default="default-r07")
    cl.add_argument("--degrees-file", dest="degrees_file", default=None)
    cl.add_argument("-o", "--output", required=True)

    run = subs.add_parser("run", help="run an experiment from a config file")
    run.add_argument("config", help="flat key=value config file")
    _add_common_options(run)

    for name, doc in (("sweep", "efficiency/rounds/FER over a QBER grid"),
                      ("cdf", "disclosed-bit CDF at one QBER"),
                      ("tradeoff", "rounds-vs-efficiency over step sizes"),
                      ("noninteractive", "single-round FER vs target "
                                         "efficiency")):
        sub = subs.add_parser(name, help=doc)
        _add_common_options(sub)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "construct":
            return _cmd_construct(args)
        if args.command == "run":
            cfg = _load_config_file(args.config)
            return _run_experiment(_merged_options(args, cfg))
        opts = _merged_options(args, {"experiment": args.command})
        opts["experiment"] = args.command
        return _run_experiment(opts)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IOError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
