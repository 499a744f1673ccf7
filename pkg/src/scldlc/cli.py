"""Command-line front end: build / de / threshold / sim subcommands."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ParameterError, ScldlcError
from .graphs import (build_conventional, build_randomized_coupled,
                     build_standard_coupled, load_edges, validate_graph)
from .mcde import DeConfig, run_de
from .params import CouplingParams, LdlcParams, dimension_ratio
from .sim import run_error_sim
from .threshold import CapacityModel, capacity_sigma2, find_threshold

_SHARED = {
    "alpha": dict(type=float, default=0.8, help="weight parameter alpha in [0,1]"),
    "d": dict(type=int, default=7, help="node degree"),
    "n": dict(type=int, default=100, help="nodes per side per position"),
    "L": dict(type=int, default=1, help="number of coupled positions"),
    "K": dict(type=int, default=1, help="smoothing parameter (randomized coupling)"),
    "mode": dict(choices=("conventional", "standard", "randomized"),
                 default="conventional", help="construction mode"),
    "sigma2": dict(type=float, default=None, help="channel noise variance"),
    "ns": dict(type=int, default=1000, help="samples per message pool"),
    "imax": dict(type=int, default=5000, help="iteration limit"),
    "tol": dict(type=float, default=1e-3, help="convergence tolerance on mean v_w"),
    "eta": dict(type=float, default=4.0, help="integer window width in std deviations"),
    "bmax": dict(type=int, default=10, help="integer window clamp"),
    "seed": dict(type=int, default=0, help="master RNG seed"),
    "threads": dict(type=int, default=0, help="compute threads (0 = library default)"),
}
_FLAGS = {"d": ("-d", "--degree"), "n": ("-n", "--block-size"),
          "L": ("-L", "--positions"), "K": ("-K", "--smoothing")}


def _add_shared(p: argparse.ArgumentParser) -> None:
    for key, spec in _SHARED.items():
        spec = dict(spec)
        spec["default"] = argparse.SUPPRESS  # config-file values fill the gaps
        flags = _FLAGS.get(key, (f"--{key}",))
        p.add_argument(*flags, dest=key, **spec)
    p.add_argument("-o", "--output", dest="output", default=argparse.SUPPRESS,
                   help="output file path")
    p.add_argument("--config", dest="config", default=argparse.SUPPRESS,
                   help="flat key-value config file; flags take precedence")


def _load_config_file(path: str) -> dict:
    values = {}
    try:
        fh = open(path)
    except OSError as exc:
        raise ParameterError(f"cannot read config file {path}: {exc}")
    with fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" in line:
                key, _, val = line.partition("=")
            else:
                key, _, val = line.partition(" ")
            key, val = key.strip(), val.strip()
            if not val:
                raise ParameterError(f"{path}:{lineno}: expected `key = value`")
            values[key] = val
    return values


def _effective(args: argparse.Namespace, extra_defaults: dict | None = None) -> dict:
    """Merge defaults < config file < explicit flags."""
    cfg = dict(_SHARED_DEFAULTS)
    if extra_defaults:
        cfg.update(extra_defaults)
    given = vars(args)
    if "config" in given:
        raw = _load_config_file(given["config"])
        for key, val in raw.items():
            if key not in cfg and key not in ("output", "graph", "bracket",
                                              "resolution_db", "words"):
                raise ParameterError(f"unknown config key {key!r}")
            cfg[key] = _coerce(key, val)
    for key, val in given.items():
        if key not in ("command", "config"):
            cfg[key] = val
    return cfg


_SHARED_DEFAULTS = {k: v["default"] for k, v in _SHARED.items()}
_INT_KEYS = {"d", "n", "L", "K", "ns", "imax", "bmax", "seed", "threads", "words"}
_FLOAT_KEYS = {"alpha", "sigma2", "tol", "eta", "resolution_db"}


def _coerce(key: str, val: str):
    if key in _INT_KEYS:
        return int(val)
    if key in _FLOAT_KEYS:
        return float(val)
    if key == "bracket":
        lo, _, hi = val.partition(",")
        return (float(lo), float(hi))
    return val


def _echo(cfg: dict, keys) -> str:
    return " ".join(f"{k}={cfg[k]}" for k in keys if cfg.get(k) is not None)


def _set_threads(threads: int) -> None:
    if threads > 0:
        import numba
        numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))


def _coupling(cfg: dict) -> CouplingParams:
    return CouplingParams(cfg["mode"], cfg["L"], cfg["K"])


def _build_graph(cfg: dict):
    params = LdlcParams(cfg["alpha"], cfg["d"])
    coupling = _coupling(cfg)
    if coupling.mode == "conventional":
        return build_conventional(cfg["n"], params, cfg["seed"])
    if coupling.mode == "standard":
        return build_standard_coupled(cfg["n"], params, coupling.L, cfg["seed"])
    return build_randomized_coupled(cfg["n"], params, coupling, cfg["seed"])


def cmd_build(args: argparse.Namespace) -> int:
    cfg = _effective(args)
    _set_threads(cfg["threads"])
    if "output" not in cfg:
        raise ParameterError("build requires -o/--output")
    graph = _build_graph(cfg)
    report = validate_graph(graph)
    graph.save_edges(cfg["output"])
    ratio = dimension_ratio(_coupling(cfg), LdlcParams(cfg["alpha"], cfg["d"]))
    print(report)
    print(f"dimension_ratio={ratio} ({float(ratio):.6g})")
    return 0 if report.ok else 1


def _de_config(cfg: dict) -> DeConfig:
    if cfg["sigma2"] is None:
        raise ParameterError("--sigma2 is required")
    coupling = _coupling(cfg)
    if coupling.mode == "standard":
        raise ParameterError("density evolution supports conventional or randomized mode")
    return DeConfig(params=LdlcParams(cfg["alpha"], cfg["d"]), coupling=coupling,
                    sigma2=cfg["sigma2"], n_samples=cfg["ns"], i_max=cfg["imax"],
                    tol=cfg["tol"], eta=cfg["eta"], b_max=cfg["bmax"],
                    seed=cfg["seed"])


_ECHO_KEYS = ("alpha", "d", "n", "L", "K", "mode", "sigma2", "ns", "imax",
              "tol", "eta", "bmax", "seed", "threads")


def cmd_de(args: argparse.Namespace) -> int:
    cfg = _effective(args)
    _set_threads(cfg["threads"])
    trace = run_de(_de_config(cfg))
    if "output" in cfg:
        with open(cfg["output"], "w") as fh:
            trace.write_csv(fh, extra_header=_echo(cfg, _ECHO_KEYS))
    status = "converged" if trace.converged else "did not converge"
    print(f"{status} after {trace.iterations} iterations at sigma2={trace.sigma2!r}")
    return 0


def cmd_threshold(args: argparse.Namespace) -> int:
    cfg = _effective(args, {"bracket": None, "resolution_db": 0.01})
    _set_threads(cfg["threads"])
    cfg.setdefault("sigma2", None)
    cfg["sigma2"] = cfg["sigma2"] or capacity_sigma2()  # placeholder, replaced per point
    config = _de_config(cfg)
    bracket = cfg["bracket"]
    if bracket is None:
        cap = capacity_sigma2()
        bracket = (cap / 10 ** 0.1, cap * 10 ** 0.02)
    result = find_threshold(config, bracket, resolution_db=cfg["resolution_db"])
    payload = result.report()
    payload["config_echo"] = _echo(cfg, _ECHO_KEYS)
    text = json.dumps(payload, indent=2)
    if "output" in cfg:
        with open(cfg["output"], "w") as fh:
            fh.write(text + "\n")
    print(f"sigma2_threshold={result.sigma2_threshold!r} gap_db={result.gap_db:.4f}")
    return 0


def cmd_sim(args: argparse.Namespace) -> int:
    cfg = _effective(args, {"graph": None, "words": None})
    _set_threads(cfg["threads"])
    if cfg["words"] is None or cfg["words"] < 1:
        raise ParameterError("--words must be a positive integer")
    if cfg["sigma2"] is None:
        raise ParameterError("--sigma2 is required")
    if cfg["graph"] is not None:
        try:
            graph = load_edges(cfg["graph"])
        except OSError as exc:
            raise ParameterError(f"cannot read graph file: {exc}")
    else:
        graph = _build_graph(cfg)
    report = run_error_sim(graph, cfg["sigma2"], cfg["words"], i_max=cfg["imax"],
                           seed=cfg["seed"], tol=cfg["tol"], eta=cfg["eta"],
                           b_max=cfg["bmax"])
    if "output" in cfg:
        with open(cfg["output"], "w") as fh:
            report.write_csv(fh, extra_header=_echo(cfg, _ECHO_KEYS))
    print(f"wer={report.wer:.6g} ser={report.ser:.6g} "
          f"({report.word_errors}/{report.words} words)")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scldlc",
        description="Spatially-coupled low-density lattice code simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="construct a graph and write its edge list")
    _add_shared(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("de", help="run Monte Carlo density evolution")
    _add_shared(p)
    p.set_defaults(func=cmd_de)

    p = sub.add_parser("threshold", help="bisection search for the noise threshold")
    _add_shared(p)
    p.add_argument("--bracket", dest="bracket", default=argparse.SUPPRESS,
                   type=lambda s: _coerce("bracket", s),
                   help="sigma2 bracket as `lo,hi` (lo converging, hi failing)")
    p.add_argument("--resolution-db", dest="resolution_db", type=float,
                   default=argparse.SUPPRESS, help="bisection resolution in dB")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("sim", help="end-to-end AWGN error-rate simulation")
    _add_shared(p)
    p.add_argument("--graph", dest="graph", default=argparse.SUPPRESS,
                   help="edge-list file (otherwise built from the shared flags)")
    p.add_argument("--words", dest="words", type=int, default=argparse.SUPPRESS,
                   help="number of codewords to simulate")
    p.set_defaults(func=cmd_sim)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ScldlcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
