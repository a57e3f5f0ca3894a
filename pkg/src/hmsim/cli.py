"""Command line entry point: ``run``, ``sweep`` and ``plot``.

Every option can also come from a flat ``key = value`` file given with
``--config``; keys are the long option names with or without the leading
dashes, and flags on the command line win over the file.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import core
from .experiments import (
    DEFAULT_RATIOS,
    ConfigError,
    Scenario,
    ScenarioConfig,
    emit_plot_data,
    read_csv,
    run_scenario,
    sweep,
    write_csv,
)

_UNSET = object()
_BOOL = {"1": True, "true": True, "yes": True, "on": True,
         "0": False, "false": False, "no": False, "off": False}


def parse_bool(text: str) -> bool:
    try:
        return _BOOL[str(text).strip().lower()]
    except KeyError:
        raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}") from None


def optional_float(text: str) -> Optional[float]:
    if str(text).strip().lower() in ("none", "shuffle", ""):
        return None
    return float(text)


def load_config_file(path: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.lstrip("-").replace("-", "_")] = value
    return values


def _model_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value file; command-line flags override it")
    p.add_argument("--block-interval", type=int, help="ticks between blocks (default 15)")
    p.add_argument("--submit-interval", type=int, help="ticks between buy submissions (default 1)")
    p.add_argument("--buyers", type=int, help="number of buyer addresses (default 10)")
    p.add_argument("--capacity", type=int, help="max transactions per block (default 512)")
    p.add_argument("--jitter", type=optional_float,
                   help="baseline miner arrival noise in ticks, or 'none' for a uniform shuffle (default 2)")
    p.add_argument("--template-lag", type=int, help="min transaction age in ticks to be mined (default: block interval)")
    p.add_argument("--owner-tracks-pending", type=parse_bool, help="owner chains from its own pending set (default true)")
    p.add_argument("--random-phase", type=parse_bool, help="seeded offset of the block clock (default true)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hmsim", description="Hash-Mark-Set pool simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s ({core.BACKEND} kernels)")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate one scenario and write a one-row CSV", argument_default=_UNSET)
    run.add_argument("--scenario", help=", ".join(s.value for s in Scenario))
    run.add_argument("--buys", type=int, help="number of buys (default 100)")
    run.add_argument("--sets", type=int, help="number of sets (default 100)")
    run.add_argument("--seed", type=int, help="run seed (default 0)")
    run.add_argument("--single-sender", type=parse_bool, help="send every transaction from the owner")
    run.add_argument("--out", help="CSV path (default stdout)")
    _model_options(run)

    sw = sub.add_parser("sweep", help="run scenarios x ratios x seeds", argument_default=_UNSET)
    sw.add_argument("--ratios", help="comma-separated buy:set ratios (default 1,2,5,10,20)")
    sw.add_argument("--scenarios", help="comma-separated names or 'all' (default all)")
    sw.add_argument("--seeds", help="count N for seeds 0..N-1, or a comma-separated list (default 10)")
    sw.add_argument("--buys", type=int, help="buys per run (default 100)")
    sw.add_argument("--workers", type=int, help="worker processes (default 1)")
    sw.add_argument("--out", help="CSV path (default stdout)")
    sw.add_argument("--plot", help="also write aggregated plot data here")
    _model_options(sw)

    plot = sub.add_parser("plot", help="aggregate a sweep CSV into plot data")
    plot.add_argument("input", help="sweep CSV")
    plot.add_argument("--out", default=None, help="plot data path (default stdout)")
    return parser


_DEFAULTS = {
    "scenario": "geth_unmodified", "buys": 100, "sets": 100, "seed": 0, "single_sender": False,
    "ratios": ",".join(DEFAULT_RATIOS), "scenarios": "all", "seeds": "10", "workers": 1, "jitter": 2.0,
}
_CONVERTERS = {
    "buys": int, "sets": int, "seed": int, "workers": int, "block_interval": int,
    "submit_interval": int, "buyers": int, "capacity": int, "template_lag": int,
    "jitter": optional_float, "owner_tracks_pending": parse_bool, "random_phase": parse_bool,
    "single_sender": parse_bool,
}


def resolve(args: argparse.Namespace) -> dict:
    """Merge command line over config file over built-in defaults."""
    config = getattr(args, "config", _UNSET)
    file_values = load_config_file(config) if config is not _UNSET else {}
    known = set(vars(args)) - {"config", "command"}
    unknown = sorted(set(file_values) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    merged = {}
    for key, value in vars(args).items():
        if value is not _UNSET:
            merged[key] = value
        elif key in file_values:
            raw = file_values[key]
            try:
                merged[key] = _CONVERTERS[key](raw) if key in _CONVERTERS else raw
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise ConfigError(f"config key {key}: {exc}") from None
        else:
            merged[key] = _DEFAULTS.get(key)
    return merged


def _model_kwargs(o: dict) -> dict:
    kwargs = {"jitter": o["jitter"]}
    for key, field in (("block_interval", "block_interval_ticks"), ("submit_interval", "submit_interval_ticks"),
                       ("buyers", "n_buyers"), ("capacity", "capacity"), ("template_lag", "template_lag_ticks"),
                       ("owner_tracks_pending", "owner_tracks_pending"), ("random_phase", "random_phase")):
        if o.get(key) is not None:
            kwargs[field] = o[key]
    return kwargs


def parse_seeds(text: str) -> list[int]:
    text = str(text).strip()
    if "," in text:
        return [int(s) for s in text.split(",") if s.strip()]
    n = int(text)
    if n < 1:
        raise ConfigError("--seeds needs a positive count")
    return list(range(n))


def parse_scenarios(text: str) -> list[Scenario]:
    if text.strip().lower() == "all":
        return list(Scenario)
    return [Scenario.parse(s) for s in text.split(",") if s.strip()]


def _out(path: Optional[str]):
    return path if path else sys.stdout


def cmd_run(o: dict) -> int:
    config = ScenarioConfig(Scenario.parse(o["scenario"]), n_buys=o["buys"], n_sets=o["sets"], seed=o["seed"],
                            single_sender=o["single_sender"], **_model_kwargs(o))
    result = run_scenario(config)
    write_csv([result.csv_row()], _out(o["out"]))
    return 0


def cmd_sweep(o: dict) -> int:
    ratios = [r for r in o["ratios"].split(",") if r.strip()]
    rows = sweep(ratios, parse_scenarios(o["scenarios"]), parse_seeds(o["seeds"]), n_buys=o["buys"],
                 workers=o["workers"], **_model_kwargs(o))
    write_csv(rows, _out(o["out"]))
    if o.get("plot"):
        emit_plot_data(rows, o["plot"])
    return 0


def cmd_plot(o: dict) -> int:
    emit_plot_data(read_csv(o["input"]), _out(o["out"]))
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        options = resolve(args) if args.command != "plot" else vars(args)
        handler = {"run": cmd_run, "sweep": cmd_sweep, "plot": cmd_plot}[args.command]
        return handler(options)
    except (ConfigError, OSError, ValueError) as exc:
        parser.exit(2, f"hmsim: error: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
