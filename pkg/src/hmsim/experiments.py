"""Scenario runner and sweep harness for the buy/set pricing experiments."""

from __future__ import annotations

import csv
import enum
import io
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Iterable, Optional, Sequence, Union

from .chain import Block, Chain, ContractState, MinerPolicy
from .clients import Client, Strategy, make_buy_baseline, make_buy_hms, make_set
from .core import HEAD_FLAG, word
from .hms import RaaResult
from .metrics import RunStats, is_buy, is_set
from .raa import read_uncommitted
from .txn import Transaction

CSV_COLUMNS = (
    "scenario", "ratio", "seed", "n_buys", "n_sets",
    "buys_included", "buys_succeeded", "sets_included", "sets_succeeded",
    "eta_buy", "t_raw", "t_state", "n_blocks", "duration_ticks",
)
PLOT_COLUMNS = ("scenario", "ratio", "mean_eta", "min_eta", "max_eta", "n_runs")
DEFAULT_RATIOS = ("1", "2", "5", "10", "20")


class Scenario(enum.Enum):
    GETH_UNMODIFIED = "geth_unmodified"
    SERETH_CLIENT = "sereth_client"
    SEMANTIC_MINING = "semantic_mining"

    @property
    def buyer_strategy(self) -> Strategy:
        if self is Scenario.GETH_UNMODIFIED:
            return Strategy.BASELINE_BUYER
        return Strategy.HMS_BUYER

    @property
    def miner_policy(self) -> MinerPolicy:
        if self is Scenario.SEMANTIC_MINING:
            return MinerPolicy.SEMANTIC
        return MinerPolicy.BASELINE

    @classmethod
    def parse(cls, name: Union[str, Scenario]) -> Scenario:
        if isinstance(name, Scenario):
            return name
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ConfigError(f"unknown scenario {name!r}; choose from "
                              + ", ".join(s.value for s in cls)) from None


class ConfigError(ValueError):
    pass


OWNER_ADDRESS = word(0xA11CE)


def buyer_address(i: int) -> bytes:
    return word(0xB0B0000 + i)


@dataclass(frozen=True)
class ScenarioConfig:
    """One simulated run.

    ``jitter`` is the baseline miner's arrival-order noise in ticks (None for a
    uniform shuffle). ``template_lag_ticks`` is how old a transaction must be
    to make it into a block; None means one block interval. With
    ``owner_tracks_pending`` the owner chains each set from its own latest
    pending set rather than from published state. ``random_phase`` offsets the
    block clock by a seeded amount so submissions do not always line up with
    block boundaries.
    """

    scenario: Scenario
    n_buys: int = 100
    n_sets: int = 100
    submit_interval_ticks: int = 1
    block_interval_ticks: int = 15
    seed: int = 0
    n_buyers: int = 10
    capacity: int = 512
    jitter: Optional[float] = 2.0
    template_lag_ticks: Optional[int] = None
    owner_tracks_pending: bool = True
    random_phase: bool = True
    single_sender: bool = False
    initial_price: int = 50
    max_price: int = 100

    def validate(self) -> None:
        if self.n_buys < 1 or self.n_sets < 1:
            raise ConfigError("n_buys and n_sets must be at least 1")
        if self.n_sets > self.n_buys:
            raise ConfigError("n_sets may not exceed n_buys")
        if self.submit_interval_ticks < 1 or self.block_interval_ticks < 1:
            raise ConfigError("intervals must be at least one tick")
        if self.n_buyers < 1 or self.capacity < 1:
            raise ConfigError("n_buyers and capacity must be at least 1")
        if self.jitter is not None and self.jitter < 0:
            raise ConfigError("jitter must be non-negative")
        if self.template_lag_ticks is not None and self.template_lag_ticks < 0:
            raise ConfigError("template lag must be non-negative")
        if not 1 <= self.max_price < 2 ** 256:
            raise ConfigError("max_price must fit a 32-byte word")

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.n_buys, self.n_sets)

    @property
    def template_lag(self) -> int:
        if self.template_lag_ticks is None:
            return self.block_interval_ticks
        return self.template_lag_ticks

    @property
    def phase(self) -> int:
        if not self.random_phase:
            return 0
        return random.Random(f"phase:{self.seed}").randrange(self.block_interval_ticks)


@dataclass
class RunResult:
    config: ScenarioConfig
    blocks: list[Block]
    duration_ticks: int

    @property
    def buy_stats(self) -> RunStats:
        return RunStats.from_blocks(self.blocks, self.duration_ticks, is_buy)

    @property
    def set_stats(self) -> RunStats:
        return RunStats.from_blocks(self.blocks, self.duration_ticks, is_set)

    @property
    def stats(self) -> RunStats:
        return RunStats.from_blocks(self.blocks, self.duration_ticks)

    @property
    def eta_buy(self) -> Optional[Fraction]:
        return self.buy_stats.eta

    def csv_row(self, ratio: Optional[str] = None) -> dict[str, str]:
        c = self.config
        buys, sets = self.buy_stats, self.set_stats
        eta = buys.eta
        return {
            "scenario": c.scenario.value,
            "ratio": ratio if ratio is not None else format_ratio(c.ratio),
            "seed": str(c.seed),
            "n_buys": str(c.n_buys),
            "n_sets": str(c.n_sets),
            "buys_included": str(buys.raw_count),
            "buys_succeeded": str(buys.success_count),
            "sets_included": str(sets.raw_count),
            "sets_succeeded": str(sets.success_count),
            "eta_buy": "" if eta is None else repr(float(eta)),
            "t_raw": repr(float(buys.t_raw)),
            "t_state": repr(float(buys.t_state)),
            "n_blocks": str(len(self.blocks)),
            "duration_ticks": str(self.duration_ticks),
        }


def format_ratio(ratio: Fraction) -> str:
    if ratio.denominator == 1:
        return str(ratio.numerator)
    return repr(float(ratio))


def schedule(config: ScenarioConfig) -> list[tuple[int, str]]:
    """(tick, kind) submissions in order; buys one per interval, sets evenly spread."""
    events = []
    set_slots = {(i * config.n_buys) // config.n_sets for i in range(config.n_sets)}
    for k in range(config.n_buys):
        tick = k * config.submit_interval_ticks
        events.append((tick, "buy"))
        if k in set_slots:
            events.append((tick, "set"))
    return events


def _own_view(chain: Chain, last_set: Optional[Transaction]) -> ContractState:
    # the owner knows its own program order: its newest set, else published state
    if last_set is not None and last_set in chain.pool:
        fpv = last_set.fpv
        return ContractState(OWNER_ADDRESS, fpv.mark, fpv.value)
    return chain.committed


def run_scenario(config: ScenarioConfig) -> RunResult:
    config.validate()
    scenario = config.scenario
    prices = random.Random(f"prices:{config.seed}")
    chain = Chain(ContractState.genesis(word(config.initial_price)), scenario.miner_policy,
                  config.capacity, seed=config.seed, jitter=config.jitter,
                  min_age=config.template_lag)

    owner = Client(OWNER_ADDRESS, Strategy.OWNER_SETTER)
    if config.single_sender:
        buyers = [owner]
    else:
        buyers = [Client(buyer_address(i), scenario.buyer_strategy) for i in range(config.n_buyers)]

    events = schedule(config)
    last_tick = events[-1][0]
    phase = config.phase
    idx = n_buy = 0
    last_set = None
    tick = 0
    while True:
        if tick > 0 and (tick - phase) % config.block_interval_ticks == 0:
            chain.mine(tick)
            if tick > last_tick and len(chain.pool) == 0:
                break
        while idx < len(events) and events[idx][0] == tick:
            kind = events[idx][1]
            idx += 1
            if kind == "buy":
                buyer = buyers[n_buy % len(buyers)]
                n_buy += 1
                if config.single_sender:
                    txn = make_buy_baseline(buyer, _own_view(chain, last_set), tick)
                elif scenario is Scenario.GETH_UNMODIFIED:
                    txn = make_buy_baseline(buyer, chain.committed, tick)
                else:
                    txn = make_buy_hms(buyer, read_uncommitted(chain.pool.snapshot(), chain.committed), tick)
            else:
                txn = make_set(owner, _set_basis(config, chain, last_set),
                               word(prices.randint(1, config.max_price)), tick)
                last_set = txn
            chain.submit(txn)
        tick += 1
    return RunResult(config, chain.blocks, tick)


def _set_basis(config: ScenarioConfig, chain: Chain, last_set: Optional[Transaction]):
    tracking = config.owner_tracks_pending or config.single_sender
    if config.scenario is Scenario.GETH_UNMODIFIED:
        return _own_view(chain, last_set) if tracking else chain.committed
    view = read_uncommitted(chain.pool.snapshot(), chain.committed)
    if tracking and view.flag == HEAD_FLAG:
        # no live series: restart one as a head candidate on top of the owner's own pending set
        own = _own_view(chain, last_set)
        return RaaResult(HEAD_FLAG, own.mark, own.value)
    return view


def parse_ratio(text: Union[str, int, Fraction]) -> Fraction:
    try:
        ratio = Fraction(str(text).strip())
    except ValueError:
        raise ConfigError(f"bad ratio {text!r}") from None
    if ratio < 1:
        raise ConfigError("ratio must be at least 1 (n_sets may not exceed n_buys)")
    return ratio


def config_for_ratio(scenario: Scenario, ratio: Fraction, seed: int, n_buys: int = 100,
                     **overrides) -> ScenarioConfig:
    n_sets = max(1, int(Fraction(n_buys) / ratio))
    return ScenarioConfig(scenario, n_buys=n_buys, n_sets=n_sets, seed=seed, **overrides)


def _run_cell(args) -> dict[str, str]:
    config, label = args
    return run_scenario(config).csv_row(label)


def sweep(ratios: Sequence, scenarios: Sequence, seeds: Sequence[int], n_buys: int = 100,
          workers: int = 1, **overrides) -> list[dict[str, str]]:
    """One CSV row per (scenario, ratio, seed), in that nesting order.

    Cells are independent, so ``workers > 1`` farms them to processes; the row
    order and content do not depend on the worker count.
    """
    if not ratios or not scenarios or not seeds:
        raise ConfigError("ratios, scenarios and seeds must be non-empty")
    cells = []
    for scenario in scenarios:
        scenario = Scenario.parse(scenario)
        for r in ratios:
            ratio = parse_ratio(r)
            for seed in seeds:
                config = config_for_ratio(scenario, ratio, int(seed), n_buys, **overrides)
                cells.append((config, format_ratio(ratio)))
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_cell, cells, chunksize=max(1, len(cells) // (4 * workers))))
    return [_run_cell(cell) for cell in cells]


def _open_out(out: Union[str, os.PathLike, IO[str]]):
    if hasattr(out, "write"):
        return out, False
    return open(out, "w", newline=""), True


def write_csv(rows: Iterable[dict], out: Union[str, os.PathLike, IO[str]],
              columns: Sequence[str] = CSV_COLUMNS) -> None:
    fh, owned = _open_out(out)
    try:
        writer = csv.DictWriter(fh, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row[k] for k in columns})
    finally:
        if owned:
            fh.close()


def rows_to_csv(rows: Iterable[dict], columns: Sequence[str] = CSV_COLUMNS) -> str:
    buf = io.StringIO()
    write_csv(rows, buf, columns)
    return buf.getvalue()


def read_csv(path: Union[str, os.PathLike]) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@dataclass(frozen=True)
class PlotPoint:
    scenario: str
    ratio: Fraction
    mean_eta: Optional[float]
    min_eta: Optional[float]
    max_eta: Optional[float]
    n_runs: int


def aggregate(rows: Iterable[dict]) -> list[PlotPoint]:
    """Mean/min/max buy efficiency per (scenario, ratio), sorted by both.

    Runs whose efficiency is undefined count towards ``n_runs`` but not the
    statistics.
    """
    groups: dict[tuple[str, Fraction], list[Optional[float]]] = {}
    for row in rows:
        key = (str(row["scenario"]), parse_ratio(row["ratio"]))
        eta = row["eta_buy"]
        groups.setdefault(key, []).append(None if eta in ("", None) else float(eta))
    points = []
    for (scenario, ratio), etas in sorted(groups.items()):
        defined = [e for e in etas if e is not None]
        if defined:
            mean = float(sum(Fraction(e) for e in defined) / len(defined))
            points.append(PlotPoint(scenario, ratio, mean, min(defined), max(defined), len(etas)))
        else:
            points.append(PlotPoint(scenario, ratio, None, None, None, len(etas)))
    return points


def emit_plot_data(rows: Iterable[dict], out: Union[str, os.PathLike, IO[str]]) -> list[PlotPoint]:
    """Write one line per (scenario, ratio) with mean, min and max buy efficiency."""
    points = aggregate(rows)

    def cell(x):
        return "" if x is None else repr(x)

    write_csv(({"scenario": p.scenario, "ratio": format_ratio(p.ratio), "mean_eta": cell(p.mean_eta),
                "min_eta": cell(p.min_eta), "max_eta": cell(p.max_eta), "n_runs": str(p.n_runs)}
               for p in points), out, PLOT_COLUMNS)
    return points
