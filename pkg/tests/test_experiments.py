import io
from fractions import Fraction

import pytest

from hmsim.chain import MinerPolicy, validate_block
from hmsim.clients import Strategy
from hmsim.experiments import (
    CSV_COLUMNS,
    PLOT_COLUMNS,
    ConfigError,
    Scenario,
    ScenarioConfig,
    aggregate,
    config_for_ratio,
    emit_plot_data,
    read_csv,
    rows_to_csv,
    run_scenario,
    schedule,
    sweep,
    write_csv,
)
from hmsim.txn import TxKind


def test_scenario_wiring():
    assert (Scenario.GETH_UNMODIFIED.buyer_strategy, Scenario.GETH_UNMODIFIED.miner_policy) == \
        (Strategy.BASELINE_BUYER, MinerPolicy.BASELINE)
    assert (Scenario.SERETH_CLIENT.buyer_strategy, Scenario.SERETH_CLIENT.miner_policy) == \
        (Strategy.HMS_BUYER, MinerPolicy.BASELINE)
    assert (Scenario.SEMANTIC_MINING.buyer_strategy, Scenario.SEMANTIC_MINING.miner_policy) == \
        (Strategy.HMS_BUYER, MinerPolicy.SEMANTIC)
    assert Scenario.parse("Sereth_Client") is Scenario.SERETH_CLIENT
    with pytest.raises(ConfigError):
        Scenario.parse("geth")


@pytest.mark.parametrize("kwargs", [
    dict(n_buys=0), dict(n_sets=0), dict(n_buys=5, n_sets=6), dict(submit_interval_ticks=0),
    dict(block_interval_ticks=0), dict(n_buyers=0), dict(capacity=0), dict(jitter=-1.0),
    dict(template_lag_ticks=-1),
])
def test_invalid_configs(kwargs):
    with pytest.raises(ConfigError):
        run_scenario(ScenarioConfig(Scenario.GETH_UNMODIFIED, **kwargs))


@pytest.mark.parametrize("n_buys,n_sets", [(100, 100), (100, 50), (100, 20), (100, 5), (7, 3), (1, 1)])
def test_schedule_spacing(n_buys, n_sets):
    events = schedule(ScenarioConfig(Scenario.GETH_UNMODIFIED, n_buys=n_buys, n_sets=n_sets))
    buys = [t for t, k in events if k == "buy"]
    sets = [t for t, k in events if k == "set"]
    assert buys == list(range(n_buys))
    assert len(sets) == n_sets and sets[0] == 0
    gaps = {b - a for a, b in zip(sets, sets[1:])}
    assert max(gaps, default=0) - min(gaps, default=0) <= 1


def test_run_drains_pool_and_counts():
    r = run_scenario(ScenarioConfig(Scenario.SERETH_CLIENT, n_buys=30, n_sets=10, seed=2))
    buys = sum(1 for b in r.blocks for t in b.txns if t.kind is TxKind.BUY)
    sets = sum(1 for b in r.blocks for t in b.txns if t.kind is TxKind.SET)
    assert (buys, sets) == (30, 10)
    assert all(validate_block(b) for b in r.blocks)
    assert r.duration_ticks > 29


@pytest.mark.parametrize("scenario", list(Scenario))
def test_single_sender_is_sequential(scenario):
    for n_buys, n_sets in ((1, 1), (100, 100), (60, 7)):
        r = run_scenario(ScenarioConfig(scenario, n_buys=n_buys, n_sets=n_sets, single_sender=True, seed=5))
        assert r.eta_buy == 1 and r.set_stats.eta == 1


def test_owner_sets_all_succeed_in_baseline():
    r = run_scenario(ScenarioConfig(Scenario.GETH_UNMODIFIED, seed=1))
    assert r.set_stats.eta == 1


def test_committed_chaining_owner_loses_sets():
    r = run_scenario(ScenarioConfig(Scenario.GETH_UNMODIFIED, seed=1, owner_tracks_pending=False))
    assert r.set_stats.eta < 1


def test_phase_is_seeded():
    a = ScenarioConfig(Scenario.GETH_UNMODIFIED, seed=3)
    assert a.phase == ScenarioConfig(Scenario.SEMANTIC_MINING, seed=3).phase
    assert 0 <= a.phase < a.block_interval_ticks
    assert ScenarioConfig(Scenario.GETH_UNMODIFIED, seed=3, random_phase=False).phase == 0


def test_template_lag_default_is_block_interval():
    assert ScenarioConfig(Scenario.GETH_UNMODIFIED, block_interval_ticks=12).template_lag == 12
    assert ScenarioConfig(Scenario.GETH_UNMODIFIED, template_lag_ticks=0).template_lag == 0


def test_config_for_ratio():
    c = config_for_ratio(Scenario.SEMANTIC_MINING, Fraction(20), 4)
    assert (c.n_buys, c.n_sets, c.seed, c.ratio) == (100, 5, 4, 20)


def test_csv_row_shape():
    r = run_scenario(ScenarioConfig(Scenario.GETH_UNMODIFIED, n_buys=10, n_sets=5, seed=1))
    row = r.csv_row()
    assert tuple(row) == CSV_COLUMNS
    assert row["ratio"] == "2" and row["scenario"] == "geth_unmodified"
    assert float(row["eta_buy"]) == float(r.eta_buy)


def test_sweep_cardinality_and_order():
    rows = sweep(["1", "20"], list(Scenario), [0, 1], n_buys=20)
    assert len(rows) == 12
    assert [(r["scenario"], r["ratio"], r["seed"]) for r in rows[:4]] == [
        ("geth_unmodified", "1", "0"), ("geth_unmodified", "1", "1"),
        ("geth_unmodified", "20", "0"), ("geth_unmodified", "20", "1")]


def test_sweep_is_deterministic_and_worker_independent():
    args = (["1", "5"], [Scenario.SERETH_CLIENT, Scenario.SEMANTIC_MINING], [0, 1, 2])
    serial = rows_to_csv(sweep(*args))
    assert serial == rows_to_csv(sweep(*args))
    assert serial == rows_to_csv(sweep(*args, workers=2))


def test_sweep_rejects_empty():
    with pytest.raises(ConfigError):
        sweep([], list(Scenario), [0])


def test_csv_round_trip(tmp_path):
    rows = sweep(["2"], [Scenario.GETH_UNMODIFIED], [0, 1], n_buys=10)
    path = tmp_path / "rows.csv"
    write_csv(rows, path)
    text = path.read_text()
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert read_csv(path) == rows


def test_plot_empty_rows():
    buf = io.StringIO()
    assert emit_plot_data([], buf) == []
    assert buf.getvalue() == ",".join(PLOT_COLUMNS) + "\n"


def test_plot_mean_of_two_seeds():
    rows = [
        {"scenario": "sereth_client", "ratio": "2", "eta_buy": "0.25"},
        {"scenario": "sereth_client", "ratio": "2", "eta_buy": "0.5"},
    ]
    (p,) = aggregate(rows)
    assert (p.mean_eta, p.min_eta, p.max_eta, p.n_runs) == (0.375, 0.25, 0.5, 2)


def test_plot_sorted_by_scenario_then_ratio(tmp_path):
    rows = [{"scenario": s, "ratio": r, "eta_buy": "0.1"}
            for s in ("sereth_client", "geth_unmodified") for r in ("20", "2", "10", "1")]
    path = tmp_path / "plot.csv"
    emit_plot_data(rows, path)
    lines = path.read_text().splitlines()[1:]
    keys = [(line.split(",")[0], int(line.split(",")[1])) for line in lines]
    assert keys == sorted(keys)
    assert keys[0] == ("geth_unmodified", 1) and keys[-1] == ("sereth_client", 20)


def test_plot_undefined_eta():
    (p,) = aggregate([{"scenario": "x", "ratio": "1", "eta_buy": ""}])
    assert p.mean_eta is None and p.n_runs == 1
