"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v`` (the lines are
printed even under output capture) or ``python tests/test_acceptance.py``.
"""

import random
import statistics
import time
from dataclasses import replace
from fractions import Fraction

import pytest

from hmsim.chain import ContractState, MinerPolicy, Status, TxPool, execute_buy, mine_block, validate_block
from hmsim.cli import main
from hmsim.clients import Client, Strategy, make_buy_hms, make_set
from hmsim.core import FPV, SUCCESS_FLAG, word
from hmsim.experiments import (
    DEFAULT_RATIOS,
    Scenario,
    ScenarioConfig,
    config_for_ratio,
    rows_to_csv,
    run_scenario,
    sweep,
)
from hmsim.hms import SeriesCycleError, TxnNode, deepest_branch, link, process
from hmsim.raa import read_uncommitted
from hmsim.txn import TxKind
from oracles import REF_GENESIS, check_series, random_pool, ref_mark

SEEDS = range(10)
RATIOS = [int(r) for r in DEFAULT_RATIOS]


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\nacceptance {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return emit


def mean_eta(scenario, ratio, seeds=SEEDS):
    results = [run_scenario(config_for_ratio(scenario, Fraction(ratio), s)) for s in seeds]
    etas = [r.eta_buy for r in results]
    return statistics.mean(float(e) for e in etas), etas, results


def test_c01_sequential_history(report):
    t0 = time.perf_counter()
    runs = [run_scenario(ScenarioConfig(s, n_buys=1, n_sets=1, single_sender=True)) for s in Scenario]
    runs += [run_scenario(ScenarioConfig(s, single_sender=True, seed=7)) for s in Scenario]
    elapsed = time.perf_counter() - t0
    etas = [r.eta_buy for r in runs]
    ok = all(e == 1 for e in etas) and elapsed < 1.0
    report(1, ok, f"single-sender buy eta {sorted(set(map(str, etas)))} over {len(runs)} runs, {elapsed:.2f}s (< 1s)")


def test_c02_baseline_collapse(report):
    t0 = time.perf_counter()
    mean, etas, _ = mean_eta(Scenario.GETH_UNMODIFIED, 1)
    elapsed = time.perf_counter() - t0
    zeros = sum(e == 0 for e in etas)
    ok = mean < 0.15 and zeros >= 1 and elapsed < 10
    report(2, ok, f"geth 1:1 mean eta {mean:.3f} (< 0.15), {zeros}/10 seeds at 0, {elapsed:.2f}s (< 10s)")


def test_c03_hms_client_gain(report):
    t0 = time.perf_counter()
    factors = {}
    for ratio in RATIOS:
        geth, _, _ = mean_eta(Scenario.GETH_UNMODIFIED, ratio)
        sereth, _, _ = mean_eta(Scenario.SERETH_CLIENT, ratio)
        factors[ratio] = sereth / geth if geth else float("inf")
    elapsed = time.perf_counter() - t0
    ok = all(f >= 3 for f in factors.values()) and elapsed < 60
    shown = ", ".join(f"{r}:1 x{f:.1f}" for r, f in factors.items())
    report(3, ok, f"sereth/geth mean eta {shown} (>= 3), {elapsed:.2f}s (< 60s)")


def test_c04_semantic_mining(report):
    t0 = time.perf_counter()
    means = {ratio: mean_eta(Scenario.SEMANTIC_MINING, ratio)[0] for ratio in RATIOS}
    elapsed = time.perf_counter() - t0
    ok = all(0.70 <= m <= 0.95 for m in means.values()) and elapsed < 60
    shown = ", ".join(f"{r}:1 {m:.3f}" for r, m in means.items())
    report(4, ok, f"semantic mean eta {shown} (in [0.70, 0.95]), {elapsed:.2f}s (< 60s)")


def test_c05_semantic_uplift(report):
    uplift = {}
    for ratio in (1, 2):
        uplift[ratio] = mean_eta(Scenario.SEMANTIC_MINING, ratio)[0] - mean_eta(Scenario.GETH_UNMODIFIED, ratio)[0]
    ok = all(u >= 0.5 for u in uplift.values())
    report(5, ok, "semantic minus geth " + ", ".join(f"{r}:1 +{u:.3f}" for r, u in uplift.items()) + " (>= 0.5)")


def test_c06_series_consistency_suite(report):
    failures = 0
    nonempty = 0
    for seed in range(1000):
        pool = random_pool(random.Random(seed), max_sets=12)
        nonempty += bool(pool)
        try:
            check_series(pool)
        except AssertionError:
            failures += 1
    report(6, failures == 0, f"1000 random pools ({nonempty} non-empty): {failures} series off the brute-force oracle")


def test_c07_walk_termination_suite(report):
    bounded = 0
    for seed in range(1000):
        nodes = process(random_pool(random.Random(10_000 + seed), max_sets=12))
        link(nodes)
        # the guard raises if the walk ever needs more than len(nodes) frames
        depths = [deepest_branch(head, max_depth=len(nodes))[0] for head in nodes]
        bounded += all(d <= len(nodes) for d in depths)
    guarded = 0
    for n in (1, 2, 5, 12):
        ring = [TxnNode.from_fpv(FPV(SUCCESS_FLAG, word(i), word(i))) for i in range(n)]
        for a, b in zip(ring, ring[1:] + ring[:1]):
            a.next.append(b)
        try:
            deepest_branch(ring[0])
        except SeriesCycleError:
            guarded += 1
    ok = bounded == 1000 and guarded == 4
    report(7, ok, f"acyclic pools walked within |txn_list| depth: {bounded}/1000; "
                  f"cyclic inputs stopped by the guard: {guarded}/4")


def test_c08_replay_validation(report):
    blocks = invalid = mutated_ok = mutations = 0
    for scenario in Scenario:
        for ratio in RATIOS:
            for seed in SEEDS:
                result = run_scenario(config_for_ratio(scenario, Fraction(ratio), seed))
                for block in result.blocks:
                    blocks += 1
                    invalid += not validate_block(block)
                sample = random.Random(f"{scenario.value}:{ratio}:{seed}").choice(result.blocks)
                raw = sample.post_state.to_bytes()
                for offset in range(len(raw)):
                    tampered = bytearray(raw)
                    tampered[offset] ^= 0xFF
                    mutations += 1
                    mutated_ok += validate_block(replace(sample, post_state=ContractState.from_bytes(bytes(tampered))))
    ok = invalid == 0 and mutated_ok == 0
    report(8, ok, f"{blocks - invalid}/{blocks} blocks replay; {mutations - mutated_ok}/{mutations} "
                  "single-byte post_state mutations rejected")


def test_c09_frontrun_pinned_buy(report):
    state = ContractState.genesis(word(0))
    owner = Client(word(0xA11CE), Strategy.OWNER_SETTER)
    buyer = Client(word(0xB0B), Strategy.HMS_BUYER)
    s1 = make_set(owner, read_uncommitted([], state), word(5))
    buy = make_buy_hms(buyer, read_uncommitted([s1], state))
    s2 = make_set(owner, read_uncommitted([s1], state), word(7))
    s3 = make_set(owner, read_uncommitted([s1, s2], state), word(5))
    # hand replay with the reference hash
    m1 = ref_mark(REF_GENESIS, word(5))
    m3 = ref_mark(ref_mark(m1, word(7)), word(5))
    pool = TxPool()
    for t in (s1, s2, s3, buy):
        pool.submit(t)
    block = mine_block(pool, MinerPolicy.BASELINE, state, 10, random.Random(0), jitter=0.0)
    in_interval_3 = [t.kind for t in block.txns] == [TxKind.SET] * 3 + [TxKind.BUY]
    ok = (buy.fpv.previous_mark == m1 and buy.fpv.value == word(5)
          and block.post_state.mark == m3 and block.post_state.value == word(5)
          and in_interval_3 and block.statuses[-1] is Status.FAILED
          and execute_buy(block.post_state, buy.fpv, buyer.address)[1] is Status.FAILED
          and validate_block(block))
    report(9, ok, "buy pinned to interval 1 of set(5),set(7),set(5) fails in interval 3 at equal price")


def test_c10_eq1_identity(report):
    checked = bad = 0
    for scenario in Scenario:
        for ratio in RATIOS:
            for seed in SEEDS:
                r = run_scenario(config_for_ratio(scenario, Fraction(ratio), seed))
                for stats in (r.buy_stats, r.set_stats, r.stats):
                    checked += 1
                    if stats.eta is not None and stats.t_state - stats.t_raw * stats.eta != 0:
                        bad += 1
    report(10, bad == 0, f"|t_state - t_raw*eta| == 0 exactly in {checked - bad}/{checked} stat sets")


def test_c11_determinism(report, tmp_path):
    args = ([str(r) for r in RATIOS], list(Scenario), list(SEEDS))
    first, second = rows_to_csv(sweep(*args)), rows_to_csv(sweep(*args))
    outs = []
    for name in ("a.csv", "b.csv"):
        main(["run", "--scenario", "sereth_client", "--buys", "100", "--sets", "50", "--seed", "42",
              "--out", str(tmp_path / name)])
        outs.append((tmp_path / name).read_bytes())
    ok = first.encode() == second.encode() and outs[0] == outs[1]
    report(11, ok, f"sweep CSV ({len(first.splitlines()) - 1} rows) and CLI run byte-identical on repeat")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
