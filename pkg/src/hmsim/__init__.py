"""Hash-Mark-Set simulator: read-uncommitted views of a transaction pool."""

from .chain import (
    Block,
    Chain,
    ContractState,
    MinerPolicy,
    RejectedSubmissionError,
    Status,
    TxPool,
    execute_buy,
    execute_set,
    mine_block,
    validate_block,
)
from .clients import Client, Strategy, StrategyError, make_buy_baseline, make_buy_hms, make_set
from .core import (
    AMV,
    BACKEND,
    FPV,
    GENESIS_MARK,
    HEAD_FLAG,
    REJECTED,
    SUCCESS_FLAG,
    MalformedInputError,
    compute_mark,
    decode_fpv,
    encode_fpv,
    keccak256,
    word,
)
from .experiments import (
    CSV_COLUMNS,
    ConfigError,
    RunResult,
    Scenario,
    ScenarioConfig,
    emit_plot_data,
    run_scenario,
    sweep,
)
from .hms import (
    RaaResult,
    Series,
    SeriesCycleError,
    TxnNode,
    build_series,
    deepest_branch,
    hash_mark_set,
    process,
    success,
)
from .metrics import InvalidDurationError, RunStats, efficiency, state_throughput
from .raa import ContractFunction, RefusedAugmentationError, augment_view_call, view_get, view_mark
from .txn import Transaction, TxKind

__version__ = "0.1.0"
