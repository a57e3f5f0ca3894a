"""Compare the compiled and pure-Python Keccak kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]

Kernel timings call each backend directly. The end-to-end row runs one
default scenario in a child process per backend, since the backend is fixed
at import time.
"""

import argparse
import os
import subprocess
import sys
import timeit

from hmsim import _keccak_py
from hmsim.core import GENESIS_MARK, word

try:
    from hmsim import _speedups
except ImportError:
    _speedups = None

SCENARIO = (
    "import time\n"
    "from hmsim.experiments import Scenario, ScenarioConfig, run_scenario\n"
    "t = time.perf_counter()\n"
    "run_scenario(ScenarioConfig(Scenario.SEMANTIC_MINING, seed=1))\n"
    "print(time.perf_counter() - t)\n"
)


def per_call(fn, repeat):
    number = max(1, repeat)
    return min(timeit.repeat(fn, number=number, repeat=3)) / number


def scenario_seconds(pure):
    env = {k: v for k, v in os.environ.items() if k != "HMSIM_PURE_PYTHON"}
    if pure:
        env["HMSIM_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", SCENARIO], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()

    value = word(42)
    short, long = b"abc", bytes(1000)
    rows = [
        ("keccak256(3 B)", lambda: _keccak_py.keccak256(short), _speedups and (lambda: _speedups.keccak256(short))),
        ("keccak256(1000 B)", lambda: _keccak_py.keccak256(long), _speedups and (lambda: _speedups.keccak256(long))),
        ("compute_mark", lambda: _keccak_py.keccak256(GENESIS_MARK + value),
         _speedups and (lambda: _speedups.compute_mark(GENESIS_MARK, value))),
    ]
    print(f"{'kernel':<20}{'python':>14}{'compiled':>14}{'speedup':>10}")
    for name, py, c in rows:
        t_py = per_call(py, args.repeat)
        if c:
            t_c = per_call(c, args.repeat * 100)
            print(f"{name:<20}{t_py * 1e6:>11.1f} us{t_c * 1e6:>11.2f} us{t_py / t_c:>9.0f}x")
        else:
            print(f"{name:<20}{t_py * 1e6:>11.1f} us{'n/a':>14}")

    t_py = scenario_seconds(pure=True)
    if _speedups is not None:
        t_c = scenario_seconds(pure=False)
        print(f"{'scenario run':<20}{t_py * 1e3:>11.1f} ms{t_c * 1e3:>11.1f} ms{t_py / t_c:>9.1f}x")
    else:
        print(f"{'scenario run':<20}{t_py * 1e3:>11.1f} ms{'n/a':>14}")


if __name__ == "__main__":
    main()
