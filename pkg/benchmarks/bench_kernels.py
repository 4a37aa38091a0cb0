"""Compare the compiled trace kernel with the pure-Python one.

    python benchmarks/bench_kernels.py [--max-len 5] [--traces 2000]
"""

from __future__ import annotations

import argparse
import random
import time

from akalab import _tracekernel_py
from akalab.traces import ProductOracle, _encode, random_valid_trace

try:
    from akalab import _tracekernel as compiled
except ImportError:
    compiled = None


def timed(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-len", type=int, default=5)
    ap.add_argument("--traces", type=int, default=2000)
    a = ap.parse_args()

    oracle = ProductOracle(("A", "B"), 2)
    alpha = oracle.encoded_alphabet()
    rng = random.Random(0)
    encoded = [_encode(random_valid_trace(rng, length=40).actions) for _ in range(a.traces)]

    impls = [("python", _tracekernel_py)] + ([("compiled", compiled)] if compiled else [])
    base = {}
    print(f"{'kernel':<10}{'task':<28}{'seconds':>10}{'speedup':>10}")
    for name, impl in impls:
        t, res = timed(impl.sweep, oracle.table, alpha, 2, 2, a.max_len, repeat=1)
        task = f"sweep len<={a.max_len} ({res[1]} checks)"
        base.setdefault(task, t)
        print(f"{name:<10}{task:<28}{t:>10.3f}{base[task] / t:>10.1f}")
        t, _ = timed(lambda: [impl.first_violation(*e) for e in encoded])
        task = f"validate {a.traces} traces"
        base.setdefault(task, t)
        print(f"{name:<10}{task:<28}{t:>10.3f}{base[task] / t:>10.1f}")
    if compiled is None:
        print("compiled kernel not available; build with `pip install -e . --no-build-isolation`")


if __name__ == "__main__":
    main()
