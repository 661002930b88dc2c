#!/usr/bin/env python3
"""Compare the compiled kernel backend against the pure-Python fallback.

Run:  python3 benchmarks/bench_kernels.py
"""

import random
import sys
import time
from array import array
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from molbench.kernels import BACKEND, _pure  # noqa: E402

try:
    from molbench.kernels import _speedups
except ImportError:
    _speedups = None


def bench(label, fn, *args, repeat=5):
    best = min(_time_one(fn, *args) for _ in range(repeat))
    print(f"  {label:12s} {best * 1e3:8.2f} ms")
    return best


def _time_one(fn, *args):
    t0 = time.perf_counter()
    fn(*args)
    return time.perf_counter() - t0


def run_mix(mod, n):
    h = 0x9E3779B97F4A7C15
    for v in range(n):
        h = mod.mix64(h, v)
    return h


def run_morgan(mod, codes, starts, nbr, bonds, rounds):
    for _ in range(rounds):
        codes = mod.morgan_round(codes, starts, nbr, bonds)
    return codes


def run_popcount(mod, words, rounds):
    total = 0
    for _ in range(rounds):
        total += mod.popcount_words(words)
    return total


def main():
    rng = random.Random(7)
    print(f"active backend: {BACKEND}")

    # random 200-atom graph in CSR form, average degree 3
    n_atoms = 200
    edges = {tuple(sorted(rng.sample(range(n_atoms), 2)))
             for _ in range(n_atoms * 3 // 2)}
    adj = [[] for _ in range(n_atoms)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    starts, nbr, bonds = array("I", [0]), array("I"), array("B")
    for i in range(n_atoms):
        for j in adj[i]:
            nbr.append(j)
            bonds.append(rng.choice([1, 2, 3, 4]))
        starts.append(len(nbr))
    codes = array("Q", [rng.getrandbits(64) for _ in range(n_atoms)])
    words = array("Q", [rng.getrandbits(64) for _ in range(2048 // 64 * 500)])

    backends = [("pure", _pure)]
    if _speedups is not None:
        backends.append(("cython", _speedups))

    for name, mod in backends:
        print(f"{name}:")
        bench("mix64 x1e6", run_mix, mod, 1_000_000)
        bench("morgan x500", run_morgan, mod, codes, starts, nbr, bonds, 500)
        bench("popcount", run_popcount, mod, words, 100)

    if _speedups is not None:
        same = run_morgan(_pure, codes, starts, nbr, bonds, 3) == \
            run_morgan(_speedups, codes, starts, nbr, bonds, 3)
        print(f"parity (3 morgan rounds): {'identical' if same else 'MISMATCH'}")


if __name__ == "__main__":
    main()
