"""Compare the compiled exploration kernel with the pure-Python one.

Usage: python benchmarks/bench_explore.py [--repeat N]
"""

import argparse
import timeit

from cfsm import _kernel_py
from cfsm.builtins import get
from cfsm.explore import _encode
from cfsm.model import SemanticsKind
from cfsm.reduce import fifo_to_system_merged, fifo_to_system_prime

try:
    from cfsm import _kernel
except ImportError:
    _kernel = None


def cases():
    a = get("example33").value
    yield "example22", get("example22").value, (1, 2, 3)
    yield "genest-sync", get("genest-sync").value, (1, 2, 3)
    yield "ring3-fork", get("ring3-fork").value, (2, 3)
    yield "S'(example33)", fifo_to_system_prime(a, "m"), (1, 2)
    yield "S''(example33)", fifo_to_system_merged(a, "m"), (1, 2, 3, 5, 6)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()
    if _kernel is None:
        raise SystemExit("compiled kernel not built; run pip install -e . --no-build-isolation")
    print(f"{'system':<16} {'k':>2} {'states':>7} {'python ms':>10} {'cython ms':>10} {'speedup':>8}")
    for name, system, ks in cases():
        for k in ks:
            sem = SemanticsKind.P2P
            _, keys, _, trans, initial, buf, dst = _encode(system, sem)
            call = (trans, initial, buf, dst, len(keys), False, k, 1_000_000)
            states, _ = _kernel.explore(*call)
            py = min(timeit.repeat(lambda: _kernel_py.explore(*call), number=1, repeat=args.repeat))
            cy = min(timeit.repeat(lambda: _kernel.explore(*call), number=1, repeat=args.repeat))
            print(f"{name:<16} {k:>2} {len(states):>7} {py * 1e3:>10.3f} {cy * 1e3:>10.3f} {py / cy:>7.1f}x")


if __name__ == "__main__":
    main()
