"""Compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--skip-end-to-end]

Kernel timings call both modules directly. The end-to-end timings run facet
enumeration in a subprocess with and without EQBELL_PURE_PYTHON=1, since the
implementation is picked once at import.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from eqbell import _kernels_py
from eqbell.scenario import pattern_lookup

try:
    from eqbell import _kernels as _compiled
except ImportError:
    _compiled = None


def zero_sets(rng, rays, bits, density=0.6):
    dense = rng.random((rays, bits)) < density
    packed = np.packbits(dense, axis=1, bitorder="little")
    pad = (-packed.shape[1]) % 8
    packed = np.pad(packed, ((0, 0), (0, pad)))
    return np.ascontiguousarray(packed).view(np.uint64)


def kernel_cases():
    rng = np.random.default_rng(0)
    lut, _, _ = pattern_lookup(4)
    labels = rng.integers(0, 4, size=(20000, 16)).astype(np.int8)
    # four parties with four inputs each; node of party i on input x_i is 4 i + x_i
    node_idx = np.array(list(np.ndindex(4, 4, 4, 4)), dtype=np.int64) + np.array([0, 4, 8, 12])
    Z = zero_sets(rng, 600, 200)
    pos = np.arange(0, 300, dtype=np.int64)
    neg = np.arange(300, 600, dtype=np.int64)
    return [
        ("rgs_labelings(10, 5)", lambda m: m.rgs_labelings(10, 5)),
        ("pattern_matrix 20000x256", lambda m: m.pattern_matrix(labels, node_idx, lut)),
        ("dd_adjacent_pairs 300x300", lambda m: m.dd_adjacent_pairs(Z, pos, neg, 80)),
    ]


END_TO_END = [
    "n=2 m=3 k=3",
    "n=3 m=2 k=2",
    "n=3 m=2 k=3 mode=unanimous",
]

_SNIPPET = """
import time
from eqbell.geometry import facet_enumeration
from eqbell.scenario import Scenario
from eqbell.strategies import vertex_array
sc = Scenario.parse({text!r})
t = time.perf_counter()
h = facet_enumeration(vertex_array(sc))
print(time.perf_counter() - t, len(h.facets))
"""


def end_to_end(text, pure):
    env = dict(os.environ)
    env.pop("EQBELL_PURE_PYTHON", None)
    if pure:
        env["EQBELL_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", _SNIPPET.format(text=text)], env=env,
                         capture_output=True, text=True, check=True).stdout.split()
    return float(out[0]), int(out[1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-end-to-end", action="store_true")
    args = ap.parse_args(argv)

    if _compiled is None:
        print("compiled kernels are not built; only the fallback can be timed")
    print(f"{'kernel':32s} {'cython s':>10s} {'numpy s':>10s} {'speedup':>8s}")
    for label, call in kernel_cases():
        slow = min(timeit.repeat(lambda: call(_kernels_py), number=1, repeat=args.repeat))
        if _compiled is None:
            print(f"{label:32s} {'-':>10s} {slow:10.4f} {'-':>8s}")
            continue
        fast = min(timeit.repeat(lambda: call(_compiled), number=1, repeat=args.repeat))
        print(f"{label:32s} {fast:10.4f} {slow:10.4f} {slow / fast:7.1f}x")

    if args.skip_end_to_end:
        return
    print()
    print(f"{'facet enumeration':32s} {'cython s':>10s} {'numpy s':>10s} {'facets':>8s}")
    for text in END_TO_END:
        fast, nf = end_to_end(text, pure=False)
        slow, ns = end_to_end(text, pure=True)
        assert nf == ns, "implementations disagree"
        print(f"{text:32s} {fast:10.3f} {slow:10.3f} {nf:8d}")


if __name__ == "__main__":
    main()
