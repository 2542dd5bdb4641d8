#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the numpy fallback.

Times the two hot kernels (patch packing for convolution, max-pool
routing) on the shapes the network actually sees, plus one full
forward/backward training step.  Both backends compute bit-identical
results; this script only reports speed.

Usage:
    python3 benchmarks/bench_kernels.py [--repeat 5] [--number 3]
"""

import argparse
import time

import numpy as np

from urbangrid.net.config import NetworkConfig, Sample
from urbangrid.net.loss import STAGE_ONE, batch_step
from urbangrid.net.model import build_network
from urbangrid.numerics import kernels
from urbangrid.taxonomy import LabelKind

_KERNEL_NAMES = ("im2col", "col2im", "maxpool_forward", "maxpool_backward")


def _use(backend):
    """Point the dispatch module at one backend's kernels."""
    for name in _KERNEL_NAMES:
        setattr(kernels, name, getattr(backend, name))


def _timed(fn, repeat, number):
    """Best-of-`repeat` mean seconds for `number` calls of fn()."""
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(number):
            fn()
        best = min(best, (time.perf_counter() - t0) / number)
    return best


def _kernel_cases(rng):
    """(label, callable) pairs over the network's real kernel shapes."""
    cases = []
    for h, w, c, k, pad in ((200, 200, 3, 5, 0), (48, 48, 96, 3, 0),
                            (22, 22, 128, 3, 1), (10, 10, 128, 3, 1)):
        x = rng.standard_normal((h, w, c))
        cases.append((f"im2col  {h}x{w}x{c} k{k} p{pad}",
                      lambda x=x, k=k, pad=pad: kernels.im2col(x, k, pad)))
        cols = kernels.im2col(x, k, pad)
        cases.append((f"col2im  {h}x{w}x{c} k{k} p{pad}",
                      lambda cols=cols, h=h, w=w, c=c, k=k, pad=pad:
                      kernels.col2im(cols, h, w, c, k, pad)))
    for h, w, c, region, stride in ((196, 196, 96, 7, 4), (46, 46, 128, 3, 2),
                                    (22, 22, 128, 3, 2)):
        x = rng.standard_normal((h, w, c))
        cases.append((f"maxpool {h}x{w}x{c} r{region} s{stride}",
                      lambda x=x, r=region, s=stride:
                      kernels.maxpool_forward(x, r, s)))
        out, arg = kernels.maxpool_forward(x, region, stride)
        dout = rng.standard_normal(out.shape)
        cases.append((f"maxgrad {h}x{w}x{c} r{region} s{stride}",
                      lambda dout=dout, arg=arg, h=h, w=w, c=c:
                      kernels.maxpool_backward(dout, arg, h, w, c)))
    return cases


def _train_step_case(rng):
    net = build_network(NetworkConfig(), seed=0)
    net.norm_mean = np.zeros(3)
    net.norm_std = np.ones(3)
    batch = [Sample(tile=rng.standard_normal((200, 200, 3)),
                    label_type=kind, label=2)
             for kind in (LabelKind.LAND, LabelKind.BD, LabelKind.FAR)]
    return lambda: batch_step(net, batch, STAGE_ONE)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5,
                        help="timing repetitions (best is kept)")
    parser.add_argument("--number", type=int, default=3,
                        help="calls per repetition")
    args = parser.parse_args(argv)

    backends = {"python": kernels.load("python")}
    try:
        backends["c"] = kernels.load("c")
    except ImportError:
        print("compiled core not built; timing the fallback only")

    rng = np.random.default_rng(0)
    cases = _kernel_cases(rng) + [("train step (3-sample batch)",
                                   _train_step_case(rng))]

    names = list(backends)
    header = f"{'case':<34}" + "".join(f"{n + ' (ms)':>14}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    original = {name: getattr(kernels, name) for name in _KERNEL_NAMES}
    try:
        for label, fn in cases:
            times = {}
            for bname, backend in backends.items():
                _use(backend)
                times[bname] = _timed(fn, args.repeat, args.number)
            row = f"{label:<34}" + "".join(f"{times[n] * 1e3:>14.3f}"
                                           for n in names)
            if len(names) == 2:
                row += f"{times['python'] / times['c']:>9.2f}x"
            print(row)
    finally:
        for name, fn in original.items():
            setattr(kernels, name, fn)
    print(f"\nactive backend at import was '{kernels.BACKEND}'")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
