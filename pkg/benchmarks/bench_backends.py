"""Benchmark the numba kernels against the pure-numpy fallback.

Times the hot per-batch kernel chain (softmax + loss + logit gradient +
momentum update + value clip) in-process for both kernel modules, then a
short end-to-end training run per backend in a fresh interpreter via the
CYCTRAIN_BACKEND environment flag.

Usage: python benchmarks/bench_backends.py [--batch 64] [--classes 4]
       [--params 2000] [--reps 2000]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np


def kernel_chain(k, scaled, targets, mask, w, v, g):
    probs, losses = k.softmax_nll_rows(scaled, targets)
    dz = k.masked_dlogits(probs, targets, mask, 1.0 / len(targets))
    k.sgd_update(w, v, g, 0.05, 0.9, 1e-4)
    k.clip_value(g, 4.0)
    return losses.sum() + dz[0, 0]


def time_chain(k, reps, batch, classes, params, seed=0):
    rng = np.random.default_rng(seed)
    scaled = rng.normal(size=(batch, classes))
    targets = rng.integers(0, classes, size=batch)
    mask = np.ones(batch)
    w, v, g = (rng.normal(size=params) for _ in range(3))
    kernel_chain(k, scaled, targets, mask, w, v, g)  # warm up / JIT compile
    t0 = time.perf_counter()
    sink = 0.0
    for _ in range(reps):
        sink += kernel_chain(k, scaled, targets, mask, w, v, g)
    elapsed = time.perf_counter() - t0
    return elapsed / reps, sink


def time_end_to_end(backend):
    code = (
        "import time\n"
        "from cyctrain.harness import ExperimentConfig, run_experiment\n"
        "cfg = ExperimentConfig(classes=4, dims=16, train_samples=2000,\n"
        "                       test_samples=1000, hidden=(32, 32), epochs=15)\n"
        "run_experiment(cfg, seed=0)  # warm up (JIT compile)\n"
        "t0 = time.perf_counter()\n"
        "run_experiment(cfg, seed=1)\n"
        "print(time.perf_counter() - t0)\n"
    )
    env = dict(os.environ, CYCTRAIN_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--batch", type=int, default=64)
    parser.add_argument("--classes", type=int, default=4)
    parser.add_argument("--params", type=int, default=2000)
    parser.add_argument("--reps", type=int, default=2000)
    parser.add_argument("--skip-end-to-end", action="store_true")
    args = parser.parse_args()

    from cyctrain.nn import kernels_numpy
    rows = [("numpy", kernels_numpy)]
    try:
        from cyctrain.nn import kernels_numba
        rows.append(("numba", kernels_numba))
    except ImportError:
        print("numba unavailable; benchmarking the numpy kernels only")

    print(f"kernel chain: batch={args.batch} classes={args.classes} "
          f"params={args.params} reps={args.reps}")
    per_backend = {}
    for name, module in rows:
        per_call, _ = time_chain(module, args.reps, args.batch,
                                 args.classes, args.params)
        per_backend[name] = per_call
        print(f"  {name:6s} {per_call * 1e6:9.2f} us/call")
    if len(per_backend) == 2:
        print(f"  speedup numba vs numpy: "
              f"{per_backend['numpy'] / per_backend['numba']:.2f}x")

    if not args.skip_end_to_end:
        print("end-to-end: 15 epochs, 2000 train samples (fresh interpreter)")
        for name, _ in rows:
            seconds = time_end_to_end(name)
            print(f"  {name:6s} {seconds:7.3f} s/run")


if __name__ == "__main__":
    main()
