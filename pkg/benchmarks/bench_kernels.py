"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py --blocks 2000 --angles 1024 --repeat 5
"""
import argparse
import time

import numpy as np

from idemkit import _kernels as K


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--blocks", type=int, default=2001, help="mesh points (2x2 blocks)")
    ap.add_argument("--angles", type=int, default=1024)
    ap.add_argument("--scan", type=int, default=2049, help="t samples for the S_r scan")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    g = np.random.default_rng(args.seed)
    blocks = g.normal(size=(args.blocks, 2, 2)) + 1j * g.normal(size=(args.blocks, 2, 2))
    parts = K.hermitian_parts(blocks)
    al = np.linspace(0, 2 * np.pi, args.angles, endpoint=False)
    ts = np.linspace(1.0, 2.0, args.scan)
    ca = np.cos(al)

    cases = {
        "grid_support": (lambda: K.grid_support_numpy(*parts, al), lambda: K.grid_support_numba(*parts, al)),
        "sr_scan": (lambda: K.sr_scan_numpy(2.0, ts, ca), lambda: K.sr_scan_numba(2.0, ts, ca)),
    }
    print(f"blocks={args.blocks} angles={args.angles} scan={args.scan} "
          f"threads={K.numba.get_num_threads()} layer={K.numba.config.THREADING_LAYER}")
    print(f"{'kernel':<14}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}{'max |diff|':>13}")
    for name, (np_fn, nb_fn) in cases.items():
        t0 = time.perf_counter()
        nb_fn()  # compile (or load from cache) outside the timed runs
        compile_s = time.perf_counter() - t0
        t_np, (v_np, _) = best_of(np_fn, args.repeat)
        t_nb, (v_nb, _) = best_of(nb_fn, args.repeat)
        diff = float(np.max(np.abs(v_np - v_nb)))
        print(f"{name:<14}{1e3 * t_np:>12.2f}{1e3 * t_nb:>12.2f}{t_np / t_nb:>10.1f}{diff:>13.1e}"
              f"   (first call {compile_s:.2f}s)")


if __name__ == "__main__":
    main()
