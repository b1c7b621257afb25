"""Compare the compiled and pure-numpy misreport-evaluation kernels.

The kernel solves one small Cobb-Douglas equilibrium per candidate
report; the ratio optimizer calls it with batches of grid points, so
throughput here directly sets the cost of the bound-verification sweeps.

Run: python3 benchmarks/bench_backends.py [--batch 2048] [--repeats 30]
"""
import argparse
import time

import numpy as np

from incratio import _core_py
from incratio.sampling import sample_cd_economy, sample_simplex

try:
    from incratio import _core
except ImportError:
    _core = None


def bench(fn, endow, alphas, cands, alpha_true, repeats):
    fn(endow, alphas, 0, cands, alpha_true)  # warm up
    start = time.perf_counter()
    for _ in range(repeats):
        fn(endow, alphas, 0, cands, alpha_true)
    elapsed = time.perf_counter() - start
    return repeats * len(cands) / elapsed


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--batch", type=int, default=2048)
    parser.add_argument("--repeats", type=int, default=30)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    # large batches model the grid stage; tiny ones model the pattern-
    # search refinement, where per-call overhead dominates the fallback
    print(f"{'n':>3} {'m':>3} {'batch':>6} {'python evals/s':>16} "
          f"{'compiled evals/s':>18} {'speedup':>8}")
    for n, m in ((2, 2), (2, 3), (3, 4), (4, 6)):
        rng = np.random.default_rng(args.seed)
        economy = sample_cd_economy(rng, n, m)
        endow = np.ascontiguousarray(economy.endowments)
        alphas = economy.alpha_matrix()
        for batch in (m * (m - 1), args.batch):
            cands = np.vstack([sample_simplex(rng, m) for _ in range(batch)])
            repeats = max(args.repeats, args.repeats * args.batch // (batch * 8))
            py_rate = bench(
                _core_py.cd_batch_eval, endow, alphas, cands, alphas[0], repeats
            )
            if _core is None:
                print(f"{n:>3} {m:>3} {batch:>6} {py_rate:>16.0f} "
                      f"{'(not built)':>18} {'':>8}")
                continue
            c_rate = bench(
                _core.cd_batch_eval, endow, alphas, cands, alphas[0], repeats
            )
            out = np.asarray(_core.cd_batch_eval(endow, alphas, 0, cands, alphas[0]))
            ref = np.asarray(_core_py.cd_batch_eval(endow, alphas, 0, cands, alphas[0]))
            assert np.allclose(out, ref, rtol=1e-12, equal_nan=True)
            print(f"{n:>3} {m:>3} {batch:>6} {py_rate:>16.0f} "
                  f"{c_rate:>18.0f} {c_rate / py_rate:>7.1f}x")


if __name__ == "__main__":
    main()
