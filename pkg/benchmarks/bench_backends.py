"""Compare the compiled kernels against the pure-Python fallback.

Usage: python benchmarks/bench_backends.py [--quick]

Times the two hot kernels on representative workloads:
  * scan_consistent -- the enumeration learner's candidate sweep
    (hypotheses x sample points, the dominant cost of realizable-game play)
  * run_machine     -- step-bounded while-program interpretation

The workloads are seeded and identical across backends; each result is
checked for agreement before timing.
"""

import argparse
import statistics
import sys
import time

import numpy as np

from uolsim.backend import implementations
from uolsim.learners import AdviceStream
from uolsim import progmodel as pm


def build_scan_workload(n_hyps, n_pts, seed=7):
    bits = AdviceStream(seed)
    kinds = np.zeros(n_hyps, dtype=np.int64)
    p0s = np.zeros(n_hyps, dtype=np.int64)
    offs = np.zeros(n_hyps, dtype=np.int64)
    lens = np.zeros(n_hyps, dtype=np.int64)
    aux = []
    for i in range(n_hyps):
        kind = i % 4
        kinds[i] = kind
        offs[i] = len(aux)
        if kind == 0:
            prefix = [bits.column(i).bit(j) for j in range(8)]
            aux.extend(prefix)
            lens[i] = 8
            p0s[i] = 0
        elif kind == 3:
            key = i % max(n_pts, 1)
            aux.extend((key, 1))
            lens[i] = 2
            p0s[i] = 0
        else:
            p0s[i] = n_pts + 1 + i  # thresholds that never fire on the stream
    aux_arr = np.array(aux, dtype=np.int64)
    xs = np.arange(n_pts, dtype=np.int64)
    ys = np.array([bits.column(10**6 + t).bit(0) for t in range(n_pts)], dtype=np.int64)
    return kinds, p0s, offs, lens, aux_arr, xs, ys


def build_machine_workload():
    m = pm.Machine((pm.While(0, (pm.Dec(0), pm.While(1, (pm.Dec(1),)), pm.Inc(1))),
                    pm.Inc(1)))
    code, nregs = pm._compiled(m)
    return np.array(code, dtype=np.int64), nregs


def timed(fn, repeats=5):
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def main(argv=None):
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args(argv)

    impls = implementations()
    if "compiled" not in impls:
        print("compiled kernels are not built; run pip install -e . first")

    n_hyps, n_pts = (400, 200) if args.quick else (2000, 1000)
    x_in = 500 if args.quick else 5000
    scan_args = build_scan_workload(n_hyps, n_pts)
    code, nregs = build_machine_workload()

    rows = []
    baselines = {}
    for name, mod in sorted(impls.items()):
        got_scan = mod.scan_consistent(*scan_args, 0, n_hyps)
        got_mach = tuple(mod.run_machine(code, nregs, x_in, 10**9))
        baselines.setdefault("scan", got_scan)
        baselines.setdefault("mach", got_mach)
        assert got_scan == baselines["scan"], "backends disagree on scan"
        assert got_mach == baselines["mach"], "backends disagree on machine run"
        t_scan = timed(lambda: mod.scan_consistent(*scan_args, 0, n_hyps))
        t_mach = timed(lambda: mod.run_machine(code, nregs, x_in, 10**9))
        rows.append((name, t_scan, t_mach))

    ref = {name: (ts, tm) for name, ts, tm in rows}["python"]
    print(f"{'backend':<10} {'scan_consistent':>18} {'run_machine':>15} "
          f"{'scan speedup':>14} {'machine speedup':>16}")
    for name, ts, tm in rows:
        print(f"{name:<10} {ts * 1e3:>15.2f} ms {tm * 1e3:>12.2f} ms "
              f"{ref[0] / ts:>13.1f}x {ref[1] / tm:>15.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
