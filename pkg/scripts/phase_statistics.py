"""Phase-level diagnostics on OneMax and Jump_m.

Prints simulated against closed-form phase drifts, the AM-phase success
probability against its lower bound, and the mean number of OI phases needed
from the all-zero string against 1/p_n^0.
"""
import argparse
import math

import numpy as np

from mmahh_lab.acceptance import MarkovParams, Operator
from mmahh_lab.benchmarks import make_jump, make_onemax
from mmahh_lab.bitstring import random_source
from mmahh_lab.engine import EngineConfig, measure_am_phase_success, measure_phase_drift, run_trials
from mmahh_lab.exact import am_phase_success_exact, am_phase_success_lower_bound, drift_am, drift_oi, p0n_at


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--phases", type=int, default=10**5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = random_source(args.seed)

    print("phase drift on OneMax (n=20)")
    f = make_onemax(20)
    for i in (5, 10, 15, 20):
        am = measure_phase_drift(f, i, Operator.AM, 0.3, args.phases, rng)
        oi = measure_phase_drift(f, i, Operator.OI, 0.05, args.phases, rng)
        print(f"  i={i:>2}  AM {am.mean:+.4f} ± {am.se:.4f} (closed {drift_am(20, 0.3, i):+.4f})"
              f"  OI {oi.mean:.4f} ± {oi.se:.4f} (closed {drift_oi(20, 0.05, i):.4f})")

    print("AM phase success from the local optimum of Jump_m (n=10)")
    for q in (0.5, 0.3):
        for m in (2, 3):
            est = measure_am_phase_success(make_jump(10, m), m, q, args.phases * 10, rng)
            print(f"  q={q} m={m}  simulated {est.mean:.5f} ± {est.se:.5f}  "
                  f"exact {am_phase_success_exact(make_jump(10, m), q, m):.5f}  "
                  f"bound {am_phase_success_lower_bound(10, m, q):.5f}")

    print("OI phases needed from the all-zero string, p = q = 1/(n ln n)")
    for n in (50, 100, 200):
        p = 1 / (n * math.log(n))
        cfg = EngineConfig(make_onemax(n), params=MarkovParams(p, p, Operator.OW), initial=n,
                           record_phases=True, seed=args.seed)
        results, _ = run_trials(cfg, 1000)
        counts = np.array([sum(ph.op is Operator.OI for ph in r.phases) for r in results])
        print(f"  n={n:>3}  mean {counts.mean():.3f} ± {counts.std(ddof=1) / math.sqrt(len(counts)):.3f}"
              f"  1/p_n^0 = {1 / p0n_at(n, 1):.3f}")


if __name__ == "__main__":
    main()
