"""MMAHH(OI, AM) against the i.i.d. mixing baseline on Jump_m.

For every n the baseline's mixing probability is taken as the best of
1/(c n), c in {1, 2, 4}, by simulated mean runtime.  Exact expected runtimes
from the Markov-chain oracle are printed alongside.
"""
import argparse

from mmahh_lab.acceptance import MarkovParams, Operator
from mmahh_lab.benchmarks import make_jump
from mmahh_lab.engine import EngineConfig, run_trials
from mmahh_lab.exact import ExactChain, exact_hitting_time
from mmahh_lab.experiments import preset_parameters
from mmahh_lab.stats import fit_exponent


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, nargs="+", default=[15, 20, 25, 30])
    parser.add_argument("--m", type=int, default=3)
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    mm, base = [], []
    print(f"{'n':>4} {'MMAHH':>12} {'exact':>12} {'MAHH':>12} {'exact':>12} {'c':>3} {'ratio':>7}")
    for n in args.n:
        f = make_jump(n, args.m)
        p, q = preset_parameters("thm1-case1", n, args.m)
        params = MarkovParams(p, q, Operator.AM)
        _, s = run_trials(EngineConfig(f, params=params, seed=args.seed), args.trials)
        best = min(
            ((c, run_trials(EngineConfig(f, mixing=1 / (c * n), seed=args.seed), args.trials)[1]) for c in (1, 2, 4)),
            key=lambda item: item[1].mean_T,
        )
        c, sm = best
        exact_mm = exact_hitting_time(ExactChain.mmahh(f, params))
        exact_base = exact_hitting_time(ExactChain.mahh(f, 1 / (c * n)))
        mm.append((n, s.mean_T))
        base.append((n, sm.mean_T))
        print(f"{n:>4} {s.mean_T:>12.0f} {exact_mm:>12.0f} {sm.mean_T:>12.0f} {exact_base:>12.0f} {c:>3} "
              f"{sm.mean_T / s.mean_T:>7.2f}")
    if len(mm) >= 3:
        print(f"exponents: MMAHH {fit_exponent(mm).alpha:.3f}, MAHH {fit_exponent(base).alpha:.3f}")


if __name__ == "__main__":
    main()
