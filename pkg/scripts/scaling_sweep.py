"""Run a sweep config and fit runtime exponents per group.

    python3 scripts/scaling_sweep.py configs/jump_quasilinear.json --model power-times-log
"""
import argparse
import json
import logging
from pathlib import Path

from mmahh_lab.experiments import SweepSpec, format_csv, run_sweep, sweep_report


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("config")
    parser.add_argument("--model", choices=["pure-power", "power-times-log"], default="pure-power")
    parser.add_argument("--trials", type=int, help="override trials per cell")
    parser.add_argument("--parallel", type=int, default=1)
    parser.add_argument("--out-dir", default="results")
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    data = json.loads(Path(args.config).read_text())
    if args.trials:
        data["trials"] = args.trials
    spec = SweepSpec.from_dict(data)
    rows = run_sweep(spec, parallel=args.parallel)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(args.config).stem
    (out / f"{stem}.csv").write_text(format_csv(rows))
    report = sweep_report(rows, ("family", "params", "algo"), args.model)
    (out / f"{stem}_report.json").write_text(json.dumps(report, indent=2) + "\n")

    for group in report["groups"]:
        fit = group["fit"]
        alpha = f"{fit['alpha']:.3f}" if fit else "n/a"
        print(f"{group['key']}: exponent {alpha}")
        for cell in group["cells"]:
            ratio = f"{cell['ratio']:.3g}" if cell["ratio"] is not None else "-"
            print(f"  n={cell['n']:>4}  mean_T={cell['mean_T']:.6g}  T/bound={ratio}")


if __name__ == "__main__":
    main()
