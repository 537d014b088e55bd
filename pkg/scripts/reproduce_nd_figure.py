"""Sampled (N_z, D_x) points against the conjectured lower boundary.

Writes nd_boundary.csv, nd_samples.csv and nd.svg into --outdir.
"""

import argparse
from pathlib import Path

from qubitnd import regions as rg
from qubitnd.cli import sample_points
from qubitnd.fileio import write_region_csv
from qubitnd.plot import plot_csvs
from qubitnd.sampling import SamplerConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", default="figures")
    ap.add_argument("--count", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--outcomes", type=int, default=3)
    ap.add_argument("--optimize", choices=("identity", "heuristic", "refine"), default="heuristic")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    write_region_csv(out / "nd_boundary.csv", rg.nd_conjectured_boundary(201))
    cfg = SamplerConfig(seed=args.seed, outcomes=args.outcomes)
    pts = sample_points(cfg, args.count, strategy=args.optimize, workers=args.workers)
    write_region_csv(out / "nd_samples.csv", pts)
    plot_csvs([out / "nd_boundary.csv", out / "nd_samples.csv"], out / "nd.svg")

    worst = max(rg.nd_conjecture_gap(p.x, p.y) for p in pts)
    print(f"{len(pts)} samples, largest gap below the curve: {worst:.3e}")


if __name__ == "__main__":
    main()
