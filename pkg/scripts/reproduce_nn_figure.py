"""Noise-noise lower boundaries for a few angles, with four-outcome hull points checked."""

import argparse
from pathlib import Path

from qubitnd import regions as rg
from qubitnd.fileio import write_region_csv
from qubitnd.measures import noise
from qubitnd.plot import plot_csvs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="figures")
    ap.add_argument("--dots", type=float, nargs="+", default=[0.0, 0.25, 0.5, 0.75])
    ap.add_argument("--samples", type=int, default=201)
    args = ap.parse_args()

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for dot in args.dots:
        pts = rg.nn_lower_boundary(dot, args.samples)
        path = out / f"nn_dot{dot:g}.csv"
        write_region_csv(path, pts)
        paths.append(path)

        pair = rg.ObservablePair.with_dot(dot)
        err = 0.0
        for p in pts[:: max(1, len(pts) // 20)]:
            povm = rg.nn_saturating_povm(pair, p)
            err = max(err, abs(noise(povm, pair.a).value - p.x), abs(noise(povm, pair.b).value - p.y))
        print(f"dot={dot:g}: {len(pts)} boundary points, construction error {err:.2e}")
    plot_csvs(paths, out / "nn.svg")


if __name__ == "__main__":
    main()
