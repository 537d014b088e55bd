"""Random search for the largest g(N_z)^2 + g(D_x)^2 among dichotomic Lueders instruments."""

import argparse
import json

from qubitnd.fileio import instrument_to_dict
from qubitnd.optimize import dichotomic_violation_search


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--refine-top", type=int, default=25)
    ap.add_argument("--save", help="write the best instrument and correction as JSON")
    args = ap.parse_args()

    res = dichotomic_violation_search(args.trials, args.seed, refine_top=args.refine_top)
    print(f"best g-sum {res.gsum:.6f} at trial {res.trial} of {res.trials}")
    print(f"  N = {res.noise:.6f}, D = {res.disturbance:.6f}")
    if args.save:
        with open(args.save, "w", encoding="utf-8") as fh:
            json.dump(instrument_to_dict(res.instrument, res.correction), fh, indent=2)
            fh.write("\n")


if __name__ == "__main__":
    main()
