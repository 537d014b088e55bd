"""Command-line interface: ``qubitnd {eval,boundary,sample,verify,plot}``.

Exit codes: 0 ok, 1 verification failure, 2 file error, 3 parse error
(malformed file or command line), 4 invalid model.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

from . import qmodel as qm
from . import regions as rg
from .entropy import binary_entropy_inv_g as g
from .errors import ParseError, QubitNDError, UnsupportedDot
from .fileio import load_instrument, region_csv_text
from .measures import disturbance_corrected, mu_bound, noise
from .optimize import optimize_corrections
from .plot import plot_csvs
from .sampling import RANK_PROFILES, SamplerConfig, random_povm, random_rotations
from .verify import SUITES, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_FILE, EXIT_PARSE, EXIT_MODEL = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# --------------------------------------------------------------------------
# eval


def _correction_for(mode: str, inst, b, file_corr, budget: int, seed: int):
    if mode == "file":
        if file_corr is None:
            raise ParseError("instrument file has no correction", "correction")
        return file_corr
    if mode == "identity":
        return qm.Correction.identity(len(inst))
    rep = optimize_corrections(inst, b, mode, include_prepare=len(inst) == 2, budget=budget, seed=seed)
    return rep.best


def eval_report(inst, a, b, corr, mode: str) -> dict:
    nres = noise(inst.povm, a)
    dres = disturbance_corrected(inst, b, corr)
    n, d = nres.value, dres.value
    dot = float(a.axis @ b.axis)
    bound = mu_bound(a, b)
    residuals = {
        "mu_noise_noise": n + noise(inst.povm, b).value - bound,
        "mu_noise_disturbance": n + d - bound,
    }
    orthogonal = abs(dot) < 1e-12
    if orthogonal:
        residuals["nn_orthogonal_linear"] = n + noise(inst.povm, b).value - 1.0
        if len(inst) == 2:
            residuals["nn_dichotomic"] = rg.nn_dichotomic_relation(n, noise(inst.povm, b).value)
        residuals["nd_conjecture_gap"] = rg.nd_conjecture_gap(n, d)
        if isinstance(inst.update, qm.Lueders) and all(
            isinstance(op, qm.IdentityMap) for op in corr.ops
        ):
            residuals["lueders_relation"] = rg.luders_relation(n, d)
    outcomes = []
    for m, ((p, k, nvec), (pm, hm)) in enumerate(zip(inst.povm.pkn(), nres.per_outcome)):
        outcomes.append({"outcome": m, "p": p, "k": k, "n": nvec.tolist(), "prob": pm, "entropy_a": hm})
    return {
        "outcomes_count": len(inst),
        "a": a.axis.tolist(),
        "b": b.axis.tolist(),
        "correction_mode": mode,
        "noise": n,
        "disturbance": d,
        "gsum": g(n) ** 2 + g(d) ** 2,
        "per_outcome": outcomes,
        "residuals": residuals,
    }


def _format_eval(rep: dict) -> str:
    lines = [
        f"outcomes: {rep['outcomes_count']}",
        f"N(M, A) = {rep['noise']:.12f}",
        f"D(M, B) = {rep['disturbance']:.12f}  (correction: {rep['correction_mode']})",
        f"g(N)^2 + g(D)^2 = {rep['gsum']:.12f}",
        "per outcome:",
    ]
    for o in rep["per_outcome"]:
        n = ", ".join(f"{v:.6f}" for v in o["n"])
        lines.append(
            f"  m={o['outcome']}: p={o['p']:.6f} k={o['k']:.6f} n=({n}) "
            f"prob={o['prob']:.6f} H(A|m)={o['entropy_a']:.6f}"
        )
    lines.append("residuals:")
    lines.extend(f"  {k} = {v:.6e}" for k, v in rep["residuals"].items())
    return "\n".join(lines) + "\n"


def cmd_eval(args) -> int:
    inst, file_corr = load_instrument(args.instrument)
    a, b = qm.pauli(_axis(args.a, "--a")), qm.pauli(_axis(args.b, "--b"))
    mode = args.correction or ("file" if file_corr is not None else "identity")
    corr = _correction_for(mode, inst, b, file_corr, args.budget, args.seed)
    rep = eval_report(inst, a, b, corr, mode)
    _emit(json.dumps(rep, indent=2) + "\n" if args.json else _format_eval(rep), args.out)
    return EXIT_OK


def _axis(spec: str, flag: str):
    try:
        return qm.axis(spec)
    except (ValueError, TypeError) as exc:
        raise ParseError(str(exc), flag) from None


# --------------------------------------------------------------------------
# boundary / sample


def boundary_points(region: str, dot: float, samples: int) -> list[rg.RegionPoint]:
    if samples < 2:
        raise ValueError("samples must be >= 2")
    if abs(dot) > 1.0:
        raise ValueError(f"|dot| = {abs(dot)} > 1")
    if region == "prep":
        return rg.prep_boundary(dot, samples)
    if region == "nn":
        return rg.nn_lower_boundary(dot, samples)
    if dot != 0.0:
        raise UnsupportedDot("nd-conjecture is defined for orthogonal observables only (dot 0)")
    return rg.nd_conjectured_boundary(samples)


def cmd_boundary(args) -> int:
    try:
        pts = boundary_points(args.region, args.dot, args.samples)
    except UnsupportedDot:
        raise
    except ValueError as exc:
        raise ParseError(str(exc), "--dot/--samples") from None
    _emit(region_csv_text(pts), args.out)
    return EXIT_OK


def sample_point(cfg: SamplerConfig, index: int, update: str, strategy: str, budget: int) -> rg.RegionPoint:
    povm = random_povm(cfg, index)
    if update == "lueders":
        inst = qm.Instrument.lueders(povm)
    else:
        inst = qm.Instrument.purity_preserving(povm, random_rotations(cfg, index))
    n = noise(povm, qm.pauli("z")).value
    d = optimize_corrections(inst, qm.pauli("x"), strategy, budget=budget, seed=cfg.seed).value
    return rg.RegionPoint(n, d, "nd", f"sample;seed={cfg.seed};index={index}")


def _sample_range(cfg, lo, hi, update, strategy, budget):
    return [sample_point(cfg, i, update, strategy, budget) for i in range(lo, hi)]


def sample_points(cfg: SamplerConfig, count: int, update: str = "lueders", strategy: str = "heuristic",
                  budget: int = 400, workers: int = 1) -> list[rg.RegionPoint]:
    """``count`` (N_z, D_x) points; rows are in draw order whatever ``workers`` is."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if workers <= 1:
        return _sample_range(cfg, 0, count, update, strategy, budget)
    step = math.ceil(count / workers)
    bounds = [(lo, min(lo + step, count)) for lo in range(0, count, step)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_sample_range, cfg, lo, hi, update, strategy, budget) for lo, hi in bounds]
        return [p for f in futures for p in f.result()]


def cmd_sample(args) -> int:
    try:
        cfg = SamplerConfig(
            seed=args.seed, outcomes=args.outcomes, plane_xz=not args.sphere, rank_profile=args.rank_profile
        )
    except ValueError as exc:
        raise ParseError(str(exc), "--outcomes/--rank-profile") from None
    if args.count < 1:
        raise ParseError("count must be >= 1", "--count")
    pts = sample_points(cfg, args.count, args.update, args.optimize, args.budget, args.workers)
    _emit(region_csv_text(pts), args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# verify / plot


def cmd_verify(args) -> int:
    checks = run_suite(args.suite, scale=args.scale, seed=args.seed)
    ok = all(c.passed for c in checks)
    if args.json:
        text = json.dumps({"suite": args.suite, "passed": ok, "checks": [c.as_dict() for c in checks]}, indent=2)
        text += "\n"
    else:
        text = "\n".join(c.line() for c in checks)
        text += f"\n{sum(c.passed for c in checks)}/{len(checks)} checks passed\n"
    _emit(text, args.out)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_plot(args) -> int:
    if args.out is None:
        raise ParseError("plot needs an output path", "--out")
    plot_csvs(args.csv, args.out)
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="RNG seed (default 0)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output path (default stdout)")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable report")

    parser = _Parser(prog="qubitnd", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", parents=[common], help="noise and disturbance of an instrument file")
    p.add_argument("instrument")
    p.add_argument("--a", default="z", help="axis of A: x|y|z|-x|... or 'ax ay az'")
    p.add_argument("--b", default="x", help="axis of B")
    p.add_argument("--correction", choices=("file", "identity", "heuristic", "refine"), default=None)
    p.add_argument("--budget", type=int, default=400)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("boundary", parents=[common], help="boundary curve as region CSV")
    p.add_argument("region", choices=("prep", "nn", "nd-conjecture"))
    p.add_argument("--dot", type=float, default=0.0)
    p.add_argument("--samples", type=int, default=101)
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("sample", parents=[common], help="random instruments as (N, D) region CSV")
    p.add_argument("--outcomes", type=int, default=3)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--optimize", choices=("identity", "heuristic", "refine"), default="heuristic")
    p.add_argument("--update", choices=("lueders", "purity_preserving"), default="lueders")
    p.add_argument("--rank-profile", choices=RANK_PROFILES, default="all_rank_one")
    p.add_argument("--sphere", action="store_true", help="draw directions on the sphere, not the xz-plane")
    p.add_argument("--budget", type=int, default=400)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--scale", type=float, default=1.0, help="fraction of the full sample counts")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot", parents=[common], help="render region CSVs to SVG (needs --out)")
    p.add_argument("csv", nargs="+")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for key, default in (("seed", 0), ("out", None), ("json", False)):
        if not hasattr(args, key):
            setattr(args, key, default)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"file error: {exc}", file=sys.stderr)
        return EXIT_FILE
    except QubitNDError as exc:
        print(f"invalid model: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
