"""Numerical verification suites.

Each check returns :class:`Check` records holding what was expected, what was
computed and the tolerance used.  Counts scale with ``scale`` so the suites can
be run quickly (``scale < 1``) or at full size (``scale = 1``).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import qmodel as qm
from . import regions as rg
from .entropy import binary_entropy_h as h
from .entropy import binary_entropy_h_array
from .entropy import binary_entropy_inv_g as g
from .measures import (
    disturbance_corrected,
    disturbance_identity_lueders,
    disturbance_identity_pp,
    noise,
    noise_via_joint,
)
from .optimize import dichotomic_violation_search, g_sum, optimize_corrections
from .sampling import (
    SamplerConfig,
    random_direction,
    random_mixed_povm,
    random_povm,
    random_rotations,
    random_state,
    rng_for,
)

SUITES = ("counterexamples", "lueders", "nn-tight", "oracles", "all")
Z, X = qm.pauli("z"), qm.pauli("x")


@dataclass(frozen=True)
class Check:
    name: str
    expected: str
    computed: float
    tolerance: float
    passed: bool
    seconds: float = 0.0

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return (
            f"[{flag}] {self.name}: expected {self.expected}, computed {self.computed:.12g}, "
            f"tolerance {self.tolerance:g} ({self.seconds:.2f} s)"
        )

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "expected": self.expected,
            "computed": float(self.computed),
            "tolerance": float(self.tolerance),
            "passed": bool(self.passed),
            "seconds": float(self.seconds),
        }


def _n(count: int, scale: float) -> int:
    return max(1, int(round(count * scale)))


class _Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


# --------------------------------------------------------------------------
# counterexamples


def check_mtheta(theta: float = math.pi / 3) -> list[Check]:
    with _Timer() as t:
        fam = rg.mtheta_family(theta)
        n = noise(fam.povm, Z).value
        d = disturbance_corrected(fam.instrument, X, fam.correction).value
        gs = g_sum(n, d)
    c = math.cos(theta)
    n_ref = (c + h(math.sin(theta))) / (1 + c)
    d_ref = h(c) / (1 + c)
    label = f"M^theta at theta={theta:.6g}"
    return [
        Check(f"{label} gsum", "in [1.09, 1.11]", gs, 0.0, 1.09 <= gs <= 1.11, t.seconds),
        Check(f"{label} noise", f"{n_ref:.12g}", n, 1e-10, abs(n - n_ref) <= 1e-10, t.seconds),
        Check(f"{label} disturbance", f"{d_ref:.12g}", d, 1e-10, abs(d - d_ref) <= 1e-10, t.seconds),
    ]


def check_dichotomic_counterexample() -> list[Check]:
    with _Timer() as t:
        ce = rg.dichotomic_counterexample()
    return [
        Check("dichotomic instrument noise", "in [0.869, 0.871]", ce.noise, 0.0,
              0.869 <= ce.noise <= 0.871, t.seconds),
        Check("dichotomic instrument disturbance", "in [0.254, 0.256]", ce.disturbance, 0.0,
              0.254 <= ce.disturbance <= 0.256, t.seconds),
        Check("dichotomic instrument gsum", "in [1.009, 1.013]", ce.gsum, 0.0,
              1.009 <= ce.gsum <= 1.013, t.seconds),
    ]


def check_dichotomic_search(trials: int = 10_000, seed: int = 0) -> list[Check]:
    with _Timer() as t:
        res = dichotomic_violation_search(trials, seed)
    return [
        Check(f"dichotomic search best gsum ({trials} trials)", ">= 1.011", res.gsum, 0.0,
              res.gsum >= 1.011, t.seconds)
    ]


def _conjecture_instrument(seed: int, i: int) -> qm.Instrument:
    outcomes = 3 + i % 2
    profile = "all_rank_one" if (i // 2) % 2 == 0 else "general"
    cfg = SamplerConfig(seed=seed, outcomes=outcomes, plane_xz=True, rank_profile=profile)
    return qm.Instrument.lueders(random_povm(cfg, i))


def conjecture_sweep(count: int, seed: int = 0, budget: int = 400):
    """``(worst_gap, points)`` over ``count`` 3/4-outcome instruments.

    Each instrument gets heuristic rotations followed by simplex refinement.
    """
    worst, pts = -math.inf, []
    for i in range(count):
        inst = _conjecture_instrument(seed, i)
        n = noise(inst.povm, Z).value
        d = optimize_corrections(inst, X, "refine", budget=budget, seed=seed).value
        worst = max(worst, rg.nd_conjecture_gap(n, d))
        pts.append((n, d))
    return worst, pts


def check_conjecture(count: int = 10_000, seed: int = 0) -> list[Check]:
    with _Timer() as t:
        worst, _ = conjecture_sweep(count, seed)
    return [
        Check(f"no sampled point below conjectured curve ({count} instruments)",
              "max gap <= 0", worst, 1e-6, worst <= 1e-6, t.seconds)
    ]


# --------------------------------------------------------------------------
# Lueders relation


def lueders_sweep(count: int, seed: int = 0) -> float:
    """Largest ``g(N)^2 + g(D_I)^2 - 1`` over ``count`` random Lueders instruments."""
    worst = -math.inf
    for i in range(count):
        povm = random_mixed_povm(seed, i)
        n = noise(povm, Z).value
        d = disturbance_identity_lueders(povm, X).value
        worst = max(worst, rg.luders_relation(n, d))
    return worst


def check_lueders_sweep(count: int = 100_000, seed: int = 0) -> list[Check]:
    with _Timer() as t:
        worst = lueders_sweep(count, seed)
    return [
        Check(f"Lueders relation over {count} instruments", "max residual <= 0", worst, 1e-9,
              worst <= 1e-9, t.seconds)
    ]


def check_lueders_tightness(count: int = 1000, seed: int = 0) -> list[Check]:
    with _Timer() as t:
        rng = rng_for(seed, 0, 10)
        err = 0.0
        for _ in range(count):
            # uniform on the quarter disk in g-space, mapped back to entropies
            rad, ang = math.sqrt(rng.uniform()), rng.uniform(0.0, math.pi / 2)
            s, u = h(rad * math.cos(ang)), h(rad * math.sin(ang))
            povm = rg.luders_tight_instrument(s, u)
            err = max(err, abs(noise(povm, Z).value - s),
                      abs(disturbance_identity_lueders(povm, X).value - u))
    return [
        Check(f"Lueders tight instrument reproduces {count} targets", "0", err, 1e-8,
              err <= 1e-8, t.seconds)
    ]


# --------------------------------------------------------------------------
# noise-noise and mutually unbiased bounds


def check_nn_line(count: int = 1000, seed: int = 0) -> list[Check]:
    pair = rg.ObservablePair.orthogonal()
    with _Timer() as t:
        rng = rng_for(seed, 0, 11)
        err = 0.0
        for _ in range(count):
            s = rng.uniform()
            povm = rg.nn_saturating_povm(pair, rg.RegionPoint(s, 1.0 - s, "nn"))
            err = max(err, abs(noise(povm, Z).value - s), abs(noise(povm, X).value - (1.0 - s)))
    return [
        Check(f"saturating POVM hits {count} targets on N_z + N_x = 1", "0", err, 1e-6,
              err <= 1e-6, t.seconds)
    ]


def check_nn_hull(count: int = 200, seed: int = 0, dots=(0.1, 0.25)) -> list[Check]:
    """Targets in the hull but outside ``E(A, B)`` via the four-outcome mixture."""
    out = []
    for dot in dots:
        pair = rg.ObservablePair.with_dot(dot)
        with _Timer() as t:
            rng = rng_for(seed, int(dot * 1000), 12)
            err, hits = 0.0, 0
            chain = rg.nn_lower_boundary(dot, 400)
            for _ in range(count):
                # points just above a random chord of the lower boundary
                j = int(rng.integers(0, len(chain) - 1))
                w = rng.uniform()
                x = w * chain[j].x + (1 - w) * chain[j + 1].x
                y = w * chain[j].y + (1 - w) * chain[j + 1].y + rng.uniform(0.0, 0.05)
                if not rg.nn_region_contains(pair, rg.RegionPoint(x, y, "nn")):
                    continue
                if rg.prep_relation_entropic(pair, x, y) <= 0.0:
                    continue
                povm = rg.nn_saturating_povm(pair, rg.RegionPoint(x, y, "nn"))
                hits += len(povm) == 4
                err = max(err, abs(noise(povm, pair.a).value - x), abs(noise(povm, pair.b).value - y))
        out.append(Check(f"four-outcome construction at dot={dot} ({hits} hull points)", "0",
                         err, 1e-6, err <= 1e-6 and hits > 0, t.seconds))
    return out


def _random_instrument(seed: int, i: int) -> qm.Instrument:
    povm = random_mixed_povm(seed, i)
    if i % 2 == 0:
        return qm.Instrument.lueders(povm)
    cfg = SamplerConfig(seed=seed, outcomes=len(povm), plane_xz=i % 4 == 1)
    return qm.Instrument.purity_preserving(povm, random_rotations(cfg, i))


def check_mu_bounds(count: int = 10_000, seed: int = 0, budget: int = 200) -> list[Check]:
    """Refined corrections make the ``N + D`` leg as strict as the search allows."""
    with _Timer() as t:
        worst_nn, worst_nd = math.inf, math.inf
        for i in range(count):
            inst = _random_instrument(seed, i)
            nz = noise(inst.povm, Z).value
            nx = noise(inst.povm, X).value
            d = optimize_corrections(
                inst, X, "refine", include_prepare=len(inst) == 2, budget=budget, seed=seed
            ).value
            worst_nn = min(worst_nn, nz + nx)
            worst_nd = min(worst_nd, nz + d)
    return [
        Check(f"N_z + N_x over {count} instruments", "min >= 1", worst_nn, 1e-9,
              worst_nn >= 1 - 1e-9, t.seconds),
        Check(f"N_z + D_x over {count} instruments", "min >= 1", worst_nd, 1e-9,
              worst_nd >= 1 - 1e-9, t.seconds),
    ]


def check_dichotomic_nn(count: int = 10_000, seed: int = 0) -> list[Check]:
    with _Timer() as t:
        worst = -math.inf
        for i in range(count):
            profile = ("all_rank_one", "general", "dichotomic_mixed_rank")[i % 3]
            cfg = SamplerConfig(seed=seed, outcomes=2, plane_xz=(i // 3) % 2 == 0, rank_profile=profile)
            povm = random_povm(cfg, i)
            worst = max(worst, rg.nn_dichotomic_relation(noise(povm, Z).value, noise(povm, X).value))
    return [
        Check(f"dichotomic noise-noise relation over {count} POVMs", "max residual <= 0",
              worst, 1e-9, worst <= 1e-9, t.seconds)
    ]


def check_preparation(count: int = 10_000, seed: int = 0) -> list[Check]:
    with _Timer() as t:
        rng = rng_for(seed, 0, 13)
        worst_sd, worst_ent = math.inf, -math.inf
        for _ in range(count):
            dot = rng.uniform(-1.0, 1.0)
            pair = rg.ObservablePair.with_dot(dot)
            rho = random_state(rng, pure=bool(rng.integers(0, 2)))
            worst_sd = min(worst_sd, rg.prep_relation_sd(pair, rho))
            ha, hb = rg.prep_point(pair, rho)
            worst_ent = max(worst_ent, rg.prep_relation_entropic(pair, ha, hb))
    return [
        Check(f"standard-deviation preparation relation ({count} states)", "min residual >= 0",
              worst_sd, 1e-9, worst_sd >= -1e-9, t.seconds),
        Check(f"entropic preparation relation ({count} states)", "max residual <= 0",
              worst_ent, 1e-9, worst_ent <= 1e-9, t.seconds),
    ]


# --------------------------------------------------------------------------
# oracles


def check_entropy(step: float = 1e-3) -> list[Check]:
    with _Timer() as t:
        xs = np.linspace(0.0, 1.0, int(round(1 / step)) + 1)
        f = binary_entropy_h_array(np.sqrt(np.clip(1 - xs**2, 0.0, 1.0)))
        mid = 0.5 * (xs[:, None] + xs[None, :])
        lhs = binary_entropy_h_array(np.sqrt(np.clip(1 - mid**2, 0.0, 1.0)))
        excess = float(np.max(lhs - 0.5 * (f[:, None] + f[None, :])))
        trip = max(
            max(abs(g(h(x)) - x) for x in xs),
            max(abs(h(g(y)) - y) for y in xs),
        )
    return [
        Check("midpoint convexity of h(sqrt(1-x^2)) on grid", "max excess <= 0", excess, 1e-10,
              excess <= 1e-10, t.seconds),
        Check("g/h round trip on grid", "0", trip, 1e-10, trip <= 1e-10, t.seconds),
    ]


def check_noise_oracle(count: int = 10_000, seed: int = 0) -> list[Check]:
    with _Timer() as t:
        err = 0.0
        for i in range(count):
            povm = random_mixed_povm(seed, i)
            a = qm.PauliObservable(random_direction(rng_for(seed, i, 14), False))
            err = max(err, abs(noise(povm, a).value - noise_via_joint(povm, a).value))
    return [Check(f"noise vs joint-table noise ({count} POVMs)", "0", err, 1e-12, err <= 1e-12, t.seconds)]


def check_disturbance_oracle(count: int = 1000, seed: int = 0) -> list[Check]:
    with _Timer() as t:
        err_l, err_p = 0.0, 0.0
        for i in range(count):
            povm = random_mixed_povm(seed, i)
            b = qm.PauliObservable(random_direction(rng_for(seed, i, 15), False))
            ident = qm.Correction.identity(len(povm))
            ref = disturbance_corrected(qm.Instrument.lueders(povm), b, ident).value
            err_l = max(err_l, abs(disturbance_identity_lueders(povm, b).value - ref))
            cfg = SamplerConfig(seed=seed, outcomes=len(povm), plane_xz=False)
            rots = random_rotations(cfg, i)
            ref = disturbance_corrected(qm.Instrument.purity_preserving(povm, rots), b, ident).value
            err_p = max(err_p, abs(disturbance_identity_pp(povm, rots, b).value - ref))
    return [
        Check(f"Lueders closed form vs Born table ({count})", "0", err_l, 1e-10, err_l <= 1e-10, t.seconds),
        Check(f"purity-preserving closed form vs Born table ({count})", "0", err_p, 1e-10,
              err_p <= 1e-10, t.seconds),
    ]


def check_matrix_oracle(count: int = 1000, seed: int = 0) -> list[Check]:
    with _Timer() as t:
        err = 0.0
        for i in range(count):
            povm = random_mixed_povm(seed, i)
            rng = rng_for(seed, i, 16)
            kind = i % 3
            if kind == 0:
                inst = qm.Instrument.lueders(povm)
            elif kind == 1:
                cfg = SamplerConfig(seed=seed, outcomes=len(povm), plane_xz=False)
                inst = qm.Instrument.purity_preserving(povm, random_rotations(cfg, i))
            else:
                inst = qm.Instrument.measure_prepare(povm, [random_state(rng) for _ in povm])
            rho = random_state(rng)
            for m in range(len(inst)):
                p1, s1 = qm.apply_instrument(inst, rho, m)
                p2, mat = qm.apply_instrument_matrix(inst, rho, m)
                err = max(err, abs(p1 - p2))
                if s1 is not None and mat is not None:
                    err = max(err, float(np.max(np.abs(s1.matrix() - mat))))
    return [Check(f"Bloch update vs matrix update ({count} cases)", "0", err, 1e-10, err <= 1e-10, t.seconds)]


# --------------------------------------------------------------------------
# suites


def run_suite(name: str, scale: float = 1.0, seed: int = 0) -> list[Check]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {SUITES}")
    if name == "all":
        return [c for s in SUITES[:-1] for c in run_suite(s, scale, seed)]
    if name == "counterexamples":
        return (
            check_mtheta()
            + check_dichotomic_counterexample()
            + check_dichotomic_search(_n(10_000, scale), seed)
            + check_conjecture(_n(10_000, scale), seed)
        )
    if name == "lueders":
        return check_lueders_sweep(_n(100_000, scale), seed) + check_lueders_tightness(_n(1000, scale), seed)
    if name == "nn-tight":
        return (
            check_nn_line(_n(1000, scale), seed)
            + check_nn_hull(_n(200, scale), seed)
            + check_dichotomic_nn(_n(10_000, scale), seed)
            + check_mu_bounds(_n(10_000, scale), seed)
            + check_preparation(_n(10_000, scale), seed)
        )
    return (
        check_entropy()
        + check_noise_oracle(_n(10_000, scale), seed)
        + check_disturbance_oracle(_n(1000, scale), seed)
        + check_matrix_oracle(_n(1000, scale), seed)
    )
