"""Seeded random POVMs, instruments and rotations.

Each draw is a pure function of ``(config, index)``: the generator for draw
``index`` is a child stream of ``config.seed``, so draws can be produced in
any order (or in parallel) with identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qmodel as qm
from .errors import DegenerateDraw, SingularMean

RANK_PROFILES = ("all_rank_one", "general", "dichotomic_mixed_rank")
MAX_REDRAWS = 100


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    outcomes: int = 3
    plane_xz: bool = True
    rank_profile: str = "all_rank_one"

    def __post_init__(self):
        if self.rank_profile not in RANK_PROFILES:
            raise ValueError(f"unknown rank profile {self.rank_profile!r}")
        if self.rank_profile == "dichotomic_mixed_rank" and self.outcomes != 2:
            raise ValueError("dichotomic_mixed_rank requires outcomes == 2")
        lo = 1 if self.rank_profile == "general" else 2
        if not lo <= self.outcomes <= 8:
            raise ValueError(f"outcomes must be in {lo}..8, got {self.outcomes}")


def rng_for(seed: int, index: int, stream: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, index)))


def random_direction(rng: np.random.Generator, plane_xz: bool) -> np.ndarray:
    if plane_xz:
        phi = rng.uniform(0.0, 2 * math.pi)
        return np.array([math.cos(phi), 0.0, math.sin(phi)])
    v = rng.normal(size=3)
    while qm.norm(v) < 1e-12:
        v = rng.normal(size=3)
    return v / qm.norm(v)


def random_in_ball(rng: np.random.Generator, plane_xz: bool) -> np.ndarray:
    """Uniform point in the unit disk (xz-plane) or ball, by rejection."""
    while True:
        if plane_xz:
            x, z = rng.uniform(-1.0, 1.0, size=2)
            v = np.array([x, 0.0, z])
        else:
            v = rng.uniform(-1.0, 1.0, size=3)
        if v @ v <= 1.0:
            return v


def random_rank1_povm(cfg: SamplerConfig, index: int = 0) -> qm.Povm:
    """Rank-one POVM from vectors ``u_m`` summing to zero.

    ``n_m = u_m / |u_m|`` and ``p_m = |u_m| / sum |u|``; the first
    ``outcomes - 1`` vectors are i.i.d. uniform directions and the last one
    cancels their sum.
    """
    rng = rng_for(cfg.seed, index, 1)
    for _ in range(MAX_REDRAWS):
        us = [random_direction(rng, cfg.plane_xz) for _ in range(cfg.outcomes - 1)]
        us.append(-np.sum(us, axis=0))
        lengths = [qm.norm(u) for u in us]
        if min(lengths) >= 1e-9:
            break
    else:
        raise DegenerateDraw(f"no admissible draw after {MAX_REDRAWS} attempts")
    total = sum(lengths)
    return qm.Povm(tuple(qm.HermitianOp(ln / total, u / total) for u, ln in zip(us, lengths)))


def random_general_povm(cfg: SamplerConfig, index: int = 0) -> qm.Povm:
    """``M_m = p_m rhobar^{-1/2} rho_m rhobar^{-1/2}`` with ``rhobar = sum p_m rho_m``.

    States are uniform in the disk/ball and weights are symmetric Dirichlet(1)
    draws built from unit-rate exponentials.
    """
    rng = rng_for(cfg.seed, index, 2)
    for _ in range(MAX_REDRAWS):
        rs = [random_in_ball(rng, cfg.plane_xz) for _ in range(cfg.outcomes)]
        e = rng.exponential(1.0, size=cfg.outcomes)
        ps = e / e.sum()
        mean = sum((p * r for p, r in zip(ps, rs)), np.zeros(3))
        if qm.norm(mean) < 1.0 - 1e-10:
            break
    else:
        raise SingularMean(f"singular mean state after {MAX_REDRAWS} attempts")
    s = qm.psd_inv_sqrt(qm.State(mean).op)
    elems = tuple(qm.sandwich(s, qm.State(r).op.scaled(p)) for p, r in zip(ps, rs))
    return qm.Povm(elems)


def dichotomic_mixed_rank_povm(p: float, n) -> qm.Povm:
    """``{p (I + n . sigma), I - p (I + n . sigma)}``."""
    plus = qm.HermitianOp.from_pkn(p, 1.0, n)
    return qm.Povm((plus, qm.HermitianOp(1.0 - plus.c, -plus.v)))


def random_dichotomic_mixed_rank(cfg: SamplerConfig, index: int = 0) -> qm.Povm:
    rng = rng_for(cfg.seed, index, 3)
    p = rng.uniform(0.0, 0.5)
    while p <= 0.0:
        p = rng.uniform(0.0, 0.5)
    return dichotomic_mixed_rank_povm(p, random_direction(rng, cfg.plane_xz))


def random_povm(cfg: SamplerConfig, index: int = 0) -> qm.Povm:
    if cfg.rank_profile == "all_rank_one":
        return random_rank1_povm(cfg, index)
    if cfg.rank_profile == "general":
        return random_general_povm(cfg, index)
    return random_dichotomic_mixed_rank(cfg, index)


def random_rotation(rng: np.random.Generator, plane_xz: bool) -> qm.Rotation:
    """Uniform angle about y (plane) or a uniform axis with uniform angle."""
    angle = rng.uniform(0.0, 2 * math.pi)
    if plane_xz:
        return qm.Rotation.about_y(angle)
    return qm.Rotation(random_direction(rng, False), angle)


def random_rotations(cfg: SamplerConfig, index: int = 0) -> tuple[qm.Rotation, ...]:
    rng = rng_for(cfg.seed, index, 4)
    return tuple(random_rotation(rng, cfg.plane_xz) for _ in range(cfg.outcomes))


def random_state(rng: np.random.Generator, pure: bool = False, plane_xz: bool = False) -> qm.State:
    if pure:
        return qm.State(random_direction(rng, plane_xz))
    return qm.State(random_in_ball(rng, plane_xz))


def random_mixed_povm(seed: int, index: int) -> qm.Povm:
    """A POVM with 2-6 outcomes, rank-one or general, in the xz-plane or not.

    All choices are drawn from the ``(seed, index)`` stream.
    """
    rng = rng_for(seed, index, 5)
    outcomes = int(rng.integers(2, 7))
    plane = bool(rng.integers(0, 2))
    profile = "all_rank_one" if rng.integers(0, 2) else "general"
    cfg = SamplerConfig(seed=seed, outcomes=outcomes, plane_xz=plane, rank_profile=profile)
    return random_povm(cfg, index)
