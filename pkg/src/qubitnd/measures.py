"""Noise and disturbance of qubit instruments.

Each quantity has a closed Bloch-form route and an independent route through
an explicit joint probability table, so that the two can be checked against
each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qmodel as qm
from .entropy import JointDist, binary_entropy_h, conditional_entropy
from .errors import InvalidPovm, ShapeMismatch

WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class NoiseResult:
    value: float
    # (p(m), H(A|rho_m)); H is reported as 0 for outcomes with p(m) = 0
    per_outcome: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class DisturbanceResult:
    value: float
    joint: JointDist
    correction_used: qm.Correction | None


def _require_valid(povm: qm.Povm) -> None:
    rep = qm.validate(povm)
    if not rep.valid:
        raise InvalidPovm(
            f"invalid POVM: residual {rep.residual:.3g}, non-PSD elements {list(rep.psd_failures)}"
        )


def noise(povm: qm.Povm, a: qm.PauliObservable) -> NoiseResult:
    """Noise ``sum_m p(m) H(A|rho_m)`` with ``rho_m = M_m / Tr M_m``."""
    _require_valid(povm)
    per = []
    total = 0.0
    for el in povm.elements:
        p = el.c
        if p <= WEIGHT_TOL:
            per.append((max(p, 0.0), 0.0))
            continue
        ent = binary_entropy_h(min(abs(float(el.v @ a.axis)) / p, 1.0))
        per.append((p, ent))
        total += p * ent
    return NoiseResult(total, tuple(per))


def noise_via_joint(povm: qm.Povm, a: qm.PauliObservable) -> NoiseResult:
    """Noise as ``H(A|M)`` from the table ``p(m, a) = Tr[M_m |a><a|] / 2``.

    Uses explicit 2x2 matrices throughout.
    """
    _require_valid(povm)
    projs = [a.projector(+1).matrix(), a.projector(-1).matrix()]
    table = np.empty((2, len(povm)))
    for m, el in enumerate(povm.elements):
        mat = el.matrix()
        for i, proj in enumerate(projs):
            table[i, m] = 0.5 * np.trace(mat @ proj).real
    table = np.clip(table, 0.0, None)
    per = []
    for m in range(len(povm)):
        pm = float(table[:, m].sum())
        if pm <= WEIGHT_TOL:
            per.append((pm, 0.0))
            continue
        cond = table[:, m] / pm
        per.append((pm, float(-sum(q * math.log2(q) for q in cond if q > 0))))
    return NoiseResult(conditional_entropy(table), tuple(per))


def instrument_noise(inst: qm.Instrument, a: qm.PauliObservable) -> NoiseResult:
    return noise(inst.povm, a)


def _joint_from_conditionals(cond: np.ndarray) -> JointDist:
    # cond[s, b'] = p(b'|s) for s, b' in (+, -)
    table = 0.5 * np.clip(cond, 0.0, None)
    table = table / table.sum()
    return JointDist(table)


def disturbance_corrected(
    inst: qm.Instrument, b: qm.PauliObservable, corr: qm.Correction
) -> DisturbanceResult:
    """``H(B|B')`` for instrument ``inst`` followed by correction ``corr``.

    The joint table ``p(b, b')`` is built from the Born rule over the 2x2 grid
    of prepared and finally measured ``B`` eigenstates.
    """
    if len(corr) != len(inst):
        raise ShapeMismatch(f"correction has {len(corr)} outcomes, instrument has {len(inst)}")
    cond = np.zeros((2, 2))
    for i, s in enumerate((1.0, -1.0)):
        for m in range(len(inst)):
            prob, u = qm.instrument_response(inst, s * b.axis, m)
            u = corr.apply(m, prob, u)
            ub = float(u @ b.axis)
            cond[i, 0] += 0.5 * (prob + ub)
            cond[i, 1] += 0.5 * (prob - ub)
    joint = _joint_from_conditionals(cond)
    return DisturbanceResult(conditional_entropy(joint), joint, corr)


def lueders_summands(povm: qm.Povm, b: qm.PauliObservable) -> list[tuple[float, np.ndarray]]:
    """Per-outcome ``(p_m, r_m)`` whose weighted sum is the Lueders output for input ``+b``."""
    out = []
    for p, k, n in povm.pkn():
        nb = float(n @ b.axis)
        r = nb * n + qm.rank_one_root(k) * (b.axis - nb * n)
        out.append((p, r))
    return out


def disturbance_identity_lueders(povm: qm.Povm, b: qm.PauliObservable) -> DisturbanceResult:
    """Uncorrected disturbance of the Lueders instrument of ``povm``: ``h(|r_+ . b|)``."""
    _require_valid(povm)
    r_plus = sum((p * r for p, r in lueders_summands(povm, b)), np.zeros(3))
    x = min(abs(float(r_plus @ b.axis)), 1.0)
    rb = float(r_plus @ b.axis)
    cond = np.array([[1 + rb, 1 - rb], [1 - rb, 1 + rb]]) / 2
    return DisturbanceResult(
        binary_entropy_h(x), _joint_from_conditionals(cond), qm.Correction.identity(len(povm))
    )


def disturbance_identity_pp(
    povm: qm.Povm, rotations, b: qm.PauliObservable
) -> DisturbanceResult:
    """Uncorrected disturbance of a purity-preserving instrument.

    On outcome ``m`` the state goes to ``U_m sqrt(M_m) rho sqrt(M_m) U_m^dag``;
    ``rotations[m]`` is the Bloch action of ``U_m``.
    """
    rotations = tuple(rotations)
    if len(rotations) != len(povm):
        raise ShapeMismatch(f"{len(rotations)} rotations for {len(povm)} outcomes")
    _require_valid(povm)
    bx = b.axis
    r0 = np.zeros(3)
    rd = np.zeros(3)
    for (p, k, n), rot in zip(povm.pkn(), rotations):
        nb = float(n @ bx)
        n_rot = rot.apply(n)
        b_rot = rot.apply(bx)
        r0 += p * (nb * n_rot + qm.rank_one_root(k) * (b_rot - nb * n_rot))
        rd += p * k * n_rot
    r0b = abs(float(r0 @ bx))
    delta = float(rd @ bx)
    value = 0.0
    for w in (1.0 + delta, 1.0 - delta):
        if w <= WEIGHT_TOL:
            continue
        value += 0.5 * w * binary_entropy_h(min(r0b / w, 1.0))
    s0 = float(r0 @ bx)
    cond = np.array(
        [[1 + s0 + delta, 1 - s0 - delta], [1 - s0 + delta, 1 + s0 - delta]]
    ) / 2
    return DisturbanceResult(
        value, _joint_from_conditionals(cond), qm.Correction.identity(len(povm))
    )


def disturbance_optimized(
    inst: qm.Instrument,
    b: qm.PauliObservable,
    strategy: str = "heuristic",
    *,
    include_prepare: bool | None = None,
    budget: int = 400,
    seed: int = 0,
) -> DisturbanceResult:
    """Smallest ``D_E`` found over per-outcome rotation (and prepare) corrections.

    This is an upper bound on the disturbance, which minimizes over all
    corrections.  Prepare-state corrections are searched by default only for
    dichotomic instruments.
    """
    from .optimize import optimize_corrections

    if include_prepare is None:
        include_prepare = len(inst) == 2
    report = optimize_corrections(
        inst, b, strategy=strategy, include_prepare=include_prepare, budget=budget, seed=seed
    )
    return disturbance_corrected(inst, b, report.best)


def mu_bound(a: qm.PauliObservable, b: qm.PauliObservable) -> float:
    """``-log2 max |<a|b>|^2`` for two qubit Pauli observables."""
    c = abs(float(a.axis @ b.axis))
    return -math.log2((1.0 + min(c, 1.0)) / 2.0)
