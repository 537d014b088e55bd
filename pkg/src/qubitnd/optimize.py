"""Searching for good outcome-dependent corrections.

The disturbance of an instrument minimizes ``D_E`` over all corrections.  We
search the family of per-outcome Bloch rotations, optionally extended (for
dichotomic instruments) by "prepare a fixed state" maps onto ``+b``, ``-b`` or
the maximally mixed state.

Every candidate is scored with a cheap objective built from the instrument's
response to the two ``B`` eigenstates; reported values are always recomputed
with :func:`qubitnd.measures.disturbance_corrected`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import qmodel as qm
from .entropy import binary_entropy_inv_g
from .errors import BudgetTooSmall, ShapeMismatch
from .measures import disturbance_corrected, lueders_summands, noise

ALIGN_TOL = 1e-9
PLANE_TOL = 1e-15
RESTARTS = 8
JITTER = 0.5


@dataclass(frozen=True)
class OptimizeReport:
    best: qm.Correction
    value: float
    evaluations: int
    strategy: str


# --------------------------------------------------------------------------
# heuristic


def _alignment(r: np.ndarray, b: np.ndarray, in_plane: bool) -> qm.Rotation:
    """Rotation taking the direction of ``r`` onto ``b``."""
    n = qm.norm(r)
    if n < ALIGN_TOL:
        return qm.Rotation.identity()
    rh = r / n
    cross = np.cross(rh, b)
    s = qm.norm(cross)
    c = float(rh @ b)
    if s < 1e-12:
        if c > 0:
            return qm.Rotation.identity()
        ax = qm.AXES["y"] if in_plane else qm.orthogonal_to(b)
        return qm.Rotation(ax, math.pi)
    return qm.Rotation(cross / s, math.atan2(s, c))


def heuristic_alignment(povm: qm.Povm, b: qm.PauliObservable) -> qm.Correction:
    """Rotate each Lueders summand ``r_m`` onto the positive ``b`` axis."""
    in_plane = abs(b.axis[1]) < PLANE_TOL
    rots = [_alignment(r, b.axis, in_plane) for _, r in lueders_summands(povm, b)]
    return qm.Correction.rotations(rots)


# --------------------------------------------------------------------------
# fast objective


class _Response:
    """Instrument outputs for the inputs ``+b`` and ``-b``.

    ``w[s, m]`` is the probability of outcome ``m`` and ``u[s, m]`` the
    unnormalized output Bloch vector.
    """

    def __init__(self, inst: qm.Instrument, b: qm.PauliObservable):
        self.b = b.axis
        n = len(inst)
        self.n = n
        self.w = np.zeros((2, n))
        self.u = np.zeros((2, n, 3))
        for i, s in enumerate((1.0, -1.0)):
            for m in range(n):
                prob, u = qm.instrument_response(inst, s * b.axis, m)
                self.w[i, m] = prob
                self.u[i, m] = u
        self.ub = self.u @ self.b
        self.in_plane = (
            abs(self.b[1]) < PLANE_TOL and float(np.max(np.abs(self.u[:, :, 1]), initial=0.0)) < PLANE_TOL
        )
        y = np.array([0.0, 1.0, 0.0])
        self.y_sin = np.cross(y, self.u) @ self.b
        self.y_cos = self.ub - self.u[:, :, 1] * self.b[1]

    def odd_parts(self) -> np.ndarray:
        return 0.5 * (self.u[0] - self.u[1])


def _cond_entropy_2x2(c00, c01, c10, c11) -> float:
    # c[s][b'] = p(b'|s); joint = c / 2
    total = 0.0
    for a, b in ((c00, c10), (c01, c11)):
        a = max(a, 0.0) * 0.5
        b = max(b, 0.0) * 0.5
        col = a + b
        if col <= 0.0:
            continue
        if a > 0.0:
            total -= a * math.log2(a / col)
        if b > 0.0:
            total -= b * math.log2(b / col)
    return total


class _Objective:
    """``D_E`` as a function of the rotation parameters of the free outcomes."""

    def __init__(self, resp: _Response, slots, plane: bool):
        # slots[m]: "rot" or a prepared Bloch vector
        self.resp = resp
        self.slots = slots
        self.plane = plane
        self.free = [m for m, s in enumerate(slots) if isinstance(s, str)]
        self.dim = len(self.free) * (1 if plane else 3)
        base = resp.ub.copy()
        for m, s in enumerate(slots):
            if not isinstance(s, str):
                base[:, m] = resp.w[:, m] * float(np.asarray(s) @ resp.b)
        self.base = base
        self.calls = 0

    def dots(self, x) -> np.ndarray:
        d = self.base.copy()
        r = self.resp
        if self.plane:
            for j, m in enumerate(self.free):
                c, s = math.cos(x[j]), math.sin(x[j])
                d[:, m] = c * r.y_cos[:, m] + s * r.y_sin[:, m] + r.u[:, m, 1] * r.b[1]
        else:
            for j, m in enumerate(self.free):
                rot = qm.Rotation.from_rotvec(x[3 * j : 3 * j + 3])
                d[:, m] = (r.u[:, m] @ rot.matrix().T) @ r.b
        return d

    def __call__(self, x) -> float:
        self.calls += 1
        d = self.dots(x)
        w = self.resp.w
        sw = w.sum(axis=1)
        sd = d.sum(axis=1)
        return _cond_entropy_2x2(
            0.5 * (sw[0] + sd[0]), 0.5 * (sw[0] - sd[0]),
            0.5 * (sw[1] + sd[1]), 0.5 * (sw[1] - sd[1]),
        )

    def correction(self, x) -> qm.Correction:
        ops = []
        j = 0
        for s in self.slots:
            if isinstance(s, str):
                if self.plane:
                    ops.append(qm.Rotate(qm.Rotation.about_y(x[j])))
                    j += 1
                else:
                    ops.append(qm.Rotate(qm.Rotation.from_rotvec(x[3 * j : 3 * j + 3])))
                    j += 1
            else:
                ops.append(qm.Prepare(qm.State(s)))
        return qm.Correction(tuple(ops))


def _signed_angle(rot: qm.Rotation) -> float | None:
    """Angle about +y if ``rot`` is a rotation about the y axis, else None."""
    if rot.angle == 0.0:
        return 0.0
    ay = rot.axis[1]
    if abs(abs(ay) - 1.0) > 1e-12:
        return None
    a = rot.angle if ay > 0 else -rot.angle
    return math.remainder(a, 2 * math.pi)


def _slots_and_start(corr: qm.Correction, resp: _Response):
    slots = []
    rots = []
    for op in corr.ops:
        if isinstance(op, qm.Prepare):
            slots.append(op.state.r)
        else:
            slots.append("rot")
            rots.append(op.rotation if isinstance(op, qm.Rotate) else qm.Rotation.identity())
    plane = resp.in_plane
    if plane:
        angles = [_signed_angle(r) for r in rots]
        if any(a is None for a in angles):
            plane = False
        else:
            return slots, plane, np.array(angles, dtype=float)
    x0 = []
    for r in rots:
        a = math.remainder(r.angle, 2 * math.pi)
        x0.extend((r.axis * a).tolist())
    return slots, plane, np.array(x0, dtype=float)


def _simplex(x0: np.ndarray, step: float) -> np.ndarray:
    pts = [x0]
    for i in range(len(x0)):
        p = x0.copy()
        p[i] += step
        pts.append(p)
    return np.array(pts)


def _refine(resp: _Response, init: qm.Correction, budget: int, seed: int, restarts: int = RESTARTS):
    slots, plane, x0 = _slots_and_start(init, resp)
    obj = _Objective(resp, slots, plane)
    if obj.dim == 0:
        return obj.correction(x0), obj(x0), obj.calls
    rng = np.random.default_rng(seed)
    per_run = max(budget // (restarts + 1), 1)
    best_x, best_f = x0, obj(x0)
    starts = [x0] + [x0 + rng.normal(0.0, JITTER, size=x0.shape) for _ in range(restarts)]
    for start in starts:
        remaining = budget - obj.calls
        if remaining <= 0:
            break
        res = minimize(
            obj,
            start,
            method="Nelder-Mead",
            options={
                "maxfev": min(per_run, remaining),
                "xatol": 1e-10,
                "fatol": 1e-10,
                "initial_simplex": _simplex(start, 0.3),
            },
        )
        if res.fun < best_f:
            best_x, best_f = np.array(res.x), float(res.fun)
    return obj.correction(best_x), best_f, obj.calls


def refine_corrections(
    inst: qm.Instrument,
    b: qm.PauliObservable,
    init: qm.Correction,
    budget: int = 400,
    seed: int = 0,
) -> OptimizeReport:
    """Simplex descent over the rotation angles of ``init``.

    Outcomes whose correction is a prepare map keep it.  The search starts at
    ``init`` and at jittered copies of it; the result is never worse than
    ``init``.
    """
    if budget < 10:
        raise BudgetTooSmall(f"budget {budget} < 10 evaluations")
    if len(init) != len(inst):
        raise ShapeMismatch(f"correction has {len(init)} outcomes, instrument has {len(inst)}")
    resp = _Response(inst, b)
    cand, _, calls = _refine(resp, init, budget, seed)
    v_init = disturbance_corrected(inst, b, init).value
    v_cand = disturbance_corrected(inst, b, cand).value
    if v_cand <= v_init:
        return OptimizeReport(cand, v_cand, calls, "nelder_refine")
    return OptimizeReport(init, v_init, calls, "nelder_refine")


# --------------------------------------------------------------------------
# combined search


def _heuristic_for(resp: _Response) -> list[qm.Rotation]:
    odd = resp.odd_parts()
    return [_alignment(odd[m], resp.b, resp.in_plane) for m in range(resp.n)]


def _prepare_options(b: np.ndarray):
    return ("rot", tuple(b), tuple(-b), (0.0, 0.0, 0.0))


def optimize_corrections(
    inst: qm.Instrument,
    b: qm.PauliObservable,
    strategy: str = "heuristic",
    *,
    include_prepare: bool = False,
    budget: int = 400,
    seed: int = 0,
) -> OptimizeReport:
    """Best correction found by ``strategy`` (``identity``, ``heuristic`` or ``refine``).

    Rotations start from the alignment heuristic, which rotates each
    outcome's ``b``-odd output component onto ``+b``; for Lueders instruments
    that is exactly :func:`heuristic_alignment`.  With ``include_prepare``
    every assignment of {rotation, prepare +b, prepare -b, prepare mixed} to
    the outcomes is tried.
    """
    if strategy == "identity":
        corr = qm.Correction.identity(len(inst))
        return OptimizeReport(corr, disturbance_corrected(inst, b, corr).value, 1, "identity")
    if strategy not in ("heuristic", "refine"):
        raise ValueError(f"unknown strategy {strategy!r}")
    resp = _Response(inst, b)
    rots = _heuristic_for(resp)
    if include_prepare:
        assignments = itertools.product(_prepare_options(b.axis), repeat=len(inst))
    else:
        assignments = [("rot",) * len(inst)]
    best, best_f, calls = None, math.inf, 0
    for assign in assignments:
        ops = [
            qm.Rotate(rot) if a == "rot" else qm.Prepare(qm.State(a))
            for a, rot in zip(assign, rots)
        ]
        init = qm.Correction(tuple(ops))
        if strategy == "refine" and "rot" in assign:
            corr, f, used = _refine(resp, init, budget, seed)
        else:
            slots, plane, x0 = _slots_and_start(init, resp)
            obj = _Objective(resp, slots, plane)
            corr, f, used = init, obj(x0), 1
        calls += used
        if f < best_f:
            best, best_f = corr, f
    value = disturbance_corrected(inst, b, best).value
    label = "heuristic" if strategy == "heuristic" else "nelder_refine"
    return OptimizeReport(best, value, calls, label)


# --------------------------------------------------------------------------
# dichotomic search


@dataclass(frozen=True)
class DichotomicSearchResult:
    instrument: qm.Instrument
    correction: qm.Correction
    gsum: float
    noise: float
    disturbance: float
    trial: int
    trials: int


def g_sum(n: float, d: float) -> float:
    return binary_entropy_inv_g(n) ** 2 + binary_entropy_inv_g(d) ** 2


def dichotomic_violation_search(
    trials: int,
    seed: int = 0,
    *,
    inject=(),
    refine_top: int = 25,
    budget: int = 180,
) -> DichotomicSearchResult:
    """Largest ``g(N_z)^2 + g(D_x)^2`` over random mixed-rank dichotomic Lueders instruments.

    Every trial is scored with heuristic rotations and all prepare-state
    assignments; the ``refine_top`` best trials (plus anything in ``inject``)
    are then refined by simplex descent.  Injected instruments get trial
    index ``-1, -2, ...``.
    """
    from .sampling import SamplerConfig, random_dichotomic_mixed_rank

    if trials < 1:
        raise ValueError("trials must be >= 1")
    a, b = qm.pauli("z"), qm.pauli("x")
    cfg = SamplerConfig(seed=seed, outcomes=2, plane_xz=True, rank_profile="dichotomic_mixed_rank")
    scored = []
    for j, inst in enumerate(inject):
        scored.append((-(j + 1), inst))
    for i in range(trials):
        scored.append((i, qm.Instrument.lueders(random_dichotomic_mixed_rank(cfg, i))))

    screened = []
    for idx, inst in scored:
        n = noise(inst.povm, a).value
        rep = optimize_corrections(inst, b, "heuristic", include_prepare=True)
        screened.append((g_sum(n, rep.value), idx, inst, n, rep))
    screened.sort(key=lambda t: (-t[0], t[1]))
    finalists = screened[:refine_top] + [t for t in screened[refine_top:] if t[1] < 0]

    best = None
    for gs, idx, inst, n, rep in finalists:
        ref = optimize_corrections(
            inst, b, "refine", include_prepare=True, budget=budget, seed=seed
        )
        if ref.value > rep.value:
            ref = rep
        gs = g_sum(n, ref.value)
        if best is None or gs > best.gsum:
            best = DichotomicSearchResult(inst, ref.best, gs, n, ref.value, idx, trials)
    return best


def nd_point(inst: qm.Instrument, strategy: str, *, budget: int = 400, seed: int = 0,
             include_prepare: bool = False) -> tuple[float, float]:
    """``(N(M, sigma_z), D(M, sigma_x))`` with corrections found by ``strategy``."""
    n = noise(inst.povm, qm.pauli("z")).value
    rep = optimize_corrections(
        inst, qm.pauli("x"), strategy, include_prepare=include_prepare, budget=budget, seed=seed
    )
    return n, rep.value


__all__ = [
    "OptimizeReport",
    "heuristic_alignment",
    "refine_corrections",
    "optimize_corrections",
    "dichotomic_violation_search",
    "DichotomicSearchResult",
    "g_sum",
    "nd_point",
]
