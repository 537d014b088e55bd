"""Preparation, noise-noise and noise-disturbance regions for qubit observables.

Points are pairs of entropies in bits.  The preparation region ``E(A, B)`` is
the set of ``(H(A|rho), H(B|rho))``; in terms of ``g = h^{-1}`` it is the
ellipse ``g_A^2 + g_B^2 - 2|a.b| g_A g_B <= 1 - (a.b)^2`` folded into the
positive quadrant.  The noise-noise region is its convex hull.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.spatial import ConvexHull

from . import qmodel as qm
from .entropy import binary_entropy_h as h
from .entropy import binary_entropy_h_array
from .entropy import binary_entropy_inv_g as g
from .entropy import binary_entropy_inv_g_array
from .errors import DomainError, OutsideLudersRegion, TargetOutsideRegion
from .measures import disturbance_corrected, noise

# E(A, B) is convex for |a.b| above roughly this value (only known approximately)
CONVEX_DOT = 0.391
HULL_VERTICES = 1024
HULL_SLACK = 1e-5
# ellipse residuals this small are rounding noise on the boundary of E
BOUNDARY_TOL = 1e-12
KINDS = ("prep", "nn", "nd")


@dataclass(frozen=True)
class RegionPoint:
    x: float
    y: float
    kind: str
    meta: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown region kind {self.kind!r}")


@dataclass(frozen=True, eq=False)
class ObservablePair:
    a: qm.PauliObservable
    b: qm.PauliObservable

    @property
    def dot(self) -> float:
        return max(-1.0, min(1.0, float(self.a.axis @ self.b.axis)))

    @classmethod
    def orthogonal(cls) -> "ObservablePair":
        return cls(qm.pauli("z"), qm.pauli("x"))

    @classmethod
    def with_dot(cls, dot: float) -> "ObservablePair":
        """``a = z`` and ``b`` in the xz-plane with ``a.b = dot``."""
        if abs(dot) > 1.0:
            raise DomainError(f"|dot| = {abs(dot)} > 1")
        return cls(qm.pauli("z"), qm.PauliObservable([math.sqrt(1.0 - dot * dot), 0.0, dot]))


# --------------------------------------------------------------------------
# preparation relations


def prep_residual_g(c: float, ga: float, gb: float) -> float:
    c = abs(c)
    return ga * ga + gb * gb - 2.0 * c * ga * gb - (1.0 - c * c)


def prep_relation_entropic(pair: ObservablePair, ha: float, hb: float) -> float:
    """Residual of the entropic preparation relation; ``<= 0`` inside ``E(A, B)``."""
    return prep_residual_g(pair.dot, g(ha), g(hb))


def prep_relation_sd(pair: ObservablePair, rho: qm.State) -> float:
    """LHS minus RHS of the standard-deviation preparation relation (``>= 0`` for states)."""
    c = pair.dot
    va = 1.0 - float(pair.a.axis @ rho.r) ** 2
    vb = 1.0 - float(pair.b.axis @ rho.r) ** 2
    lhs = va + vb + 2.0 * abs(c) * math.sqrt(max(1.0 - va, 0.0)) * math.sqrt(max(1.0 - vb, 0.0))
    return lhs - (1.0 + c * c)


def prep_point(pair: ObservablePair, rho: qm.State) -> tuple[float, float]:
    return h(abs(float(pair.a.axis @ rho.r))), h(abs(float(pair.b.axis @ rho.r)))


def _arc_g(dot: float, phis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    gamma = math.acos(abs(dot))
    return np.abs(np.cos(phis)), np.abs(np.cos(phis - gamma))


def prep_boundary(dot: float, samples: int) -> list[RegionPoint]:
    """Pure-state boundary of ``E(A, B)`` inside the unit square.

    Runs from ``(h(sqrt(1-c^2)), 1)`` through ``(0, h(c))`` and ``(h(c), 0)`` to
    ``(1, h(sqrt(1-c^2)))`` where ``c = |a.b|``.
    """
    gamma = math.acos(min(abs(dot), 1.0))
    phis = np.linspace(gamma - math.pi / 2, math.pi / 2, samples)
    ga, gb = _arc_g(dot, phis)
    xs, ys = binary_entropy_h_array(ga), binary_entropy_h_array(gb)
    return [
        RegionPoint(float(x), float(y), "prep", f"boundary;dot={dot!r};phi={phi!r}")
        for x, y, phi in zip(xs, ys, phis)
    ]


# --------------------------------------------------------------------------
# noise-noise region


@lru_cache(maxsize=64)
def _hull(dot: float, closed: bool) -> ConvexHull:
    gamma = math.acos(abs(dot))
    phis = np.linspace(gamma - math.pi / 2, math.pi / 2, HULL_VERTICES)
    ga, gb = _arc_g(dot, phis)
    pts = np.column_stack([binary_entropy_h_array(ga), binary_entropy_h_array(gb)])
    extra = [[1.0, 1.0]]
    if closed:
        extra += [[x, 1.0] for x in pts[:, 0]] + [[1.0, y] for y in pts[:, 1]]
    return ConvexHull(np.vstack([pts, extra]))


def _in_hull(hull: ConvexHull, x: float, y: float, slack: float) -> bool:
    eq = hull.equations
    return bool(np.all(eq[:, 0] * x + eq[:, 1] * y + eq[:, 2] <= slack))


def nn_region_contains(
    pair: ObservablePair, p: RegionPoint, *, closure: bool = False, tol: float = 1e-9
) -> bool:
    """Whether ``(p.x, p.y)`` is an achievable noise-noise pair.

    With ``closure=True`` the monotone closure (increase either coordinate up
    to 1) of the region is tested instead.
    """
    x, y = p.x, p.y
    if not (-tol <= x <= 1 + tol and -tol <= y <= 1 + tol):
        return False
    c = abs(pair.dot)
    if c < 1e-15:
        return x + y >= 1.0 - tol
    if c >= CONVEX_DOT and not closure:
        return prep_residual_g(c, g(min(max(x, 0.0), 1.0)), g(min(max(y, 0.0), 1.0))) <= tol
    return _in_hull(_hull(round(c, 15), closure), x, y, HULL_SLACK)


def nn_lower_boundary(dot: float, samples: int) -> list[RegionPoint]:
    """Lower boundary of the noise-noise region from ``(0, h(c))`` to ``(h(c), 0)``.

    Taken as the lower convex chain of the pure-state arc and resampled at
    ``samples`` points equally spaced in arc length.
    """
    if samples < 2:
        raise ValueError("samples must be >= 2")
    gamma = math.acos(min(abs(dot), 1.0))
    phis = np.linspace(0.0, gamma if gamma > 0 else 0.0, HULL_VERTICES)
    ga, gb = _arc_g(dot, phis)
    pts = np.column_stack([binary_entropy_h_array(ga), binary_entropy_h_array(gb)])
    chain = _lower_chain(pts)
    seg = np.hypot(*np.diff(chain, axis=0).T)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    targets = np.linspace(0.0, cum[-1], samples)
    xs = np.interp(targets, cum, chain[:, 0])
    ys = np.interp(targets, cum, chain[:, 1])
    return [
        RegionPoint(float(x), float(y), "nn", f"boundary;dot={dot!r}") for x, y in zip(xs, ys)
    ]


def _lower_chain(pts: np.ndarray) -> np.ndarray:
    """Lower-left convex chain of points sorted by increasing x (monotone chain)."""
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    chain: list[np.ndarray] = []
    for q in pts[order]:
        while len(chain) >= 2:
            o, a = chain[-2], chain[-1]
            cross = (a[0] - o[0]) * (q[1] - o[1]) - (a[1] - o[1]) * (q[0] - o[0])
            if cross <= 0:
                chain.pop()
            else:
                break
        chain.append(q)
    return np.array(chain)


def _state_for_entropies(pair: ObservablePair, s: float, t: float) -> np.ndarray:
    """Bloch vector ``r`` in the a-b plane with ``(H(A|r), H(B|r)) = (s, t)``."""
    c = pair.dot
    ga, gb = g(s), g(t)
    a = pair.a.axis
    if abs(abs(c) - 1.0) < 1e-12:
        return ga * a
    bperp = pair.b.axis - c * a
    bperp = bperp / qm.norm(bperp)
    sgn = 1.0 if c >= 0 else -1.0
    beta = (sgn * gb - c * ga) / math.sqrt(1.0 - c * c)
    r = ga * a + beta * bperp
    n = qm.norm(r)
    return r / n if n > 1.0 else r


def _dichotomic_from_state(r: np.ndarray) -> qm.Povm:
    return qm.Povm((qm.HermitianOp(0.5, 0.5 * r), qm.HermitianOp(0.5, -0.5 * r)))


def nn_saturating_povm(pair: ObservablePair, target: RegionPoint) -> qm.Povm:
    """POVM whose noise pair for ``(A, B)`` is ``(target.x, target.y)``.

    Targets inside ``E(A, B)`` use the two-outcome POVM ``{rho, I - rho}``.
    Targets in the convex hull but outside ``E`` are written as a mixture of
    two points of ``E`` on the anti-diagonal through the target, giving a
    four-outcome POVM ``{q rho_1, q(I - rho_1), (1-q) rho_2, (1-q)(I - rho_2)}``.
    """
    s, t = target.x, target.y
    if not nn_region_contains(pair, RegionPoint(s, t, "nn"), tol=1e-9):
        raise TargetOutsideRegion(f"({s}, {t}) is not in the noise-noise region")
    c = pair.dot
    s = min(max(s, 0.0), 1.0)
    t = min(max(t, 0.0), 1.0)
    if prep_residual_g(c, g(s), g(t)) <= BOUNDARY_TOL:
        return _dichotomic_from_state(_state_for_entropies(pair, s, t))

    total = s + t

    def residual(x: float) -> float:
        return prep_residual_g(c, g(x), g(total - x))

    def outside(x: float) -> bool:
        return residual(x) > 0.0

    def nearest_inside(stop: float) -> float:
        # first point of E on the anti-diagonal walking from s towards stop
        grid = np.linspace(s, stop, 257)
        ga = binary_entropy_inv_g_array(grid)
        gb = binary_entropy_inv_g_array(total - grid)
        res = ga * ga + gb * gb - 2.0 * abs(c) * ga * gb - (1.0 - c * c)
        res[0] = np.inf
        hits = np.flatnonzero(res <= 0.0)
        if hits.size:
            inside, outer = float(grid[hits[0]]), float(grid[hits[0] - 1])
        else:
            # E may touch the line only between grid points (target on a hull chord)
            j = int(np.argmin(res))
            lo_x, hi_x = sorted((float(grid[j - 1]), float(grid[min(j + 1, len(grid) - 1)])))
            best = minimize_scalar(residual, bounds=(lo_x, hi_x), method="bounded",
                                   options={"xatol": 1e-15})
            if best.fun > BOUNDARY_TOL:
                raise TargetOutsideRegion(f"({s}, {t}) is not in the convex hull of E(A, B)")
            inside, outer = float(best.x), float(grid[j - 1])
        if residual(inside) > 0.0 or not outside(outer):
            return inside
        return brentq(residual, inside, outer, xtol=1e-15, rtol=4 * np.finfo(float).eps)

    x1 = nearest_inside(max(0.0, total - 1.0))
    x2 = nearest_inside(min(1.0, total))
    p1 = (x1, total - x1)
    p2 = (x2, total - x2)
    q = (p2[0] - s) / (p2[0] - p1[0])
    r1 = _state_for_entropies(pair, *p1)
    r2 = _state_for_entropies(pair, *p2)
    return qm.Povm(
        (
            qm.HermitianOp(0.5 * q, 0.5 * q * r1),
            qm.HermitianOp(0.5 * q, -0.5 * q * r1),
            qm.HermitianOp(0.5 * (1 - q), 0.5 * (1 - q) * r2),
            qm.HermitianOp(0.5 * (1 - q), -0.5 * (1 - q) * r2),
        )
    )


def mixture_povm(q: float, first: qm.Povm, second: qm.Povm) -> qm.Povm:
    """Run ``first`` with probability ``q`` and ``second`` otherwise (outcomes kept apart)."""
    return qm.Povm(
        tuple(e.scaled(q) for e in first) + tuple(e.scaled(1.0 - q) for e in second)
    )


def nn_dichotomic_relation(ha: float, hb: float) -> float:
    """``g(ha)^2 + g(hb)^2 - 1``; non-positive for dichotomic POVMs and orthogonal observables."""
    return g(ha) ** 2 + g(hb) ** 2 - 1.0


def ensemble_doubling(weights, blochs) -> tuple[np.ndarray, np.ndarray]:
    """Replace each ``(p, r)`` by ``(p/2, r)`` and ``(p/2, -r)``.

    The doubled ensemble averages to the maximally mixed state and has the
    same average entropies for every observable.
    """
    weights = np.asarray(weights, dtype=float)
    blochs = np.asarray(blochs, dtype=float).reshape(-1, 3)
    return np.concatenate([weights / 2, weights / 2]), np.concatenate([blochs, -blochs])


def ensemble_povm(weights, blochs) -> qm.Povm:
    """POVM ``M_m = 2 p_m rho_m`` of an ensemble averaging to ``I/2``."""
    return qm.Povm(
        tuple(qm.HermitianOp(p, p * np.asarray(r)) for p, r in zip(weights, blochs))
    )


# --------------------------------------------------------------------------
# noise-disturbance region (orthogonal pair sigma_z, sigma_x)


def conjecture_curve(theta: float) -> tuple[float, float]:
    """``((cos t + h(sin t)) / (1 + cos t), h(cos t) / (1 + cos t))``."""
    c, s = math.cos(theta), math.sin(theta)
    c = max(c, 0.0)
    return (c + h(min(s, 1.0))) / (1.0 + c), h(min(c, 1.0)) / (1.0 + c)


@dataclass(frozen=True)
class MThetaFamily:
    theta: float
    povm: qm.Povm
    instrument: qm.Instrument
    correction: qm.Correction
    noise: float
    disturbance: float


def mtheta_family(theta: float) -> MThetaFamily:
    """Three-outcome measure-and-prepare instrument tracing the conjectured boundary.

    Outcomes are ordered ``m = -1, 0, 1`` with ``M_m = p_m (I + n_m . sigma)``,
    ``n_m = ((-1)^m cos(m theta), 0, sin(m theta))``; the instrument leaves
    ``|n_m>``.  The correction keeps outcome 0 and prepares ``|-x>`` otherwise.
    """
    if not -1e-12 <= theta <= math.pi / 2 + 1e-12:
        raise DomainError(f"theta = {theta} outside [0, pi/2]")
    theta = min(max(theta, 0.0), math.pi / 2)
    c = math.cos(theta)
    p0 = c / (1.0 + c)
    p1 = 1.0 / (2.0 * (1.0 + c))
    params = []
    for m in (-1, 0, 1):
        n = np.array([(-1) ** m * math.cos(m * theta), 0.0, math.sin(m * theta)])
        params.append((p0 if m == 0 else p1, n))
    povm = qm.Povm(tuple(qm.HermitianOp(p, p * n) for p, n in params))
    inst = qm.Instrument.measure_prepare(povm, [qm.State(n) for _, n in params])
    minus_x = qm.Prepare(qm.State([-1.0, 0.0, 0.0]))
    corr = qm.Correction((minus_x, qm.IdentityMap(), minus_x))
    n_val, d_val = conjecture_curve(theta)
    return MThetaFamily(theta, povm, inst, corr, n_val, d_val)


def nd_conjectured_boundary(samples: int) -> list[RegionPoint]:
    if samples < 2:
        raise ValueError("samples must be >= 2")
    out = []
    for i in range(samples):
        theta = (math.pi / 2) * i / (samples - 1)
        x, y = conjecture_curve(theta)
        out.append(RegionPoint(x, y, "nd", f"boundary;theta={theta!r}"))
    return out


def nd_conjecture_gap(n: float, d: float) -> float:
    """Signed distance-like gap of ``(n, d)`` below the conjectured boundary.

    Returns ``min_theta max(x(theta) - n, y(theta) - d)`` where ``(x, y)`` runs
    over the curve; the point lies in the monotone closure of the curve iff
    the gap is ``<= 0``.  The curve's x decreases and y increases with theta,
    so the minimizer is where the two differences balance.
    """

    def balance(th: float) -> float:
        x, y = conjecture_curve(th)
        return (x - n) - (y - d)

    lo, hi = 0.0, math.pi / 2
    if balance(lo) <= 0.0:
        th = lo
    elif balance(hi) >= 0.0:
        th = hi
    else:
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            if balance(mid) > 0.0:
                lo = mid
            else:
                hi = mid
        th = 0.5 * (lo + hi)
    x, y = conjecture_curve(th)
    return max(x - n, y - d)


def nd_conjecture_contains(n: float, d: float, tol: float = 1e-6) -> bool:
    return nd_conjecture_gap(n, d) <= tol


# --------------------------------------------------------------------------
# dichotomic counterexample and Lueders relation


@dataclass(frozen=True)
class Counterexample:
    instrument: qm.Instrument
    correction: qm.Correction
    noise: float
    disturbance: float
    gsum: float


def dichotomic_counterexample() -> Counterexample:
    """Lueders instrument of ``M_+ = (I + (sigma_x + sigma_z)/sqrt 2) / 4`` with ``|x><x|`` prepared on ``+``."""
    n = np.array([1.0, 0.0, 1.0]) / math.sqrt(2.0)
    plus = qm.HermitianOp(0.25, 0.25 * n)
    povm = qm.Povm((plus, qm.HermitianOp(0.75, -0.25 * n)))
    inst = qm.Instrument.lueders(povm)
    corr = qm.Correction((qm.Prepare(qm.State([1.0, 0.0, 0.0])), qm.IdentityMap()))
    nv = noise(povm, qm.pauli("z")).value
    dv = disturbance_corrected(inst, qm.pauli("x"), corr).value
    return Counterexample(inst, corr, nv, dv, g(nv) ** 2 + g(dv) ** 2)


def luders_tight_instrument(s: float, t: float) -> qm.Povm:
    """Dichotomic POVM whose Lueders instrument has noise ``s`` on z and disturbance ``t`` on x."""
    gs, gt = g(s), g(t)
    rest = 1.0 - gs * gs - gt * gt
    if rest < -1e-12:
        raise OutsideLudersRegion(f"g(s)^2 + g(t)^2 = {1 - rest} > 1")
    v = np.array([0.0, math.sqrt(max(rest, 0.0)), gs])
    return qm.Povm((qm.HermitianOp(0.5, 0.5 * v), qm.HermitianOp(0.5, -0.5 * v)))


def luders_relation(n: float, d: float) -> float:
    """``g(n)^2 + g(d)^2 - 1``; non-positive for Lueders instruments without correction."""
    return g(n) ** 2 + g(d) ** 2 - 1.0
