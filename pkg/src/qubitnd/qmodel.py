"""Qubit states, observables, POVMs and instruments in Bloch form.

Every operator is stored as ``c * I + v . sigma`` with real ``c`` and a real
3-vector ``v``.  Explicit 2x2 complex matrices ("Mat2", plain numpy arrays)
are only used for general Kraus instruments and as an independent
cross-check of the Bloch-level formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import (
    InvalidPartition,
    NotPsd,
    OutcomeOutOfRange,
    ShapeMismatch,
)

PSD_TOL = 1e-12
NORM_TOL = 1e-10
PROB_TOL = 1e-12
# eigenvalue ratios below this are rounding noise; the element is rank one
RANK_TOL = 1e-14

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

AXES = {
    "x": (1.0, 0.0, 0.0),
    "y": (0.0, 1.0, 0.0),
    "z": (0.0, 0.0, 1.0),
}


def vec3(v) -> np.ndarray:
    out = np.array(v, dtype=float).reshape(3)
    out.setflags(write=False)
    return out


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(3)
    n = math.sqrt(float(v @ v))
    if n == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return vec3(v / n)


def norm(v) -> float:
    v = np.asarray(v, dtype=float)
    return math.sqrt(float(v @ v))


def axis(spec) -> np.ndarray:
    """Parse ``"x"``/``"y"``/``"z"`` or three numbers into a unit vector."""
    if isinstance(spec, str):
        key = spec.strip().lower()
        if key.startswith("-") and key[1:] in AXES:
            return vec3([-t for t in AXES[key[1:]]])
        if key in AXES:
            return vec3(AXES[key])
        parts = [p for p in key.replace(",", " ").split() if p]
        return unit([float(p) for p in parts])
    return unit(spec)


def orthogonal_to(v) -> np.ndarray:
    """Some unit vector orthogonal to ``v``."""
    v = unit(v)
    trial = np.array([0.0, 1.0, 0.0]) if abs(v[1]) < 0.9 else np.array([1.0, 0.0, 0.0])
    return unit(np.cross(v, trial))


# --------------------------------------------------------------------------
# Operators and states


@dataclass(frozen=True, eq=False)
class HermitianOp:
    """The operator ``c * I + v . sigma``."""

    c: float
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "v", vec3(self.v))

    @classmethod
    def from_pkn(cls, p: float, k: float, n) -> "HermitianOp":
        """``p (I + k n . sigma)`` with ``n`` normalized."""
        if p == 0.0 or k == 0.0:
            return cls(p, np.zeros(3))
        return cls(p, p * k * unit(n))

    @property
    def trace(self) -> float:
        return 2.0 * self.c

    @property
    def vnorm(self) -> float:
        return norm(self.v)

    def is_psd(self, tol: float = PSD_TOL) -> bool:
        return self.c >= self.vnorm - tol

    def pkn(self) -> tuple[float, float, np.ndarray]:
        """Decompose as ``p (I + k n . sigma)`` with ``k`` in [0, 1].

        For ``k == 0`` (or ``p == 0``) the direction is arbitrary and ``z`` is
        returned.
        """
        p = self.c
        vn = self.vnorm
        if p <= 0.0 or vn == 0.0:
            return p, 0.0, vec3(AXES["z"])
        return p, min(vn / p, 1.0), vec3(self.v / vn)

    def matrix(self) -> np.ndarray:
        x, y, z = self.v
        return self.c * IDENTITY2 + x * SIGMA_X + y * SIGMA_Y + z * SIGMA_Z

    def __add__(self, other: "HermitianOp") -> "HermitianOp":
        return HermitianOp(self.c + other.c, self.v + other.v)

    def scaled(self, s: float) -> "HermitianOp":
        return HermitianOp(s * self.c, s * self.v)

    def __repr__(self) -> str:
        return f"HermitianOp(c={self.c!r}, v={self.v.tolist()!r})"


ZERO_OP = HermitianOp(0.0, np.zeros(3))
IDENTITY_OP = HermitianOp(1.0, np.zeros(3))


def op_from_matrix(m: np.ndarray) -> HermitianOp:
    m = np.asarray(m, dtype=complex)
    c = 0.5 * np.trace(m).real
    v = [0.5 * np.trace(m @ s).real for s in PAULIS]
    return HermitianOp(c, v)


@dataclass(frozen=True, eq=False)
class State:
    """Density operator ``(I + r . sigma) / 2`` with ``|r| <= 1``."""

    r: np.ndarray

    def __post_init__(self):
        r = vec3(self.r)
        if norm(r) > 1.0 + PSD_TOL:
            raise NotPsd(f"Bloch vector norm {norm(r)} exceeds 1")
        object.__setattr__(self, "r", r)

    @classmethod
    def from_op(cls, op: HermitianOp) -> "State":
        if op.c <= 0.0:
            raise NotPsd("operator has non-positive trace")
        return cls(op.v / op.c)

    @classmethod
    def mixed(cls) -> "State":
        return cls(np.zeros(3))

    @property
    def op(self) -> HermitianOp:
        return HermitianOp(0.5, 0.5 * self.r)

    @property
    def is_pure(self) -> bool:
        return abs(norm(self.r) - 1.0) <= 2 * PSD_TOL

    def matrix(self) -> np.ndarray:
        return self.op.matrix()

    def __repr__(self) -> str:
        return f"State(r={self.r.tolist()!r})"


@dataclass(frozen=True, eq=False)
class PauliObservable:
    """The observable ``a . sigma`` for a unit vector ``a``."""

    axis: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "axis", unit(self.axis))

    @classmethod
    def of(cls, spec) -> "PauliObservable":
        return cls(axis(spec))

    def projector(self, sign: int) -> State:
        return State(sign * self.axis)


def pauli(spec) -> PauliObservable:
    return PauliObservable.of(spec)


# --------------------------------------------------------------------------
# Rotations (unitaries modulo global phase)


@dataclass(frozen=True, eq=False)
class Rotation:
    """Bloch-sphere rotation by ``angle`` about ``axis`` (right-handed)."""

    axis: np.ndarray
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "axis", unit(self.axis))
        object.__setattr__(self, "angle", float(self.angle) % (2 * math.pi))

    @classmethod
    def identity(cls) -> "Rotation":
        return cls(AXES["z"], 0.0)

    @classmethod
    def about_y(cls, angle: float) -> "Rotation":
        return cls(AXES["y"], angle)

    @classmethod
    def from_rotvec(cls, w) -> "Rotation":
        w = np.asarray(w, dtype=float)
        theta = norm(w)
        if theta < 1e-15:
            return cls.identity()
        return cls(w / theta, theta)

    def matrix(self) -> np.ndarray:
        k = self.axis
        kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
        s, c = math.sin(self.angle), math.cos(self.angle)
        return np.eye(3) + s * kx + (1 - c) * (kx @ kx)

    def apply(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        k = self.axis
        s, c = math.sin(self.angle), math.cos(self.angle)
        return v * c + np.cross(k, v) * s + k * float(k @ v) * (1 - c)

    def unitary(self) -> np.ndarray:
        """SU(2) matrix ``exp(-i angle/2 axis . sigma)``."""
        half = 0.5 * self.angle
        kx, ky, kz = self.axis
        return math.cos(half) * IDENTITY2 - 1j * math.sin(half) * (
            kx * SIGMA_X + ky * SIGMA_Y + kz * SIGMA_Z
        )

    def __repr__(self) -> str:
        return f"Rotation(axis={self.axis.tolist()!r}, angle={self.angle!r})"


# --------------------------------------------------------------------------
# POVMs


@dataclass(frozen=True, eq=False)
class Povm:
    elements: tuple[HermitianOp, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))

    @classmethod
    def from_pkn(cls, params) -> "Povm":
        """Build from ``(p, k, n)`` triples, i.e. ``M_m = p (I + k n . sigma)``."""
        return cls(tuple(HermitianOp.from_pkn(p, k, n) for p, k, n in params))

    @classmethod
    def projective(cls, direction) -> "Povm":
        n = axis(direction)
        return cls((HermitianOp(0.5, 0.5 * n), HermitianOp(0.5, -0.5 * n)))

    @classmethod
    def trivial(cls) -> "Povm":
        return cls((IDENTITY_OP,))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i) -> HermitianOp:
        return self.elements[i]

    def pkn(self) -> list[tuple[float, float, np.ndarray]]:
        return [e.pkn() for e in self.elements]

    def permuted(self, order: Sequence[int]) -> "Povm":
        return Povm(tuple(self.elements[i] for i in order))


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    residual: float
    psd_failures: tuple[int, ...]

    def __bool__(self) -> bool:
        return self.valid


def validate(povm: Povm, tol: float = NORM_TOL) -> ValidationReport:
    """Report PSD failures and the normalization residual of ``povm``."""
    failures = tuple(i for i, e in enumerate(povm.elements) if not e.is_psd())
    if povm.elements:
        c = sum(e.c for e in povm.elements)
        v = np.sum([e.v for e in povm.elements], axis=0)
        residual = max(abs(c - 1.0), float(np.max(np.abs(v))))
    else:
        residual = 1.0
    return ValidationReport(not failures and residual <= tol, residual, failures)


def coarse_grain(povm: Povm, grouping: Sequence[Sequence[int]]) -> Povm:
    """Sum POVM elements group by group."""
    seen = sorted(i for g in grouping for i in g)
    if seen != list(range(len(povm))) or any(len(g) == 0 for g in grouping):
        raise InvalidPartition(f"grouping {grouping!r} is not a partition of {len(povm)} outcomes")
    out = []
    for g in grouping:
        acc = ZERO_OP
        for i in g:
            acc = acc + povm.elements[i]
        out.append(acc)
    return Povm(tuple(out))


# --------------------------------------------------------------------------
# Square roots and conjugation


def rank_one_root(k: float) -> float:
    """``sqrt(1 - k^2)``, exactly 0 when ``1 - k`` is within rounding of 0."""
    return math.sqrt((1.0 - k) * (1.0 + k)) if 1.0 - k > RANK_TOL else 0.0


def _sqrt_coeffs(p: float, k: float) -> tuple[float, float]:
    a = math.sqrt(1.0 + k)
    b = math.sqrt(1.0 - k) if 1.0 - k > RANK_TOL else 0.0
    s = math.sqrt(p)
    return s * 0.5 * (a + b), s * 0.5 * (a - b)


def psd_sqrt(m: HermitianOp) -> HermitianOp:
    """Unique PSD square root of a PSD operator."""
    if not m.is_psd():
        raise NotPsd(f"operator with c={m.c} and |v|={m.vnorm} is not PSD")
    p, k, n = m.pkn()
    if p <= 0.0:
        return ZERO_OP
    alpha, beta = _sqrt_coeffs(p, k)
    return HermitianOp(alpha, beta * n)


def psd_inv_sqrt(m: HermitianOp) -> HermitianOp:
    """Inverse of the PSD square root; ``m`` must be positive definite."""
    p, k, n = m.pkn()
    if p <= 0.0 or k >= 1.0:
        raise NotPsd("operator is singular")
    lo = 1.0 / math.sqrt(p * (1.0 - k))
    hi = 1.0 / math.sqrt(p * (1.0 + k))
    return HermitianOp(0.5 * (hi + lo), 0.5 * (hi - lo) * n)


def sandwich(s: HermitianOp, x: HermitianOp) -> HermitianOp:
    """``S X S`` for Hermitian ``S`` and ``X``, in Bloch form."""
    s0, sv = s.c, s.v
    x0, xv = x.c, x.v
    ss = float(sv @ sv)
    sx = float(sv @ xv)
    c = x0 * (s0 * s0 + ss) + 2.0 * s0 * sx
    v = 2.0 * s0 * x0 * sv + (s0 * s0 - ss) * xv + 2.0 * sx * sv
    return HermitianOp(c, v)


def lueders_response(element: HermitianOp, r) -> tuple[float, np.ndarray]:
    """Unnormalized Lueders update of the state with Bloch vector ``r``.

    Returns ``(prob, u)`` where ``sqrt(M) rho sqrt(M) = (prob I + u . sigma)/2``
    so the post-measurement Bloch vector is ``u / prob``.
    """
    p, k, n = element.pkn()
    r = np.asarray(r, dtype=float)
    if p <= 0.0:
        return 0.0, np.zeros(3)
    nr = float(n @ r)
    root = rank_one_root(k)
    prob = p * (1.0 + k * nr)
    u = p * (k * n + root * r + (1.0 - root) * nr * n)
    return prob, u


# --------------------------------------------------------------------------
# Instruments and corrections


@dataclass(frozen=True)
class Lueders:
    pass


@dataclass(frozen=True)
class PurityPreserving:
    rotations: tuple[Rotation, ...]

    def __post_init__(self):
        object.__setattr__(self, "rotations", tuple(self.rotations))


@dataclass(frozen=True)
class MeasurePrepare:
    states: tuple[State, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))


@dataclass(frozen=True)
class Kraus:
    ops: tuple[tuple[np.ndarray, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self,
            "ops",
            tuple(tuple(np.asarray(k, dtype=complex) for k in ks) for ks in self.ops),
        )


Update = Union[Lueders, PurityPreserving, MeasurePrepare, Kraus]


@dataclass(frozen=True)
class Instrument:
    povm: Povm
    update: Update = field(default_factory=Lueders)

    def __post_init__(self):
        n = len(self.povm)
        u = self.update
        if isinstance(u, PurityPreserving) and len(u.rotations) != n:
            raise ShapeMismatch(f"{len(u.rotations)} rotations for {n} outcomes")
        if isinstance(u, MeasurePrepare) and len(u.states) != n:
            raise ShapeMismatch(f"{len(u.states)} prepared states for {n} outcomes")
        if isinstance(u, Kraus):
            if len(u.ops) != n:
                raise ShapeMismatch(f"{len(u.ops)} Kraus families for {n} outcomes")
            for m, (ks, el) in enumerate(zip(u.ops, self.povm.elements)):
                total = sum((k.conj().T @ k for k in ks), np.zeros((2, 2), dtype=complex))
                if np.max(np.abs(total - el.matrix())) > NORM_TOL:
                    raise ShapeMismatch(f"Kraus operators of outcome {m} do not reproduce M_{m}")

    def __len__(self) -> int:
        return len(self.povm)

    @classmethod
    def lueders(cls, povm: Povm) -> "Instrument":
        return cls(povm, Lueders())

    @classmethod
    def purity_preserving(cls, povm: Povm, rotations) -> "Instrument":
        return cls(povm, PurityPreserving(tuple(rotations)))

    @classmethod
    def measure_prepare(cls, povm: Povm, states) -> "Instrument":
        return cls(povm, MeasurePrepare(tuple(states)))

    @classmethod
    def identity_channel(cls) -> "Instrument":
        return cls(Povm.trivial(), Lueders())

    def kraus_ops(self) -> list[list[np.ndarray]]:
        """Explicit Kraus operators, computed without the Bloch closed forms."""
        u = self.update
        if isinstance(u, Kraus):
            return [list(ks) for ks in u.ops]
        roots = [_matrix_sqrt(e.matrix()) for e in self.povm.elements]
        if isinstance(u, Lueders):
            return [[r] for r in roots]
        if isinstance(u, PurityPreserving):
            return [[rot.unitary() @ r] for rot, r in zip(u.rotations, roots)]
        # measure-and-prepare: |psi_j><i| sqrt(M) for eigenbasis of target state
        out = []
        for st, r in zip(u.states, roots):
            w, vecs = np.linalg.eigh(st.matrix())
            ks = []
            for j in range(2):
                if w[j] <= 0:
                    continue
                for i in range(2):
                    e_i = np.zeros((2, 1), dtype=complex)
                    e_i[i, 0] = 1.0
                    ks.append(math.sqrt(w[j]) * vecs[:, [j]] @ e_i.conj().T @ r)
            out.append(ks)
        return out


def _matrix_sqrt(m: np.ndarray) -> np.ndarray:
    w, vecs = np.linalg.eigh(m)
    w = np.where(w > 0.5 * RANK_TOL * float(np.sum(np.abs(w))), w, 0.0)
    return (vecs * np.sqrt(w)) @ vecs.conj().T


@dataclass(frozen=True)
class IdentityMap:
    pass


@dataclass(frozen=True)
class Rotate:
    rotation: Rotation


@dataclass(frozen=True)
class Prepare:
    state: State


CorrectionOp = Union[IdentityMap, Rotate, Prepare]


@dataclass(frozen=True)
class Correction:
    ops: tuple[CorrectionOp, ...]

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))

    @classmethod
    def identity(cls, outcomes: int) -> "Correction":
        return cls(tuple(IdentityMap() for _ in range(outcomes)))

    @classmethod
    def rotations(cls, rots) -> "Correction":
        return cls(tuple(Rotate(r) for r in rots))

    def __len__(self) -> int:
        return len(self.ops)

    def apply(self, m: int, prob: float, u: np.ndarray) -> np.ndarray:
        """Correct the unnormalized Bloch vector ``u`` (trace ``prob``) of outcome ``m``."""
        op = self.ops[m]
        if isinstance(op, IdentityMap):
            return u
        if isinstance(op, Rotate):
            return op.rotation.apply(u)
        return prob * op.state.r


# --------------------------------------------------------------------------
# Applying instruments


def _check_outcome(inst: Instrument, outcome: int) -> None:
    if not 0 <= outcome < len(inst.povm):
        raise OutcomeOutOfRange(f"outcome {outcome} not in 0..{len(inst.povm) - 1}")


def instrument_response(inst: Instrument, r, outcome: int) -> tuple[float, np.ndarray]:
    """``(prob, u)`` with ``M_m(rho) = (prob I + u . sigma) / 2`` for ``rho`` with Bloch ``r``."""
    _check_outcome(inst, outcome)
    el = inst.povm.elements[outcome]
    r = np.asarray(r, dtype=float)
    upd = inst.update
    if isinstance(upd, Lueders):
        return lueders_response(el, r)
    if isinstance(upd, PurityPreserving):
        prob, u = lueders_response(el, r)
        return prob, upd.rotations[outcome].apply(u)
    prob = 2.0 * (0.5 * el.c + 0.5 * float(el.v @ r))
    if isinstance(upd, MeasurePrepare):
        return prob, prob * upd.states[outcome].r
    rho = State(r).matrix()
    out = sum((k @ rho @ k.conj().T for k in upd.ops[outcome]), np.zeros((2, 2), dtype=complex))
    op = op_from_matrix(out)
    return 2.0 * op.c, 2.0 * op.v


def apply_instrument(inst: Instrument, rho: State, outcome: int) -> tuple[float, State | None]:
    """Outcome probability and normalized post-measurement state.

    The post-state is ``None`` when the probability is below ``PROB_TOL``.
    """
    prob, u = instrument_response(inst, rho.r, outcome)
    if prob < PROB_TOL:
        return max(prob, 0.0), None
    r = u / prob
    n = norm(r)
    if n > 1.0:
        r = r / n
    return prob, State(r)


def apply_instrument_matrix(inst: Instrument, rho: State, outcome: int) -> tuple[float, np.ndarray | None]:
    """Same as :func:`apply_instrument` via explicit 2x2 Kraus arithmetic."""
    _check_outcome(inst, outcome)
    m = rho.matrix()
    out = sum(
        (k @ m @ k.conj().T for k in inst.kraus_ops()[outcome]),
        np.zeros((2, 2), dtype=complex),
    )
    prob = float(np.trace(out).real)
    if prob < PROB_TOL:
        return max(prob, 0.0), None
    return prob, out / prob
