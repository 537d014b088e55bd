"""Independent reference computations used to freeze expected values.

Nothing here imports the library: everything is explicit 2x2 density-matrix
arithmetic in numpy, or extended precision via mpmath.
"""

import mpmath
import numpy as np

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def bloch_op(c, v):
    return c * I2 + v[0] * SX + v[1] * SY + v[2] * SZ


def projector(axis, sign):
    return bloch_op(0.5, 0.5 * sign * np.asarray(axis, dtype=float))


def h_mp(x, dps=50):
    """Binary entropy of bias (1+x)/2 in bits, to ``dps`` digits."""
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        out = mpmath.mpf(0)
        for q in ((1 + x) / 2, (1 - x) / 2):
            if q > 0:
                out -= q * mpmath.log(q, 2)
        return float(out)


def cond_entropy(joint):
    """H(row | column) of a joint table, by the weighted-conditional route."""
    joint = np.asarray(joint, dtype=float)
    out = 0.0
    for col in joint.T:
        pc = col.sum()
        if pc <= 0:
            continue
        q = col / pc
        out -= pc * sum(t * np.log2(t) for t in q if t > 0)
    return out


def msqrt(m):
    w, v = np.linalg.eigh(m)
    # eigenvalues at rounding level belong to rank-one elements; sqrt would amplify them
    w = np.where(w > 1e-14 * np.abs(w).sum(), w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def noise_matrix(elements, a):
    """Noise from p(a, m) = (1/2) Tr[M_m |a><a|]; ``elements`` are 2x2 matrices."""
    joint = [[0.5 * np.trace(m @ projector(a, s)).real for m in elements] for s in (1, -1)]
    return cond_entropy(joint)


def disturbance_matrix(kraus, channels, b):
    """``kraus[m]`` is a list of Kraus matrices; ``channels[m]`` maps a density matrix."""
    joint = np.zeros((2, 2))
    for i, s in enumerate((1, -1)):
        rho = projector(b, s)
        out = sum(
            channels[m](sum(k @ rho @ k.conj().T for k in ks)) for m, ks in enumerate(kraus)
        )
        for j, t in enumerate((1, -1)):
            joint[i, j] = 0.5 * np.trace(out @ projector(b, t)).real
    return cond_entropy(joint)


def lueders_kraus(elements):
    return [[msqrt(m)] for m in elements]


def unitary(axis, angle):
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    return np.cos(angle / 2) * I2 - 1j * np.sin(angle / 2) * bloch_op(0.0, axis)


def keep(rho):
    return rho


def prepare(bloch):
    target = bloch_op(0.5, 0.5 * np.asarray(bloch, dtype=float))
    return lambda rho: np.trace(rho).real * target


def g_mp(y, dps=40):
    """Inverse binary entropy by high-precision bisection."""
    with mpmath.workdps(dps):
        y = mpmath.mpf(y)
        lo, hi = mpmath.mpf(0), mpmath.mpf(1)
        for _ in range(200):
            mid = (lo + hi) / 2
            if h_mp(mid, dps) > y:
                lo = mid
            else:
                hi = mid
        return float((lo + hi) / 2)
