import math

import numpy as np
import pytest
from conftest import povms, unit_vectors
from hypothesis import given
from hypothesis import strategies as st
from oracles import disturbance_matrix, h_mp, keep, lueders_kraus, noise_matrix, prepare

from qubitnd import qmodel as qm
from qubitnd import regions as rg
from qubitnd.errors import InvalidPovm, ShapeMismatch
from qubitnd.measures import (
    disturbance_corrected,
    disturbance_identity_lueders,
    disturbance_identity_pp,
    disturbance_optimized,
    instrument_noise,
    mu_bound,
    noise,
    noise_via_joint,
)

Z, X = qm.pauli("z"), qm.pauli("x")
Z_PROJ = qm.Povm.projective([0, 0, 1])
TRIVIAL = qm.Povm.trivial()

# values frozen from tests/oracles.py (explicit density matrices and mpmath)
MTHETA_NOISE = 0.5697192684435133
MTHETA_DIST = 0.5408520829727556
CE_NOISE = 0.86987818976823
CE_DIST = 0.25461399433158804
H_INV_SQRT2 = 0.6008760366928562


@pytest.mark.parametrize("fn", [noise, noise_via_joint])
def test_noise_trivial_cases(fn):
    assert fn(Z_PROJ, Z).value == pytest.approx(0.0, abs=1e-15)
    assert fn(TRIVIAL, Z).value == pytest.approx(1.0, abs=1e-15)
    assert fn(TRIVIAL, qm.pauli("1 2 3")).value == pytest.approx(1.0, abs=1e-15)


def test_noise_mtheta():
    fam = rg.mtheta_family(math.pi / 3)
    assert noise(fam.povm, Z).value == pytest.approx(MTHETA_NOISE, abs=1e-12)
    assert noise(fam.povm, Z).value == pytest.approx((0.5 + h_mp(math.sqrt(3) / 2)) / 1.5, abs=1e-12)
    assert noise(fam.povm, Z).value == pytest.approx(0.56972, abs=1e-5)


def test_noise_per_outcome_sums():
    res = noise(rg.mtheta_family(0.4).povm, Z)
    assert res.value == pytest.approx(sum(p * hm for p, hm in res.per_outcome), abs=1e-12)
    assert 0.0 <= res.value <= 1.0


def test_noise_rejects_invalid_povm():
    with pytest.raises(InvalidPovm):
        noise(qm.Povm((qm.HermitianOp(0.6, [0, 0, 0.6]),)), Z)


@given(povms(), unit_vectors())
def test_noise_routes_agree(povm, a):
    a = qm.PauliObservable(a)
    assert noise(povm, a).value == pytest.approx(noise_via_joint(povm, a).value, abs=1e-12)


@given(povms(), unit_vectors())
def test_noise_matches_density_matrix_oracle(povm, a):
    ref = noise_matrix([e.matrix() for e in povm], a)
    assert noise(povm, qm.PauliObservable(a)).value == pytest.approx(ref, abs=1e-12)


@given(povms(), st.integers(0, 100))
def test_noise_independent_of_update_rule(povm, s):
    rng = np.random.default_rng(s)
    rots = [qm.Rotation(rng.normal(size=3), rng.uniform(0, 6)) for _ in povm]
    a = instrument_noise(qm.Instrument.lueders(povm), Z)
    b = instrument_noise(qm.Instrument.purity_preserving(povm, rots), Z)
    assert a.value == b.value and a.per_outcome == b.per_outcome


@given(povms(), st.randoms(use_true_random=False))
def test_noise_relabelling_invariant(povm, rnd):
    order = list(range(len(povm)))
    rnd.shuffle(order)
    assert noise(povm.permuted(order), Z).value == pytest.approx(noise(povm, Z).value, abs=1e-15)


@given(povms(), st.randoms(use_true_random=False))
def test_coarse_graining_increases_noise(povm, rnd):
    labels = [rnd.randrange(len(povm)) for _ in povm]
    groups = [[i for i, lab in enumerate(labels) if lab == k] for k in sorted(set(labels))]
    coarse = qm.coarse_grain(povm, groups)
    assert noise(coarse, Z).value >= noise(povm, Z).value - 1e-12


def test_disturbance_trivial_cases():
    ident = qm.Instrument.identity_channel()
    assert disturbance_corrected(ident, X, qm.Correction.identity(1)).value == pytest.approx(0.0, abs=1e-15)
    inst = qm.Instrument.lueders(Z_PROJ)
    assert disturbance_corrected(inst, X, qm.Correction.identity(2)).value == pytest.approx(1.0, abs=1e-15)


def test_disturbance_mtheta_with_its_correction():
    fam = rg.mtheta_family(math.pi / 3)
    res = disturbance_corrected(fam.instrument, X, fam.correction)
    assert res.value == pytest.approx(MTHETA_DIST, abs=1e-12)
    assert res.value == pytest.approx(0.54085, abs=1e-5)
    assert res.value == pytest.approx(h_mp(0.5) / 1.5, abs=1e-12)


def test_disturbance_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        disturbance_corrected(qm.Instrument.lueders(Z_PROJ), X, qm.Correction.identity(3))


def test_disturbance_lueders_closed_form_examples():
    assert disturbance_identity_lueders(Z_PROJ, X).value == pytest.approx(1.0, abs=1e-15)
    assert disturbance_identity_lueders(TRIVIAL, X).value == pytest.approx(0.0, abs=1e-15)
    m = qm.HermitianOp(0.5, [0, 0, 0.5 / math.sqrt(2)])
    povm = qm.Povm((m, qm.HermitianOp(0.5, -m.v)))
    assert disturbance_identity_lueders(povm, X).value == pytest.approx(H_INV_SQRT2, abs=1e-12)
    assert disturbance_identity_lueders(povm, X).value == pytest.approx(0.60088, abs=1e-5)


def test_disturbance_pp_identity_rotations_reduce_to_lueders():
    fam = rg.mtheta_family(0.7)
    rots = [qm.Rotation.identity()] * 3
    assert disturbance_identity_pp(fam.povm, rots, X).value == pytest.approx(
        disturbance_identity_lueders(fam.povm, X).value, abs=1e-15
    )
    with pytest.raises(ShapeMismatch):
        disturbance_identity_pp(fam.povm, rots[:2], X)


def test_counterexample_against_matrix_oracle():
    n = np.array([1.0, 0.0, 1.0]) / math.sqrt(2)
    plus = qm.HermitianOp(0.25, 0.25 * n)
    povm = qm.Povm((plus, qm.HermitianOp(0.75, -0.25 * n)))
    inst = qm.Instrument.lueders(povm)
    corr = qm.Correction((qm.Prepare(qm.State([1, 0, 0])), qm.IdentityMap()))
    ref = disturbance_matrix(lueders_kraus([e.matrix() for e in povm]), [prepare([1, 0, 0]), keep], [1, 0, 0])
    assert ref == pytest.approx(CE_DIST, abs=1e-14)
    assert disturbance_corrected(inst, X, corr).value == pytest.approx(CE_DIST, abs=1e-12)
    assert noise(povm, Z).value == pytest.approx(CE_NOISE, abs=1e-12)


@given(povms(), unit_vectors())
def test_lueders_closed_form_matches_born_table(povm, b):
    b = qm.PauliObservable(b)
    ref = disturbance_corrected(qm.Instrument.lueders(povm), b, qm.Correction.identity(len(povm))).value
    assert disturbance_identity_lueders(povm, b).value == pytest.approx(ref, abs=1e-12)


@given(povms(), unit_vectors(), st.integers(0, 1000))
def test_pp_closed_form_matches_born_table_and_matrices(povm, b, s):
    rng = np.random.default_rng(s)
    rots = [qm.Rotation(rng.normal(size=3), rng.uniform(0, 6)) for _ in povm]
    bo = qm.PauliObservable(b)
    inst = qm.Instrument.purity_preserving(povm, rots)
    table = disturbance_corrected(inst, bo, qm.Correction.identity(len(povm))).value
    assert disturbance_identity_pp(povm, rots, bo).value == pytest.approx(table, abs=1e-10)
    kraus = [[r.unitary() @ k for k in ks] for r, ks in zip(rots, lueders_kraus([e.matrix() for e in povm]))]
    assert table == pytest.approx(disturbance_matrix(kraus, [keep] * len(povm), b), abs=1e-10)


@given(povms(), unit_vectors())
def test_disturbance_result_is_consistent(povm, b):
    res = disturbance_identity_lueders(povm, qm.PauliObservable(b))
    assert 0.0 <= res.value <= 1.0
    assert res.joint.table.sum() == pytest.approx(1.0, abs=1e-12)


def test_disturbance_optimized_examples():
    ident = qm.Instrument.identity_channel()
    assert disturbance_optimized(ident, X).value == pytest.approx(0.0, abs=1e-12)
    fam = rg.mtheta_family(math.pi / 3)
    inst = qm.Instrument.lueders(fam.povm)
    assert disturbance_optimized(inst, X, "heuristic").value <= 0.54086
    ce = rg.dichotomic_counterexample()
    d = disturbance_optimized(ce.instrument, X, "refine").value
    assert d <= 0.2551
    g2 = rg.g(ce.noise) ** 2 + rg.g(d) ** 2
    assert g2 >= 1.011 - 2e-3


def test_mu_bound_values():
    assert mu_bound(Z, X) == pytest.approx(1.0)
    assert mu_bound(Z, Z) == pytest.approx(0.0)
    c = 0.5
    assert mu_bound(Z, qm.PauliObservable([math.sqrt(1 - c * c), 0, c])) == pytest.approx(-math.log2(0.75))


@given(povms(), st.integers(0, 1000))
def test_mu_bounds_hold(povm, s):
    rng = np.random.default_rng(s)
    rots = [qm.Rotation(rng.normal(size=3), rng.uniform(0, 6)) for _ in povm]
    inst = qm.Instrument.purity_preserving(povm, rots)
    nz, nx = noise(povm, Z).value, noise(povm, X).value
    d = disturbance_optimized(inst, X, "heuristic").value
    assert nz + nx >= 1 - 1e-9
    assert nz + d >= 1 - 1e-9
