import math

import numpy as np
import pytest
from conftest import povms
from hypothesis import given, settings
from hypothesis import strategies as st

from qubitnd import qmodel as qm
from qubitnd import regions as rg
from qubitnd.entropy import binary_entropy_h
from qubitnd.errors import BudgetTooSmall, ShapeMismatch
from qubitnd.measures import disturbance_corrected
from qubitnd.optimize import (
    dichotomic_violation_search,
    g_sum,
    heuristic_alignment,
    optimize_corrections,
    refine_corrections,
)
from qubitnd.sampling import SamplerConfig, random_povm, random_rotations

Z, X = qm.pauli("z"), qm.pauli("x")


def _value(inst, corr):
    return disturbance_corrected(inst, X, corr).value


def test_heuristic_on_projective_z_does_nothing():
    povm = qm.Povm.projective([0, 0, 1])
    corr = heuristic_alignment(povm, X)
    assert all(np.allclose(op.rotation.matrix(), np.eye(3)) for op in corr.ops)
    assert _value(qm.Instrument.lueders(povm), corr) == pytest.approx(1.0, abs=1e-15)


def test_heuristic_on_trivial_povm():
    povm = qm.Povm.trivial()
    corr = heuristic_alignment(povm, X)
    assert np.allclose(corr.ops[0].rotation.matrix(), np.eye(3))
    assert _value(qm.Instrument.lueders(povm), corr) == pytest.approx(0.0, abs=1e-15)


def test_heuristic_reaches_mtheta_closed_form():
    theta = math.pi / 3
    fam = rg.mtheta_family(theta)
    corr = heuristic_alignment(fam.povm, X)
    closed = binary_entropy_h(math.cos(theta)) / (1 + math.cos(theta))
    assert _value(qm.Instrument.lueders(fam.povm), corr) <= closed + 1e-9


def test_refine_keeps_optimal_start():
    fam = rg.mtheta_family(math.pi / 3)
    inst = qm.Instrument.lueders(fam.povm)
    init = heuristic_alignment(fam.povm, X)
    rep = refine_corrections(inst, X, init, budget=200)
    assert rep.value == pytest.approx(_value(inst, init), abs=1e-9)
    assert rep.strategy == "nelder_refine"


def test_refine_budget_and_shape_errors():
    inst = qm.Instrument.lueders(rg.mtheta_family(0.5).povm)
    with pytest.raises(BudgetTooSmall):
        refine_corrections(inst, X, qm.Correction.identity(3), budget=9)
    with pytest.raises(ShapeMismatch):
        refine_corrections(inst, X, qm.Correction.identity(2))


@settings(max_examples=25)
@given(st.integers(0, 10**6), st.integers(2, 5), st.booleans())
def test_small_budget_never_worse(index, outcomes, plane):
    cfg = SamplerConfig(seed=4, outcomes=outcomes, plane_xz=plane)
    povm = random_povm(cfg, index)
    inst = qm.Instrument.purity_preserving(povm, random_rotations(cfg, index))
    init = qm.Correction.identity(outcomes)
    rep = refine_corrections(inst, X, init, budget=10)
    assert rep.value <= _value(inst, init)


@settings(max_examples=25)
@given(povms())
def test_refine_not_worse_than_heuristic(povm):
    inst = qm.Instrument.lueders(povm)
    init = heuristic_alignment(povm, X)
    rep = refine_corrections(inst, X, init, budget=200)
    assert rep.value <= _value(inst, init) + 1e-12


@settings(max_examples=25)
@given(povms(), st.sampled_from(["identity", "heuristic", "refine"]))
def test_report_value_is_reproducible(povm, strategy):
    inst = qm.Instrument.lueders(povm)
    rep = optimize_corrections(inst, X, strategy, budget=100)
    assert rep.value == pytest.approx(_value(inst, rep.best), abs=1e-12)


def test_unknown_strategy():
    with pytest.raises(ValueError):
        optimize_corrections(qm.Instrument.identity_channel(), X, "grid")


def test_counterexample_family_search_finds_violation():
    ce = rg.dichotomic_counterexample()
    rep = optimize_corrections(ce.instrument, X, "refine", include_prepare=True, budget=200)
    assert rep.value == pytest.approx(_value(ce.instrument, rep.best), abs=1e-12)
    assert g_sum(ce.noise, rep.value) > 1.005


def test_search_with_injected_counterexample():
    ce = rg.dichotomic_counterexample()
    res = dichotomic_violation_search(1, seed=0, inject=[ce.instrument])
    assert res.gsum >= 1.011
    assert res.gsum == pytest.approx(g_sum(res.noise, res.disturbance), abs=1e-12)
    assert res.disturbance == pytest.approx(_value(res.instrument, res.correction), abs=1e-12)


def test_search_rejects_zero_trials():
    with pytest.raises(ValueError):
        dichotomic_violation_search(0)


def _heuristic_vs_refine(count=1000):
    close = 0
    for i in range(count):
        cfg = SamplerConfig(seed=11, outcomes=3 + i % 3, plane_xz=True)
        povm = random_povm(cfg, i)
        inst = qm.Instrument.lueders(povm)
        init = heuristic_alignment(povm, X)
        h = _value(inst, init)
        r = refine_corrections(inst, X, init, budget=200).value
        close += h - r <= 1e-6
    return close / count


@pytest.mark.slow
@pytest.mark.xfail(
    strict=True,
    reason="refinement improves on the alignment heuristic by more than 1e-6 in 2-6% of rank-one draws",
)
def test_heuristic_matches_refine_in_99_percent_of_rank_one_draws():
    assert _heuristic_vs_refine() >= 0.99
