import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qubitnd import qmodel as qm
from qubitnd import regions as rg
from qubitnd.sampling import (
    SamplerConfig,
    dichotomic_mixed_rank_povm,
    random_mixed_povm,
    random_povm,
    random_rotations,
)

profiles = st.sampled_from(["all_rank_one", "general"])


def _same(p, q):
    return len(p) == len(q) and all(a.c == b.c and np.array_equal(a.v, b.v) for a, b in zip(p, q))


def test_two_outcome_rank_one_is_antipodal():
    povm = random_povm(SamplerConfig(seed=3, outcomes=2), 0)
    a, b = povm
    assert a.c == pytest.approx(0.5) and b.c == pytest.approx(0.5)
    assert np.allclose(a.v, -b.v, atol=1e-15)
    assert qm.norm(a.v) == pytest.approx(0.5)


@given(st.integers(0, 2**32 - 1), st.integers(0, 10**6), st.integers(2, 8), profiles, st.booleans())
def test_draws_are_valid_povms(seed, index, outcomes, profile, plane):
    cfg = SamplerConfig(seed=seed, outcomes=outcomes, plane_xz=plane, rank_profile=profile)
    povm = random_povm(cfg, index)
    rep = qm.validate(povm)
    assert rep.valid and rep.residual < 1e-10
    assert len(povm) == outcomes
    if plane:
        assert all(e.v[1] == 0.0 for e in povm)
    if profile == "all_rank_one":
        assert all(e.c == pytest.approx(qm.norm(e.v), abs=1e-14) for e in povm)


def test_general_single_outcome_is_identity():
    (e,) = random_povm(SamplerConfig(seed=1, outcomes=1, rank_profile="general"), 5)
    assert e.c == pytest.approx(1.0, abs=1e-12) and np.allclose(e.v, 0, atol=1e-12)


@given(st.integers(0, 2**32 - 1), st.integers(0, 1000), profiles)
def test_draws_are_deterministic(seed, index, profile):
    cfg = SamplerConfig(seed=seed, outcomes=4, rank_profile=profile)
    assert _same(random_povm(cfg, index), random_povm(cfg, index))
    r1, r2 = random_rotations(cfg, index), random_rotations(cfg, index)
    assert all(np.array_equal(a.matrix(), b.matrix()) for a, b in zip(r1, r2))


def test_draws_do_not_depend_on_order():
    cfg = SamplerConfig(seed=9, outcomes=3)
    forward = [random_povm(cfg, i) for i in range(20)]
    backward = [random_povm(cfg, i) for i in reversed(range(20))][::-1]
    assert all(_same(a, b) for a, b in zip(forward, backward))
    assert not _same(forward[0], forward[1])


def test_dichotomic_quarter_weight_is_the_counterexample():
    n = np.array([1.0, 0.0, 1.0]) / math.sqrt(2)
    povm = dichotomic_mixed_rank_povm(0.25, n)
    ref = rg.dichotomic_counterexample().instrument.povm
    assert all(a.c == pytest.approx(b.c) and np.allclose(a.v, b.v) for a, b in zip(povm, ref))


@given(st.integers(0, 2**32 - 1), st.integers(0, 10**6))
def test_dichotomic_profile_draws(seed, index):
    cfg = SamplerConfig(seed=seed, outcomes=2, rank_profile="dichotomic_mixed_rank")
    plus, minus = random_povm(cfg, index)
    assert 0 < plus.c <= 0.5
    assert plus.c == pytest.approx(qm.norm(plus.v), abs=1e-15)
    assert qm.validate(qm.Povm((plus, minus))).valid


@pytest.mark.parametrize(
    "kwargs",
    [
        {"rank_profile": "low"},
        {"rank_profile": "dichotomic_mixed_rank", "outcomes": 3},
        {"outcomes": 1},
        {"outcomes": 9},
        {"outcomes": 0, "rank_profile": "general"},
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SamplerConfig(**kwargs)


def test_rotations_in_plane_fix_y():
    for rot in random_rotations(SamplerConfig(seed=2, outcomes=6), 0):
        assert np.allclose(rot.apply([0, 1, 0]), [0, 1, 0], atol=1e-15)


def test_validator_sweep():
    worst = 0.0
    for i in range(2000):
        rep = qm.validate(random_mixed_povm(17, i))
        assert rep.valid
        worst = max(worst, rep.residual)
    assert worst < 1e-10
