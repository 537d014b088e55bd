"""The twelve acceptance criteria at full scale.

Each test prints one ``[PASS]``/``[FAIL]`` line; the lines are collected and
repeated in the terminal summary.  Full run takes several minutes.
"""

import time

import pytest
from conftest import ACCEPTANCE_LINES

from qubitnd import verify as vf

pytestmark = pytest.mark.slow


def _record(number: int, title: str, checks, seconds: float, limit: float | None = None):
    ok = all(c.passed for c in checks) and (limit is None or seconds < limit)
    timing = f"{seconds:.2f} s" + (f" (limit {limit:g} s)" if limit is not None else "")
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}, {timing}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    for c in checks:
        print("    " + c.line())
    return ok


def _run(number, title, fn, limit=None):
    t0 = time.perf_counter()
    checks = fn()
    seconds = time.perf_counter() - t0
    ok = _record(number, title, checks, seconds, limit)
    assert ok, "\n".join(c.line() for c in checks if not c.passed) or f"took {seconds:.1f} s"


def test_criterion_01_mtheta_counterexample():
    _run(1, "M^theta at pi/3 exceeds the g-sum bound with closed-form N and D", vf.check_mtheta, 1.0)


def test_criterion_02_dichotomic_counterexample():
    _run(2, "dichotomic instrument N, D and g-sum", vf.check_dichotomic_counterexample, 1.0)


def test_criterion_03_lueders_sweep():
    _run(3, "1e5 Lueders instruments obey the g-sum bound", lambda: vf.check_lueders_sweep(100_000), 60.0)


def test_criterion_04_lueders_tightness():
    _run(4, "Lueders tight instrument reproduces 1e3 targets", lambda: vf.check_lueders_tightness(1000))


def test_criterion_05_nn_tightness():
    _run(5, "saturating POVMs on the line and on hull points",
         lambda: vf.check_nn_line(1000) + vf.check_nn_hull(200))


def test_criterion_06_mu_bounds():
    _run(6, "N + N and N + D over 1e4 instruments with optimized corrections",
         lambda: vf.check_mu_bounds(10_000))


def test_criterion_07_dichotomic_nn():
    _run(7, "dichotomic noise-noise bound over 1e4 POVMs", lambda: vf.check_dichotomic_nn(10_000))


def test_criterion_08_oracle_equivalences():
    _run(8, "noise, disturbance and matrix-path oracles",
         lambda: vf.check_noise_oracle(10_000) + vf.check_disturbance_oracle(1000) + vf.check_matrix_oracle(1000))


def test_criterion_09_conjectured_curve():
    _run(9, "no refined sample below the conjectured curve", lambda: vf.check_conjecture(10_000), 600.0)


def test_criterion_10_dichotomic_search():
    _run(10, "dichotomic search over 1e4 trials reaches the known point",
         lambda: vf.check_dichotomic_search(10_000))


def test_criterion_11_entropy_grid():
    _run(11, "convexity grid and g/h round trip", vf.check_entropy)


def test_criterion_12_preparation():
    _run(12, "preparation relations over 1e4 states", lambda: vf.check_preparation(10_000))
