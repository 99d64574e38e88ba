import numpy as np
import pytest
from hypothesis import given, strategies as st

from spherframe.window import DEFAULT_WINDOW, Window, check_partition, eval_phi, eval_step


def direct_step(x):
    # independent transcription of h(u) / (h(u) + h(1 - u)), u = 2x - 1
    if x <= 0.5:
        return 0.0
    if x >= 1.0:
        return 1.0
    u = 2 * x - 1
    hu, hv = np.exp(-1 / u), np.exp(-1 / (1 - u))
    return hu / (hu + hv)


def test_step_values():
    assert eval_step(0.25) == 0.0
    assert eval_step(3.0) == 1.0
    assert eval_step(0.75) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("x", [0.55, 0.6, 0.7, 0.8, 0.9, 0.97])
def test_step_direct_formula(x):
    assert eval_step(x) == pytest.approx(direct_step(x), rel=1e-14)


def test_phi_support_and_peak():
    assert eval_phi(0.4) == 0.0
    assert eval_phi(1.0) == 1.0
    assert eval_phi(-1.0) == 1.0
    xs = np.concatenate([np.linspace(0, 0.5, 200), np.linspace(2, 50, 200)])
    assert np.all(eval_phi(xs) == 0.0)


def test_phi_partition_at_1_3():
    s = sum(eval_phi(2.0 ** -j * 1.3) ** 2 for j in range(-3, 4))
    assert abs(s - 1) < 1e-12


def test_check_partition_examples():
    dev, ok = check_partition([1.0], 1e-12)
    assert ok and dev < 1e-12
    assert check_partition(np.logspace(-2, 2, 1000), 1e-12)[1]
    assert check_partition([2.0 ** -5 * 1.7], 1e-12)[1]


def test_check_partition_against_brute_force():
    xs = np.logspace(-2, 3, 500)
    brute = sum(eval_phi(2.0 ** -j * xs) ** 2 for j in range(-12, 14))
    assert np.max(np.abs(brute - 1)) < 1e-12
    assert check_partition(xs)[0] < 1e-12


def test_partition_random(rng):
    xs = rng.uniform(0, 1e3, 10_000)
    xs = xs[xs > 0]
    assert check_partition(xs, 1e-12)[1]


def test_check_partition_rejects_nonpositive():
    with pytest.raises(ValueError):
        check_partition([0.0, 1.0])


def test_step_monotone():
    s = eval_step(np.linspace(0, 1.5, 10_000))
    assert np.all(np.diff(s) >= 0)


def test_no_jumps_at_support_edges():
    h = 1e-4
    for edge in (0.5, 2.0):
        x = edge + h * np.arange(-50, 51)
        v = eval_phi(x)
        d1 = np.diff(v) / h
        d2 = np.diff(v, 2) / h ** 2
        assert np.max(np.abs(d1)) < 10
        assert np.max(np.abs(d2)) < 1e3


@given(st.floats(1e-3, 1e3))
def test_partition_property(x):
    assert check_partition([x])[0] < 1e-12


@given(st.floats(1e-2, 1e2), st.integers(-20, 20))
def test_dyadic_invariance(x, j):
    assert check_partition([x * 2.0 ** j])[0] < 1e-12


def test_multipliers():
    W = Window()
    np.testing.assert_array_equal(W.multipliers(0, 4), [1, 0, 0, 0, 0])
    m = W.multipliers(3, 10)
    k = np.arange(11)
    np.testing.assert_allclose(m, np.where((k >= 2) & (k <= 8), eval_phi(k / 4), 0.0))
    assert m[4] == 1.0 and m[2] == 0.0 and m[8] == 0.0
    # squares over levels add up to one for every degree
    tot = sum(W.multipliers(j, 64) ** 2 for j in range(9))
    np.testing.assert_allclose(tot, 1.0, atol=1e-14)


def test_callable_default():
    assert DEFAULT_WINDOW(1.5) == eval_phi(1.5)
    assert Window.phi(1.5) == eval_phi(1.5)
