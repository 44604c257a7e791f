import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from deadline_sched import (
    ArrivalSequence,
    ScheduleError,
    opt_groups,
    opt_oracle,
    opt_schedule,
    opt_transform,
    total_energy,
)
from deadline_sched.offline import lipschitz_slack

from conftest import seq, unit_instance


def brute_partial_sum_groups(gaps):
    """Literal transcription of the group construction with exact rational ties."""
    from fractions import Fraction

    a = [Fraction(x) for x in gaps]
    out = []
    k0 = 0
    while k0 < len(a):
        avgs = [sum(a[k0 : k0 + k]) / k for k in range(1, len(a) - k0 + 1)]
        m = max(avgs)
        k = max(i + 1 for i, v in enumerate(avgs) if v == m)
        out.extend([float(m)] * k)
        k0 += k
    return out


@pytest.mark.parametrize(
    "gaps, expected",
    [
        ([0.8, 0.2], [0.8, 0.2]),
        ([0.2, 0.8], [0.5, 0.5]),
        ([0.25, 0.25, 0.25, 0.25], [0.25] * 4),
    ],
)
def test_opt_examples(kernels, gaps, expected):
    inst, arr = seq(gaps)
    s = opt_schedule(arr, inst)
    np.testing.assert_allclose(s.durations, expected, rtol=0, atol=1e-15)
    np.testing.assert_allclose(s.starts, np.concatenate(([0.0], np.cumsum(expected)[:-1])), atol=1e-15)


def test_opt_energy_of_closed_instance(kernels):
    inst, arr = seq([0.8, 0.2])
    assert total_energy(opt_schedule(arr, inst), inst.link) == pytest.approx(7.302731, abs=5e-7)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 9), min_size=1, max_size=12))
def test_opt_matches_exact_rational_construction(ints):
    ints = ints[:-1] + [ints[-1] + 1]
    T = float(sum(ints))
    gaps = [float(i) for i in ints]
    inst, arr = seq(gaps, T=T, bits=T / len(gaps))
    d = opt_schedule(arr, inst).durations
    np.testing.assert_allclose(d, brute_partial_sum_groups(gaps), rtol=1e-12)


def test_groups_structure(kernels):
    inst, arr = seq([0.1, 0.5, 0.2, 0.1, 0.1])
    groups = opt_groups(arr)
    assert [g.end_index for g in groups] == [2, 3, 5]
    means = [g.group_duration for g in groups]
    assert means == pytest.approx([0.3, 0.2, 0.1])
    assert all(a > b for a, b in zip(means, means[1:]))


def test_zero_gaps_are_allowed(kernels):
    inst, arr = seq([0.0, 0.0, 0.6, 0.4])
    d = opt_schedule(arr, inst).durations
    assert d.sum() == pytest.approx(1.0, abs=1e-15)
    np.testing.assert_allclose(d, brute_partial_sum_groups([0.0, 0.0, 0.6, 0.4]), rtol=1e-12)


@pytest.mark.parametrize("gaps", [[0.8, 0.2], [0.5, 0.3, 0.15, 0.05], [0.4, 0.3, 0.3]])
def test_decreasing_gaps_are_followed_exactly(kernels, gaps):
    inst, arr = seq(gaps)
    np.testing.assert_allclose(opt_schedule(arr, inst).durations, gaps, rtol=0, atol=1e-15)


@pytest.mark.parametrize(
    "gaps, expected",
    [([0.2, 0.8], [0.5, 0.5]), ([0.8, 0.2], [0.8, 0.2]), ([0.25] * 4, [0.25] * 4)],
)
def test_opt_transform_examples(kernels, gaps, expected):
    inst, arr = seq(gaps)
    np.testing.assert_allclose(opt_transform(arr, inst).gaps, expected, atol=1e-15)


def test_opt_transform_is_idempotent(kernels):
    rng = np.random.default_rng(3)
    for _ in range(200):
        P = int(rng.integers(1, 30))
        g = rng.dirichlet(np.ones(P))
        inst, arr = seq(g.tolist()[:-1] + [1.0 - g[:-1].sum()])
        once = opt_transform(arr, inst)
        twice = opt_transform(once, inst)
        np.testing.assert_allclose(twice.gaps, once.gaps, rtol=0, atol=1e-9)


def test_oracle_closed_instance():
    inst, arr = seq([0.8, 0.2])
    opt = opt_schedule(arr, inst)
    orc = opt_oracle(arr, inst, 0.01)
    slack = lipschitz_slack(opt.durations, 0.01, inst)
    e_orc = total_energy(orc, inst.link)
    assert 7.302731 - 5e-7 <= e_orc <= 7.302731 + slack


def test_oracle_on_grid_optimum():
    inst, arr = seq([0.5, 0.5])
    np.testing.assert_allclose(opt_oracle(arr, inst, 0.01).durations, [0.5, 0.5], atol=1e-12)


def test_oracle_single_packet():
    inst, arr = seq([1.0])
    np.testing.assert_array_equal(opt_oracle(arr, inst, 0.01).durations, [1.0])


def test_oracle_refuses_large_instances():
    inst, arr = seq([0.2] * 5)
    with pytest.raises(ScheduleError):
        opt_oracle(arr, inst, 0.01)
    inst, arr = seq([0.5, 0.5])
    with pytest.raises(ScheduleError):
        opt_oracle(arr, inst, 1e-5)


@pytest.mark.parametrize("P, step", [(2, 1e-3), (3, 1e-2), (4, 2.5e-2)])
def test_oracle_agrees_within_grid_slack(P, step):
    rng = np.random.default_rng(P)
    for _ in range(20):
        g = rng.dirichlet(np.full(P, 2.0))
        inst, arr = seq(g.tolist()[:-1] + [1.0 - g[:-1].sum()])
        opt = opt_schedule(arr, inst)
        e_opt = total_energy(opt, inst.link)
        e_orc = total_energy(opt_oracle(arr, inst, step), inst.link)
        assert e_opt <= e_orc * (1 + 1e-12)
        assert e_orc <= e_opt + lipschitz_slack(opt.durations, step, inst)


def test_non_idling_and_causal_on_fuzz(kernels):
    rng = np.random.default_rng(11)
    for _ in range(500):
        P = int(rng.integers(1, 60))
        g = rng.exponential(1.0, P)
        g[: P - 1][rng.random(P - 1) < 0.2] = 0.0
        g[-1] += 0.1
        T = float(g.sum())
        arr = ArrivalSequence(g, T)
        inst = unit_instance(P, T)
        s = opt_schedule(arr, inst)
        d = s.durations
        assert abs(d.sum() - T) <= 1e-9 * T
        assert np.all(np.cumsum(d)[:-1] >= np.cumsum(g)[:-1] - 1e-9 * T)
        assert np.all(d[:-1] >= d[1:])
        np.testing.assert_allclose(s.starts[1:], s.finishes[:-1], rtol=0, atol=1e-12)
