import math

import numpy as np
import pytest

from scalefree.bounds import (
    BoundReport,
    adaftrl_optimized_bound,
    adaftrl_optimized_scale,
    adaftrl_regret_bound,
    generic_ftrl_regret_bound,
    lower_bound_value,
    min_term_inequality_check,
    solo_optimized_bound,
    solo_optimized_scale,
    solo_regret_bound,
    sqrt_sum_check,
)
from scalefree.geometry import Simplex, UnboundedError
from scalefree.learners import AdaFTRL, SoloFTRL, run
from scalefree.regularizers import HalfSquaredDistance, ShiftedNegativeEntropy, scaled_bregman
from scalefree.geometry import L2Ball, FullSpace


# --- report semantics -----------------------------------------------------------


def test_bound_report_slack_and_pass():
    ok = BoundReport("x", observed=1.0, bound=2.0)
    assert ok.slack == 1.0 and ok.passed
    edge = BoundReport("x", observed=1.0 + 5e-9, bound=1.0)
    assert edge.passed  # within the 1e-8 relative slack
    bad = BoundReport("x", observed=1.1, bound=1.0)
    assert not bad.passed


# --- closed-form bound values -----------------------------------------------------


def test_adaftrl_bound_frozen_example():
    # sqrt(3) * max(2, 1/sqrt(2)) * sqrt(3) * 1 = 6
    assert adaftrl_regret_bound(2.0, 1.0, 0.0, [1.0, 1.0, 1.0]) == pytest.approx(6.0, rel=1e-12)


def test_adaftrl_bound_zero_losses_and_unbounded():
    assert adaftrl_regret_bound(2.0, 1.0, 0.5, []) == 0.0
    with pytest.raises(UnboundedError):
        adaftrl_regret_bound(math.inf, 1.0, 0.0, [1.0])


def test_adaftrl_bound_homogeneous_degree_one():
    rng = np.random.default_rng(0)
    for _ in range(50):
        norms = np.abs(rng.normal(size=5))
        c = 10 ** rng.uniform(-6, 6)
        base = adaftrl_regret_bound(2.0, 0.7, 0.3, norms)
        assert adaftrl_regret_bound(2.0, 0.7, 0.3, c * norms) == pytest.approx(
            c * base, rel=1e-12
        )


def test_adaftrl_optimized_constants():
    assert adaftrl_optimized_scale(1.0) == 1.0 / 16.0
    assert adaftrl_optimized_bound(math.log(2.0), [1.0]) == pytest.approx(
        5.3 * math.sqrt(math.log(2.0)), rel=1e-14
    )
    assert adaftrl_optimized_bound(math.log(2.0), [1.0]) == pytest.approx(4.412, abs=1e-3)
    assert adaftrl_optimized_bound(1.0, []) == 0.0
    with pytest.raises(ValueError):
        adaftrl_optimized_bound(0.0, [1.0])
    with pytest.raises(ValueError):
        adaftrl_optimized_scale(-1.0)


def test_solo_bound_frozen_examples():
    # T=1 kills the max-norm term
    assert solo_regret_bound(2.0, 1.0, 0.0, [1.0], 1) == pytest.approx(2.75)
    assert solo_regret_bound(2.0, 1.0, 0.0, [], 0) == 0.0
    # unbounded set: the min resolves to sqrt(T-1)/modulus
    expected = 2.75 * math.sqrt(5.0) + 3.5 * 2.0
    assert solo_regret_bound(math.inf, 1.0, 0.0, [1.0] * 5, 5) == pytest.approx(
        expected, rel=1e-12
    )
    assert expected == pytest.approx(13.149, abs=1e-3)


def test_solo_optimized_constants():
    assert solo_optimized_scale(1.0) == pytest.approx(math.sqrt(2.75), rel=1e-15)
    assert math.sqrt(2.75) == pytest.approx(1.658, abs=1e-3)
    assert solo_optimized_bound(0.5, [1.0, 1.0]) == pytest.approx(13.3, rel=1e-14)
    assert solo_optimized_bound(1.0, []) == 0.0
    with pytest.raises(ValueError):
        solo_optimized_bound(-0.5, [1.0])


def test_lower_bound_value_examples():
    assert lower_bound_value(2.0, [1.0, 1.0]) == pytest.approx(1.0, rel=1e-12)
    assert lower_bound_value(2.0, []) == 0.0
    base = lower_bound_value(1.5, [1.0, 2.0, 0.5])
    assert lower_bound_value(1.5, [3.0, 6.0, 1.5]) == pytest.approx(3.0 * base, rel=1e-12)
    with pytest.raises(ValueError):
        lower_bound_value(math.inf, [1.0])


def test_bounds_reject_bad_norm_profiles():
    with pytest.raises(ValueError):
        adaftrl_regret_bound(1.0, 1.0, 0.0, [-1.0])
    with pytest.raises(ValueError):
        solo_regret_bound(1.0, 1.0, 0.0, [math.nan], 1)


# --- scalar inequality checkers -----------------------------------------------------


def test_min_term_hand_example_to_1e9():
    rep = min_term_inequality_check(1.0, [1.0, 1.0])
    assert rep.observed == pytest.approx(2.0, abs=1e-9)
    assert rep.bound == pytest.approx(3.5 + 3.5 * math.sqrt(2.0), abs=1e-9)
    assert rep.bound == pytest.approx(8.4497, abs=1e-4)
    assert rep.passed


def test_min_term_all_zeros():
    rep = min_term_inequality_check(1.0, [0.0, 0.0, 0.0])
    assert rep.observed == 0.0 and rep.bound == 0.0 and rep.passed


def test_min_term_first_round_takes_cap_branch():
    # with an empty prefix the ratio is +inf, so the cap branch must win
    rep = min_term_inequality_check(0.5, [2.0])
    assert rep.observed == 1.0  # 0.5 * 2.0, not 2^2/0


def test_min_term_zero_cap():
    rep = min_term_inequality_check(0.0, [1.0, 1.0])
    assert rep.observed == pytest.approx(min(1.0 / 1.0, 0.0) + 0.0)
    assert rep.passed


def test_min_term_random_and_spiky_profiles():
    rng = np.random.default_rng(1)
    for _ in range(2000):
        a = np.abs(rng.normal(size=rng.integers(1, 50))) * 10 ** rng.uniform(-3, 3)
        if rng.random() < 0.3:
            a[rng.integers(a.size)] = 1e6
        cap = abs(rng.normal()) * 10 ** rng.uniform(-3, 3)
        assert min_term_inequality_check(cap, a).passed


def test_sqrt_sum_frozen_example():
    rep = sqrt_sum_check([1.0, 1.0, 1.0, 1.0])
    expected = 1.0 + 1.0 / math.sqrt(2.0) + 1.0 / math.sqrt(3.0) + 0.5
    assert rep.observed == pytest.approx(expected, rel=1e-12)
    assert rep.observed == pytest.approx(2.7845, abs=1e-4)
    assert rep.bound == 4.0 and rep.passed


def test_sqrt_sum_single_entry():
    rep = sqrt_sum_check([1.0])
    assert rep.observed == 1.0 and rep.bound == 2.0 and rep.passed


def test_sqrt_sum_requires_positive_start():
    with pytest.raises(ValueError):
        sqrt_sum_check([0.0, 1.0])
    with pytest.raises(ValueError):
        sqrt_sum_check([])


def test_sqrt_sum_random_and_spiky_profiles():
    rng = np.random.default_rng(2)
    for _ in range(2000):
        a = np.abs(rng.normal(size=rng.integers(1, 50))) * 10 ** rng.uniform(-3, 3)
        a[0] = max(a[0], 1e-6)
        if rng.random() < 0.3:
            a[rng.integers(a.size)] = 1e6
        assert sqrt_sum_check(a).passed


# --- generic schedule bound -----------------------------------------------------------


def entropy(dim, scale=1.0):
    return ShiftedNegativeEntropy(Simplex(dim), scale)


def test_schedule_bound_zero_losses_reduces_to_final_regularizer():
    reg = entropy(3, scale=2.0)
    u = np.array([0.2, 0.3, 0.5])
    rhs = generic_ftrl_regret_bound(reg, [0.0, 0.0, 1.5], [np.zeros(3), np.zeros(3)], u)
    assert rhs == pytest.approx(1.5 * reg.value(u), rel=1e-12)


def test_schedule_bound_single_round_frozen_example():
    reg = entropy(2)
    losses = [np.array([1.0, 0.0])]
    u = np.array([0.0, 1.0])
    rhs = generic_ftrl_regret_bound(reg, [0.0, 1.0], losses, u)
    # R_2(u) + B-limit-term - support(-L_1) + R_2*(-L_1), evaluated by hand
    expected = math.log(2.0) + 0.5 - 0.0 + (math.log(1 + math.exp(-1.0)) - math.log(2.0))
    assert rhs == pytest.approx(expected, rel=1e-12)
    assert rhs >= 0.5  # dominates the observed single-round regret


def test_schedule_bound_dominates_regret_for_both_schemes():
    rng = np.random.default_rng(3)
    for _ in range(20):
        dim = int(rng.integers(2, 5))
        reg = entropy(dim) if rng.random() < 0.5 else HalfSquaredDistance(
            L2Ball(rng.normal(size=dim), 1.0)
        )
        losses = rng.normal(size=(15, dim)) * 10 ** rng.uniform(-1, 1)
        for make in (lambda: AdaFTRL(reg), lambda: SoloFTRL(reg)):
            trace = run(make(), losses)
            multipliers = [0.0] + [r.scheme_scalar for r in trace]
            total = losses.sum(axis=0)
            for _ in range(10):
                u = reg.set.sample(rng)
                regret = trace[-1].cum_loss - float(np.dot(total, u))
                rhs = generic_ftrl_regret_bound(reg, multipliers, losses, u)
                assert regret <= rhs + 1e-8 * max(1.0, abs(rhs))


def test_schedule_bound_bregman_sum_matches_delta():
    rng = np.random.default_rng(4)
    reg = entropy(3)
    losses = rng.normal(size=(20, 3))
    trace = run(AdaFTRL(reg), losses)
    deltas = [0.0] + [r.scheme_scalar for r in trace]
    total, cum, prev = 0.0, np.zeros(3), np.zeros(3)
    for t, l in enumerate(losses):
        cum = cum + l
        total += scaled_bregman(reg, deltas[t], -cum, -prev)
        prev = cum.copy()
    assert total == pytest.approx(deltas[-1], rel=1e-8)


def test_schedule_bound_validates_inputs():
    reg = entropy(2)
    with pytest.raises(ValueError):
        generic_ftrl_regret_bound(reg, [0.0], [np.array([1.0, 0.0])], np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        generic_ftrl_regret_bound(reg, [0.0, -1.0], [np.array([1.0, 0.0])], np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        # infeasible comparator
        generic_ftrl_regret_bound(reg, [0.0, 1.0], [np.array([1.0, 0.0])], np.array([2.0, 0.0]))


def test_schedule_bound_fixed_multiplier_matches_direct_evaluation():
    reg = HalfSquaredDistance(FullSpace(2))
    losses = [np.array([1.0, 0.0]), np.array([0.0, -2.0])]
    u = np.array([0.5, 0.5])
    m = 2.0
    rhs = generic_ftrl_regret_bound(reg, [m, m, m], losses, u)
    # hand evaluation: conjugate of m*0.5||w||^2 is ||l||^2/(2m)
    sq = lambda v: float(np.dot(v, v))
    L1v = losses[0]
    L2v = losses[0] + losses[1]
    expected = (
        m * 0.5 * sq(u)
        + 0.0
        + (sq(L1v) / (2 * m) - 0.0 - 0.0)  # B(-L1, 0)
        + (sq(L2v - L1v) / (2 * m))  # B(-L2, -L1)
    )
    assert rhs == pytest.approx(expected, rel=1e-12)
