import math

import numpy as np
import pytest

from scalefree.adversaries import (
    GaussianAdversary,
    LowerBoundAdversary,
    ReplayAdversary,
    SpikyAdversary,
    generate,
    khinchin_check,
    khinchin_monte_carlo,
    rademacher_signs,
    scale_losses,
)
from scalefree.geometry import Box, FullSpace, L2Ball, Simplex, UnboundedError


def test_replay_is_verbatim():
    losses = np.array([[1.0, 0.0], [0.5, -0.5]])
    adv = ReplayAdversary(losses)
    out = generate(adv, seed=123)
    assert np.array_equal(out, losses)
    out[0, 0] = 99.0  # the generated copy must not alias the stored sequence
    assert adv.losses[0, 0] == 1.0


def test_replay_validation():
    with pytest.raises(ValueError):
        ReplayAdversary(np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        ReplayAdversary(np.array([[np.inf, 0.0]]))


def test_rademacher_signs_deterministic_and_pm_one():
    a = rademacher_signs(7, 100)
    b = rademacher_signs(7, 100)
    assert np.array_equal(a, b)
    assert set(np.unique(a)) <= {-1.0, 1.0}
    assert not np.array_equal(a, rademacher_signs(8, 100))


def test_gaussian_deterministic_given_seed():
    adv = GaussianAdversary(3, 2.0, 10)
    assert np.array_equal(adv.generate(5), adv.generate(5))
    assert not np.array_equal(adv.generate(5), adv.generate(6))
    assert adv.generate(5).shape == (10, 3)


def test_spiky_has_one_huge_round():
    adv = SpikyAdversary(4, 20, spike_magnitude=1e6, spike_round=7)
    losses = adv.generate(0)
    norms = np.linalg.norm(losses, axis=1)
    assert norms[6] == pytest.approx(1e6, rel=1e-12)
    assert np.max(np.delete(norms, 6)) < 1e2


def test_spiky_validation():
    with pytest.raises(ValueError):
        SpikyAdversary(2, 10, 1e6, 0)
    with pytest.raises(ValueError):
        SpikyAdversary(2, 10, -1.0, 5)


# --- sign adversary ------------------------------------------------------------


def test_sign_adversary_simplex_structure():
    K = Simplex(2)
    adv = LowerBoundAdversary(K, np.array([1.0, 1.0]))
    # the direction pairs the first two vertices at l1 distance 2
    assert np.array_equal(adv.x, [1.0, 0.0])
    assert np.array_equal(adv.y, [0.0, 1.0])
    assert float(np.dot(adv.direction, adv.x - adv.y)) == K.diameter() == 2.0
    assert K.dual_norm(adv.direction) == 1.0
    losses = adv.generate(seed=42)
    assert losses.shape == (2, 2)
    for row in losses:
        assert tuple(row) in {(1.0, -1.0), (-1.0, 1.0)}


def test_sign_adversary_exact_dual_norms():
    rng = np.random.default_rng(0)
    sets = [
        Simplex(3),
        L2Ball(rng.normal(size=3), 1.7),
        Box(np.array([-1.0, 0.0]), np.array([2.0, 0.5])),
    ]
    for K in sets:
        norms = np.abs(rng.normal(size=20)) * 10 ** rng.uniform(-2, 2, size=20)
        adv = LowerBoundAdversary(K, norms)
        losses = adv.generate(seed=11)
        for t, l in enumerate(losses):
            assert K.dual_norm(l) == norms[t]  # exact, not approximate
        # the direction achieves the diameter exactly
        assert float(np.dot(adv.direction, adv.x - adv.y)) == K.diameter()
        assert K.dual_norm(adv.direction) == 1.0


def test_sign_adversary_zero_norms_give_zero_losses():
    adv = LowerBoundAdversary(Simplex(2), np.zeros(4))
    assert np.array_equal(adv.generate(3), np.zeros((4, 2)))


def test_sign_adversary_reproducible():
    adv = LowerBoundAdversary(Simplex(2), np.ones(16))
    assert np.array_equal(adv.generate(9), adv.generate(9))
    assert not np.array_equal(adv.generate(9), adv.generate(10))


def test_sign_adversary_rejects_unbounded_and_bad_norms():
    with pytest.raises(UnboundedError):
        LowerBoundAdversary(FullSpace(2), np.ones(3))
    with pytest.raises(ValueError):
        LowerBoundAdversary(Simplex(2), np.array([1.0, -1.0]))


# --- loss scaling ----------------------------------------------------------------


def test_scale_losses_examples():
    losses = np.array([[1.0, 0.0]])
    assert np.array_equal(scale_losses(losses, 1.0), losses)
    assert np.array_equal(scale_losses(losses, 2.0), [[2.0, 0.0]])
    with pytest.raises(ValueError):
        scale_losses(losses, 0.0)
    with pytest.raises(ValueError):
        scale_losses(losses, -1.0)


def test_scale_losses_scales_dual_norms_exactly_by_powers_of_two():
    K = Simplex(3)
    rng = np.random.default_rng(1)
    losses = rng.normal(size=(10, 3))
    scaled = scale_losses(losses, 2.0)
    for l, s in zip(losses, scaled):
        assert K.dual_norm(s) == 2.0 * K.dual_norm(l)


def test_scale_losses_norm_homogeneity_general_constant():
    K = L2Ball(np.zeros(2), 1.0)
    rng = np.random.default_rng(2)
    losses = rng.normal(size=(10, 2))
    c = 3.7
    for l, s in zip(losses, scale_losses(losses, c)):
        assert K.dual_norm(s) == pytest.approx(c * K.dual_norm(l), rel=1e-15)


# --- signed-sum Monte Carlo --------------------------------------------------------


def test_khinchin_single_entry_is_exact():
    assert khinchin_monte_carlo([1.0], trials=10, seed=0) == 1.0
    assert khinchin_monte_carlo([2.5], trials=10, seed=1) == 2.5


def test_khinchin_all_zeros():
    assert khinchin_monte_carlo([0.0, 0.0, 0.0], trials=100, seed=0) == 0.0


def test_khinchin_two_units_enumerated_oracle():
    # oracle: enumerate the four sign patterns of (Z1 + Z2)
    patterns = [s1 + s2 for s1 in (-1, 1) for s2 in (-1, 1)]
    exact = np.mean(np.abs(patterns))
    assert exact == 1.0  # frozen
    est = khinchin_monte_carlo([1.0, 1.0], trials=200_000, seed=3)
    assert est == pytest.approx(exact, abs=0.01)
    # the classical floor holds with equality here: sqrt(2)/sqrt(2) = 1
    assert exact >= math.sqrt(2.0) / math.sqrt(2.0) - 1e-15


def test_khinchin_floor_on_random_profiles():
    rng = np.random.default_rng(4)
    for i in range(20):
        a = np.abs(rng.normal(size=rng.integers(1, 30))) * 10 ** rng.uniform(-2, 2)
        est, se, target = khinchin_check(a, trials=20_000, seed=100 + i)
        assert est >= target - 3.0 * se


def test_khinchin_requires_trials():
    with pytest.raises(ValueError):
        khinchin_monte_carlo([1.0], trials=0, seed=0)
