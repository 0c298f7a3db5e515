"""Loss-sequence generators: replay, random streams, and the diameter-aligned sign adversary.

Generators are pure given (spec, seed).  Random draws come from the
counter-based Philox generator, so a seed fully determines a sequence and
parallel consumers never share streams.
"""

import math

import numpy as np

from .geometry import Box, DecisionSet, L2Ball, Simplex, UnboundedError


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.uint64(seed)))


def rademacher_signs(seed: int, shape) -> np.ndarray:
    """Independent uniform +/-1 draws, deterministic in (seed, shape)."""
    g = _generator(seed)
    return (2 * g.integers(0, 2, size=shape, dtype=np.int8) - 1).astype(float)


class ReplayAdversary:
    """Plays back a fixed loss sequence verbatim."""

    def __init__(self, losses):
        losses = np.asarray(losses, dtype=float)
        if losses.ndim != 2:
            raise ValueError("replay losses must be a (rounds, dim) array")
        if not np.all(np.isfinite(losses)):
            raise ValueError("replay losses must be finite")
        self.losses = losses
        self.rounds = losses.shape[0]
        self.dim = losses.shape[1]

    def generate(self, seed: int = 0) -> np.ndarray:
        return self.losses.copy()


class GaussianAdversary:
    """Independent N(0, sigma^2) coordinates each round."""

    def __init__(self, dim: int, sigma: float, rounds: int):
        if dim < 1 or rounds < 0:
            raise ValueError("need dim >= 1 and rounds >= 0")
        if not (sigma > 0):
            raise ValueError(f"sigma must be positive, got {sigma}")
        self.dim = int(dim)
        self.sigma = float(sigma)
        self.rounds = int(rounds)

    def generate(self, seed: int = 0) -> np.ndarray:
        g = _generator(seed)
        return g.normal(0.0, self.sigma, size=(self.rounds, self.dim))

class SpikyAdversary:
    """Unit-scale gaussian losses with a single round of far larger norm.

    Exercises the max-norm term of adaptive regret bounds: one round's loss
    is rescaled to l2 norm `spike_magnitude` (>> 1).
    """

    def __init__(self, dim: int, rounds: int, spike_magnitude: float, spike_round: int):
        if dim < 1 or rounds < 1:
            raise ValueError("need dim >= 1 and rounds >= 1")
        if not (spike_magnitude > 0):
            raise ValueError("spike magnitude must be positive")
        if not (1 <= spike_round <= rounds):
            raise ValueError(f"spike round must lie in 1..{rounds}, got {spike_round}")
        self.dim = int(dim)
        self.rounds = int(rounds)
        self.spike_magnitude = float(spike_magnitude)
        self.spike_round = int(spike_round)

    def generate(self, seed: int = 0) -> np.ndarray:
        g = _generator(seed)
        losses = g.normal(0.0, 1.0, size=(self.rounds, self.dim))
        row = losses[self.spike_round - 1]
        n = float(np.linalg.norm(row))
        if n == 0.0:
            row = np.zeros(self.dim)
            row[0] = 1.0
            n = 1.0
        losses[self.spike_round - 1] = row * (self.spike_magnitude / n)
        return losses


class LowerBoundAdversary:
    """Random-sign losses along a fixed diameter-achieving direction.

    For a bounded set, picks a pair (x, y) at primal distance equal to the
    diameter and a dual direction of unit dual norm with <direction, x - y>
    equal to the diameter, then emits sign_t * a_t * direction.  The dual
    norm of round t's loss is exactly a_t.
    """

    def __init__(self, decision_set: DecisionSet, norms):
        norms = np.asarray(norms, dtype=float)
        if norms.ndim != 1 or not np.all(np.isfinite(norms)) or np.any(norms < 0):
            raise ValueError("norm profile must be a finite non-negative vector")
        self.set = decision_set
        self.norms = norms
        self.rounds = norms.size
        self.dim = decision_set.dim
        self.x, self.y, self.direction = _diameter_pair(decision_set)

    def generate(self, seed: int = 0) -> np.ndarray:
        signs = rademacher_signs(seed, self.rounds)
        return (signs * self.norms)[:, None] * self.direction[None, :]


def _diameter_pair(K: DecisionSet):
    """A fixed (x, y, direction) with ||x-y|| = diameter, ||direction||_* = 1,
    and <direction, x - y> = diameter."""
    if isinstance(K, Simplex):
        if K.dim < 2:
            raise ValueError("the sign adversary needs a simplex of dimension >= 2")
        x = np.zeros(K.dim)
        y = np.zeros(K.dim)
        x[0] = 1.0
        y[1] = 1.0
        direction = np.zeros(K.dim)
        direction[0] = 1.0
        direction[1] = -1.0
        return x, y, direction
    if isinstance(K, L2Ball):
        axis = np.zeros(K.dim)
        axis[0] = 1.0
        return K.center + K.radius * axis, K.center - K.radius * axis, axis
    if isinstance(K, Box):
        sides = K.upper - K.lower
        j = int(np.argmax(sides))
        direction = np.zeros(K.dim)
        direction[j] = 1.0
        return K.upper.copy(), K.lower.copy(), direction
    if not K.is_bounded():
        raise UnboundedError("the sign adversary requires a bounded decision set")
    raise ValueError(f"no diameter-achieving pair is defined for {K!r}")


def generate(spec, seed: int = 0) -> np.ndarray:
    """Loss sequence for an adversary spec; deterministic given the seed."""
    return spec.generate(seed)


def scale_losses(losses, c: float) -> np.ndarray:
    """Every loss vector multiplied by the positive constant c."""
    if not (c > 0):
        raise ValueError(f"scaling constant must be positive, got {c}")
    return np.asarray(losses, dtype=float) * c


def khinchin_monte_carlo(norms, trials: int, seed: int = 0) -> float:
    """Monte Carlo estimate of E|sum_t sign_t * a_t| over independent signs."""
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    a = np.asarray(norms, dtype=float)
    signs = rademacher_signs(seed, (trials, a.size))
    return float(np.mean(np.abs(signs @ a)))


def khinchin_check(norms, trials: int, seed: int = 0):
    """(estimate, stderr, target) where the estimate should be >= target - 3*stderr.

    The target is the classical lower bound sqrt(sum a_t^2) / sqrt(2) on the
    expected absolute signed sum.
    """
    a = np.asarray(norms, dtype=float)
    signs = rademacher_signs(seed, (trials, a.size))
    samples = np.abs(signs @ a)
    estimate = float(np.mean(samples))
    stderr = float(np.std(samples) / math.sqrt(trials))
    target = math.sqrt(float(np.sum(a * a))) / math.sqrt(2.0)
    return estimate, stderr, target
