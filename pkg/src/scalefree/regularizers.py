"""Strongly convex regularizers with exact Fenchel-conjugate machinery.

Each regularizer is a positive multiple c*f of a base function f that is
1-strongly convex with respect to its set's primal norm and non-negative on
the set.  Conjugate values, conjugate gradients, conjugate Bregman
divergences, and the vanishing-weight Bregman limit are all closed-form.
Instances are immutable; all operations are pure.
"""

import math

import numpy as np

from .geometry import (
    L1,
    L2,
    Box,
    DecisionSet,
    FullSpace,
    L2Ball,
    ProductSet,
    Simplex,
    UnboundedError,
    _l2,
    argmin_indices,
)

FEASIBILITY_TOL = 1e-9


class Regularizer:
    """Base class: a scaled strongly convex function bound to a decision set.

    `scale` is the multiplier c > 0; the deployed strong-convexity modulus
    with respect to the set's primal norm is `modulus` = c (base functions
    have modulus 1).
    """

    def __init__(self, decision_set: DecisionSet, scale: float = 1.0):
        if not (scale > 0):
            raise ValueError(f"regularizer scale must be positive, got {scale}")
        self.set = decision_set
        self.scale = float(scale)

    @property
    def modulus(self) -> float:
        return self.scale

    def scaled(self, multiplier: float) -> "Regularizer":
        """A copy whose scale is multiplied by `multiplier` > 0."""
        if not (multiplier > 0):
            raise ValueError(f"scale multiplier must be positive, got {multiplier}")
        return self._rebuild(self.scale * multiplier)

    def _rebuild(self, scale):
        raise NotImplementedError

    def _feasible(self, w) -> np.ndarray:
        w = self.set.check_vector(w)
        if not self.set.contains(w, FEASIBILITY_TOL):
            raise ValueError("point lies outside the regularizer's decision set")
        return w

    def value(self, w) -> float:
        raise NotImplementedError

    def sup_value(self) -> float:
        """Supremum of the deployed function over its (bounded) set."""
        raise NotImplementedError

    def conjugate_value(self, loss) -> float:
        """sup over the set of <loss, w> - c*f(w)."""
        raise NotImplementedError

    def conjugate_grad(self, loss) -> np.ndarray:
        """The unique minimizer over the set of c*f(w) - <loss, w>."""
        raise NotImplementedError

    def bregman_conjugate(self, x, y) -> float:
        """Bregman divergence of the conjugate between dual points x and y."""
        x = self.set.check_vector(x)
        y = self.set.check_vector(y)
        g = self.conjugate_grad(y)
        v = self.conjugate_value(x) - self.conjugate_value(y) - float(np.dot(x - y, g))
        # non-negative by convexity of the conjugate; clamp rounding residue
        return max(v, 0.0)


class ShiftedNegativeEntropy(Regularizer):
    """ln(d) + sum_i w_i ln w_i on the probability simplex.

    Zero at the uniform distribution, ln(d) at any vertex.  1-strongly convex
    with respect to the l1 norm, which the simplex must carry.
    """

    def __init__(self, decision_set: DecisionSet, scale: float = 1.0):
        if not isinstance(decision_set, Simplex):
            raise ValueError("the entropy regularizer requires a probability simplex")
        if decision_set.norm != L1:
            raise ValueError("the entropy regularizer requires the l1 norm pair")
        super().__init__(decision_set, scale)

    def __repr__(self):
        return f"ShiftedNegativeEntropy(dim={self.set.dim}, scale={self.scale})"

    def _rebuild(self, scale):
        return ShiftedNegativeEntropy(self.set, scale)

    def value(self, w):
        w = self._feasible(w)
        pos = w[w > 0.0]  # convention 0*ln(0) = 0
        return self.scale * (math.log(self.set.dim) + float(np.sum(pos * np.log(pos))))

    def sup_value(self):
        return self.scale * math.log(self.set.dim)

    def conjugate_value(self, loss):
        z = self.set.check_vector(loss) / self.scale
        m = float(np.max(z))  # shift keeps exp finite for huge dual vectors
        lse = m + math.log(float(np.sum(np.exp(z - m))))
        return self.scale * (lse - math.log(self.set.dim))

    def conjugate_grad(self, loss):
        z = self.set.check_vector(loss) / self.scale
        e = np.exp(z - np.max(z))
        return e / float(np.sum(e))


class HalfSquaredDistance(Regularizer):
    """0.5 * ||w - center||_2^2 over any decision set with the l2 norm pair."""

    def __init__(self, decision_set: DecisionSet, center=None, scale: float = 1.0):
        if decision_set.norm != L2:
            raise ValueError("the half-squared-distance regularizer requires the l2 norm pair")
        if center is None:
            center = np.zeros(decision_set.dim)
        center = decision_set.check_vector(center)
        super().__init__(decision_set, scale)
        self.center = center

    def __repr__(self):
        return f"HalfSquaredDistance(dim={self.set.dim}, scale={self.scale})"

    def _rebuild(self, scale):
        return HalfSquaredDistance(self.set, self.center, scale)

    def value(self, w):
        w = self._feasible(w)
        d = w - self.center
        return self.scale * 0.5 * float(np.dot(d, d))

    def sup_value(self):
        return self.scale * 0.5 * _max_sq_dist(self.set, self.center)

    def conjugate_value(self, loss):
        loss = self.set.check_vector(loss)
        p = self.set.project(self.center + loss / self.scale)
        d = p - self.center
        return float(np.dot(loss, p)) - self.scale * 0.5 * float(np.dot(d, d))

    def conjugate_grad(self, loss):
        loss = self.set.check_vector(loss)
        return self.set.project(self.center + loss / self.scale)


def _max_sq_dist(K: DecisionSet, center: np.ndarray) -> float:
    """max over the set of ||w - center||_2^2 (a convex max: attained at extremes)."""
    if isinstance(K, Simplex):
        sq = float(np.dot(center, center))
        # vertices e_i: ||e_i - center||^2 = ||center||^2 - 2 center_i + 1
        return sq - 2.0 * float(np.min(center)) + 1.0
    if isinstance(K, L2Ball):
        return (float(np.linalg.norm(K.center - center)) + K.radius) ** 2
    if isinstance(K, Box):
        lo = (K.lower - center) ** 2
        hi = (K.upper - center) ** 2
        return float(np.sum(np.maximum(lo, hi)))
    if isinstance(K, ProductSet):
        return sum(
            _max_sq_dist(f, c) for f, c in zip(K.factors, K.split(center))
        )
    raise UnboundedError("squared distance is unbounded on this set")


def tie_broken_linear_minimizer(reg: Regularizer, loss_total) -> np.ndarray:
    """Among minimizers of <loss_total, w> over the set, the one minimizing the regularizer.

    Equals the limit of the FTRL prediction as the regularization weight
    shrinks to zero; unique by strong convexity.  With loss_total = 0 this is
    the minimizer of the regularizer itself.
    """
    K = reg.set
    loss_total = K.check_vector(loss_total)
    if isinstance(reg, ShiftedNegativeEntropy):
        idx = argmin_indices(loss_total)
        w = np.zeros(K.dim)
        w[idx] = 1.0 / idx.size
        return w
    if isinstance(reg, HalfSquaredDistance):
        return _face_projection(K, loss_total, reg.center)
    raise TypeError(f"no tie-breaking rule for regularizer {reg!r}")


def _face_projection(K: DecisionSet, loss_total: np.ndarray, center: np.ndarray) -> np.ndarray:
    """Euclidean projection of `center` onto the face of K minimizing <loss_total, .>."""
    if isinstance(K, Simplex):
        idx = argmin_indices(loss_total)
        face = Simplex(idx.size, norm=K.norm)
        w = np.zeros(K.dim)
        w[idx] = face.project(center[idx])
        return w
    if isinstance(K, L2Ball):
        n = _l2(loss_total)
        if n == 0.0:
            return K.project(center)
        return K.center - (K.radius / n) * loss_total
    if isinstance(K, Box):
        tol = 1e-12 * max(1.0, float(np.max(np.abs(loss_total))))
        w = np.clip(center, K.lower, K.upper)
        w = np.where(loss_total > tol, K.lower, w)
        w = np.where(loss_total < -tol, K.upper, w)
        return w
    if isinstance(K, FullSpace):
        if np.any(loss_total != 0.0):
            raise UnboundedError("linear objective is unbounded below on the full space")
        return center.copy()
    if isinstance(K, ProductSet):
        parts = [
            _face_projection(f, l, c)
            for f, l, c in zip(K.factors, K.split(loss_total), K.split(center))
        ]
        return np.concatenate(parts)
    raise ValueError(f"unknown set kind: {K!r}")


def scaled_bregman(reg: Regularizer, a: float, x, y) -> float:
    """a * (conjugate Bregman divergence between x/a and y/a), extended to a = 0.

    For a > 0 this equals the conjugate Bregman divergence of the regularizer
    rescaled by a.  At a = 0 it is the exact limit <x, u - v> where u and v
    are the tie-broken linear minimizers against -x and -y; the limit exists
    only on bounded sets.
    """
    x = reg.set.check_vector(x)
    y = reg.set.check_vector(y)
    if a < 0:
        raise ValueError(f"scaling must be non-negative, got {a}")
    if a == 0:
        if not reg.set.is_bounded():
            raise UnboundedError(
                "the vanishing-weight Bregman limit requires a bounded set"
            )
        u = tie_broken_linear_minimizer(reg, -x)
        v = tie_broken_linear_minimizer(reg, -y)
        return max(float(np.dot(x, u - v)), 0.0)
    return a * reg.bregman_conjugate(x / a, y / a)
