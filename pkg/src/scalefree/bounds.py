"""Regret-bound right-hand sides and proof-side inequality checkers.

All expressions here are computed from loss dual norms (never from learner
internals), so they independently cross-check a learner's own adaptivity
accounting.  Every bound is positively homogeneous of degree one under loss
scaling.
"""

import math
from dataclasses import dataclass

import numpy as np

from .geometry import UnboundedError, support_value
from .regularizers import Regularizer, scaled_bregman

# constants kept in exact form where one exists; 5.3 and 13.3 are the
# rounded-up constants of the optimized bounds
SQRT3 = math.sqrt(3.0)
ADAFTRL_OPTIMIZED_CONSTANT = 5.3
ADAFTRL_OPTIMIZED_SCALE_FRACTION = 1.0 / 16.0
SOLO_OPTIMIZED_CONSTANT = 13.3
SOLO_OPTIMIZED_SCALE_NUMERATOR = math.sqrt(2.75)
LOWER_BOUND_FACTOR = 1.0 / math.sqrt(8.0)


@dataclass
class BoundReport:
    """An observed quantity compared against a bound it must not exceed."""

    name: str
    observed: float
    bound: float

    @property
    def slack(self) -> float:
        return self.bound - self.observed

    @property
    def passed(self) -> bool:
        return self.slack >= -1e-8 * max(1.0, abs(self.bound))

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        return (
            f"[{status}] {self.name}: observed={self.observed:.6g} "
            f"bound={self.bound:.6g} slack={self.slack:.3g}"
        )


def _norm_stats(loss_norms):
    a = np.asarray(loss_norms, dtype=float)
    if a.ndim != 1 or np.any(a < 0) or not np.all(np.isfinite(a)):
        raise ValueError("loss norms must be a finite non-negative vector")
    total = float(np.sum(a * a))
    peak = float(np.max(a)) if a.size else 0.0
    return a, math.sqrt(total), peak


def adaftrl_regret_bound(diameter: float, modulus: float, reg_at_comparator: float, loss_norms) -> float:
    """sqrt(3) * max(D, 1/sqrt(2*lambda)) * sqrt(sum of squared norms) * (1 + R(u))."""
    if not math.isfinite(diameter):
        raise UnboundedError("the Bregman-gap scheme's bound needs a bounded set")
    if not (modulus > 0):
        raise ValueError(f"modulus must be positive, got {modulus}")
    if reg_at_comparator < 0:
        raise ValueError("the regularizer is non-negative on its set")
    _, root_sum, _ = _norm_stats(loss_norms)
    return SQRT3 * max(diameter, 1.0 / math.sqrt(2.0 * modulus)) * root_sum * (1.0 + reg_at_comparator)


def adaftrl_optimized_scale(sup_value: float) -> float:
    """Scale making the Bregman-gap scheme's optimized bound hold: 1/(16 * sup f)."""
    if not (sup_value > 0):
        raise ValueError(f"supremum must be positive, got {sup_value}")
    return ADAFTRL_OPTIMIZED_SCALE_FRACTION / sup_value


def adaftrl_optimized_bound(sup_value: float, loss_norms) -> float:
    """5.3 * sqrt(sup f * sum of squared norms), for the 1/(16 sup f) scaling."""
    if not (sup_value > 0):
        raise ValueError(f"supremum must be positive, got {sup_value}")
    _, root_sum, _ = _norm_stats(loss_norms)
    return ADAFTRL_OPTIMIZED_CONSTANT * math.sqrt(sup_value) * root_sum


def solo_regret_bound(diameter: float, modulus: float, reg_at_comparator: float, loss_norms, rounds: int) -> float:
    """(R(u) + 2.75/lambda) * sqrt(sum sq norms) + 3.5 * min(sqrt(T-1)/lambda, D) * max norm.

    Valid for unbounded sets: with an infinite diameter the min resolves to
    its first argument.
    """
    if not (modulus > 0):
        raise ValueError(f"modulus must be positive, got {modulus}")
    if reg_at_comparator < 0:
        raise ValueError("the regularizer is non-negative on its set")
    _, root_sum, peak = _norm_stats(loss_norms)
    first = (reg_at_comparator + 2.75 / modulus) * root_sum
    second = 3.5 * min(math.sqrt(max(rounds - 1, 0)) / modulus, diameter) * peak
    return first + second


def solo_optimized_scale(sup_value: float) -> float:
    """Scale making the root-sum scheme's optimized bound hold: sqrt(2.75)/sqrt(sup f)."""
    if not (sup_value > 0):
        raise ValueError(f"supremum must be positive, got {sup_value}")
    return SOLO_OPTIMIZED_SCALE_NUMERATOR / math.sqrt(sup_value)


def solo_optimized_bound(sup_value: float, loss_norms) -> float:
    """13.3 * sqrt(sup f * sum of squared norms), for the sqrt(2.75)/sqrt(sup f) scaling."""
    if not (sup_value > 0):
        raise ValueError(f"supremum must be positive, got {sup_value}")
    _, root_sum, _ = _norm_stats(loss_norms)
    return SOLO_OPTIMIZED_CONSTANT * math.sqrt(sup_value) * root_sum


def lower_bound_value(diameter: float, loss_norms) -> float:
    """D/sqrt(8) * sqrt(sum of squared norms): the floor no algorithm can beat in expectation."""
    if not math.isfinite(diameter):
        raise ValueError("the lower-bound expression needs a finite diameter")
    _, root_sum, _ = _norm_stats(loss_norms)
    return LOWER_BOUND_FACTOR * diameter * root_sum


def min_term_inequality_check(cap: float, norms) -> BoundReport:
    """Check sum_t min(a_t^2 / sqrt(prefix before t), cap * a_t) <= 3.5*cap*max + 3.5*sqrt(sum).

    The first round's prefix sum is empty: a_1^2 / 0 is treated as +inf, so
    the min takes the cap branch there (a naive evaluation produces NaN).
    """
    if cap < 0:
        raise ValueError(f"cap must be non-negative, got {cap}")
    a, root_sum, peak = _norm_stats(norms)
    lhs = 0.0
    prefix = 0.0
    for at in a:
        if at > 0.0:
            if prefix == 0.0:
                lhs += cap * at
            else:
                lhs += min(at * at / math.sqrt(prefix), cap * at)
        prefix += at * at
    rhs = 3.5 * cap * peak + 3.5 * root_sum
    return BoundReport("min_term_inequality", lhs, rhs)


def sqrt_sum_check(norms) -> BoundReport:
    """Check sum_t a_t / sqrt(prefix through t) <= 2 * sqrt(sum a_t) for a_1 > 0."""
    a, _, _ = _norm_stats(norms)
    if a.size == 0 or a[0] <= 0:
        raise ValueError("the running-root inequality requires a positive first entry")
    prefix = np.cumsum(a)
    lhs = float(np.sum(a / np.sqrt(prefix)))
    rhs = 2.0 * math.sqrt(float(prefix[-1]))
    return BoundReport("sqrt_sum_inequality", lhs, rhs)


def _conjugate_at(reg: Regularizer, multiplier: float, loss) -> float:
    """Conjugate value of multiplier * R, extended to a vanishing multiplier.

    At multiplier 0 the conjugate of the zero function on the set is the
    set's support function.
    """
    if multiplier > 0:
        return reg.scaled(multiplier).conjugate_value(loss)
    return support_value(reg.set, loss)


def generic_ftrl_regret_bound(reg: Regularizer, multipliers, losses, comparator) -> float:
    """Regret upper bound of varying-weight FTRL for an explicit multiplier schedule.

    `multipliers` holds m_1 .. m_{T+1}, where round t uses the regularizer
    m_t * R; entries may be zero (the vanishing-weight machinery is exact).
    Evaluates, against the comparator u:

        m_{T+1} R(u) + (m_1 R)*(0)
        + sum_t [ B_{(m_t R)*}(-L_t, -L_{t-1}) - (m_t R)*(-L_t) + (m_{t+1} R)*(-L_t) ]
    """
    losses = [reg.set.check_vector(l) for l in losses]
    multipliers = [float(m) for m in multipliers]
    if len(multipliers) != len(losses) + 1:
        raise ValueError(
            f"need {len(losses) + 1} multipliers for {len(losses)} rounds, got {len(multipliers)}"
        )
    if any(m < 0 for m in multipliers):
        raise ValueError("multipliers must be non-negative")
    comparator = reg.set.check_vector(comparator)
    zero = np.zeros(reg.set.dim)
    total = multipliers[-1] * reg.value(comparator) + _conjugate_at(reg, multipliers[0], zero)
    cum = zero
    for t, loss in enumerate(losses):
        prev = cum
        cum = cum + loss
        m_now, m_next = multipliers[t], multipliers[t + 1]
        total += scaled_bregman(reg, m_now, -cum, -prev)
        total += _conjugate_at(reg, m_next, -cum) - _conjugate_at(reg, m_now, -cum)
    return total
