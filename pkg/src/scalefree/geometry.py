"""Decision sets and norm machinery for online linear optimization.

Every set is immutable after construction and every operation here is a pure
function of its inputs, so unrestricted concurrent use is safe.
"""

import math

import numpy as np

L1 = "l1"
L2 = "l2"
LINF = "linf"

_DUAL = {L1: LINF, L2: L2, LINF: L1}


class UnboundedError(ValueError):
    """Raised when an operation needs a bounded set or objective and has none."""


def dual_kind(kind: str) -> str:
    """Dual norm kind: l1 and linf are dual to each other, l2 is self-dual."""
    try:
        return _DUAL[kind]
    except KeyError:
        raise ValueError(f"unknown norm kind {kind!r}; expected one of {sorted(_DUAL)}")


def norm_value(kind: str, v) -> float:
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("norm of a vector with non-finite coordinates")
    if kind == L1:
        return float(np.sum(np.abs(v)))
    if kind == L2:
        return _l2(v)
    if kind == LINF:
        return float(np.max(np.abs(v))) if v.size else 0.0
    raise ValueError(f"unknown norm kind {kind!r}")


def _l2(v: np.ndarray) -> float:
    n = float(np.linalg.norm(v))
    if math.isinf(n) and v.size:
        # rescale to survive coordinates beyond ~1e154
        peak = float(np.max(np.abs(v)))
        n = peak * float(np.linalg.norm(v / peak))
    return n


def primal_norm(kind: str, w) -> float:
    """Norm of a decision-space point under the primal norm `kind`."""
    return norm_value(kind, w)


def dual_norm(kind: str, loss) -> float:
    """Norm of a loss vector under the dual of the primal norm `kind`."""
    return norm_value(dual_kind(kind), loss)


def argmin_indices(values, rtol: float = 1e-12) -> np.ndarray:
    """Indices of all entries within rtol (relative to max(1, |min|)) of the minimum."""
    v = np.asarray(values, dtype=float)
    m = float(v.min())
    return np.nonzero(v <= m + rtol * max(1.0, abs(m)))[0]


class DecisionSet:
    """A non-empty closed convex set in R^d carrying a primal/dual norm pair."""

    dim: int
    norm: str

    def check_vector(self, v) -> np.ndarray:
        arr = np.asarray(v, dtype=float)
        if arr.shape != (self.dim,):
            raise ValueError(
                f"dimension mismatch: expected vector of shape ({self.dim},), got {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("vector has non-finite coordinates")
        return arr

    def primal_norm(self, w) -> float:
        return norm_value(self.norm, self.check_vector(w))

    def dual_norm(self, loss) -> float:
        return norm_value(dual_kind(self.norm), self.check_vector(loss))

    def is_bounded(self) -> bool:
        return math.isfinite(self.diameter())

    def linear_minimizer(self, loss_total) -> np.ndarray:
        """A point attaining min over the set of <loss_total, w>."""
        raise NotImplementedError

    def project(self, point) -> np.ndarray:
        """Euclidean projection onto the set."""
        raise NotImplementedError

    def diameter(self) -> float:
        """sup over u, v in the set of the primal-norm distance; +inf if unbounded."""
        raise NotImplementedError

    def contains(self, point, tol: float = 1e-9) -> bool:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """A random feasible point (distribution unspecified, support is the set)."""
        raise NotImplementedError


class Simplex(DecisionSet):
    """The probability simplex {w >= 0, sum w = 1} in R^d."""

    def __init__(self, dim: int, norm: str = L1):
        if dim < 1:
            raise ValueError(f"simplex dimension must be >= 1, got {dim}")
        dual_kind(norm)
        self.dim = int(dim)
        self.norm = norm

    def __repr__(self):
        return f"Simplex({self.dim}, norm={self.norm!r})"

    def linear_minimizer(self, loss_total):
        loss_total = self.check_vector(loss_total)
        w = np.zeros(self.dim)
        w[int(np.argmin(loss_total))] = 1.0  # argmin picks the lowest index on ties
        return w

    def project(self, point):
        p = self.check_vector(point)
        # projection is invariant to shifts along the all-ones direction;
        # shifting by the max keeps the threshold resolvable for huge inputs
        p = p - np.max(p)
        u = np.sort(p)[::-1]
        css = np.cumsum(u)
        ks = np.arange(1, self.dim + 1)
        thresh = (css - 1.0) / ks
        k = np.nonzero(u > thresh)[0][-1]
        return np.maximum(p - thresh[k], 0.0)

    def diameter(self):
        if self.dim == 1:
            return 0.0
        if self.norm == L1:
            return 2.0
        if self.norm == L2:
            return math.sqrt(2.0)
        return 1.0

    def contains(self, point, tol=1e-9):
        p = self.check_vector(point)
        return bool(np.all(p >= -tol) and abs(float(np.sum(p)) - 1.0) <= tol)

    def sample(self, rng):
        return rng.dirichlet(np.ones(self.dim))


class L2Ball(DecisionSet):
    """A closed Euclidean ball of positive radius."""

    def __init__(self, center, radius: float, norm: str = L2):
        center = np.asarray(center, dtype=float)
        if center.ndim != 1 or not np.all(np.isfinite(center)):
            raise ValueError("ball center must be a finite 1-d vector")
        if not (radius > 0):
            raise ValueError(f"ball radius must be positive, got {radius}")
        dual_kind(norm)
        self.center = center
        self.radius = float(radius)
        self.dim = center.size
        self.norm = norm

    def __repr__(self):
        return f"L2Ball(dim={self.dim}, radius={self.radius}, norm={self.norm!r})"

    def linear_minimizer(self, loss_total):
        loss_total = self.check_vector(loss_total)
        n = _l2(loss_total)
        if n == 0.0:
            return self.center.copy()
        return self.center - (self.radius / n) * loss_total

    def project(self, point):
        p = self.check_vector(point)
        d = p - self.center
        n = _l2(d)
        if n <= self.radius:
            return p.copy()
        return self.center + (self.radius / n) * d

    def diameter(self):
        if self.norm == L2:
            return 2.0 * self.radius
        if self.norm == L1:
            return 2.0 * self.radius * math.sqrt(self.dim)
        return 2.0 * self.radius

    def contains(self, point, tol=1e-9):
        p = self.check_vector(point)
        return float(np.linalg.norm(p - self.center)) <= self.radius + tol

    def sample(self, rng):
        direction = rng.normal(size=self.dim)
        n = float(np.linalg.norm(direction))
        if n == 0.0:
            return self.center.copy()
        r = self.radius * rng.random() ** (1.0 / self.dim)
        return self.center + (r / n) * direction


class Box(DecisionSet):
    """An axis-aligned box {lower <= w <= upper} (coordinatewise)."""

    def __init__(self, lower, upper, norm: str = LINF):
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError("box bounds must be 1-d vectors of equal length")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError("box bounds must be finite")
        if np.any(lower > upper):
            raise ValueError("box requires lower <= upper coordinatewise")
        dual_kind(norm)
        self.lower = lower
        self.upper = upper
        self.dim = lower.size
        self.norm = norm

    def __repr__(self):
        return f"Box(dim={self.dim}, norm={self.norm!r})"

    def linear_minimizer(self, loss_total):
        loss_total = self.check_vector(loss_total)
        # lower on zero coordinates keeps the choice deterministic
        return np.where(loss_total >= 0.0, self.lower, self.upper)

    def project(self, point):
        return np.clip(self.check_vector(point), self.lower, self.upper)

    def diameter(self):
        sides = self.upper - self.lower
        if self.norm == LINF:
            return float(np.max(sides))
        if self.norm == L1:
            return float(np.sum(sides))
        return float(np.linalg.norm(sides))

    def contains(self, point, tol=1e-9):
        p = self.check_vector(point)
        return bool(np.all(p >= self.lower - tol) and np.all(p <= self.upper + tol))

    def sample(self, rng):
        return rng.uniform(self.lower, self.upper)


class FullSpace(DecisionSet):
    """All of R^d."""

    def __init__(self, dim: int, norm: str = L2):
        if dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        dual_kind(norm)
        self.dim = int(dim)
        self.norm = norm

    def __repr__(self):
        return f"FullSpace({self.dim}, norm={self.norm!r})"

    def linear_minimizer(self, loss_total):
        loss_total = self.check_vector(loss_total)
        if np.any(loss_total != 0.0):
            raise UnboundedError(
                "linear objective is unbounded below on the full space"
            )
        return np.zeros(self.dim)

    def project(self, point):
        return self.check_vector(point).copy()

    def diameter(self):
        return math.inf

    def contains(self, point, tol=1e-9):
        self.check_vector(point)
        return True

    def sample(self, rng):
        return rng.normal(size=self.dim)


class ProductSet(DecisionSet):
    """A Cartesian product of decision sets over concatenated coordinates.

    The product carries the l2 norm over the concatenation by default; its
    diameter is defined for that norm only.
    """

    def __init__(self, factors, norm: str = L2):
        factors = tuple(factors)
        if not factors:
            raise ValueError("product of zero factors")
        for f in factors:
            if not isinstance(f, DecisionSet):
                raise ValueError(f"product factor is not a decision set: {f!r}")
        dual_kind(norm)
        self.factors = factors
        self.dim = sum(f.dim for f in factors)
        self.norm = norm
        bounds = np.cumsum([0] + [f.dim for f in factors])
        self._slices = [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:])]

    def __repr__(self):
        return f"ProductSet({list(self.factors)!r})"

    def split(self, v) -> list[np.ndarray]:
        v = self.check_vector(v)
        return [v[s] for s in self._slices]

    def linear_minimizer(self, loss_total):
        parts = self.split(loss_total)
        return np.concatenate([f.linear_minimizer(p) for f, p in zip(self.factors, parts)])

    def project(self, point):
        parts = self.split(point)
        return np.concatenate([f.project(p) for f, p in zip(self.factors, parts)])

    def diameter(self):
        if self.norm != L2:
            raise ValueError("product diameter is defined for the l2 norm only")
        return math.sqrt(sum(_l2_diameter(f) ** 2 for f in self.factors))

    def contains(self, point, tol=1e-9):
        parts = self.split(point)
        return all(f.contains(p, tol) for f, p in zip(self.factors, parts))

    def sample(self, rng):
        return np.concatenate([f.sample(rng) for f in self.factors])


def _l2_diameter(K: DecisionSet) -> float:
    """Diameter of a set in the l2 norm, regardless of its declared norm pair."""
    if isinstance(K, Simplex):
        return 0.0 if K.dim == 1 else math.sqrt(2.0)
    if isinstance(K, L2Ball):
        return 2.0 * K.radius
    if isinstance(K, Box):
        return float(np.linalg.norm(K.upper - K.lower))
    if isinstance(K, ProductSet):
        return math.sqrt(sum(_l2_diameter(f) ** 2 for f in K.factors))
    if isinstance(K, FullSpace):
        return math.inf
    raise ValueError(f"unknown set kind: {K!r}")


def support_value(K: DecisionSet, direction) -> float:
    """sup over the set of <direction, w>.

    Finite for bounded sets; on an unbounded set only direction = 0 is allowed.
    """
    direction = K.check_vector(direction)
    return float(np.dot(direction, K.linear_minimizer(-direction)))
