"""Config-driven experiment runner, CSV emission, and verification suites.

Config files are flat ``key=value`` text (one pair per line, ``#`` comments);
nested per-coordinate factor configs use ``factor.N.``-prefixed keys.  Loss
files and round traces are CSV with floats printed at 17 significant digits,
which round-trips doubles exactly.
"""

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import adversaries, bounds
from .adversaries import (
    GaussianAdversary,
    LowerBoundAdversary,
    ReplayAdversary,
    SpikyAdversary,
    khinchin_check,
)
from .bounds import BoundReport
from .geometry import (
    L1,
    L2,
    LINF,
    Box,
    DecisionSet,
    FullSpace,
    L2Ball,
    ProductSet,
    Simplex,
    UnboundedError,
)
from .learners import (
    AdaFTRL,
    FixedEtaFTRL,
    PerCoordinateLearner,
    RoundTrace,
    SoloFTRL,
    run as run_learner,
    scale_invariance_check,
)
from .regularizers import HalfSquaredDistance, Regularizer, ShiftedNegativeEntropy

# a single experiment seed derives every sub-stream by a fixed offset
ADVERSARY_SEED_OFFSET = 1000003

MAX_TRACE_PREDICTION_DIM = 16

ALGORITHMS = ("adaftrl", "solo", "fixed_eta", "per_coordinate")
SCALE_POLICIES = ("corollary1", "corollary2")


class ConfigError(ValueError):
    """A configuration problem detected before any rounds run."""


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


# ---------------------------------------------------------------------------
# loss-file CSV format: header t,dim,c1,...,cd; one row per round


def write_loss_csv(path, losses) -> None:
    losses = np.asarray(losses, dtype=float)
    if losses.ndim != 2:
        raise ValueError("losses must be a (rounds, dim) array")
    dim = losses.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "dim"] + [f"c{i}" for i in range(1, dim + 1)])
        for t, row in enumerate(losses, start=1):
            writer.writerow([t, dim] + [_fmt(v) for v in row])


def read_loss_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[:2] != ["t", "dim"]:
            raise ConfigError(f"{path}: not a loss file (header must start with t,dim)")
        rows = []
        for line in reader:
            if not line:
                continue
            dim = int(line[1])
            if len(line) != 2 + dim:
                raise ConfigError(
                    f"{path}: row {line[0]} has {len(line) - 2} coordinates, expected {dim}"
                )
            rows.append([float(v) for v in line[2:]])
    if not rows:
        return np.zeros((0, 0))
    return np.asarray(rows, dtype=float)


# ---------------------------------------------------------------------------
# trace CSV format


def write_trace_csv(fh, traces: list[RoundTrace], dim: int) -> None:
    writer = csv.writer(fh)
    header = ["t", "loss_norm", "inst_loss", "cum_loss", "regret", "scheme_scalar", "bound", "slack"]
    with_predictions = dim <= MAX_TRACE_PREDICTION_DIM
    if with_predictions:
        header += [f"w{i}" for i in range(1, dim + 1)]
    writer.writerow(header)
    for r in traces:
        row = [
            r.t,
            _fmt(r.loss_dual_norm),
            _fmt(r.inst_loss),
            _fmt(r.cum_loss),
            _fmt(r.regret_to_date),
            _fmt(r.scheme_scalar),
            _fmt(r.bound_to_date),
            _fmt(r.bound_to_date - r.regret_to_date),
        ]
        if with_predictions:
            row += [_fmt(v) for v in r.prediction]
        writer.writerow(row)


def trace_csv_text(traces: list[RoundTrace], dim: int) -> str:
    buf = io.StringIO(newline="")
    write_trace_csv(buf, traces, dim)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# config parsing


def parse_config_text(text: str) -> dict[str, str]:
    cfg = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in cfg:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        cfg[key] = value
    return cfg


def load_config(path) -> dict[str, str]:
    try:
        with open(path) as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _get(cfg, key, default=None, required=False):
    if key in cfg:
        return cfg[key]
    if required:
        raise ConfigError(f"missing required key {key!r}")
    return default


def _get_float(cfg, key, default=None, required=False):
    raw = _get(cfg, key, required=required)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"key {key!r}: expected a number, got {raw!r}")


def _get_int(cfg, key, default=None, required=False):
    raw = _get(cfg, key, required=required)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"key {key!r}: expected an integer, got {raw!r}")


def _parse_vector(raw, key):
    try:
        return np.asarray(
            [float(v) for v in raw.split(",") if v.strip() != ""], dtype=float
        )
    except ValueError:
        raise ConfigError(f"key {key!r}: expected comma-separated numbers, got {raw!r}")


def _build_set(cfg: dict, prefix: str, quad_regularizer: bool) -> DecisionSet:
    kind = _get(cfg, prefix + "kind", required=True)
    norm = _get(cfg, prefix + "norm")
    try:
        if kind == "simplex":
            dim = _get_int(cfg, prefix + "dim", required=True)
            return Simplex(dim, norm=norm or (L2 if quad_regularizer else L1))
        if kind == "l2_ball":
            dim = _get_int(cfg, prefix + "dim", required=True)
            radius = _get_float(cfg, prefix + "radius", required=True)
            raw_center = _get(cfg, prefix + "center")
            center = _parse_vector(raw_center, prefix + "center") if raw_center else np.zeros(dim)
            return L2Ball(center, radius, norm=norm or L2)
        if kind == "box":
            lower = _parse_vector(_get(cfg, prefix + "lower", required=True), prefix + "lower")
            upper = _parse_vector(_get(cfg, prefix + "upper", required=True), prefix + "upper")
            return Box(lower, upper, norm=norm or (L2 if quad_regularizer else LINF))
        if kind == "full_space":
            dim = _get_int(cfg, prefix + "dim", required=True)
            return FullSpace(dim, norm=norm or L2)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{prefix}*: {exc}") from exc
    raise ConfigError(f"key {prefix}kind: unknown set kind {kind!r}")


@dataclass
class LearnerSetup:
    """Everything needed to build one learner and evaluate its matching bound."""

    algorithm: str
    decision_set: DecisionSet
    regularizer: Regularizer
    scale_policy: str  # "explicit" | "corollary1" | "corollary2"
    sup_unit: float  # sup of the unit-scale base function; nan if unbounded
    eta: float | None = None

    def make_learner(self):
        if self.algorithm == "adaftrl":
            return AdaFTRL(self.regularizer)
        if self.algorithm == "solo":
            return SoloFTRL(self.regularizer)
        if self.algorithm == "fixed_eta":
            return FixedEtaFTRL(self.regularizer, self.eta)
        raise ConfigError(f"unknown algorithm {self.algorithm!r}")

    def bound_value(self, loss_norms, rounds: int, reg_at_comparator: float) -> float:
        """The matching regret bound, computed from loss norms only."""
        if self.algorithm == "adaftrl":
            if self.scale_policy == "corollary1":
                return bounds.adaftrl_optimized_bound(self.sup_unit, loss_norms)
            return bounds.adaftrl_regret_bound(
                self.decision_set.diameter(),
                self.regularizer.modulus,
                reg_at_comparator,
                loss_norms,
            )
        if self.algorithm == "solo":
            if self.scale_policy == "corollary2":
                return bounds.solo_optimized_bound(self.sup_unit, loss_norms)
            return bounds.solo_regret_bound(
                self.decision_set.diameter(),
                self.regularizer.modulus,
                reg_at_comparator,
                loss_norms,
                rounds,
            )
        return math.nan

    def bound_name(self) -> str:
        if self.algorithm == "adaftrl":
            return (
                "adaftrl_optimized_bound"
                if self.scale_policy == "corollary1"
                else "adaftrl_regret_bound"
            )
        if self.algorithm == "solo":
            return (
                "solo_optimized_bound"
                if self.scale_policy == "corollary2"
                else "solo_regret_bound"
            )
        return "unbounded_scheme"


def _build_learner_setup(cfg: dict, prefix: str) -> LearnerSetup:
    algorithm = _get(cfg, prefix + "algorithm", required=True)
    if algorithm not in ("adaftrl", "solo", "fixed_eta"):
        raise ConfigError(f"key {prefix}algorithm: unknown algorithm {algorithm!r}")
    reg_kind = _get(cfg, prefix + "regularizer.kind", required=True)
    if reg_kind not in ("entropy", "half_sq_dist"):
        raise ConfigError(f"key {prefix}regularizer.kind: unknown kind {reg_kind!r}")
    decision_set = _build_set(cfg, prefix + "set.", quad_regularizer=(reg_kind == "half_sq_dist"))
    try:
        if reg_kind == "entropy":
            base = ShiftedNegativeEntropy(decision_set)
        else:
            raw_center = _get(cfg, prefix + "regularizer.center")
            center = (
                _parse_vector(raw_center, prefix + "regularizer.center") if raw_center else None
            )
            base = HalfSquaredDistance(decision_set, center=center)
    except ValueError as exc:
        raise ConfigError(f"{prefix}regularizer.*: {exc}") from exc

    sup_unit = base.sup_value() if decision_set.is_bounded() else math.nan
    raw_scale = _get(cfg, prefix + "regularizer.scale", default="1.0")
    if raw_scale in SCALE_POLICIES:
        if not decision_set.is_bounded():
            raise ConfigError(f"scale policy {raw_scale!r} needs a bounded set")
        policy = raw_scale
        scale = (
            bounds.adaftrl_optimized_scale(sup_unit)
            if raw_scale == "corollary1"
            else bounds.solo_optimized_scale(sup_unit)
        )
    else:
        policy = "explicit"
        try:
            scale = float(raw_scale)
        except ValueError:
            raise ConfigError(
                f"key {prefix}regularizer.scale: expected a number or one of "
                f"{SCALE_POLICIES}, got {raw_scale!r}"
            )
        if not (scale > 0):
            raise ConfigError(f"key {prefix}regularizer.scale: must be positive, got {scale}")
    regularizer = base.scaled(scale)

    eta = _get_float(cfg, prefix + "eta")
    if algorithm == "fixed_eta" and (eta is None or not (eta > 0)):
        raise ConfigError(f"algorithm fixed_eta needs a positive {prefix}eta")
    if algorithm == "adaftrl" and not decision_set.is_bounded():
        raise ConfigError("algorithm adaftrl requires a bounded decision set")
    return LearnerSetup(algorithm, decision_set, regularizer, policy, sup_unit, eta)


def _build_adversary(cfg: dict, decision_set: DecisionSet, rounds: int | None):
    kind = _get(cfg, "adversary.kind", required=True)
    try:
        if kind == "replay":
            path = _get(cfg, "adversary.path", required=True)
            losses = read_loss_csv(path)
            if losses.size == 0:
                losses = np.zeros((0, decision_set.dim))
            if losses.shape[1] != decision_set.dim:
                raise ConfigError(
                    f"replay file dimension {losses.shape[1]} != set dimension {decision_set.dim}"
                )
            if rounds is not None and rounds != losses.shape[0]:
                raise ConfigError(f"rounds={rounds} but replay file has {losses.shape[0]} rows")
            return ReplayAdversary(losses)
        if rounds is None:
            raise ConfigError("missing required key 'rounds'")
        if kind == "gaussian":
            sigma = _get_float(cfg, "adversary.sigma", default=1.0)
            return GaussianAdversary(decision_set.dim, sigma, rounds)
        if kind == "spiky":
            magnitude = _get_float(cfg, "adversary.spike_magnitude", default=1e6)
            spike_round = _get_int(cfg, "adversary.spike_round", default=max(1, rounds // 2))
            return SpikyAdversary(decision_set.dim, rounds, magnitude, spike_round)
        if kind == "lower_bound":
            raw = _get(cfg, "adversary.norms")
            if raw is not None:
                norms = _parse_vector(raw, "adversary.norms")
                if norms.size != rounds:
                    raise ConfigError(
                        f"adversary.norms has {norms.size} entries but rounds={rounds}"
                    )
            else:
                norms = np.full(rounds, _get_float(cfg, "adversary.norm", default=1.0))
            return LowerBoundAdversary(decision_set, norms)
    except (ValueError, UnboundedError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"adversary.*: {exc}") from exc
    raise ConfigError(f"key adversary.kind: unknown kind {kind!r}")


@dataclass
class ExperimentConfig:
    """A fully built experiment: learners, adversary, and run policy."""

    algorithm: str
    decision_set: DecisionSet
    adversary: object
    rounds: int
    seed: int
    scale_factor: float
    comparators: list
    output_path: str | None
    setup: LearnerSetup | None = None
    factor_setups: list = field(default_factory=list)

    @classmethod
    def from_dict(cls, cfg: dict) -> "ExperimentConfig":
        unknown = [k for k in cfg if not _known_key(k)]
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        algorithm = _get(cfg, "algorithm", required=True)
        if algorithm not in ALGORITHMS:
            raise ConfigError(f"key 'algorithm': unknown algorithm {algorithm!r}")
        seed = _get_int(cfg, "seed", default=0)
        scale_factor = _get_float(cfg, "scale_factor", default=1.0)
        if not (scale_factor > 0):
            raise ConfigError(f"scale_factor must be positive, got {scale_factor}")
        rounds = _get_int(cfg, "rounds")
        if rounds is not None and rounds < 0:
            raise ConfigError(f"rounds must be >= 0, got {rounds}")
        output_path = _get(cfg, "output_path")

        if algorithm == "per_coordinate":
            factor_setups = []
            i = 0
            while any(k.startswith(f"factor.{i}.") for k in cfg):
                sub = {
                    k[len(f"factor.{i}.") :]: v
                    for k, v in cfg.items()
                    if k.startswith(f"factor.{i}.")
                }
                factor_setups.append(_build_learner_setup(sub, ""))
                i += 1
            if not factor_setups:
                raise ConfigError("per_coordinate needs factor.0.* keys")
            decision_set = ProductSet([s.decision_set for s in factor_setups])
            setup = None
        else:
            setup = _build_learner_setup(cfg, "")
            factor_setups = []
            decision_set = setup.decision_set

        adversary = _build_adversary(cfg, decision_set, rounds)
        if rounds is None:
            rounds = adversary.rounds

        comparators = []
        raw = _get(cfg, "comparators")
        if raw:
            for i, part in enumerate(raw.split(";")):
                u = _parse_vector(part, "comparators")
                if u.size != decision_set.dim:
                    raise ConfigError(
                        f"comparator {i} has dimension {u.size}, expected {decision_set.dim}"
                    )
                if not decision_set.contains(u):
                    raise ConfigError(f"comparator {i} lies outside the decision set")
                comparators.append(u)
        if not decision_set.is_bounded() and not comparators:
            raise ConfigError("an unbounded decision set needs explicit comparators")

        return cls(
            algorithm=algorithm,
            decision_set=decision_set,
            adversary=adversary,
            rounds=rounds,
            seed=seed,
            scale_factor=scale_factor,
            comparators=comparators,
            output_path=output_path,
            setup=setup,
            factor_setups=factor_setups,
        )

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        return cls.from_dict(load_config(path))

    def make_learner(self):
        if self.algorithm == "per_coordinate":
            return PerCoordinateLearner([s.make_learner() for s in self.factor_setups])
        return self.setup.make_learner()


_KNOWN_TOP_KEYS = {
    "algorithm",
    "rounds",
    "seed",
    "scale_factor",
    "comparators",
    "output_path",
    "eta",
}
_KNOWN_SUB_PREFIXES = ("set.", "regularizer.", "adversary.")


def _known_key(key: str) -> bool:
    if key.startswith("factor."):
        parts = key.split(".", 2)
        return len(parts) == 3 and parts[1].isdigit() and _known_key(parts[2])
    if key in _KNOWN_TOP_KEYS:
        return True
    return any(key.startswith(p) for p in _KNOWN_SUB_PREFIXES)


# ---------------------------------------------------------------------------
# experiment execution


def best_in_hindsight(K: DecisionSet, cum_loss) -> np.ndarray:
    """The fixed point minimizing total loss; only defined on bounded sets."""
    if not K.is_bounded():
        raise UnboundedError("best-in-hindsight needs a bounded set; use explicit comparators")
    return K.linear_minimizer(cum_loss)


def run_experiment(cfg: ExperimentConfig):
    """Run the configured learner against the configured adversary.

    Returns (traces, reports).  Each round's regret is measured against the
    best point in hindsight on bounded sets, or the max over the explicit
    comparator list otherwise; the matching theorem bound is evaluated from
    loss norms alone.  Writes the trace CSV when an output path is set.
    """
    losses = adversaries.generate(cfg.adversary, seed=cfg.seed + ADVERSARY_SEED_OFFSET)
    if cfg.scale_factor != 1.0:
        losses = adversaries.scale_losses(losses, cfg.scale_factor)
    if losses.size == 0:
        losses = np.zeros((cfg.rounds, cfg.decision_set.dim))

    learner = cfg.make_learner()
    traces = run_learner(learner, losses)
    _annotate(cfg, traces)
    reports = _final_reports(cfg, traces)
    if cfg.output_path:
        with open(cfg.output_path, "w", newline="") as fh:
            write_trace_csv(fh, traces, cfg.decision_set.dim)
    return traces, reports


def _setups_and_slices(cfg: ExperimentConfig):
    if cfg.algorithm == "per_coordinate":
        return cfg.factor_setups, cfg.decision_set._slices
    return [cfg.setup], [slice(0, cfg.decision_set.dim)]


def _annotate(cfg: ExperimentConfig, traces: list[RoundTrace]) -> None:
    """Fill regret_to_date and bound_to_date in place."""
    K = cfg.decision_set
    setups, slices = _setups_and_slices(cfg)
    norms = [[] for _ in setups]
    cum_vec = np.zeros(K.dim)
    bounded = K.is_bounded()

    def total_bound(u, t):
        return sum(
            setup.bound_value(norms[i], t, setup.regularizer.value(u[sl]))
            for i, (setup, sl) in enumerate(zip(setups, slices))
        )

    for r in traces:
        cum_vec = cum_vec + r.loss
        for i, (setup, sl) in enumerate(zip(setups, slices)):
            norms[i].append(setup.decision_set.dual_norm(r.loss[sl]))
        if bounded:
            u = best_in_hindsight(K, cum_vec)
            r.regret_to_date = r.cum_loss - float(np.dot(cum_vec, u))
            r.bound_to_date = total_bound(u, r.t)
        else:
            r.regret_to_date = max(
                r.cum_loss - float(np.dot(cum_vec, u)) for u in cfg.comparators
            )
            r.bound_to_date = max(total_bound(u, r.t) for u in cfg.comparators)


def _final_reports(cfg: ExperimentConfig, traces: list[RoundTrace]) -> list[BoundReport]:
    K = cfg.decision_set
    setups, slices = _setups_and_slices(cfg)
    rounds = len(traces)
    loss_rows = [r.loss for r in traces]
    cum_vec = np.sum(loss_rows, axis=0) if traces else np.zeros(K.dim)
    cum_inst = traces[-1].cum_loss if traces else 0.0
    norms = [
        [setup.decision_set.dual_norm(l[sl]) for l in loss_rows]
        for setup, sl in zip(setups, slices)
    ]
    per_factor = len(setups) > 1
    comparator_points = [best_in_hindsight(K, cum_vec)] if K.is_bounded() else cfg.comparators

    reports = []
    for u in comparator_points:
        regret_u = cum_inst - float(np.dot(cum_vec, u))
        tag = "" if K.is_bounded() else f"[u={','.join(_fmt(v) for v in u)}]"
        factor_bounds = []
        for i, (setup, sl) in enumerate(zip(setups, slices)):
            if setup.algorithm == "fixed_eta":
                continue
            b = setup.bound_value(norms[i], rounds, setup.regularizer.value(u[sl]))
            factor_bounds.append(b)
            if per_factor:
                regret_i = sum(
                    float(np.dot(l[sl], r.prediction[sl])) for l, r in zip(loss_rows, traces)
                ) - float(np.dot(cum_vec[sl], u[sl]))
                reports.append(BoundReport(f"factor{i}.{setup.bound_name()}{tag}", regret_i, b))
            else:
                reports.append(BoundReport(f"{setup.bound_name()}{tag}", regret_u, b))
        if per_factor and factor_bounds:
            reports.append(BoundReport(f"per_coordinate_sum{tag}", regret_u, sum(factor_bounds)))

    # the adaptivity scalar of the Bregman-gap scheme obeys a closed-form cap
    if not per_factor and cfg.setup is not None and cfg.setup.algorithm == "adaftrl":
        setup = cfg.setup
        final_scalar = traces[-1].scheme_scalar if traces else 0.0
        cap = (
            bounds.SQRT3
            * max(setup.decision_set.diameter(), 1.0 / math.sqrt(2.0 * setup.regularizer.modulus))
            * math.sqrt(sum(n * n for n in norms[0]))
        )
        reports.append(BoundReport("delta_recurrence_solution", final_scalar, cap))
    return reports


# ---------------------------------------------------------------------------
# verification suites (shared by the CLI and the test suite)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        return f"[{status}] {self.name}" + (f" ({self.detail})" if self.detail else "")


def standard_pairs() -> list[Regularizer]:
    """The shipped (set, regularizer) pairs exercised by verification."""
    return [
        ShiftedNegativeEntropy(Simplex(2)),
        ShiftedNegativeEntropy(Simplex(8)),
        HalfSquaredDistance(L2Ball(np.zeros(3), 1.5)),
        HalfSquaredDistance(
            Box(-np.ones(4), np.array([1.0, 2.0, 0.5, 3.0]), norm=L2),
            center=np.array([0.2, -0.1, 0.0, 0.4]),
        ),
        HalfSquaredDistance(Simplex(3, norm=L2), center=np.array([0.1, 0.2, -0.3])),
    ]


def _random_dual(rng, dim):
    return rng.normal(size=dim) * 10.0 ** rng.uniform(-3, 3)


def _rel_violation(lhs: float, rhs: float, rtol: float = 1e-9) -> float:
    """How far lhs exceeds rhs, less a relative tolerance; <= 0 means it holds."""
    return lhs - rhs - rtol * max(1.0, abs(rhs))


def verify_conjugates(trials: int = 1000, seed: int = 0) -> list[CheckResult]:
    """Conjugate-machinery identities and inequalities on random points."""
    rng = np.random.default_rng(seed)
    worst = {
        "finite_at_extreme_duals": -1.0,
        "grad_is_constrained_argmin": -math.inf,
        "young_identity": -math.inf,
        "strong_smoothness": -math.inf,
        "lipschitz_gradients": -math.inf,
        "bregman_diameter_cap": -math.inf,
        "gradient_diameter_cap": -math.inf,
        "scaling_law": -math.inf,
        "fenchel_young": -math.inf,
        "diameter_vs_range": -math.inf,
        "gradient_finite_difference": -math.inf,
    }
    for reg in standard_pairs():
        K = reg.set
        D = K.diameter()
        lam = reg.modulus
        for magnitude in (1e100, 1e300):
            big = np.zeros(K.dim)
            big[0] = magnitude
            big[-1] = -magnitude / 2
            v = reg.conjugate_value(big)
            g = reg.conjugate_grad(big)
            if not (math.isfinite(v) and bool(np.all(np.isfinite(g)))):
                worst["finite_at_extreme_duals"] = 1.0
        for _ in range(trials):
            x = _random_dual(rng, K.dim)
            y = _random_dual(rng, K.dim)
            w = K.sample(rng)
            gx = reg.conjugate_grad(x)
            gy = reg.conjugate_grad(y)
            fx = reg.conjugate_value(x)
            dual_gap = K.dual_norm(x - y)
            breg = reg.bregman_conjugate(x, y)
            worst["grad_is_constrained_argmin"] = max(
                worst["grad_is_constrained_argmin"],
                _rel_violation(
                    reg.value(gx) - float(np.dot(x, gx)), reg.value(w) - float(np.dot(x, w))
                ),
            )
            young_gap = abs(fx + reg.value(gx) - float(np.dot(x, gx)))
            worst["young_identity"] = max(
                worst["young_identity"], young_gap / max(1.0, abs(fx)) - 1e-8
            )
            worst["strong_smoothness"] = max(
                worst["strong_smoothness"], _rel_violation(breg, dual_gap**2 / (2.0 * lam))
            )
            worst["lipschitz_gradients"] = max(
                worst["lipschitz_gradients"],
                _rel_violation(K.primal_norm(gx - gy), dual_gap / lam),
            )
            worst["bregman_diameter_cap"] = max(
                worst["bregman_diameter_cap"], _rel_violation(breg, D * dual_gap)
            )
            worst["gradient_diameter_cap"] = max(
                worst["gradient_diameter_cap"], _rel_violation(K.primal_norm(gx - gy), D)
            )
            c = 10.0 ** rng.uniform(-3, 3)
            lhs = reg.scaled(c).conjugate_value(x)
            rhs = c * reg.conjugate_value(x / c)
            worst["scaling_law"] = max(
                worst["scaling_law"], abs(lhs - rhs) / max(1.0, abs(rhs)) - 1e-10
            )
            worst["fenchel_young"] = max(
                worst["fenchel_young"],
                _rel_violation(float(np.dot(x, w)), reg.value(w) + fx, rtol=1e-8),
            )
        worst["diameter_vs_range"] = max(
            worst["diameter_vs_range"],
            _rel_violation(D, math.sqrt(8.0 * reg.sup_value() / reg.modulus), rtol=1e-12),
        )
        fd = _gradient_fd_worst(reg, rng, points=min(100, trials))
        worst["gradient_finite_difference"] = max(worst["gradient_finite_difference"], fd - 1e-4)

    return [
        CheckResult(f"conjugates/{name}", violation <= 0.0, f"worst violation {violation:.3g}")
        for name, violation in worst.items()
    ]


def sample_smooth_dual(reg: Regularizer, rng, margin: float = 1e-3) -> np.ndarray:
    """A dual point where the conjugate is locally smooth (away from projection faces)."""
    K = reg.set
    while True:
        l = rng.normal(size=K.dim)
        if isinstance(reg, ShiftedNegativeEntropy):
            return l
        p = reg.center + l / reg.scale
        if isinstance(K, L2Ball):
            if abs(float(np.linalg.norm(p - K.center)) - K.radius) > margin:
                return l
        elif isinstance(K, Box):
            if np.all(np.abs(p - K.lower) > margin) and np.all(np.abs(p - K.upper) > margin):
                return l
        elif isinstance(K, Simplex):
            w = K.project(p)
            active = w > 0
            tau = (float(np.sum(p[active])) - 1.0) / int(np.sum(active))
            if np.all(w[active] > margin) and (
                np.all(tau - p[~active] > margin) if np.any(~active) else True
            ):
                return l
        else:
            return l


def _gradient_fd_worst(reg: Regularizer, rng, points: int = 100, step: float = 1e-5) -> float:
    """Worst absolute gap between the conjugate gradient and central differences."""
    K = reg.set
    worst = 0.0
    for _ in range(points):
        l = sample_smooth_dual(reg, rng)
        g = reg.conjugate_grad(l)
        for i in range(K.dim):
            e = np.zeros(K.dim)
            e[i] = step
            fd = (reg.conjugate_value(l + e) - reg.conjugate_value(l - e)) / (2 * step)
            worst = max(worst, abs(fd - g[i]))
    return worst


def verify_inequalities(trials: int = 10000, seed: int = 0) -> list[CheckResult]:
    """Proof-side scalar inequalities on random (including spiky) profiles."""
    rng = np.random.default_rng(seed)
    hand = bounds.min_term_inequality_check(1.0, [1.0, 1.0])
    expected_rhs = 3.5 + 3.5 * math.sqrt(2.0)
    results = [
        CheckResult(
            "inequalities/min_term_hand_example",
            abs(hand.observed - 2.0) <= 1e-9 and abs(hand.bound - expected_rhs) <= 1e-9,
            f"lhs={hand.observed:.12g} rhs={hand.bound:.12g}",
        )
    ]
    ok_min, ok_sqrt = True, True
    worst_min, worst_sqrt = math.inf, math.inf
    for _ in range(trials):
        size = int(rng.integers(1, 64))
        a = np.abs(rng.normal(size=size)) * 10.0 ** rng.uniform(-3, 3)
        if rng.random() < 0.2:
            a[rng.integers(size)] *= 1e6
        cap = abs(rng.normal()) * 10.0 ** rng.uniform(-3, 3)
        rep = bounds.min_term_inequality_check(cap, a)
        ok_min &= rep.passed
        worst_min = min(worst_min, rep.slack)
        if a[0] <= 0:
            a[0] = 1.0
        rep2 = bounds.sqrt_sum_check(a)
        ok_sqrt &= rep2.passed
        worst_sqrt = min(worst_sqrt, rep2.slack)
    results.append(
        CheckResult("inequalities/min_term_random_profiles", ok_min, f"min slack {worst_min:.3g}")
    )
    results.append(
        CheckResult("inequalities/sqrt_sum_random_profiles", ok_sqrt, f"min slack {worst_sqrt:.3g}")
    )
    return results


GEOMETRY_FAMILIES = ("entropy_simplex", "quad_ball", "quad_box")


def random_geometry(rng, family: str | None = None) -> Regularizer:
    """A random bounded (set, unit-scale regularizer) pair from a named family."""
    family = family or GEOMETRY_FAMILIES[int(rng.integers(len(GEOMETRY_FAMILIES)))]
    if family == "entropy_simplex":
        dim = int(rng.integers(2, 9))
        return ShiftedNegativeEntropy(Simplex(dim))
    if family == "quad_ball":
        dim = int(rng.integers(2, 6))
        center = rng.normal(size=dim)
        radius = 10.0 ** rng.uniform(-1, 1)
        K = L2Ball(center, radius)
        return HalfSquaredDistance(K, center=K.sample(rng))
    if family == "quad_box":
        dim = int(rng.integers(2, 6))
        mid = rng.normal(size=dim)
        half = 10.0 ** rng.uniform(-1, 1, size=dim)
        K = Box(mid - half, mid + half, norm=L2)
        return HalfSquaredDistance(K, center=K.sample(rng))
    raise ValueError(f"unknown geometry family {family!r}")


def random_losses(rng, dim: int, rounds: int, spiky: bool = False) -> np.ndarray:
    """Mixed-magnitude gaussian losses, optionally with one huge-norm round."""
    sigma = 10.0 ** rng.uniform(-3, 3)
    losses = rng.normal(0.0, sigma, size=(rounds, dim))
    if spiky and rounds >= 1:
        t = int(rng.integers(rounds))
        losses[t] *= 10.0 ** rng.uniform(3, 6)
    return losses


def verify_scale_invariance(trials: int = 20, seed: int = 0) -> list[CheckResult]:
    """Prediction invariance under loss rescaling; fixed-eta as the negative control."""
    rng = np.random.default_rng(seed)
    scales = (1e-6, 1e-3, 1.0, 1e3, 1e6)
    ok = True
    control_failures = 0
    for _ in range(trials):
        reg = random_geometry(rng)
        losses = random_losses(rng, reg.set.dim, 50, spiky=rng.random() < 0.3)
        for make in (lambda: AdaFTRL(reg), lambda: SoloFTRL(reg)):
            for c in scales:
                ok &= scale_invariance_check(make, losses, c)
        if not scale_invariance_check(lambda: FixedEtaFTRL(reg, 1.0), losses, 1e6):
            control_failures += 1
    return [
        CheckResult(
            "scale_invariance/adaptive_schemes", ok, f"{trials} instances x {len(scales)} scales"
        ),
        CheckResult(
            "scale_invariance/fixed_eta_control_fails",
            control_failures >= 0.9 * trials,
            f"{control_failures}/{trials} instances broke invariance",
        ),
    ]


def verify_bounds(trials: int = 50, seed: int = 0) -> list[CheckResult]:
    """Theorem-level regret bounds and recurrence caps on random runs."""
    rng = np.random.default_rng(seed)
    all_ok = {
        "adaftrl_regret_bound": True,
        "adaftrl_optimized_bound": True,
        "solo_regret_bound": True,
        "solo_optimized_bound": True,
        "delta_recurrence_solution": True,
        "delta_per_round_recurrence": True,
        "initial_regret_cap": True,
        "generic_schedule_bound": True,
    }
    for _ in range(trials):
        reg_unit = random_geometry(rng)
        K = reg_unit.set
        rounds = int(rng.integers(1, 60))
        losses = random_losses(rng, K.dim, rounds, spiky=rng.random() < 0.3)
        norms = [K.dual_norm(l) for l in losses]
        S = reg_unit.sup_value()
        cum_vec = np.sum(losses, axis=0)
        for algorithm in ("adaftrl", "solo"):
            if algorithm == "adaftrl":
                reg = reg_unit.scaled(bounds.adaftrl_optimized_scale(S))
                learner = AdaFTRL(reg)
            else:
                reg = reg_unit.scaled(bounds.solo_optimized_scale(S))
                learner = SoloFTRL(reg)
            traces = run_learner(learner, losses)
            u = best_in_hindsight(K, cum_vec)
            regret = traces[-1].cum_loss - float(np.dot(cum_vec, u))
            if algorithm == "adaftrl":
                thm = bounds.adaftrl_regret_bound(K.diameter(), reg.modulus, reg.value(u), norms)
                opt = bounds.adaftrl_optimized_bound(S, norms)
                all_ok["adaftrl_optimized_bound"] &= BoundReport("o", regret, opt).passed
                all_ok["adaftrl_regret_bound"] &= BoundReport("t", regret, thm).passed
                deltas = [0.0] + [r.scheme_scalar for r in traces]
                for t in range(1, rounds + 1):
                    step_cap = norms[t - 1] * K.diameter()
                    if deltas[t - 1] > 0:
                        step_cap = min(
                            step_cap, norms[t - 1] ** 2 / (2 * reg.modulus * deltas[t - 1])
                        )
                    all_ok["delta_per_round_recurrence"] &= BoundReport(
                        "s", deltas[t], deltas[t - 1] + step_cap
                    ).passed
                cap = (
                    bounds.SQRT3
                    * max(K.diameter(), 1 / math.sqrt(2 * reg.modulus))
                    * math.sqrt(sum(n * n for n in norms))
                )
                all_ok["delta_recurrence_solution"] &= BoundReport("c", deltas[-1], cap).passed
                for _ in range(10):
                    v = K.sample(rng)
                    regret_v = traces[-1].cum_loss - float(np.dot(cum_vec, v))
                    all_ok["initial_regret_cap"] &= BoundReport(
                        "l", regret_v, (1.0 + reg.value(v)) * deltas[-1]
                    ).passed
            else:
                thm = bounds.solo_regret_bound(
                    K.diameter(), reg.modulus, reg.value(u), norms, rounds
                )
                opt = bounds.solo_optimized_bound(S, norms)
                all_ok["solo_optimized_bound"] &= BoundReport("o", regret, opt).passed
                all_ok["solo_regret_bound"] &= BoundReport("t", regret, thm).passed
            multipliers = [0.0] + [r.scheme_scalar for r in traces]
            rhs = bounds.generic_ftrl_regret_bound(reg, multipliers, losses, u)
            all_ok["generic_schedule_bound"] &= BoundReport("g", regret, rhs).passed
    return [CheckResult(f"bounds/{k}", v) for k, v in all_ok.items()]


def sign_adversary_mean_regret(n_seeds: int, rounds: int = 32, seed: int = 0):
    """(mean regret, standard error, floor) for the shipped learner under the
    unit-norm sign adversary on the two-point simplex.

    Regret is measured against the better of the two diameter-achieving
    points; the floor is D/sqrt(8) * sqrt(rounds).
    """
    K = Simplex(2)
    reg = ShiftedNegativeEntropy(K)
    adversary = LowerBoundAdversary(K, np.ones(rounds))
    x, y = adversary.x, adversary.y
    regrets = np.empty(n_seeds)
    for i in range(n_seeds):
        losses = adversary.generate(seed=seed + 1 + i)
        learner = SoloFTRL(reg)
        cum_inst = 0.0
        for l in losses:
            w = learner.predict()
            cum_inst += float(np.dot(l, w))
            learner.observe(l)
        total = losses.sum(axis=0)
        best = min(float(np.dot(total, x)), float(np.dot(total, y)))
        regrets[i] = cum_inst - best
    mean = float(np.mean(regrets))
    se = float(np.std(regrets) / math.sqrt(n_seeds))
    floor = bounds.lower_bound_value(K.diameter(), np.ones(rounds))
    return mean, se, floor


def verify_lower_bound(trials: int = 100000, seed: int = 0) -> list[CheckResult]:
    """Sign-adversary statistics against the shipped learner and the signed-sum floor."""
    rng = np.random.default_rng(seed)
    ok_khinchin = True
    worst = math.inf
    for i in range(20):
        size = int(rng.integers(1, 40))
        a = np.abs(rng.normal(size=size)) * 10.0 ** rng.uniform(-2, 2)
        est, se, target = khinchin_check(a, trials, seed=seed + 17 * i + 1)
        margin = est - (target - 3.0 * se)
        ok_khinchin &= margin >= 0
        worst = min(worst, margin)
    results = [CheckResult("lower_bound/khinchin_floor", ok_khinchin, f"worst margin {worst:.3g}")]

    n_seeds = min(trials, 20000)
    mean, se, floor = sign_adversary_mean_regret(n_seeds, rounds=32, seed=seed)
    results.append(
        CheckResult(
            "lower_bound/mean_regret_floor",
            mean >= floor - 3.0 * se,
            f"mean={mean:.4f} floor={floor:.4f} se={se:.4f} ({n_seeds} seeds)",
        )
    )
    return results


VERIFY_SUITES = {
    "conjugates": (verify_conjugates, 1000),
    "inequalities": (verify_inequalities, 10000),
    "scale-invariance": (verify_scale_invariance, 20),
    "bounds": (verify_bounds, 50),
    "lower-bound": (verify_lower_bound, 100000),
}


def run_verify_suite(name: str, trials: int | None = None, seed: int = 0) -> list[CheckResult]:
    if name not in VERIFY_SUITES:
        raise ConfigError(f"unknown verify suite {name!r}; expected one of {sorted(VERIFY_SUITES)}")
    fn, default_trials = VERIFY_SUITES[name]
    return fn(trials if trials is not None else default_trials, seed)
