"""Full-batch Adam training of one case, the error metric, and the four-case suite."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import fdm
from .bc import BcStrategy, make_strategy
from .fdm import make_grid
from .nn import AdamState, adam_step, init_network
from .problems import BarSpec, BeamSpec, CaseLoss, LossBreakdown, analytic

log = logging.getLogger(__name__)

# case number -> (problem, strategy name)
CASES = {1: ("bar", "reparam"), 2: ("bar", "penalty"), 3: ("beam", "hybrid"), 4: ("beam", "penalty")}


class TrainingDiverged(RuntimeError):
    def __init__(self, epoch: int, term: str, value: float):
        super().__init__(f"loss term {term!r} became {value} at epoch {epoch}")
        self.epoch, self.term, self.value = epoch, term, value


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 10000
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 42
    n_nodes: int = 101
    ghost: int = 2
    log_every: int = 100
    tol: float = 0.0
    hidden_layers: tuple = (128, 128)
    hidden_activation: str = "sigmoid"
    output_activation: str = "identity"

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError(f"epochs must be non-negative, got {self.epochs}")
        if self.log_every < 1:
            raise ValueError(f"log_every must be positive, got {self.log_every}")
        for key in ("lr", "eps"):
            if not getattr(self, key) > 0:
                raise ValueError(f"{key} must be positive, got {getattr(self, key)}")
        for key in ("beta1", "beta2"):
            if not 0 <= getattr(self, key) < 1:
                raise ValueError(f"{key} must lie in [0, 1), got {getattr(self, key)}")
        if self.tol < 0:
            raise ValueError(f"tol must be non-negative, got {self.tol}")
        if self.n_nodes < 5:
            raise ValueError(f"n_nodes must be at least 5, got {self.n_nodes}")
        object.__setattr__(self, "hidden_layers", tuple(int(w) for w in self.hidden_layers))

    @property
    def layer_dims(self) -> tuple:
        return (1, *self.hidden_layers, 1)


@dataclass
class ExperimentReport:
    label: str
    problem: str
    strategy: str
    final: LossBreakdown
    percent_error: float
    max_error: float
    bc_deviation_x0: float
    bc_deviation_xL: float
    epochs_run: int
    history: list = field(default_factory=list)  # (epoch, total, residual_term, bc_term)
    x: np.ndarray = None
    predicted: np.ndarray = None
    exact: np.ndarray = None
    config: dict = field(default_factory=dict)


def percent_error(predicted, exact) -> float:
    """Relative L2 error in percent: ``100 * |predicted - exact| / |exact|``."""
    predicted = np.asarray(predicted, dtype=np.float64)
    exact = np.asarray(exact, dtype=np.float64)
    if predicted.shape != exact.shape or predicted.size == 0:
        raise ValueError("predicted and exact must be non-empty and the same length")
    denom = np.linalg.norm(exact)
    if denom == 0:
        raise ValueError("relative error is undefined for an all-zero reference")
    return float(100.0 * np.linalg.norm(predicted - exact) / denom)


def _check_finite(loss: LossBreakdown, epoch: int):
    if not np.isfinite(loss.residual_term):
        raise TrainingDiverged(epoch, "residual", loss.residual_term)
    for t in loss.bc_terms:
        if not np.isfinite(t.weighted):
            raise TrainingDiverged(epoch, t.label, t.weighted)


def _bc_deviations(spec, case: CaseLoss, k_field):
    """How far the prediction misses the boundary condition at each end.

    Beam: ``|w(0)|`` and ``|w(L)|``. Bar: ``|u(0)|`` and ``|u'(L) - P/EA|``
    (the right end of the bar carries a Neumann condition).
    """
    g = case.grid
    left = abs(k_field.at(g.left))
    if isinstance(spec, BarSpec):
        right = abs(fdm.d1(k_field).at(g.right) - spec.P / spec.stiffness)
    else:
        right = abs(k_field.at(g.right))
    return float(left), float(right)


def config_echo(spec, strategy: BcStrategy, config: TrainConfig) -> dict:
    echo = {"problem": spec.name, "strategy": strategy.name}
    echo.update({f"{spec.name}.{k}": v for k, v in asdict(spec).items()})
    for key in ("lam1", "lam2"):
        if hasattr(strategy, key):
            echo[key] = getattr(strategy, key)
    if hasattr(strategy, "multiplier"):
        echo["multiplier"] = repr(strategy.multiplier)
    for k, v in asdict(config).items():
        echo[k] = list(v) if isinstance(v, tuple) else v
    return echo


def train(spec, strategy: BcStrategy, config: TrainConfig = TrainConfig(), label: str = "") -> ExperimentReport:
    """Train a fresh network on one case and report its accuracy.

    Raises :class:`TrainingDiverged` if any loss term stops being finite.
    """
    grid = make_grid(spec.L, config.n_nodes, config.ghost)
    case = CaseLoss(spec, strategy, grid)
    net = init_network(config.layer_dims, config.seed, config.hidden_activation, config.output_activation)
    state = AdamState(lr=config.lr, beta1=config.beta1, beta2=config.beta2, eps=config.eps)
    history = []
    prev = None
    epoch = 0
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(config.epochs):
            try:
                loss, grad = case.evaluate_with_gradient(net)
            except FloatingPointError:
                raise TrainingDiverged(epoch, "network output", float("nan")) from None
            _check_finite(loss, epoch)
            if epoch % config.log_every == 0:
                history.append((epoch, loss.total, loss.residual_term, loss.bc_term))
                log.debug("%s epoch %d loss %.6e", label, epoch, loss.total)
            if config.tol > 0 and prev is not None and abs(prev - loss.total) < config.tol:
                break
            prev = loss.total
            net, state = adam_step(net, grad, state)
        else:
            epoch = config.epochs
    final = case.evaluate(net)
    _check_finite(final, epoch)
    if config.epochs > 0 and (not history or history[-1][0] != epoch):
        history.append((epoch, final.total, final.residual_term, final.bc_term))

    k_field = case.field(net)
    predicted = k_field.on_physical().copy()
    exact = analytic(spec, grid.x)
    dev0, devl = _bc_deviations(spec, case, k_field)
    return ExperimentReport(
        label=label or f"{spec.name}/{strategy.name}",
        problem=spec.name,
        strategy=strategy.name,
        final=final,
        percent_error=percent_error(predicted, exact),
        max_error=float(np.max(np.abs(predicted - exact))),
        bc_deviation_x0=dev0,
        bc_deviation_xL=devl,
        epochs_run=epoch,
        history=history,
        x=grid.x.copy(),
        predicted=predicted,
        exact=exact,
        config=config_echo(spec, strategy, config),
    )


@dataclass
class CaseFailure:
    label: str
    problem: str
    strategy: str
    error: str


@dataclass
class SuiteResult:
    results: list  # ExperimentReport or CaseFailure, in case order 1..4

    def summary(self) -> list[tuple]:
        """Rows ``(case, percent_error, bc_deviation_x0, bc_deviation_xL)``; NaN for failed cases."""
        rows = []
        for n, r in enumerate(self.results, start=1):
            if isinstance(r, CaseFailure):
                rows.append((n, float("nan"), float("nan"), float("nan")))
            else:
                rows.append((n, r.percent_error, r.bc_deviation_x0, r.bc_deviation_xL))
        return rows

    @property
    def failures(self) -> list[CaseFailure]:
        return [r for r in self.results if isinstance(r, CaseFailure)]


def case_setup(n: int, bar: BarSpec, beam: BeamSpec, lam1: float, lam2: float):
    problem, name = CASES[n]
    spec = bar if problem == "bar" else beam
    return spec, make_strategy(name, problem, spec.L, lam1, lam2)


def _run_case(args):
    n, bar, beam, lam1, lam2, config = args
    spec, strategy = case_setup(n, bar, beam, lam1, lam2)
    label = f"case {n} ({spec.name}/{strategy.name})"
    try:
        return train(spec, strategy, config, label)
    except TrainingDiverged as exc:
        log.warning("%s diverged: %s", label, exc)
        return CaseFailure(label, spec.name, strategy.name, str(exc))


def run_suite(
    config: TrainConfig = TrainConfig(),
    bar: BarSpec = BarSpec(),
    beam: BeamSpec = BeamSpec(),
    lam1: float = 100.0,
    lam2: float = 100.0,
    workers: int = 1,
) -> SuiteResult:
    """Run cases 1-4 with the same network hyperparameters.

    A diverging case is recorded as a :class:`CaseFailure` and does not stop
    the others. With ``workers > 1`` cases run in separate processes; results
    are identical to a sequential run.
    """
    jobs = [(n, bar, beam, lam1, lam2, config) for n in sorted(CASES)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_case, jobs))
    else:
        results = [_run_case(job) for job in jobs]
    return SuiteResult(results)
