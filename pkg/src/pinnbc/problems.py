"""The two benchmark problems, their loss functions and closed-form solutions.

Bar: ``-(EA u')' = x`` on ``[0, L]`` with ``u(0) = 0`` and ``EA u'(L) = P``.
Beam: ``EI w'''' + sin(x) = 0`` with ``w = w'' = 0`` at both supports.

Losses are the mean squared governing-equation residual over the nodes of
``[0, L]`` plus ``lam * r**2`` for each penalised boundary residual ``r``.
The gradient with respect to the network parameters is assembled by hand:
stencils are linear, so ``dLoss/dK`` is the transposed stencil applied to the
residuals, the multiplier turns that into ``dLoss/dF``, and the network's own
backward pass does the rest.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fdm
from .bc import BarDecay, BcStrategy, BeamSine, Hybrid, Penalty, Reparameterization, penalty_term
from .fdm import Grid, SampledField
from .nn import DenseNetwork, ParamGradient, backward, forward, forward_cache


@dataclass(frozen=True)
class BarSpec:
    E: float = 1.0
    A: float = 1.0
    L: float = 1.0
    P: float = 0.0
    name = "bar"

    def __post_init__(self):
        for key in ("E", "A", "L"):
            if not getattr(self, key) > 0:
                raise ValueError(f"bar {key} must be positive, got {getattr(self, key)}")
        if not np.isfinite(self.P):
            raise ValueError("bar end load P must be finite")

    @property
    def stiffness(self) -> float:
        return self.E * self.A

    def load(self, x):
        return np.asarray(x, dtype=np.float64)


@dataclass(frozen=True)
class BeamSpec:
    E: float = 1.0
    I: float = 1.0  # noqa: E741
    L: float = float(np.pi)
    name = "beam"

    def __post_init__(self):
        for key in ("E", "I", "L"):
            if not getattr(self, key) > 0:
                raise ValueError(f"beam {key} must be positive, got {getattr(self, key)}")

    @property
    def stiffness(self) -> float:
        return self.E * self.I

    def load(self, x):
        return np.sin(x)


@dataclass
class BcTerm:
    label: str
    raw: float
    weighted: float


@dataclass
class LossBreakdown:
    residual_term: float
    bc_terms: list[BcTerm] = field(default_factory=list)

    @property
    def bc_term(self) -> float:
        return float(sum(t.weighted for t in self.bc_terms))

    @property
    def total(self) -> float:
        return self.residual_term + self.bc_term


def _check_x(x, length):
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0) or np.any(x > length):
        raise ValueError(f"x must lie in [0, {length}]")
    return x


def bar_analytic(spec: BarSpec, x):
    """Displacement ``(P x + L^2 x / 2 - x^3 / 6) / (EA)``."""
    x = _check_x(x, spec.L)
    u = (spec.P * x + spec.L**2 * x / 2.0 - x**3 / 6.0) / spec.stiffness
    return float(u) if u.ndim == 0 else u


def beam_analytic(spec: BeamSpec, x):
    """Deflection ``b x + d x^3 - sin(x) / (EI)`` of the simply supported beam."""
    x = _check_x(x, spec.L)
    ei, length = spec.stiffness, spec.L
    d = -np.sin(length) / (6.0 * length * ei)
    b = np.sin(length) / (length * ei) - d * length**2
    w = b * x + d * x**3 - np.sin(x) / ei
    return float(w) if w.ndim == 0 else w


def analytic(spec, x):
    return bar_analytic(spec, x) if isinstance(spec, BarSpec) else beam_analytic(spec, x)


# (label, node: "left"/"right", stencil or None, lam attribute, target)
def _bc_layout(spec, strategy):
    if isinstance(spec, BarSpec):
        if isinstance(strategy, Reparameterization) and isinstance(strategy.multiplier, BarDecay):
            return []
        if isinstance(strategy, Penalty):
            return [
                ("u(0)", "left", None, "lam1", 0.0),
                ("u'(L)", "right", fdm.D1, "lam2", spec.P / spec.stiffness),
            ]
        raise ValueError(
            "the bar problem takes Reparameterization(BarDecay) or Penalty, "
            f"got {type(strategy).__name__}"
        )
    if isinstance(spec, BeamSpec):
        if isinstance(strategy, Hybrid) and isinstance(strategy.multiplier, BeamSine):
            return [
                ("w''(0)", "left", fdm.D2, "lam1", 0.0),
                ("w''(L)", "right", fdm.D2, "lam2", 0.0),
            ]
        if isinstance(strategy, Penalty):
            return [
                ("w(0)", "left", None, "lam1", 0.0),
                ("w(L)", "right", None, "lam1", 0.0),
                ("w''(0)", "left", fdm.D2, "lam2", 0.0),
                ("w''(L)", "right", fdm.D2, "lam2", 0.0),
            ]
        raise ValueError(
            "the beam problem takes Hybrid(BeamSine) or Penalty, "
            f"got {type(strategy).__name__}"
        )
    raise TypeError(f"unknown problem spec {type(spec).__name__}")


class CaseLoss:
    """Loss and gradient for one (problem, strategy, grid) combination.

    Everything that does not depend on the network (multiplier samples,
    stencil matrices, load vector) is built once here.
    """

    def __init__(self, spec, strategy: BcStrategy, grid: Grid):
        self.spec, self.strategy, self.grid = spec, strategy, grid
        self.layout = _bc_layout(spec, strategy)
        is_bar = isinstance(spec, BarSpec)
        self.operator = fdm.D2 if is_bar else fdm.D4
        need = 1 if is_bar else 2
        if grid.ghost < need:
            raise ValueError(f"the {spec.name} problem needs at least {need} ghost node(s) per side")
        if not np.isclose(grid.length, spec.L, rtol=1e-12, atol=0):
            raise ValueError(f"grid length {grid.length} does not match problem length {spec.L}")
        tag = getattr(strategy, "multiplier", None)
        self.multiplier = np.ones(grid.size) if tag is None else tag(grid.nodes)
        self.rhs = spec.load(grid.x) / spec.stiffness
        phys = np.arange(grid.left, grid.right + 1)
        self.residual_rows = fdm.stencil_rows(self.operator, grid, phys)
        self.bc_rows = []
        for label, end, stencil, lam_key, target in self.layout:
            node = grid.left if end == "left" else grid.right
            if stencil is None:
                row = np.zeros(grid.size)
                row[node] = 1.0
            else:
                row = fdm.stencil_rows(stencil, grid, [node])[0]
            self.bc_rows.append((label, node, stencil, getattr(strategy, lam_key), target, row))

    def field(self, net: DenseNetwork) -> SampledField:
        """Network output after the strategy's multiplier, on every grid node."""
        return SampledField(self.multiplier * forward(net, self.grid.nodes), self.grid)

    def _residuals(self, k_field: SampledField):
        op = fdm.d2 if self.operator is fdm.D2 else fdm.d4
        r = op(k_field).on_physical() + self.rhs
        raws = []
        derived = {}
        for label, node, stencil, lam, target, _ in self.bc_rows:
            if stencil is None:
                value = k_field.at(node)
            else:
                key = id(stencil)
                if key not in derived:
                    derived[key] = (fdm.d1 if stencil is fdm.D1 else fdm.d2)(k_field)
                value = derived[key].at(node)
            raws.append(value - target)
        return r, raws

    def evaluate(self, net: DenseNetwork) -> LossBreakdown:
        return self.loss_from_output(forward(net, self.grid.nodes))

    def loss_from_output(self, f_values) -> LossBreakdown:
        """Loss for given raw outputs ``F`` on every grid node (ghosts included)."""
        f_values = np.asarray(f_values, dtype=np.float64)
        r, raws = self._residuals(SampledField(self.multiplier * f_values, self.grid))
        terms = [
            BcTerm(label, raw, penalty_term(raw, lam))
            for (label, _, _, lam, _, _), raw in zip(self.bc_rows, raws)
        ]
        return LossBreakdown(float(np.mean(r * r)), terms)

    def evaluate_with_gradient(self, net: DenseNetwork):
        xs = self.grid.nodes
        cache = forward_cache(net, xs)
        out = cache[1][-1][:, 0]
        if not np.all(np.isfinite(out)):
            raise FloatingPointError("non-finite network output")
        k_field = SampledField(self.multiplier * out, self.grid)
        r, raws = self._residuals(k_field)
        g_k = (2.0 / r.size) * (self.residual_rows.T @ r)
        terms = []
        for (label, _, _, lam, _, row), raw in zip(self.bc_rows, raws):
            terms.append(BcTerm(label, raw, penalty_term(raw, lam)))
            g_k += 2.0 * lam * raw * row
        grad = backward(net, xs, self.multiplier * g_k, cache)
        return LossBreakdown(float(np.mean(r * r)), terms), grad


def bar_loss(spec: BarSpec, strategy: BcStrategy, net: DenseNetwork, grid: Grid) -> LossBreakdown:
    if not isinstance(spec, BarSpec):
        raise ValueError("bar_loss needs a BarSpec")
    return CaseLoss(spec, strategy, grid).evaluate(net)


def beam_loss(spec: BeamSpec, strategy: BcStrategy, net: DenseNetwork, grid: Grid) -> LossBreakdown:
    if not isinstance(spec, BeamSpec):
        raise ValueError("beam_loss needs a BeamSpec")
    return CaseLoss(spec, strategy, grid).evaluate(net)


def loss_gradient(spec, strategy: BcStrategy, net: DenseNetwork, grid: Grid) -> ParamGradient:
    """Exact gradient of the case loss total with respect to every parameter."""
    return CaseLoss(spec, strategy, grid).evaluate_with_gradient(net)[1]
