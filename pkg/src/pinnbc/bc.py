"""Boundary-condition strategies: soft penalties, hard output multipliers, or both.

With a multiplier ``B`` the quantity fed to the physics residual is
``K(x) = B(x) * F(x)`` where ``F`` is the raw network output. ``B`` vanishes
where a Dirichlet condition is imposed, so those conditions hold for any
network parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np


@dataclass(frozen=True)
class BarDecay:
    """``B(x) = x * exp(-x)``; zero at the clamped end ``x = 0``."""

    def __call__(self, x):
        return x * np.exp(-x)


@dataclass(frozen=True)
class BeamSine:
    """``B(x) = sin(pi * x / L)``; zero at both supports.

    The right half is evaluated as ``sin(pi * (L - x) / L)`` (same function)
    so that ``B(L)`` is exactly ``0.0`` rather than ``sin(float(pi))``.
    """

    length: float

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError(f"length must be positive, got {self.length}")

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        near = np.where(x > 0.5 * self.length, self.length - x, x)
        return np.sin(np.pi * near / self.length)


Multiplier = Union[BarDecay, BeamSine]


def _check_lambdas(lam1, lam2):
    for name, lam in (("lam1", lam1), ("lam2", lam2)):
        if not (lam >= 0 and math.isfinite(lam)):
            raise ValueError(f"{name} must be a finite non-negative number, got {lam}")


@dataclass(frozen=True)
class Penalty:
    lam1: float = 100.0
    lam2: float = 100.0
    name = "penalty"

    def __post_init__(self):
        _check_lambdas(self.lam1, self.lam2)


@dataclass(frozen=True)
class Reparameterization:
    multiplier: Multiplier
    name = "reparam"


@dataclass(frozen=True)
class Hybrid:
    multiplier: Multiplier
    lam1: float = 100.0
    lam2: float = 100.0
    name = "hybrid"

    def __post_init__(self):
        _check_lambdas(self.lam1, self.lam2)


BcStrategy = Union[Penalty, Reparameterization, Hybrid]


def multiplier_value(tag: Multiplier, x) -> float:
    return float(tag(float(x)))


def reparameterize(tag: Multiplier, xs, f_vals) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.float64)
    f_vals = np.asarray(f_vals, dtype=np.float64)
    if xs.shape != f_vals.shape:
        raise ValueError(f"{xs.shape[0]} coordinates but {f_vals.shape[0]} network values")
    return tag(xs) * f_vals


def reparam_chain_factor(tag: Multiplier, x) -> float:
    """Factor turning dLoss/dK(x) into dLoss/dF(x).

    ``K = B * F`` pointwise and the stencils only ever see samples of ``K``,
    so the factor is ``B(x)`` itself.
    """
    return multiplier_value(tag, x)


def penalty_term(residual, lam: float) -> float:
    if lam < 0:
        raise ValueError(f"penalty coefficient must be non-negative, got {lam}")
    return lam * residual * residual


def multiplier_for(problem: str, length: float) -> Multiplier:
    if problem == "bar":
        return BarDecay()
    if problem == "beam":
        return BeamSine(length)
    raise ValueError(f"unknown problem {problem!r}")


LEGAL = {"bar": ("penalty", "reparam"), "beam": ("penalty", "hybrid")}


def make_strategy(name: str, problem: str, length: float,
                  lam1: float = 100.0, lam2: float = 100.0) -> BcStrategy:
    """Build the strategy named ``"penalty"``, ``"reparam"`` or ``"hybrid"`` for a problem."""
    if problem not in LEGAL:
        raise ValueError(f"unknown problem {problem!r}; expected 'bar' or 'beam'")
    if name not in LEGAL[problem]:
        raise ValueError(
            f"strategy {name!r} is not available for the {problem} problem "
            f"(choose from {', '.join(LEGAL[problem])})"
        )
    if name == "penalty":
        return Penalty(lam1, lam2)
    tag = multiplier_for(problem, length)
    if name == "reparam":
        return Reparameterization(tag)
    return Hybrid(tag, lam1, lam2)
