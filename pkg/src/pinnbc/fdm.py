"""Uniform 1-D grids and second-order central-difference stencils.

A grid carries ``ghost`` extra nodes past each end of ``[0, L]`` so that the
five-point fourth-derivative stencil can be evaluated at the boundary nodes
themselves. Differentiating a field shrinks its valid range; the result keeps
track of how many nodes it lost on each side (``offset``) instead of padding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# (reach, weights over offsets -reach..reach, power of h in the denominator)
D1 = (1, np.array([-0.5, 0.0, 0.5]), 1)
D2 = (1, np.array([1.0, -2.0, 1.0]), 2)
D4 = (2, np.array([1.0, -4.0, 6.0, -4.0, 1.0]), 4)


@dataclass(frozen=True)
class Grid:
    length: float
    n_nodes: int
    ghost: int
    nodes: np.ndarray

    @property
    def h(self) -> float:
        return self.length / (self.n_nodes - 1)

    @property
    def size(self) -> int:
        return self.nodes.size

    @property
    def physical(self) -> slice:
        """Index range of the nodes covering ``[0, L]``."""
        return slice(self.ghost, self.ghost + self.n_nodes)

    @property
    def x(self) -> np.ndarray:
        return self.nodes[self.physical]

    @property
    def left(self) -> int:
        return self.ghost

    @property
    def right(self) -> int:
        return self.ghost + self.n_nodes - 1


def make_grid(length: float, n_nodes: int = 101, ghost: int = 2) -> Grid:
    if not length > 0:
        raise ValueError(f"domain length must be positive, got {length}")
    if n_nodes < 5:
        raise ValueError(f"need at least 5 nodes for the 5-point stencil, got {n_nodes}")
    if ghost < 0:
        raise ValueError(f"ghost count must be non-negative, got {ghost}")
    h = length / (n_nodes - 1)
    idx = np.arange(-ghost, n_nodes + ghost, dtype=np.float64)
    nodes = idx * h
    # pin the ends so the physical span is exactly [0, L]
    nodes[ghost + n_nodes - 1] = length
    return Grid(float(length), int(n_nodes), int(ghost), nodes)


@dataclass(frozen=True)
class SampledField:
    """Values on the grid nodes ``offset .. grid.size - offset - 1``."""

    values: np.ndarray
    grid: Grid
    offset: int = 0

    def __post_init__(self):
        expected = self.grid.size - 2 * self.offset
        if self.values.shape != (expected,):
            raise ValueError(f"expected {expected} values, got shape {self.values.shape}")

    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes[self.offset:self.grid.size - self.offset]

    def at(self, index: int) -> float:
        """Value at grid node ``index`` (grid numbering, ghosts included)."""
        j = index - self.offset
        if not 0 <= j < self.values.size:
            raise IndexError(f"node {index} lies outside the valid range of this field")
        return float(self.values[j])

    def on_physical(self) -> np.ndarray:
        """Values on the nodes spanning ``[0, L]``."""
        g = self.grid
        if self.offset > g.ghost:
            raise IndexError("stencil reach exceeds the ghost layer")
        return self.values[g.ghost - self.offset:g.ghost - self.offset + g.n_nodes]


def sample(fn, grid: Grid) -> SampledField:
    return SampledField(np.asarray(fn(grid.nodes), dtype=np.float64), grid)


def _apply(stencil, field: SampledField) -> SampledField:
    reach, coef, power = stencil
    v = field.values
    n = v.size
    if n < 2 * reach + 1:
        raise ValueError(f"stencil needs {2 * reach + 1} nodes, field has {n}")
    out = np.zeros(n - 2 * reach)
    for k, c in enumerate(coef):
        if c:
            out += c * v[k:k + n - 2 * reach]
    out /= field.grid.h**power
    return SampledField(out, field.grid, field.offset + reach)


def d1(field: SampledField) -> SampledField:
    return _apply(D1, field)


def d2(field: SampledField) -> SampledField:
    return _apply(D2, field)


def d4(field: SampledField) -> SampledField:
    return _apply(D4, field)


def stencil_rows(stencil, grid: Grid, indices) -> np.ndarray:
    """Dense matrix whose row ``r`` applies ``stencil`` at grid node ``indices[r]``.

    Used to push loss gradients back through a stencil: if ``r = S @ values``
    then ``dL/dvalues = S.T @ dL/dr``.
    """
    reach, coef, power = stencil
    indices = np.atleast_1d(np.asarray(indices))
    if indices.min() < reach or indices.max() >= grid.size - reach:
        raise IndexError("stencil would reach past the grid")
    rows = np.zeros((indices.size, grid.size))
    for r, i in enumerate(indices):
        rows[r, i - reach:i + reach + 1] = coef
    return rows / grid.h**power
