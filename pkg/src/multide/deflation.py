"""Iterative objective modification: repulsion penalties and residual objectives.

The penalty adds, around every foreign subpopulation's best approximation,
a discontinuous bump of height ``magnitude * exp(-distance)`` inside a fixed
radius. A subpopulation never penalizes proximity to its own anchor, so its
search stays free while the others' neighborhoods become unattractive.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class PenaltyParams:
    """Magnitude and radius of the repulsion regions.

    ``magnitude`` should dominate the objective's dynamic range near the
    minima (the floor of an active penalty is magnitude * exp(-radius));
    that is guidance, not a hard check. ``radius`` must stay below the
    separation of the minimizers being sought, or a repulsion region will
    swallow a solution that has not been found yet.
    """

    magnitude: float
    radius: float

    def __post_init__(self):
        if self.magnitude <= 0.0:
            raise ConfigurationError("penalty magnitude must be positive")
        if self.radius <= 0.0:
            raise ConfigurationError("penalty radius must be positive")


@dataclass
class AnchorSet:
    """Current best approximation of each subpopulation, one per column.

    ``matrix`` has shape (d, n_subpops); column j is the repulsion center
    contributed by subpopulation j.
    """

    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.array(self.matrix, dtype=float)
        if self.matrix.ndim != 2:
            raise ConfigurationError("anchor matrix must be 2-D (dim x subpopulations)")

    @classmethod
    def from_vectors(cls, vectors: Sequence[np.ndarray]) -> AnchorSet:
        return cls(np.stack([np.asarray(v, dtype=float) for v in vectors], axis=1))

    @property
    def count(self) -> int:
        return self.matrix.shape[1]

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def anchor(self, j: int) -> np.ndarray:
        return self.matrix[:, j]


@dataclass
class NonlinearSystem:
    """A system of scalar residual functions over the search domain.

    Each residual takes the coordinate vector. When ``vectorized`` is true
    the residuals must also accept a (d, n) array of column points and
    return n values, which lets engines evaluate trial batches in one call.
    """

    residuals: tuple
    vectorized: bool = False

    def __post_init__(self):
        self.residuals = tuple(self.residuals)
        if len(self.residuals) < 1:
            raise ConfigurationError("a nonlinear system needs at least one residual")


def indicator(delta: float, radius: float) -> int:
    """1 when the distance is inside or on the penalty radius, else 0."""
    return 1 if delta <= radius else 0


def penalty_term(x, own_index: int, anchors: AnchorSet, params: PenaltyParams) -> float:
    """Repulsion contribution at ``x`` from every foreign anchor.

    The caller's own anchor (column ``own_index``) is excluded by index, so
    two subpopulations that happen to share a best point still repel each
    other.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ConfigurationError("point must be a 1-D coordinate vector")
    return float(penalty_batch(x[None, :], own_index, anchors, params)[0])


def penalized_objective(base: Callable, x, own_index: int, anchors: AnchorSet,
                        params: PenaltyParams) -> float:
    """Base objective plus the repulsion term; exactly one base evaluation."""
    x = np.asarray(x, dtype=float)
    return float(base(x)) + penalty_term(x, own_index, anchors, params)


def penalty_batch(pts: np.ndarray, own_index: int, anchors: AnchorSet,
                  params: PenaltyParams) -> np.ndarray:
    """Vectorized :func:`penalty_term` over the rows of ``pts``."""
    pts = np.asarray(pts, dtype=float)
    if pts.shape[1] != anchors.dim:
        raise ConfigurationError("point dimension does not match anchor matrix")
    cols = [k for k in range(anchors.count) if k != own_index]
    if not cols:
        return np.zeros(len(pts))
    foreign = anchors.matrix[:, cols]                       # (d, K)
    diff = pts[:, :, None] - foreign[None, :, :]            # (n, d, K)
    delta = np.sqrt(np.sum(diff * diff, axis=1))            # (n, K)
    active = delta <= params.radius
    return params.magnitude * np.sum(np.exp(-delta) * active, axis=1)


class ResidualObjective:
    """Sum of squared residuals of a nonlinear system; zero exactly at roots."""

    def __init__(self, system: NonlinearSystem):
        self.system = system

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(sum(float(f(x)) ** 2 for f in self.system.residuals))

    def batch(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if self.system.vectorized:
            cols = pts.T
            total = np.zeros(len(pts))
            for f in self.system.residuals:
                r = np.asarray(f(cols), dtype=float)
                total += r * r
            return total
        return np.array([self(p) for p in pts])


def residual_objective(system: NonlinearSystem) -> ResidualObjective:
    """Build the scalar objective whose global minima are the system's roots.

    Composing the result with :func:`penalized_objective` gives the
    penalized system objective with no extra code path.
    """
    return ResidualObjective(system)
