"""Grid-aware signal container and the weighted L2 geometry.

Every formula in the package is written against :func:`inner_product`, which
carries the cell volume ``prod(spacing)`` so that refining the grid converges
to the continuum integral.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class GridMismatchError(ValueError):
    """Two signals live on different grids."""


class DomainError(ValueError):
    """An argument lies outside the domain of a formula (e.g. J(u) = 0)."""


class ParameterError(ValueError):
    """Invalid parameter combination."""


@dataclass(frozen=True)
class GridSpec:
    """Regular 1D or 2D sampling grid.

    Parameters
    ----------
    shape : tuple of int
        Samples per axis; every entry must be at least 2.
    spacing : float or tuple of float
        Grid step per axis. A scalar is broadcast to all axes.
    """

    shape: tuple[int, ...]
    spacing: tuple[float, ...] = field(default=1.0)  # type: ignore[assignment]

    def __post_init__(self):
        shape = tuple(int(s) for s in np.atleast_1d(self.shape))
        if len(shape) not in (1, 2):
            raise ParameterError(f"only 1D and 2D grids are supported, got shape {shape}")
        if any(s < 2 for s in shape):
            raise ParameterError(f"every axis needs at least 2 samples, got {shape}")
        sp = np.broadcast_to(np.asarray(self.spacing, dtype=float), (len(shape),))
        if not np.all(np.isfinite(sp)) or np.any(sp <= 0):
            raise ParameterError(f"spacing must be positive, got {self.spacing}")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "spacing", tuple(float(s) for s in sp))

    @property
    def dims(self) -> int:
        return len(self.shape)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def cell_volume(self) -> float:
        """h^d, the quadrature weight of one sample."""
        return float(np.prod(self.spacing))

    @property
    def step(self) -> float:
        """Representative scalar step (geometric mean of the spacings)."""
        return float(np.prod(self.spacing) ** (1.0 / self.dims))


@dataclass(frozen=True, eq=False)
class Signal:
    """Real-valued samples on a :class:`GridSpec`.

    The value array is copied to float64 and made read-only.
    """

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64, copy=True)
        if vals.shape != self.grid.shape:
            raise GridMismatchError(
                f"values of shape {vals.shape} do not match grid shape {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("signal values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_array(cls, values, spacing: float | Sequence[float] = 1.0) -> "Signal":
        values = np.asarray(values, dtype=float)
        return cls(GridSpec(values.shape, spacing), values)

    @classmethod
    def zeros(cls, grid: GridSpec) -> "Signal":
        return cls(grid, np.zeros(grid.shape))

    def like(self, values) -> "Signal":
        """New signal on the same grid."""
        return Signal(self.grid, values)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.grid.shape

    def mean(self) -> float:
        return float(self.values.mean())

    def max_abs(self) -> float:
        return float(np.abs(self.values).max())

    def _check(self, other: "Signal") -> None:
        if not isinstance(other, Signal):
            raise TypeError(f"expected Signal, got {type(other).__name__}")
        if other.grid != self.grid:
            raise GridMismatchError(f"grid mismatch: {self.grid} vs {other.grid}")

    def __add__(self, other):
        if isinstance(other, Signal):
            self._check(other)
            return self.like(self.values + other.values)
        return self.like(self.values + float(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Signal):
            self._check(other)
            return self.like(self.values - other.values)
        return self.like(self.values - float(other))

    def __neg__(self):
        return self.like(-self.values)

    def __mul__(self, alpha):
        if isinstance(alpha, Signal):
            return NotImplemented
        return self.like(float(alpha) * self.values)

    __rmul__ = __mul__

    def __truediv__(self, alpha):
        return self.like(self.values / float(alpha))

    def __repr__(self) -> str:
        return f"Signal(shape={self.shape}, spacing={self.grid.spacing})"


def inner_product(u: Signal, v: Signal) -> float:
    """Weighted L2 pairing ``sum(u * v) * h^d``."""
    u._check(v)
    return float(np.vdot(u.values, v.values)) * u.grid.cell_volume


def l2_norm(u: Signal) -> float:
    return float(np.sqrt(max(inner_product(u, u), 0.0)))


def split_mean(f: Signal) -> tuple[Signal, float]:
    """Split ``f`` into its zero-mean part and its mean.

    ``zero_mean + mean`` reproduces ``f``; the mean is the null-space
    component of TV and is carried separately through the flow.
    """
    m = f.mean()
    return f.like(f.values - m), m
