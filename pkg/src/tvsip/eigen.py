"""Nonlinear eigenfunctions of TV: constructors, Rayleigh quotient, residuals.

A signal f is an eigenfunction when lambda * f is a subgradient of J at f.
Under the gradient flow it then shrinks linearly, u(t) = (1 - lambda t)^+ f.

In 1D with the Neumann boundary, a zero-mean box is an exact discrete
eigenfunction: the dual field that ramps linearly from 0 to 1 across the
background, stays at 1 on the left edge, ramps down inside the box, and so
on, produces a subgradient proportional to f. With b the box value above
the mean, lambda = 2 / (w * b * h). Rasterized discs are only approximate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import DomainError, GridSpec, ParameterError, Signal, l2_norm
from .sip import FunctionalHandle, _handle


@dataclass(frozen=True)
class Eigenpair:
    """A signal with its Rayleigh quotient and eigen-residual ||p - lam f|| / ||p||."""

    signal: Signal
    lam: float
    residual: float

    def __post_init__(self):
        if self.lam < 0:
            raise ParameterError("eigenvalue must be non-negative")


def rayleigh_lambda(f: Signal, F: FunctionalHandle | None = None) -> float:
    """J(f) / ||f||^2."""
    nf = l2_norm(f)
    if nf == 0:
        raise DomainError("Rayleigh quotient of the zero signal")
    return _handle(F).value(f) / nf ** 2


def eigen_residual(f: Signal, F: FunctionalHandle | None = None) -> Eigenpair:
    """Measure how far ``f`` is from an eigenfunction of ``F``."""
    F = _handle(F)
    lam = rayleigh_lambda(f, F)
    p = F.subgrad(f).value
    npn = l2_norm(p)
    res = l2_norm(p - lam * f) / npn if npn > 0 else 0.0
    return Eigenpair(f, lam, float(res))


def box_1d(n: int, start: int, w: int, a: float = 1.0, spacing: float = 1.0) -> Signal:
    """Box of value ``a`` on ``[start, start + w)`` over a zero background."""
    if w < 1 or start < 0 or start + w > n:
        raise ParameterError(f"box [{start}, {start + w}) does not fit in {n} samples")
    vals = np.zeros(n)
    vals[start:start + w] = a
    return Signal(GridSpec((n,), spacing), vals)


def make_box_1d(n: int, w: int, a: float = 1.0, *, offset: int = 0,
                spacing: float = 1.0, F: FunctionalHandle | None = None) -> Eigenpair:
    """Zero-mean box eigenfunction of 1D anisotropic TV.

    The box has value ``a`` on ``w`` samples and ``-a w / (n - w)`` elsewhere,
    so ``a`` is the height above the mean and lambda = 2 / (w a h).

    Parameters
    ----------
    n, w : int
        Grid length and box width in samples, ``2 <= w <= n - 2``.
    a : float
        Box value (non-zero).
    offset : int
        Shift from the centred position. The box is an exact discrete
        eigenfunction only when centred; shifted boxes keep lambda but carry
        a non-zero residual, which is reported.
    """
    if not 2 <= w <= n - 2:
        raise ParameterError(f"need 2 <= w <= n-2, got n={n}, w={w}")
    if a == 0:
        raise ParameterError("box amplitude must be non-zero")
    start = (n - w) // 2 + int(offset)
    if start < 1 or start + w > n - 1:
        raise ParameterError(f"offset {offset} pushes the box onto the boundary")
    vals = np.full(n, -a * w / (n - w))
    vals[start:start + w] = a
    return eigen_residual(Signal(GridSpec((n,), spacing), vals), F)


def disc_2d(n: int, r: float, center: tuple[float, float], height: float = 1.0,
            spacing: float = 1.0, supersample: int = 8) -> Signal:
    """Disc of value ``height`` on a zero background.

    Each pixel holds the covered fraction of its cell, estimated on a
    ``supersample x supersample`` sub-grid; ``supersample=1`` gives the
    binary (pixel-centre) raster. Partial coverage keeps the discrete
    perimeter close to 2 pi r, where a binary staircase overestimates it.
    """
    if supersample < 1:
        raise ParameterError("supersample must be >= 1")
    i, j = np.mgrid[0:n, 0:n]
    sub = (np.arange(supersample) + 0.5) / supersample - 0.5
    acc = np.zeros((n, n))
    for a in sub:
        di = (i + a - center[0]) ** 2
        for b in sub:
            acc += di + (j + b - center[1]) ** 2 <= r * r
    return Signal(GridSpec((n, n), spacing), height * acc / supersample ** 2)


def _check_disc(n, r, center, margin=2):
    cy, cx = center
    if not r > 0:
        raise ParameterError("radius must be positive")
    if cy - r < margin or cx - r < margin or cy + r > n - 1 - margin or cx + r > n - 1 - margin:
        raise ParameterError(f"disc r={r} at {center} violates the {margin}-sample margin in n={n}")


def make_disc_2d(n: int, r: float, center: tuple[float, float] | None = None,
                 height: float = 1.0, *, spacing: float = 1.0,
                 F: FunctionalHandle | None = None) -> Eigenpair:
    """Zero-mean rasterized disc; approximate eigenfunction of isotropic TV.

    The continuum value is lambda = 2 / (r h_eff) with
    ``h_eff = height * (1 - area / |domain|)`` the disc value above the mean.
    The residual reports how far the rasterization is from exactness.
    """
    if center is None:
        center = ((n - 1) / 2, (n - 1) / 2)
    _check_disc(n, r, center)
    f = disc_2d(n, r, center, height, spacing)
    f = f - f.mean()
    return eigen_residual(f, F)


def eigen_flow_solution(pair: Eigenpair, t: float) -> Signal:
    """(1 - lambda t)^+ f."""
    if t < 0:
        raise ParameterError("t must be non-negative")
    return pair.signal * max(0.0, 1.0 - pair.lam * t)
