"""Discrete total variation on regular grids.

Forward differences with a replicate (Neumann) boundary define ``grad``;
``div`` is its exact negative adjoint under :func:`~tvsip.grid.inner_product`.
The proximal map is computed on the dual, so every extracted subgradient has
the form ``div(xi)`` with ``|xi| <= 1`` pointwise.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import _kernels
from .grid import GridMismatchError, GridSpec, ParameterError, Signal

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TvConfig:
    """Discretization and solver settings.

    ``variant=None`` picks anisotropic TV in 1D and isotropic TV in 2D.
    ``solver`` selects the dual iteration: ``"fgp"`` (accelerated projection
    with momentum restart, default) or ``"chambolle"`` (semi-implicit fixed
    point).
    """

    variant: Literal["isotropic", "anisotropic"] | None = None
    boundary: Literal["replicate"] = "replicate"
    prox_tol: float = 1e-6
    prox_max_iter: int = 5000
    solver: Literal["fgp", "chambolle"] = "fgp"

    def __post_init__(self):
        if self.variant not in (None, "isotropic", "anisotropic"):
            raise ParameterError(f"unknown TV variant {self.variant!r}")
        if self.boundary != "replicate":
            raise ParameterError("only the replicate (Neumann) boundary is implemented")
        if not self.prox_tol > 0:
            raise ParameterError("prox_tol must be positive")
        if int(self.prox_max_iter) < 1:
            raise ParameterError("prox_max_iter must be >= 1")
        if self.solver not in ("fgp", "chambolle"):
            raise ParameterError(f"unknown solver {self.solver!r}")

    def isotropic(self, dims: int) -> bool:
        if self.variant is None:
            return dims == 2
        return self.variant == "isotropic"


@dataclass(frozen=True, eq=False)
class VectorField:
    """One component array per grid axis."""

    grid: GridSpec
    components: np.ndarray  # shape (dims, *grid.shape)

    def __post_init__(self):
        comps = np.asarray(self.components, dtype=np.float64)
        if comps.shape != (self.grid.dims,) + self.grid.shape:
            raise GridMismatchError(
                f"field of shape {comps.shape} does not fit grid {self.grid.shape}")
        if not np.all(np.isfinite(comps)):
            raise ValueError("vector field must be finite")
        object.__setattr__(self, "components", comps)

    @classmethod
    def zeros(cls, grid: GridSpec) -> "VectorField":
        return cls(grid, np.zeros((grid.dims,) + grid.shape))

    def inner(self, other: "VectorField") -> float:
        if other.grid != self.grid:
            raise GridMismatchError("vector fields live on different grids")
        return float(np.vdot(self.components, other.components)) * self.grid.cell_volume

    def pointwise_norm(self, isotropic: bool = True) -> np.ndarray:
        if isotropic:
            return np.sqrt((self.components ** 2).sum(axis=0))
        return np.abs(self.components).sum(axis=0)


@dataclass(frozen=True)
class ProxInfo:
    dual: VectorField
    iterations: int
    change: float
    converged: bool


@dataclass(frozen=True)
class Subgradient:
    """An element p of the subdifferential, with provenance.

    ``value`` lies in dJ(base - tau * value) exactly and approximates the
    minimal-norm subgradient at ``base`` as tau -> 0.
    """

    value: Signal
    tau: float
    functional_value: float
    converged: bool = True


def grad(u: Signal) -> VectorField:
    """Forward differences divided by the spacing; zero at the last sample."""
    vals = u.values
    comps = np.zeros((u.grid.dims,) + u.grid.shape)
    for ax, h in enumerate(u.grid.spacing):
        d = np.diff(vals, axis=ax) / h
        sl = [slice(None)] * u.grid.dims
        sl[ax] = slice(0, -1)
        comps[ax][tuple(sl)] = d
    return VectorField(u.grid, comps)


def _div_array(comps: np.ndarray, spacing) -> np.ndarray:
    out = np.zeros(comps.shape[1:])
    dims = len(spacing)
    for ax, h in enumerate(spacing):
        c = comps[ax]
        lead = [slice(None)] * dims
        lag = [slice(None)] * dims
        lead[ax] = slice(0, -1)
        lag[ax] = slice(1, None)
        acc = np.zeros_like(out)
        acc[tuple(lead)] += c[tuple(lead)]
        acc[tuple(lag)] -= c[tuple(lead)]
        out += acc / h
    return out


def div(xi: VectorField) -> Signal:
    """Backward differences; satisfies <grad u, xi> = -<u, div xi> exactly."""
    return Signal(xi.grid, _div_array(xi.components, xi.grid.spacing))


def tv_value(u: Signal, cfg: TvConfig | None = None) -> float:
    """Discrete total variation (isotropic or anisotropic sum of gradient norms)."""
    cfg = cfg or TvConfig()
    g = grad(u)
    return float(g.pointwise_norm(cfg.isotropic(u.grid.dims)).sum()) * u.grid.cell_volume


def _solve_dual(f: np.ndarray, tau: float, grid: GridSpec, cfg: TvConfig,
                init: np.ndarray | None):
    if init is None:
        x = np.zeros((grid.dims,) + grid.shape)
    else:
        x = np.array(init, dtype=np.float64, copy=True)
        if x.shape != (grid.dims,) + grid.shape:
            raise GridMismatchError("dual warm start has the wrong shape")
        for ax in range(grid.dims):
            sl = [slice(None)] * grid.dims
            sl[ax] = -1
            x[ax][tuple(sl)] = 0.0
    ih = [1.0 / h for h in grid.spacing]
    f = np.ascontiguousarray(f, dtype=np.float64)
    max_iter = int(cfg.prox_max_iter)
    if grid.dims == 1:
        kern = _kernels.fgp_1d if cfg.solver == "fgp" else _kernels.chambolle_1d
        it, change = kern(f, float(tau), ih[0], float(cfg.prox_tol), max_iter, x[0])
    else:
        kern = _kernels.fgp_2d if cfg.solver == "fgp" else _kernels.chambolle_2d
        x0 = np.ascontiguousarray(x[0])
        x1 = np.ascontiguousarray(x[1])
        it, change = kern(f, float(tau), ih[0], ih[1], cfg.isotropic(2),
                          float(cfg.prox_tol), max_iter, x0, x1)
        x = np.stack([x0, x1])
    return x, int(it), float(change)


def prox_tv(f: Signal, tau: float, cfg: TvConfig | None = None, *,
            init: VectorField | None = None, full_output: bool = False):
    """Proximal map ``argmin_u 0.5 ||u - f||^2 + tau J(u)``.

    Parameters
    ----------
    f : Signal
    tau : float
        Positive step.
    cfg : TvConfig, optional
    init : VectorField, optional
        Warm start for the dual field (e.g. the previous flow step).
    full_output : bool
        Also return a :class:`ProxInfo` with the dual field and convergence
        flag. Non-convergence is reported there, never raised.

    Returns
    -------
    u : Signal
    info : ProxInfo
        Only when ``full_output`` is true.
    """
    if not tau > 0:
        raise ParameterError(f"tau must be positive, got {tau}")
    cfg = cfg or TvConfig()
    comps, it, change = _solve_dual(f.values, tau, f.grid, cfg,
                                    None if init is None else init.components)
    p = _div_array(comps, f.grid.spacing)
    u = f.like(f.values - tau * p)
    if not full_output:
        return u
    converged = change < cfg.prox_tol
    if not converged:
        log.debug("prox_tv stopped after %d iterations (change %.3g)", it, change)
    return u, ProxInfo(VectorField(f.grid, comps), it, change, converged)


def default_tau(v: Signal) -> float:
    """Extraction step 0.01 * max|v - mean(v)| * h.

    Proportional to the signal amplitude, which makes the extracted
    subgradient exactly invariant under positive scaling of ``v``.
    """
    amp = float(np.abs(v.values - v.values.mean()).max())
    return 0.01 * amp * v.grid.step


def subgradient(v: Signal, tau: float = 0.0, cfg: TvConfig | None = None, *,
                init: VectorField | None = None) -> Subgradient:
    """Canonical subgradient from one implicit step: ``(v - prox_tv(v, tau)) / tau``.

    ``tau = 0`` selects :func:`default_tau`. A constant signal yields the
    zero subgradient.
    """
    cfg = cfg or TvConfig()
    if tau < 0:
        raise ParameterError("tau must be non-negative")
    if tau == 0:
        tau = default_tau(v)
    jv = tv_value(v, cfg)
    if tau == 0 or jv == 0:
        return Subgradient(Signal.zeros(v.grid), max(tau, 0.0), jv, True)
    _, info = prox_tv(v, tau, cfg, init=init, full_output=True)
    # p = div(xi) directly, which avoids the cancellation in (v - u) / tau
    p = Signal(v.grid, _div_array(info.dual.components, v.grid.spacing))
    return Subgradient(p, tau, jv, info.converged)

