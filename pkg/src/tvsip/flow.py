"""Implicit-Euler integration of the TV gradient flow du/dt = -p, p in dJ(u)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import ParameterError, Signal, l2_norm, split_mean
from .tv import TvConfig, prox_tv, _div_array


@dataclass(frozen=True)
class FlowParams:
    """Time stepping for :func:`run_flow`.

    Parameters
    ----------
    dt : float
        Uniform time step.
    horizon : float
        Final time T (must be at least ``2 * dt``).
    tv : TvConfig
    stop_eps : float
        Early stop once ``||u_k|| < stop_eps * ||u_0||`` (zero-mean parts).
        Set to 0 to always integrate to the horizon.
    extra_steps : int
        Steps taken after the stop criterion is first met, so that the last
        extinction event is an interior point of the second time difference.
    """

    dt: float
    horizon: float
    tv: TvConfig = field(default_factory=TvConfig)
    stop_eps: float = 1e-4
    extra_steps: int = 2

    def __post_init__(self):
        if not self.dt > 0:
            raise ParameterError("dt must be positive")
        if not self.horizon >= 2 * self.dt:
            raise ParameterError("horizon must be at least 2*dt")
        if self.stop_eps < 0:
            raise ParameterError("stop_eps must be non-negative")
        if self.extra_steps < 0:
            raise ParameterError("extra_steps must be non-negative")

    @classmethod
    def for_eigenvalues(cls, lam_max: float, lam_min: float | None = None, *,
                        steps_per_scale: int = 50, horizon_factor: float = 1.5,
                        **kwargs) -> "FlowParams":
        """dt = (1/lam_max)/steps_per_scale; horizon = horizon_factor/lam_min."""
        if lam_max <= 0:
            raise ParameterError("eigenvalue estimates must be positive")
        lam_min = lam_max if lam_min is None else lam_min
        dt = 1.0 / lam_max / steps_per_scale
        return cls(dt=dt, horizon=max(horizon_factor / lam_min, 2 * dt), **kwargs)


@dataclass(frozen=True, eq=False)
class FlowTrajectory:
    """Recorded flow: ``states[k]`` at ``times[k] = k * dt``.

    ``subgradients[k] = (states[k-1] - states[k]) / dt`` for k >= 1 and
    ``subgradients[0]`` copies ``subgradients[1]``. ``converged[k]`` flags the
    prox solve that produced step k (``converged[0]`` is always true).
    """

    params: FlowParams
    times: np.ndarray
    states: np.ndarray
    subgradients: np.ndarray
    mean: float
    converged: np.ndarray
    iterations: np.ndarray
    grid: object

    @property
    def n_steps(self) -> int:
        return len(self.times) - 1

    @property
    def dt(self) -> float:
        return self.params.dt

    def state(self, k: int) -> Signal:
        return Signal(self.grid, self.states[k])

    def subgradient(self, k: int) -> Signal:
        return Signal(self.grid, self.subgradients[k])

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))


def run_flow(f: Signal, params: FlowParams) -> FlowTrajectory:
    """Integrate the flow from ``f`` with ``u_{k+1} = prox_tv(u_k, dt)``.

    The mean of ``f`` is stripped first and stored on the trajectory. Each
    step is warm-started from the previous dual field, and the recorded
    subgradient is ``div(xi)`` so that ``u_{k+1} = u_k - dt * p_{k+1}``
    holds to rounding.
    """
    u0, mean = split_mean(f)
    grid = f.grid
    dt = params.dt
    n_max = int(math.ceil(params.horizon / dt - 1e-9))
    norm0 = l2_norm(u0)

    states = [u0.values.copy()]
    subs: list[np.ndarray] = []
    flags = [True]
    iters = [0]
    dual = None
    u = u0.values.copy()
    remaining = None
    if norm0 == 0.0:
        remaining = params.extra_steps
    for _ in range(n_max):
        if norm0 == 0.0:
            p = np.zeros_like(u)
            ok, it = True, 0
        else:
            _, info = prox_tv(Signal(grid, u), dt, params.tv, init=dual, full_output=True)
            dual = info.dual
            p = _div_array(dual.components, grid.spacing)
            ok, it = info.converged, info.iterations
        u = u - dt * p
        states.append(u.copy())
        subs.append(p)
        flags.append(ok)
        iters.append(it)
        if remaining is None and params.stop_eps > 0 and \
                np.sqrt(np.vdot(u, u) * grid.cell_volume) < params.stop_eps * norm0:
            remaining = params.extra_steps
        if remaining is not None:
            if remaining == 0:
                break
            remaining -= 1

    subs.insert(0, subs[0].copy())
    n = len(states)
    return FlowTrajectory(
        params=params,
        times=dt * np.arange(n),
        states=np.array(states),
        subgradients=np.array(subs),
        mean=mean,
        converged=np.array(flags, dtype=bool),
        iterations=np.array(iters, dtype=int),
        grid=grid,
    )


def extinction_time(traj: FlowTrajectory) -> float:
    """First recorded time with ``||u_k|| < stop_eps * ||u_0||``; the horizon if never."""
    vol = traj.grid.cell_volume
    flat = traj.states.reshape(len(traj.states), -1)
    norms = np.sqrt((flat ** 2).sum(axis=1) * vol)
    if norms[0] == 0.0:
        return 0.0
    hit = np.nonzero(norms < traj.params.stop_eps * norms[0])[0]
    if hit.size == 0:
        return float(traj.params.horizon)
    return float(traj.times[hit[0]])
