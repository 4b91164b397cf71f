"""Spectral transform phi(t) = t * u_tt along the flow, filters and spectra.

The transform is evaluated on the interior time samples k = 1..N-1. The
finite-horizon remainder ``u_N + t_N * p_N`` closes the reconstruction
exactly: summation by parts of ``sum_k t_k (u_{k+1} - 2 u_k + u_{k-1}) / dt``
telescopes to ``u_0 - u_N - t_N p_N``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .flow import FlowTrajectory
from .grid import ParameterError, Signal
from .tv import tv_value

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    times: np.ndarray       # t_k, k = 1..N-1
    bands: np.ndarray       # phi_k stacked along axis 0
    residual: np.ndarray    # u_N + t_N p_N
    mean: float
    dt: float
    grid: object

    def band(self, k: int) -> Signal:
        return Signal(self.grid, self.bands[k])


@dataclass(frozen=True, eq=False)
class Spectrum:
    times: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    clamped: int            # negative second differences of J set to zero


@dataclass(frozen=True)
class FilterSpec:
    """Transfer function over scale t.

    ``lowpass``/``highpass`` use ``t1`` as the cutoff; ``bandpass`` and
    ``bandstop`` use ``t1 < t2``. ``custom`` takes one real weight per
    transform time in ``custom_h``; its last weight also multiplies the
    residual and mean, i.e. H is continued constantly past the horizon.
    """

    kind: Literal["lowpass", "highpass", "bandpass", "bandstop", "custom"]
    t1: float | None = None
    t2: float | None = None
    custom_h: tuple[float, ...] | None = None

    def __post_init__(self):
        k = self.kind
        if k in ("lowpass", "highpass"):
            if self.t1 is None or not self.t1 > 0:
                raise ParameterError(f"{k} needs a positive cutoff t1")
        elif k in ("bandpass", "bandstop"):
            if self.t1 is None or self.t2 is None or not self.t1 > 0:
                raise ParameterError(f"{k} needs positive cutoffs t1 < t2")
            if not self.t1 < self.t2:
                raise ParameterError(f"{k} needs t1 < t2, got t1={self.t1}, t2={self.t2}")
        elif k == "custom":
            if self.custom_h is None:
                raise ParameterError("custom filter needs custom_h")
            object.__setattr__(self, "custom_h", tuple(float(x) for x in self.custom_h))
        else:
            raise ParameterError(f"unknown filter kind {k!r}")

    def weights(self, times: np.ndarray) -> tuple[np.ndarray, float]:
        """Per-band weights and the weight of the residual + mean."""
        t = np.asarray(times)
        if self.kind == "lowpass":
            return (t >= self.t1).astype(float), 1.0
        if self.kind == "highpass":
            return (t < self.t1).astype(float), 0.0
        if self.kind == "bandpass":
            return ((t >= self.t1) & (t < self.t2)).astype(float), 0.0
        if self.kind == "bandstop":
            return ((t < self.t1) | (t >= self.t2)).astype(float), 1.0
        h = np.asarray(self.custom_h, dtype=float)
        if h.shape != t.shape:
            raise ParameterError(f"custom_h has {h.size} entries, transform has {t.size} times")
        return h, float(h[-1]) if h.size else 1.0


def transform(traj: FlowTrajectory) -> SpectralDecomposition:
    """phi_k = t_k (u_{k+1} - 2 u_k + u_{k-1}) / dt^2 for interior k."""
    U = traj.states
    if len(U) < 3:
        raise ParameterError(f"transform needs at least 2 flow steps, got {len(U) - 1}")
    dt = traj.dt
    t = traj.times[1:-1]
    second = (U[2:] - 2.0 * U[1:-1] + U[:-2]) / dt ** 2
    bands = t.reshape((-1,) + (1,) * (U.ndim - 1)) * second
    residual = U[-1] + traj.times[-1] * traj.subgradients[-1]
    return SpectralDecomposition(times=t.copy(), bands=bands, residual=residual,
                                 mean=traj.mean, dt=dt, grid=traj.grid)


def reconstruct(dec: SpectralDecomposition) -> Signal:
    """sum_k phi_k dt + residual + mean."""
    vals = dec.bands.sum(axis=0) * dec.dt + dec.residual + dec.mean
    return Signal(dec.grid, vals)


def apply_filter(dec: SpectralDecomposition, spec: FilterSpec) -> Signal:
    """sum_k H(t_k) phi_k dt, plus residual and mean when H passes large t."""
    h, tail = spec.weights(dec.times)
    vals = np.tensordot(h, dec.bands, axes=(0, 0)) * dec.dt
    if tail != 0.0:
        vals = vals + tail * (dec.residual + dec.mean)
    return Signal(dec.grid, vals)


def spectrum(traj: FlowTrajectory, dec: SpectralDecomposition) -> Spectrum:
    """S1 = ||phi||_L1 and S2 = t * sqrt(d^2/dt^2 J(u(t))).

    The central second difference of J is clamped at zero before the
    square root; the number of clamped samples is reported.
    """
    if len(dec.times) != len(traj.times) - 2:
        raise ParameterError("decomposition does not match trajectory")
    vol = traj.grid.cell_volume
    s1 = np.abs(dec.bands).reshape(len(dec.times), -1).sum(axis=1) * vol
    J = np.array([tv_value(traj.state(k), traj.params.tv) for k in range(len(traj.times))])
    d2 = (J[2:] - 2.0 * J[1:-1] + J[:-2]) / traj.dt ** 2
    neg = d2 < 0
    clamped = int(np.count_nonzero(neg))
    if clamped:
        log.debug("S2: clamped %d negative second differences of J", clamped)
    s2 = dec.times * np.sqrt(np.where(neg, 0.0, d2))
    return Spectrum(times=dec.times.copy(), s1=s1, s2=s2, clamped=clamped)


def parseval_ratio(spec: Spectrum, dt: float, norm_sq: float) -> float:
    """(integral of S2^2 dt) / ||f - mean||^2."""
    if norm_sq == 0:
        return float("nan")
    return float(np.sum(spec.s2 ** 2) * dt / norm_sq)


def check_phi_orthogonality(traj: FlowTrajectory, dec: SpectralDecomposition, *,
                            u_floor: float = 0.05, phi_floor: float = 1e-3) -> float:
    """Worst normalized overlap |<phi_k, u_k>| / (||phi_k|| ||u_k||).

    Only steps with ``||u_k|| > u_floor * ||u_0||`` and
    ``||phi_k|| > phi_floor * max_j ||phi_j||`` count. The first floor sits
    above the sub-step remnant a structure leaves just before extinction,
    whose size is set by the time step rather than by the flow. Returns 0
    when no step qualifies.
    """
    vol = traj.grid.cell_volume
    U = traj.states[1:-1].reshape(len(dec.times), -1)
    P = dec.bands.reshape(len(dec.times), -1)
    nu = np.sqrt((U ** 2).sum(axis=1) * vol)
    nphi = np.sqrt((P ** 2).sum(axis=1) * vol)
    n0 = np.sqrt(np.sum(traj.states[0] ** 2) * vol)
    if n0 == 0 or nphi.max() == 0:
        return 0.0
    ok = (nu > u_floor * n0) & (nphi > phi_floor * nphi.max())
    if not np.any(ok):
        return 0.0
    overlap = np.abs((U * P).sum(axis=1) * vol)[ok] / (nphi[ok] * nu[ok] + 1e-300)
    return float(overlap.max())
