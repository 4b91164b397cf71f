"""Semi-inner-products, angles, Bregman distances and separability measures.

Everything here works for any one-homogeneous functional exposed through a
:class:`FunctionalHandle` (a value map and a canonical subgradient map).
Each quantity is evaluated at that single canonical subgradient, so results
are single-valued even though the subdifferential is a set.

Quantities that need an explicit subgradient accept ``pv=``/``pu=`` keyword
arguments, either a :class:`~tvsip.tv.Subgradient` or a plain
:class:`~tvsip.grid.Signal`; sharing one p(v) between calls makes algebraic
identities hold to rounding.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .grid import DomainError, ParameterError, Signal, inner_product, l2_norm
from .tv import Subgradient, TvConfig, subgradient, tv_value

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FunctionalHandle:
    """A one-homogeneous convex functional: value J and canonical subgradient."""

    value: Callable[[Signal], float]
    subgrad: Callable[[Signal], Subgradient]
    name: str = "J"


def tv_handle(cfg: TvConfig | None = None, tau: float = 0.0) -> FunctionalHandle:
    """Total variation with the prox-step subgradient selection."""
    cfg = cfg or TvConfig()
    return FunctionalHandle(
        value=lambda u: tv_value(u, cfg),
        subgrad=lambda u: subgradient(u, tau, cfg),
        name="TV",
    )


def lq_norm(u: Signal, q: float) -> float:
    vol = u.grid.cell_volume
    return float((np.sum(np.abs(u.values) ** q) * vol) ** (1.0 / q))


def lq_subgradient(u: Signal, q: float) -> Subgradient:
    """Gradient of the L^q norm: |u|^(q-2) u ||u||_q^(1-q)."""
    if not 1 < q < math.inf:
        raise ParameterError(f"q must lie in (1, inf), got {q}")
    norm = lq_norm(u, q)
    if norm == 0:
        raise DomainError("the L^q norm is not differentiable at zero")
    vals = np.sign(u.values) * np.abs(u.values) ** (q - 1) * norm ** (1 - q)
    return Subgradient(u.like(vals), tau=0.0, functional_value=norm)


def lq_handle(q: float) -> FunctionalHandle:
    return FunctionalHandle(value=lambda u: lq_norm(u, q),
                            subgrad=lambda u: lq_subgradient(u, q),
                            name=f"L{q:g}")


_DEFAULT = None


def _handle(F):
    global _DEFAULT
    if F is not None:
        return F
    if _DEFAULT is None:
        _DEFAULT = tv_handle()
    return _DEFAULT


def _pvalue(p) -> Signal:
    return p.value if isinstance(p, Subgradient) else p


def _sub(v: Signal, F: FunctionalHandle, p) -> Signal:
    return _pvalue(p) if p is not None else F.subgrad(v).value


def _acos(c: float) -> tuple[float, bool]:
    if c > 1.0 or c < -1.0:
        log.debug("clamping acos argument %.6g", c)
        return math.acos(min(1.0, max(-1.0, c))), True
    return math.acos(c), False


def _positive(j: float, what: str) -> None:
    if not j > 0:
        raise DomainError(f"J({what}) = {j:g}; the formula needs J > 0 (null-space argument)")


def hsip(u: Signal, v: Signal, F: FunctionalHandle | None = None, *, pv=None) -> float:
    """Half semi-inner-product <u, p(v)>."""
    F = _handle(F)
    return inner_product(u, _sub(v, F, pv))


def sip(u: Signal, v: Signal, F: FunctionalHandle | None = None, *, pv=None) -> float:
    """Semi-inner-product [u, v] = <u, p(v)> J(v); zero when J(v) = 0."""
    F = _handle(F)
    jv = F.value(v)
    if jv == 0:
        return 0.0
    return hsip(u, v, F, pv=pv) * jv


def angle(u: Signal, v: Signal, F: FunctionalHandle | None = None, *, pv=None) -> float:
    """acos([u, v] / (J(u) J(v))), in radians; not symmetric in (u, v)."""
    F = _handle(F)
    ju, jv = F.value(u), F.value(v)
    _positive(ju, "u")
    _positive(jv, "v")
    return _acos(hsip(u, v, F, pv=pv) * jv / (ju * jv))[0]


def _pair(u, v, F, pu, pv):
    ju, jv = F.value(u), F.value(v)
    _positive(ju, "u")
    _positive(jv, "v")
    return ju, jv, sip(u, v, F, pv=pv), sip(v, u, F, pv=pu)


def angle_sym_a(u: Signal, v: Signal, F: FunctionalHandle | None = None, *,
                pu=None, pv=None) -> float:
    """Symmetric angle from the algebraic mean of [u, v] and [v, u]."""
    ju, jv, suv, svu = _pair(u, v, _handle(F), pu, pv)
    return _acos(0.5 * (suv + svu) / (ju * jv))[0]


def signed_sqrt(a: float, b: float) -> float:
    """sgn(ab) sqrt(|ab|)."""
    return math.copysign(math.sqrt(abs(a * b)), a * b) if a * b != 0 else 0.0


def angle_sym_g(u: Signal, v: Signal, F: FunctionalHandle | None = None, *,
                pu=None, pv=None) -> float:
    """Symmetric angle from the signed geometric mean of [u, v] and [v, u]."""
    ju, jv, suv, svu = _pair(u, v, _handle(F), pu, pv)
    return _acos(signed_sqrt(suv, svu) / (ju * jv))[0]


def bregman(u: Signal, v: Signal, F: FunctionalHandle | None = None, *, pv=None,
            one_homogeneous: bool = True) -> float:
    """Bregman distance D(u, v) at the subgradient p(v).

    The one-homogeneous form J(u) - <p(v), u> is the default; the general
    form J(u) - J(v) - <p(v), u - v> differs from it by J(v) - <p(v), v>,
    which is zero for an exact subgradient.
    """
    F = _handle(F)
    p = _sub(v, F, pv)
    if one_homogeneous:
        return F.value(u) - inner_product(p, u)
    return F.value(u) - F.value(v) - inner_product(p, u - v)


def orth_measure(u: Signal, v: Signal, F: FunctionalHandle | None = None, *,
                 pu=None, pv=None) -> float:
    """O(u, v) = 1 - sqrt(|[u,v][v,u]|) / (J(u) J(v)), clamped to [0, 1]."""
    ju, jv, suv, svu = _pair(u, v, _handle(F), pu, pv)
    o = 1.0 - math.sqrt(abs(suv * svu)) / (ju * jv)
    return min(1.0, max(0.0, o))


def lis_defect(u: Signal, v: Signal, F: FunctionalHandle | None = None, *,
               pu=None, pv=None, juv: float | None = None) -> float:
    """E(u, v) = <u+v, p(u)> + <u+v, p(v)> - J(u+v)."""
    F = _handle(F)
    w = u + v
    if juv is None:
        juv = F.value(w)
    return hsip(w, u, F, pv=pu) + hsip(w, v, F, pv=pv) - juv


def lis_measure(u: Signal, v: Signal, F: FunctionalHandle | None = None, *,
                pu=None, pv=None) -> float:
    """L(u, v) = 1 - |E(u, v)| / J(u + v)."""
    F = _handle(F)
    juv = F.value(u + v)
    _positive(juv, "u+v")
    return 1.0 - abs(lis_defect(u, v, F, pu=pu, pv=pv, juv=juv)) / juv


@dataclass(frozen=True)
class MeasureReport:
    j_u: float
    j_v: float
    j_uv: float
    sip_uv: float
    sip_vu: float
    hsip_uv: float
    hsip_vu: float
    angle_uv: float
    angle_sym_a: float
    angle_sym_g: float
    bregman_uv: float
    orth_O: float
    lis_E: float
    lis_L: float
    subgrad_defect: float = field(default=float("nan"))
    clamped: int = 0
    converged: bool = True

    def as_dict(self) -> dict:
        return asdict(self)


def full_report(u: Signal, v: Signal, F: FunctionalHandle | None = None) -> MeasureReport:
    """All measures from one subgradient evaluation each at u, v and u + v.

    ``subgrad_defect`` is ||p(u+v) - p(u) - p(v)|| / ||p(u+v)||.
    """
    F = _handle(F)
    w = u + v
    ju, jv, juv = F.value(u), F.value(v), F.value(w)
    _positive(ju, "u")
    _positive(jv, "v")
    _positive(juv, "u+v")
    su, sv, sw = F.subgrad(u), F.subgrad(v), F.subgrad(w)
    pu, pv, pw = su.value, sv.value, sw.value

    h_uv = inner_product(u, pv)
    h_vu = inner_product(v, pu)
    s_uv, s_vu = h_uv * jv, h_vu * ju
    clamped = 0
    a_uv, c1 = _acos(s_uv / (ju * jv))
    a_sa, c2 = _acos(0.5 * (s_uv + s_vu) / (ju * jv))
    a_sg, c3 = _acos(signed_sqrt(s_uv, s_vu) / (ju * jv))
    clamped += c1 + c2 + c3
    o_raw = 1.0 - math.sqrt(abs(s_uv * s_vu)) / (ju * jv)
    o = min(1.0, max(0.0, o_raw))
    clamped += o != o_raw
    e = inner_product(w, pu) + inner_product(w, pv) - juv
    npw = l2_norm(pw)
    defect = l2_norm(pw - pu - pv) / npw if npw > 0 else float("nan")
    return MeasureReport(
        j_u=ju, j_v=jv, j_uv=juv,
        sip_uv=s_uv, sip_vu=s_vu, hsip_uv=h_uv, hsip_vu=h_vu,
        angle_uv=a_uv, angle_sym_a=a_sa, angle_sym_g=a_sg,
        bregman_uv=ju - h_uv,
        orth_O=o, lis_E=e, lis_L=1.0 - abs(e) / juv,
        subgrad_defect=defect, clamped=int(clamped),
        converged=bool(su.converged and sv.converged and sw.converged),
    )
