"""Fractional Laplacian L and its carre du champ operators Gamma, Gamma_2.

Normalization: with ``c = c_{beta,d}`` all three operators use the kernel
``(c/2) |h|^{-d-beta}`` on the whole space,

    L u(x)       = (c/2) int [u(x+h) - 2u(x) + u(x-h)] |h|^{-d-beta} dh
    Gamma u(x)   = (c/2) int [u(x+h) - u(x)]^2 |h|^{-d-beta} dh
    Gamma_2 u(x) = (c/2)^2 int int [u(x+h+s) - u(x+h) - u(x+s) + u(x)]^2 |h|^{-d-beta} |s|^{-d-beta} dh ds

so that L is exactly ``-(-Delta)^{beta/2}`` (Fourier symbol ``-|xi|^beta``) and
Gamma, Gamma_2 are the carre du champ and its iterate for this L.  In one
dimension the even half-line forms read ``L u(0) = 2c int_0^inf u(h) h^{-1-beta}``
for even u with u(0) = 0, and ``Gamma_2 u(0) = c^2 int_0^inf int_0^h (...)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from .errors import DomainError, GrowthTooFast
from .profiles import ProfileFunction, translated
from .quadrature import (
    OperatorValue,
    QuadratureConfig,
    integrate_adaptive,
    integrate_nested,
    integrate_singular_kernel,
    integrate_wedge,
    wedge_breakpoints,
)


@dataclass(frozen=True)
class FracParams:
    beta: float
    dim: int = 1

    def __post_init__(self):
        if not 0 < self.beta < 2:
            raise DomainError("beta must satisfy 0 < beta < 2")
        if self.dim < 1:
            raise DomainError("dim must be >= 1")


@dataclass(frozen=True)
class CDParams:
    kappa: float = 0.0
    N_dim: float = math.inf

    def __post_init__(self):
        if not self.N_dim > 0:
            raise DomainError("N_dim must be positive")


def normalizing_constant(p: FracParams) -> float:
    b, d = p.beta, p.dim
    return 2**b * math.gamma((d + b) / 2) / (math.pi ** (d / 2) * abs(math.gamma(-b / 2)))


def b_alpha(alpha: float) -> float:
    """int_R (1 + z^2)^{-alpha} dz."""
    if not 2 * alpha > 1:
        raise DomainError("B_alpha needs 2*alpha > 1")
    return math.sqrt(math.pi) * math.gamma(alpha - 0.5) / math.gamma(alpha)


def c_alpha_n(alpha: float, n: int) -> float:
    """int_{R^n} (1 + |y|^2)^{-alpha} dy as a product of B's."""
    if n < 0 or not 2 * alpha > n:
        raise DomainError("C_{alpha,n} needs n >= 0 and 2*alpha > n")
    return math.prod(b_alpha(alpha - j / 2) for j in range(n))


def b_alpha_quadrature(alpha: float, cfg: QuadratureConfig | None = None) -> OperatorValue:
    if not 2 * alpha > 1:
        raise DomainError("B_alpha needs 2*alpha > 1")
    return integrate_adaptive(lambda z: (1 + z * z) ** -alpha, -math.inf, math.inf, cfg,
                              tail_exponent=-2 * alpha)


def c_alpha_n_quadrature(alpha: float, n: int, cfg: QuadratureConfig | None = None) -> OperatorValue:
    """Direct n-fold quadrature of C_{alpha,n} for n <= 2."""
    if n < 0 or not 2 * alpha > n:
        raise DomainError("C_{alpha,n} needs n >= 0 and 2*alpha > n")
    if n == 0:
        return OperatorValue(1.0)
    if n == 1:
        return b_alpha_quadrature(alpha, cfg)
    if n > 2:
        raise NotImplementedError("quadrature route is implemented for n <= 2")
    # 4 * int_0^inf int_0^inf (1 + y1^2 + y2^2)^{-alpha} dy2 dy1
    val = integrate_nested(lambda y1, y2: (1 + y1 * y1 + y2 * y2) ** -alpha, 0.0, math.inf,
                           lambda y1: (0.0, math.inf), cfg,
                           inner_tail_exponent=-2 * alpha, outer_tail_exponent=1 - 2 * alpha,
                           inner_breakpoints=lambda y1: (max(y1, 1.0),),
                           inner_tail_cutoff=lambda y1: 1e6 * max(y1, 1.0))
    return val.scaled(4.0)


def reduction_constant(p: FracParams) -> float:
    if p.dim == 1:
        return 1.0
    c1 = normalizing_constant(FracParams(p.beta, 1))
    return normalizing_constant(p) * c_alpha_n((p.dim + p.beta) / 2, p.dim - 1) / c1


def _cfg_for(u: ProfileFunction, cfg: QuadratureConfig | None, x: float = 0.0) -> QuadratureConfig:
    """Push the tail cutoff beyond the support so that the extrapolated tail is an exact power law."""
    cfg = cfg or QuadratureConfig()
    if u.compact and cfg.tail_cutoff < 1e3 * (u.support_radius + abs(x)):
        cfg = replace(cfg, tail_cutoff=1e3 * (u.support_radius + abs(x)))
    return cfg


def _require_1d(p: FracParams) -> None:
    if p.dim != 1:
        raise DomainError("pointwise operators act on 1-d profiles; use lift_to_dim for d > 1")


def _growth(u: ProfileFunction) -> float:
    return 0.0 if u.bounded else u.growth_exponent


def _h_breakpoints(u: ProfileFunction, x: float) -> list[float]:
    return sorted({abs(p - x) for p in u.feature_points() if p != x})


def frac_laplacian(u: ProfileFunction, x: float, p: FracParams, cfg: QuadratureConfig | None = None,
                   *, M: float | None = None) -> OperatorValue:
    """L u(x) = c int_0^inf [u(x+h) - 2u(x) + u(x-h)] h^{-1-beta} dh (clipped to h <= M if given)."""
    _require_1d(p)
    cfg = _cfg_for(u, cfg, x)
    g = _growth(u)
    if M is None and g >= p.beta:
        raise GrowthTooFast(f"growth exponent {g} must be < beta = {p.beta}")
    c = normalizing_constant(p)
    ux = float(u.eval(np.array(x)))
    second = lambda h: u.eval(x + h) - 2 * ux + u.eval(x - h)
    if M is not None:
        if not M > 0:
            raise ValueError("truncation radius M must be positive")
        bps = [b for b in _h_breakpoints(u, x) if b < M]
        if u.zero_radius > 0 and M <= u.zero_radius - abs(x):
            return OperatorValue(0.0)
        val = integrate_singular_kernel(second, p.beta, cfg, upper=M, breakpoints=bps)
    else:
        val = integrate_singular_kernel(second, p.beta, cfg, growth_exponent=g,
                                        breakpoints=_h_breakpoints(u, x))
    return val.scaled(c)


def frac_laplacian_truncated(u: ProfileFunction, x: float, M: float, p: FracParams,
                             cfg: QuadratureConfig | None = None) -> OperatorValue:
    return frac_laplacian(u, x, p, cfg, M=M)


def gamma(u: ProfileFunction, x: float, p: FracParams, cfg: QuadratureConfig | None = None) -> OperatorValue:
    """Gamma u(x) = (c/2) int_0^inf ([u(x+h)-u(x)]^2 + [u(x-h)-u(x)]^2) h^{-1-beta} dh."""
    _require_1d(p)
    cfg = _cfg_for(u, cfg, x)
    g = _growth(u)
    if 2 * g >= p.beta:
        raise GrowthTooFast(f"Gamma needs 2*growth < beta, got growth {g}, beta {p.beta}")
    c = normalizing_constant(p)
    ux = float(u.eval(np.array(x)))
    sq = lambda h: (u.eval(x + h) - ux) ** 2 + (u.eval(x - h) - ux) ** 2
    val = integrate_singular_kernel(sq, p.beta, cfg, growth_exponent=2 * g,
                                    breakpoints=_h_breakpoints(u, x))
    return val.scaled(c / 2)


def gamma_at_origin_direct(u: ProfileFunction, p: FracParams, cfg: QuadratureConfig | None = None) -> OperatorValue:
    """c int_0^inf u(h)^2 h^{-1-beta} dh: Gamma u(0) for even u with u(0) = 0."""
    cfg = _cfg_for(u, cfg)
    c = normalizing_constant(p)
    val = integrate_adaptive(lambda h: u.eval(h) ** 2 * h ** (-1 - p.beta), 0.0, math.inf, cfg,
                             head_exponent=3 - p.beta, tail_exponent=2 * _growth(u) - 1 - p.beta,
                             breakpoints=[f for f in u.feature_points() if f > 0])
    return val.scaled(c)


def _gamma2_tail(u: ProfileFunction, beta: float) -> float:
    g = _growth(u)
    return max(2 * g - 1 - 2 * beta, -1 - beta, 2 * g - 3 - beta)


def _even_brackets(u: ProfileFunction):
    u0 = float(u.eval(np.array(0.0)))
    w = lambda y: u.eval(y) - u0

    def plus(h, s):
        return w(h + s) - w(h) - w(s)

    def minus(h, s):
        return w(h - s) - w(h) - w(s)

    return plus, minus


def _wedge_gamma2(w: ProfileFunction, p: FracParams, cfg: QuadratureConfig,
                  M: float | None) -> OperatorValue:
    """Gamma_2 w(0) for w(0) = 0, folded onto the wedge 0 < s < h by the (h, s) symmetry.

    With t = h - s the four sign quadrants contribute the brackets
    w(h+s)-w(h)-w(s), w(-h-s)-w(-h)-w(-s), w(t)-w(h)-w(-s), w(-t)-w(-h)-w(s);
    for even w they pair up and only two remain.
    """
    b = p.beta
    ev = w.eval
    even = w.is_even

    def minus(sign, h, s, t):
        # w(sign (h - s)) - w(sign h); on the upper half t = h - s is the exact argument
        if np.all(s <= t):
            return w.increment(sign * h, -sign * s)
        return ev(sign * t) - ev(np.array(sign * h))

    def F(h, s, t):
        k = s ** (-(1 + b) / 2)
        ws = ev(s)
        if even:
            return ((w.increment(h, s) - ws) * k) ** 2 + ((minus(1, h, s, t) - ws) * k) ** 2
        wms = ev(-s)
        return (((w.increment(h, s) - ws) * k) ** 2 + ((w.increment(-h, -s) - wms) * k) ** 2
                + ((minus(1, h, s, t) - wms) * k) ** 2 + ((minus(-1, h, s, t) - ws) * k) ** 2)

    bps = [abs(f) for f in w.feature_points() if f != 0]
    kw = dict(inner_head_exponent=1 - b, outer_head_exponent=3 - 2 * b,
              weight_exponent=-1 - b)
    if M is not None:
        val = integrate_wedge(F, cfg, upper=M, breakpoints=[f for f in bps if f < M], **kw)
    else:
        val = integrate_wedge(F, cfg, outer_tail_exponent=_gamma2_tail(w, b), breakpoints=bps, **kw)
    c2 = normalizing_constant(p) ** 2
    return val.scaled(c2 if even else c2 / 2)


def _check_M(M: float | None) -> None:
    if M is not None and not M > 0:
        raise ValueError("truncation radius M must be positive")


def gamma2_reduced(u: ProfileFunction, p: FracParams, cfg: QuadratureConfig | None = None,
                   *, M: float | None = None) -> OperatorValue:
    """Gamma_2 u(0) for even u via the symmetric wedge 0 < s < h (< M)."""
    _require_1d(p)
    _check_M(M)
    cfg = _cfg_for(u, cfg, 0.0)
    if not u.is_even:
        raise DomainError("the reduced wedge form needs an even profile")
    if M is None and _growth(u) >= p.beta:
        raise GrowthTooFast(f"growth exponent {_growth(u)} must be < beta = {p.beta}")
    if M is not None and u.zero_radius > 0 and 2 * M <= u.zero_radius:
        return OperatorValue(0.0)
    return _wedge_gamma2(translated(u, 0.0), p, cfg, M)


def gamma2_full(u: ProfileFunction, x: float, p: FracParams, cfg: QuadratureConfig | None = None,
                *, M: float | None = None) -> OperatorValue:
    """Gamma_2 u(x) from all four sign quadrants of the double integral.

    The profile is first translated so that x moves to 0 and u(x) to 0.  Away
    from the even case at x = 0 only bounded profiles are accepted.
    """
    _require_1d(p)
    _check_M(M)
    cfg = _cfg_for(u, cfg, x)
    if not (x == 0 and u.is_even) and not u.bounded:
        raise GrowthTooFast("the general-x Gamma_2 path needs a bounded profile")
    if M is None and _growth(u) >= p.beta:
        raise GrowthTooFast(f"growth exponent {_growth(u)} must be < beta = {p.beta}")
    return _wedge_gamma2(translated(u, x), p, cfg, M)


def gamma2(u: ProfileFunction, x: float, p: FracParams, cfg: QuadratureConfig | None = None) -> OperatorValue:
    """Gamma_2 u(x): reduced wedge form at x = 0 for even profiles, full double integral otherwise."""
    if x == 0 and u.is_even:
        return gamma2_reduced(u, p, cfg)
    return gamma2_full(u, x, p, cfg)


def gamma2_truncated(u: ProfileFunction, x: float, M: float, p: FracParams,
                     cfg: QuadratureConfig | None = None) -> OperatorValue:
    if x == 0 and u.is_even:
        return gamma2_reduced(u, p, cfg, M=M)
    return gamma2_full(u, x, p, cfg, M=M)


Which = Literal["L", "Gamma", "Gamma2"]


def lift_to_dim(value_1d: OperatorValue, which: Which, p: FracParams) -> OperatorValue:
    """Operator value at 0 of the tensor lift u(x) = v(x_1) on R^d."""
    a = reduction_constant(p)
    if which in ("L", "Gamma"):
        return value_1d.scaled(a)
    if which == "Gamma2":
        return value_1d.scaled(a * a)
    raise ValueError(f"unknown operator {which!r}")


@dataclass(frozen=True)
class RegionDecomposition:
    a_plus: OperatorValue
    a_minus: OperatorValue
    b_plus: OperatorValue
    b_minus: OperatorValue
    c_plus: OperatorValue
    c_minus: OperatorValue

    def parts(self) -> dict[str, OperatorValue]:
        return {"a_plus": self.a_plus, "a_minus": self.a_minus, "b_plus": self.b_plus,
                "b_minus": self.b_minus, "c_plus": self.c_plus, "c_minus": self.c_minus}

    @property
    def total(self) -> OperatorValue:
        out = OperatorValue(0.0)
        for v in self.parts().values():
            out = out + v
        return out

    @property
    def c_share(self) -> float:
        return (self.c_plus.value + self.c_minus.value) / self.total.value


def gamma2_region_decomposition(u_eps: ProfileFunction, p: FracParams,
                                cfg: QuadratureConfig | None = None) -> RegionDecomposition:
    """Split the wedge at h = 1 and s = 1 into the six pieces A+-, B+-, C+-."""
    _require_1d(p)
    b = p.beta
    plus, minus = _even_brackets(u_eps)
    c2 = normalizing_constant(p) ** 2
    bps = [f for f in u_eps.feature_points() if f > 0]
    inner_bps = wedge_breakpoints(bps)
    tail = _gamma2_tail(u_eps, b)

    def piece(bracket, a, hi, limits, **kw):
        F = lambda h, s: (bracket(h, s) * (h * s) ** (-(1 + b) / 2)) ** 2
        return integrate_nested(F, a, hi, limits, cfg, inner_breakpoints=inner_bps,
                                breakpoints=[q for f in bps for q in (f / 2, f) if a < q < hi],
                                **kw).scaled(c2)

    out = {}
    for name, br in (("plus", plus), ("minus", minus)):
        out[f"a_{name}"] = piece(br, 0.0, 1.0, lambda h: (0.0, h),
                                 inner_head_exponent=1 - b, outer_head_exponent=3 - 2 * b)
        out[f"b_{name}"] = piece(br, 1.0, math.inf, lambda h: (0.0, 1.0),
                                 inner_head_exponent=1 - b, outer_tail_exponent=tail)
        out[f"c_{name}"] = piece(br, 1.0, math.inf, lambda h: (1.0, h), outer_tail_exponent=tail)
    return RegionDecomposition(**out)
