"""Adaptive Gauss-Kronrod integration for singular, semi-infinite integrals.

Every integral in fraccd goes through :func:`integrate_adaptive`.  The
integration range is cut into segments at caller-supplied breakpoints; long
segments on the positive axis are integrated in the variable ``t = log(h)``,
and segments adjacent to a singular endpoint at 0 are graded geometrically
(``r * 2**-k``).  The pieces below the finest grading level and beyond the
tail cutoff are not integrated numerically: they are extrapolated from a
declared power-law exponent, and the mismatch of the power-law fit at two
sample points is reported as the uncertainty of that piece.
"""
from __future__ import annotations

import inspect
import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InvalidInterval, NonIntegrableTail, SingularityTooStrong

# Gauss-Kronrod 7/15 pair (QUADPACK constants).
_XK = np.array([
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245, 0.405845151377397166906606412076961,
    0.586087235467691130294144838258730, 0.741531185599394439863864773280788,
    0.864864423359769072789712788640926, 0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])
_WK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
])
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    split_radius: float = 1.0
    tail_cutoff: float = 1e6
    max_subdivisions: int = 10_000
    min_panel_width: float = 1e-14
    # number of geometric levels r * 2**-k below the first positive breakpoint
    core_levels: int = 14
    # inner integrals of iterated rules run at this fraction of the outer tolerances
    inner_tol_factor: float = 0.1

    def __post_init__(self):
        if not 0 < self.rel_tol < 1:
            raise ValueError("rel_tol must lie in (0, 1)")
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if not 0 < self.split_radius < self.tail_cutoff:
            raise ValueError("need 0 < split_radius < tail_cutoff")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.core_levels < 1:
            raise ValueError("core_levels must be >= 1")

    def tightened(self, factor: float | None = None) -> "QuadratureConfig":
        factor = self.inner_tol_factor if factor is None else factor
        return replace(self, rel_tol=self.rel_tol * factor, abs_tol=self.abs_tol * factor)


@dataclass(frozen=True)
class OperatorValue:
    """An integral value with its error budget.

    ``value`` already contains ``tail_estimate``, the extrapolated mass beyond
    the tail cutoff; ``tail_bound`` is the uncertainty of that extrapolation.
    """

    value: float
    quad_error: float = 0.0
    tail_bound: float = 0.0
    evaluations: int = 0
    converged: bool = True
    tail_estimate: float = 0.0

    @property
    def uncertainty(self) -> float:
        return self.quad_error + self.tail_bound

    def scaled(self, factor: float) -> "OperatorValue":
        f = abs(factor)
        return replace(self, value=factor * self.value, quad_error=f * self.quad_error,
                       tail_bound=f * self.tail_bound, tail_estimate=factor * self.tail_estimate)

    def __add__(self, other: "OperatorValue") -> "OperatorValue":
        return OperatorValue(
            value=self.value + other.value,
            quad_error=self.quad_error + other.quad_error,
            tail_bound=self.tail_bound + other.tail_bound,
            evaluations=self.evaluations + other.evaluations,
            converged=self.converged and other.converged,
            tail_estimate=self.tail_estimate + other.tail_estimate,
        )

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "quad_error": self.quad_error,
            "tail_bound": self.tail_bound,
            "evaluations": self.evaluations,
            "converged": self.converged,
        }


def total(values: Iterable[OperatorValue]) -> OperatorValue:
    out = OperatorValue(0.0)
    for v in values:
        out = out + v
    return out


Integrand = Callable[[np.ndarray], np.ndarray]


def _as_rows(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    return y[None, :] if y.ndim == 1 else y


def _eval_panels(f: Integrand, ta, tb, logv):
    """Apply the 7/15 pair to each panel; returns (K sums, error row 0, nevals)."""
    half = 0.5 * (tb - ta)
    mid = 0.5 * (tb + ta)
    t = mid[:, None] + half[:, None] * _XK[None, :]
    x = t.copy()
    x[logv] = np.exp(t[logv])
    jac = np.where(logv[:, None], x, 1.0) * half[:, None]
    y = _as_rows(f(x.ravel())).reshape(-1, *x.shape) * jac[None]
    kron = y @ _WK
    gauss = y[..., 1::2] @ _WG
    resabs = np.abs(y[0]) @ _WK
    err = np.maximum(np.abs(kron[0] - gauss[0]), 50 * _EPS * resabs)
    return kron, err, x.size


@dataclass
class _Result:
    rows: np.ndarray
    quad_error: float
    evaluations: int
    converged: bool
    tail_estimate: float = 0.0
    tail_bound: float = 0.0

    @property
    def value(self) -> float:
        return float(self.rows[0])


def _adaptive(f: Integrand, segments: Sequence[tuple[float, float, bool]], cfg: QuadratureConfig) -> _Result:
    ta = np.array([math.log(lo) if lg else lo for lo, hi, lg in segments])
    tb = np.array([math.log(hi) if lg else hi for lo, hi, lg in segments])
    logv = np.array([lg for _, _, lg in segments], dtype=bool)
    vals, errs, nev = _eval_panels(f, ta, tb, logv)
    converged = True
    while True:
        est = float(vals[0].sum())
        err = float(errs.sum())
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(est))
        if err <= tol:
            break
        width = tb - ta
        width[logv] = np.exp(tb[logv]) - np.exp(ta[logv])
        splittable = width > max(cfg.min_panel_width, 0.0)
        # panels near the floating point resolution of their abscissae cannot be split further
        splittable &= (tb - ta) > 64 * _EPS * np.maximum(np.abs(ta), np.abs(tb))
        budget = cfg.max_subdivisions - len(ta)
        if not splittable.any() or budget <= 0:
            converged = False
            break
        emax = errs[splittable].max()
        idx = np.flatnonzero(splittable & (errs >= 0.1 * emax))
        if len(idx) > budget:
            idx = idx[np.argsort(-errs[idx], kind="stable")[:budget]]
            idx.sort()
        tm = 0.5 * (ta[idx] + tb[idx])
        na = np.concatenate([ta[idx], tm])
        nb = np.concatenate([tm, tb[idx]])
        nl = np.concatenate([logv[idx], logv[idx]])
        nvals, nerrs, n = _eval_panels(f, na, nb, nl)
        nev += n
        keep = np.ones(len(ta), dtype=bool)
        keep[idx] = False
        ta = np.concatenate([ta[keep], na])
        tb = np.concatenate([tb[keep], nb])
        logv = np.concatenate([logv[keep], nl])
        vals = np.concatenate([vals[:, keep], nvals], axis=1)
        errs = np.concatenate([errs[keep], nerrs])
    # fixed summation order for reproducibility
    order = np.lexsort((tb, ta, logv))
    return _Result(vals[:, order].sum(axis=1), float(errs.sum()), nev, converged)


def _sample(f: Integrand, x: float) -> float:
    return float(_as_rows(f(np.array([x])))[0, 0])


def _segments(lo: float, hi: float, points: Iterable[float], cfg: QuadratureConfig,
              graded_head: bool) -> tuple[list[tuple[float, float, bool]], float]:
    """Cut [lo, hi] into panels; returns (segments, start) where start > lo if
    a graded head below ``start`` is left to the caller."""
    pts = sorted({float(p) for p in points if lo < p < hi} | {lo, hi})
    if cfg.split_radius > lo and cfg.split_radius < hi:
        pts = sorted(set(pts) | {cfg.split_radius})
    start = lo
    if lo == 0.0 and graded_head:
        first = pts[1]
        grade = [first * 2.0 ** -k for k in range(1, cfg.core_levels + 1)]
        start = grade[-1]
        pts = sorted(set(pts[1:]) | set(grade))
    segs = []
    for a, b in zip(pts[:-1], pts[1:]):
        segs.append((a, b, a > 0 and b / a > 2.0))
    return segs, start


def _integrate(f: Integrand, a: float, b: float, cfg: QuadratureConfig, *,
               head_exponent: float | None = None, tail_exponent: float | None = None,
               breakpoints: Iterable[float] = ()) -> _Result:
    if not a < b:
        raise InvalidInterval(f"need a < b, got a={a}, b={b}")
    if math.isinf(a):
        if a > 0:
            raise InvalidInterval("lower limit cannot be +inf")
        if math.isinf(b):
            g = lambda x: _as_rows(f(x)) + _as_rows(f(-x))
            return _integrate(g, 0.0, math.inf, cfg, head_exponent=head_exponent,
                              tail_exponent=tail_exponent,
                              breakpoints=[abs(p) for p in breakpoints if p != 0])
        return _integrate(lambda x: f(-x), -b, math.inf, cfg, tail_exponent=tail_exponent,
                          breakpoints=[-p for p in breakpoints])
    hi = b
    tail_est = tail_err = 0.0
    if math.isinf(b):
        if tail_exponent is None or tail_exponent >= -1:
            raise NonIntegrableTail(f"tail exponent {tail_exponent} does not give an integrable tail")
        hi = max(cfg.tail_cutoff, 4.0 * abs(a) + 1.0)
    if head_exponent is not None and a == 0.0 and head_exponent <= -1:
        raise SingularityTooStrong(f"integrand ~ h^{head_exponent} is not integrable at 0")
    graded = a == 0.0
    segs, start = _segments(a, hi, breakpoints, cfg, graded)
    head_est = head_err = 0.0
    nev_extra = 0
    if graded:
        if head_exponent is not None:
            s1 = head_exponent + 1.0
            # C x^s fitted at x = start and x = 2 start, integrated over (0, start)
            y1 = _sample(f, start) * start / s1
            y2 = _sample(f, 2 * start) * 2.0 ** -head_exponent * start / s1
            head_est = y1
            head_err = abs(y1 - y2)
            nev_extra += 2
        else:
            segs.insert(0, (0.0, start, False))
    res = _adaptive(f, segs, cfg)
    res.rows = res.rows.copy()
    res.rows[0] += head_est
    res.quad_error += head_err
    if math.isinf(b):
        p1 = tail_exponent + 1.0
        # C x^p fitted at x = hi and x = hi / 4, integrated over (hi, inf)
        tail_est = _sample(f, hi) * hi / abs(p1)
        y2 = _sample(f, hi / 4) * 4.0 ** tail_exponent * hi / abs(p1)
        tail_err = abs(tail_est - y2) + 1e-14 * abs(tail_est)
        nev_extra += 2
        res.rows[0] += tail_est
    res.tail_estimate = tail_est
    res.tail_bound = tail_err
    res.evaluations += nev_extra
    return res


def _to_value(res: _Result) -> OperatorValue:
    return OperatorValue(res.value, res.quad_error, res.tail_bound, res.evaluations,
                         res.converged, res.tail_estimate)


def integrate_adaptive(f: Integrand, a: float, b: float, cfg: QuadratureConfig | None = None, *,
                       head_exponent: float | None = None, tail_exponent: float | None = None,
                       breakpoints: Iterable[float] = ()) -> OperatorValue:
    """Integrate a vectorized ``f`` over (a, b).

    ``b`` (and ``a``) may be infinite, in which case ``tail_exponent`` p < -1 must
    be declared: ``|f(h)| ~ C h**p`` beyond ``cfg.tail_cutoff``.  With a = 0,
    ``head_exponent`` s > -1 declares ``f(h) ~ C h**s`` near the origin and the
    innermost graded panel is replaced by its power-law integral.
    """
    cfg = cfg or QuadratureConfig()
    return _to_value(_integrate(f, a, b, cfg, head_exponent=head_exponent,
                                tail_exponent=tail_exponent, breakpoints=breakpoints))


def integrate_singular_kernel(g: Integrand, beta: float, cfg: QuadratureConfig | None = None, *,
                              q: float = 2.0, upper: float = math.inf,
                              growth_exponent: float | None = None,
                              breakpoints: Iterable[float] = ()) -> OperatorValue:
    """Compute ``int_0^upper g(h) h**(-1-beta) dh`` for ``g(h) = O(h**q)`` at 0.

    ``growth_exponent`` bounds ``|g(h)| <= C h**growth`` at infinity and is only
    needed for ``upper = inf``.
    """
    if not 0 < beta < 2:
        raise ValueError("beta must lie in (0, 2)")
    if q <= beta:
        raise SingularityTooStrong(f"need q > beta, got q={q}, beta={beta}")
    cfg = cfg or QuadratureConfig()
    half = -0.5 * (1.0 + beta)
    # two half powers keep g(h) h^(-1-beta) out of the subnormal range for huge h
    kernel = lambda h: _as_rows(g(h)) * h ** half * h ** half
    tail = None
    if math.isinf(upper):
        if growth_exponent is None:
            raise NonIntegrableTail("growth_exponent required for an infinite upper limit")
        tail = growth_exponent - 1.0 - beta
    return integrate_adaptive(kernel, 0.0, upper, cfg, head_exponent=q - 1.0 - beta,
                              tail_exponent=tail, breakpoints=breakpoints)


def wedge_breakpoints(points: Iterable[float]) -> Callable[[float], list[float]]:
    """Inner breakpoints sigma in (0, h) where h + sigma, h - sigma or sigma hit a feature point."""
    pts = [float(p) for p in points if p > 0]

    def at(h: float) -> list[float]:
        out = []
        for p in pts:
            out.extend((p, h - p, p - h))
        return [s for s in out if 0 < s < h]

    return at


def integrate_nested(F: Callable[[float, np.ndarray], np.ndarray], a: float, b: float,
                     inner_limits: Callable[[float], tuple[float, float]],
                     cfg: QuadratureConfig | None = None, *,
                     inner_head_exponent: float | None = None,
                     inner_tail_exponent: float | None = None,
                     outer_head_exponent: float | None = None,
                     outer_tail_exponent: float | None = None,
                     breakpoints: Iterable[float] = (),
                     inner_breakpoints: Callable[[float], Iterable[float]] | None = None,
                     inner_tail_cutoff: Callable[[float], float] | None = None,
                     ) -> OperatorValue:
    """Iterated integral ``int_a^b dh int_{lo(h)}^{hi(h)} F(h, s) ds``.

    Inner integrals run at ``cfg.tightened()``; their error estimates are
    integrated along with the values and added to the outer uncertainty.
    ``inner_tail_cutoff(h)`` raises the inner truncation radius where the
    inner integrand only reaches its power-law tail beyond a scale set by h.
    """
    ibp = inner_breakpoints or (lambda h: ())

    def inner(h, icfg):
        lo, hi = inner_limits(h)
        if not lo < hi:
            return []
        if inner_tail_cutoff is not None:
            icfg = replace(icfg, tail_cutoff=max(icfg.tail_cutoff, inner_tail_cutoff(h)))
        return [_integrate(lambda s: F(h, s), lo, hi, icfg,
                           head_exponent=inner_head_exponent if lo == 0.0 else None,
                           tail_exponent=inner_tail_exponent, breakpoints=ibp(h))]

    return _iterated(inner, a, b, cfg or QuadratureConfig(), outer_head_exponent,
                     outer_tail_exponent, breakpoints)


def _iterated(inner, a, b, cfg, outer_head_exponent, outer_tail_exponent, breakpoints) -> OperatorValue:
    icfg = cfg.tightened()
    stats = {"nev": 0, "ok": True}

    def outer(hs: np.ndarray) -> np.ndarray:
        out = np.zeros((2, hs.size))
        for i, h in enumerate(hs):
            # the outer log map weights inner values by h, so their absolute floor shrinks by 1/h
            hcfg = replace(icfg, abs_tol=icfg.abs_tol / max(1.0, abs(float(h))))
            for r in inner(float(h), hcfg):
                out[0, i] += r.value
                out[1, i] += r.quad_error + r.tail_bound
                stats["nev"] += r.evaluations
                stats["ok"] = stats["ok"] and r.converged
        return out

    res = _integrate(outer, a, b, cfg, head_exponent=outer_head_exponent,
                     tail_exponent=outer_tail_exponent, breakpoints=breakpoints)
    inner_err = abs(float(res.rows[1]))
    return OperatorValue(res.value, res.quad_error + inner_err, res.tail_bound,
                         res.evaluations + stats["nev"], res.converged and stats["ok"],
                         res.tail_estimate)


def _positional_arity(fn) -> int:
    try:
        params = inspect.signature(fn).parameters.values()
    except (TypeError, ValueError):
        return 3
    if any(p.kind is p.VAR_POSITIONAL for p in params):
        return 3
    return sum(p.kind in (p.POSITIONAL_ONLY, p.POSITIONAL_OR_KEYWORD) for p in params)


def integrate_wedge(F: Callable[[float, np.ndarray, np.ndarray], np.ndarray],
                    cfg: QuadratureConfig | None = None, *,
                    upper: float = math.inf,
                    inner_head_exponent: float | None = None,
                    outer_head_exponent: float | None = None,
                    outer_tail_exponent: float | None = None,
                    breakpoints: Iterable[float] = (),
                    weight_exponent: float = 0.0) -> OperatorValue:
    """Integrate ``h**weight_exponent * F(h, s, t)`` over the wedge ``0 < s < h < upper`` with ``t = h - s``.

    ``F`` may also take just ``(h, s)``.

    The inner range is cut at ``s = h/2`` and its upper half is integrated in
    ``t``, so ``F`` always receives the small one of ``s`` and ``h - s``
    exactly.  This keeps features near ``s = h`` resolved when ``h`` is huge.
    ``breakpoints`` are feature points ``p`` of the integrand in the variables
    ``s``, ``h - s`` and ``h + s``; their absolute values are used.  The
    power of ``h`` is applied after the inner integration, in two half
    steps, which keeps steep integrands out of the subnormal range.
    """
    pts = sorted({abs(float(p)) for p in breakpoints if p != 0})
    if _positional_arity(F) < 3:
        F2 = F
        F = lambda h, s, t: F2(h, s)

    def inner(h, icfg):
        half = h ** (0.5 * weight_exponent)
        icfg = replace(icfg, abs_tol=icfg.abs_tol / half / half)
        mid = 0.5 * h
        lo_b = [q for p in pts for q in (p, h - p, p - h) if 0 < q < mid]
        hi_b = [q for p in pts for q in (p, h - p, 2 * h - p) if 0 < q < mid]
        out = [
            _integrate(lambda s: F(h, s, h - s), 0.0, mid, icfg,
                       head_exponent=inner_head_exponent, breakpoints=lo_b),
            _integrate(lambda t: F(h, h - t, t), 0.0, mid, icfg, breakpoints=hi_b),
        ]
        for r in out:
            r.rows = r.rows * half * half
            r.quad_error = r.quad_error * half * half
            r.tail_bound = r.tail_bound * half * half
        return out

    return _iterated(inner, 0.0, upper, cfg or QuadratureConfig(), outer_head_exponent,
                     outer_tail_exponent, [q for p in pts for q in (p / 2, p)])
