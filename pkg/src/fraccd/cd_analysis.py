"""CD(kappa, N) verdicts, epsilon sweeps, identity checks and ball counterexamples.

Everything here combines operator values from :mod:`fraccd.gamma_ops`; no new
integrals are introduced except the genuine two-dimensional fractional
Laplacian used to cross-check the dimension-reduction constant.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from .errors import DomainError, GrowthTooFast, NoViolationAtOrigin, SpecViolation
from .gamma_ops import (
    CDParams,
    FracParams,
    RegionDecomposition,
    frac_laplacian,
    gamma,
    gamma2,
    gamma2_region_decomposition,
    lift_to_dim,
    normalizing_constant,
    reduction_constant,
)
from .profiles import (
    CounterexampleSpec,
    ProfileFunction,
    lemma_f,
    lemma_g,
    make_u_eps,
    make_v_N_eps,
    scaled,
    translated,
)
from .quadrature import OperatorValue, QuadratureConfig, integrate_nested

T = TypeVar("T")
R = TypeVar("R")


def thread_count() -> int:
    """Worker threads allowed by ``FRACCD_THREADS`` (default 1)."""
    raw = os.environ.get("FRACCD_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"FRACCD_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def parallel_map(fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
    """``[fn(i) for i in items]``, possibly on worker threads; results keep input order."""
    n = min(thread_count(), len(items))
    if n <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- verdicts

class Verdict(str, Enum):
    VIOLATED = "VIOLATED"
    SATISFIED = "SATISFIED"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class CDReport:
    """Terms of ``Gamma_2 >= kappa Gamma + (Lu)^2 / N`` at one point.

    ``Gamma_val`` is ``None`` when kappa = 0 and Gamma u(x) is not needed
    (it diverges for the unbounded profiles).
    """

    x: float | tuple[float, ...]
    L_val: OperatorValue
    Gamma_val: OperatorValue | None
    Gamma2_val: OperatorValue
    kappa: float = 0.0
    N_dim: float = math.inf

    @property
    def _inv_n(self) -> float:
        return 0.0 if math.isinf(self.N_dim) else 1.0 / self.N_dim

    @property
    def deficit(self) -> float:
        g = self.Gamma_val.value if self.Gamma_val is not None else 0.0
        return self.Gamma2_val.value - self.kappa * g - self._inv_n * self.L_val.value ** 2

    @property
    def uncertainty(self) -> float:
        dl = self.L_val.uncertainty
        out = self.Gamma2_val.uncertainty
        out += self._inv_n * (2 * abs(self.L_val.value) * dl + dl * dl)
        if self.Gamma_val is not None:
            out += abs(self.kappa) * self.Gamma_val.uncertainty
        return out

    @property
    def N_star(self) -> float:
        g2 = self.Gamma2_val
        if g2.value <= g2.uncertainty:
            return math.inf
        return self.L_val.value ** 2 / g2.value

    @property
    def verdict(self) -> Verdict:
        d, u = self.deficit, self.uncertainty
        if abs(d) <= u:
            return Verdict.INCONCLUSIVE
        return Verdict.VIOLATED if d + u < 0 else Verdict.SATISFIED

    def to_dict(self) -> dict:
        return {
            "x": list(self.x) if isinstance(self.x, tuple) else self.x,
            "L": self.L_val.to_dict(),
            "Gamma": None if self.Gamma_val is None else self.Gamma_val.to_dict(),
            "Gamma2": self.Gamma2_val.to_dict(),
            "kappa": self.kappa,
            "N_dim": None if math.isinf(self.N_dim) else self.N_dim,
            "deficit": self.deficit,
            "uncertainty": self.uncertainty,
            "N_star": None if math.isinf(self.N_star) else self.N_star,
            "verdict": self.verdict.value,
        }


def _point(x) -> tuple[float, float | tuple[float, ...]]:
    if np.ndim(x) == 0:
        return float(x), float(x)
    pt = tuple(float(c) for c in x)
    if any(c != 0.0 for c in pt[1:]):
        raise DomainError("tensor-lifted profiles are only evaluated on the x_1 axis")
    return pt[0], pt


def cd_check(u: ProfileFunction, x, cd: CDParams, p: FracParams,
             cfg: QuadratureConfig | None = None) -> CDReport:
    """Evaluate L, Gamma_2 (and Gamma when kappa != 0) at x and form the CD report.

    For ``p.dim > 1`` the profile is read as the tensor lift ``u(x_1)`` and the
    check is made at the origin via the dimension-reduction constant.
    """
    x1, pt = _point(x)
    p1 = FracParams(p.beta, 1)
    if p.dim > 1 and x1 != 0.0:
        raise DomainError("the dimension-reduction route is only available at the origin")
    L = frac_laplacian(u, x1, p1, cfg)
    G2 = gamma2(u, x1, p1, cfg)
    G = gamma(u, x1, p1, cfg) if cd.kappa != 0 else None
    if p.dim > 1:
        L, G2 = lift_to_dim(L, "L", p), lift_to_dim(G2, "Gamma2", p)
        G = None if G is None else lift_to_dim(G, "Gamma", p)
    return CDReport(pt, L, G, G2, cd.kappa, cd.N_dim)


# ---------------------------------------------------------------- epsilon sweep

@dataclass(frozen=True)
class SweepRow:
    eps: float
    eps_L: float
    eps_gamma2: float
    n_star: float
    c_share: float
    unc_L: float
    unc_g2: float
    L_val: OperatorValue = field(repr=False, compare=False, default=None)
    Gamma2_val: OperatorValue = field(repr=False, compare=False, default=None)
    decomposition: RegionDecomposition | None = field(repr=False, compare=False, default=None)

    COLUMNS = ("eps", "eps_L", "eps_gamma2", "n_star", "c_share", "unc_L", "unc_g2")

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, c) for c in self.COLUMNS)


def c0_constant(beta: float) -> float:
    """Lower bound for eps * L(u_eps)(0): twice the one-dimensional normalizing constant."""
    return 2 * normalizing_constant(FracParams(beta, 1))


def sweep_row(beta: float, eps: float, cfg: QuadratureConfig | None = None,
              decompose: bool = True) -> SweepRow:
    p = FracParams(beta, 1)
    u = make_u_eps(CounterexampleSpec(beta, eps))
    L = frac_laplacian(u, 0.0, p, cfg)
    G2 = gamma2(u, 0.0, p, cfg)
    dec = gamma2_region_decomposition(u, p, cfg) if decompose else None
    return SweepRow(
        eps=eps, eps_L=eps * L.value, eps_gamma2=eps * G2.value,
        n_star=L.value ** 2 / G2.value,
        c_share=dec.c_share if dec is not None else math.nan,
        unc_L=eps * L.uncertainty, unc_g2=eps * G2.uncertainty,
        L_val=L, Gamma2_val=G2, decomposition=dec,
    )


def sweep_eps(beta: float, eps_list: Iterable[float], cfg: QuadratureConfig | None = None,
              *, decompose: bool = True) -> list[SweepRow]:
    """One row per eps (sorted decreasing) for the unbounded profile u_eps at x = 0."""
    eps = sorted({float(e) for e in eps_list}, reverse=True)
    if not eps:
        raise SpecViolation("the eps list is empty")
    for e in eps:
        CounterexampleSpec(beta, e)  # raises SpecViolation naming the constraint
    return parallel_map(lambda e: sweep_row(beta, e, cfg, decompose), eps)


# ---------------------------------------------------------------- identities

@dataclass(frozen=True)
class IdentityCheck:
    name: str
    expected: float
    observed: float
    tolerance: float

    @property
    def deviation(self) -> float:
        if self.expected == 0.0:
            return abs(self.observed)
        return abs(self.observed / self.expected - 1.0)

    @property
    def passed(self) -> bool:
        return self.deviation < self.tolerance

    def to_dict(self) -> dict:
        return {"name": self.name, "expected": self.expected, "observed": self.observed,
                "deviation": self.deviation, "tolerance": self.tolerance, "passed": self.passed}


def _rel_unc(v: OperatorValue) -> float:
    return v.uncertainty / abs(v.value) if v.value != 0 else math.inf


def _ratio_check(name: str, base: OperatorValue, other: OperatorValue, expected: float,
                 floor: float) -> IdentityCheck:
    if base.value == 0.0:
        return IdentityCheck(name, 0.0, other.value, floor + other.uncertainty)
    return IdentityCheck(name, expected, other.value / base.value,
                         floor + _rel_unc(base) + _rel_unc(other))


def verify_scaling(u: ProfileFunction, lam: float, p: FracParams,
                   cfg: QuadratureConfig | None = None, *, floor: float = 1e-5) -> list[IdentityCheck]:
    """Compare L, Gamma, Gamma_2 at 0 of u(lam x) with lam^beta, lam^beta, lam^(2 beta) times those of u.

    Gamma is skipped when it diverges for u (growth >= beta/2).
    """
    if not lam > 0:
        raise DomainError("lambda must be positive")
    if abs(float(u.eval(np.array(0.0)))) > 0:
        raise DomainError("scaling identities are checked for profiles with u(0) = 0")
    v = scaled(u, lam)
    b = p.beta
    out = [_ratio_check("L", frac_laplacian(u, 0.0, p, cfg), frac_laplacian(v, 0.0, p, cfg),
                        lam ** b, floor)]
    try:
        out.append(_ratio_check("Gamma", gamma(u, 0.0, p, cfg), gamma(v, 0.0, p, cfg), lam ** b, floor))
    except GrowthTooFast:
        pass
    out.append(_ratio_check("Gamma2", gamma2(u, 0.0, p, cfg), gamma2(v, 0.0, p, cfg),
                            lam ** (2 * b), floor))
    return out


def verify_translation(u: ProfileFunction, x: float, p: FracParams,
                       cfg: QuadratureConfig | None = None, *, floor: float = 1e-8) -> IdentityCheck:
    """L u(x) against L of y -> u(x - y) - u(x) at the origin."""
    a = frac_laplacian(u, x, p, cfg)
    b = frac_laplacian(translated(u, x), 0.0, p, cfg)
    return _ratio_check("L translated", a, b, 1.0, floor)


def laplacian_2d_tensor(v: ProfileFunction, beta: float,
                        cfg: QuadratureConfig | None = None) -> OperatorValue:
    """L^(2) of w(x_1, x_2) = v(x_1) at the origin by iterated quadrature over y_1 > 0, y_2 > 0.

    With the even second difference D(y_1) = v(y_1) + v(-y_1) - 2 v(0) the
    integral over the plane is 2 c_{beta,2} int int D(y_1) |y|^{-2-beta}.
    """
    if not v.is_even:
        raise DomainError("the two-dimensional check needs an even profile")
    p2 = FracParams(beta, 2)
    g = 0.0 if v.bounded else v.growth_exponent
    if g >= beta:
        raise GrowthTooFast(f"growth exponent {g} must be < beta = {beta}")
    v0 = float(v.eval(np.array(0.0)))
    e = -(2 + beta) / 2

    def F(y1, y2):
        d = v.eval(np.array(y1)) * 2 - 2 * v0
        # |y|^(-2-beta) written to stay finite for large y_1
        return d * y1 ** (2 * e) * (1 + (y2 / y1) ** 2) ** e

    feats = sorted({abs(f) for f in v.feature_points() if f != 0})
    if v.compact:
        cfg = cfg or QuadratureConfig()
        if cfg.tail_cutoff < 1e3 * v.support_radius:
            cfg = replace(cfg, tail_cutoff=1e3 * v.support_radius)
    val = integrate_nested(F, 0.0, math.inf, lambda y1: (0.0, math.inf), cfg,
                           inner_tail_exponent=-(2 + beta),
                           outer_head_exponent=1 - beta, outer_tail_exponent=g - 1 - beta,
                           breakpoints=feats, inner_breakpoints=lambda y1: [y1],
                           inner_tail_cutoff=lambda y1: 1e6 * y1)
    return val.scaled(2 * normalizing_constant(p2))


def verify_dimension_reduction(v: ProfileFunction, beta: float, cfg: QuadratureConfig | None = None,
                               *, tol: float = 1e-4) -> IdentityCheck:
    """Genuine 2-d L of the tensor lift against A_{2,beta} times the 1-d value."""
    direct = laplacian_2d_tensor(v, beta, cfg)
    reduced = lift_to_dim(frac_laplacian(v, 0.0, FracParams(beta, 1), cfg), "L", FracParams(beta, 2))
    if reduced.value == 0.0:
        return IdentityCheck("L^(2) vs A_2 L^(1)", 0.0, direct.value, tol + direct.uncertainty)
    return IdentityCheck("L^(2) vs A_2 L^(1)", 1.0, direct.value / reduced.value,
                         tol + _rel_unc(direct) + _rel_unc(reduced))


def kappa_ratio_scan(u: ProfileFunction, kappa: float, lambdas: Sequence[float], p: FracParams,
                     cfg: QuadratureConfig | None = None) -> list[tuple[float, float]]:
    """(lambda, kappa Gamma / Gamma_2) at 0 for u(lambda x).

    By the scaling laws the ratio is proportional to lambda^(-beta), so the
    curvature term loses against Gamma_2 once the profile is compressed.
    """
    out = []
    for lam in lambdas:
        v = scaled(u, lam)
        out.append((lam, kappa * gamma(v, 0.0, p, cfg).value / gamma2(v, 0.0, p, cfg).value))
    return out


def lemma_grid_violations(n: int = 200) -> dict[str, int]:
    """Count grid points of (gamma, x) in (0, 2) x [0, 1] breaking the bracket bounds.

    gamma >= 1: 0 <= f <= 4x and 0 <= g <= 4x.
    gamma < 1:  -x^gamma <= f <= 0 and x^gamma <= g <= 2 x^gamma.
    Comparisons allow a few ulps of rounding in the evaluated terms.
    """
    gammas = np.linspace(0.0, 2.0, n + 2)[1:-1]
    xs = np.linspace(0.0, 1.0, n)
    counts = {"f_ge1": 0, "g_ge1": 0, "f_lt1": 0, "g_lt1": 0}
    ulp = 8 * np.finfo(float).eps
    for gm in gammas:
        f = lemma_f(gm, xs)
        g = lemma_g(gm, xs)
        xg = xs ** gm
        slack = ulp * (2.0 + xg + 2 * xs)
        if gm >= 1:
            counts["f_ge1"] += int(np.sum((f < -slack) | (f > 4 * xs + slack)))
            counts["g_ge1"] += int(np.sum((g < -slack) | (g > 4 * xs + slack)))
        else:
            counts["f_lt1"] += int(np.sum((f < -xg - slack) | (f > slack)))
            counts["g_lt1"] += int(np.sum((g < xg - slack) | (g > 2 * xg + slack)))
    return counts


# ---------------------------------------------------------------- witnesses

DEFAULT_WITNESS_EPS = 1e-4
MAX_LOG10_N = 100.0


@dataclass(frozen=True)
class Witness:
    spec: CounterexampleSpec
    report: CDReport
    evaluations: int

    @property
    def profile(self) -> ProfileFunction:
        return make_v_N_eps(self.spec)


def _witness_report(beta, eps, N, cd, cfg) -> CDReport:
    spec = CounterexampleSpec(beta, eps, cutoff_N=N)
    return cd_check(make_v_N_eps(spec), 0.0, cd, FracParams(beta, 1), cfg)


def _margin_ok(rep: CDReport, factor: float) -> bool:
    """Gamma_2 + unc < (L - unc_L)^2 / (factor N_dim)."""
    lo = abs(rep.L_val.value) - rep.L_val.uncertainty
    g2 = rep.Gamma2_val
    return g2.value - g2.uncertainty > 0 and g2.value + g2.uncertainty < lo * lo / (factor * rep.N_dim)


def select_witness(beta: float, n_dim: float, cfg: QuadratureConfig | None = None, *,
                   N: float | None = None, eps: float | None = None,
                   factor: float = 4.0, max_evals: int = 12) -> Witness:
    """Pick v_{N,eps} with N* > factor * n_dim at x = 0.

    * N and eps given: used as is (the margin is still reported, not enforced).
    * N given: bisection on log(eps) for the largest strict-regime eps reaching the margin.
    * otherwise: eps fixed (default 1e-4) and a safeguarded secant search in log10 N,
      since N* grows roughly linearly in log N once eps log N is small.
    """
    if not n_dim > 0 or math.isinf(n_dim):
        raise DomainError("a finite positive N_dim is needed to build a witness")
    cd = CDParams(0.0, n_dim)
    if N is not None and eps is not None:
        CounterexampleSpec(beta, eps, cutoff_N=N).check_strict()
        return Witness(CounterexampleSpec(beta, eps, cutoff_N=N), _witness_report(beta, eps, N, cd, cfg), 1)
    if N is not None:
        return _bisect_eps(beta, N, cd, cfg, factor, max_evals)
    eps = DEFAULT_WITNESS_EPS if eps is None else eps
    CounterexampleSpec(beta, eps).check_strict()
    return _search_log_n(beta, eps, cd, cfg, factor, max_evals)


def _eps_upper(beta: float) -> float:
    caps = [beta / 4]
    if beta > 1:
        caps.append((beta - 1) / 4)
    if beta > 0.5:
        caps.append((beta - 0.5) / 4)
    return min(caps) * (1 - 1e-9)


def _bisect_eps(beta, N, cd, cfg, factor, max_evals) -> Witness:
    lo, hi = math.log(1e-8), math.log(_eps_upper(beta))
    best = None
    n = 0
    rep = _witness_report(beta, math.exp(hi), N, cd, cfg)
    n += 1
    if _margin_ok(rep, factor):
        return Witness(CounterexampleSpec(beta, math.exp(hi), cutoff_N=N), rep, n)
    rep = _witness_report(beta, math.exp(lo), N, cd, cfg)
    n += 1
    if not _margin_ok(rep, factor):
        raise NoViolationAtOrigin(
            f"no eps in [1e-8, {math.exp(hi):.3g}] gives N* > {factor:g}*N_dim at N = {N:g} "
            f"(N* = {rep.N_star:.4g} at eps = 1e-8); increase N")
    best = (math.exp(lo), rep)
    while n < max_evals:
        mid = 0.5 * (lo + hi)
        rep = _witness_report(beta, math.exp(mid), N, cd, cfg)
        n += 1
        if _margin_ok(rep, factor):
            lo, best = mid, (math.exp(mid), rep)
        else:
            hi = mid
    return Witness(CounterexampleSpec(beta, best[0], cutoff_N=N), best[1], n)


def _search_log_n(beta, eps, cd, cfg, factor, max_evals) -> Witness:
    target = factor * cd.N_dim
    cache: dict[float, CDReport] = {}

    def at(k: float) -> CDReport:
        k = round(k, 2)
        if k not in cache:
            cache[k] = _witness_report(beta, eps, 10.0 ** k, cd, cfg)
        return cache[k]

    def done(k):
        return Witness(CounterexampleSpec(beta, eps, cutoff_N=10.0 ** k), cache[k], len(cache))

    lo, hi = 2.0, 30.0
    if _margin_ok(at(lo), factor):
        return done(lo)
    while not _margin_ok(at(hi), factor):
        if hi >= MAX_LOG10_N or len(cache) >= max_evals:
            raise NoViolationAtOrigin(
                f"N* = {at(hi).N_star:.4g} at N = 1e{hi:g} stays below {factor:g}*N_dim = {target:g}")
        # extrapolate N* linearly in log N from the last two samples, aiming 5% past the target
        s_lo, s_hi = at(lo).N_star, at(hi).N_star
        slope = (s_hi - s_lo) / (hi - lo)
        step = (1.05 * target - s_hi) / slope if slope > 0 else hi
        lo, hi = hi, min(MAX_LOG10_N, hi + max(1.0, math.ceil(step)))
    # shrink the bracket (lo fails, hi passes) towards the smallest passing integer log10 N
    while hi - lo > 1 and len(cache) < max_evals:
        s_lo, s_hi = at(lo).N_star, at(hi).N_star
        guess = lo + (1.05 * target - s_lo) * (hi - lo) / (s_hi - s_lo)
        mid = float(min(hi - 1, max(lo + 1, math.ceil(guess))))
        if _margin_ok(at(mid), factor):
            hi = mid
        else:
            lo = mid
    return done(hi)


# ---------------------------------------------------------------- local and global failure

DEFAULT_GRID = tuple(np.linspace(-0.125, 0.125, 17))


@dataclass(frozen=True)
class LocalScan:
    rho: float
    reports: tuple[CDReport, ...]
    mu: float

    def to_rows(self) -> list[dict]:
        return [{"x": r.x, "N_star": r.N_star, "verdict": r.verdict.value} for r in self.reports]


def _strict_violation(rep: CDReport) -> bool:
    """0 < Gamma_2 < mu L^2 with both inequalities clear of the uncertainties."""
    return rep.Gamma2_val.value > rep.Gamma2_val.uncertainty and rep.verdict is Verdict.VIOLATED


def local_violation_scan(u: ProfileFunction, mu: float, p: FracParams,
                         cfg: QuadratureConfig | None = None,
                         grid: Sequence[float] = DEFAULT_GRID) -> LocalScan:
    """Check the violation at every grid point |x| (evenness: only x >= 0 is computed)."""
    if not mu > 0:
        raise DomainError("mu must be positive")
    if not (u.compact and u.zero_radius >= 0.25 and u.is_even):
        raise DomainError("the local scan needs an even compactly supported profile with zero_radius >= 1/4")
    cd = CDParams(0.0, 1.0 / mu)
    origin = cd_check(u, 0.0, cd, p, cfg)
    if not _margin_ok(origin, 4.0):
        raise NoViolationAtOrigin(
            f"need Gamma_2(0) < (mu/4) L(0)^2 with margin; got N* = {origin.N_star:.4g}, "
            f"4/mu = {4 / mu:g}")
    radii = sorted({abs(float(x)) for x in grid} | {0.0})
    rest = parallel_map(lambda r: cd_check(u, r, cd, p, cfg), [r for r in radii if r > 0])
    reports = [origin] + rest
    rho = 0.0
    for rep in reports:
        if not _strict_violation(rep):
            break
        rho = float(rep.x)
    return LocalScan(rho, tuple(reports), mu)


def local_violation_radius(u: ProfileFunction, mu: float, p: FracParams,
                           cfg: QuadratureConfig | None = None,
                           grid: Sequence[float] = DEFAULT_GRID) -> float:
    """Largest grid radius rho with 0 < Gamma_2(u)(x) < mu (L u(x))^2 for all grid |x| <= rho."""
    return local_violation_scan(u, mu, p, cfg, grid).rho


@dataclass(frozen=True)
class BallPoint:
    radius: float
    N_star: float
    deficit: float
    uncertainty: float
    verdict: Verdict
    source: str
    drift: float = math.nan

    COLUMNS = ("radius", "N_star", "deficit", "uncertainty", "verdict", "source", "drift")

    def as_tuple(self):
        return tuple(getattr(self, c) if c != "verdict" else self.verdict.value for c in self.COLUMNS)


@dataclass(frozen=True)
class BallReport:
    R: float
    mu: float
    beta: float
    rho: float
    M: float
    witness: CounterexampleSpec
    points: tuple[BallPoint, ...]

    @property
    def verdict(self) -> Verdict:
        if all(pt.verdict is Verdict.VIOLATED for pt in self.points):
            return Verdict.VIOLATED
        if any(pt.verdict is Verdict.SATISFIED for pt in self.points):
            return Verdict.SATISFIED
        return Verdict.INCONCLUSIVE

    @property
    def max_drift(self) -> float:
        d = [pt.drift for pt in self.points if not math.isnan(pt.drift)]
        return max(d) if d else 0.0

    @property
    def lifted_descriptor(self) -> dict:
        return {"family": "scaled", "parameters": {"lambda": 1.0 / self.M,
                                                   "base": {"family": "v_N_eps", "parameters": {
                                                       "beta": self.witness.beta, "eps": self.witness.eps,
                                                       "N": self.witness.cutoff_N}}}}


def _scaled_report(rep: CDReport, M: float, beta: float, mu: float) -> CDReport:
    """Values at M x of v(./M) from those of v at x (L ~ M^-beta, Gamma_2 ~ M^-2beta)."""
    return CDReport(float(rep.x) * M, rep.L_val.scaled(M ** -beta), None,
                    rep.Gamma2_val.scaled(M ** (-2 * beta)), 0.0, 1.0 / mu)


def ball_counterexample(R: float, mu: float, beta: float, cfg: QuadratureConfig | None = None, *,
                        N: float | None = None, eps: float | None = None,
                        grid: Sequence[float] = DEFAULT_GRID, n_direct: int = 5,
                        witness: Witness | None = None) -> BallReport:
    """CD(0, 1/mu) fails on all of B_R(0) for the rescaled witness v(x / M), M = R / rho.

    The rescaled grid values follow from the scaling laws; ``n_direct`` radii
    are recomputed from scratch and their N* drift is recorded.
    """
    if not R > 0:
        raise DomainError("R must be positive")
    if not mu > 0:
        raise DomainError("mu must be positive")
    p = FracParams(beta, 1)
    w = witness or select_witness(beta, 1.0 / mu, cfg, N=N, eps=eps)
    v = w.profile
    scan = local_violation_scan(v, mu, p, cfg, grid)
    if scan.rho <= 0:
        raise NoViolationAtOrigin("the violation does not extend to any positive grid radius")
    M = R / scan.rho
    V = scaled(v, 1.0 / M)
    inside = [r for r in scan.reports if float(r.x) <= scan.rho]
    idx = np.unique(np.round(np.linspace(0, len(inside) - 1, min(n_direct, len(inside)))).astype(int))
    cd = CDParams(0.0, 1.0 / mu)
    direct = dict(zip(idx.tolist(), parallel_map(
        lambda i: cd_check(V, float(inside[i].x) * M, cd, p, cfg), idx.tolist())))
    points = []
    for i, rep in enumerate(inside):
        s = _scaled_report(rep, M, beta, mu)
        src, drift = "scaled", math.nan
        if i in direct:
            s, src = direct[i], "direct"
            drift = abs(s.N_star / rep.N_star - 1.0)
        points.append(BallPoint(float(rep.x) * M, s.N_star, s.deficit, s.uncertainty,
                                s.verdict, src, drift))
    return BallReport(R, mu, beta, scan.rho, M, w.spec, tuple(points))
