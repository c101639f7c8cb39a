"""Test-function families: smooth steps, cutoffs and the counterexample profiles.

Every profile is an immutable :class:`ProfileFunction` whose ``eval`` and
``deriv`` accept numpy arrays.  The metadata (evenness, growth, support,
zero plateau, feature points) is what the operator layer uses to pick
quadrature breakpoints and to decide which integrals converge.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .errors import DomainError, InvalidInterval, SpecViolation

ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ProfileFunction:
    eval: ArrayFn
    deriv: ArrayFn
    is_even: bool
    growth_exponent: float
    support_radius: float = math.inf
    zero_radius: float = 0.0
    smoothness: str = "C^inf"
    # abscissae |x| where the profile changes regime; used as quadrature breakpoints
    features: tuple[float, ...] = ()
    descriptor: dict[str, Any] = field(default_factory=dict, compare=False)
    metadata: dict[str, Any] = field(default_factory=dict, compare=False)

    def __call__(self, x):
        return self.eval(np.asarray(x, dtype=float))

    @property
    def compact(self) -> bool:
        return math.isfinite(self.support_radius)

    @property
    def bounded(self) -> bool:
        return self.compact or self.growth_exponent <= 0

    def feature_points(self) -> list[float]:
        """Signed feature abscissae; even profiles store only the positive half."""
        pts = set(self.features)
        if self.is_even:
            pts |= {-p for p in pts}
        for r in (self.zero_radius, self.support_radius):
            if 0 < r < math.inf:
                pts |= {r, -r}
        return sorted(pts)

    def increment(self, x: float, d) -> np.ndarray:
        """``eval(x + d) - eval(x)`` without the cancellation of direct subtraction.

        Where ``|d|`` is tiny compared with ``|x|`` or with the distance from
        ``x`` to the nearest feature point, and no feature point lies between
        ``x`` and ``x + d``, the difference is the integral of ``deriv`` over
        ``[x, x + d]`` by Gauss-Legendre.
        """
        d = np.asarray(d, dtype=float)
        out = np.array(self.eval(x + d) - self.eval(np.array(x)), dtype=float)
        pts = self.feature_points()
        gap = min((abs(p - x) for p in pts), default=1.0)
        small = np.abs(d) <= max(_INCREMENT_RATIO * abs(x), _LOCAL_RATIO * gap)
        for p in pts:
            small &= np.sign(p - x) * np.sign(p - x - d) > 0
        if small.any():
            ds = d[small]
            nodes = x + ds[..., None] * _GL_NODES
            out[small] = ds * (self.deriv(nodes) @ _GL_WEIGHTS)
        return out


_INCREMENT_RATIO = 1e-5
# 8-point Gauss-Legendre is exact to rounding once the step is this small against the local feature scale
_LOCAL_RATIO = 0.05
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)
_GL_NODES = 0.5 * (_GL_NODES + 1.0)
_GL_WEIGHTS = 0.5 * _GL_WEIGHTS


def _sigma(t: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        return np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)


def _dsigma(t: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        tt = np.where(t > 0, t, 1.0)
        return np.where(t > 0, np.exp(-1.0 / tt) / tt**2, 0.0)


def smooth_step(a: float, b: float) -> ProfileFunction:
    """C-infinity step from 0 on (-inf, a] to 1 on [b, inf)."""
    if not a < b:
        raise InvalidInterval(f"smooth_step needs a < b, got a={a}, b={b}")
    w = b - a

    def ev(x):
        tau = (np.asarray(x, dtype=float) - a) / w
        s0, s1 = _sigma(tau), _sigma(1.0 - tau)
        return s0 / (s0 + s1)

    def de(x):
        tau = (np.asarray(x, dtype=float) - a) / w
        s0, s1 = _sigma(tau), _sigma(1.0 - tau)
        d0, d1 = _dsigma(tau), _dsigma(1.0 - tau)
        return (d0 * s1 + s0 * d1) / (s0 + s1) ** 2 / w

    return ProfileFunction(ev, de, is_even=False, growth_exponent=0.0, features=(a, b),
                           descriptor={"family": "smooth_step", "parameters": {"a": a, "b": b}})


@dataclass(frozen=True)
class CounterexampleSpec:
    beta: float
    eps: float
    Lambda: float = 1.0
    delta: float = 1.0
    cutoff_N: float = 32.0
    dim: int = 1

    def __post_init__(self):
        b, e = self.beta, self.eps
        if not 0 < b < 2:
            raise SpecViolation("beta must satisfy 0 < beta < 2")
        if not e > 0:
            raise SpecViolation("eps must be positive")
        if not e < b / 2:
            raise SpecViolation("eps must satisfy eps < beta/2")
        if b > 1 and not e < (b - 1) / 2:
            raise SpecViolation("eps must satisfy eps < (beta-1)/2 when beta > 1")
        if not self.Lambda > 0 or not self.delta > 0:
            raise SpecViolation("Lambda and delta must be positive")
        if not self.beta + self.delta > 1:
            raise SpecViolation("delta must satisfy beta + delta > 1")
        if not self.cutoff_N > 1:
            raise SpecViolation("N must satisfy N > 1")
        if self.dim < 1:
            raise SpecViolation("dim must be >= 1")

    def check_strict(self) -> None:
        """Constraints used for the compactly supported construction."""
        b, e = self.beta, self.eps
        if not 4 * e < b:
            raise SpecViolation("eps must satisfy 4*eps < beta")
        if b > 1 and not 4 * e < b - 1:
            raise SpecViolation("eps must satisfy 4*eps < beta-1 when beta > 1")
        if b > 0.5 and not 4 * e < b - 0.5:
            raise SpecViolation("eps must satisfy 4*eps < beta-1/2 when beta > 1/2")

    @property
    def gamma(self) -> float:
        return self.beta - self.eps

    def to_dict(self) -> dict:
        return {"beta": self.beta, "eps": self.eps, "Lambda": self.Lambda, "delta": self.delta,
                "cutoff_N": self.cutoff_N, "dim": self.dim}


def is_strict(beta: float, eps: float) -> bool:
    try:
        CounterexampleSpec(beta, eps).check_strict()
    except SpecViolation:
        return False
    return True


_INNER_STEP = (0.25, 0.75)


def _phi_envelope(beta: float, eps: float, n: int = 10_000) -> tuple[float, float]:
    """Largest delta (grid step 0.01) with a constant Lambda <= 100 such that
    0 <= phi <= Lambda x^(beta+delta) and |phi'| <= Lambda x^(beta+delta-1) on (0, 1]."""
    gam = beta - eps
    x = np.linspace(1.0 / n, 1.0, n)
    s = smooth_step(*_INNER_STEP)
    phi = x**gam * s.eval(x)
    dphi = gam * x ** (gam - 1) * s.eval(x) + x**gam * s.deriv(x)
    lo = max(0.0, 1.0 - beta)
    for k in range(100, 0, -1):
        delta = k / 100
        if delta <= lo:
            break
        lam = max(np.max(phi / x ** (beta + delta)), np.max(np.abs(dphi) / x ** (beta + delta - 1)))
        if lam <= 100:
            return float(lam), delta
    raise SpecViolation("no envelope witness (Lambda <= 100) found for the inner cutoff")


def make_u_eps(spec: CounterexampleSpec) -> ProfileFunction:
    """Even profile equal to |x|^(beta-eps) for |x| >= 3/4, vanishing on |x| <= 1/4."""
    gam = spec.gamma
    s = smooth_step(*_INNER_STEP)

    def ev(x):
        ax = np.abs(np.asarray(x, dtype=float))
        return ax**gam * s.eval(ax)

    def de(x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            d = np.where(ax > 0, gam * np.where(ax > 0, ax, 1.0) ** (gam - 1), 0.0) * s.eval(ax)
        return np.sign(x) * (d + ax**gam * s.deriv(ax))

    lam, delta = _phi_envelope(spec.beta, spec.eps)
    return ProfileFunction(ev, de, is_even=True, growth_exponent=gam, zero_radius=0.25,
                           features=(0.25, 0.75, 1.0),
                           descriptor={"family": "u_eps", "parameters": {"beta": spec.beta, "eps": spec.eps}},
                           metadata={"Lambda": lam, "delta": delta})


def make_eta_N(N: float) -> ProfileFunction:
    """Even cutoff: 1 on |x| <= N, 0 on |x| >= N^2."""
    if not N > 1:
        raise InvalidInterval("N must satisfy N > 1")
    s = smooth_step(N, N * N)

    def ev(x):
        return 1.0 - s.eval(np.abs(np.asarray(x, dtype=float)))

    def de(x):
        x = np.asarray(x, dtype=float)
        return -np.sign(x) * s.deriv(np.abs(x))

    return ProfileFunction(ev, de, is_even=True, growth_exponent=0.0, support_radius=N * N,
                           features=(N, N * N),
                           descriptor={"family": "eta_N", "parameters": {"N": N}})


def make_chi_n(n: float) -> ProfileFunction:
    """Radial cutoff: 1 on |x| <= n, 0 on |x| >= n + 1, with |chi'| <= 2."""
    if not n > 0:
        raise InvalidInterval("n must be positive")
    s = smooth_step(n, n + 1.0)
    return ProfileFunction(lambda x: 1.0 - s.eval(np.abs(np.asarray(x, dtype=float))),
                           lambda x: -np.sign(x) * s.deriv(np.abs(np.asarray(x, dtype=float))),
                           is_even=True, growth_exponent=0.0, support_radius=n + 1.0,
                           features=(n, n + 1.0),
                           descriptor={"family": "chi_n", "parameters": {"n": n}})


def make_v_N_eps(spec: CounterexampleSpec) -> ProfileFunction:
    """Compactly supported counterexample ``u_eps * eta_N``."""
    spec.check_strict()
    u = make_u_eps(spec)
    eta = make_eta_N(spec.cutoff_N)
    N = spec.cutoff_N

    def ev(x):
        return u.eval(x) * eta.eval(x)

    def de(x):
        return u.deriv(x) * eta.eval(x) + u.eval(x) * eta.deriv(x)

    return ProfileFunction(ev, de, is_even=True, growth_exponent=0.0, support_radius=N * N,
                           zero_radius=0.25, features=(0.25, 0.75, 1.0, N, N * N),
                           descriptor={"family": "v_N_eps",
                                       "parameters": {"beta": spec.beta, "eps": spec.eps, "N": N}},
                           metadata=dict(u.metadata))


def lemma_f(gamma: float, x):
    """(1+x)^gamma - 1 - x^gamma on [0, 1]."""
    x = _check_lemma_args(gamma, x)
    return (1 + x) ** gamma - 1 - x**gamma


def lemma_g(gamma: float, x):
    """1 + x^gamma - (1-x)^gamma on [0, 1]."""
    x = _check_lemma_args(gamma, x)
    return 1 + x**gamma - (1 - x) ** gamma


def _check_lemma_args(gamma, x):
    if not 0 < gamma < 2:
        raise DomainError("gamma must lie in (0, 2)")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0) or np.any(xa > 1):
        raise DomainError("x must lie in [0, 1]")
    return xa if xa.ndim else float(xa)


def gaussian_profile() -> ProfileFunction:
    return ProfileFunction(lambda x: np.exp(-0.5 * np.asarray(x, dtype=float) ** 2),
                           lambda x: -np.asarray(x, dtype=float) * np.exp(-0.5 * np.asarray(x, dtype=float) ** 2),
                           is_even=True, growth_exponent=-math.inf, features=(1.0, 4.0, 8.0),
                           descriptor={"family": "gaussian", "parameters": {}})


def bump_profile(radius: float = 1.0) -> ProfileFunction:
    """exp(-1/(1 - (x/r)^2)) on |x| < r, zero outside."""
    r = float(radius)

    def ev(x):
        y = np.asarray(x, dtype=float) / r
        inside = np.abs(y) < 1
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return np.where(inside, np.exp(-1.0 / np.where(inside, 1 - y * y, 1.0)), 0.0)

    def de(x):
        y = np.asarray(x, dtype=float) / r
        inside = np.abs(y) < 1
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            w = np.where(inside, 1 - y * y, 1.0)
            return np.where(inside, np.exp(-1.0 / w) * (-2 * y / w**2) / r, 0.0)

    return ProfileFunction(ev, de, is_even=True, growth_exponent=0.0, support_radius=r,
                           features=(0.5 * r, 0.9 * r),
                           descriptor={"family": "bump", "parameters": {"radius": r}})


def constant_profile(value: float = 1.0) -> ProfileFunction:
    c = float(value)
    return ProfileFunction(lambda x: np.full(np.shape(x), c), lambda x: np.zeros(np.shape(x)),
                           is_even=True, growth_exponent=0.0,
                           descriptor={"family": "const", "parameters": {"value": c}})


def scaled(u: ProfileFunction, lam: float) -> ProfileFunction:
    """y -> u(lam * y)."""
    if not lam > 0:
        raise ValueError("scale factor must be positive")
    return ProfileFunction(lambda x: u.eval(lam * np.asarray(x, dtype=float)),
                           lambda x: lam * u.deriv(lam * np.asarray(x, dtype=float)),
                           is_even=u.is_even, growth_exponent=u.growth_exponent,
                           support_radius=u.support_radius / lam, zero_radius=u.zero_radius / lam,
                           smoothness=u.smoothness, features=tuple(p / lam for p in u.features),
                           descriptor={"family": "scaled", "parameters": {"lambda": lam, "base": u.descriptor}},
                           metadata=dict(u.metadata))


def translated(v: ProfileFunction, x: float) -> ProfileFunction:
    """y -> v(x - y) - v(x): moves the point x to the origin and zeroes it there."""
    vx = float(v.eval(np.array(x)))
    pts = [x - p for p in v.feature_points()]
    support = v.support_radius + abs(x) if v.compact else math.inf
    growth = v.growth_exponent if not v.compact else 0.0
    # v(x) is subtracted, so the translate is only compactly supported when v(x) = 0
    return ProfileFunction(lambda y: v.increment(x, -np.asarray(y, dtype=float)),
                           lambda y: -v.deriv(x - np.asarray(y, dtype=float)),
                           is_even=v.is_even and x == 0, growth_exponent=growth,
                           support_radius=support if vx == 0.0 else math.inf,
                           smoothness=v.smoothness,
                           features=tuple(sorted(set(pts))),
                           descriptor={"family": "translated", "parameters": {"x": x, "base": v.descriptor}})


def from_descriptor(desc: dict) -> ProfileFunction:
    """Rebuild a profile from its JSON descriptor ``{family, parameters}``."""
    fam = desc["family"]
    p = desc.get("parameters", {})
    if fam == "u_eps":
        return make_u_eps(CounterexampleSpec(p["beta"], p["eps"]))
    if fam == "v_N_eps":
        return make_v_N_eps(CounterexampleSpec(p["beta"], p["eps"], cutoff_N=p["N"]))
    if fam == "eta_N":
        return make_eta_N(p["N"])
    if fam == "chi_n":
        return make_chi_n(p["n"])
    if fam == "smooth_step":
        return smooth_step(p["a"], p["b"])
    if fam == "gaussian":
        return gaussian_profile()
    if fam == "bump":
        return bump_profile(p.get("radius", 1.0))
    if fam == "const":
        return constant_profile(p.get("value", 1.0))
    if fam == "scaled":
        return scaled(from_descriptor(p["base"]), p["lambda"])
    if fam == "translated":
        return translated(from_descriptor(p["base"]), p["x"])
    raise ValueError(f"unknown profile family {fam!r}")
