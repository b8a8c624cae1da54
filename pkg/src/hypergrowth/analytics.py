"""Mean-field theory of the aging hypernetwork (alpha = 1/2) and empirical estimators.

With c = m*m2 / (theta*m1) the expected hyperdegree of a node born at t_i is

    k(t_i, t) = (m + y) * ((1 + s) / (1 - s))**c - y,    s = sqrt(1 - t_i/t),

and theta solves theta = 2(m + a) * I(c), I(c) = int_0^1 ((1+u)/(1-u))**c du.
The stationary hyperdegree law follows from t_i/t being uniform on (0, 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate, optimize

from .errors import DivergentIntegral, InsufficientData, InvalidArgument, NumericFailure
from .stochastic import AttractivenessSpec, ConstantAttractiveness

QUAD_EPSABS = 1e-10
QUAD_EPSREL = 1e-8
THEORY_ALPHA = 0.5


@dataclass(frozen=True)
class TheoryParams:
    m: int
    m2: int
    m1: float
    a: float
    theta: float
    residual: float = 0.0

    @property
    def c(self) -> float:
        """Trajectory exponent m*m2 / (theta*m1)."""
        return self.m * self.m2 / (self.theta * self.m1)

    @property
    def g(self) -> float:
        """CCDF exponent; the pdf decays like k**-(g+1)."""
        return self.theta * self.m1 / (self.m * self.m2)

    @classmethod
    def with_exponent(cls, m: int, g: float, m2: int = 1, m1: float = 1.0, a: float = 0.0) -> "TheoryParams":
        """Debug constructor that pins g instead of solving for theta."""
        return cls(m=m, m2=m2, m1=m1, a=a, theta=g * m * m2 / m1, residual=math.nan)


def aging_integral(c: float) -> float:
    """int_0^1 ((1+u)/(1-u))**c du for 0 <= c < 1.

    Substituting u = 1 - v**2 turns it into int_0^1 2 (2 - v**2)**c v**(1-2c) dv,
    whose only singularity is the algebraic weight at v = 0 (QUADPACK qaws).
    """
    if not c < 1:
        raise DivergentIntegral(f"aging integral diverges for c = {c} >= 1")
    if c < 0:
        raise InvalidArgument("exponent c must be nonnegative")
    if c == 0:
        return 1.0
    val, _ = integrate.quad(
        lambda v: 2.0 * (2.0 - v * v) ** c,
        0.0, 1.0, weight="alg", wvar=(1.0 - 2.0 * c, 0.0),
        epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200,
    )
    return val


def selfconsistency_rhs(theta: float, m: int, m2: int, m1: float, a: float) -> float:
    if not theta > 0:
        raise InvalidArgument("theta must be positive")
    c = m * m2 / (theta * m1)
    return 2.0 * (m + a) * aging_integral(c)


def solve_theta(m: int, m2: int, m1: float, a: float, tol: float = 1e-10, max_iter: int = 500) -> TheoryParams:
    """Unique positive root of theta = selfconsistency_rhs(theta).

    The right side decreases in theta and blows up as c -> 1, so the root is
    bracketed between m*m2/m1 (just above) and a doubling upper bound.
    """
    if not m1 > 0:
        raise InvalidArgument("mean batch size m1 must be positive")
    if not a >= 0:
        raise InvalidArgument("mean attractiveness a must be nonnegative")
    if m < 1 or m2 < 1:
        raise InvalidArgument("m and m2 must be positive")

    def resid(th):
        return th - selfconsistency_rhs(th, m, m2, m1, a)

    lo = m * m2 / m1 * (1 + 1e-6)
    hi = 2.0 * max(lo, 2.0 * (m + a))
    for _ in range(200):
        if resid(hi) > 0:
            break
        lo, hi = hi, 2 * hi
    else:
        raise NumericFailure("could not bracket the characteristic value")
    try:
        theta, info = optimize.brentq(resid, lo, hi, xtol=1e-14, rtol=max(tol * 1e-3, 4.5e-16),
                                      maxiter=max_iter, full_output=True)
    except (RuntimeError, ValueError) as exc:
        raise NumericFailure(f"characteristic equation solve failed: {exc}") from exc
    if not info.converged:
        raise NumericFailure(f"no convergence after {info.iterations} iterations")
    r = resid(theta)
    if abs(r) > max(tol, 1e-12) * max(1.0, theta):
        raise NumericFailure(f"residual {r:.3e} above tolerance at theta={theta}")
    return TheoryParams(m=m, m2=m2, m1=float(m1), a=float(a), theta=theta, residual=abs(r))


def printed_form_residual(tp: TheoryParams) -> float:
    """Residual of the characteristic equation in its printed form, for comparison only.

    int_0^1 ((1+x)/(1-x))**c x dx - m*m2/(2*m1*(m+a)) - 1/2
    """
    c = tp.c
    if not c < 1:
        raise DivergentIntegral("printed form diverges for c >= 1")
    val, _ = integrate.quad(lambda x: x * (1 + x) ** c, 0.0, 1.0, weight="alg", wvar=(0.0, -c),
                            epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL)
    return val - tp.m * tp.m2 / (2 * tp.m1 * (tp.m + tp.a)) - 0.5


def trajectory_k(t_i: float, t: float, y: float, params: TheoryParams, m: int | None = None) -> float:
    m = params.m if m is None else m
    if t_i > t:
        raise InvalidArgument(f"birth time {t_i} is after observation time {t}")
    if not t_i > 0:
        raise InvalidArgument("birth time must be positive (the trajectory diverges at t_i = 0)")
    s = math.sqrt(1.0 - t_i / t)
    return (m + y) * ((1.0 + s) / (1.0 - s)) ** params.c - y


def birth_fraction_threshold(k: float, y: float, params: TheoryParams, m: int | None = None) -> float:
    """Largest t_i/t for which the trajectory reaches hyperdegree k."""
    m = params.m if m is None else m
    g = params.g
    # work with ratios to avoid overflow of (k + y)**g at large k
    r = ((m + y) / (k + y)) ** g
    return min(1.0, 4.0 * r / (1.0 + r) ** 2)  # exact value is <= 1


def theoretical_ccdf(k: float, y: float, params: TheoryParams, m: int | None = None) -> float:
    """Stationary P(K >= k | y) = 4AB / (A + B)**2, A = (m+y)**g, B = (k+y)**g."""
    m = params.m if m is None else m
    if k < m:
        raise InvalidArgument(f"k = {k} is below the minimum hyperdegree m = {m}")
    return birth_fraction_threshold(k, y, params, m)


def _pk_given_y(k: float, y: float, g: float, m: int) -> float:
    r = ((m + y) / (k + y)) ** g  # A/B
    return 4.0 * g * r * (1.0 - r) / ((1.0 + r) ** 3 * (k + y))


def theoretical_pk(k: float, params: TheoryParams, attractiveness: AttractivenessSpec, m: int | None = None) -> float:
    """Stationary hyperdegree density averaged over the attractiveness law."""
    m = params.m if m is None else m
    if k < m:
        raise InvalidArgument(f"k = {k} is below the minimum hyperdegree m = {m}")
    g = params.g
    return attractiveness.expect(lambda y: _pk_given_y(k, y, g, m))


def mixture_ccdf(k: float, params: TheoryParams, attractiveness: AttractivenessSpec, m: int | None = None) -> float:
    m = params.m if m is None else m
    if k < m:
        raise InvalidArgument(f"k = {k} is below the minimum hyperdegree m = {m}")
    return attractiveness.expect(lambda y: birth_fraction_threshold(k, y, params, m))


def pk_normalization(params: TheoryParams, attractiveness: AttractivenessSpec, m: int | None = None,
                     ccdf_floor: float = 1e-6) -> float:
    """int_m^K pk dk + CCDF(K), with K the first decade point where CCDF < ccdf_floor."""
    m = params.m if m is None else m
    K = float(m)
    while mixture_ccdf(K, params, attractiveness, m) >= ccdf_floor:
        K *= 10.0
    edges = np.geomspace(m, K, 8 * int(round(math.log10(K / m))) + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(lambda k: theoretical_pk(k, params, attractiveness, m), lo, hi,
                                epsabs=1e-13, epsrel=1e-11, limit=200)
        total += val
    return total + mixture_ccdf(K, params, attractiveness, m)


def pk_ccdf_consistency_check(params: TheoryParams, attractiveness: AttractivenessSpec,
                              ks: Iterable[float], h: float = 1e-4, m: int | None = None) -> float:
    """Max relative gap between -dCCDF/dk (finite differences) and pk over a grid."""
    m = params.m if m is None else m
    worst = 0.0
    for k in ks:
        if k - h < m:
            fd = -(mixture_ccdf(k + h, params, attractiveness, m) - mixture_ccdf(k, params, attractiveness, m)) / h
        else:
            fd = -(mixture_ccdf(k + h, params, attractiveness, m)
                   - mixture_ccdf(k - h, params, attractiveness, m)) / (2 * h)
        pk = theoretical_pk(k, params, attractiveness, m)
        worst = max(worst, abs(fd - pk) / abs(pk) if pk else abs(fd))
    return worst


# ---------------------------------------------------------------------------
# empirical side


@dataclass
class EmpiricalDistribution:
    ks: np.ndarray          # distinct observed hyperdegrees, ascending
    counts: np.ndarray
    n: int
    bin_edges: np.ndarray   # integer log-bin edges; bin j is [edges[j], edges[j+1])
    bin_counts: np.ndarray
    bin_ratio: float = 1.25
    pdf: np.ndarray = field(init=False)
    ccdf: np.ndarray = field(init=False)
    ccdf_counts: np.ndarray = field(init=False)

    def __post_init__(self):
        self.pdf = self.counts / self.n
        # P(K >= k): reverse cumulative count, exact in integers
        self.ccdf_counts = np.cumsum(self.counts[::-1])[::-1]
        self.ccdf = self.ccdf_counts / self.n

    @property
    def bin_widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)

    @property
    def bin_centers(self) -> np.ndarray:
        return np.sqrt(self.bin_edges[:-1] * (self.bin_edges[1:] - 1))

    @property
    def logbinned_pdf(self) -> np.ndarray:
        return self.bin_counts / (self.bin_widths * self.n)

    def ccdf_at(self, k: float) -> float:
        i = int(np.searchsorted(self.ks, k, side="left"))
        return float(self.ccdf_counts[i] / self.n) if i < len(self.ks) else 0.0


def _log_bin_edges(kmin: int, kmax: int, ratio: float) -> np.ndarray:
    edges = [int(kmin)]
    while edges[-1] <= kmax:
        edges.append(max(edges[-1] + 1, int(math.ceil(edges[-1] * ratio))))
    return np.asarray(edges, dtype=np.int64)


def empirical_distribution(hyperdegrees: Sequence[int] | np.ndarray, bin_ratio: float = 1.25) -> EmpiricalDistribution:
    k = np.asarray(hyperdegrees, dtype=np.int64)
    if k.ndim == 2:  # (node_id, count) pairs
        k = k[:, 1]
    if k.size == 0:
        raise InvalidArgument("empty hyperdegree sequence")
    if not bin_ratio > 1:
        raise InvalidArgument("log-bin ratio must exceed 1")
    ks, counts = np.unique(k, return_counts=True)
    edges = _log_bin_edges(int(ks[0]), int(ks[-1]), bin_ratio)
    bin_counts = np.histogram(k, bins=edges)[0]
    return EmpiricalDistribution(ks, counts, int(k.size), edges, bin_counts, bin_ratio)


@dataclass(frozen=True)
class TailFit:
    k_lo: int
    k_hi: int
    power_slope: float
    power_r2: float
    exp_rate: float
    exp_r2: float

    @property
    def pdf_exponent(self) -> float:
        return -self.power_slope + 1.0

    @property
    def preferred(self) -> str:
        return "power" if self.power_r2 >= self.exp_r2 else "exponential"

    def as_dict(self) -> dict:
        return {
            "k_lo": self.k_lo, "k_hi": self.k_hi,
            "power_slope": self.power_slope, "power_r2": self.power_r2,
            "pdf_exponent": self.pdf_exponent,
            "exp_rate": self.exp_rate, "exp_r2": self.exp_r2,
            "preferred": self.preferred,
        }


def _linfit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    ss_res = float(np.sum((y - (slope * x + intercept)) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), min(max(r2, 0.0), 1.0)


def fit_tail(dist: EmpiricalDistribution, k_lo: int, min_count: int = 10, min_points: int = 10) -> TailFit:
    """Least-squares fits of log CCDF against log k (power law) and against k (exponential).

    The window runs from k_lo to the largest k with at least ``min_count``
    observations at or above it.
    """
    ok = dist.ccdf_counts >= min_count
    if not ok.any():
        raise InsufficientData("no hyperdegree has enough observations in its tail")
    k_hi = int(dist.ks[ok][-1])
    sel = (dist.ks >= k_lo) & (dist.ks <= k_hi)
    n_obs = int(dist.counts[sel].sum())
    if sel.sum() < min_points or n_obs < min_count:
        raise InsufficientData(
            f"tail window [{k_lo}, {k_hi}] has {int(sel.sum())} distinct values and {n_obs} observations"
        )
    x = dist.ks[sel].astype(np.float64)
    logc = np.log(dist.ccdf[sel])
    p_slope, p_r2 = _linfit(np.log(x), logc)
    e_slope, e_r2 = _linfit(x, logc)
    return TailFit(int(x[0]), k_hi, p_slope, p_r2, -e_slope, e_r2)


def ks_distance(emp: EmpiricalDistribution, theory_ccdf) -> float:
    """sup over observed k of |P_emp(K >= k) - theory_ccdf(k)|."""
    return max(abs(float(c) - float(theory_ccdf(int(k)))) for k, c in zip(emp.ks, emp.ccdf))


def binned_theory_pdf(emp: EmpiricalDistribution, params: TheoryParams, attractiveness: AttractivenessSpec,
                      m: int | None = None) -> np.ndarray:
    """Theory mass of each log bin divided by its width; integer k stands for [k, k+1)."""
    m = params.m if m is None else m
    cc = [mixture_ccdf(max(float(e), m), params, attractiveness, m) for e in emp.bin_edges]
    return -np.diff(cc) / emp.bin_widths


def theory_for(m: int, m2: int, batch_mean: float, attractiveness: AttractivenessSpec) -> TheoryParams:
    return solve_theta(m, m2, batch_mean, attractiveness.mean)


__all__ = [
    "TheoryParams", "aging_integral", "selfconsistency_rhs", "solve_theta", "printed_form_residual",
    "trajectory_k", "birth_fraction_threshold", "theoretical_ccdf", "theoretical_pk", "mixture_ccdf",
    "pk_normalization", "pk_ccdf_consistency_check", "EmpiricalDistribution", "empirical_distribution",
    "TailFit", "fit_tail", "ks_distance", "binned_theory_pdf", "theory_for", "ConstantAttractiveness",
    "THEORY_ALPHA",
]
