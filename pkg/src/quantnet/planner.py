"""Closed-form parameter calculus for the quantized solver.

Everything here is pure arithmetic on spectral summaries: how many
quantization levels a given (gain, scale-decay) pair needs, how large the
initial scale must be to rule out saturation, which parameter pairs are
feasible for a given alphabet size, and the smallest achievable scale-decay
factor for a given alphabet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import LaplacianSummary
from .problem import StackedOperators
from .solver import GammaSchedule

__all__ = [
    "SpectralData",
    "ExactPlan",
    "LSPlan",
    "spectral_data",
    "m_value",
    "kmin_from_m",
    "s0_lower_bound",
    "xi_membership",
    "xi_ls_membership",
    "h_hat_exact",
    "h_star_exact",
    "plan_exact",
    "alpha_star",
    "m_prime",
    "h_hat_ls",
    "h_star_ls",
    "sr_lower_bound",
    "plan_ls",
    "gamma_schedule",
]

# guard band applied before the ceiling so that values sitting within
# floating-point noise of an integer do not round up spuriously
_CEIL_GUARD = 1e-9


@dataclass(frozen=True)
class SpectralData:
    """Bundle of every scalar the closed forms consume."""

    fd_min: float       # extreme eigenvalues of the stacked operator
    fd_max: float
    lambda2: float      # Laplacian algebraic connectivity
    lambdaN: float      # Laplacian largest eigenvalue
    dstar: int          # maximum node degree
    m: int
    n: int
    hd_inf_norm: float
    hd_2_norm: float
    zh_inf_norm: float
    zh_2_norm: float

    @property
    def kappa_n(self) -> float:
        return self.lambdaN / self.lambda2

    @property
    def h_cap_exact(self) -> float:
        return 2.0 / (self.fd_min + self.fd_max)

    @property
    def h_cap_ls(self) -> float:
        return min(2.0 / (self.lambda2 + self.lambdaN), 1.0 / self.fd_min)


def spectral_data(ops: StackedOperators, lap: LaplacianSummary,
                  m: int, n: int) -> SpectralData:
    return SpectralData(
        fd_min=ops.fd_min, fd_max=ops.fd_max,
        lambda2=lap.lambda2, lambdaN=lap.lambdaN, dstar=lap.dstar,
        m=m, n=n,
        hd_inf_norm=ops.hd_inf_norm, hd_2_norm=ops.hd_2_norm,
        zh_inf_norm=ops.zh_inf_norm, zh_2_norm=ops.zh_2_norm,
    )


@dataclass(frozen=True)
class ExactPlan:
    h: float
    alpha: float
    rho_h: float
    M: float
    Kmin_raw: int       # ceil(M - 1/2), may be 0 for degenerate inputs
    Kmin: int           # clamped to >= 1 (the smallest usable alphabet)
    s0_min: float | None
    eps: float | None
    h_star: float | None
    K: int | None = None
    member: bool | None = None


@dataclass(frozen=True)
class LSPlan:
    h: float
    beta0: float
    rho_hat: float
    kappa_n: float
    M1: float
    M2: float
    Mprime: float
    Kmin_ls_raw: int
    Kmin_ls: int
    sr_min: float | None
    gamma: GammaSchedule | None
    eps: float | None
    h_star_ls: float | None
    K: int | None = None
    member: bool | None = None


def kmin_from_m(m_val: float) -> int:
    """Minimum alphabet parameter: ceil(m_val - 1/2) with a guard band."""
    return int(math.ceil(m_val - 0.5 - _CEIL_GUARD * max(1.0, abs(m_val))))


def m_value(alpha: float, h: float, sp: SpectralData) -> float:
    """Required-level functional for the exact mode.

    M(alpha, h) = (1 + 2 h d*) / (2 alpha)
                  + h^2 sqrt(mN) lambdaN fd_max / (2 alpha (alpha - rho_h)).
    """
    rho_h = 1.0 - h * sp.fd_min
    if alpha <= rho_h:
        raise ValueError("alpha must exceed 1 - h*fd_min")
    return ((1.0 + 2.0 * h * sp.dstar) / (2.0 * alpha)
            + h * h * math.sqrt(sp.m * sp.n) * sp.lambdaN * sp.fd_max
            / (2.0 * alpha * (alpha - rho_h)))


def s0_lower_bound(alpha: float, h: float, cx: float, cw: float, K: int,
                   sp: SpectralData) -> float:
    """Smallest admissible initial scale ruling out saturation (exact mode).

    max of (cx + h ||Hd||_inf cw) / (K + 1/2)
    and 2 (alpha - rho_h)(rho_h cw + h cx lambdaN) / (h lambdaN).
    """
    if sp.lambdaN <= 0:
        raise ValueError("isolated network: lambdaN must be positive")
    rho_h = 1.0 - h * sp.fd_min
    if alpha <= rho_h:
        raise ValueError("alpha must exceed 1 - h*fd_min")
    first = (cx + h * sp.hd_inf_norm * cw) / (K + 0.5)
    second = (2.0 * (alpha - rho_h) * (rho_h * cw + h * cx * sp.lambdaN)
              / (h * sp.lambdaN))
    return max(first, second)


def xi_membership(alpha: float, h: float, K: int, sp: SpectralData) -> bool:
    """Exact-mode feasibility: h in (0, 2/(fd_min+fd_max)),
    alpha in (1 - h fd_min, 1), and M(alpha, h) < K + 1/2 (strict)."""
    if not (0.0 < h < sp.h_cap_exact):
        return False
    rho_h = 1.0 - h * sp.fd_min
    if not (rho_h < alpha < 1.0):
        return False
    return m_value(alpha, h, sp) < K + 0.5


def h_hat_exact(K: int, eps: float, sp: SpectralData) -> float:
    """Largest gain covered by the eps-parametrized exact feasibility slice."""
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must lie in (0, 1)")
    num = 2.0 * K * eps * sp.fd_min
    den = (math.sqrt(sp.m * sp.n) * sp.lambdaN * sp.fd_max
           + 2.0 * eps * sp.fd_min * sp.dstar
           + eps * (1.0 - eps) * (2 * K + 1) * sp.fd_min ** 2)
    return num / den


def h_star_exact(K: int, eps: float, sp: SpectralData) -> float:
    return min(sp.h_cap_exact, h_hat_exact(K, eps, sp))


def plan_exact(K: int, eps: float, sp: SpectralData,
               cx: float | None = None, cw: float | None = None,
               pick_fraction: float = 0.5) -> ExactPlan:
    """Feasible (alpha, h) for a given alphabet via the eps parametrization.

    h = pick_fraction * h*; alpha = 1 - (1 - eps) h fd_min. Membership is
    re-verified and a failure indicates a formula bug.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    if not (0.0 < pick_fraction < 1.0):
        raise ValueError("pick_fraction must lie in (0, 1)")
    h_star = h_star_exact(K, eps, sp)
    h = pick_fraction * h_star
    alpha = 1.0 - (1.0 - eps) * h * sp.fd_min
    if not xi_membership(alpha, h, K, sp):
        raise AssertionError("planned pair failed feasibility "
                             "(internal formula error)")
    mval = m_value(alpha, h, sp)
    kmin_raw = kmin_from_m(mval)
    s0_min = None
    if cx is not None and cw is not None:
        s0_min = s0_lower_bound(alpha, h, cx, cw, K, sp)
    return ExactPlan(h=h, alpha=alpha, rho_h=1.0 - h * sp.fd_min, M=mval,
                     Kmin_raw=kmin_raw, Kmin=max(1, kmin_raw), s0_min=s0_min,
                     eps=eps, h_star=h_star, K=K, member=True)


def alpha_star(K: int, sp: SpectralData, eps_step: float = 1e-3,
               h_fraction: float = 0.999) -> float:
    """Smallest feasible scale-decay factor for alphabet parameter K.

    Scans the eps parametrization on a grid (default spacing 1e-3) with the
    gain taken just inside its upper limit; the reported value carries the
    grid resolution as its accuracy.
    """
    eps_grid = np.arange(eps_step, 1.0, eps_step)
    best = None
    for eps in eps_grid:
        h = h_fraction * h_star_exact(K, float(eps), sp)
        if h <= 0.0:
            continue
        alpha = 1.0 - (1.0 - float(eps)) * h * sp.fd_min
        if xi_membership(alpha, h, K, sp):
            if best is None or alpha < best:
                best = alpha
    if best is None:
        raise RuntimeError("no feasible point found on the grid")
    return float(best)


def m_prime(h: float, beta0: float, sp: SpectralData, cx: float) -> tuple:
    """Required-level functionals for the least-squares mode.

    Returns (M1, M2, Mprime, Kmin_raw) following the printed closed forms;
    the denominators are (1/beta0 - rho_hat) with rho_hat = 1 - h lambda2.
    """
    rho_hat = 1.0 - h * sp.lambda2
    den = 1.0 / beta0 - rho_hat
    if den <= 0.0:
        raise ValueError("1/beta0 must exceed 1 - h*lambda2")
    lamN = sp.lambdaN
    root = math.sqrt(sp.m * sp.n)
    m1 = ((root * cx * (1.0 + h * lamN) + 2.0 * sp.zh_2_norm / sp.fd_min)
          * (sp.hd_inf_norm + h * lamN * sp.hd_2_norm / den)
          + sp.zh_inf_norm
          + lamN * (root * cx * (1.0 + h * beta0 * lamN)
                    + h * sp.zh_2_norm / den))
    m2 = (beta0 * root * lamN
          * (h * lamN / (2.0 * den)
             + (sp.hd_inf_norm + h * lamN * sp.hd_2_norm / den) / sp.fd_min))
    mp = (1.0 + 2.0 * h * sp.dstar) * beta0 + 2.0 * h * m2
    return m1, m2, mp, kmin_from_m(mp)


def xi_ls_membership(h: float, beta0: float, K: int, sp: SpectralData,
                     cx: float = 0.0) -> bool:
    """Least-squares feasibility: h in (0, min{2/(lambda2+lambdaN),
    1/fd_min}), beta0 in (1, 1/(1 - h lambda2)), Mprime <= K + 1/2."""
    if not (0.0 < h < sp.h_cap_ls):
        return False
    rho_hat = 1.0 - h * sp.lambda2
    if not (1.0 < beta0 < 1.0 / rho_hat):
        return False
    _, _, mp, _ = m_prime(h, beta0, sp, cx)
    return mp <= K + 0.5


def h_hat_ls(K: int, eps: float, sp: SpectralData) -> float:
    """Largest gain covered by the eps-parametrized least-squares slice."""
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must lie in (0, 1)")
    num = 2.0 * K * eps * sp.fd_min
    den = (2.0 * sp.dstar * eps * sp.fd_min
           + (2 * K + 1) * eps * (1.0 - eps) * sp.fd_min * sp.lambda2
           + 2.0 * math.sqrt(sp.m * sp.n) * sp.lambdaN
           * (2.0 * eps * sp.hd_inf_norm
              + sp.kappa_n * (2.0 * sp.hd_2_norm + sp.fd_min)))
    return num / den


def h_star_ls(K: int, eps: float, sp: SpectralData) -> float:
    # the printed gain cap names the smallest eigenvalue of a matrix that
    # never appears elsewhere; the consistent reading (matching the
    # membership set) is 1/fd_min, which h_cap_ls uses
    return min(sp.h_cap_ls, h_hat_ls(K, eps, sp))


def sr_lower_bound(h: float, K: int, cx: float, sp: SpectralData,
                   m1: float, m2: float) -> float:
    """Smallest admissible reference scale ruling out saturation (LS mode).

    max of (cx + h (cx ||Hd||_inf + ||zH||_inf)) / (K + 1/2) and M1/M2.
    """
    if m2 <= 0.0:
        raise ValueError("M2 must be positive")
    first = (cx + h * (cx * sp.hd_inf_norm + sp.zh_inf_norm)) / (K + 0.5)
    return max(first, m1 / m2)


def plan_ls(K: int, eps: float, sp: SpectralData, delta: float,
            cx: float = 0.0, pick_fraction: float = 0.5) -> LSPlan:
    """Feasible (h, beta0) for a given alphabet in least-squares mode.

    h = pick_fraction * h*; 1/beta0 = 1 - (1-eps) h lambda2; the schedule
    offset follows from k0 = 1/(beta0**(1/delta) - 1).
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    if not (0.0 < pick_fraction < 1.0):
        raise ValueError("pick_fraction must lie in (0, 1)")
    h_star = h_star_ls(K, eps, sp)
    h = pick_fraction * h_star
    beta0 = 1.0 / (1.0 - (1.0 - eps) * h * sp.lambda2)
    if not xi_ls_membership(h, beta0, K, sp, cx):
        raise AssertionError("planned pair failed feasibility "
                             "(internal formula error)")
    m1, m2, mp, kmin_raw = m_prime(h, beta0, sp, cx)
    k0 = 1.0 / (beta0 ** (1.0 / delta) - 1.0)
    sched = GammaSchedule(k0=k0, delta=delta)
    return LSPlan(h=h, beta0=beta0, rho_hat=1.0 - h * sp.lambda2,
                  kappa_n=sp.kappa_n, M1=m1, M2=m2, Mprime=mp,
                  Kmin_ls_raw=kmin_raw, Kmin_ls=max(1, kmin_raw),
                  sr_min=sr_lower_bound(h, K, cx, sp, m1, m2),
                  gamma=sched, eps=eps, h_star_ls=h_star, K=K, member=True)


def gamma_schedule(k0: float, delta: float) -> GammaSchedule:
    """Diminishing-gain schedule gamma(k) = (k0/(k+k0))**delta."""
    return GammaSchedule(k0=k0, delta=delta)
