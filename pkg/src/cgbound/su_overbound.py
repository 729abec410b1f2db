"""Single-CDF Cauchy-Gaussian overbound for zero-bias symmetric-unimodal
errors: minimal Gaussian scale, minimal Cauchy scale capped at
sqrt(2/pi)*sigma, a tangential transition between the Cauchy core and the
Gaussian tails, and the piecewise synthesis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr, ndtri

from .distributions import MIN_CAUCHY_OVER_GAUSS_RATIO, Cauchy, Gaussian
from .empirical import FitTarget
from .errors import BiasedTargetError, InfeasibleFitError, NumericFailure

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class SuOverbound:
    """Piecewise symmetric bound: Cauchy core, straight transition, Gaussian tails.

    The cdf on x > 0 is the Cauchy cdf below x1, the tangent line K*(x - x1) +
    F_C(x1) on [x1, x2], and the Gaussian cdf above x2; mirrored on x < 0.
    When degenerate_gaussian is set the bound collapses to the single-CDF
    Gaussian (near-Gaussian target, no transition exists).
    """

    sigma_o: float
    lambda_o: float
    K: float
    x1: float
    x2: float
    degenerate_gaussian: bool = False
    center_shift: float = 0.0

    def _gauss(self) -> Gaussian:
        return Gaussian(0.0, self.sigma_o)

    def _cauchy(self) -> Cauchy:
        return Cauchy(0.0, self.lambda_o)

    def cdf(self, x):
        arr = np.asarray(x, dtype=float) - self.center_shift
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        if self.degenerate_gaussian:
            out = self._gauss().cdf(arr)
        else:
            g, c = self._gauss(), self._cauchy()
            out = np.empty_like(arr)
            a = np.abs(arr)
            tail = a > self.x2
            core = a < self.x1
            mid = ~(tail | core)
            out[tail] = g.cdf(arr[tail])
            out[core] = c.cdf(arr[core])
            # tangent line on the right, mirrored (F(-x) = 1 - F(x)) on the left
            t_r = self.K * (a[mid] - self.x1) + c.cdf(self.x1)
            out[mid] = np.where(arr[mid] >= 0.0, t_r, 1.0 - t_r)
        return float(out[0]) if scalar else out

    def pdf(self, x):
        arr = np.asarray(x, dtype=float) - self.center_shift
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        if self.degenerate_gaussian:
            out = self._gauss().pdf(arr)
        else:
            g, c = self._gauss(), self._cauchy()
            a = np.abs(arr)
            out = np.where(a > self.x2, g.pdf(arr), np.where(a < self.x1, c.pdf(arr), self.K))
        return float(out[0]) if scalar else out

    def quantile(self, p):
        arr = np.asarray(p, dtype=float)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        if np.any((arr <= 0.0) | (arr >= 1.0)):
            raise NumericFailure("quantile level outside (0, 1)")
        if self.degenerate_gaussian:
            out = self._gauss().quantile(arr)
        else:
            g, c = self._gauss(), self._cauchy()
            fc_x1 = c.cdf(self.x1)
            fg_x2 = g.cdf(self.x2)
            # cdf breakpoints on the upper half: 1/2 -> fc_x1 at x1 -> fg_x2 at x2
            out = np.empty_like(arr)
            up = arr >= 0.5
            pu = np.where(up, arr, 1.0 - arr)  # fold to upper half
            res = np.empty_like(pu)
            in_core = pu <= fc_x1
            in_tail = pu >= fg_x2
            in_mid = ~(in_core | in_tail)
            res[in_core] = c.quantile(np.clip(pu[in_core], 0.5, fc_x1))
            res[in_tail] = g.quantile(pu[in_tail])
            res[in_mid] = self.x1 + (pu[in_mid] - fc_x1) / self.K
            out = np.where(up, res, -res)
        out = out + self.center_shift
        return float(out[0]) if scalar else out

    def record(self) -> dict:
        return {
            "type": "cauchy_gaussian_su",
            "sigma_o": self.sigma_o,
            "lambda_o": self.lambda_o,
            "K": self.K,
            "x1": self.x1,
            "x2": self.x2,
            "degenerate_gaussian": self.degenerate_gaussian,
            "center_shift": self.center_shift,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "SuOverbound":
        return cls(
            sigma_o=float(rec["sigma_o"]),
            lambda_o=float(rec["lambda_o"]),
            K=float(rec["K"]),
            x1=float(rec["x1"]),
            x2=float(rec["x2"]),
            degenerate_gaussian=bool(rec.get("degenerate_gaussian", False)),
            center_shift=float(rec.get("center_shift", 0.0)),
        )


# ---------------------------------------------------------------------------
# Step 1: minimal single-CDF scales

def _check_centered(target: FitTarget, bias_tol_factor: float) -> float:
    """Return the centering shift, or raise if the target is genuinely biased."""
    tol = bias_tol_factor * target.scale
    if abs(target.bias) > tol:
        raise BiasedTargetError(
            f"target bias {target.bias:.6g} m exceeds tolerance {tol:.3g} m; "
            "use the paired (n.s.u.) overbound instead"
        )
    # align the bound's symmetry point with the sample median so that the
    # step-CDF constraints on either side of zero are consistent
    return target.center


def _su_gaussian_feasible(sigma: float, xs, lo, hi, ge, le) -> bool:
    f = ndtr(xs / sigma)
    return bool(np.all(f[ge] >= hi[ge]) and np.all(f[le] <= lo[le]))


def _su_cauchy_feasible(lam: float, xs, lo, hi, ge, le) -> bool:
    f = 0.5 + np.arctan(xs / lam) / math.pi
    return bool(np.all(f[ge] >= hi[ge]) and np.all(f[le] <= lo[le]))


def _bisect_scale(feasible, start: float, tol: float, hard_cap: float | None = None) -> float:
    """Smallest feasible scale via bisection; feasibility is monotone in scale."""
    hi_s = start
    if hard_cap is not None:
        hi_s = min(hi_s, hard_cap)
    for _ in range(200):
        if feasible(hi_s):
            break
        if hard_cap is not None and hi_s >= hard_cap:
            raise InfeasibleFitError("no feasible scale at the hard cap")
        hi_s *= 2.0
        if hard_cap is not None:
            hi_s = min(hi_s, hard_cap)
    else:
        raise InfeasibleFitError("scale bisection found no feasible upper bracket")
    lo_s = 0.0
    while hi_s - lo_s > tol:
        mid = 0.5 * (lo_s + hi_s)
        if mid <= 0.0:
            break
        if feasible(mid):
            hi_s = mid
        else:
            lo_s = mid
    return hi_s


def fit_single_gaussian(
    target: FitTarget, bias_tol_factor: float = 1e-6, scale_tol: float = 1e-6
) -> float:
    """Minimal sigma with F_G(x;0,sigma) above the target where its CDF is
    <= 1/2 and below it where > 1/2 (Decleene's single-CDF inequalities)."""
    shift = _check_centered(target, bias_tol_factor)
    t = target.shifted(shift)
    ge, le = t.dominate_mask(), t.dominated_mask()
    return _bisect_scale(
        lambda s: _su_gaussian_feasible(s, t.xs, t.lo, t.hi, ge, le),
        start=10.0 * target.scale,
        tol=scale_tol,
    )


def fit_single_cauchy(
    target: FitTarget,
    sigma_o: float,
    bias_tol_factor: float = 1e-6,
    scale_tol: float = 1e-6,
) -> float:
    """Minimal Cauchy scale subject to the same inequalities and the cap
    lambda <= sqrt(2/pi)*sigma_o (the cap is always feasible: that Cauchy
    overbounds the Gaussian, which overbounds the target)."""
    shift = _check_centered(target, bias_tol_factor)
    t = target.shifted(shift)
    ge, le = t.dominate_mask(), t.dominated_mask()
    cap = MIN_CAUCHY_OVER_GAUSS_RATIO * sigma_o
    if not _su_cauchy_feasible(cap, t.xs, t.lo, t.hi, ge, le):
        raise InfeasibleFitError(
            "Cauchy cap sqrt(2/pi)*sigma_o is infeasible; sigma_o does not bound the target"
        )
    return _bisect_scale(
        lambda lam: _su_cauchy_feasible(lam, t.xs, t.lo, t.hi, ge, le),
        start=cap,
        tol=scale_tol,
        hard_cap=cap,
    )


# ---------------------------------------------------------------------------
# Step 2: tangential transition

@dataclass(frozen=True)
class TransitionSolution:
    K: float
    x1: float
    x2: float
    degenerate: bool


def _cauchy_pdf_inv_positive(k: float, lam: float) -> float:
    """Positive root of f_C(x;0,lam) = k on the decreasing branch."""
    return lam * math.sqrt(1.0 / (math.pi * lam * k) - 1.0)


def _gauss_pdf_inv_positive(k: float, sigma: float) -> float:
    """Positive root of f_G(x;0,sigma) = k on the decreasing branch."""
    return sigma * math.sqrt(-2.0 * math.log(_SQRT_2PI * sigma * k))


def solve_tangential_transition(sigma_o: float, lambda_o: float) -> TransitionSolution:
    """Unique (K, x1, x2) with f_C(x1) = f_G(x2) = (F_G(x2)-F_C(x1))/(x2-x1).

    Solved as a 1-D root find over the slope K: x1(K), x2(K) come from the
    closed-form pdf inverses, and the chord residual r(K) is driven to zero.
    The bracket comes from the CDF crossing x_t of F_C and F_G on x > 0,
    where r(f_C(x_t)) < 0 < r(f_G(x_t)).
    """
    if lambda_o >= MIN_CAUCHY_OVER_GAUSS_RATIO * sigma_o * (1.0 - 1e-12):
        # the Cauchy already overbounds the Gaussian: collapse to the Gaussian
        return TransitionSolution(K=float("nan"), x1=float("nan"), x2=float("nan"), degenerate=True)

    g = Gaussian(0.0, sigma_o)
    c = Cauchy(0.0, lambda_o)

    def gap(x: float) -> float:
        return c.cdf(x) - g.cdf(x)

    # F_C > F_G just above 0 (cauchy peak higher); bracket the sign change
    a = 1e-9 * sigma_o
    b = sigma_o
    for _ in range(200):
        if gap(b) < 0.0:
            break
        b *= 2.0
    else:
        raise NumericFailure("no CDF crossing found; inputs inconsistent")
    x_t = brentq(gap, a, b, xtol=1e-15, rtol=8.9e-16, maxiter=300)

    k_lo = c.pdf(x_t)
    k_hi = g.pdf(x_t)
    if not k_lo < k_hi:
        return TransitionSolution(K=float("nan"), x1=float("nan"), x2=float("nan"), degenerate=True)

    def residual(k: float) -> float:
        x1 = _cauchy_pdf_inv_positive(k, lambda_o)
        x2 = _gauss_pdf_inv_positive(k, sigma_o)
        return k * (x2 - x1) - (g.cdf(x2) - c.cdf(x1))

    k_star = brentq(residual, k_lo, k_hi, xtol=1e-300, rtol=8.9e-16, maxiter=300)
    x1 = _cauchy_pdf_inv_positive(k_star, lambda_o)
    x2 = _gauss_pdf_inv_positive(k_star, sigma_o)
    if not (0.0 < x1 < x2):
        raise NumericFailure(f"transition solve produced invalid tangent points ({x1}, {x2})")
    return TransitionSolution(K=k_star, x1=x1, x2=x2, degenerate=False)


# ---------------------------------------------------------------------------
# Step 3: synthesis and the one-call fit

def synthesize_su(
    sigma_o: float,
    lambda_o: float,
    K: float,
    x1: float,
    x2: float,
    degenerate_gaussian: bool = False,
    center_shift: float = 0.0,
) -> SuOverbound:
    return SuOverbound(
        sigma_o=sigma_o,
        lambda_o=lambda_o,
        K=K,
        x1=x1,
        x2=x2,
        degenerate_gaussian=degenerate_gaussian,
        center_shift=center_shift,
    )


def fit_su_overbound(
    target: FitTarget,
    bias_tol_factor: float = 1e-6,
    scale_tol: float = 1e-6,
) -> tuple[SuOverbound, dict]:
    """Run all three construction steps; returns the bound and a fit report."""
    shift = _check_centered(target, bias_tol_factor)
    sigma_o = fit_single_gaussian(target, bias_tol_factor, scale_tol)
    lambda_o = fit_single_cauchy(target, sigma_o, bias_tol_factor, scale_tol)
    tr = solve_tangential_transition(sigma_o, lambda_o)
    bound = synthesize_su(
        sigma_o, lambda_o, tr.K, tr.x1, tr.x2, tr.degenerate, center_shift=shift
    )
    report = {
        "sigma_o": sigma_o,
        "lambda_o": lambda_o,
        "lambda_cap": MIN_CAUCHY_OVER_GAUSS_RATIO * sigma_o,
        "K": tr.K,
        "x1": tr.x1,
        "x2": tr.x2,
        "degenerate_gaussian": tr.degenerate,
        "center_shift": shift,
        "target_kind": target.kind,
        "n_constraints": int(target.xs.size),
    }
    return bound, report
