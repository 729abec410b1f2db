"""Reference overbounds: single-CDF Gaussian, paired Gaussian (via
nsu_overbound), two-step Gaussian, and the NavDEN discrete envelope.

The two-step construction uses an explicit stand-in for the ad hoc
symmetric-unimodal intermediate: for a candidate shift b, the maximal
symmetric envelope dominated by the data folds both ECDF half-deviations
about b and keeps the more conservative one; the minimal Gaussian scale
against that envelope follows in closed form. The shift is scanned
coarse-to-fine to minimize the resulting scale.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields

import numpy as np
from scipy.special import ndtr, ndtri

from .distributions import Gaussian, MirroredCdf
from .empirical import FitTarget
from .errors import InfeasibleFitError, InputDataError
from .nsu_overbound import PairedOverbound

# ---------------------------------------------------------------------------
# two-step Gaussian overbound


@dataclass(frozen=True)
class TwoStepParams:
    b_f: float
    sigma_f: float
    # the intermediate symmetric envelopes: per-side shift and minimal scale
    b_su_left: float
    b_su_right: float
    sigma_left: float
    sigma_right: float
    intermediate: str = "max-symmetric folded-corner envelope"

    def record(self) -> dict:
        return {
            "type": "two_step",
            "b_f": self.b_f,
            "sigma_f": self.sigma_f,
            "b_su_left": self.b_su_left,
            "b_su_right": self.b_su_right,
            "sigma_left": self.sigma_left,
            "sigma_right": self.sigma_right,
            "intermediate": self.intermediate,
        }


def _step_value_below(xs: np.ndarray, lo: np.ndarray, hi: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Left limit of the target's step CDF at y (fraction strictly below y)."""
    j = np.searchsorted(xs, y, side="left")
    out = np.empty(y.shape, dtype=float)
    over = j >= xs.size
    out[over] = hi[-1]
    rest = ~over
    jr = j[rest]
    at_point = xs[jr] == y[rest]
    out[rest] = np.where(at_point, lo[jr], np.where(jr > 0, hi[np.maximum(jr - 1, 0)], 0.0))
    return out


def _step_value_at(xs: np.ndarray, hi: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Right value of the target's step CDF at y (fraction at or below y)."""
    j = np.searchsorted(xs, y, side="right")
    return np.where(j > 0, hi[np.maximum(j - 1, 0)], 0.0)


def _fold_wings(
    target: FitTarget, b: float, eps: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Fold times about b with the envelope cap U (right wing) and floor L
    (left wing): a symmetric CDF E centred at b that is dominated by the
    target on both wings must satisfy L(t) <= E(t) <= U(t) for t > 0, where
    U(t) = F((b+t)-) - eps and L(t) = 1 - F((b-t)-) + eps. eps is the
    sampling-confidence margin applied to empirical targets."""
    xs = target.xs
    ts = np.unique(np.abs(xs - b))
    ts = ts[ts > 0.0]
    if target.dist is not None:
        f = target.dist
        u = np.asarray(f.cdf(b + ts), dtype=float)
        low = 1.0 - np.asarray(f.cdf(b - ts), dtype=float)
    else:
        u = _step_value_below(xs, target.lo, target.hi, b + ts) - eps
        low = 1.0 - _step_value_below(xs, target.lo, target.hi, b - ts) + eps
    return ts, u, low


def _shift_feasible(target: FitTarget, b: float, eps: float) -> bool:
    """A symmetric dominated envelope centred at b exists iff its floor never
    exceeds its cap and the cap stays above 1/2 (guard band applies near 1/2,
    as for every other empirical constraint). Floor values that reach 1 are
    vacuous: there the data's own lower confidence limit is 0."""
    ts, u, low = _fold_wings(target, b, eps)
    if ts.size == 0:
        return False
    g = target.guard
    if np.any(u < 0.5 - g):
        return False
    real = low < 1.0 - eps  # floors beyond the band's certification are vacuous
    return bool(np.all(low[real] <= np.maximum(u[real], 0.5 + g)))


def _sigma_right(target: FitTarget, b: float, eps: float) -> float:
    """Minimal sigma with Phi(t/sigma) <= U(t) at every fold time; folds whose
    cap sits inside the median guard band are skipped."""
    ts, u, _ = _fold_wings(target, b, eps)
    binding = u > 0.5 + target.guard
    if not np.any(binding):
        return float("inf")
    return float(np.max(ts[binding] / ndtri(u[binding])))


def _mirror_target(target: FitTarget) -> FitTarget:
    return FitTarget(
        xs=-target.xs[::-1],
        lo=(1.0 - target.hi)[::-1],
        hi=(1.0 - target.lo)[::-1],
        bias=-target.bias,
        center=-target.center,
        scale=target.scale,
        kind=target.kind,
        guard=target.guard,
        dist=MirroredCdf(target.dist) if target.dist is not None else None,
        n_samples=target.n_samples,
    )


def _min_feasible_shift(target: FitTarget, eps: float) -> tuple[float, float]:
    """Smallest shift admitting a symmetric dominated envelope, found by
    bisection (moving the centre outward only relaxes both wings, so
    feasibility is monotone in the shift), plus the minimal Gaussian scale
    against that envelope's cap.

    The scale alone is monotone-decreasing in the shift, so minimizing it
    without pinning the shift degenerates to a point mass beyond the data;
    the smallest feasible shift is the tight non-degenerate choice.
    """
    lo_b = target.center
    hi_b = float(target.xs.max()) + target.scale
    if _shift_feasible(target, lo_b, eps):
        b = lo_b
    else:
        if not _shift_feasible(target, hi_b, eps):
            raise InfeasibleFitError("no feasible intermediate shift for the two-step fit")
        for _ in range(200):
            if hi_b - lo_b <= 1e-9 * max(1.0, target.scale):
                break
            mid = 0.5 * (lo_b + hi_b)
            if _shift_feasible(target, mid, eps):
                hi_b = mid
            else:
                lo_b = mid
        b = hi_b
    return b, _sigma_right(target, b, eps)


def fit_two_step(
    target: FitTarget, confidence_alpha: float | None = None
) -> tuple[TwoStepParams, dict]:
    """Two-step Gaussian bound via a symmetric intermediate envelope.

    By default the envelope binds the raw step-CDF corners. Passing
    confidence_alpha keeps a DKW margin eps = sqrt(ln(2/alpha)/(2n)) between
    the envelope and the empirical corners, the way sample-distribution
    bounding tools account for finite-sample uncertainty; this loosens the
    fit considerably.
    """
    if target.kind == "empirical" and target.xs.size < 10:
        raise InputDataError("two-step fit refuses degenerate targets (fewer than 10 samples)")
    if confidence_alpha is not None and target.kind == "empirical" and target.n_samples > 0:
        eps = math.sqrt(math.log(2.0 / confidence_alpha) / (2.0 * target.n_samples))
    else:
        eps = 0.0
    b_r, s_r = _min_feasible_shift(target, eps)
    mt = _mirror_target(target)
    b_l_m, s_l = _min_feasible_shift(mt, eps)  # left side fitted as the mirrored right side
    b_l = -b_l_m
    b_f = max(abs(b_l), abs(b_r))
    sigma_f = max(s_l, s_r)
    params = TwoStepParams(
        b_f=b_f, sigma_f=sigma_f,
        b_su_left=b_l, b_su_right=b_r,
        sigma_left=s_l, sigma_right=s_r,
    )
    report = {
        "b_f": b_f, "sigma_f": sigma_f,
        "b_su_left": b_l, "b_su_right": b_r,
        "sigma_left": s_l, "sigma_right": s_r,
        "target_kind": target.kind,
    }
    return params, report


def two_step_as_paired(params: TwoStepParams) -> PairedOverbound:
    return PairedOverbound(
        family="two_step",
        left=Gaussian(-params.b_f, params.sigma_f),
        right=Gaussian(params.b_f, params.sigma_f),
        params=params.record(),
    )


# ---------------------------------------------------------------------------
# NavDEN discrete envelope (Appendix-style three-region model)


@dataclass(frozen=True)
class NavdenParams:
    delta: float  # fundamental grid spacing, meters
    x_tilde_max: float
    x_tilde_min: float
    b_tilde: float
    c_tilde: float
    k_tr: int
    k_max: int
    k_min: int
    k_bias: int

    def __post_init__(self):
        if not (self.k_min < -self.k_tr < 0 < self.k_tr < self.k_max):
            raise InputDataError(
                "need k_min < -k_tr < 0 < k_tr < k_max, got "
                f"k_min={self.k_min}, k_tr={self.k_tr}, k_max={self.k_max}"
            )
        if self.delta <= 0:
            raise InputDataError("delta must be positive")

    @property
    def psi1(self) -> float:
        return (self.x_tilde_min + self.k_tr) / (self.k_min + self.k_tr)

    @property
    def psi2(self) -> float:
        return (self.x_tilde_max - self.k_tr) / (self.k_max - self.k_tr)

    def record(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def load_navden_params(path) -> NavdenParams:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise InputDataError(f"cannot open {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputDataError(f"{path}: invalid JSON: {exc}") from None
    required = [f.name for f in fields(NavdenParams)]
    missing = [k for k in required if k not in raw]
    if missing:
        raise InputDataError(f"{path}: missing NavDEN fields {missing}; required: {required}")
    kwargs = {k: raw[k] for k in required}
    for k in ("k_tr", "k_max", "k_min", "k_bias"):
        kwargs[k] = int(kwargs[k])
    for k in ("delta", "x_tilde_max", "x_tilde_min", "b_tilde", "c_tilde"):
        kwargs[k] = float(kwargs[k])
    return NavdenParams(**kwargs)


def _check_k(params: NavdenParams, k: int) -> None:
    if not (params.k_min <= k <= params.k_max):
        raise InputDataError(f"index k={k} outside [{params.k_min}, {params.k_max}]")


def navden_left_bound_normalized(params: NavdenParams, k: int) -> float:
    """Normalized left bound l~_k (three-piece formula with floor).

    At k = k_min the tail formula's logarithm diverges, so the first envelope
    point sits at -inf: its probability is the envelope's mass from below.
    """
    _check_k(params, k)
    if k < -params.k_tr:  # left tail
        arg = 1.0 - (k + params.k_tr) / (params.k_min + params.k_tr)
        if arg <= 0.0:
            return float("-inf")
        return math.floor(params.c_tilde * math.log(arg) - params.k_tr - params.k_bias)
    if k <= params.k_tr:  # core
        return float(k - params.k_bias)
    # right tail
    val = (
        params.x_tilde_max
        - params.k_bias
        - (params.x_tilde_max - params.k_tr) * math.exp(2.0 * (params.k_tr - k) / params.b_tilde)
    )
    return math.floor(val)


def navden_left_bound(params: NavdenParams, k: int) -> float:
    """Left bound in meters: delta * l~_k."""
    return params.delta * navden_left_bound_normalized(params, k)


def navden_quantile(params: NavdenParams, k: int) -> float:
    """Gaussian-quantile form G~_{l,k} of the cumulative probability at index k."""
    _check_k(params, k)
    if k < -params.k_tr:
        return -params.k_tr + params.psi1 * (k + params.k_tr)
    if k <= params.k_tr:
        return float(k)
    return params.k_tr + params.psi2 * (k - params.k_tr)


def navden_table(params: NavdenParams) -> list[dict]:
    rows = []
    for k in range(params.k_min, params.k_max + 1):
        lt = navden_left_bound_normalized(params, k)
        rows.append(
            {
                "k": k,
                "l_tilde": lt,
                "l_m": params.delta * lt,
                "g_tilde": navden_quantile(params, k),
            }
        )
    return rows


@dataclass(frozen=True)
class NavdenLeftCdf:
    """Step CDF of the left (dominating) envelope.

    Below the first finite point the value stays at the k_min probability
    (that mass sits at -inf per the divergent tail formula); at and beyond the
    last point the envelope saturates at 1 (a dominating bound must reach 1).
    """

    points: np.ndarray  # finite, strictly increasing abscissae (meters)
    probs: np.ndarray  # cumulative probability at each point
    base: float  # probability below the first finite point

    def cdf(self, x):
        arr = np.asarray(x, dtype=float)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        idx = np.searchsorted(self.points, arr, side="right")
        ext = np.concatenate(([self.base], self.probs))
        out = ext[idx]
        out = np.where(arr >= self.points[-1], 1.0, out)
        return float(out[0]) if scalar else out

    def quantile(self, p):
        arr = np.asarray(p, dtype=float)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        out = np.empty_like(arr)
        for i, pi in enumerate(arr):
            if pi <= self.base:
                out[i] = float("-inf")
            else:
                j = int(np.searchsorted(self.probs, pi, side="left"))
                out[i] = self.points[min(j, self.points.size - 1)]
        return float(out[0]) if scalar else out


def navden_left_cdf(params: NavdenParams, q_scale: float) -> NavdenLeftCdf:
    if q_scale <= 0:
        raise InputDataError("q_scale must be positive")
    ks = np.arange(params.k_min, params.k_max + 1)
    pts = np.array([navden_left_bound(params, int(k)) for k in ks])
    gq = np.array([navden_quantile(params, int(k)) for k in ks])
    if np.any(np.diff(gq) < 0) or np.any(np.diff(pts) < 0):
        raise InputDataError("non-monotone NavDEN envelope; check parameters")
    probs = ndtr(q_scale * gq)
    finite = np.isfinite(pts)
    base = float(probs[~finite].max(initial=0.0))
    pts, probs = pts[finite], probs[finite]
    # duplicated abscissae keep the largest probability
    uniq, idx = np.unique(pts, return_index=True)
    keep_probs = np.maximum.reduceat(probs, idx)
    return NavdenLeftCdf(points=uniq, probs=keep_probs, base=base)


def navden_as_paired(params: NavdenParams, q_scale: float) -> PairedOverbound:
    left = navden_left_cdf(params, q_scale)
    return PairedOverbound(
        family="navden",
        left=left,
        right=MirroredCdf(left),  # reflection of the left bounds around the origin
        params={"params": params.record(), "q_scale": q_scale},
    )


def _navden_feasible(params: NavdenParams, q_scale: float, target: FitTarget) -> bool:
    bound = navden_as_paired(params, q_scale)
    fl = np.asarray(bound.left.cdf(target.xs))
    fr = np.asarray(bound.right.cdf(target.xs))
    return bool(
        np.all(fl >= target.paired_left_req()) and np.all(fr <= target.paired_right_cap())
    )


def fit_navden_scale(params: NavdenParams, target: FitTarget) -> float:
    """Largest probability scale making the envelope a valid paired overbound.

    Every constraint has the form Phi(q * g) >= r with a scale-independent
    covering quantile g, so each one is a half-line in q and the feasible set
    is the exact interval [q_min, q_max]; the top end is returned. (The
    feasible set is an interval, not a half-line: small scales break the
    upper core, large ones break the outer tails.)
    """
    ks = np.arange(params.k_min, params.k_max + 1)
    pts = np.array([navden_left_bound(params, int(k)) for k in ks])
    gq = np.array([navden_quantile(params, int(k)) for k in ks])
    finite = np.isfinite(pts)
    g_base = float(gq[~finite].max(initial=-np.inf))
    fpts, fg = pts[finite], gq[finite]
    uniq, idx = np.unique(fpts, return_index=True)
    g_at = np.maximum.reduceat(fg, idx)  # duplicated abscissae keep the top quantile

    def covering_g(y: np.ndarray) -> np.ndarray:
        j = np.searchsorted(uniq, y, side="right")
        ext = np.concatenate(([g_base], g_at))
        return ext[j]

    # all constraints as left.cdf(y) >= r: the left bound's own requirements
    # plus the mirrored right-bound caps
    ys = np.concatenate([target.xs, -target.xs])
    rs = np.concatenate([target.paired_left_req(), 1.0 - target.paired_right_cap()])
    keep = ys < uniq[-1]  # at/above the last point the envelope saturates at 1
    ys, rs = ys[keep], rs[keep]
    g = covering_g(ys)
    z = ndtri(np.clip(rs, 1e-300, 1.0 - 1e-16))

    if np.any((g <= 0.0) & (z > 0.0) & (rs > 0.5)):
        raise InfeasibleFitError(
            "no probability scale makes the NavDEN envelope bound this target"
        )
    lower = (g > 0.0) & (z > 0.0)
    upper = (g < 0.0) & (z < 0.0)
    q_min = float(np.max(z[lower] / g[lower], initial=0.0))
    q_max = float(np.min(z[upper] / g[upper], initial=np.inf))
    if not (q_min <= q_max) or not np.isfinite(q_max):
        raise InfeasibleFitError(
            "no probability scale makes the NavDEN envelope bound this target"
            f" (need scale >= {q_min:.4g} and <= {q_max:.4g})"
        )
    q = q_max
    for _ in range(8):
        if _navden_feasible(params, q, target):
            return q
        q *= 1.0 - 1e-12
    raise InfeasibleFitError("NavDEN scale verification failed at the computed boundary")
