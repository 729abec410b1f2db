"""Parametric 1-D distributions (Gaussian, Cauchy, mixtures, Cauchy-Gaussian
combined halves) with exact pdf/cdf/quantile and seeded sampling, plus small
CDF combinators (scale, mirror, pointwise min/max) used to assemble bounds.

All locations and scales are in meters. CDFs target 1e-14 absolute accuracy,
so Gaussian evaluation goes through scipy's ndtr/ndtri rather than hand-rolled
erf series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr, ndtri

from .errors import InputDataError

# lambda/sigma ratio at which a median-aligned Cauchy exactly overbounds a Gaussian
MIN_CAUCHY_OVER_GAUSS_RATIO = math.sqrt(2.0 / math.pi)
# Gaussian-to-Cauchy scale ratio making a combined half continuous and C1 at the junction
CGCM_SCALE_RATIO = math.sqrt(math.pi / 2.0)

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def as_rng(seed: int | np.random.Generator) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _vectorized(fn, x):
    arr = np.asarray(x, dtype=float)
    out = fn(arr)
    if arr.ndim == 0:
        return float(out)
    return out


def _check_prob(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if np.any((arr <= 0.0) | (arr >= 1.0)):
        raise InputDataError("probability must lie strictly inside (0, 1)")
    return arr


@dataclass(frozen=True)
class Gaussian:
    mu: float
    sigma: float

    def __post_init__(self):
        if not (self.sigma > 0.0 and math.isfinite(self.sigma) and math.isfinite(self.mu)):
            raise InputDataError(f"invalid Gaussian parameters mu={self.mu}, sigma={self.sigma}")

    def pdf(self, x):
        return _vectorized(
            lambda a: np.exp(-0.5 * ((a - self.mu) / self.sigma) ** 2) / (self.sigma * _SQRT_2PI), x
        )

    def cdf(self, x):
        return _vectorized(lambda a: ndtr((a - self.mu) / self.sigma), x)

    def quantile(self, p):
        arr = _check_prob(p)
        out = self.mu + self.sigma * ndtri(arr)
        return float(out) if arr.ndim == 0 else out

    def sample(self, n: int, seed: int | np.random.Generator = 0) -> np.ndarray:
        return as_rng(seed).normal(self.mu, self.sigma, int(n))

    def mean(self) -> float:
        return self.mu

    def std(self) -> float:
        return self.sigma

    def median(self) -> float:
        return self.mu


@dataclass(frozen=True)
class Cauchy:
    m: float
    lam: float

    def __post_init__(self):
        if not (self.lam > 0.0 and math.isfinite(self.lam) and math.isfinite(self.m)):
            raise InputDataError(f"invalid Cauchy parameters m={self.m}, lambda={self.lam}")

    def pdf(self, x):
        return _vectorized(
            lambda a: 1.0 / (self.lam * math.pi * (1.0 + ((a - self.m) / self.lam) ** 2)), x
        )

    def cdf(self, x):
        return _vectorized(lambda a: 0.5 + np.arctan((a - self.m) / self.lam) / math.pi, x)

    def quantile(self, p):
        arr = _check_prob(p)
        out = self.m + self.lam * np.tan(math.pi * (arr - 0.5))
        return float(out) if arr.ndim == 0 else out

    def sample(self, n: int, seed: int | np.random.Generator = 0) -> np.ndarray:
        # inverse-CDF of a uniform draw: exact, no rejection loop
        u = as_rng(seed).uniform(0.0, 1.0, int(n))
        return self.m + self.lam * np.tan(math.pi * (u - 0.5))

    def mean(self) -> float:
        raise InputDataError("Cauchy mean is undefined; use median()")

    def median(self) -> float:
        return self.m


@dataclass(frozen=True)
class GaussianMixture:
    components: tuple[tuple[float, Gaussian], ...]

    def __post_init__(self):
        if not self.components:
            raise InputDataError("mixture needs at least one component")
        w = np.array([c[0] for c in self.components], dtype=float)
        if np.any((w <= 0.0) | (w > 1.0)):
            raise InputDataError("mixture weights must lie in (0, 1]")
        if abs(w.sum() - 1.0) > 1e-12:
            raise InputDataError(f"mixture weights sum to {w.sum()!r}, expected 1 within 1e-12")
        object.__setattr__(self, "components", tuple((float(wi), g) for wi, g in self.components))

    @classmethod
    def of(cls, *parts: tuple[float, float, float]) -> "GaussianMixture":
        """Build from (weight, mu, sigma) triples."""
        return cls(tuple((w, Gaussian(mu, s)) for w, mu, s in parts))

    def _weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.components])

    def pdf(self, x):
        return _vectorized(lambda a: sum(w * g.pdf(a) for w, g in self.components), x)

    def cdf(self, x):
        return _vectorized(lambda a: sum(w * g.cdf(a) for w, g in self.components), x)

    def quantile(self, p):
        arr = _check_prob(p)

        def solve_one(pi: float) -> float:
            # bracket from component quantiles, then refine to 1e-12 in probability
            qs = [g.quantile(pi) for _, g in self.components]
            a, b = min(qs), max(qs)
            if a == b:
                return a
            r = brentq(lambda t: self.cdf(t) - pi, a, b, xtol=1e-14, rtol=8.9e-16, maxiter=200)
            return float(r)

        if arr.ndim == 0:
            return solve_one(float(arr))
        return np.array([solve_one(float(pi)) for pi in arr.ravel()]).reshape(arr.shape)

    def sample(self, n: int, seed: int | np.random.Generator = 0) -> np.ndarray:
        rng = as_rng(seed)
        n = int(n)
        idx = rng.choice(len(self.components), size=n, p=self._weights())
        mus = np.array([g.mu for _, g in self.components])[idx]
        sigmas = np.array([g.sigma for _, g in self.components])[idx]
        return rng.normal(mus, sigmas)

    def mean(self) -> float:
        return float(sum(w * g.mu for w, g in self.components))

    def variance(self) -> float:
        m = self.mean()
        return float(sum(w * (g.sigma**2 + (g.mu - m) ** 2) for w, g in self.components))

    def std(self) -> float:
        return math.sqrt(self.variance())

    def median(self) -> float:
        return self.quantile(0.5)


@dataclass(frozen=True)
class CgcmHalf:
    """One half of the paired Cauchy-Gaussian combined model.

    A 'right' half is Gaussian below its location and Cauchy above it (heavy
    right tail); a 'left' half is the mirror image. The Gaussian piece uses
    scale k*lam with k = sqrt(pi/2), which makes the cdf continuous and the
    pdf continuous (hence the cdf differentiable) at the junction.
    """

    side: str
    loc: float
    lam: float
    k: float = CGCM_SCALE_RATIO

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise InputDataError(f"side must be 'left' or 'right', got {self.side!r}")
        if not (self.lam > 0.0 and math.isfinite(self.lam) and math.isfinite(self.loc)):
            raise InputDataError(f"invalid CGCM parameters loc={self.loc}, lambda={self.lam}")
        if abs(self.k - CGCM_SCALE_RATIO) > 1e-12:
            raise InputDataError("CGCM scale ratio k is fixed at sqrt(pi/2)")

    def _pieces(self) -> tuple[Gaussian, Cauchy]:
        return Gaussian(self.loc, self.k * self.lam), Cauchy(self.loc, self.lam)

    def _lower_piece(self):
        g, c = self._pieces()
        return c if self.side == "left" else g

    def _upper_piece(self):
        g, c = self._pieces()
        return g if self.side == "left" else c

    def cdf(self, x):
        lo, up = self._lower_piece(), self._upper_piece()

        def f(a):
            return np.where(a <= self.loc, lo.cdf(a), up.cdf(a))

        return _vectorized(f, x)

    def pdf(self, x):
        lo, up = self._lower_piece(), self._upper_piece()

        def f(a):
            return np.where(a <= self.loc, lo.pdf(a), up.pdf(a))

        return _vectorized(f, x)

    def quantile(self, p):
        arr = _check_prob(p)
        lo, up = self._lower_piece(), self._upper_piece()

        def f(pi):
            return np.where(pi <= 0.5, lo.quantile(np.clip(pi, 1e-300, 0.5)),
                            up.quantile(np.clip(pi, 0.5, 1.0 - 1e-16)))

        out = f(arr)
        return float(out) if arr.ndim == 0 else out

    def sample(self, n: int, seed: int | np.random.Generator = 0) -> np.ndarray:
        u = as_rng(seed).uniform(0.0, 1.0, int(n))
        return self.quantile(u)

    def median(self) -> float:
        return self.loc


def paired_cgcm(m: float, lam: float) -> tuple[CgcmHalf, CgcmHalf]:
    """Left/right combined-model pair centred at -m and +m."""
    return CgcmHalf("left", -m, lam), CgcmHalf("right", m, lam)


# ---------------------------------------------------------------------------
# CDF combinators

@dataclass(frozen=True)
class ScaledCdf:
    """Distribution of scale*X for scale > 0: cdf(x) = base.cdf(x/scale)."""

    base: object
    scale: float

    def __post_init__(self):
        if not (self.scale > 0.0 and math.isfinite(self.scale)):
            raise InputDataError(f"scale must be positive, got {self.scale}")

    def cdf(self, x):
        return self.base.cdf(np.asarray(x, float) / self.scale)

    def pdf(self, x):
        return self.base.pdf(np.asarray(x, float) / self.scale) / self.scale

    def quantile(self, p):
        return self.scale * self.base.quantile(p)


@dataclass(frozen=True)
class MirroredCdf:
    """Distribution of -X: cdf(x) = 1 - base.cdf(-x) (exact reflection)."""

    base: object

    def cdf(self, x):
        return 1.0 - self.base.cdf(-np.asarray(x, float))

    def pdf(self, x):
        return self.base.pdf(-np.asarray(x, float))

    def quantile(self, p):
        arr = _check_prob(p)
        out = -np.asarray(self.base.quantile(1.0 - arr))
        return float(out) if arr.ndim == 0 else out


class _Combined:
    def __init__(self, *parts):
        if len(parts) < 2:
            raise InputDataError("need at least two CDFs to combine")
        self.parts = parts

    def _stack(self, x, attr):
        arr = np.atleast_1d(np.asarray(x, float))
        return np.stack([np.atleast_1d(getattr(p, attr)(arr)) for p in self.parts]), arr


class MinCdf(_Combined):
    """Pointwise infimum of CDFs; pdf follows the active branch."""

    def cdf(self, x):
        vals, arr = self._stack(x, "cdf")
        out = vals.min(axis=0)
        return float(out[0]) if np.asarray(x).ndim == 0 else out

    def pdf(self, x):
        cdfs, arr = self._stack(x, "cdf")
        pdfs, _ = self._stack(x, "pdf")
        idx = cdfs.argmin(axis=0)
        out = np.take_along_axis(pdfs, idx[None, :], axis=0)[0]
        return float(out[0]) if np.asarray(x).ndim == 0 else out

    def quantile(self, p):
        # min of CDFs rises last: its generalized inverse is the max of inverses
        arr = _check_prob(p)
        qs = np.stack([np.atleast_1d(np.asarray(pt.quantile(arr))) for pt in self.parts])
        out = qs.max(axis=0)
        return float(out[0]) if arr.ndim == 0 else out


class MaxCdf(_Combined):
    """Pointwise supremum of CDFs; pdf follows the active branch."""

    def cdf(self, x):
        vals, arr = self._stack(x, "cdf")
        out = vals.max(axis=0)
        return float(out[0]) if np.asarray(x).ndim == 0 else out

    def pdf(self, x):
        cdfs, arr = self._stack(x, "cdf")
        pdfs, _ = self._stack(x, "pdf")
        idx = cdfs.argmax(axis=0)
        out = np.take_along_axis(pdfs, idx[None, :], axis=0)[0]
        return float(out[0]) if np.asarray(x).ndim == 0 else out

    def quantile(self, p):
        arr = _check_prob(p)
        qs = np.stack([np.atleast_1d(np.asarray(pt.quantile(arr))) for pt in self.parts])
        out = qs.min(axis=0)
        return float(out[0]) if arr.ndim == 0 else out


# ---------------------------------------------------------------------------
# Serialization (key-value config with a `type` discriminator, units meters)

def to_config(dist) -> dict:
    if isinstance(dist, Gaussian):
        return {"type": "gaussian", "mu": dist.mu, "sigma": dist.sigma}
    if isinstance(dist, Cauchy):
        return {"type": "cauchy", "m": dist.m, "lambda": dist.lam}
    if isinstance(dist, GaussianMixture):
        return {
            "type": "mixture",
            "components": [
                {"weight": w, "mu": g.mu, "sigma": g.sigma} for w, g in dist.components
            ],
        }
    if isinstance(dist, CgcmHalf):
        return {"type": "cgcm_half", "side": dist.side, "m": dist.loc, "lambda": dist.lam}
    raise InputDataError(f"cannot serialize distribution of type {type(dist).__name__}")


def from_config(cfg: dict):
    try:
        kind = cfg["type"]
    except (KeyError, TypeError):
        raise InputDataError("distribution config needs a 'type' key") from None
    if kind == "gaussian":
        return Gaussian(float(cfg["mu"]), float(cfg["sigma"]))
    if kind == "cauchy":
        return Cauchy(float(cfg["m"]), float(cfg["lambda"]))
    if kind == "mixture":
        return GaussianMixture(
            tuple(
                (float(c["weight"]), Gaussian(float(c["mu"]), float(c["sigma"])))
                for c in cfg["components"]
            )
        )
    if kind == "cgcm_half":
        return CgcmHalf(str(cfg["side"]), float(cfg["m"]), float(cfg["lambda"]))
    raise InputDataError(f"unknown distribution type {kind!r}")
