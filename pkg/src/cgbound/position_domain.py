"""Discretize range-domain densities, convolve per-measurement contributions
into the vertical position error domain, and extract protection levels under
an integrity budget.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .distributions import ScaledCdf
from .empirical import EmpiricalCdf
from .errors import InputDataError, NumericFailure

TAIL_LEVEL = 1e-12  # grid truncation level; residual mass pushed outward


@dataclass(frozen=True)
class DiscretePdf:
    """Regularly spaced density: mass[k] is the density at origin + k*dt."""

    origin: float
    dt: float
    mass: np.ndarray

    def __post_init__(self):
        if not self.dt > 0:
            raise InputDataError("dt must be positive")
        total = float(self.mass.sum() * self.dt)
        if abs(total - 1.0) > 1e-9:
            raise NumericFailure(f"discrete pdf mass {total!r} deviates from 1 beyond 1e-9")
        if np.any(self.mass < 0):
            raise NumericFailure("discrete pdf has negative mass")

    def grid(self) -> np.ndarray:
        return self.origin + self.dt * np.arange(self.mass.size)

    def cdf_values(self) -> np.ndarray:
        return np.cumsum(self.mass) * self.dt

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t_m", "mass"])
            for t, m in zip(self.grid(), self.mass):
                w.writerow([repr(float(t)), repr(float(m))])


def discretize(source, dt: float) -> DiscretePdf:
    """Cell mass from CDF differences on a grid covering the 1e-12 tails.

    Residual tail mass beyond the grid is added to the outermost cells:
    pushing mass outward can only enlarge a protection level, never shrink it.
    """
    if dt <= 0:
        raise InputDataError("dt must be positive")
    q_lo = float(source.quantile(TAIL_LEVEL))
    q_hi = float(source.quantile(1.0 - TAIL_LEVEL))
    if not (math.isfinite(q_lo) and math.isfinite(q_hi)):
        raise NumericFailure(
            "source has non-finite 1e-12 tail quantiles; its tail mass cannot be "
            "discretized conservatively"
        )
    origin = q_lo - dt
    m = int(math.ceil((q_hi + dt - origin) / dt)) + 1
    edges = origin + (np.arange(m + 1) - 0.5) * dt
    f = np.asarray(source.cdf(edges), dtype=float)
    pm = np.diff(f)
    pm[0] += f[0]
    pm[-1] += 1.0 - f[-1]
    pm = np.maximum(pm, 0.0)
    total = pm.sum()
    if abs(total - 1.0) > 1e-9:
        raise NumericFailure(f"discretization lost probability mass (sum={total!r})")
    pm /= total
    return DiscretePdf(origin=origin, dt=dt, mass=pm / dt)


def convolve_vertical(
    bound,
    s_row3,
    dt: float,
    method: str = "fft",
    min_coefficient: float = 1e-12,
) -> DiscretePdf:
    """Discretized pdf of sum_i s_i * eps_i with every eps_i following `bound`.

    Each term is the bound scaled by |s_i|, re-discretized from its exact CDF
    on the shared dt grid, then combined by discrete convolution (FFT by
    default; `method="naive"` uses the direct dense sum).
    """
    if method not in ("fft", "naive"):
        raise InputDataError(f"unknown convolution method {method!r}")
    coeffs = [abs(float(s)) for s in np.asarray(s_row3, dtype=float).ravel()]
    terms = []
    for i, c in enumerate(coeffs):
        if c < min_coefficient:
            warnings.warn(f"projection coefficient {i} is ~0; term skipped", stacklevel=2)
            continue
        terms.append(discretize(ScaledCdf(bound, c), dt))
    if not terms:
        raise InputDataError("no non-degenerate projection coefficients")
    probs = terms[0].mass * dt
    origin = terms[0].origin
    for t in terms[1:]:
        nxt = t.mass * dt
        if method == "fft":
            probs = fftconvolve(probs, nxt)
        else:
            probs = np.convolve(probs, nxt)
        origin += t.origin
    probs = np.maximum(probs, 0.0)
    total = probs.sum()
    if abs(total - 1.0) > 1e-9:
        raise NumericFailure(f"convolution lost probability mass (sum={total!r})")
    probs /= total
    return DiscretePdf(origin=origin, dt=dt, mass=probs / dt)


def select_worst_case(sources: list[EmpiricalCdf]) -> int:
    """Index of the source with the largest sample variance; ties broken by
    larger kurtosis, then by the lower index."""
    if not sources:
        raise InputDataError("no error sources given")
    order = sorted(
        range(len(sources)),
        key=lambda i: (-sources[i].sample_variance, -sources[i].kurtosis, i),
    )
    return order[0]


def vpl(pdf: DiscretePdf, p_hmi: float) -> float:
    """Smallest grid value whose cumulative mass exceeds 1 - p_hmi/2."""
    if not (0.0 < p_hmi <= 1.0):
        raise InputDataError("p_hmi must lie in (0, 1]")
    threshold = 1.0 - p_hmi / 2.0
    cums = pdf.cdf_values()
    idx = int(np.searchsorted(cums, threshold, side="right"))
    if idx >= cums.size:
        raise NumericFailure(
            "cumulative mass never exceeds 1 - p_hmi/2; widen the discretization grid "
            "(the bound's tail mass beyond the grid exceeds the integrity budget)"
        )
    return float(pdf.origin + idx * pdf.dt)
