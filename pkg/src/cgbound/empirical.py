"""Empirical CDFs, sample ingestion, and the constraint-point view used by
every bound-fitting routine.

A fit can target either a step ECDF built from samples or an analytic
distribution evaluated on a quantile-spaced grid; `FitTarget` normalizes both
to (points, lower corner, upper corner) triples. For empirical targets,
corners whose value is within GUARD_BAND_FACTOR/sqrt(n) of 1/2 are excluded
from constraint sets: at that distance the ECDF cannot be distinguished from
its own median crossing, and binding on those corners fits quantization noise
rather than the distribution (it also makes symmetric single-CDF fits
arbitrarily conservative).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputDataError

# half-width multiplier (in 1/sqrt(n) units) of the median-indistinguishability band;
# 3/sqrt(n) sits just outside the 99.9% DKW band 1.949/sqrt(n)
GUARD_BAND_FACTOR = 3.0


@dataclass(frozen=True)
class EmpiricalCdf:
    """Sorted samples with step-CDF evaluation and summary moments."""

    samples: np.ndarray  # sorted, ascending
    n: int
    bias: float  # sample mean
    sample_variance: float  # unbiased (n-1) estimator
    kurtosis: float  # fourth standardized moment, not excess-adjusted
    excess_kurtosis: float

    def cdf(self, x):
        arr = np.asarray(x, dtype=float)
        out = np.searchsorted(self.samples, arr, side="right") / self.n
        return float(out) if arr.ndim == 0 else out

    def bounds_at(self, x):
        """(left limit, right value) of the step CDF at x."""
        arr = np.asarray(x, dtype=float)
        lower = np.searchsorted(self.samples, arr, side="left") / self.n
        upper = np.searchsorted(self.samples, arr, side="right") / self.n
        if arr.ndim == 0:
            return float(lower), float(upper)
        return lower, upper

    def median(self) -> float:
        return float(np.median(self.samples))

    def std(self) -> float:
        return math.sqrt(self.sample_variance)


def build_ecdf(samples) -> EmpiricalCdf:
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 1:
        arr = arr.ravel()
    if arr.size < 2:
        raise InputDataError(f"need at least 2 samples, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise InputDataError("samples contain non-finite values")
    xs = np.sort(arr)
    n = xs.size
    mean = float(xs.mean())
    centered = xs - mean
    m2 = float(np.mean(centered**2))
    m4 = float(np.mean(centered**4))
    kurt = m4 / m2**2 if m2 > 0 else float("nan")
    return EmpiricalCdf(
        samples=xs,
        n=n,
        bias=mean,
        sample_variance=float(arr.var(ddof=1)),
        kurtosis=kurt,
        excess_kurtosis=kurt - 3.0,
    )


def load_samples(path, column: str = "error_m") -> np.ndarray:
    """Read one numeric column from a headed CSV file; meters, decimal point."""
    try:
        fh = open(path, "r", newline="")
    except OSError as exc:
        raise InputDataError(f"cannot open {path}: {exc}") from None
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise InputDataError(f"{path}: empty file")
        if column not in reader.fieldnames:
            raise InputDataError(
                f"{path}: column {column!r} not found (have {reader.fieldnames})"
            )
        values = []
        for i, row in enumerate(reader, start=1):
            raw = row.get(column)
            try:
                v = float(raw)
            except (TypeError, ValueError):
                raise InputDataError(f"{path}: row {i}: cannot parse {raw!r}") from None
            if not math.isfinite(v):
                raise InputDataError(f"{path}: row {i}: non-finite value {raw!r}")
            values.append(v)
    if not values:
        raise InputDataError(f"{path}: no data rows")
    return np.array(values, dtype=float)


@dataclass(frozen=True)
class FitTarget:
    """Constraint-point view of a fitting target.

    xs are the constraint abscissae; lo/hi the lower/upper CDF corner at each
    point (equal for analytic targets). guard is the half-width of the
    excluded band around probability 1/2 (0 for analytic targets).
    """

    xs: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    bias: float
    center: float  # median; symmetric fits align here
    scale: float
    kind: str  # "empirical" | "analytic"
    guard: float
    dist: object | None = None  # source distribution for analytic targets
    n_samples: int = 0  # 0 for analytic targets

    @classmethod
    def from_ecdf(cls, ecdf: EmpiricalCdf) -> "FitTarget":
        xs = np.unique(ecdf.samples)
        lo, hi = ecdf.bounds_at(xs)
        return cls(
            xs=xs,
            lo=lo,
            hi=hi,
            bias=ecdf.bias,
            center=ecdf.median(),
            scale=ecdf.std(),
            kind="empirical",
            guard=GUARD_BAND_FACTOR / math.sqrt(ecdf.n),
            n_samples=ecdf.n,
        )

    @classmethod
    def from_distribution(
        cls, dist, n_points: int = 10_000, tail_level: float = 1e-5
    ) -> "FitTarget":
        """Quantile-spaced constraint grid over levels [tail_level, 1-tail_level].

        The default span matches the resolution of a 1e5-sample fit, which is
        what the reference parameter tables were produced from.
        """
        if not (0.0 < tail_level < 0.5):
            raise InputDataError("tail_level must be in (0, 0.5)")
        levels = np.linspace(tail_level, 1.0 - tail_level, int(n_points))
        xs = np.asarray(dist.quantile(levels), dtype=float)
        f = np.asarray(dist.cdf(xs), dtype=float)
        try:
            bias = float(dist.mean())
        except (InputDataError, AttributeError):
            bias = float(dist.median())
        try:
            scale = float(dist.std())
        except (InputDataError, AttributeError):
            # Gaussian-equivalent IQR proxy for scale-free families
            scale = float(dist.quantile(0.75) - dist.quantile(0.25)) / 1.349
        return cls(
            xs=xs,
            lo=f,
            hi=f,
            bias=bias,
            center=float(dist.median()),
            scale=scale,
            kind="analytic",
            guard=0.0,
            dist=dist,
        )

    def shifted(self, delta: float) -> "FitTarget":
        """Target expressed in coordinates x' = x - delta (drops the analytic handle)."""
        return FitTarget(
            xs=self.xs - delta,
            lo=self.lo,
            hi=self.hi,
            bias=self.bias - delta,
            center=self.center - delta,
            scale=self.scale,
            kind=self.kind,
            guard=self.guard,
            dist=None,
            n_samples=self.n_samples,
        )

    def dominate_mask(self) -> np.ndarray:
        """Points where a single-CDF bound must satisfy F >= hi (value <= 1/2)."""
        return self.hi <= 0.5 - self.guard

    def dominated_mask(self) -> np.ndarray:
        """Points where a single-CDF bound must satisfy F <= lo (value > 1/2)."""
        return self.lo >= 0.5 + self.guard

    def paired_left_req(self) -> np.ndarray:
        """Required lower bound for a dominating (left) CDF at each xs.

        The upper corner everywhere except at the top sample, whose upper
        corner is 1 and cannot be met by a continuous CDF; there the binding
        value is the lower corner.
        """
        req = self.hi.copy()
        if self.kind == "empirical":
            req[-1] = self.lo[-1]
        return req

    def paired_right_cap(self) -> np.ndarray:
        """Allowed upper bound for a dominated (right) CDF at each xs."""
        cap = self.lo.copy()
        if self.kind == "empirical":
            cap[0] = self.hi[0]
        return cap
