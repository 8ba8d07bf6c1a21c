"""Statistical harness: streaming moments, KS tests, correlation, regression.

Conformance tests for limit laws default to level ``alpha = 1e-3``: at finite n
the limit theorems carry bias, so tests should catch implementation errors,
not finite-size effects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_ALPHA = 1e-3

# |corr| threshold used as the assertable surrogate for "asymptotically
# independent coordinates" in joint limit statements.
CORR_SURROGATE = 0.05


@dataclass
class Welford:
    """Single-pass mean/variance accumulator, mergeable."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def update(self, value: float) -> "Welford":
        self.count += 1
        delta = value - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (value - self.mean)
        return self

    def update_many(self, values) -> "Welford":
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            return self
        other = Welford(
            count=int(values.size),
            mean=float(values.mean()),
            m2=float(((values - values.mean()) ** 2).sum()),
        )
        return self.merge(other)

    def merge(self, other: "Welford") -> "Welford":
        """Combine with another accumulator; equals accumulating the concatenation."""
        if other.count == 0:
            return self
        if self.count == 0:
            self.count, self.mean, self.m2 = other.count, other.mean, other.m2
            return self
        n = self.count + other.count
        delta = other.mean - self.mean
        self.mean += delta * other.count / n
        self.m2 += other.m2 + delta * delta * self.count * other.count / n
        self.count = n
        return self

    @property
    def variance(self) -> float:
        if self.count < 2:
            return 0.0
        return self.m2 / (self.count - 1)

    @property
    def std(self) -> float:
        return math.sqrt(max(self.variance, 0.0))

    @property
    def stderr(self) -> float:
        """Standard error of the mean."""
        if self.count == 0:
            return float("inf")
        return self.std / math.sqrt(self.count)


@dataclass
class VectorWelford:
    """Streaming mean vector and cross-product matrix for covariance estimates."""

    dim: int
    count: int = 0
    mean: np.ndarray = field(default=None)  # type: ignore[assignment]
    m2: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.mean is None:
            self.mean = np.zeros(self.dim)
        if self.m2 is None:
            self.m2 = np.zeros((self.dim, self.dim))

    def update_many(self, rows: np.ndarray) -> "VectorWelford":
        rows = np.asarray(rows, dtype=float)
        if rows.ndim == 1:
            rows = rows[None, :]
        m = rows.shape[0]
        if m == 0:
            return self
        mu = rows.mean(axis=0)
        centered = rows - mu
        other = VectorWelford(self.dim, m, mu, centered.T @ centered)
        return self.merge(other)

    def merge(self, other: "VectorWelford") -> "VectorWelford":
        if other.count == 0:
            return self
        if self.count == 0:
            self.count, self.mean, self.m2 = other.count, other.mean.copy(), other.m2.copy()
            return self
        n = self.count + other.count
        delta = other.mean - self.mean
        self.m2 += other.m2 + np.outer(delta, delta) * self.count * other.count / n
        self.mean += delta * other.count / n
        self.count = n
        return self

    @property
    def covariance(self) -> np.ndarray:
        if self.count < 2:
            return np.zeros((self.dim, self.dim))
        return self.m2 / (self.count - 1)

    def cov_stderr(self) -> np.ndarray:
        """Asymptotic standard error of each covariance entry (normal-theory
        approximation ``sqrt((C_ii C_jj + C_ij^2) / count)``)."""
        c = self.covariance
        d = np.diag(c)
        return np.sqrt((np.outer(d, d) + c * c) / max(self.count, 1))


@dataclass
class TestReport:
    """Outcome of a distribution conformance test."""

    name: str
    statistic: float
    critical: float
    alpha: float
    n1: int
    n2: int = 0
    passed: bool = False

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        verdict = "pass" if self.passed else "FAIL"
        return (
            f"{self.name}: stat={self.statistic:.5g} crit={self.critical:.5g} "
            f"(alpha={self.alpha:g}, n={self.n1}{'/' + str(self.n2) if self.n2 else ''}) {verdict}"
        )


def ks_critical(alpha: float, n1: int, n2: int = 0) -> float:
    """Asymptotic two-sided KS critical value.

    ``c(alpha) = sqrt(-ln(alpha/2)/2)``, scaled by ``1/sqrt(n)`` for one sample
    and by ``sqrt((m+n)/(mn))`` for two samples.  c(0.001) = 1.9495.
    """
    c = math.sqrt(-math.log(alpha / 2.0) / 2.0)
    if n2 <= 0:
        return c / math.sqrt(n1)
    return c * math.sqrt((n1 + n2) / (n1 * n2))


def ks_one_sample(samples, cdf, alpha: float = DEFAULT_ALPHA, name: str = "ks1") -> TestReport:
    """Sup-distance of the empirical CDF against a callable reference CDF."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise ValueError("empty sample")
    f = np.asarray(cdf(x), dtype=float)
    hi = np.arange(1, n + 1) / n
    lo = np.arange(0, n) / n
    stat = float(np.max(np.maximum(hi - f, f - lo)))
    crit = ks_critical(alpha, n)
    return TestReport(name, stat, crit, alpha, n, 0, stat <= crit)


def ks_two_sample(a, b, alpha: float = DEFAULT_ALPHA, name: str = "ks2") -> TestReport:
    """Two-sample KS sup-distance with asymptotic critical value."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("empty sample")
    everything = np.concatenate([a, b])
    ca = np.searchsorted(a, everything, side="right") / a.size
    cb = np.searchsorted(b, everything, side="right") / b.size
    stat = float(np.max(np.abs(ca - cb)))
    crit = ks_critical(alpha, a.size, b.size)
    return TestReport(name, stat, crit, alpha, a.size, b.size, stat <= crit)


def pearson_corr(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a = a - a.mean()
    b = b - b.mean()
    denom = math.sqrt(float((a * a).sum()) * float((b * b).sum()))
    if denom == 0.0:
        return 0.0
    return float((a * b).sum() / denom)


@dataclass
class SlopeFit:
    slope: float
    intercept: float
    stderr: float


def scaling_regression(ns, stats) -> SlopeFit:
    """Least-squares slope of log(stat) against log(n).

    Needs at least 3 distinct n spanning two decades; used to identify
    polynomial growth exponents of variances and covariances.
    """
    ns = np.asarray(ns, dtype=float)
    stats = np.asarray(stats, dtype=float)
    if ns.size < 3 or np.unique(ns).size < 3:
        raise ValueError("need >= 3 distinct n values")
    if ns.max() / ns.min() < 100.0:
        raise ValueError("n values should span at least two decades")
    if np.any(stats <= 0):
        raise ValueError("statistics must be positive for log-log regression")
    x = np.log(ns)
    y = np.log(stats)
    xm = x - x.mean()
    sxx = float((xm * xm).sum())
    slope = float((xm * y).sum() / sxx)
    intercept = float(y.mean() - slope * x.mean())
    resid = y - intercept - slope * x
    dof = max(ns.size - 2, 1)
    stderr = math.sqrt(float((resid * resid).sum()) / dof / sxx)
    return SlopeFit(slope, intercept, stderr)
