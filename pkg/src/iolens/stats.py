"""Correlation, two-sample tests, and boxplot summaries for brand studies.

Everything here is self-contained numerics: Pearson r with a two-sided
p-value from the t transform, a pooled-variance two-sample t-test, the
Student-t survival function evaluated through the regularized incomplete
beta continued fraction, and type-7 (linear interpolation) quartiles with
1.5 IQR whisker fences.

The t-test also ships a ``literal`` mode computing the statistic
(mean difference over sqrt of (1/m) times the product of the two sums of
squared deviations) for fidelity with a non-standard published form; that
mode is a statistic only and yields no p-value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    InsufficientBrands,
    InvalidDof,
    InvariantViolation,
    LengthMismatch,
    TooFewSamples,
    ZeroVariance,
)

TTEST_STANDARD = "standard"
TTEST_LITERAL = "literal_eq8"
TTEST_MODES = (TTEST_STANDARD, TTEST_LITERAL)

METRIC_FIELDS = ("unfolding", "instability", "rotation")

_CF_EPS = 1e-15
_CF_FPMIN = 1e-300
_CF_MAXIT = 300


@dataclass(frozen=True)
class BrandSample:
    """Per-video measurement vectors for one lens brand."""

    brand: str
    unfolding: tuple[float, ...]
    instability: tuple[float, ...]
    rotation: tuple[float, ...]

    def __post_init__(self):
        m = len(self.unfolding)
        if not (len(self.instability) == len(self.rotation) == m):
            raise InvariantViolation("equal lengths across the three vectors")
        if m < 3:
            raise TooFewSamples(f"brand {self.brand!r} has {m} videos, needs >= 3")

    @property
    def m(self) -> int:
        return len(self.unfolding)

    def metric(self, name: str) -> tuple[float, ...]:
        if name not in METRIC_FIELDS:
            raise KeyError(name)
        return getattr(self, name)


@dataclass(frozen=True)
class BoxplotSummary:
    q1: float
    median: float
    q3: float
    iqr: float
    lower_whisker: float
    upper_whisker: float
    outliers: tuple[float, ...]

    def __post_init__(self):
        if not self.q1 <= self.median <= self.q3:
            raise InvariantViolation("q1 <= median <= q3")
        if abs(self.iqr - (self.q3 - self.q1)) > 1e-9:
            raise InvariantViolation("iqr == q3 - q1")

    def to_dict(self) -> dict:
        return {
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
            "iqr": self.iqr,
            "lower_whisker": self.lower_whisker,
            "upper_whisker": self.upper_whisker,
            "outliers": list(self.outliers),
        }


class TTestResult(NamedTuple):
    statistic: float
    pvalue: float | None
    dof: int | None
    mode: str


@dataclass(frozen=True)
class StudyResult:
    """Cross-brand statistics: per-brand boxplots and Pearson, pairwise t-tests."""

    brands: tuple[str, ...]
    pearson_table: dict
    ttest_pvalues: dict
    ttest_statistics: dict
    boxplots: dict
    ttest_mode: str

    def to_dict(self) -> dict:
        return {
            "brands": list(self.brands),
            "pearson": {
                b: {"r": r, "p": p} for b, (r, p) in self.pearson_table.items()
            },
            "ttest_mode": self.ttest_mode,
            "ttest_pvalues": self.ttest_pvalues,
            "ttest_statistics": self.ttest_statistics,
            "boxplots": {
                b: {m: s.to_dict() for m, s in per.items()} if per is not None else None
                for b, per in self.boxplots.items()
            },
            "conventions": {
                "quantile_method": "linear interpolation of order statistics (type 7)",
                "pearson_pvalue": "two-sided, t = r*sqrt((m-2)/(1-r^2)) with m-2 dof",
                "whisker_fences": "[q1 - 1.5*iqr, q3 + 1.5*iqr]",
            },
        }


def pearson(x, y) -> float:
    """Pearson correlation: covariance over the product of standard deviations."""
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.size != ya.size:
        raise LengthMismatch(f"{xa.size} vs {ya.size}")
    if xa.size < 3:
        raise TooFewSamples(f"pearson needs >= 3 samples, got {xa.size}")
    dx = xa - xa.mean()
    dy = ya - ya.mean()
    sxx = float(dx.dot(dx))
    syy = float(dy.dot(dy))
    if sxx == 0.0 or syy == 0.0:
        raise ZeroVariance("a constant vector has no correlation")
    r = float(dx.dot(dy)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def pearson_pvalue(r: float, m: int) -> float:
    """Two-sided p-value for an observed correlation of m paired samples.

    |r| == 1 is a degenerate correlation and reports p = 0.
    """
    if m < 3:
        raise TooFewSamples(f"needs m >= 3, got {m}")
    if abs(r) >= 1.0:
        return 0.0
    t = r * math.sqrt((m - 2) / (1.0 - r * r))
    return min(1.0, 2.0 * student_t_sf(abs(t), m - 2))


def ttest(x, y, mode: str = TTEST_STANDARD) -> TTestResult:
    """Two-sample t-test.

    standard: pooled-variance t with n1+n2-2 dof and a two-sided p-value
    (sample sizes may differ; a study can lose videos from one brand).
    literal_eq8: the non-standard published statistic for equal-size samples,
    no p-value.
    """
    if mode not in TTEST_MODES:
        raise ValueError(f"unknown t-test mode {mode!r}")
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.size < 2 or ya.size < 2:
        raise TooFewSamples("t-test needs >= 2 samples per side")
    ssx = float(((xa - xa.mean()) ** 2).sum())
    ssy = float(((ya - ya.mean()) ** 2).sum())
    diff = float(xa.mean() - ya.mean())
    if mode == TTEST_LITERAL:
        if xa.size != ya.size:
            raise LengthMismatch("literal mode requires equal sample sizes")
        denom2 = ssx * ssy / xa.size
        if denom2 == 0.0:
            raise ZeroVariance("zero spread in literal t statistic")
        return TTestResult(diff / math.sqrt(denom2), None, None, mode)
    dof = xa.size + ya.size - 2
    sp2 = (ssx + ssy) / dof
    if sp2 == 0.0:
        raise ZeroVariance("both samples constant")
    t = diff / math.sqrt(sp2 * (1.0 / xa.size + 1.0 / ya.size))
    p = min(1.0, 2.0 * student_t_sf(abs(t), dof))
    return TTestResult(t, p, dof, mode)


def student_t_sf(t: float, dof: float) -> float:
    """Upper-tail probability of the Student t distribution.

    Evaluated through the regularized incomplete beta function so that the
    absolute error stays below 1e-10 for dof <= 1000 and |t| <= 50.
    """
    if dof < 1:
        raise InvalidDof(f"dof must be >= 1, got {dof}")
    if t == 0.0:
        return 0.5
    x = dof / (dof + t * t)
    tail = 0.5 * _betainc_reg(dof / 2.0, 0.5, x)
    return tail if t > 0 else 1.0 - tail


def boxplot_summary(values) -> BoxplotSummary:
    """Quartiles, IQR, whiskers clamped to data inside the 1.5 IQR fences."""
    vals = sorted(float(v) for v in np.asarray(values, dtype=float).ravel())
    n = len(vals)
    if n < 4:
        raise TooFewSamples(f"boxplot needs >= 4 values, got {n}")
    q1 = _quantile(vals, 0.25)
    med = _quantile(vals, 0.5)
    q3 = _quantile(vals, 0.75)
    iqr = q3 - q1
    lo_fence = q1 - 1.5 * iqr
    hi_fence = q3 + 1.5 * iqr
    inside = [v for v in vals if lo_fence <= v <= hi_fence]
    outliers = tuple(v for v in vals if v < lo_fence or v > hi_fence)
    return BoxplotSummary(
        q1=q1,
        median=med,
        q3=q3,
        iqr=iqr,
        lower_whisker=inside[0],
        upper_whisker=inside[-1],
        outliers=outliers,
    )


def run_study(brand_samples, ttest_mode: str = TTEST_STANDARD) -> StudyResult:
    """Per-brand Pearson(unfolding, rotation) plus all pairwise t-tests and boxplots.

    Brands are processed in name order so the result is independent of input
    order. T-test tables are symmetric with None on the diagonal.
    """
    samples = sorted(brand_samples, key=lambda s: s.brand)
    if len(samples) < 2:
        raise InsufficientBrands(f"study needs >= 2 brands, got {len(samples)}")
    names = [s.brand for s in samples]
    if len(set(names)) != len(names):
        raise InvariantViolation("brand names unique")

    pearson_table = {}
    boxplots = {}
    for s in samples:
        r = pearson(s.unfolding, s.rotation)
        pearson_table[s.brand] = (r, pearson_pvalue(r, s.m))
        # quartile interpolation needs four values; a three-video brand is
        # still testable but gets no boxplot
        if s.m >= 4:
            boxplots[s.brand] = {m: boxplot_summary(s.metric(m)) for m in METRIC_FIELDS}
        else:
            boxplots[s.brand] = None

    pvalues: dict = {m: {a: {} for a in names} for m in METRIC_FIELDS}
    statistics: dict = {m: {a: {} for a in names} for m in METRIC_FIELDS}
    for metric in METRIC_FIELDS:
        for a in samples:
            for b in samples:
                if a.brand == b.brand:
                    pvalues[metric][a.brand][b.brand] = None
                    statistics[metric][a.brand][b.brand] = None
                    continue
                res = ttest(a.metric(metric), b.metric(metric), ttest_mode)
                pvalues[metric][a.brand][b.brand] = res.pvalue
                statistics[metric][a.brand][b.brand] = res.statistic
    return StudyResult(
        brands=tuple(names),
        pearson_table=pearson_table,
        ttest_pvalues=pvalues,
        ttest_statistics=statistics,
        boxplots=boxplots,
        ttest_mode=ttest_mode,
    )


def boxplots_to_csv(result: StudyResult) -> str:
    """Flat CSV of all boxplot summaries, one row per brand and metric."""
    lines = ["brand,metric,q1,median,q3,iqr,lower_whisker,upper_whisker,n_outliers"]
    for brand in result.brands:
        if result.boxplots[brand] is None:
            continue
        for metric in METRIC_FIELDS:
            s = result.boxplots[brand][metric]
            lines.append(
                f"{brand},{metric},{s.q1!r},{s.median!r},{s.q3!r},{s.iqr!r},"
                f"{s.lower_whisker!r},{s.upper_whisker!r},{len(s.outliers)}"
            )
    return "\n".join(lines) + "\n"


def _quantile(sorted_vals: list[float], p: float) -> float:
    """Type-7 quantile: linear interpolation at h = (n-1) * p."""
    h = (len(sorted_vals) - 1) * p
    lo = math.floor(h)
    hi = min(lo + 1, len(sorted_vals) - 1)
    frac = h - lo
    return sorted_vals[lo] * (1.0 - frac) + sorted_vals[hi] * frac


def _betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b) via Lentz continued fraction."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def _betacf(a: float, b: float, x: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_FPMIN:
        d = _CF_FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_FPMIN:
            d = _CF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _CF_FPMIN:
            c = _CF_FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_FPMIN:
            d = _CF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _CF_FPMIN:
            c = _CF_FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")
