"""Compare realized degree distributions against their targets."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import DegreeDistribution
from .errors import EmptyInputError, FitError, InvalidParameterError
from .simulator import GrowthGraph

DEFAULT_SPIKE_WINDOW = 5
SPIKE_BAND = (0.5, 2.0)


@dataclass(frozen=True)
class DDComparison:
    tv_distance: float
    max_pointwise_log_ratio: float
    support_mismatch: float


@dataclass(frozen=True)
class TailFit:
    """Least-squares fit of log CCDF against log degree.

    ``slope`` is the CCDF exponent magnitude; the pmf exponent is slope + 1.
    """

    fit_range: tuple[int, int]
    slope: float
    r_squared: float
    points: int

    @property
    def pmf_exponent(self) -> float:
        return self.slope + 1.0


@dataclass(frozen=True)
class SpikeReport:
    degree: int
    target_ratio: float
    realized_ratio: float
    ratio_of_ratios: float
    flagged: bool


def empirical_dd_from_counts(counts, source="realized") -> DegreeDistribution:
    """``counts[i]`` is the number of nodes of degree i (index 0 ignored)."""
    c = np.asarray(counts, dtype=np.float64)[1:]
    total = c.sum()
    if total <= 0:
        raise EmptyInputError("no nodes to build a distribution from")
    return DegreeDistribution(c / total, source=source)


def empirical_dd(graph: GrowthGraph) -> DegreeDistribution:
    """Realized distribution N(i)/n. Interior zeros are kept, not filled."""
    return empirical_dd_from_counts(graph.degree_counts, source=f"realized(seed={graph.seed})")


def zero_mass_degrees(dist: DegreeDistribution) -> list[int]:
    return [int(i) + 1 for i in np.flatnonzero(dist.pmf == 0)]


def _aligned(a: DegreeDistribution, b: DegreeDistribution):
    n = max(a.d_max, b.d_max)
    x = np.zeros(n)
    y = np.zeros(n)
    x[: a.d_max] = a.pmf
    y[: b.d_max] = b.pmf
    return x, y


def compare(target: DegreeDistribution, realized: DegreeDistribution) -> DDComparison:
    x, y = _aligned(target, realized)
    tv = 0.5 * math.fsum(np.abs(x - y))
    both = (x > 0) & (y > 0)
    log_ratio = float(np.max(np.abs(np.log(x[both] / y[both])))) if both.any() else math.inf
    mismatch = math.fsum(x[~both]) + math.fsum(y[~both])
    return DDComparison(tv_distance=min(tv, 1.0), max_pointwise_log_ratio=log_ratio, support_mismatch=mismatch)


def fit_tail_slope(dist: DegreeDistribution, lo: int, hi: int) -> TailFit:
    """Fit log P(X > i) = c - slope * log i over degrees lo..hi."""
    if not 1 <= lo < hi:
        raise InvalidParameterError(f"fit range must satisfy 1 <= lo < hi, got {lo}:{hi}")
    hi = min(hi, dist.d_max)
    ccdf = dist.ccdf()
    i = np.arange(lo, hi + 1)
    pmf = dist.pmf[lo - 1 : hi]
    tail = ccdf[lo - 1 : hi]
    keep = (pmf > 0) & (tail > 0)
    if keep.sum() < 5:
        raise FitError(f"need at least 5 positive-mass degrees in {lo}:{hi}, found {int(keep.sum())}")
    x = np.log(i[keep])
    y = np.log(tail[keep])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return TailFit(fit_range=(lo, hi), slope=float(-slope), r_squared=min(max(r2, 0.0), 1.0), points=int(keep.sum()))


def _spike_ratio(dist: DegreeDistribution, s: int, window: int) -> float:
    lo = max(1, s - window)
    neighbours = [d for d in range(lo, s + window + 1) if d != s]
    vals = np.array([dist.prob(d) for d in neighbours])
    peak = dist.prob(s)
    if np.any(vals <= 0):
        return math.nan if peak > 0 else 0.0
    return peak / math.exp(float(np.mean(np.log(vals))))


def spike_fidelity(
    target: DegreeDistribution,
    realized: DegreeDistribution,
    spike_degrees,
    window: int = DEFAULT_SPIKE_WINDOW,
) -> list[SpikeReport]:
    """Peak-to-neighbourhood ratios of the realized vs the target distribution.

    A spike's ratio is pmf[s] over the geometric mean of pmf on
    [s - window, s + window] without s. A realized neighbourhood with an
    empty degree makes the ratio undefined (nan); such spikes are flagged.
    """
    if window < 1:
        raise InvalidParameterError("window must be at least 1")
    reports = []
    for s in spike_degrees:
        t = _spike_ratio(target, s, window)
        r = _spike_ratio(realized, s, window)
        rr = r / t if t > 0 and not math.isnan(t) else math.nan
        flagged = not (SPIKE_BAND[0] <= rr <= SPIKE_BAND[1])
        reports.append(SpikeReport(int(s), t, r, rr, flagged))
    return reports


def log_binned(dist: DegreeDistribution, bins_per_decade: int = 10):
    """Log-binned pmf for plotting only (bin centres, mean density)."""
    decades = math.log10(dist.d_max + 1)
    num = max(2, int(math.ceil(bins_per_decade * decades)) + 1)
    edges = np.unique(np.floor(np.logspace(0, decades, num)).astype(int))
    edges = np.append(edges[edges <= dist.d_max], dist.d_max + 1)
    centres, density = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        mass = dist.pmf[a - 1 : b - 1].sum()
        centres.append(math.sqrt(a * (b - 1)))
        density.append(mass / (b - a))
    return np.array(centres), np.array(density)


def csv_rows(dist: DegreeDistribution):
    """Rows of ``degree,pmf,ccdf`` for plotting."""
    yield "degree,pmf,ccdf"
    ccdf = dist.ccdf()
    for i, (p, c) in enumerate(zip(dist.pmf, ccdf), start=1):
        yield f"{i},{p:.17g},{c:.17g}"
