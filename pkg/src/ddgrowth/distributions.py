"""Target degree distributions over a finite support 1..d_max.

Closed-form families are evaluated in the log domain and renormalized over
the truncated support. Empirical histograms are normalized and their
interior gaps filled by straight lines in log-log coordinates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.special import gammaln

from .errors import EmptyInputError, InvalidParameterError, NormalizationError

DEFAULT_D_MAX = 10**6
NORMALIZATION_TOL = 1e-12
# Loose bound accepted when wrapping an array that was not renormalized here
# (forward recurrence output, files read from disk).
CONSTRUCTION_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class DegreeDistribution:
    """Probability mass over degrees 1..d_max.

    ``pmf[i - 1]`` holds P(i). Trailing zero masses are trimmed on
    construction, so ``pmf[-1] > 0`` always holds.
    """

    pmf: np.ndarray
    source: str = "custom"
    interpolated_degrees: frozenset = frozenset()
    params: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        pmf = np.array(self.pmf, dtype=np.float64).ravel()
        if pmf.size == 0:
            raise EmptyInputError("distribution has empty support")
        if not np.all(np.isfinite(pmf)):
            raise NormalizationError("distribution contains non-finite mass")
        if np.any(pmf < 0):
            i = int(np.argmax(pmf < 0)) + 1
            raise NormalizationError(f"negative mass at degree {i}")
        positive = np.flatnonzero(pmf > 0)
        if positive.size == 0:
            raise EmptyInputError("distribution has no positive mass")
        pmf = pmf[: positive[-1] + 1].copy()
        residual = math.fsum(pmf) - 1.0
        if abs(residual) > CONSTRUCTION_TOL:
            raise NormalizationError(
                f"probabilities sum to {1.0 + residual!r}, expected 1"
            )
        pmf.flags.writeable = False
        object.__setattr__(self, "pmf", pmf)
        object.__setattr__(
            self,
            "interpolated_degrees",
            frozenset(int(d) for d in self.interpolated_degrees if d <= pmf.size),
        )
        object.__setattr__(self, "params", dict(self.params))

    @classmethod
    def from_weights(cls, weights, source="custom", **kwargs) -> "DegreeDistribution":
        """Normalize non-negative weights (index 0 is degree 1)."""
        w = np.asarray(weights, dtype=np.float64).ravel()
        if w.size == 0 or not np.any(w > 0):
            raise EmptyInputError("weights have no positive mass")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise NormalizationError("weights must be finite and non-negative")
        return cls(w / w.sum(), source=source, **kwargs)

    @property
    def d_max(self) -> int:
        return int(self.pmf.size)

    @property
    def degrees(self) -> np.ndarray:
        return np.arange(1, self.pmf.size + 1)

    @property
    def residual(self) -> float:
        """Signed deviation of the total mass from 1."""
        return math.fsum(self.pmf) - 1.0

    def prob(self, degree: int) -> float:
        if 1 <= degree <= self.pmf.size:
            return float(self.pmf[degree - 1])
        return 0.0

    def ccdf(self) -> np.ndarray:
        """P(X > i) for i = 1..d_max, accumulated from the tail."""
        tail = np.cumsum(self.pmf[::-1])[::-1]
        return np.append(tail[1:], 0.0)

    def __len__(self) -> int:
        return self.pmf.size

    def __repr__(self) -> str:
        return f"DegreeDistribution(source={self.source!r}, d_max={self.d_max})"


@dataclass(frozen=True)
class RawHistogram:
    """Observed degree counts, as read from a histogram file."""

    counts: Mapping[int, float]

    def __post_init__(self):
        clean = {}
        for degree, count in self.counts.items():
            if int(degree) != degree or degree < 1:
                raise InvalidParameterError(f"degree must be a positive integer, got {degree!r}")
            if not (count >= 0) or not math.isfinite(count):
                raise InvalidParameterError(f"count for degree {degree} must be non-negative")
            clean[int(degree)] = clean.get(int(degree), 0) + count
        object.__setattr__(self, "counts", clean)

    @property
    def total(self) -> float:
        return math.fsum(self.counts.values())


def _check_d_max(d_max) -> int:
    if int(d_max) != d_max or d_max < 2:
        raise InvalidParameterError(f"d_max must be an integer >= 2, got {d_max!r}")
    return int(d_max)


def _from_log_weights(logw: np.ndarray, source: str, params: dict) -> DegreeDistribution:
    w = np.exp(logw - logw.max())
    return DegreeDistribution(w / w.sum(), source=source, params=params)


def _label(family: str, params: dict) -> str:
    inner = ", ".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}" for k, v in params.items())
    return f"{family}({inner})"


def _log_gamma_ratio(i: np.ndarray, b: float, alpha: float) -> np.ndarray:
    # log of Gamma(i + b) / Gamma(i + b + alpha)
    return gammaln(i + b) - gammaln(i + b + alpha)


def build_generalized_chung_lu(alpha: float, b: float, d_max: int = DEFAULT_D_MAX) -> DegreeDistribution:
    """P(i) proportional to Gamma(i+b)/Gamma(i+b+alpha), the linear-attachment law."""
    if not alpha > 2:
        raise InvalidParameterError(f"alpha must exceed 2, got {alpha!r}")
    if not b > -1:
        raise InvalidParameterError(f"b must exceed -1, got {b!r}")
    d_max = _check_d_max(d_max)
    i = np.arange(1, d_max + 1, dtype=np.float64)
    params = {"alpha": float(alpha), "b": float(b)}
    return _from_log_weights(
        _log_gamma_ratio(i, b, alpha),
        _label("chung_lu", params),
        {"family": "chung_lu", **params, "d_max": d_max},
    )


def build_exact_power_law(alpha: float, d_max: int = DEFAULT_D_MAX) -> DegreeDistribution:
    """P(i) proportional to i**-alpha, normalized by the truncated zeta sum."""
    if not alpha > 2:
        raise InvalidParameterError(f"alpha must exceed 2, got {alpha!r}")
    d_max = _check_d_max(d_max)
    i = np.arange(1, d_max + 1, dtype=np.float64)
    params = {"alpha": float(alpha)}
    return _from_log_weights(
        -alpha * np.log(i),
        _label("power_law", params),
        {"family": "power_law", **params, "d_max": d_max},
    )


def build_geometric(q: float, d_max: int = DEFAULT_D_MAX) -> DegreeDistribution:
    if not 0 < q < 1:
        raise InvalidParameterError(f"q must lie in (0, 1), got {q!r}")
    d_max = _check_d_max(d_max)
    i = np.arange(1, d_max + 1, dtype=np.float64)
    params = {"q": float(q)}
    return _from_log_weights(
        (i - 1) * math.log1p(-q),
        _label("geometric", params),
        {"family": "geometric", **params, "d_max": d_max},
    )


def build_poisson(lam: float, d_max: int = DEFAULT_D_MAX) -> DegreeDistribution:
    """Zero-truncated Poisson: P(i) proportional to lam**i / i! for i >= 1."""
    if not (lam > 0 and math.isfinite(lam)):
        raise InvalidParameterError(f"lambda must be positive, got {lam!r}")
    d_max = _check_d_max(d_max)
    i = np.arange(1, d_max + 1, dtype=np.float64)
    params = {"lambda": float(lam)}
    return _from_log_weights(
        i * math.log(lam) - gammaln(i + 1),
        _label("poisson", params),
        {"family": "poisson", **params, "d_max": d_max},
    )


def build_broken_power_law(
    alpha1: float,
    alpha2: float,
    b1: float,
    b2: float,
    d: int,
    d_max: int = DEFAULT_D_MAX,
) -> DegreeDistribution:
    """Two generalized Chung-Lu segments joined continuously at degree ``d``."""
    for name, value in (("alpha1", alpha1), ("alpha2", alpha2)):
        if not value > 2:
            raise InvalidParameterError(f"{name} must exceed 2, got {value!r}")
    for name, value in (("b1", b1), ("b2", b2)):
        if not value > -1:
            raise InvalidParameterError(f"{name} must exceed -1, got {value!r}")
    d_max = _check_d_max(d_max)
    if int(d) != d or not 2 <= d < d_max:
        raise InvalidParameterError(f"break degree d must satisfy 2 <= d < d_max, got {d!r}")
    d = int(d)
    i = np.arange(1, d_max + 1, dtype=np.float64)
    logw = np.empty(d_max)
    logw[:d] = _log_gamma_ratio(i[:d], b1, alpha1)
    # Grouped so that identical segments give log_gamma == 0 exactly.
    log_gamma = (gammaln(d + b1) - gammaln(d + b1 + alpha1)) + (
        gammaln(d + b2 + alpha2) - gammaln(d + b2)
    )
    logw[d:] = log_gamma + _log_gamma_ratio(i[d:], b2, alpha2)
    params = {"alpha1": float(alpha1), "alpha2": float(alpha2), "b1": float(b1), "b2": float(b2), "d": d}
    return _from_log_weights(
        logw,
        _label("broken_power_law", params),
        {"family": "broken_power_law", **params, "d_max": d_max},
    )


FAMILIES = {
    "chung_lu": build_generalized_chung_lu,
    "power_law": build_exact_power_law,
    "geometric": build_geometric,
    "poisson": build_poisson,
    "broken_power_law": build_broken_power_law,
}


def build(family: str, d_max: int = DEFAULT_D_MAX, **params) -> DegreeDistribution:
    """Dispatch to a family builder by name."""
    try:
        builder = FAMILIES[family]
    except KeyError:
        raise InvalidParameterError(
            f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}"
        ) from None
    if family == "poisson" and "lambda" in params:
        params["lam"] = params.pop("lambda")
    return builder(d_max=d_max, **params)


def interpolate_gaps(values) -> tuple[np.ndarray, frozenset]:
    """Fill zero entries by log-log straight lines between positive anchors.

    ``values[i - 1]`` is the (unnormalized) mass of degree i and the last
    entry must be positive. Interior gaps use the nearest positive degree on
    each side; a leading gap extends the first segment to the left, or
    repeats the single anchor when only one exists. Returns the filled copy
    and the set of filled degrees.
    """
    v = np.array(values, dtype=np.float64)
    anchors = np.flatnonzero(v > 0)
    if anchors.size == 0:
        raise EmptyInputError("no positive mass to interpolate from")
    if anchors[-1] != v.size - 1:
        raise InvalidParameterError("last degree of the support must carry positive mass")
    gaps = np.flatnonzero(v <= 0)
    if gaps.size == 0:
        return v, frozenset()

    log_deg = np.log(np.arange(1, v.size + 1, dtype=np.float64))
    log_v = np.full(v.size, -np.inf)
    log_v[anchors] = np.log(v[anchors])

    # Segment index for each gap: right anchor is the first anchor above it.
    right = np.searchsorted(anchors, gaps)
    leading = right == 0
    if anchors.size == 1:
        v[gaps] = v[anchors[0]]
        return v, frozenset(int(g) + 1 for g in gaps)
    right = np.where(leading, 1, right)
    a = anchors[right - 1]
    b = anchors[right]
    t = (log_deg[gaps] - log_deg[a]) / (log_deg[b] - log_deg[a])
    v[gaps] = np.exp(log_v[a] + t * (log_v[b] - log_v[a]))
    return v, frozenset(int(g) + 1 for g in gaps)


def load_empirical(hist: RawHistogram, d_max_override: int | None = None) -> DegreeDistribution:
    """Turn observed counts into a gap-free distribution."""
    positive = [d for d, c in hist.counts.items() if c > 0]
    if not positive:
        raise EmptyInputError("histogram has no positive counts")
    d_max = max(positive)
    if d_max_override is not None:
        if int(d_max_override) != d_max_override or d_max_override < 1:
            raise InvalidParameterError("d_max_override must be a positive integer")
        d_max = min(d_max, int(d_max_override))
    counts = np.zeros(d_max)
    for degree, count in hist.counts.items():
        if degree <= d_max:
            counts[degree - 1] = count
    if not np.any(counts > 0):
        raise EmptyInputError(f"histogram has no positive counts at or below degree {d_max}")
    last = np.flatnonzero(counts > 0)[-1]
    probs = counts[: last + 1] / math.fsum(counts)
    filled, filled_degrees = interpolate_gaps(probs)
    return DegreeDistribution(
        filled / filled.sum(),
        source="empirical",
        interpolated_degrees=filled_degrees,
        params={"family": "empirical", "d_max": int(filled.size)},
    )


def mean_degree(dist: DegreeDistribution) -> float:
    return math.fsum(dist.degrees * dist.pmf)


def with_boosts(dist: DegreeDistribution, factors: Mapping[int, float]) -> DegreeDistribution:
    """Multiply the mass at selected degrees and renormalize."""
    w = dist.pmf.copy()
    for degree, factor in factors.items():
        if not 1 <= degree <= w.size:
            raise InvalidParameterError(f"boost degree {degree} outside support 1..{w.size}")
        if not factor > 0:
            raise InvalidParameterError(f"boost factor must be positive, got {factor!r}")
        w[degree - 1] *= factor
    label = ",".join(f"{d}x{f:g}" for d, f in sorted(factors.items()))
    params = dict(dist.params)
    params["boost"] = label
    return DegreeDistribution.from_weights(
        w,
        source=f"{dist.source}+boost[{label}]",
        interpolated_degrees=dist.interpolated_degrees,
        params=params,
    )
