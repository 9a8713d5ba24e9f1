"""Degree distribution <-> attachment function.

``invert`` maps a distribution P to the attachment function
f(i) = P(X > i) / P(i); ``forward`` runs the stationary recurrence
P(i) = f(i-1) P(i-1) / (1 + f(i)) in the other direction. Closed forms for
the built-in families are tabulated by ``closed_form_f`` for cross-checks.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln

from .distributions import DegreeDistribution, mean_degree
from .errors import (
    InconsistentAttachmentError,
    InfeasibleRateError,
    InvalidParameterError,
    ZeroMassDegreeError,
)

FORWARD_WARN_TOL = 1e-9
FORWARD_ERROR_TOL = 1e-6
DEFAULT_TAIL_RATIO = 10.0


@dataclass(frozen=True, eq=False)
class AttachmentFunction:
    """Tabulated attachment weights; ``values[i - 1]`` is f(i).

    ``p`` is the node-event probability when the table was derived from a
    target distribution, None otherwise.
    """

    values: np.ndarray
    provenance: str = "custom"
    p: float | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64).ravel()
        if v.size == 0:
            raise InvalidParameterError("attachment function needs at least one degree")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise InvalidParameterError("attachment values must be finite and non-negative")
        if self.p is not None and not 0 < self.p <= 1:
            raise InvalidParameterError(f"p must lie in (0, 1], got {self.p!r}")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def d_max(self) -> int:
        return int(self.values.size)

    @property
    def degrees(self) -> np.ndarray:
        return np.arange(1, self.values.size + 1)

    def at(self, degree: int) -> float:
        return float(self.values[degree - 1])

    def with_rate(self, p: float) -> "AttachmentFunction":
        return AttachmentFunction(self.values, self.provenance, p)

    def __repr__(self) -> str:
        return f"AttachmentFunction(provenance={self.provenance!r}, d_max={self.d_max}, p={self.p})"


@dataclass(frozen=True)
class ModelRate:
    """Node-event probability matched to a target mean degree.

    Every step adds one edge and, with probability p, one node, so the
    mean degree settles at 2/p and ``1/p`` is the number of edges per node.
    ``clamped`` marks targets whose mean fell marginally below 2 and were
    given p = 1.
    """

    p: float
    mean_degree: float
    clamped: bool = False

    @property
    def edges_per_node(self) -> float:
        return 1.0 / self.p


@dataclass(frozen=True)
class ConditionReport:
    k_bound: float
    bounded_increments: bool
    validity_branch: str
    validity_sum: float
    tail_class: str
    head_median: float
    tail_median: float
    median_ratio: float
    ratio_threshold: float
    theorem_k: float | None = None
    sum_identity_residual: float | None = None
    notes: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if k != "notes"}


def tail_mass(dist: DegreeDistribution) -> np.ndarray:
    """T(i) = sum_{k > i} P(k), accumulated from the smallest degrees' end."""
    return dist.ccdf()


def invert(dist: DegreeDistribution) -> AttachmentFunction:
    """Attachment function reproducing ``dist``: f(i) = P(X > i) / P(i)."""
    pmf = dist.pmf
    zero = np.flatnonzero(pmf <= 0)
    if zero.size:
        raise ZeroMassDegreeError(int(zero[0]) + 1)
    f = tail_mass(dist) / pmf
    f[-1] = 0.0
    return AttachmentFunction(f, provenance=f"inverted from {dist.source}")


def node_probability(dist: DegreeDistribution, slack: float = 1e-3) -> ModelRate:
    """Node-event probability giving ``dist`` its mean degree: p = 2 / <k>.

    Targets with mean in [2(1 - slack), 2) are clamped to p = 1; truncated
    laws whose untruncated mean is exactly 2 land there.
    """
    m = mean_degree(dist)
    if m < 2.0 * (1.0 - slack):
        raise InfeasibleRateError(
            f"mean degree {m:.6g} is below 2; every step adds one edge and at most "
            "one node, so no p in (0, 1] reaches it"
        )
    if m < 2.0:
        return ModelRate(p=1.0, mean_degree=m, clamped=True)
    return ModelRate(p=2.0 / m, mean_degree=m)


def forward(f: AttachmentFunction) -> DegreeDistribution:
    """Stationary distribution of the recurrence driven by ``f`` (no renormalization)."""
    v = f.values
    pmf = np.empty(v.size)
    pmf[0] = 1.0 / (1.0 + v[0])
    if v.size > 1:
        pmf[1:] = pmf[0] * np.cumprod(v[:-1] / (1.0 + v[1:]))
    residual = math.fsum(pmf) - 1.0
    if abs(residual) > FORWARD_ERROR_TOL:
        raise InconsistentAttachmentError(
            f"forward recurrence mass deviates from 1 by {residual:.3g}; "
            "f does not describe a distribution on 1..d_max"
        )
    if abs(residual) > FORWARD_WARN_TOL:
        warnings.warn(f"forward recurrence residual {residual:.3g}", RuntimeWarning, stacklevel=2)
    return DegreeDistribution(pmf, source=f"forward({f.provenance})")


def effective_values(f: AttachmentFunction) -> np.ndarray:
    """Weights the simulator actually uses: the ceiling degree is frozen."""
    v = f.values.copy()
    v[-1] = 0.0
    return v


def predicted_distribution(f: AttachmentFunction, p: float) -> DegreeDistribution:
    """Stationary distribution of a run with arbitrary (f, p).

    The simulator effectively attaches with c * f, where the scale c makes
    the stationary mean equal 2/p. Solved by bracketing c.
    """
    if not 0 < p <= 1:
        raise InvalidParameterError(f"p must lie in (0, 1], got {p!r}")
    base = effective_values(f)
    if base[0] <= 0:
        raise InvalidParameterError("f(1) must be positive")
    target = 2.0 / p
    degrees = np.arange(1, base.size + 1)

    def pmf_for(log_c):
        return forward(AttachmentFunction(base * math.exp(log_c))).pmf

    def gap(log_c):
        pmf = pmf_for(log_c)
        return float(np.dot(degrees[: pmf.size], pmf)) - target

    lo, hi = -40.0, 40.0
    if gap(lo) > 0 or gap(hi) < 0:
        raise InfeasibleRateError(f"no scale of f reaches mean degree {target:.6g}")
    log_c = brentq(gap, lo, hi, xtol=1e-14, rtol=1e-14)
    return DegreeDistribution(pmf_for(log_c), source=f"stationary({f.provenance}, p={p:g})")


def _chung_lu_f(i, alpha, b):
    return (i + b) / (alpha - 1.0)


def _poisson_f(d_max: int, lam: float) -> np.ndarray:
    # f(i) = lam (1 + f(i+1)) / (i+1); relative errors shrink going down.
    n = d_max + 64 + int(2 * lam)
    f = lam / (n + 1 - lam) if n + 1 > lam else 0.0
    out = np.empty(d_max)
    for i in range(n - 1, 0, -1):
        f = lam * (1.0 + f) / (i + 1)
        if i <= d_max:
            out[i - 1] = f
    return out


def _power_law_f(d_max: int, alpha: float) -> np.ndarray:
    # f(i) = sum_{m > i} (i/m)^alpha = (i/(i+1))^alpha (1 + f(i+1)).
    n = max(d_max, 1000)
    a = n + 1.0
    # Euler-Maclaurin for sum_{m >= a} (n/m)^alpha.
    f = (n / a) ** alpha * (
        a / (alpha - 1.0)
        + 0.5
        + alpha / (12.0 * a)
        - alpha * (alpha + 1.0) * (alpha + 2.0) / (720.0 * a**3)
    )
    out = np.empty(d_max)
    if n <= d_max:
        out[n - 1] = f
    for i in range(n - 1, 0, -1):
        f = (i / (i + 1.0)) ** alpha * (1.0 + f)
        if i <= d_max:
            out[i - 1] = f
    return out


def _broken_power_law_f(i, alpha1, alpha2, b1, b2, d):
    out = np.empty(i.size)
    hi = i >= d
    out[hi] = _chung_lu_f(i[hi], alpha2, b2)
    lo = ~hi
    il = i[lo]
    log_ratio = gammaln(il + b1 + alpha1) - gammaln(il + b1) + gammaln(d + b1) - gammaln(d + b1 + alpha1)
    jump = (b2 + d) / (alpha2 - 1.0) - (b1 + d) / (alpha1 - 1.0)
    out[lo] = _chung_lu_f(il, alpha1, b1) + np.exp(log_ratio) * jump
    return out


def closed_form_f(family: str, d_max: int, **params) -> AttachmentFunction:
    """Untruncated closed-form attachment function of a family, tabulated on 1..d_max."""
    from . import distributions

    if family not in distributions.FAMILIES:
        raise InvalidParameterError(
            f"unknown family {family!r}; expected one of {', '.join(distributions.FAMILIES)}"
        )
    if "lambda" in params:
        params["lam"] = params.pop("lambda")
    # Reuse the builders' parameter checks on a tiny support.
    probe = dict(params)
    if family == "broken_power_law":
        distributions.build(family, d_max=max(int(params.get("d", 2)) + 1, 3), **probe)
    else:
        distributions.build(family, d_max=2, **probe)
    if int(d_max) != d_max or d_max < 1:
        raise InvalidParameterError(f"d_max must be a positive integer, got {d_max!r}")
    d_max = int(d_max)
    i = np.arange(1, d_max + 1, dtype=np.float64)
    if family == "chung_lu":
        values = _chung_lu_f(i, params["alpha"], params["b"])
    elif family == "geometric":
        q = params["q"]
        values = np.full(d_max, (1.0 - q) / q)
    elif family == "poisson":
        values = _poisson_f(d_max, params["lam"])
    elif family == "power_law":
        values = _power_law_f(d_max, params["alpha"])
    else:
        values = _broken_power_law_f(
            i, params["alpha1"], params["alpha2"], params["b1"], params["b2"], int(params["d"])
        )
    inner = ", ".join(f"{k}={v:g}" for k, v in params.items())
    return AttachmentFunction(values, provenance=f"closed-form {family}({inner})")


def check_conditions(
    f: AttachmentFunction,
    dist: DegreeDistribution | None = None,
    ratio_threshold: float = DEFAULT_TAIL_RATIO,
) -> ConditionReport:
    """Finite-support diagnostics for an attachment function.

    ``tail_class`` is a heuristic: "diverging" when the median of f over the
    top decade of the support is at least ``ratio_threshold`` times the
    median over degrees 1..10. A finite table cannot witness a limit, so
    this is a proxy for the asymptotic heavy-tail criterion, not a proof.
    """
    v = f.values
    n = v.size
    k_bound = float(np.max(np.abs(np.diff(v)))) if n > 1 else 0.0

    head = v[: min(10, n)]
    tail = v[max(0, math.ceil(n / 10) - 1):]
    head_median = float(np.median(head))
    tail_median = float(np.median(tail))
    if head_median > 0:
        ratio = tail_median / head_median
    else:
        ratio = math.inf if tail_median > 0 else 1.0
    tail_class = "diverging" if ratio >= ratio_threshold else "bounded"

    positive = v > 0
    notes = []
    if tail_class == "bounded":
        c = float(v.max())
        terms = np.zeros(0)
        if c > 0:
            i = np.flatnonzero(positive) + 1
            terms = (1.0 + 1.0 / c) ** (1.0 - i) / v[positive]
        branch = "bounded"
    else:
        inv = np.full(n, np.inf)
        inv[positive] = 1.0 / v[positive]
        terms = np.exp(-np.cumsum(inv))
        branch = "diverging"
    validity_sum = math.fsum(terms)
    notes.append(f"partial sum over 1..{n}; convergence is an infinite-support property")

    theorem_k = None
    identity = None
    if dist is not None:
        if np.all(dist.pmf > 0):
            g = tail_mass(dist) / dist.pmf
            theorem_k = float(np.max(np.abs(np.diff(g)))) if g.size > 1 else 0.0
        else:
            notes.append("distribution has zero-mass degrees; theorem bound skipped")
        m = min(dist.d_max, n)
        identity = math.fsum(v[:m] * dist.pmf[:m]) - (mean_degree(dist) - 1.0)

    return ConditionReport(
        k_bound=k_bound,
        bounded_increments=math.isfinite(k_bound),
        validity_branch=branch,
        validity_sum=validity_sum,
        tail_class=tail_class,
        head_median=head_median,
        tail_median=tail_median,
        median_ratio=ratio,
        ratio_threshold=ratio_threshold,
        theorem_k=theorem_k,
        sum_identity_residual=identity,
        notes=notes,
    )
