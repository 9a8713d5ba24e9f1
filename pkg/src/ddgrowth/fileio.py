"""Text formats: distributions, attachment tables, histograms, edge lists.

Numeric files are UTF-8 with LF endings, TAB-separated, ``#`` comments.
Metadata rides in comment lines of the form ``# key=value``.
"""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .distributions import DegreeDistribution, RawHistogram
from .errors import EmptyInputError, FormatError, MissingRateError, NormalizationError
from .inversion import AttachmentFunction

FILE_SUM_TOL = 1e-9


def _fmt(x: float) -> str:
    return f"{x:.16e}"


def write_lines(path, lines):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line)
            fh.write("\n")


def _read_table(path):
    """Return (metadata, degrees, values) from a ``#``-commented TAB table."""
    meta = {}
    degrees, values = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, value = body.partition("=")
                    meta[key.strip()] = value.strip()
                continue
            parts = line.split()
            if len(parts) != 2:
                raise FormatError(f"{path}:{lineno}: expected '<degree><TAB><value>'")
            try:
                degree = int(parts[0])
                value = float(parts[1])
            except ValueError:
                raise FormatError(f"{path}:{lineno}: malformed number") from None
            if degree < 1:
                raise FormatError(f"{path}:{lineno}: degree must be >= 1")
            degrees.append(degree)
            values.append(value)
    return meta, degrees, values


def _dense(path, degrees, values) -> np.ndarray:
    if not degrees:
        raise EmptyInputError(f"{path}: no data lines")
    if any(b <= a for a, b in zip(degrees, degrees[1:])):
        raise FormatError(f"{path}: degrees must be strictly ascending")
    out = np.zeros(degrees[-1])
    out[np.asarray(degrees) - 1] = values
    return out


def write_distribution(path, dist: DegreeDistribution):
    lines = ["# kind=distribution", f"# source={dist.source}"]
    for key, value in dist.params.items():
        if key != "d_max":
            lines.append(f"# {key}={value}")
    lines.append(f"# d_max={dist.d_max}")
    lines.append("# interpolated=" + ",".join(str(d) for d in sorted(dist.interpolated_degrees)))
    lines.extend(f"{i}\t{_fmt(p)}" for i, p in enumerate(dist.pmf, start=1))
    write_lines(path, lines)


def read_distribution(path) -> DegreeDistribution:
    meta, degrees, values = _read_table(path)
    pmf = _dense(path, degrees, values)
    if np.any(pmf < 0) or not np.all(np.isfinite(pmf)):
        raise NormalizationError(f"{path}: probabilities must be finite and non-negative")
    residual = math.fsum(pmf) - 1.0
    if abs(residual) > FILE_SUM_TOL:
        raise NormalizationError(f"{path}: probabilities sum to {1.0 + residual!r}, expected 1")
    interp = meta.get("interpolated", "")
    interpolated = frozenset(int(x) for x in interp.split(",") if x.strip())
    params = {k: v for k, v in meta.items() if k not in ("kind", "source", "interpolated")}
    return DegreeDistribution(pmf, source=meta.get("source", str(path)), interpolated_degrees=interpolated, params=params)


def write_attachment(path, f: AttachmentFunction, mean_degree: float | None = None):
    lines = ["# kind=attachment", f"# provenance={f.provenance}"]
    if f.p is not None:
        lines.append(f"# p={f.p!r}")
    if mean_degree is not None:
        lines.append(f"# mean_degree={mean_degree!r}")
    lines.append(f"# d_max={f.d_max}")
    lines.extend(f"{i}\t{_fmt(v)}" for i, v in enumerate(f.values, start=1))
    write_lines(path, lines)


def read_attachment(path, require_rate: bool = False) -> AttachmentFunction:
    meta, degrees, values = _read_table(path)
    table = _dense(path, degrees, values)
    if "d_max" in meta and int(meta["d_max"]) > table.size:
        table = np.concatenate([table, np.zeros(int(meta["d_max"]) - table.size)])
    p = float(meta["p"]) if "p" in meta else None
    if require_rate and p is None:
        raise MissingRateError(f"{path}: attachment file carries no '# p=' metadata")
    return AttachmentFunction(table, provenance=meta.get("provenance", str(path)), p=p)


def read_histogram(path) -> RawHistogram:
    _, degrees, values = _read_table(path)
    if not degrees:
        raise EmptyInputError(f"{path}: histogram has no data lines")
    counts = {}
    for d, c in zip(degrees, values):
        counts[d] = counts.get(d, 0.0) + c
    return RawHistogram(counts)


def write_histogram(path, degree_counts):
    """``degree_counts[i]`` nodes of degree i; zero rows are omitted."""
    lines = ["# kind=histogram"]
    for i in np.flatnonzero(np.asarray(degree_counts)):
        if i >= 1:
            lines.append(f"{i}\t{int(degree_counts[i])}")
    write_lines(path, lines)


def write_edges(path, edges: np.ndarray):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for start in range(0, edges.shape[0], 1 << 16):
            block = edges[start : start + (1 << 16)]
            fh.write("".join(f"{u} {v}\n" for u, v in block.tolist()))


def read_edges(path) -> np.ndarray:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if line and not line.startswith("#"):
                u, v = line.split()
                rows.append((int(u), int(v)))
    return np.array(rows, dtype=np.int64).reshape(-1, 2)


def write_report(path, values: dict):
    write_lines(path, [f"{k}={v}" for k, v in values.items()])


def output_paths(prefix) -> dict:
    prefix = str(prefix)
    return {
        "edges": Path(prefix + ".edges"),
        "histogram": Path(prefix + ".hist"),
        "summary": Path(prefix + ".summary"),
    }
