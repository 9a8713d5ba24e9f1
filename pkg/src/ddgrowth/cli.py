"""Command line front end.

    ddgrowth dist build --family geometric --q 0.5 --dmax 60 --out geo.dist
    ddgrowth dist ingest observed.hist --out observed.dist
    ddgrowth invert geo.dist --out geo.f
    ddgrowth simulate geo.f --steps 200000 --seed 1 --out-prefix run
    ddgrowth analyze geo.dist run.hist --fit-range 10:300
    ddgrowth roundtrip geo.dist

Every result line is ``key=value`` on stdout; failures print ``error: ...``
on stderr and exit with status 1.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis, distributions, fileio, inversion, simulator
from .errors import GrowthModelError, InfeasibleRateError, InvalidParameterError

ROUNDTRIP_TOL = 1e-10


class CliError(GrowthModelError):
    pass


@dataclass
class PipelineManifest:
    command: str
    inputs: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    params: dict = field(default_factory=dict)
    force: bool = False

    def check_outputs(self):
        ins = {Path(p).resolve() for p in self.inputs}
        seen = set()
        for out in self.outputs:
            path = Path(out).resolve()
            if path in ins:
                if not self.force:
                    raise CliError(f"output {out} would overwrite an input; pass --force")
            elif path.exists() and not self.force:
                raise CliError(f"{out} exists; pass --force to overwrite")
            if path in seen:
                raise CliError(f"output path {out} given twice")
            seen.add(path)


def _emit(values: dict):
    for key, value in values.items():
        print(f"{key}={value}")


def _rate_line(dist) -> dict:
    try:
        rate = inversion.node_probability(dist)
    except InfeasibleRateError:
        return {"p": "infeasible"}
    return {"p": repr(rate.p), "p_clamped": str(rate.clamped).lower()}


def _parse_boosts(text):
    factors = {}
    for item in text.split(","):
        degree, _, factor = item.partition(":")
        try:
            factors[int(degree)] = float(factor)
        except ValueError:
            raise CliError(f"bad --boost item {item!r}; expected degree:factor") from None
    return factors


FAMILY_ARGS = {
    "chung_lu": ("alpha", "b"),
    "power_law": ("alpha",),
    "geometric": ("q",),
    "poisson": ("lam",),
    "broken_power_law": ("alpha1", "alpha2", "b1", "b2", "d"),
}


def cmd_dist_build(args):
    names = FAMILY_ARGS[args.family]
    params = {}
    for name in names:
        value = getattr(args, name)
        if value is None:
            flag = "--lambda" if name == "lam" else f"--{name}"
            raise InvalidParameterError(f"family {args.family} needs {flag}")
        params[name] = value
    if "d" in params:
        params["d"] = int(params["d"])
    manifest = PipelineManifest("dist build", outputs=[args.out], params=params, force=args.force)
    manifest.check_outputs()
    dist = distributions.build(args.family, d_max=args.dmax, **params)
    if args.boost:
        dist = distributions.with_boosts(dist, _parse_boosts(args.boost))
    fileio.write_distribution(args.out, dist)
    _emit({"out": args.out, "d_max": dist.d_max, "mean_degree": repr(distributions.mean_degree(dist)), **_rate_line(dist)})


def cmd_dist_ingest(args):
    manifest = PipelineManifest("dist ingest", inputs=[args.histogram], outputs=[args.out], force=args.force)
    manifest.check_outputs()
    hist = fileio.read_histogram(args.histogram)
    dist = distributions.load_empirical(hist, args.dmax)
    fileio.write_distribution(args.out, dist)
    _emit({
        "out": args.out,
        "d_max": dist.d_max,
        "interpolated": len(dist.interpolated_degrees),
        "mean_degree": repr(distributions.mean_degree(dist)),
        **_rate_line(dist),
    })


def cmd_invert(args):
    manifest = PipelineManifest("invert", inputs=[args.distribution], outputs=[args.out], force=args.force)
    manifest.check_outputs()
    dist = fileio.read_distribution(args.distribution)
    f = inversion.invert(dist)
    rate = inversion.node_probability(dist)
    f = f.with_rate(rate.p)
    fileio.write_attachment(args.out, f, mean_degree=rate.mean_degree)
    _emit({"out": args.out, "d_max": f.d_max, "p": repr(rate.p), "mean_degree": repr(rate.mean_degree)})


def cmd_simulate(args):
    paths = fileio.output_paths(args.out_prefix)
    inputs = [args.attachment] + ([args.g0] if args.g0 else [])
    manifest = PipelineManifest(
        "simulate", inputs=inputs, outputs=list(paths.values()),
        params={"steps": args.steps, "seed": args.seed}, force=args.force,
    )
    manifest.check_outputs()
    f = fileio.read_attachment(args.attachment, require_rate=True)
    g0 = fileio.read_edges(args.g0).tolist() if args.g0 else None
    config = simulator.SimulationConfig(
        p=f.p, steps=args.steps, seed=args.seed,
        self_loop_policy=args.self_loops, resample_limit=args.resample_limit, g0=g0,
    )
    graph = simulator.run(f, config)
    fileio.write_edges(paths["edges"], graph.edges)
    fileio.write_histogram(paths["histogram"], graph.degree_counts)
    summary = {
        "nodes": graph.node_count,
        "edges": graph.edge_count,
        "forced_node_events": graph.forced_node_events,
        "self_loops": graph.self_loops,
        "seed": args.seed,
        "steps": args.steps,
        "p": repr(f.p),
        "wall_time": f"{graph.wall_time:.3f}",
    }
    fileio.write_report(paths["summary"], summary)
    _emit(summary)


def _parse_range(text):
    lo, sep, hi = text.partition(":")
    if not sep:
        raise CliError(f"bad --fit-range {text!r}; expected lo:hi")
    return int(lo), int(hi)


def cmd_analyze(args):
    outputs = [p for p in (args.csv, args.report) if p]
    manifest = PipelineManifest("analyze", inputs=[args.target, args.realized], outputs=outputs, force=args.force)
    manifest.check_outputs()
    target = fileio.read_distribution(args.target)
    hist = fileio.read_histogram(args.realized)
    counts = np.zeros(max(hist.counts) + 1)
    for d, c in hist.counts.items():
        counts[d] = c
    realized = analysis.empirical_dd_from_counts(counts)
    cmp = analysis.compare(target, realized)
    report = {
        "tv_distance": repr(cmp.tv_distance),
        "max_pointwise_log_ratio": repr(cmp.max_pointwise_log_ratio),
        "support_mismatch": repr(cmp.support_mismatch),
        "realized_mean_degree": repr(distributions.mean_degree(realized)),
        "zero_mass_degrees": len(analysis.zero_mass_degrees(realized)),
    }
    if args.threshold is not None:
        report["tv_threshold"] = args.threshold
        report["tv_pass"] = str(cmp.tv_distance < args.threshold).lower()
    if args.fit_range:
        lo, hi = _parse_range(args.fit_range)
        fit = analysis.fit_tail_slope(realized, lo, hi)
        report.update({"fit_lo": fit.fit_range[0], "fit_hi": fit.fit_range[1], "ccdf_slope": repr(fit.slope), "r_squared": repr(fit.r_squared)})
    if args.spikes:
        spikes = [int(s) for s in args.spikes.split(",")]
        for r in analysis.spike_fidelity(target, realized, spikes, args.window):
            report[f"spike_{r.degree}_ratio_of_ratios"] = repr(r.ratio_of_ratios)
            report[f"spike_{r.degree}_flagged"] = str(r.flagged).lower()
    if args.csv:
        fileio.write_lines(args.csv, analysis.csv_rows(realized))
    if args.report:
        fileio.write_report(args.report, report)
    _emit(report)


def cmd_roundtrip(args):
    dist = fileio.read_distribution(args.distribution)
    back = inversion.forward(inversion.invert(dist))
    n = max(back.d_max, dist.d_max)
    a = np.zeros(n)
    b = np.zeros(n)
    a[: dist.d_max] = dist.pmf
    b[: back.d_max] = back.pmf
    err = float(np.max(np.abs(a - b)))
    ok = err < ROUNDTRIP_TOL
    _emit({"max_abs_error": repr(err), "tolerance": ROUNDTRIP_TOL, "result": "pass" if ok else "fail"})
    if not ok:
        raise CliError(f"round trip deviates by {err:.3g} (tolerance {ROUNDTRIP_TOL:g})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ddgrowth", description="Random growth graphs with a prescribed degree distribution.")
    sub = parser.add_subparsers(dest="command", required=True)

    dist = sub.add_parser("dist", help="build or ingest a target distribution")
    dsub = dist.add_subparsers(dest="dist_command", required=True)

    b = dsub.add_parser("build", help="closed-form family")
    b.add_argument("--family", required=True, choices=sorted(FAMILY_ARGS))
    b.add_argument("--alpha", type=float)
    b.add_argument("--b", type=float)
    b.add_argument("--q", type=float)
    b.add_argument("--lambda", dest="lam", type=float)
    b.add_argument("--alpha1", type=float)
    b.add_argument("--alpha2", type=float)
    b.add_argument("--b1", type=float)
    b.add_argument("--b2", type=float)
    b.add_argument("--d", type=float)
    b.add_argument("--dmax", type=int, default=distributions.DEFAULT_D_MAX)
    b.add_argument("--boost", help="multiply masses, e.g. 20:5,2000:5")
    b.add_argument("--out", required=True)
    b.add_argument("--force", action="store_true")
    b.set_defaults(func=cmd_dist_build)

    g = dsub.add_parser("ingest", help="empirical histogram with gap interpolation")
    g.add_argument("histogram")
    g.add_argument("--out", required=True)
    g.add_argument("--dmax", type=int)
    g.add_argument("--force", action="store_true")
    g.set_defaults(func=cmd_dist_ingest)

    inv = sub.add_parser("invert", help="distribution -> attachment function + p")
    inv.add_argument("distribution")
    inv.add_argument("--out", required=True)
    inv.add_argument("--force", action="store_true")
    inv.set_defaults(func=cmd_invert)

    s = sub.add_parser("simulate", help="grow a graph")
    s.add_argument("attachment")
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out-prefix", required=True)
    s.add_argument("--self-loops", choices=simulator.SELF_LOOP_POLICIES, default="resample")
    s.add_argument("--resample-limit", type=int, default=simulator.DEFAULT_RESAMPLE_LIMIT)
    s.add_argument("--g0", help="initial edge list, one 'u v' per line")
    s.add_argument("--force", action="store_true")
    s.set_defaults(func=cmd_simulate)

    a = sub.add_parser("analyze", help="compare a realized histogram with its target")
    a.add_argument("target")
    a.add_argument("realized")
    a.add_argument("--threshold", type=float, help="TV distance pass threshold")
    a.add_argument("--fit-range", help="CCDF fit degrees lo:hi")
    a.add_argument("--spikes", help="comma-separated spike degrees")
    a.add_argument("--window", type=int, default=analysis.DEFAULT_SPIKE_WINDOW)
    a.add_argument("--csv", help="write degree,pmf,ccdf rows of the realized distribution")
    a.add_argument("--report", help="also write the key=value report to this file")
    a.add_argument("--force", action="store_true")
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("roundtrip", help="check forward(invert(P)) == P")
    r.add_argument("distribution")
    r.set_defaults(func=cmd_roundtrip)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (GrowthModelError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
