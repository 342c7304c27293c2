"""Command-line surface: generate, cluster, verify, experiment.

Exit codes: 0 success, 2 invalid configuration or flags, 3 I/O failure
(missing or undecodable files), 4 a verification gate failed. All output
files are byte-deterministic for fixed flags and seed.

Environment: FLATCLUSTER_BACKEND selects the projection kernel
("numba" or "numpy"); FLATCLUSTER_THREADS limits kernel parallelism
(0 = auto). Neither affects results, only speed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .clustering import ClusterParams, cluster, cluster_recursive, cluster_sampled
from .dataio import (
    write_dataset,
    read_dataset,
    write_midpoints_csv,
    write_result,
    write_verification_records,
)
from .errors import DataFormatError, FlatClusterError, InvalidInputError
from .geometry import drop_trivial_coordinates
from .generator import GenConfig, generate_dataset
from .mc_lab import (
    Z99,
    disk_intersection_probability,
    estimate_rejection_fraction,
    estimate_S0,
    estimate_S1,
    midpoint_concentration,
    midpoint_reach_bound,
    paired_delta_distances,
    separation_ratio,
    tangent_pair_reach,
)
from .pairwise import all_pairs

_CHECKS = ("S0", "S1", "Sdelta", "reject", "concentration", "disk",
           "tangent", "reach", "ratio")

_DEFAULT_SAMPLES = {
    "S0": 10_000, "S1": 10_000, "Sdelta": 10_000, "reject": 10_000,
    "concentration": 20, "disk": 100_000, "tangent": 100_000,
    "reach": 10_000, "ratio": 10_000,
}


def _parse_centers(text: str, d: int) -> np.ndarray:
    """Either "two-ball:<sep>" (centers at -sep/2 and +sep/2 on the first
    axis) or semicolon-separated comma vectors."""
    if text.startswith("two-ball:"):
        sep = float(text.split(":", 1)[1])
        if not sep > 0:
            raise InvalidInputError("two-ball separation must be positive")
        centers = np.zeros((2, d))
        centers[0, 0] = -sep / 2.0
        centers[1, 0] = +sep / 2.0
        return centers
    rows = [part for part in text.split(";") if part.strip()]
    if not rows:
        raise InvalidInputError("no centers given")
    try:
        vecs = [[float(x) for x in row.split(",")] for row in rows]
    except ValueError as exc:
        raise InvalidInputError(f"bad center coordinate: {exc}") from exc
    if any(len(vec) != d for vec in vecs):
        raise InvalidInputError(f"each center needs exactly d={d} coordinates")
    return np.asarray(vecs, dtype=np.float64)


def _cmd_generate(args) -> int:
    centers = _parse_centers(args.centers, args.d)
    config = GenConfig(
        d=args.d, k=args.k, centers=centers, per_cluster=args.per_cluster,
        sigma=args.sigma, mu=args.mu, radius=args.radius, seed=args.seed,
    )
    dataset = generate_dataset(config)
    metadata = {
        "seed": config.seed,
        "sigma": config.sigma,
        "centers": config.centers,
        "delta": config.delta,
        "per_cluster": config.per_cluster,
        "radius": config.radius,
    }
    write_dataset(args.out, dataset.flats,
                  [int(x) for x in dataset.true_labels], metadata)
    print(f"wrote {config.n_flats} flats (d={config.d}, k={config.k}, "
          f"{config.num_clusters} clusters) to {args.out}")
    return 0


def _cmd_cluster(args) -> int:
    if args.mode == "sampled":
        if args.sample_size is None:
            raise InvalidInputError("--mode sampled requires --sample-size")
    elif args.sample_size is not None:
        raise InvalidInputError("--sample-size only applies to --mode sampled")
    if args.num_clusters is not None and args.mode != "recursive":
        raise InvalidInputError("--num-clusters only applies to --mode recursive")
    flats, _labels, _meta = read_dataset(args.infile)
    if args.drop_trivial:
        d_before = flats[0].d
        flats, kept = drop_trivial_coordinates(flats)
        print(f"kept {kept.size} of {d_before} coordinates after dropping "
              f"trivial ones", file=sys.stderr)
    params = ClusterParams(
        accept_threshold=args.threshold,
        link_threshold=args.threshold,
        min_cluster_size=args.min_size,
        ball_radius=args.radius,
    )
    d = flats[0].d
    pairs = None
    if args.midpoints is not None or args.mode == "plain":
        pairs = all_pairs(flats)
    if args.mode == "plain":
        result = cluster(flats, params, pairs=pairs)
    elif args.mode == "recursive":
        result = cluster_recursive(flats, params, num_clusters=args.num_clusters)
    else:
        result = cluster_sampled(flats, params, args.sample_size, args.seed)
    csv_ref = None
    if args.midpoints is not None:
        write_midpoints_csv(args.midpoints, pairs, params.accept_threshold, d)
        csv_ref = args.midpoints
    parameters = {
        "input": args.infile,
        "mode": args.mode,
        "accept_threshold": params.accept_threshold,
        "link_threshold": params.link_threshold,
        "min_cluster_size": params.min_cluster_size,
        "ball_radius": params.ball_radius,
        "sample_size": args.sample_size,
        "num_clusters": args.num_clusters,
        "seed": args.seed,
        "drop_trivial": bool(args.drop_trivial),
    }
    write_result(args.out, result, parameters, len(flats), csv_ref)
    sizes = [len(c.members) for c in result.clusters]
    print(f"{len(result.clusters)} clusters (member counts {sizes}), "
          f"{result.accepted_pairs} accepted / {result.rejected_pairs} rejected pairs, "
          f"{len(result.unassigned)} unassigned; result in {args.out}")
    return 0


def _record(label: str, value: float, stderr: float, gate: str, ok: bool) -> dict:
    lo = value - Z99 * stderr
    hi = value + Z99 * stderr
    return {"label": label, "value": float(value), "stderr": float(stderr),
            "ci99": [lo, hi], "gate": gate, "pass": bool(ok)}


def _check_S0(a) -> list[dict]:
    est = estimate_S0(a.d, a.k, a.sigma, a.samples, a.seed)
    ok = est.ci99[0] > 0.0
    return [_record(f"S0[d={a.d},k={a.k}]", est.value, est.stderr,
                    "99% CI excludes 0", ok)]


def _check_S1(a) -> list[dict]:
    est = estimate_S1(a.d, a.k, a.sigma, a.samples, a.seed)
    ok = est.ci99[1] < 2.0
    return [_record(f"S1[d={a.d},k={a.k}]", est.value, est.stderr,
                    "99% CI upper bound < 2", ok)]


def _check_Sdelta(a) -> list[dict]:
    dist_d, dist_1 = paired_delta_distances(a.delta, a.d, a.k, a.sigma,
                                            a.samples, a.seed)
    scaled = a.delta * dist_1
    rel = np.max(np.abs(dist_d - scaled) / np.maximum(scaled, 1e-300))
    n = dist_d.size
    ok = rel <= 1e-10
    return [_record(
        f"S_delta[delta={a.delta:g},d={a.d},k={a.k}]",
        float(dist_d.mean()), float(dist_d.std(ddof=1) / np.sqrt(n)),
        f"gap at offset delta is delta x unit gap, pointwise "
        f"(max rel dev {rel:.3g} <= 1e-10)", ok)]


def _check_reject(a) -> list[dict]:
    drop = estimate_rejection_fraction(a.delta, a.d, a.k, a.sigma,
                                       a.samples, a.seed)
    s1 = estimate_S1(a.d, a.k, a.sigma, a.samples, a.seed + 1)
    series = 1.0 + 1.0 / a.delta + 1.0 / a.delta**2
    bound = 1.0 - (1.0 - s1.value / 2.0) * series
    se = float(np.hypot(drop.stderr, (series / 2.0) * s1.stderr))
    ok = drop.value >= bound - 3.0 * se
    return [_record(
        f"rejection[delta={a.delta:g},d={a.d},k={a.k}]",
        drop.value, drop.stderr,
        f"drop rate >= 1-(1-S1/2)(1+1/D+1/D^2) - 3 stderr = {bound - 3 * se:.6f}",
        ok)]


def _check_concentration(a) -> list[dict]:
    rep = midpoint_concentration(a.d, a.k, a.sigma, a.n_flats, a.samples, a.seed)
    offs = rep.per_rep_mean_offsets
    se = float(offs.std(ddof=1) / np.sqrt(offs.size)) if offs.size > 1 else 0.0
    ok = rep.mean_offset <= 0.3
    return [_record(
        f"concentration[d={a.d},k={a.k},n={a.n_flats}]",
        rep.mean_offset, se,
        "mean midpoint offset <= 0.3 (trace of covariance reported via "
        f"experiment; here {rep.variance:.4g}, per-coord {rep.variance_per_coord:.4g})",
        ok)]


def _check_disk(a) -> list[dict]:
    est = disk_intersection_probability(a.samples, a.seed)
    tol = max(0.01, 3.0 * est.stderr)
    ok = abs(est.value - 0.5) <= tol
    return [_record("disk_intersection", est.value, est.stderr,
                    "within max(0.01, 3 stderr) of 1/2", ok)]


def _check_tangent(a) -> list[dict]:
    est = tangent_pair_reach(a.samples, a.seed, a.r0)
    expected = 1.0 - 2.0 * np.arcsin(1.0 / a.r0) / np.pi
    tol = max(0.01, 3.0 * est.stderr)
    ok = abs(est.value - expected) <= tol
    return [_record(f"tangent_reach[r0={a.r0:g}]", est.value, est.stderr,
                    f"within max(0.01, 3 stderr) of {expected:.6f}", ok)]


def _check_reach(a) -> list[dict]:
    dims = (4, 10, 30, 90)
    ests = {}
    records = []
    for d in dims:
        k = max(1, d // 3)
        est = midpoint_reach_bound(d, k, a.sigma, a.samples, a.seed, a.r0)
        ests[d] = est
        records.append(_record(f"midpoint_reach[d={d},k={k},r0={a.r0:g}]",
                               est.value, est.stderr, "informational", True))
    lo, hi = ests[dims[0]], ests[dims[-1]]
    se = float(np.hypot(lo.stderr, hi.stderr))
    ok = hi.value >= lo.value - 3.0 * se
    records.append(_record(
        f"midpoint_reach_trend[r0={a.r0:g}]", hi.value - lo.value, se,
        f"P(d={dims[-1]}) >= P(d={dims[0]}) - 3 stderr", ok))
    return records


def _check_ratio(a) -> list[dict]:
    est = separation_ratio(a.delta, a.d, a.k, a.sigma, a.samples, a.seed,
                           eps=a.eps)
    ok = est.ci99[0] > 0.5
    return [_record(
        f"separation_ratio[delta={a.delta:g},eps={a.eps:g},d={a.d},k={a.k}]",
        est.value, est.stderr,
        f"99% CI lower bound > 1/2 for Pr(ratio >= {a.delta - a.eps:g})", ok)]


_CHECK_FNS = {
    "S0": _check_S0, "S1": _check_S1, "Sdelta": _check_Sdelta,
    "reject": _check_reject, "concentration": _check_concentration,
    "disk": _check_disk, "tangent": _check_tangent, "reach": _check_reach,
    "ratio": _check_ratio,
}


def _cmd_verify(args) -> int:
    names = list(_CHECKS) if args.check == "all" else [args.check]
    records = []
    for name in names:
        a = argparse.Namespace(**vars(args))
        if args.samples is None:
            a.samples = _DEFAULT_SAMPLES[name]
        records.extend(_CHECK_FNS[name](a))
    for rec in records:
        verdict = "PASS" if rec["pass"] else "FAIL"
        if rec["gate"] == "informational":
            verdict = "INFO"
        print(f"{rec['label']}: value={rec['value']:.6g} "
              f"stderr={rec['stderr']:.3g} "
              f"ci99=[{rec['ci99'][0]:.6g}, {rec['ci99'][1]:.6g}] "
              f"gate: {rec['gate']} -> {verdict}")
    if args.records is not None:
        write_verification_records(args.records, records)
    failed = [r for r in records if not r["pass"]]
    if failed:
        print(f"{len(failed)} check(s) FAILED", file=sys.stderr)
        return 4
    return 0


def _within_cluster_variance(result) -> tuple[float, float, int]:
    """Mean over clusters of the midpoint covariance trace, plus the
    per-coordinate version (trace / d)."""
    traces = []
    d = None
    for c in result.clusters:
        if c.midpoints.shape[0] < 2:
            continue
        d = c.midpoints.shape[1]
        traces.append(float(c.midpoints.var(axis=0, ddof=1).sum()))
    if not traces or d is None:
        return float("nan"), float("nan"), 0
    trace = float(np.mean(traces))
    return trace, trace / d, len(traces)


def _cmd_experiment(args) -> int:
    dims = [int(tok) for tok in args.dims.split(",") if tok.strip()]
    if not dims:
        raise InvalidInputError("no dimensions given")
    os.makedirs(args.out_dir, exist_ok=True)
    rows = []
    for d in dims:
        if d < 3:
            raise InvalidInputError(f"d={d} too small; need d >= 3 for k = d/3")
        k = d // 3
        if d % 3 != 0:
            print(f"warning: d={d} not divisible by 3, using k={k}",
                  file=sys.stderr)
        config = GenConfig(
            d=d, k=k, centers=_parse_centers("two-ball:200", d),
            per_cluster=args.per_cluster, sigma=args.sigma, seed=args.seed,
        )
        dataset = generate_dataset(config)
        pairs = all_pairs(dataset.flats)
        params = ClusterParams(min_cluster_size=args.per_cluster)
        result = cluster(dataset.flats, params, pairs=pairs)
        csv_path = os.path.join(args.out_dir, f"midpoints_d{d}.csv")
        write_midpoints_csv(csv_path, pairs, params.accept_threshold, d)
        var_trace, var_coord, used = _within_cluster_variance(result)
        rows.append({
            "d": d,
            "k": k,
            "n_flats": config.n_flats,
            "accepted_pairs": result.accepted_pairs,
            "rejected_pairs": result.rejected_pairs,
            "num_clusters": len(result.clusters),
            "cluster_sizes": [len(c.members) for c in result.clusters],
            "cluster_centers": [[float(v) for v in c.center] for c in result.clusters],
            "variance_trace": var_trace,
            "variance_per_coord": var_coord,
            "clusters_in_variance": used,
            "midpoints_csv": csv_path,
        })
        print(f"d={d} k={k}: accepted={result.accepted_pairs} "
              f"rejected={result.rejected_pairs} "
              f"clusters={[len(c.members) for c in result.clusters]} "
              f"variance_trace={var_trace:.6g} variance_per_coord={var_coord:.6g}")
    summary = {
        "format_version": 1,
        "seed": args.seed,
        "per_cluster": args.per_cluster,
        "sigma": args.sigma,
        "rows": rows,
    }
    path = os.path.join(args.out_dir, "summary.json")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(summary, fh, ensure_ascii=False, indent=1)
        fh.write("\n")
    print(f"summary in {path}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flatcluster",
        description="Cluster affine flats by pairwise midpoints, generate "
                    "synthetic flat datasets, and verify the distance "
                    "statistics behind the method.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic labeled dataset")
    g.add_argument("--d", type=int, required=True, help="ambient dimension")
    g.add_argument("--k", type=int, required=True, help="flat dimension")
    g.add_argument("--centers", required=True,
                   help='"two-ball:<sep>" or "x1,x2,...;y1,y2,..."')
    g.add_argument("--per-cluster", type=int, required=True,
                   help="flats per cluster")
    g.add_argument("--sigma", type=float, default=1.0)
    g.add_argument("--mu", type=float, default=0.0,
                   help="coefficient mean (only 0 supported)")
    g.add_argument("--radius", type=float, default=1.0, help="ball radius")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help="output dataset path")
    g.set_defaults(func=_cmd_generate)

    c = sub.add_parser("cluster", help="cluster a dataset file")
    c.add_argument("--in", dest="infile", required=True, help="dataset path")
    c.add_argument("--threshold", type=float, default=None,
                   help="accept/link distance threshold (default 2*radius)")
    c.add_argument("--min-size", type=int, default=1,
                   help="prune clusters unless midpoint count > this")
    c.add_argument("--mode", choices=("plain", "recursive", "sampled"),
                   default="plain")
    c.add_argument("--sample-size", type=int, default=None,
                   help="subset size for --mode sampled")
    c.add_argument("--num-clusters", type=int, default=None,
                   help="known cluster count for --mode recursive")
    c.add_argument("--seed", type=int, default=0,
                   help="sampling seed for --mode sampled")
    c.add_argument("--radius", type=float, default=1.0, help="ball radius")
    c.add_argument("--drop-trivial", action="store_true",
                   help="drop coordinates spanned by every flat first")
    c.add_argument("--out", required=True, help="result JSON path")
    c.add_argument("--midpoints", default=None, help="per-pair CSV dump path")
    c.set_defaults(func=_cmd_cluster)

    v = sub.add_parser("verify", help="run Monte Carlo verification checks")
    v.add_argument("--check", choices=_CHECKS + ("all",), required=True)
    v.add_argument("--d", type=int, default=30)
    v.add_argument("--k", type=int, default=10)
    v.add_argument("--delta", type=float, default=10.0)
    v.add_argument("--samples", type=int, default=None,
                   help="sample count (per-check default if omitted)")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--sigma", type=float, default=1.0)
    v.add_argument("--eps", type=float, default=1.0,
                   help="slack in the separation-ratio gate")
    v.add_argument("--r0", type=float, default=2.0,
                   help="radius bound for tangent/reach checks")
    v.add_argument("--n-flats", type=int, default=30,
                   help="flats per repetition for the concentration check")
    v.add_argument("--records", default=None,
                   help="write one JSON record per check to this path")
    v.set_defaults(func=_cmd_verify)

    e = sub.add_parser("experiment",
                       help="reproduce the two-ball sweep across dimensions")
    e.add_argument("--dims", default="9,30,60,90",
                   help="comma-separated ambient dimensions")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--per-cluster", type=int, default=10)
    e.add_argument("--sigma", type=float, default=1.0)
    e.add_argument("--out-dir", default=".")
    e.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (OSError, DataFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FlatClusterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
