"""
AMIF-MDS Analyzer - command-line tool
Subcommands: synth, analyze, mds, cluster, render, ari, recover, rerun
"""

import argparse
import logging
import sys

from src import __version__
from src.analysis_engine import ClusterAnalyzer
from src.config import default_n_jobs, load_config_file, resolve_options
from src.errors import AmifError, DataError
from src.pipeline import (
    AnalyzeOptions,
    ClusterOptions,
    MdsOptions,
    RenderOptions,
    SynthOptions,
    run_analyze,
    run_ari,
    run_cluster,
    run_from_manifest,
    run_mds,
    run_recover,
    run_render,
    run_synth,
)

S = argparse.SUPPRESS


def _bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in {"1", "true", "yes", "on"}:
        return True
    if lowered in {"0", "false", "no", "off"}:
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="amif-mds", description="AMIF dependence analysis of multivariate time series")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    # Option flags default to SUPPRESS so only explicit flags override the config file.
    p = sub.add_parser("synth", help="generate the parent/child synthetic benchmark")
    p.add_argument("--config", default=None)
    p.add_argument("--out-dir", dest="out_dir", default=S)
    p.add_argument("--len", dest="length", type=int, default=S)
    p.add_argument("--parents", type=int, default=S)
    p.add_argument("--alpha", type=float, default=S)
    p.add_argument("--seed", type=int, default=S)

    p = sub.add_parser("analyze", help="measure, transform, embed and cluster a series CSV")
    p.add_argument("input", nargs="?", default=S)
    p.add_argument("--config", default=None)
    p.add_argument("--out-dir", dest="out_dir", default=S)
    p.add_argument("--measure", choices=["amif", "macc", "maccoeff", "euclidean"], default=S)
    p.add_argument("--q", type=float, default=S)
    p.add_argument("--nf", type=int, default=S)
    p.add_argument("--k", type=int, default=S)
    p.add_argument("--distance-floor", dest="distance_floor", type=float, default=S)
    p.add_argument("--normalization", choices=["mean-frequency-count", "none"], default=S)
    p.add_argument("--transform", choices=["membership", "logarithmic"], default=S)
    p.add_argument("--epsilon", type=float, default=S)
    p.add_argument("--max-lag", dest="max_lag", type=int, default=S)
    p.add_argument("--mds-dim", dest="mds_dim", type=int, default=S)
    p.add_argument("--dbscan-eps", dest="dbscan_eps", type=float, default=S)
    p.add_argument("--dbscan-minpts", dest="dbscan_minpts", type=int, default=S)
    p.add_argument("--standardize", type=_bool, default=S)
    p.add_argument("--drop-incomplete", dest="drop_incomplete", type=_bool, default=S)
    p.add_argument("--sample-interval", dest="sample_interval", type=float, default=S)
    p.add_argument("--labels", default=S, help="ground-truth name,label CSV")
    p.add_argument("--svg", type=_bool, default=S)
    p.add_argument("--heatmap", type=_bool, default=S)
    p.add_argument("--jobs", dest="n_jobs", type=int, default=S)

    p = sub.add_parser("mds", help="embed a dissimilarity matrix CSV")
    p.add_argument("input", nargs="?", default=S)
    p.add_argument("--config", default=None)
    p.add_argument("-o", "--output", default=S)
    p.add_argument("--dim", type=int, default=S)

    p = sub.add_parser("cluster", help="DBSCAN an embedding CSV")
    p.add_argument("input", nargs="?", default=S)
    p.add_argument("--config", default=None)
    p.add_argument("-o", "--output", default=S)
    p.add_argument("--eps", type=float, default=S)
    p.add_argument("--min-pts", dest="min_pts", type=int, default=S)

    p = sub.add_parser("render", help="SVG scatter of an embedding CSV")
    p.add_argument("input", nargs="?", default=S)
    p.add_argument("--config", default=None)
    p.add_argument("-o", "--output", default=S)

    p = sub.add_parser("ari", help="adjusted Rand index of two partitions")
    p.add_argument("a")
    p.add_argument("b")

    p = sub.add_parser("recover", help="synthetic partner-recovery experiment")
    p.add_argument("--seeds", type=int, nargs="+", default=list(range(10)))
    p.add_argument("--len", dest="length", type=int, default=2048)
    p.add_argument("--parents", type=int, default=8)
    p.add_argument("--alpha", type=float, default=1e-3)
    p.add_argument("-o", "--output", default="recovery.csv")
    p.add_argument("--jobs", dest="n_jobs", type=int, default=None)

    p = sub.add_parser("rerun", help="repeat a run from its manifest")
    p.add_argument("manifest")
    p.add_argument("--out-dir", dest="out_dir", default=None)
    return parser


OPTIONS = {
    "synth": SynthOptions,
    "analyze": AnalyzeOptions,
    "mds": MdsOptions,
    "cluster": ClusterOptions,
    "render": RenderOptions,
}


def resolve(args: argparse.Namespace):
    flags = {k: v for k, v in vars(args).items() if k not in {"command", "config", "verbose"}}
    file_values = load_config_file(args.config) if args.config else {}
    if args.command == "analyze" and "n_jobs" not in flags and "n_jobs" not in file_values:
        flags["n_jobs"] = default_n_jobs()
    return resolve_options(OPTIONS[args.command], file_values, flags)


def _print_files(paths):
    for path in paths:
        print(f"   - {path}")


def run(args: argparse.Namespace) -> int:
    command = args.command

    if command == "synth":
        opts = resolve(args)
        print(f"🧪 Generating {opts.parents} parent/child families (T={opts.length}, seed={opts.seed})...")
        result = run_synth(opts)
        print(f"✅ Wrote {result['table'].n_series} series:")
        _print_files(result["paths"])

    elif command == "analyze":
        opts = resolve(args)
        print(f"📂 Loading {opts.input}")
        print(f"📊 Measure: {opts.measure}" + (f" (q={opts.q}, N_f={opts.nf}, k={opts.k})" if opts.measure == "amif" else ""))
        result = run_analyze(opts)
        table = result["table"]
        print(f"✅ {table.n_series} series x {table.length} samples analyzed")
        if result["clusters"] is not None:
            print("🔍 Clustering:")
            print(ClusterAnalyzer().generate_executive_summary(result["summary"]))
        elif "partner_recovery" in result["summary"]:
            print(f"🔍 Nearest-neighbor partner recovery: {result['summary']['partner_recovery']:.3f}")
        print("💾 Outputs:")
        _print_files(result["paths"])

    elif command in {"mds", "cluster", "render"}:
        opts = resolve(args)
        runner = {"mds": run_mds, "cluster": run_cluster, "render": run_render}[command]
        runner(opts)
        print(f"✅ {command}: {opts.input} -> {opts.output}")

    elif command == "ari":
        print(f"{run_ari(args.a, args.b):.6f}")

    elif command == "recover":
        n_jobs = args.n_jobs if args.n_jobs is not None else default_n_jobs()
        print(f"🧪 Partner recovery over {len(args.seeds)} seeds (T={args.length}, N_P={args.parents})...")
        frame = run_recover(args.seeds, args.output, args.length, args.parents, args.alpha, n_jobs=n_jobs)
        table = frame.groupby(["measure", "q", "nf", "transform"], dropna=False)["recovery"].mean()
        print(table.to_string())
        print(f"💾 {args.output}")

    elif command == "rerun":
        print(f"🔁 Re-running {args.manifest}")
        result = run_from_manifest(args.manifest, args.out_dir)
        _print_files(result.get("paths", []))
        print("✅ Done")

    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(message)s",
    )
    try:
        return run(args)
    except AmifError as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        return DataError.exit_code


if __name__ == "__main__":
    sys.exit(main())
