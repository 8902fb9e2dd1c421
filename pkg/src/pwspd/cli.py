"""Command-line interface: dist, kernel, spanner-heatmap, chi, cluster-sweep,
gen-data.

Every output artifact embeds its resolved configuration (subcommand, flags,
seed) in a '#'-comment header (CSV) or a "config" object (JSON), so results
are re-derivable from their own header. --threads and --out are execution
details and deliberately excluded: outputs are byte-identical across thread
counts. Exit codes: 0 success, 1 usage error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import __version__, _engine
from .core import (
    complete_graph,
    dumps_json,
    load_point_cloud,
    pairwise_euclidean,
    FLOAT_FMT,
)
from .experiments import (
    DatasetSpec,
    DESK_CHI_N_GRID,
    estimate_chi,
    gen_dataset,
)
from .kernels import (
    diffusion_kernel,
    epsilon_percentile,
    gaussian_kernel,
    self_tuning_kernel,
)
from .neighbors import knn_graph
from .paths import PwspdQueryConfig, pwspd_all_pairs
from .spanner import DESK_N_GRID, default_k_grid, spanner_heatmap
from .spectral import accuracy_vs_p_sweep, spectral_embedding

log = logging.getLogger("pwspd")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


class UsageError(RuntimeError):
    """Post-parse usage problem, mapped to exit code 1."""


def _int_list(text):
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated ints, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty grid")
    return vals


def _p_grid(text):
    """Grid syntax: 'start:step:stop' (inclusive) or comma list."""
    if ":" in text:
        try:
            start, step, stop = (float(v) for v in text.split(":"))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad range {text!r}; want start:step:stop")
        if step <= 0 or stop < start:
            raise argparse.ArgumentTypeError(f"bad range {text!r}")
        count = int(round((stop - start) / step))
        vals = [start + i * step for i in range(count + 1)]
        if vals[-1] > stop + 1e-9:
            vals.pop()
        return vals
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected floats, got {text!r}")


def _header(sub, args, **extra):
    cfg = {"version": __version__, "subcommand": sub, "seed": args.seed}
    skip = {"out", "threads", "func", "seed", "verbose", "embedding_out"}
    for key, val in sorted(vars(args).items()):
        if key in skip or val is None or callable(val):
            continue
        cfg[key.replace("_", "-")] = val
    cfg.update(extra)
    return cfg


def _emit_text(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _matrix_csv(values, cfg):
    lines = [f"# pwspd {json.dumps(cfg, sort_keys=True)}"]
    for row in np.atleast_2d(values):
        lines.append(",".join(FLOAT_FMT % v for v in row))
    return "\n".join(lines) + "\n"


def _load_cloud(path, intrinsic_dim=None, labeled=False):
    """Load a CSV cloud; a pwspd header marks label columns automatically."""
    try:
        with open(path) as fh:
            first = fh.readline()
        if first.startswith("# pwspd "):
            meta = json.loads(first[len("# pwspd "):])
            labeled = labeled or bool(meta.get("labels"))
    except OSError:
        pass
    return load_point_cloud(path, intrinsic_dim=intrinsic_dim, labeled=labeled)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_gen_data(args):
    spec = DatasetSpec(name=args.name, seed=args.seed)
    cloud = gen_dataset(spec)
    cfg = _header("gen-data", args, labels=True, n=cloud.n)
    lines = [f"# pwspd {json.dumps(cfg, sort_keys=True)}"]
    for i in range(cloud.n):
        coords = ",".join(FLOAT_FMT % v for v in cloud.points[i])
        lines.append(f"{coords},{cloud.labels[i]}")
    _emit_text("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_dist(args):
    if (args.k is None) == (not args.complete):
        raise UsageError("exactly one of --k or --complete is required")
    cloud = _load_cloud(args.input, intrinsic_dim=args.d, labeled=args.labeled)
    if args.complete:
        graph = complete_graph(cloud)
    else:
        graph = knn_graph(cloud, args.k)
    cfg_q = PwspdQueryConfig(
        p=args.p, graph=graph, normalize=args.normalize,
        d=cloud.intrinsic_dim if args.normalize else None,
        allow_nonmetric=args.allow_nonmetric,
    )
    dm = pwspd_all_pairs(cfg_q)
    cfg = _header("dist", args, n=cloud.n)
    if args.format == "json":
        _emit_text(dumps_json({"config": cfg, "summary": dm.summary()}), args.out)
    else:
        _emit_text(_matrix_csv(dm.values, cfg), args.out)
    return 0


def _cmd_kernel(args):
    cloud = _load_cloud(args.input, labeled=args.labeled)
    if args.kind == "gaussian":
        dm = pairwise_euclidean(cloud)
        km = gaussian_kernel(dm, epsilon_percentile(dm, args.epsilon_percentile), a=args.a)
    elif args.kind == "self-tuning":
        km = self_tuning_kernel(cloud, args.k)
    elif args.kind == "diffusion":
        dm = pairwise_euclidean(cloud)
        km = diffusion_kernel(cloud, epsilon_percentile(dm, args.epsilon_percentile), args.alpha)
    else:  # pwspd-gaussian
        cfg_q = PwspdQueryConfig(p=args.p, graph=complete_graph(cloud))
        dm = pwspd_all_pairs(cfg_q)
        km = gaussian_kernel(dm, epsilon_percentile(dm, args.epsilon_percentile), a=args.a)
    cfg = _header("kernel", args, n=cloud.n)
    _emit_text(_matrix_csv(km.values, cfg), args.out)
    return 0


def _cmd_spanner_heatmap(args):
    k_grid = args.k_grid or default_k_grid(args.d, args.p, max(args.n_grid))
    result = spanner_heatmap(
        d=args.d, p=args.p, distribution=args.dist,
        n_grid=args.n_grid, k_grid=k_grid,
        trials=args.trials, seed=args.seed, tol=args.tol,
    )
    cfg = _header("spanner-heatmap", args, k_grid=k_grid)
    _emit_text(dumps_json({"config": cfg, "result": result.to_dict()}), args.out)
    return 0


def _cmd_chi(args):
    est = estimate_chi(
        d=args.d, p=args.p, n_grid=args.n_grid,
        trials_per_n=args.trials, seed=args.seed,
    )
    cfg = _header("chi", args)
    _emit_text(dumps_json({"config": cfg, "result": est.to_dict()}), args.out)
    return 0


def _cmd_cluster_sweep(args):
    if args.dataset in ("two-rings", "long-bottleneck", "short-bottleneck"):
        cloud = gen_dataset(DatasetSpec(name=args.dataset, seed=args.seed))
    else:
        cloud = _load_cloud(args.dataset, labeled=True)
    sweep = accuracy_vs_p_sweep(
        cloud, args.p_grid, seed=args.seed, laplacian_kind=args.laplacian,
        percentile=args.epsilon_percentile,
    )
    cfg = _header("cluster-sweep", args, n=cloud.n)
    lines = [f"# pwspd {json.dumps(cfg, sort_keys=True)}", "p,accuracy"]
    for p, acc in sweep:
        lines.append(f"{FLOAT_FMT % p},{FLOAT_FMT % acc}")
    _emit_text("\n".join(lines) + "\n", args.out)
    if args.embedding_out:
        from .spectral import _path_metric

        dm = _path_metric(cloud, float(args.embedding_p))
        km = gaussian_kernel(dm, epsilon_percentile(dm, args.epsilon_percentile))
        emb = spectral_embedding(km, K=3, kind=args.laplacian)
        coords = emb.vectors[:, 1:3]
        _emit_text(_matrix_csv(coords, {**cfg, "embedding-p": args.embedding_p}),
                   args.embedding_out)
    return 0


def build_parser() -> _Parser:
    root = _Parser(prog="pwspd", description=__doc__)
    root.add_argument("--version", action="version", version=f"pwspd {__version__}")
    sub = root.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="master RNG seed")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--threads", type=int,
                       default=int(os.environ.get("PWSPD_THREADS", "1")),
                       help="worker cap (never changes results)")
        p.add_argument("--verbose", action="store_true", help="progress on stderr")

    p = sub.add_parser("gen-data", help="generate a labeled benchmark dataset")
    p.add_argument("--name", required=True,
                   choices=["two-rings", "long-bottleneck", "short-bottleneck"])
    common(p)
    p.set_defaults(func=_cmd_gen_data)

    p = sub.add_parser("dist", help="all-pairs path distance matrix")
    p.add_argument("--input", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--k", type=int, default=None, help="kNN graph size")
    p.add_argument("--complete", action="store_true", help="use the complete graph")
    p.add_argument("--normalize", action="store_true",
                   help="apply the n^((p-1)/(p d)) factor")
    p.add_argument("--d", type=int, default=None, help="intrinsic dimension")
    p.add_argument("--labeled", action="store_true",
                   help="input has a trailing label column")
    p.add_argument("--allow-nonmetric", action="store_true",
                   help="accept 0 < p < 1")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    common(p)
    p.set_defaults(func=_cmd_dist)

    p = sub.add_parser("kernel", help="affinity matrix construction")
    p.add_argument("--input", required=True)
    p.add_argument("--kind", required=True,
                   choices=["gaussian", "self-tuning", "diffusion", "pwspd-gaussian"])
    p.add_argument("--epsilon-percentile", type=float, default=15.0)
    p.add_argument("--k", type=int, default=10, help="self-tuning neighbor index")
    p.add_argument("--alpha", type=float, default=1.0, help="diffusion exponent")
    p.add_argument("--a", type=float, default=1.0, help="kernel shape exponent")
    p.add_argument("--p", type=float, default=2.0, help="path-metric power")
    p.add_argument("--labeled", action="store_true")
    common(p)
    p.set_defaults(func=_cmd_kernel)

    p = sub.add_parser("spanner-heatmap", help="1-spanner success fractions")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--dist", default="uniform-cube",
                   choices=["uniform-cube", "sphere", "gaussian"])
    p.add_argument("--n-grid", type=_int_list, default=list(DESK_N_GRID))
    p.add_argument("--k-grid", type=_int_list, default=None)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--tol", type=float, default=1e-10)
    common(p)
    p.set_defaults(func=_cmd_spanner_heatmap)

    p = sub.add_parser("chi", help="fluctuation-exponent estimation")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--n-grid", type=_int_list, default=list(DESK_CHI_N_GRID))
    p.add_argument("--trials", type=int, default=500)
    common(p)
    p.set_defaults(func=_cmd_chi)

    p = sub.add_parser("cluster-sweep", help="clustering accuracy vs p")
    p.add_argument("--dataset", required=True,
                   help="two-rings|long-bottleneck|short-bottleneck|file.csv")
    p.add_argument("--p-grid", type=_p_grid, default=_p_grid("1:0.5:8"))
    p.add_argument("--laplacian", default="symmetric",
                   choices=["unnormalized", "random-walk", "symmetric"])
    p.add_argument("--epsilon-percentile", type=float, default=15.0)
    p.add_argument("--embedding-out", default=None,
                   help="also write phi_2, phi_3 coordinates for --embedding-p")
    p.add_argument("--embedding-p", type=float, default=2.0)
    common(p)
    p.set_defaults(func=_cmd_cluster_sweep)
    return root


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    _engine.set_threads(getattr(args, "threads", 1))
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"pwspd: error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"pwspd: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
