"""Command-line entry point: ``mpgrad {compute,distance,landscape,optimize}``.

Exit codes: 0 success, 1 usage or configuration error, 2 data or invariant
error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

log = logging.getLogger("mpgrad")

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mpgrad", description="Multiparameter persistence descriptors, distances and optimization.")
    p.add_argument("--threads", type=int, default=None, help="cap on numeric library threads (default: all cores)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compute", help="descriptor of a filtered complex")
    c.add_argument("--complex", required=True)
    c.add_argument("--filtration", required=True)
    c.add_argument("--degree", type=int, default=0)
    c.add_argument("--descriptor", choices=["hilbert", "rank", "landscape"], default="hilbert")
    c.add_argument("--n", type=int, default=None, help="expected number of parameters")
    c.add_argument("--k", type=int, default=1, help="landscape level")
    c.add_argument("--points", help="landscape sample points (CSV)")
    c.add_argument("--out", default=None, help="output CSV (default: stdout)")

    d = sub.add_parser("distance", help="optimal transport distance between two measure files")
    d.add_argument("first")
    d.add_argument("second")
    d.add_argument("--ground", choices=["rn", "bars"], default=None)
    d.add_argument("--out", default=None, help="write the optimal assignment as CSV")

    ls = sub.add_parser("landscape", help="evaluate a landscape at given points")
    ls.add_argument("--complex", required=True)
    ls.add_argument("--filtration", required=True)
    ls.add_argument("--degree", type=int, default=0)
    ls.add_argument("--n", type=int, default=None)
    ls.add_argument("--k", type=int, default=1)
    g = ls.add_mutually_exclusive_group(required=True)
    g.add_argument("--points", help="CSV of sample points")
    g.add_argument("--z", action="append", help="one sample point as comma-separated reals")
    ls.add_argument("--out", default=None)

    o = sub.add_parser("optimize", help="run a point-cloud optimization from a JSON config")
    o.add_argument("--config", required=True)
    o.add_argument("--loss", default=None, help="loss JSON (literal or file) overriding the config")
    o.add_argument("--seed", type=int, default=None)
    o.add_argument("--epochs", type=int, default=None)
    o.add_argument("--out", required=True, help="trajectory directory")
    return p


def _check_degree(k: int):
    from .errors import ConfigError
    if k < 0:
        raise ConfigError("degree must be nonnegative")


def _load_filtration(args):
    from .io import read_complex, read_filtration
    for path in (args.complex, args.filtration):
        if not Path(path).exists():
            raise FileNotFoundError(path)
    K, order = read_complex(args.complex)
    return read_filtration(args.filtration, K, order, args.n)


def _fmt(x) -> str:
    return repr(float(x))


def _landscape_rows(f, degree, k, Z):
    from .descriptors import Landscape
    L = Landscape(f, degree, k)
    return [(z, L(z)) for z in Z]


def _write_landscape(rows, n, out):
    import csv
    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        w = csv.writer(fh)
        w.writerow([f"z_{j + 1}" for j in range(n)] + ["value"])
        for z, v in rows:
            w.writerow([_fmt(x) for x in z] + [_fmt(v)])
    finally:
        if out:
            fh.close()


def cmd_compute(args) -> int:
    from .descriptors import hilbert_measure, rank_measure
    from .io import read_points, write_measure
    _check_degree(args.degree)
    f = _load_filtration(args)
    if args.descriptor == "landscape":
        if not args.points:
            raise UsageError("--points is required for the landscape descriptor")
        Z = read_points(args.points)
        if Z.shape[1] != f.n:
            from .errors import DimensionMismatch
            raise DimensionMismatch(f"sample points in R^{Z.shape[1]} for a {f.n}-filtration")
        rows = _landscape_rows(f, args.degree, args.k, Z)
        _write_landscape(rows, f.n, args.out)
        print(f"landscape k={args.k} degree={args.degree}: {len(rows)} points evaluated", file=sys.stderr)
        return 0
    mu = hilbert_measure(f, args.degree) if args.descriptor == "hilbert" else rank_measure(f, args.degree)
    write_measure(args.out or sys.stdout, mu)
    pos = int(mu.mults[mu.mults > 0].sum())
    neg = int(-mu.mults[mu.mults < 0].sum())
    print(f"{args.descriptor} degree={args.degree}: {len(mu)} masses (+{pos} / -{neg}), total mass {mu.total_mass}",
          file=sys.stderr if args.out is None else sys.stdout)
    return 0


def cmd_distance(args) -> int:
    import csv
    import math
    from .io import read_measure
    from .transport import ot_distance
    for path in (args.first, args.second):
        if not Path(path).exists():
            raise FileNotFoundError(path)
    mu = read_measure(args.first, args.ground)
    nu = read_measure(args.second, args.ground)
    cost, a = ot_distance(mu, nu)
    if math.isinf(cost):
        log.warning("no finite transport plan: the measures have different masses")
        print("inf")
        return 0
    print(repr(cost))
    if args.out:
        w_ = mu.locations.shape[1]
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"from_{j + 1}" for j in range(w_)] + [f"to_{j + 1}" for j in range(w_)] + ["cost"])
            for b, g, c in zip(a.beta, a.gamma, a.costs):
                w.writerow([_fmt(x) for x in b] + [_fmt(x) for x in g] + [_fmt(c)])
    return 0


def cmd_landscape(args) -> int:
    import numpy as np
    from .errors import DimensionMismatch
    from .io import read_points
    _check_degree(args.degree)
    f = _load_filtration(args)
    if args.points:
        Z = read_points(args.points)
    else:
        try:
            Z = np.array([[float(t) for t in z.split(",")] for z in args.z])
        except ValueError:
            raise UsageError(f"bad --z value {args.z}") from None
    if Z.ndim != 2 or Z.shape[1] != f.n:
        raise DimensionMismatch(f"sample points do not live in R^{f.n}")
    _write_landscape(_landscape_rows(f, args.degree, args.k, Z), f.n, args.out)
    return 0


def cmd_optimize(args) -> int:
    from .config import check_seed, load_config, loss_from_dict, parse_json_arg
    from .io import ensure_dir, write_points
    from .optimizer import optimize_pointcloud
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = check_seed(args.seed)
    if args.epochs is not None:
        cfg.epochs = args.epochs
    if args.loss is not None:
        raw, base = parse_json_arg(args.loss)
        loss_from_dict(raw, cfg.parameters(), base)
        cfg.loss = raw
    cfg.validate()
    spec = cfg.loss_spec()
    X0 = cfg.initial_points()
    out = ensure_dir(args.out)
    ensure_dir(out / "points")
    box = tuple(cfg.box) if cfg.box else None
    traj = optimize_pointcloud(X0, cfg.pipeline_spec(), spec, cfg.make_schedule(), cfg.epochs, cfg.seed,
                               box=box, noise=cfg.noise)
    with open(out / "trajectory.jsonl", "w") as fh:
        for r in traj:
            name = f"points/epoch_{r.epoch:04d}.csv"
            write_points(out / name, r.points)
            fh.write(json.dumps({"epoch": r.epoch, "loss": r.loss, "objective": spec.sign * r.loss,
                                 "diameter": r.diameter, "max_norm": r.max_norm, "file": name}) + "\n")
    first, last = traj[0], traj[-1]
    summary = {
        "config": cfg.to_dict(),
        "initial_loss": first.loss,
        "final_loss": last.loss,
        "initial_objective": spec.sign * first.loss,
        "final_objective": spec.sign * last.loss,
        "diameter_ratio": last.diameter / first.diameter if first.diameter > 0 else None,
        "max_norm": max(r.max_norm for r in traj),
        "epochs": cfg.epochs,
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(f"epochs={cfg.epochs} objective {summary['initial_objective']:.6g} -> {summary['final_objective']:.6g}")
    ratio = summary["diameter_ratio"]
    print(f"diameter ratio {ratio:.4g}" if ratio is not None else "diameter ratio undefined (zero diameter)")
    print(f"max point norm {summary['max_norm']:.4g}")
    return 0


COMMANDS = {"compute": cmd_compute, "distance": cmd_distance, "landscape": cmd_landscape, "optimize": cmd_optimize}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.verbose:
        log.setLevel(logging.INFO)
    if args.threads is not None:
        if args.threads < 1:
            print("error: --threads must be positive", file=sys.stderr)
            return EXIT_USAGE
    from threadpoolctl import threadpool_limits
    from .errors import ConfigError, MpgradError
    try:
        with threadpool_limits(limits=args.threads):
            return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as e:
        print(f"error: no such file {e}", file=sys.stderr)
        return EXIT_USAGE
    except MpgradError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
