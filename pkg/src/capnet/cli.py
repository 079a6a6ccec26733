"""Command-line pipeline: generation, routing, FEC sizing and ROR rating.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import capillary, rormetric
from .capillary import UnroutableError
from .experiment import DEFAULT_TOLERANCES, ExperimentConfig, run_experiment
from .fecsizing import FecInfeasibleError, FecProfile, fec_block_size
from .lpcore import LpInfeasibleError, LpNumericalError
from .manetgen import ManetConfig, generate_samples
from .netmodel import (NetworkError, parse_network, serialize_network,
                       validate_routable)
from .rormetric import OFFLINE, REALTIME

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


class _Parser(argparse.ArgumentParser):
    """argparse reports usage problems with exit code 2; we contract 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _manet_config(args, overrides: dict) -> ManetConfig:
    def pick(name, default=None):
        val = getattr(args, name, None)
        if val is not None:
            return val
        return overrides.get(name, default)

    kwargs = {
        "node_count": pick("nodes"),
        "timeframes": pick("frames", 1),
        "master_seed": pick("seed", 0),
        "min_disjoint_paths": pick("min_disjoint", 2),
    }
    if kwargs["node_count"] is None:
        raise ValueError("node count is required (--nodes or config file)")
    width = pick("width")
    height = pick("height")
    if width is not None or height is not None:
        kwargs["area"] = (width if width is not None else 1.0,
                          height if height is not None else 1.0)
    if pick("radius") is not None:
        kwargs["coverage_radius"] = pick("radius")
    if pick("step") is not None:
        kwargs["step_length"] = pick("step")
    return ManetConfig(**kwargs)


def cmd_gen(args) -> int:
    cfg = _manet_config(args, {})
    ensemble = generate_samples(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {"config": cfg.to_dict(), "samples": [], "skipped": []}
    for sample in ensemble.samples:
        if sample.skipped:
            manifest["skipped"].append({"frame": sample.frame,
                                        "reason": sample.skip_reason})
            continue
        name = f"net_{sample.frame:04d}.json"
        (out / name).write_text(serialize_network(sample.network))
        manifest["samples"].append({"frame": sample.frame, "file": name})
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2))
    print(f"wrote {len(manifest['samples'])} samples "
          f"({len(manifest['skipped'])} skipped) to {out}")
    return EXIT_OK


def cmd_route(args) -> int:
    net = parse_network(Path(args.network).read_text())
    if validate_routable(net).max_disjoint_paths < 1:
        raise UnroutableError(f"{args.network}: no path from source to sink")
    result = capillary.build_capillary(net, max_layers=args.max_layers)
    payload = capillary.result_to_dict(result)
    if args.all_layers:
        payload["layer_patterns"] = [
            {"k": k,
             **capillary.layer_pattern(net, result.layers, k).to_dict()}
            for k in range(1, len(result.layers) + 1)
        ]
    text = json.dumps(payload, indent=2)
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text)
    return EXIT_OK


def cmd_fec_table(args) -> int:
    for p in args.p:
        if p >= 1.0:
            raise ValueError(f"loss rate {p} is not below 1")
        if p < 0.0:
            raise ValueError(f"loss rate {p} is negative")
    profile = FecProfile(m=args.m, der=args.der)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["p", "N", "N_over_M"])
    for p in args.p:
        n = fec_block_size(profile, p)
        writer.writerow([p, n, n / args.m])
    text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text, end="")
    return EXIT_OK


def cmd_ror(args) -> int:
    data = json.loads(Path(args.routing).read_text())
    result = capillary.result_from_dict(data)
    if args.mode == REALTIME:
        profile = FecProfile(m=args.m, der=args.der, tolerance=args.tolerance)
        report = rormetric.ror_realtime(result.pattern, profile)
    else:
        report = rormetric.ror_offline(result.pattern, args.tolerance)
    if args.format == "json":
        print(json.dumps(report.to_dict(), indent=2))
    else:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["mode", "tolerance", "total", "links_rated",
                         "skipped_full_load", "below_tolerance"])
        writer.writerow([report.mode, args.tolerance, report.total,
                         len(report.contributions),
                         len(report.skipped_full_load),
                         report.below_tolerance])
        print(buf.getvalue(), end="")
    return EXIT_OK


def cmd_experiment(args) -> int:
    overrides = {}
    if args.config:
        overrides = json.loads(Path(args.config).read_text())
        if not isinstance(overrides, dict):
            raise ValueError("config file must hold a JSON object")

    def pick(name, default):
        val = getattr(args, name, None)
        if val is not None:
            return val
        return overrides.get(name, default)

    tolerances = pick("tolerances", list(DEFAULT_TOLERANCES))
    modes = pick("modes", [REALTIME, OFFLINE])
    cfg = ExperimentConfig(
        manet=_manet_config(args, overrides),
        max_layers=pick("max_layers", 10),
        tolerances=tuple(float(t) for t in tolerances),
        m=pick("m", 20),
        der=pick("der", 1e-5),
        modes=tuple(modes),
        partitions=pick("partitions", 1),
        workers=pick("workers", 1),
    )
    manifest = run_experiment(cfg, args.out)
    print(f"rated {manifest['accepted_samples']} samples "
          f"({len(manifest['skipped_samples'])} skipped); outputs in {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="capnet",
                     description="Multi-path routing construction and "
                                 "redundancy-overhead rating experiments")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    gen = sub.add_parser("gen", help="generate a MANET ensemble")
    gen.add_argument("--nodes", type=int, required=True)
    gen.add_argument("--frames", type=int, default=None)
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--width", type=float, default=None)
    gen.add_argument("--height", type=float, default=None)
    gen.add_argument("--radius", type=float, default=None)
    gen.add_argument("--step", type=float, default=None)
    gen.add_argument("--min-disjoint", dest="min_disjoint", type=int, default=None)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_gen)

    route = sub.add_parser("route", help="build the layered routing pattern")
    route.add_argument("network", help="network JSON file")
    route.add_argument("--max-layers", dest="max_layers", type=int, default=10)
    route.add_argument("--all-layers", dest="all_layers", action="store_true")
    route.add_argument("--out", default=None)
    route.set_defaults(func=cmd_route)

    fec = sub.add_parser("fec-table", help="block sizes for a list of loss rates")
    fec.add_argument("--m", type=int, default=20)
    fec.add_argument("--der", type=float, default=1e-5)
    fec.add_argument("--p", type=float, nargs="+", required=True)
    fec.add_argument("--out", default=None)
    fec.set_defaults(func=cmd_fec_table)

    ror = sub.add_parser("ror", help="rate a routing pattern")
    ror.add_argument("routing", help="routing JSON file (route output)")
    ror.add_argument("--mode", choices=[REALTIME, OFFLINE], default=OFFLINE)
    ror.add_argument("--tolerance", type=float, default=0.0)
    ror.add_argument("--m", type=int, default=20)
    ror.add_argument("--der", type=float, default=1e-5)
    ror.add_argument("--format", choices=["json", "csv"], default="json")
    ror.set_defaults(func=cmd_ror)

    exp = sub.add_parser("experiment", help="full generate/route/rate pipeline")
    exp.add_argument("--config", default=None, help="JSON config file; flags override")
    exp.add_argument("--nodes", type=int, default=None)
    exp.add_argument("--frames", type=int, default=None)
    exp.add_argument("--seed", type=int, default=None)
    exp.add_argument("--width", type=float, default=None)
    exp.add_argument("--height", type=float, default=None)
    exp.add_argument("--radius", type=float, default=None)
    exp.add_argument("--step", type=float, default=None)
    exp.add_argument("--min-disjoint", dest="min_disjoint", type=int, default=None)
    exp.add_argument("--max-layers", dest="max_layers", type=int, default=None)
    exp.add_argument("--tolerances", type=float, nargs="+", default=None)
    exp.add_argument("--m", type=int, default=None)
    exp.add_argument("--der", type=float, default=None)
    exp.add_argument("--modes", nargs="+", choices=[REALTIME, OFFLINE], default=None)
    exp.add_argument("--partitions", type=int, default=None)
    exp.add_argument("--workers", type=int, default=None)
    exp.add_argument("--out", required=True)
    exp.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UnroutableError, LpNumericalError, LpInfeasibleError,
            FecInfeasibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (NetworkError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
