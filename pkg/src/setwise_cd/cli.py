"""Command-line entry point: ``run``, ``preset``, ``spectrum`` and ``certify``.

The exit status is 1 when any rate-bound or consistency check fails and 2
for usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiments import PRESETS, ExperimentConfig, build_instance, build_topology, run_config, run_preset
from .norms import certificate_for
from .objectives import DualConsensusObjective
from .topology import laplacian_spectrum


def _seeds(text):
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"seeds must be comma-separated integers: {exc}")


def _print_report(report, stream):
    for name, ok in report.checks.items():
        stream.write(f"{'PASS' if ok else 'FAIL'}  {name}\n")
    for label, vals in report.speedups.items():
        for key, val in vals.items():
            stream.write(f"      {label}: {key} = {val:.4g}\n")


def cmd_run(args, out):
    config = ExperimentConfig.load(args.config)
    report = run_config(config, args.out)
    _print_report(report, out)
    return 0 if report.ok else 1


def cmd_preset(args, out):
    report = run_preset(args.name, args.seeds, args.out)
    _print_report(report, out)
    if args.out is None:
        out.write(report.to_json() + "\n")
    return 0 if report.ok else 1


def cmd_spectrum(args, out):
    with open(args.topology) as fh:
        topo = build_topology(json.load(fh))
    spec = laplacian_spectrum(topo)
    out.write(json.dumps({
        "n": topo.n,
        "num_edges": topo.num_edges,
        "max_degree": topo.max_degree,
        "gamma_max": spec.gamma_max,
        "gamma_min_plus": spec.gamma_min_plus,
    }, indent=2) + "\n")
    return 0


def cmd_certify(args, out):
    config = ExperimentConfig.load(args.config)
    inst = build_instance(config)
    if not isinstance(inst.objective, DualConsensusObjective):
        raise ValueError("certificates are defined for decentralized (graph) problems")
    cert = certificate_for(inst.objective)
    text = cert.to_json(args.out)
    out.write(text + "\n")
    return 0 if cert.ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="setwise-cd", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment from a JSON config")
    r.add_argument("config", type=Path)
    r.add_argument("--out", type=Path, default=None, help="artifact directory")
    r.set_defaults(func=cmd_run)

    pr = sub.add_parser("preset", help="run a built-in preset")
    pr.add_argument("name", choices=sorted(PRESETS))
    pr.add_argument("--seeds", type=_seeds, default=None, help="e.g. 0,1,2")
    pr.add_argument("--out", type=Path, default=None, help="artifact directory")
    pr.set_defaults(func=cmd_preset)

    s = sub.add_parser("spectrum", help="Laplacian spectral summary of a topology JSON")
    s.add_argument("topology", type=Path)
    s.set_defaults(func=cmd_spectrum)

    c = sub.add_parser("certify", help="rate certificate for an experiment config")
    c.add_argument("config", type=Path)
    c.add_argument("--out", type=Path, default=None, help="write the certificate JSON here")
    c.set_defaults(func=cmd_certify)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (OSError, ValueError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
