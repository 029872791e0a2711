"""``busgate`` command line."""

from __future__ import annotations

import argparse
import logging
import sys

from . import experiments
from .experiments import ExperimentConfig, load_config


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value experiment config file")
    common.add_argument("--out", help="output directory (default: out)")
    common.add_argument("--zmax", type=float, help="device / gate length in units of 1/omega_max")
    common.add_argument("--steps", type=int, help="integration steps per device (default: automatic)")
    common.add_argument("--ratio", type=float, help="gate reflectivity r in [0, 1)")
    common.add_argument("--method", choices=("rk4", "expm"), help="integrator")
    common.add_argument("--oracle-only", action="store_true", default=None,
                        help="cnot: skip integration and use permanent-lifted ideal gates")
    common.add_argument("--network", help="cnot: network config file")
    common.add_argument("--input-mode", type=int, choices=(1, 2), help="gate: input waveguide")
    common.add_argument("--detuning", type=float, help="bus detuning in units of omega_max")
    common.add_argument("--lengths", help="sweep: comma-separated z_max values")
    common.add_argument("--amplitudes", action="store_true", default=None,
                        help="also dump re/im amplitude columns in trace CSVs")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="busgate",
                                     description="Adiabatic bus-coupled photonic gate simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("divider", "three-waveguide 50:50 adiabatic power divider"),
                       ("gate", "one-photon USB gate"),
                       ("hom", "two-photon Hong-Ou-Mandel run through the 50:50 gate"),
                       ("cnot", "coincidence-basis CNOT truth table"),
                       ("sweep", "gate infidelity against device length"),
                       ("nullcheck", "closed-form two-photon null vectors"),
                       ("geometry", "waveguide trajectories for the shipped schedules")):
        sub.add_parser(name, parents=[common], help=text)
    return parser


def _config(args) -> ExperimentConfig:
    overrides = {
        "out_dir": args.out, "z_max": args.zmax, "steps": args.steps, "ratio": args.ratio,
        "method": args.method, "oracle_only": args.oracle_only, "network": args.network,
        "input_mode": args.input_mode, "bus_detuning": args.detuning,
        "amplitudes": args.amplitudes,
        "lengths": None if args.lengths is None
        else tuple(float(v) for v in args.lengths.replace(",", " ").split()),
    }
    if args.config:
        return load_config(args.config, **overrides)
    return ExperimentConfig(**{k: v for k, v in overrides.items() if v is not None})


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = _config(args)
        report = experiments.run(args.command, config)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"busgate {args.command}: error: {exc}", file=sys.stderr)
        return 2
    print(report.summary())
    return 0 if report.verdict else 1


if __name__ == "__main__":
    sys.exit(main())
