"""Command line interface: run experiments, list them, validate configs."""

from __future__ import annotations

import argparse
import sys

from . import __version__
from . import scenario as sc
from .experiments import EXPERIMENT_IDS, ExperimentSpec, run_experiment


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jcstrack",
        description="Joint communication-and-sensing tracking experiments")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment and write results")
    run.add_argument("experiment", choices=EXPERIMENT_IDS)
    run.add_argument("--config", help="key-value scenario configuration file")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--trials", type=int, default=0,
                     help="Monte Carlo trials (0 = experiment default)")
    run.add_argument("--out", default="results", help="output directory")
    run.add_argument("--profile", choices=("P1", "P2"), default="P2",
                     help="motion intensity profile (fig4)")
    run.add_argument("--scenario", choices=sc.VARIANTS, default="S1",
                     help="deployment variant (fig4)")
    run.add_argument("--snr-override-ris1", type=float, default=None,
                     metavar="DB", help="pin the ceiling-reflector path SNR")
    run.add_argument("-v", "--verbose", action="store_true")

    sub.add_parser("list", help="list available experiments")

    val = sub.add_parser("validate-config", help="check a configuration file")
    val.add_argument("path")
    return parser


def _load_config(args) -> sc.ScenarioConfig:
    if args.config:
        cfg = sc.load_config(args.config)
    else:
        cfg = sc.ScenarioConfig()
    if args.snr_override_ris1 is not None:
        from dataclasses import replace
        cfg = replace(cfg, ris1_snr_override_db=args.snr_override_ris1)
    return cfg


def _headline(result) -> list[str]:
    meta = result.metadata
    lines = []
    if result.experiment_id == "table2":
        for path, snr in meta["snr_db"].items():
            lines.append(f"{path}: {snr:.2f} dB")
    elif result.experiment_id == "table3":
        for prof, row in meta["speed_rmse_mm_s"].items():
            vals = ", ".join(f"{p}={v:.3g}" for p, v in row.items())
            lines.append(f"{prof}: {vals} mm/s")
    elif result.experiment_id == "sigma0":
        lines.append(f"sigma0 = {meta['sigma0_deg']:.4f} deg "
                     f"at {meta['snr_db']:.2f} dB")
    elif result.experiment_id == "fig4":
        lines.append(f"crossover (closed form): {meta['crossover_closed_s']} s")
        lines.append(f"crossover (Monte Carlo): {meta['crossover_mc_s']} s")
    elif result.experiment_id == "fig5":
        lines.append(f"crossover: {meta['crossover_s']:.1f} s, "
                     f"sawtooth bound {meta['bound_deg']:.4f} deg")
    return lines


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "list":
        for eid in EXPERIMENT_IDS:
            print(eid)
        return 0

    if args.command == "validate-config":
        try:
            cfg, substituted, unknown = sc.config_report(args.path)
        except OSError as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return 1
        except ValueError as exc:
            print(f"error: invalid config: {exc}", file=sys.stderr)
            return 1
        if unknown:
            print(f"error: unknown configuration keys: {', '.join(unknown)}",
                  file=sys.stderr)
            return 1
        print(f"{args.path}: OK")
        if substituted:
            print("defaults substituted:")
            for key, value in substituted.items():
                print(f"  {key} = {value}")
        return 0

    # run
    try:
        cfg = _load_config(args)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return 1
    try:
        spec = ExperimentSpec(experiment_id=args.experiment, trials=args.trials,
                              seed=args.seed, variant=args.scenario,
                              profile=args.profile, out_dir=args.out)
    except ValueError as exc:
        print(f"error: invalid experiment request: {exc}", file=sys.stderr)
        return 1

    if args.verbose:
        print(f"running {spec.experiment_id} "
              f"(seed={spec.seed}, trials={spec.trials or 'default'})",
              file=sys.stderr)
    result = run_experiment(spec, cfg)
    csv_path, json_path = result.write(spec.out_dir)
    # sanity check before reporting success
    if not (csv_path.stat().st_size > 0 and json_path.stat().st_size > 0):
        print("error: output files are empty", file=sys.stderr)
        return 1
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    for line in _headline(result):
        print(line)
    return 0


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
