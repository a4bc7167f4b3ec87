"""Command line for the thermal entanglement witness toolkit."""

import argparse
import dataclasses
import logging
import os
import sys
import time
from typing import Any, Callable, Dict, List, Optional, Sequence

from thermowit.bosegas import BoxGasSpec, condensate_fraction_probe, transition_temperatures
from thermowit.models import Boundary, ChainSpec, ModelKind, build, spin_exchange_to_pauli
from thermowit.oracle import DEFAULT_RESTARTS, max_abs_exchange_over_products, witness_crossing_temperature
from thermowit.order import OpKind, classify_decay, correlation_series
from thermowit.thermal import ThermalEnsemble
from thermowit.witnesses import WitnessId, evaluate_point, sweep
from utils.config_manager import ConfigManager
from utils.error_handler import ErrorHandler
from utils.errors import ConfigError, ToolkitError
from utils.file_management import get_next_name, write_atomic
from utils.logging_config import get_logger, setup_logging
from utils.meta import print_meta
from utils.models import RunSummary
from utils.result_export import correlation_csv, phase_diagram_csv, to_json
from utils.validators import (
    energy_to_kelvin,
    kelvin_to_energy,
    parse_axis,
    validate_positive,
    validate_sites,
    validate_unit_system,
)

THIS_DIR = os.path.dirname(os.path.abspath(__file__))
logger = get_logger(__name__)

EXIT_OK = 0
BOSE_DIMENSIONS = (1, 2, 3)


def _common_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", help="YAML run file whose keys become option defaults")
    parent.add_argument("--out", help="output file (stdout when omitted)")
    parent.add_argument("--format", choices=("csv", "json"), default=None)
    parent.add_argument("--units", default="natural", help="natural | physical (meV, K)")
    parent.add_argument("--no-overwrite", action="store_true", help="never clobber --out")
    parent.add_argument("--echo-config", action="store_true", help="write the resolved options next to --out")
    parent.add_argument("--log-level", default=None)
    parent.add_argument("--log-dir", default=None)
    parent.add_argument("--quiet", action="store_true")
    return parent


def _chain_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--model", choices=[m.value for m in ModelKind], default=ModelKind.XXX.value)
    parent.add_argument("--sites", default=8)
    parent.add_argument("--j", type=float, default=1.0)
    parent.add_argument("--j1", type=float, default=1.0)
    parent.add_argument("--j2", type=float, default=0.0)
    parent.add_argument("--field", type=float, default=0.0)
    parent.add_argument("--boundary", choices=[b.value for b in Boundary], default=Boundary.OPEN.value)
    parent.add_argument(
        "--exchange-convention",
        choices=("pauli", "spin"),
        default="pauli",
        help="spin: couplings quoted for J S.S, converted to J/4",
    )
    return parent


def build_parser() -> argparse.ArgumentParser:
    """Parser with one subcommand per toolkit operation."""
    common, chain = _common_parent(), _chain_parent()
    parser = argparse.ArgumentParser(
        prog="thermowit", description="Thermodynamic entanglement witnesses for spin chains and Bose gases."
    )
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    p_sweep = commands.add_parser("sweep", parents=[common, chain], help="(T, B) phase diagram")
    p_sweep.add_argument("--t-axis", default="0.1:6:30")
    p_sweep.add_argument("--b-axis", default="0:12:25")
    p_sweep.add_argument("--workers", type=int, default=1)

    p_witness = commands.add_parser("witness", parents=[common, chain], help="single-point evaluation")
    p_witness.add_argument("--temp", type=float, default=1.0)

    p_bose = commands.add_parser("bose", parents=[common], help="Bose-gas transition report")
    p_bose.add_argument("--dim", type=int, default=3)
    p_bose.add_argument("--particles", type=int, default=1000)
    p_bose.add_argument("--regions", type=int, default=1)
    p_bose.add_argument("--volume", type=float, default=1000.0)
    p_bose.add_argument("--mass", type=float, default=1.0)
    p_bose.add_argument("--epsilon", type=float, default=1e-3)
    p_bose.add_argument("--samples", type=int, default=9)

    p_corr = commands.add_parser("corr", parents=[common, chain], help="correlations and decay class")
    p_corr.add_argument("--temp", type=float, default=1.0)
    p_corr.add_argument("--kind", choices=[k.value for k in OpKind], default=OpKind.ZZ.value)
    p_corr.add_argument("--reference-site", type=int, default=0)
    p_corr.add_argument("--connected", action="store_true")

    p_certify = commands.add_parser("certify", parents=[common, chain], help="product-state bound check")
    p_certify.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    p_certify.add_argument("--seed", type=int, default=0)

    p_crossing = commands.add_parser("crossing", parents=[common, chain], help="witness crossing temperature")
    p_crossing.add_argument("--witness", choices=[w.value for w in WitnessId], default=WitnessId.SUSCEPTIBILITY.value)
    p_crossing.add_argument("--t-lo", type=float, default=0.1)
    p_crossing.add_argument("--t-hi", type=float, default=10.0)
    return parser


def parse_arguments(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """
    Parse the command line, taking defaults from ``--config`` when given.

    Explicit flags win over run-file values.
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)

    parser = build_parser()
    if known.config:
        subparsers = next(
            action.choices for action in parser._actions  # pylint: disable = W0212
            if isinstance(action, argparse._SubParsersAction)  # pylint: disable = W0212
        )
        options = {
            action.dest
            for sub in subparsers.values()
            for action in sub._actions  # pylint: disable = W0212
        }
        defaults = ConfigManager(known.config).defaults_for(options)
        for sub in subparsers.values():
            dests = {action.dest for action in sub._actions}  # pylint: disable = W0212
            sub.set_defaults(**{key: value for key, value in defaults.items() if key in dests})
    return parser.parse_args(argv)


def _physical(args: argparse.Namespace) -> bool:
    return validate_unit_system(args.units) == "physical"


def _temperature_in(args: argparse.Namespace, value: float) -> float:
    value = validate_positive(value, "temperature")
    return kelvin_to_energy(value) if _physical(args) else value


def _temperature_out(args: argparse.Namespace) -> Callable[[float], float]:
    return energy_to_kelvin if _physical(args) else (lambda t: t)


def chain_spec_from_args(args: argparse.Namespace) -> ChainSpec:
    """ChainSpec in internal (sigma) convention and energy units."""
    scale = spin_exchange_to_pauli if args.exchange_convention == "spin" else (lambda j: j)
    return ChainSpec(
        num_sites=validate_sites(args.sites),
        model=args.model,
        j=scale(float(args.j)),
        j1=scale(float(args.j1)),
        j2=scale(float(args.j2)),
        field=float(args.field),
        boundary=args.boundary,
    )


def _emit(args: argparse.Namespace, text: str, out: Optional[str] = None) -> Optional[str]:
    """Write ``text`` atomically to ``out`` (default ``--out``) or to stdout."""
    target = out if out is not None else args.out
    if not target:
        sys.stdout.write(text)
        return None
    if args.no_overwrite:
        target = get_next_name(target)
    path = write_atomic(target, text)
    if args.echo_config and out is None:
        resolved = {k: v for k, v in vars(args).items() if k not in ("config", "echo_config")}
        ConfigManager().save_config(resolved, path=f"{os.path.splitext(path)[0]}.run.yaml")
    return path


def _point_record(args: argparse.Namespace, point) -> Dict[str, Any]:
    convert = _temperature_out(args)
    return dataclasses.replace(point, temperature=convert(point.temperature)).to_record()


def cmd_sweep(args: argparse.Namespace) -> RunSummary:
    """Phase diagram of both witnesses as CSV (or JSON)."""
    spec = chain_spec_from_args(args)
    t_axis = tuple(_temperature_in(args, t) for t in parse_axis(str(args.t_axis)))
    b_axis = parse_axis(str(args.b_axis))
    if args.workers < 1:
        raise ConfigError(f"--workers must be positive, got {args.workers}")
    diagram = sweep(spec, t_axis, b_axis, max_workers=args.workers, progress=not args.quiet)
    if (args.format or "csv") == "csv":
        text = phase_diagram_csv(diagram, _temperature_out(args))
    else:
        text = to_json(
            {
                "model": spec,
                "units": args.units,
                "t_axis": [_temperature_out(args)(t) for t in diagram.t_axis],
                "b_axis": list(diagram.b_axis),
                "cells": [
                    {**cell.to_record(), "point": _point_record(args, cell.point)}
                    for cell in diagram.rows()
                ],
            }
        )
    path = _emit(args, text)
    return RunSummary(
        command="sweep",
        cells=len(t_axis) * len(b_axis),
        entangled={w.value: int(diagram.entangled_mask(w).sum()) for w in WitnessId},
        output_path=path,
    )


def cmd_witness(args: argparse.Namespace) -> RunSummary:
    """ThermoPoint and both witness verdicts as JSON."""
    spec = chain_spec_from_args(args)
    cell = evaluate_point(spec, _temperature_in(args, args.temp))
    payload = {
        "model": spec,
        "units": args.units,
        "point": _point_record(args, cell.point),
        "energy": cell.energy,
        "susceptibility": cell.susceptibility,
    }
    path = _emit(args, to_json(payload))
    return RunSummary(
        command="witness",
        cells=1,
        entangled={w.value: int(cell.verdict(w).entangled) for w in WitnessId},
        output_path=path,
    )


def cmd_bose(args: argparse.Namespace) -> RunSummary:
    """TransitionReport plus divergence classes for d = 1, 2, 3 as JSON."""
    spec = BoxGasSpec(
        mass=args.mass,
        volume=args.volume,
        dimension=args.dim,
        num_particles=args.particles,
        num_regions=args.regions,
    )
    report = transition_temperatures(spec)
    convert = _temperature_out(args)
    temperatures = dataclasses.replace(
        report,
        t_trans=convert(report.t_trans),
        t_crit=convert(report.t_crit),
        t_bec=convert(report.t_bec),
    )
    epsilon = validate_positive(args.epsilon, "epsilon")
    probes = {
        str(d): condensate_fraction_probe(d, epsilon=epsilon, samples=args.samples)
        for d in BOSE_DIMENSIONS
    }
    payload = {"gas": spec, "units": args.units, "report": temperatures, "divergence": probes}
    path = _emit(args, to_json(payload))
    return RunSummary(command="bose", cells=len(BOSE_DIMENSIONS), output_path=path)


def cmd_corr(args: argparse.Namespace) -> RunSummary:
    """``r,C`` series plus its decay classification."""
    spec = chain_spec_from_args(args)
    ensemble = ThermalEnsemble(build(spec), with_transverse=False)
    series = correlation_series(
        ensemble,
        _temperature_in(args, args.temp),
        op_kind=args.kind,
        reference_site=args.reference_site,
        connected=args.connected,
    )
    classification = classify_decay(series)
    logger.info(
        "Decay class %s over r=%d..%d (staggered=%s)",
        classification.decay_class.value, *classification.window, classification.staggered,
    )
    if args.format == "json":
        path = _emit(args, to_json({"model": spec, "series": series, "classification": classification}))
    else:
        path = None
        classification_text = to_json({"model": spec, "classification": classification})
        if args.out:
            # Both files are rendered before either is written.
            path = _emit(args, correlation_csv(series))
            _emit(args, classification_text, out=f"{os.path.splitext(path)[0]}.json")
        else:
            sys.stdout.write(correlation_csv(series))
            sys.stderr.write(classification_text)
    return RunSummary(
        command="corr",
        cells=len(series.values),
        warnings=classification.dropped_points,
        output_path=path,
    )


def cmd_certify(args: argparse.Namespace) -> RunSummary:
    """OracleReport as JSON; a violated bound exits 1 without output."""
    spec = chain_spec_from_args(args)
    report = max_abs_exchange_over_products(spec, restarts=args.restarts, seed=args.seed)
    report.check()
    path = _emit(args, to_json({"model": spec, "report": report}))
    return RunSummary(
        command="certify", cells=report.restarts_used, warnings=report.unconverged, output_path=path
    )


def cmd_crossing(args: argparse.Namespace) -> RunSummary:
    """Witness crossing temperature by bisection as JSON."""
    spec = chain_spec_from_args(args)
    t_lo, t_hi = _temperature_in(args, args.t_lo), _temperature_in(args, args.t_hi)
    crossing = witness_crossing_temperature(spec, args.witness, t_lo, t_hi)
    convert = _temperature_out(args)
    payload = {
        "witness_id": WitnessId(args.witness).value,
        "temperature": convert(crossing),
        "t_lo": convert(t_lo),
        "t_hi": convert(t_hi),
        "units": args.units,
        "model": spec,
    }
    path = _emit(args, to_json(payload))
    return RunSummary(command="crossing", cells=1, output_path=path)


COMMANDS: Dict[str, Callable[[argparse.Namespace], RunSummary]] = {
    "sweep": cmd_sweep,
    "witness": cmd_witness,
    "bose": cmd_bose,
    "corr": cmd_corr,
    "certify": cmd_certify,
    "crossing": cmd_crossing,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main entry point of the toolkit.

    Returns
    -------
    int
        0 on success, 1 when a separable bound is violated, 2 on configuration
        errors and 3 on numerical failures.
    """
    error_handler = ErrorHandler()
    try:
        args = parse_arguments(argv)
    except SystemExit as e:
        return int(e.code or 0)
    except ToolkitError as e:
        setup_logging()
        return error_handler.handle_error(e, logger)

    setup_logging(log_level=args.log_level, log_dir=args.log_dir, quiet=args.quiet)
    if not args.quiet:
        print_meta(logger)

    start = time.time()
    try:
        summary = COMMANDS[args.command](args)
    except (ToolkitError, OSError, ValueError, ArithmeticError) as e:
        return error_handler.handle_error(e, logger)

    summary.duration_seconds = time.time() - start
    if summary.warnings:
        error_handler.warn(
            f"{summary.command}: {summary.warnings} recoverable condition(s), see the log", logger
        )
    logger.info("Run complete: %s (%s)", summary, error_handler.get_summary())
    if not args.quiet:
        summary.print_summary()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
