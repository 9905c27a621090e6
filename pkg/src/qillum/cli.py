"""Command-line front end.

    qillum chernoff --eta 0.01 --b 0.1 --d 4
    qillum sweep --eta 0.01 --b 0.1 --d 1,2,4,8,16 --kind entangled
    qillum simulate --eta 0.01 --b 0.1 --d 8 --seed 7 --replicas 3000

Exit status: 0 success, 2 bad arguments or config, 3 parameters outside
the model's domain.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from contextlib import contextmanager
from typing import Dict, List, Optional

from . import __version__
from .errors import ConfigError, QIError
from .formats import (
    CAMPAIGN_COLUMNS,
    SWEEP_COLUMNS,
    parse_config,
    parse_psi,
    read_map,
    write_grid,
    write_matrix_dump,
    write_pgm,
    write_table,
)
from .imaging import ImagingConfig, ReflectivityMap, compare_modes, false_alarm_threshold, scan_image
from .discrimination import conditional_probs
from .montecarlo import Decision, Strategy, TrialConfig
from .report import (
    CHERNOFF_COLUMNS,
    HELSTROM_COLUMNS,
    PROBS_COLUMNS,
    campaign_row,
    chernoff_row,
    helstrom_row,
    probs_row,
    sweep,
)
from .scenarios import Kind, ScenarioParams, build_pair

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 2, 3
RANDOMIZED = ("simulate", "image")

COMPARE_COLUMNS = ("kind", "shots_per_pixel", "threshold", "false_alarm", "pixel_error_rate",
                   "difference", "sigma", "within_3sigma", "seed")


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _scenario_flags(p: argparse.ArgumentParser, lists: bool = False) -> None:
    many = " (comma-separated list)" if lists else ""
    p.add_argument("--config", help="scenario file of 'key = value' lines")
    p.add_argument("--eta", help="target reflectivity" + many)
    p.add_argument("--b", help="thermal photon weight per mode" + many)
    p.add_argument("--d", help="modes per detection event" + many)
    p.add_argument("--prior0", help="prior probability of 'target absent'")
    p.add_argument("--psi", help="signal state: 'uniform' or re:im,re:im,...")
    p.add_argument("--seed", help="64-bit RNG seed")
    p.add_argument("--output", "-o", help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--workers", type=int, default=1, help="worker threads")


def build_parser() -> argparse.ArgumentParser:
    parser = ArgumentParser(prog="qillum", description="Quantum illumination analysis")
    parser.add_argument("--version", action="version", version=f"qillum {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    p = sub.add_parser("chernoff", help="quantum Chernoff bound for both probe kinds")
    _scenario_flags(p)
    p.add_argument("--dump-states", action="store_true", help="write rho0/rho1 matrix dumps")
    p.add_argument("--dump-dir", default=".")

    p = sub.add_parser("helstrom", help="single-shot minimum error")
    _scenario_flags(p)
    p.add_argument("--kind", choices=[k.value for k in Kind], default=Kind.UNENTANGLED.value)
    p.add_argument("--dump-states", action="store_true")
    p.add_argument("--dump-dir", default=".")

    p = sub.add_parser("probs", help="per-shot yes/no outcome probabilities")
    _scenario_flags(p)

    p = sub.add_parser("sweep", help="discrimination quantities over a parameter grid")
    _scenario_flags(p, lists=True)
    p.add_argument("--kind", choices=("unentangled", "entangled", "both"), default="both")

    p = sub.add_parser("simulate", help="Monte Carlo detection campaign")
    _scenario_flags(p)
    p.add_argument("--kind", choices=("unentangled", "entangled", "both"), default="both")
    p.add_argument("--truth", choices=[Decision.PRESENT.value, Decision.ABSENT.value],
                   default=Decision.PRESENT.value)
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default=Strategy.SPRT.value)
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--beta", type=float, default=0.01)
    p.add_argument("--replicas", type=int, default=1000)
    p.add_argument("--max-shots", type=int, default=10_000_000)

    p = sub.add_parser("image", help="point-by-point imaging Monte Carlo")
    _scenario_flags(p)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--map", help="reflectivity grid file")
    src.add_argument("--checkerboard", metavar="WxH", help="checkerboard with eta in {0, --eta}")
    p.add_argument("--kind", choices=[k.value for k in Kind], default=Kind.UNENTANGLED.value)
    p.add_argument("--shots", type=int, required=True, help="shots per pixel")
    p.add_argument("--threshold", type=float, help="yes-fraction threshold")
    p.add_argument("--false-alarm", type=float, default=0.01,
                   help="per-pixel false-alarm budget used when --threshold is absent")
    p.add_argument("--pgm", help="write the detected map as PGM")
    p.add_argument("--compare", action="store_true",
                   help="compare unentangled (--shots) with entangled (--shots/d)")
    return parser


# -- argument resolution -------------------------------------------------

def _merged(args) -> Dict[str, str]:
    """Config-file values overridden by flags."""
    values: Dict[str, str] = {}
    if args.config:
        try:
            with open(args.config) as fh:
                values.update(parse_config(fh.read()))
        except OSError as exc:
            raise ConfigError(f"config: cannot read {args.config}: {exc.strerror}") from None
    for key in ("eta", "b", "d", "prior0", "psi", "seed"):
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return values


def _number(values: Dict[str, str], key: str, cast, default=None):
    if key not in values:
        if default is None:
            raise ConfigError(f"{key}: required (flag --{key} or config key)")
        return default
    try:
        return cast(values[key])
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {values[key]!r}") from None


def _number_list(values: Dict[str, str], key: str, cast, default=None) -> List:
    if key not in values:
        if default is None:
            raise ConfigError(f"{key}: required (flag --{key} or config key)")
        return [default]
    try:
        return [cast(v) for v in values[key].split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {values[key]!r}") from None


def _int(text: str) -> int:
    return int(text.strip())


def _scenario(values: Dict[str, str]) -> ScenarioParams:
    return ScenarioParams(
        eta=_number(values, "eta", float),
        b=_number(values, "b", float),
        d=_number(values, "d", _int, 1),
        prior0=_number(values, "prior0", float, 0.5),
    )


def _seed(values: Dict[str, str], command: str) -> int:
    if "seed" not in values:
        raise ConfigError(f"seed: '{command}' is randomized and requires an explicit --seed")
    return _number(values, "seed", _int)


def _kinds(choice: str) -> List[Kind]:
    return list(Kind) if choice == "both" else [Kind(choice)]


@contextmanager
def _output(path: Optional[str]):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _comment(command: str) -> str:
    return f"qillum {__version__} {command}"


def _dump_states(params: ScenarioParams, kinds, psi, directory: str) -> None:
    os.makedirs(directory, exist_ok=True)
    for kind in kinds:
        pair = build_pair(params, kind, psi)
        for name, rho in (("rho0", pair.rho0), ("rho1", pair.rho1)):
            with open(os.path.join(directory, f"{kind.value}_{name}.txt"), "w") as fh:
                write_matrix_dump(rho, fh)


# -- subcommands ---------------------------------------------------------

def _cmd_chernoff(args, values):
    params = _scenario(values)
    psi = parse_psi(values.get("psi", "uniform"), params.d)
    rows = [chernoff_row(params, k, psi) for k in Kind]
    if args.dump_states:
        _dump_states(params, list(Kind), psi, args.dump_dir)
    return rows, CHERNOFF_COLUMNS


def _cmd_helstrom(args, values):
    params = _scenario(values)
    psi = parse_psi(values.get("psi", "uniform"), params.d)
    kind = Kind(args.kind)
    if args.dump_states:
        _dump_states(params, [kind], psi, args.dump_dir)
    return [helstrom_row(params, kind, psi)], HELSTROM_COLUMNS


def _cmd_probs(args, values):
    params = _scenario(values)
    return [probs_row(params, k) for k in Kind], PROBS_COLUMNS


def _cmd_sweep(args, values):
    etas = _number_list(values, "eta", float)
    bs = _number_list(values, "b", float)
    ds = _number_list(values, "d", _int, 1)
    return sweep(etas, bs, ds, _kinds(args.kind), args.workers), SWEEP_COLUMNS


def _cmd_simulate(args, values):
    params = _scenario(values)
    config = TrialConfig(seed=_seed(values, "simulate"), alpha=args.alpha, beta=args.beta,
                         max_shots=args.max_shots, replicas=args.replicas)
    rows = [campaign_row(params, k, args.truth, config, Strategy(args.strategy), args.workers)
            for k in _kinds(args.kind)]
    return rows, CAMPAIGN_COLUMNS


def _read_image(args, values) -> ReflectivityMap:
    if args.map:
        try:
            with open(args.map) as fh:
                return read_map(fh)
        except OSError as exc:
            raise ConfigError(f"map: cannot read {args.map}: {exc.strerror}") from None
    try:
        w, h = (int(v) for v in args.checkerboard.lower().split("x"))
    except ValueError:
        raise ConfigError(f"checkerboard: expected WxH, got {args.checkerboard!r}") from None
    return ReflectivityMap.checkerboard(w, h, 0.0, _number(values, "eta", float))


def _cmd_image(args, values):
    seed = _seed(values, "image")
    image = _read_image(args, values)
    b = _number(values, "b", float)
    d = _number(values, "d", _int, 1)
    if args.compare:
        rep = compare_modes(image, b, d, args.shots, seed, args.false_alarm)
        rows = []
        for kind, res, shots, th in (
            (Kind.UNENTANGLED, rep.unentangled, rep.shots_unentangled, rep.threshold_unentangled),
            (Kind.ENTANGLED, rep.entangled, rep.shots_entangled, rep.threshold_entangled),
        ):
            rows.append({
                "kind": kind.value, "shots_per_pixel": shots, "threshold": th,
                "false_alarm": rep.false_alarm, "pixel_error_rate": res.pixel_error_rate,
                "difference": rep.difference, "sigma": rep.sigma,
                "within_3sigma": rep.within_3sigma, "seed": seed,
            })
        if args.pgm:
            with open(args.pgm, "w") as fh:
                write_pgm(rep.entangled.detected, fh)
        return rows, COMPARE_COLUMNS
    kind = Kind(args.kind)
    threshold = args.threshold
    if threshold is None:
        p0 = conditional_probs(ScenarioParams(0.0, b, d), kind).p_yes_given_absent
        threshold = false_alarm_threshold(args.shots, p0, args.false_alarm)
    result = scan_image(image, ImagingConfig(args.shots, b, d, kind, threshold, seed))
    if args.pgm:
        with open(args.pgm, "w") as fh:
            write_pgm(result.detected, fh)
    return result, None


_COMMANDS = {
    "chernoff": _cmd_chernoff,
    "helstrom": _cmd_helstrom,
    "probs": _cmd_probs,
    "sweep": _cmd_sweep,
    "simulate": _cmd_simulate,
    "image": _cmd_image,
}


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        values = _merged(args)
        produced, columns = _COMMANDS[args.command](args, values)
        with _output(args.output) as out:
            if columns is None:
                write_grid(produced.yes_fraction, out,
                           [f"pixel_error_rate={produced.pixel_error_rate!r}"])
            else:
                write_table(produced, columns, out, args.format, _comment(args.command))
    except ConfigError as exc:
        print(f"qillum: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QIError as exc:
        print(f"qillum: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


def main() -> None:
    logging.basicConfig(level=logging.WARNING, format="qillum: %(levelname)s: %(message)s")
    sys.exit(run())


if __name__ == "__main__":
    main()
