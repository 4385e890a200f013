"""Command-line entry point.

Examples:
  eqesim sweep --config cut.json --out cut.csv
  eqesim sweep --resolution 33 --phi-v 0 --mode emulated --readout-error 0.05,0.03
  eqesim scenario pbs-limit
  eqesim tomo --phi-h pi:1 --phi-v 0 --shots 8192 --seed 7
  eqesim probabilities --phi-h 0 --phi-v pi:1 --phi pi:0.25
  eqesim selftest
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Sequence

from . import sweep as sweeps
from .ccr import closed_form_after, closed_form_before
from .circuit import BellOutcome, CircuitParams, output_probabilities
from .errors import ZeroProbabilityOutcome
from .gates import VppbsParams
from .sampling import ShotPlan
from .selftest import run_selftest
from .sweep import ConfigError, SweepConfig, parse_angle
from .tomography import two_step_experiment

logger = logging.getLogger(__name__)

SCENARIO_ALIASES = {
    "phiv_zero": "phiV_zero",
    "phiv0": "phiV_zero",
    "phih_eq_pi_plus_phiv": "phiH_eq_pi_plus_phiV",
}


def _angle_arg(text: str):
    """One angle, or ``lo,hi`` for a range."""
    parts = text.split(",")
    if len(parts) == 1:
        return parse_angle(parts[0])
    if len(parts) == 2:
        return tuple(parse_angle(p) for p in parts)
    raise argparse.ArgumentTypeError(f"expected an angle or lo,hi range, got {text!r}")


def _readout_arg(text: str) -> list[tuple[float, float]]:
    """``p01,p10`` for every qubit, or ``p01,p10;p01,p10;p01,p10`` per qubit."""
    pairs = []
    for chunk in text.split(";"):
        values = [float(v) for v in chunk.split(",")]
        if len(values) != 2:
            raise argparse.ArgumentTypeError(f"expected p01,p10 pairs, got {chunk!r}")
        pairs.append(tuple(values))
    return pairs


def _on_off(text: str) -> bool:
    if text.lower() in ("on", "true", "1", "yes"):
        return True
    if text.lower() in ("off", "false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected on or off, got {text!r}")


def _common_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", type=Path, help="JSON file with SweepConfig fields")
    p.add_argument("--phi-h", type=_angle_arg, help="phi_H angle or lo,hi range (radians or pi:x)")
    p.add_argument("--phi-v", type=_angle_arg, help="phi_V angle or lo,hi range")
    p.add_argument("--phi", type=parse_angle, help="interferometer phase")
    p.add_argument("--resolution", type=int)
    p.add_argument("--mode", choices=sweeps.MODES)
    p.add_argument("--shots", type=int, help="shots per measurement setting")
    p.add_argument("--seed", type=int, help="RNG seed (falls back to $EQE_SEED)")
    p.add_argument("--readout-error", type=_readout_arg, metavar="P01,P10[;...]")
    p.add_argument("--mitigate", type=_on_off, metavar="on|off")
    p.add_argument("--out", type=Path)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--jobs", type=int)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="eqesim",
        description="Entangled quantum eraser with a variable partially-polarizing beam splitter",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__.split("\n", 1)[1],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", parents=[common], help="grid sweep to CSV/JSON")
    p.add_argument(
        "--scenario",
        help="grid2d, phiV_zero, phiH_eq_pi_plus_phiV or custom",
    )
    p.add_argument("--stage", help="pipeline stage to erase on (Psi2 or Psi4)")

    p = sub.add_parser("scenario", parents=[common], help="special-case report as JSON")
    p.add_argument("name", help=f"one of {sorted(sweeps.SCENARIO_REPORTS)} or 'all'")

    sub.add_parser("tomo", parents=[common], help="emulated two-step tomography at one point")
    sub.add_parser("probabilities", parents=[common], help="detector probabilities per Bell outcome")
    sub.add_parser("selftest", parents=[common], help="run the property checks")
    return parser


def _resolve_seed(args, config_seed: int | None = None) -> int:
    if args.seed is not None:
        return args.seed
    if config_seed is not None:
        return config_seed
    return int(os.environ.get("EQE_SEED", "0"))


def build_config(args) -> SweepConfig:
    """Config file first, then any flags given on the command line."""
    if args.config is not None:
        text = args.config.read_text()
        config = SweepConfig.from_json(text)
        file_seed_given = "seed" in json.loads(text)
    else:
        config = SweepConfig()
        file_seed_given = False
    scenario = getattr(args, "scenario", None)
    if scenario is not None:
        config.scenario = SCENARIO_ALIASES.get(scenario.lower(), scenario)
    if getattr(args, "stage", None) is not None:
        config.stage = args.stage
    if args.phi_h is not None:
        config.phi_h_range = _as_range(args.phi_h)
    if args.phi_v is not None:
        config.phi_v_range = _as_range(args.phi_v)
    if args.phi is not None:
        config.phi = args.phi
    for name in ("resolution", "mode", "shots", "readout_error", "mitigate", "format", "jobs"):
        value = getattr(args, name)
        if value is not None:
            setattr(config, name, value)
    if args.out is not None:
        config.out = str(args.out)
    config.seed = _resolve_seed(args, config.seed if file_seed_given else None)
    return config.validate()


def _as_range(value) -> tuple[float, float]:
    if isinstance(value, tuple):
        return value
    return (value, value)


def _emit(text: str, out: Path | str | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(out).write_text(text)


def _fail(failures: list) -> int:
    sys.stderr.write(json.dumps({"ok": False, "failures": failures}, indent=2) + "\n")
    return 1


def cmd_sweep(args) -> int:
    config = build_config(args)
    rows = sweeps.run_sweep(config)
    text = sweeps.rows_to_csv(rows) if config.format == "csv" else sweeps.rows_to_json(rows)
    _emit(text, config.out)
    failures = sweeps.check_rows(rows)
    return _fail(failures) if failures else 0


def cmd_scenario(args) -> int:
    names = sorted(sweeps.SCENARIO_REPORTS) if args.name == "all" else [args.name]
    try:
        reports = [sweeps.run_scenario_report(n) for n in names]
    except ValueError as exc:
        return _fail([{"check": "scenario", "detail": str(exc)}])
    payload = reports[0] if len(reports) == 1 else reports
    _emit(json.dumps(payload, indent=2), args.out)
    failed = [
        {"check": r["scenario"], "max_deviation": r["max_deviation"]}
        for r in reports
        if not r["verified"]
    ]
    return _fail(failed) if failed else 0


def _point(args) -> VppbsParams:
    h = args.phi_h if args.phi_h is not None else 0.0
    v = args.phi_v if args.phi_v is not None else math.pi
    if isinstance(h, tuple) or isinstance(v, tuple):
        raise ConfigError("phi_h/phi_v", "this command takes single angles, not ranges")
    return VppbsParams(h, v)


def _triple(t) -> dict | None:
    if t is None:
        return None
    return {"P": t.predictability, "C": t.coherence, "S": t.entanglement}


def cmd_tomo(args) -> int:
    params = _point(args)
    base = SweepConfig()
    noise = (
        SweepConfig(readout_error=args.readout_error).noise if args.readout_error else None
    )
    plan = ShotPlan(args.shots or base.shots, _resolve_seed(args))
    mitigate = True if args.mitigate is None else args.mitigate
    result = two_step_experiment(
        params, plan, noise, mitigate_readout=mitigate, exact=(args.mode == "exact")
    )
    exact_before = closed_form_before(params)
    try:
        exact_after = closed_form_after(params, BellOutcome.PSI_PLUS)
    except ZeroProbabilityOutcome:
        exact_after = None
    report = {
        "phi_H": params.phi_H,
        "phi_V": params.phi_V,
        "shots_per_basis": plan.shots_per_basis,
        "seed": plan.rng_seed,
        "mitigated": bool(mitigate and noise is not None),
        "before": _triple(result.before),
        "after_plus": _triple(result.after_plus),
        "prob_plus": result.prob_plus,
        "exact_before": _triple(exact_before),
        "exact_after_plus": _triple(exact_after),
        "physicality_adjusted": [result.step1.physicality_adjusted, result.step2.physicality_adjusted],
    }
    _emit(json.dumps(report, indent=2), args.out)
    return 0


def cmd_probabilities(args) -> int:
    params = _point(args)
    phi = args.phi if args.phi is not None else 0.0
    rows = []
    for outcome in BellOutcome:
        try:
            p0, p1, prob = output_probabilities(CircuitParams(params, phi), outcome)
        except ZeroProbabilityOutcome as exc:
            p0 = p1 = None
            prob = exc.probability
        rows.append(
            {"outcome": outcome.label, "p_outcome": prob, "p_detector0": p0, "p_detector1": p1}
        )
    if args.format == "csv":
        lines = ["outcome,p_outcome,p_detector0,p_detector1"]
        for r in rows:
            cells = [r["outcome"]] + ["" if r[k] is None else repr(r[k]) for k in list(r)[1:]]
            lines.append(",".join(cells))
        _emit("\n".join(lines) + "\n", args.out)
    else:
        payload = {"phi_H": params.phi_H, "phi_V": params.phi_V, "phi": phi, "outcomes": rows}
        _emit(json.dumps(payload, indent=2), args.out)
    return 0


def cmd_selftest(args) -> int:
    results = run_selftest()
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name:32s} max_dev={r.max_deviation:.3e} ({r.seconds:.2f}s)")
    failed = [r.as_dict() for r in results if not r.passed]
    return _fail(failed) if failed else 0


COMMANDS = {
    "sweep": cmd_sweep,
    "scenario": cmd_scenario,
    "tomo": cmd_tomo,
    "probabilities": cmd_probabilities,
    "selftest": cmd_selftest,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s"
    )
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        return _fail([{"check": "config", "field": exc.field, "detail": str(exc)}])
    except OSError as exc:
        return _fail([{"check": "io", "detail": str(exc)}])


if __name__ == "__main__":
    sys.exit(main())
