"""Parameter sweeps and named scenario reports, emitted as CSV rows or JSON."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Any, Iterable, Sequence

import numpy as np

from .ccr import CcrTriple
from .circuit import BellOutcome, Stage
from .erasure import erase
from .gates import TWO_PI, VppbsParams
from .sampling import DEFAULT_SHOTS, ReadoutNoise, ShotPlan
from .tomography import two_step_experiment

CSV_COLUMNS = (
    "phi_H",
    "phi_V",
    "phi",
    "prob_psi_plus",
    "prob_psi_minus",
    "P_before",
    "C_before",
    "S_before",
    "ccr_sum",
    "P_after_plus",
    "C_after_plus",
    "P_after_minus",
    "C_after_minus",
    "delta_C_plus",
    "delta_C_minus",
    "mode",
    "seed",
)
FLOAT_COLUMNS = CSV_COLUMNS[:15]
DERIVED_COLUMNS = ("ccr_sum", "delta_C_plus", "delta_C_minus")

SCENARIOS = ("grid2d", "phiV_zero", "phiH_eq_pi_plus_phiV", "custom")
MODES = ("exact", "emulated")
CCR_TOL = 1e-10


class ConfigError(ValueError):
    """Invalid sweep configuration; ``field`` names the offending entry."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class SweepConfig:
    scenario: str = "grid2d"
    resolution: int = 33
    phi_h_range: tuple[float, float] = (0.0, TWO_PI)
    phi_v_range: tuple[float, float] = (0.0, TWO_PI)
    phi: float = 0.0
    points: list[tuple[float, float]] | None = None
    mode: str = "exact"
    shots: int = DEFAULT_SHOTS
    seed: int = 0
    readout_error: list[tuple[float, float]] | None = None
    mitigate: bool = True
    depolarizing: float = 0.0
    stage: str = "Psi2"
    out: str | None = None
    format: str = "csv"
    jobs: int = 1

    def validate(self) -> SweepConfig:
        if self.scenario not in SCENARIOS:
            raise ConfigError("scenario", f"must be one of {SCENARIOS}, got {self.scenario!r}")
        if self.mode not in MODES:
            raise ConfigError("mode", f"must be one of {MODES}, got {self.mode!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError("format", f"must be csv or json, got {self.format!r}")
        if int(self.resolution) < 2:
            raise ConfigError("resolution", f"must be >= 2, got {self.resolution}")
        if int(self.shots) < 1:
            raise ConfigError("shots", f"must be positive, got {self.shots}")
        if int(self.jobs) < 1:
            raise ConfigError("jobs", f"must be positive, got {self.jobs}")
        for name in ("phi_h_range", "phi_v_range"):
            lo, hi = getattr(self, name)
            if not (0.0 <= lo <= hi <= TWO_PI + 1e-12):
                raise ConfigError(name, f"range must satisfy 0 <= lo <= hi <= 2pi, got {(lo, hi)}")
        if self.scenario == "custom" and not self.points:
            raise ConfigError("points", "the custom scenario needs an explicit list of [phi_H, phi_V]")
        if self.readout_error is not None:
            if len(self.readout_error) not in (1, 3):
                raise ConfigError("readout_error", "give one (p01, p10) pair or one per qubit")
            for pair in self.readout_error:
                if len(pair) != 2 or not all(0.0 <= p < 0.5 for p in pair):
                    raise ConfigError("readout_error", f"invalid flip probabilities {pair}")
        try:
            Stage.parse(self.stage)
        except ValueError as exc:
            raise ConfigError("stage", str(exc)) from None
        return self

    @property
    def plan(self) -> ShotPlan:
        return ShotPlan(int(self.shots), int(self.seed))

    @property
    def noise(self) -> ReadoutNoise | None:
        if not self.readout_error:
            return None
        pairs = list(self.readout_error)
        if len(pairs) == 1:
            pairs = pairs * 3
        return ReadoutNoise.from_flips(pairs)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SweepConfig:
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(unknown[0], "unknown configuration field")
        data = dict(data)
        for name in ("phi_h_range", "phi_v_range"):
            if name in data:
                data[name] = tuple(parse_angle(v) for v in data[name])
        if "phi" in data:
            data["phi"] = parse_angle(data["phi"])
        if data.get("points") is not None:
            data["points"] = [tuple(parse_angle(v) for v in p) for p in data["points"]]
        if data.get("readout_error") is not None:
            data["readout_error"] = [tuple(float(v) for v in p) for p in data["readout_error"]]
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> SweepConfig:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {exc.lineno}", exc.msg) from None
        if not isinstance(data, dict):
            raise ConfigError("config", "top level must be a JSON object")
        return cls.from_dict(data)


def parse_angle(value) -> float:
    """Radians, or a multiple of pi written as ``"pi:0.5"``."""
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip()
    if text.lower().startswith("pi:"):
        return float(text[3:]) * math.pi
    return float(text)


def _axis(bounds: tuple[float, float], n: int) -> np.ndarray:
    lo, hi = bounds
    return np.array([lo]) if lo == hi else np.linspace(lo, hi, n)


def grid_points(config: SweepConfig) -> list[tuple[float, float]]:
    """``(phi_H, phi_V)`` pairs in row order; ``phi_H`` is the outer loop for 2D grids.

    An axis whose range collapses to one angle contributes that angle once.
    """
    n = int(config.resolution)
    if config.scenario == "grid2d":
        hs = _axis(config.phi_h_range, n)
        vs = _axis(config.phi_v_range, n)
        return [(float(h), float(v)) for h in hs for v in vs]
    if config.scenario == "phiV_zero":
        return [(float(h), 0.0) for h in _axis(config.phi_h_range, n)]
    if config.scenario == "phiH_eq_pi_plus_phiV":
        out = []
        for v in _axis(config.phi_v_range, n):
            h = math.pi + float(v)
            out.append((h - TWO_PI if h > TWO_PI else h, float(v)))
        return out
    return [tuple(map(float, p)) for p in config.points]


def _triple_or_none(t: CcrTriple | None, attr: str) -> float | None:
    return None if t is None else getattr(t, attr)


def recompute_derived(row: dict[str, Any]) -> dict[str, Any]:
    """Fill ``ccr_sum`` and ``delta_C_*`` from the primary columns of ``row``."""
    row = dict(row)
    row["ccr_sum"] = row["P_before"] + row["C_before"] + row["S_before"]
    for sign in ("plus", "minus"):
        after = row[f"C_after_{sign}"]
        row[f"delta_C_{sign}"] = None if after is None else after - row["C_before"]
    return row


def _row(phi_h, phi_v, phi, probs, before, after_plus, after_minus, mode, seed) -> dict[str, Any]:
    row = {
        "phi_H": phi_h,
        "phi_V": phi_v,
        "phi": phi,
        "prob_psi_plus": probs[0],
        "prob_psi_minus": probs[1],
        "P_before": before.predictability,
        "C_before": before.coherence,
        "S_before": before.entanglement,
        "P_after_plus": _triple_or_none(after_plus, "predictability"),
        "C_after_plus": _triple_or_none(after_plus, "coherence"),
        "P_after_minus": _triple_or_none(after_minus, "predictability"),
        "C_after_minus": _triple_or_none(after_minus, "coherence"),
        "mode": mode,
        "seed": seed,
    }
    row = recompute_derived(row)
    return {k: row[k] for k in CSV_COLUMNS}


def evaluate_point(config: SweepConfig, index: int, phi_h: float, phi_v: float) -> dict[str, Any]:
    params = VppbsParams(phi_h, phi_v)
    if config.mode == "exact":
        rec = erase(params, config.phi, Stage.parse(config.stage))
        return _row(
            params.phi_H, params.phi_V, rec.phi,
            (rec.prob_psi_plus, rec.prob_psi_minus),
            rec.before, rec.after_plus, rec.after_minus, "exact", config.seed,
        )
    plan = config.plan
    res = two_step_experiment(
        params,
        plan,
        config.noise,
        mitigate_readout=config.mitigate,
        depolarizing=config.depolarizing,
        rng=plan.rng(index),
    )
    return _row(
        params.phi_H, params.phi_V, config.phi,
        (res.prob_plus, res.prob_minus),
        res.before, res.after_plus, res.after_minus, "emulated", config.seed,
    )


def _evaluate_task(args):
    return evaluate_point(*args)


def run_sweep(config: SweepConfig) -> list[dict[str, Any]]:
    """Evaluate every grid point; rows come back in grid order whatever ``jobs`` is."""
    config.validate()
    tasks = [(config, i, h, v) for i, (h, v) in enumerate(grid_points(config))]
    if int(config.jobs) == 1:
        return [_evaluate_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=int(config.jobs)) as pool:
        return list(pool.map(_evaluate_task, tasks, chunksize=max(1, len(tasks) // (4 * config.jobs))))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows: Iterable[dict[str, Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def read_csv(text: str) -> list[dict[str, Any]]:
    """Parse rows written by ``rows_to_csv``; empty fields become ``None``."""
    rows = []
    for raw in csv.DictReader(io.StringIO(text)):
        row: dict[str, Any] = {}
        for col in CSV_COLUMNS:
            cell = raw[col]
            if col in FLOAT_COLUMNS:
                row[col] = float(cell) if cell != "" else None
            elif col == "seed":
                row[col] = int(cell) if cell != "" else None
            else:
                row[col] = cell
        rows.append(row)
    return rows


def rows_to_json(rows: Sequence[dict[str, Any]]) -> str:
    return json.dumps(list(rows), indent=2)


def check_rows(rows: Sequence[dict[str, Any]], tol: float = CCR_TOL) -> list[dict[str, Any]]:
    """Invariant violations in exact-mode rows (emulated rows are only checked for NaNs)."""
    failures = []
    for i, row in enumerate(rows):
        values = [row[c] for c in FLOAT_COLUMNS if row[c] is not None]
        if any(not math.isfinite(v) for v in values):
            failures.append({"row": i, "check": "finite", "detail": "non-finite value"})
            continue
        if row["mode"] != "exact":
            continue
        if abs(row["ccr_sum"] - 0.5) > tol:
            failures.append({"row": i, "check": "ccr_sum", "value": row["ccr_sum"]})
        total = row["prob_psi_plus"] + row["prob_psi_minus"]
        if abs(total - 1.0) > tol:
            failures.append({"row": i, "check": "prob_total", "value": total})
        for sign in ("plus", "minus"):
            p, c = row[f"P_after_{sign}"], row[f"C_after_{sign}"]
            if p is not None and abs(p + c - 0.5) > tol:
                failures.append({"row": i, "check": f"ccr_after_{sign}", "value": p + c})
    return failures


# ---------------------------------------------------------------- scenarios


def _triple_dict(t: CcrTriple | None) -> dict[str, float] | None:
    if t is None:
        return None
    return {"P": t.predictability, "C": t.coherence, "S": t.entanglement}


def _close(t: CcrTriple | None, target: Sequence[float | None]) -> float:
    """Largest deviation of ``t`` from ``target`` (``None`` entries are not checked)."""
    if t is None:
        return math.inf
    return max(
        (abs(a - b) for a, b in zip(t.as_tuple(), target) if b is not None), default=0.0
    )


@dataclass
class ScenarioSpec:
    name: str
    claim: str
    points: list[tuple[float, float]]
    check: Any = field(repr=False)


def _angles(n: int = 9) -> list[float]:
    return [float(a) for a in np.linspace(0.0, TWO_PI, n)]


def _check_pbs(rec):
    dev = _close(rec.before, (0.0, 0.0, 0.5))
    for outcome in (BellOutcome.PSI_PLUS, BellOutcome.PSI_MINUS):
        dev = max(dev, _close(rec.after(outcome), (0.0, 0.5, 0.0)))
        dev = max(dev, abs(rec.prob(outcome) - 0.5))
    return dev


def _check_equal_t(rec):
    dev = abs(rec.before.coherence)
    for outcome in (BellOutcome.PSI_PLUS, BellOutcome.PSI_MINUS):
        if rec.after(outcome) is not None:
            dev = max(dev, _close(rec.after(outcome), (0.5, 0.0, 0.0)))
    return dev


def _check_conjugate_t(rec):
    dev = abs(rec.before.entanglement)
    for outcome in (BellOutcome.PSI_PLUS, BellOutcome.PSI_MINUS):
        after = rec.after(outcome)
        if after is not None:
            dev = max(dev, _close(after, rec.before.as_tuple()))
    return dev


def _check_anti_diagonal(rec):
    dev = abs(rec.before.predictability)
    for outcome in (BellOutcome.PSI_PLUS, BellOutcome.PSI_MINUS):
        dev = max(dev, _close(rec.after(outcome), (0.0, 0.5, 0.0)))
    return dev


def _check_both_reflect(rec):
    dev = _close(rec.before, (0.5, 0.0, 0.0))
    dev = max(dev, rec.prob_psi_plus)
    return max(dev, _close(rec.after_minus, (0.5, 0.0, 0.0)))


def _wrap(h: float) -> float:
    return h - TWO_PI if h > TWO_PI else h


SCENARIO_REPORTS = {
    "pbs-limit": ScenarioSpec(
        "pbs-limit",
        "entanglement -> coherence: before (P, C, S) = (0, 0, 1/2), after either Psi outcome C = 1/2",
        [(0.0, math.pi)],
        _check_pbs,
    ),
    "equal-T": ScenarioSpec(
        "equal-T",
        "entanglement -> predictability: with T_H = T_V, C = 0 before and P = 1/2 after",
        [(a, a) for a in _angles()],
        _check_equal_t,
    ),
    "conjugate-T": ScenarioSpec(
        "conjugate-T",
        "unchanged: with T_H = T_V*, S = 0 before and the triple is the same after",
        [(TWO_PI - a, a) for a in _angles()],
        _check_conjugate_t,
    ),
    "anti-diagonal": ScenarioSpec(
        "anti-diagonal",
        "entanglement -> coherence: with T_H = -R_V, P = 0 before and C = 1/2 after",
        [(_wrap(math.pi + a), a) for a in _angles()],
        _check_anti_diagonal,
    ),
    "both-reflect": ScenarioSpec(
        "both-reflect",
        "no erasure: with both polarizations reflected, P = 1/2 before and after, Psi+ never occurs",
        [(math.pi, math.pi)],
        _check_both_reflect,
    ),
}


def run_scenario_report(name: str, tol: float = CCR_TOL) -> dict[str, Any]:
    """Evaluate a named special case and check its qualitative claim."""
    try:
        spec = SCENARIO_REPORTS[name]
    except KeyError:
        raise ValueError(f"unknown scenario {name!r}; choose from {sorted(SCENARIO_REPORTS)}") from None
    points, worst = [], 0.0
    for phi_h, phi_v in spec.points:
        rec = erase(VppbsParams(phi_h, phi_v))
        dev = spec.check(rec)
        worst = max(worst, dev)
        points.append(
            {
                "phi_H": rec.vppbs.phi_H,
                "phi_V": rec.vppbs.phi_V,
                "prob_psi_plus": rec.prob_psi_plus,
                "prob_psi_minus": rec.prob_psi_minus,
                "before": _triple_dict(rec.before),
                "after_plus": _triple_dict(rec.after_plus),
                "after_minus": _triple_dict(rec.after_minus),
                "deviation": dev,
            }
        )
    return {
        "scenario": spec.name,
        "claim": spec.claim,
        "verified": bool(worst <= tol),
        "max_deviation": worst,
        "tolerance": tol,
        "points": points,
    }

