"""The ten acceptance criteria, each reported as one PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` (the lines also appear in the
terminal summary of a full run).
"""

import math
import statistics
import time

import numpy as np

import oracles
from eqesim.batch import batch_erase
from eqesim.ccr import closed_form_after, closed_form_before
from eqesim.circuit import BellOutcome, CircuitParams, Stage, output_probabilities
from eqesim.cli import main
from eqesim.erasure import erase
from eqesim.errors import ZeroProbabilityOutcome
from eqesim.gates import PBS_LIMIT, VppbsParams
from eqesim.sampling import ShotPlan, basis_probabilities, full_basis_set
from eqesim.states import DensityMatrix
from eqesim.sweep import SweepConfig, grid_points, run_scenario_report, run_sweep
from eqesim.tomography import tomography

TOL = 1e-10
PLUS, MINUS = BellOutcome.PSI_PLUS, BellOutcome.PSI_MINUS


def grid33():
    a = np.linspace(0.0, 2 * math.pi, 33)
    h, v = np.meshgrid(a, a, indexing="ij")
    return h.ravel(), v.ravel()


def test_criterion_01_ccr_identity(report):
    h, v = grid33()
    start = time.perf_counter()
    worst = 0.0
    for stage in (Stage.PSI2, Stage.PSI3, Stage.PSI4):
        out = batch_erase(h, v, 0.0, stage)
        total = out["P_before"] + out["C_before"] + out["S_before"]
        worst = max(worst, float(np.abs(total - 0.5).max()))
    elapsed = time.perf_counter() - start
    ok = worst < TOL and elapsed < 1.0
    report(1, ok, f"P+C+S = 1/2 on 33x33 grid at Psi2/3/4: max dev {worst:.2e}, {elapsed:.3f} s")
    assert ok


def test_criterion_02_closed_forms(report):
    h, v = grid33()
    start = time.perf_counter()
    num = batch_erase(h, v)
    worst, mismatched_support = 0.0, 0
    for i in range(h.size):
        p = VppbsParams(h[i], v[i])
        before = closed_form_before(p).as_tuple()
        got = (num["P_before"][i], num["C_before"][i], num["S_before"][i])
        worst = max(worst, max(abs(a - b) for a, b in zip(before, got)))
        for outcome, tag in ((PLUS, "plus"), (MINUS, "minus")):
            try:
                after = closed_form_after(p, outcome).as_tuple()
            except ZeroProbabilityOutcome:
                mismatched_support += not np.isnan(num[f"C_after_{tag}"][i])
                continue
            got = (num[f"P_after_{tag}"][i], num[f"C_after_{tag}"][i], num[f"S_after_{tag}"][i])
            worst = max(worst, max(abs(a - b) for a, b in zip(after, got)))
    elapsed = time.perf_counter() - start
    ok = worst < TOL and mismatched_support == 0 and elapsed < 1.0
    report(2, ok, f"closed forms vs numerics on 33x33 grid: max dev {worst:.2e}, {elapsed:.3f} s")
    assert ok


def test_criterion_03_pbs_limit(report):
    rec = erase(PBS_LIMIT)
    devs = [max(abs(a - b) for a, b in zip(rec.before.as_tuple(), (0.0, 0.0, 0.5)))]
    for outcome in (PLUS, MINUS):
        after = rec.after(outcome)
        devs.append(abs(after.predictability) + abs(after.coherence - 0.5))
        devs.append(abs(rec.prob(outcome) - 0.5))
    worst = max(devs)
    ok = worst < TOL
    report(3, ok, f"PBS limit before (0,0,1/2), after (0,1/2), p = 1/2: max dev {worst:.2e}")
    assert ok


def test_criterion_04_phi_v_zero_line(report):
    points = grid_points(SweepConfig("phiV_zero", resolution=33))
    records = [erase(VppbsParams(h, v)) for h, v in points]
    at_pi = [r for r in records if r.vppbs.phi_H == math.pi]
    worst = abs(at_pi[0].after_plus.coherence - 0.5)
    checked = 0
    for rec in records:
        if abs(rec.before.predictability - 0.5) < TOL:
            for outcome in (PLUS, MINUS):
                after = rec.after(outcome)
                if after is not None:
                    checked += 1
                    worst = max(worst, *(abs(a - b) for a, b in zip(after.as_tuple(), rec.before.as_tuple())))
    ok = len(at_pi) == 1 and checked > 0 and worst < TOL
    report(4, ok, f"phi_V = 0 line: C_after(pi) = 1/2, {checked} which-way points unchanged: max dev {worst:.2e}")
    assert ok


def test_criterion_05_anti_diagonal_line(report):
    points = grid_points(SweepConfig("phiH_eq_pi_plus_phiV", resolution=33))
    worst, defined = 0.0, 0
    for h, v in points:
        rec = erase(VppbsParams(h, v))
        worst = max(worst, abs(rec.before.predictability))
        worst = max(worst, abs(rec.before.coherence + rec.before.entanglement - 0.5))
        if rec.after_plus is not None:
            defined += 1
            worst = max(worst, abs(rec.after_plus.coherence - 0.5))
    ok = defined > 0 and worst < TOL
    report(5, ok, f"phi_H = pi + phi_V line: P = 0, C_after = 1/2 ({defined}/33 defined), C+S = 1/2: max dev {worst:.2e}")
    assert ok


def test_criterion_06_special_cases(report):
    lines, ok = [], True
    for name in ("conjugate-T", "equal-T", "anti-diagonal"):
        rep = run_scenario_report(name)
        good = rep["verified"] and len(rep["points"]) == 9 and rep["max_deviation"] < TOL
        ok &= good
        lines.append(f"{name} {rep['max_deviation']:.1e}")
    report(6, ok, "special cases at 9 angles each: " + ", ".join(lines))
    assert ok


def test_criterion_07_fringe(report):
    worst = 0.0
    for phi in np.linspace(0.0, 2 * math.pi, 17):
        p0, _, _ = output_probabilities(CircuitParams(PBS_LIMIT, phi), PLUS)
        worst = max(worst, abs(p0 - math.cos(phi / 2) ** 2))
    ok = worst < TOL
    report(7, ok, f"PBS limit Psi+ detector-0 = cos^2(phi/2) at 17 phases: max dev {worst:.2e}")
    assert ok


CURVES = ("P_before", "C_before", "S_before", "P_after_plus", "C_after_plus")


def _deviations(emulated, exact):
    out = []
    for e, x in zip(emulated, exact):
        for col in CURVES:
            if e[col] is not None and x[col] is not None:
                out.append(abs(e[col] - x[col]))
    return np.array(out)


def test_criterion_08_emulated_pipeline(report):
    start = time.perf_counter()
    common = dict(resolution=33, shots=8192, seed=2024, readout_error=[(0.05, 0.03)])
    on, off = [], []
    for scenario in ("phiV_zero", "phiH_eq_pi_plus_phiV"):
        exact = run_sweep(SweepConfig(scenario, resolution=33))
        mit = run_sweep(SweepConfig(scenario, mode="emulated", mitigate=True, **common))
        raw = run_sweep(SweepConfig(scenario, mode="emulated", mitigate=False, **common))
        on.append(_deviations(mit, exact))
        off.append(_deviations(raw, exact))
    on, off = np.concatenate(on), np.concatenate(off)
    elapsed = time.perf_counter() - start
    ok = on.max() < 0.08 and on.mean() < 0.03 and off.mean() > on.mean() and elapsed < 120
    report(
        8,
        ok,
        f"emulated sweeps, 8192 shots, readout (0.05, 0.03): mitigated max {on.max():.3f} "
        f"mean {on.mean():.4f}; unmitigated mean {off.mean():.4f}; {elapsed:.1f} s",
    )
    assert ok


def test_criterion_09_tomography(report):
    rng = np.random.default_rng(99)
    exact_worst = 0.0
    for _ in range(100):
        rho = oracles.random_density(rng, 3)
        hist = {b: basis_probabilities(DensityMatrix(rho), b) for b in full_basis_set(3)}
        est = tomography(hist).estimate.entries
        exact_worst = max(exact_worst, oracles.trace_distance(est, rho))
    shot_dists = []
    for seed in range(20):
        plan = ShotPlan(1_000_000, rng_seed=seed)
        gen = plan.rng()
        rho = oracles.random_density(gen, 3)
        counts = {
            b: gen.multinomial(plan.shots_per_basis, basis_probabilities(DensityMatrix(rho), b))
            for b in full_basis_set(3)
        }
        shot_dists.append(oracles.trace_distance(tomography(counts).estimate.entries, rho))
    median = statistics.median(shot_dists)
    ok = exact_worst < 1e-10 and median < 0.005
    report(9, ok, f"tomography: exact max trace dist {exact_worst:.1e}; 1e6-shot median {median:.4f} over 20 seeds")
    assert ok


def test_criterion_10_selftest(report, capsys):
    start = time.perf_counter()
    code = main(["selftest"])
    elapsed = time.perf_counter() - start
    passed = capsys.readouterr().out.count("PASS")
    ok = code == 0 and elapsed < 5.0
    report(10, ok, f"selftest: exit {code}, {passed} checks passed, {elapsed:.2f} s")
    assert ok
