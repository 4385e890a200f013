"""Exact before/after CCR columns over the full (phi_H, phi_V) grid.

    python scripts/ccr_grid.py --resolution 65 --stage Psi4 --out results/grid.csv
"""

import argparse
from pathlib import Path

from eqesim.sweep import SweepConfig, check_rows, rows_to_csv, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--resolution", type=int, default=33)
    ap.add_argument("--stage", default="Psi2")
    ap.add_argument("--phi", type=float, default=0.0)
    ap.add_argument("--out", type=Path, default=Path("results/ccr_grid.csv"))
    args = ap.parse_args()

    rows = run_sweep(SweepConfig(resolution=args.resolution, stage=args.stage, phi=args.phi))
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(rows_to_csv(rows))
    bad = check_rows(rows)
    gain = [r["delta_C_plus"] for r in rows if r["delta_C_plus"] is not None]
    print(f"{len(rows)} points -> {args.out}; invariant failures: {len(bad)}")
    print(f"restored coherence (Psi+): min {min(gain):.4f}, max {max(gain):.4f}")


if __name__ == "__main__":
    main()
