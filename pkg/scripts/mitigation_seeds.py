"""How much readout mitigation helps, seed by seed, on the phi_V = 0 cut."""

import argparse

import numpy as np

from eqesim.sweep import SweepConfig, run_sweep

CURVES = ("P_before", "C_before", "S_before", "P_after_plus", "C_after_plus")


def mean_dev(rows, exact):
    return np.mean(
        [abs(r[c] - x[c]) for r, x in zip(rows, exact) for c in CURVES if r[c] is not None and x[c] is not None]
    )


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--resolution", type=int, default=17)
    ap.add_argument("--shots", type=int, default=8192)
    args = ap.parse_args()

    exact = run_sweep(SweepConfig("phiV_zero", resolution=args.resolution))
    print("seed  mitigated  raw")
    for seed in range(args.seeds):
        common = dict(resolution=args.resolution, mode="emulated", shots=args.shots, seed=seed,
                      readout_error=[(0.05, 0.03)])
        on = mean_dev(run_sweep(SweepConfig("phiV_zero", mitigate=True, **common)), exact)
        off = mean_dev(run_sweep(SweepConfig("phiV_zero", mitigate=False, **common)), exact)
        print(f"{seed:4d}  {on:9.4f}  {off:.4f}")


if __name__ == "__main__":
    main()
