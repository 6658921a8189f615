"""How reconstruction quality depends on the sampling ratio m/n.

Sweeps ratios from heavy undersampling (0.2) to oversampling (3.0) for a
correlation solver, a least-squares solver and the two compressive-
sensing solvers, averaging over a few seeds.  The compressive solvers
stay usable well below ratio 1 while the others need m >= n.
"""

import numpy as np

from spi_recon.bench import run_cell

RATIOS = [0.2, 0.5, 1.0, 2.0, 3.0]
SOLVERS = ["dgi", "cgd", "cs-dct", "cs-tv"]
REPEATS = 3
SIDE = 32


def main():
    print(f"scene=blocks size={SIDE}x{SIDE} clean, mean rmse over "
          f"{REPEATS} seeds")
    header = "ratio " + "".join(f"{s:>9s}" for s in SOLVERS)
    print(header)
    for ratio in RATIOS:
        cells = []
        for solver in SOLVERS:
            rows = [run_cell("blocks", solver, ratio, SIDE, SIDE, 0.0, rep,
                             base_seed=11)
                    for rep in range(REPEATS)]
            vals = [r.rmse for r in rows if r.status == "ok"]
            cells.append(f"{np.mean(vals):9.4f}" if vals else f"{'--':>9s}")
        print(f"{ratio:5.1f} " + "".join(cells))


if __name__ == "__main__":
    main()
