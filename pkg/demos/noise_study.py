"""Measurement-noise robustness at full sampling.

Adds Gaussian noise with standard deviation level * pixel_count to the
bucket measurements and tracks how each solver's error grows.  The same
noise seed is reused across levels, so each column sees the same noise
pattern scaled up.
"""

import numpy as np

from spi_recon.bench import run_cell

LEVELS = [0.0, 1e-4, 5e-4, 1e-3]
SOLVERS = ["corr", "dgi", "cgd", "cs-dct", "cs-tv"]
REPEATS = 3
SIDE = 32


def main():
    print(f"scene=blocks size={SIDE}x{SIDE} ratio=1.0, mean rmse over "
          f"{REPEATS} seeds")
    print("noise " + "".join(f"{s:>9s}" for s in SOLVERS))
    for level in LEVELS:
        cells = []
        for solver in SOLVERS:
            vals = [run_cell("blocks", solver, 1.0, SIDE, SIDE, level, rep,
                             base_seed=23).rmse
                    for rep in range(REPEATS)]
            cells.append(f"{np.mean(vals):9.4f}")
        print(f"{level:5.0e} " + "".join(cells))


if __name__ == "__main__":
    main()
