"""A small serial-correlation grid from config to figure.

Runs a reduced version of the correlation sweep (p=50, 4 datasets x 5
replicates per cell), writes the results table, summarizes it and draws
the four-panel figure for both scorings. Takes a few minutes on one core.

    python demos/small_grid.py [output_dir]
"""

import sys
from pathlib import Path

from directeffects.bench import ExperimentConfig, run, summarize
from directeffects.bench.plotting import FigureSpec, plot

CONFIG = """
[experiment]
generator = serial
n = 1000
p = 50
rho = 0, 0.5, 0.9, 0.99
effect = 0.81
datasets = 4
replicates = 5
seed = 11
hct = true

[methods]
use = lasso, enet, screen_clean, stability, det, fisher
"""


def main(out="demo_grid"):
    out = Path(out)
    cfg = ExperimentConfig.from_string(CONFIG)
    results = run(cfg, out)
    summary = summarize(results)
    print("results:", results)
    print("summary:", summary)
    for scoring in ("strict", "hct"):
        for path in plot(summary, out / "figures", FigureSpec(scoring=scoring)):
            print("figure: ", path)


if __name__ == "__main__":
    main(*sys.argv[1:2])
