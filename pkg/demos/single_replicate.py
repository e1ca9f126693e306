"""Run every selector on one simulated replicate and score it.

A serially correlated design with one causal predictor. Raising ``RHO``
shows the neighbours of the causal column entering the lasso and the
Fisher selections, while DET and screen-and-clean stay sparse.

    python demos/single_replicate.py [rho]
"""

import sys

from directeffects.metrics import score, score_hct
from directeffects.selectors import METHODS, run_method
from directeffects.simgen import SerialConfig, gen_serial, simulate_replicate

SEED = 7


def main(rho=0.5):
    X = gen_serial(SerialConfig(n=1000, p=100, rho=rho), SEED)
    rep = simulate_replicate(X, 1, 0.81, SEED + 1)
    causal = rep.truth.indices[0]
    print(f"rho={rho}  causal column {causal}  intercept {rep.truth.intercept:.3f}  mean(y) {rep.y.mean():.3f}")
    print(f"{'method':<14}{'selected':<28}{'strict':>8}{'relaxed':>9}")
    cache = {}
    for name in METHODS:
        sel = run_method(name, X, rep.y, SEED + 2, cache=cache)
        strict, relaxed = score(sel, rep.truth), score_hct(sel, rep.truth, X)
        shown = ",".join(map(str, sel.selected[:8])) + (" ..." if len(sel) > 8 else "")
        print(f"{name:<14}{shown:<28}{'PF' if strict.perfect_find else '-':>8}"
              f"{'PF' if relaxed.perfect_find else '-':>9}")


if __name__ == "__main__":
    main(float(sys.argv[1]) if len(sys.argv) > 1 else 0.5)
