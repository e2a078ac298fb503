"""Which solver route the maximization step takes, as constraint strength grows.

Fits random blob data with mixed-sign constraints over a range of beta and
prints the route counts, violations of the convexity implication (D PSD but reduced Hessian
indefinite, which should never happen) and the largest objective rise.
"""

from __future__ import annotations

import argparse
from collections import Counter

import numpy as np

from fdc.core import ConstraintSet, FdcConfig
from fdc.mem import fit


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=10)
    ap.add_argument("--betas", type=lambda t: [float(v) for v in t.split(",")], default=[0.0, 0.1, 1.0, 10.0])
    args = ap.parse_args()

    for beta in args.betas:
        routes, violations, worst = Counter(), 0, -np.inf
        for i in range(args.instances):
            rng = np.random.default_rng(i)
            X = rng.normal(size=(40, 2)) + np.repeat(rng.normal(scale=3, size=(2, 2)), 20, axis=0)
            pairs = {tuple(sorted(rng.choice(40, 2, replace=False))) for _ in range(15)}
            cons = ConstraintSet.from_triples([(p, q, rng.choice([-1, 1]) * rng.uniform(0.1, 1)) for p, q in pairs])
            model = fit(X, cons, FdcConfig(k_max=3, beta=beta, seed=i))
            routes.update(model.route_counts)
            violations += model.reduction_psd_violations
            worst = max(worst, float(np.max(np.diff(model.stable_trace()), initial=-np.inf)))
        print(f"beta={beta:<6} routes={dict(sorted(routes.items()))} violations={violations} max rise={worst:.1e}")


if __name__ == "__main__":
    main()
