"""Validation accuracy of the MLP under the three feature representations.

    python scripts/ablation.py --family 1 --n 100 --count 320
"""
import argparse

import numpy as np

from tardysched.exact import solve_exact
from tardysched.features import featurize
from tardysched.generator import generate_many
from tardysched.oracle import TrainConfig, train


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--family", type=int, default=1)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--count", type=int, default=320)
    ap.add_argument("--seed", type=int, default=1000)
    args = ap.parse_args()

    insts = generate_many(args.family, args.n, args.seed, args.count)
    results = [solve_exact(i) for i in insts]
    kept = [(i, r) for i, r in zip(insts, results) if r.optimal]
    y = np.concatenate([r.labels for _, r in kept]).astype(np.int64)
    print(f"{len(kept)} instances, {len(y)} rows")
    for mode in ("minimal", "aggregated", "full"):
        X = np.vstack([featurize(i, mode).rows for i, _ in kept])
        res = train(X, y, TrainConfig(seed=0))
        print(f"{mode:10s} width {X.shape[1]:2d}  val_acc {res.val_accuracy:.4f}  "
              f"train_acc {res.history[-1]['train_acc']:.4f}")


if __name__ == "__main__":
    main()
