"""Label a training corpus with the exact solver and fit the MLP on it.

    python scripts/build_corpus.py --out runs/corpus

Writes train.csv (16 full-mode features plus label) and model.json.
"""
import argparse
import time
from pathlib import Path

import numpy as np

from tardysched.exact import solve_exact
from tardysched.features import feature_names, featurize
from tardysched.formats import save_training_data
from tardysched.generator import generate_many
from tardysched.oracle import TrainConfig, train


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--families", default="1,11,12,13,14,15")
    ap.add_argument("--plan", default="100:320,50:60", help="comma list of n:count per family")
    ap.add_argument("--seed", type=int, default=1000)
    ap.add_argument("--time-limit", type=float, default=60.0)
    ap.add_argument("--epochs", type=int, default=20)
    ap.add_argument("--out", default="runs/corpus")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    families = [int(f) for f in args.families.split(",")]
    plan = [tuple(int(v) for v in item.split(":")) for item in args.plan.split(",")]

    X, y, dropped = [], [], 0
    t0 = time.perf_counter()
    for n, count in plan:
        for family in families:
            for inst in generate_many(family, n, args.seed, count):
                result = solve_exact(inst, args.time_limit)
                if not result.optimal:
                    dropped += 1
                    continue
                X.append(featurize(inst).rows)
                y.append(result.labels.astype(np.int64))
            print(f"family {family:2d} n={n}: {time.perf_counter() - t0:.0f}s", flush=True)
    X, y = np.vstack(X), np.concatenate(y)
    save_training_data(out / "train.csv", feature_names("full"), X, y)
    print(f"{len(X)} rows, early share {y.mean():.3f}, {dropped} unproven instances dropped")

    result = train(X, y, TrainConfig(seed=0, epochs=args.epochs))
    for h in result.history:
        print(f"epoch {h['epoch']:2d} train_acc {h['train_acc']:.4f} val_acc {h['val_acc']:.4f}")
    result.model.save(out / "model.json")


if __name__ == "__main__":
    main()
