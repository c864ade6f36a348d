"""Per-bin error rates of a trained model on its validation rows.

    python scripts/calibration.py --data runs/corpus/train.csv --model runs/corpus/model.json
"""
import argparse

from tardysched.bench import calibration_report
from tardysched.formats import load_training_data
from tardysched.oracle import MlpModel, TrainConfig, train


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--data", required=True)
    ap.add_argument("--model", help="skip retraining; score every row with this model")
    args = ap.parse_args()

    _, X, y = load_training_data(args.data)
    if args.model:
        model, rows = MlpModel.load(args.model), slice(None)
    else:
        res = train(X, y, TrainConfig(seed=0))
        model, rows = res.model, res.val_idx
    report = calibration_report(model, X[rows], y[rows])
    print(report.to_markdown(), end="")
    print(f"\nmiddle [0.45, 0.55]: {report.pooled_error((0.45, 0.55)):.4f}")
    print(f"tails [0, 0.05] + [0.95, 1]: {report.pooled_error((0, 0.05), (0.95, 1)):.4f}")


if __name__ == "__main__":
    main()
