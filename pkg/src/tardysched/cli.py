"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 infeasible input, 3 internal invariant violation.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import bench
from .baselines import GAParams, HBAParams
from .core import InfeasibleInstanceError, InvariantViolation
from .exact import solve_exact
from .features import feature_names, featurize
from .formats import (instance_filename, load_instance, load_training_data, save_instance,
                      save_training_data)
from .generator import GenerationError, generate_many
from .oracle import MlpModel, TrainConfig, train
from .scheduler import edf_feasible

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _str_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def cmd_generate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for inst in generate_many(args.family, args.n, args.seed, args.count):
        save_instance(inst, out / instance_filename(inst))
    _log(f"wrote {args.count} instances to {out}")
    return EXIT_OK


def cmd_label(args) -> int:
    files = sorted(Path(args.inp).glob("*.txt"))
    if not files:
        raise UsageError(f"no instance files in {args.inp}")
    rows, labels, skipped = [], [], 0
    for path in files:
        inst = load_instance(path)
        if not edf_feasible(inst):
            raise InfeasibleInstanceError(f"{path.name} admits no feasible schedule")
        result = solve_exact(inst, args.time_limit)
        if not result.optimal:
            # an unproven incumbent is not a ground-truth label
            skipped += 1
            _log(f"{path.name}: optimum not proven within {args.time_limit}s, skipped")
            continue
        rows.append(featurize(inst, "full").rows)
        labels.append(result.labels.astype(np.int64))
    if not rows:
        raise UsageError("no instance was solved to optimality")
    save_training_data(args.out, feature_names("full"), np.vstack(rows), np.concatenate(labels))
    _log(f"labelled {len(rows)} instances ({skipped} skipped) into {args.out}")
    return EXIT_OK


def cmd_train(args) -> int:
    names, X, y = load_training_data(args.data)
    if names != feature_names("full"):
        raise UsageError("training file columns are not the 16 full-mode features")
    config = TrainConfig(learning_rate=args.lr, epochs=args.epochs, seed=args.seed,
                         batch_size=args.batch_size)
    result = train(X, y, config)
    result.model.save(args.out)
    for h in result.history:
        print(f"epoch {h['epoch']:3d}  train_loss {h['train_loss']:.4f}  train_acc {h['train_acc']:.4f}"
              f"  val_loss {h['val_loss']:.4f}  val_acc {h['val_acc']:.4f}")
    return EXIT_OK


def cmd_schedule(args) -> int:
    inst = load_instance(args.instance)
    if not edf_feasible(inst):
        raise InfeasibleInstanceError("instance admits no feasible schedule")
    model = MlpModel.load(args.model)
    config = bench.PipelineConfig(model, args.alpha, args.gamma, args.beta)
    run = bench.run_pipeline(inst, config)
    s = run.schedule
    print(f"objective {s.objective!r}")
    print("timings " + " ".join(f"{k}={v:.6f}" for k, v in run.timings.items()))
    print("position,id,completion,status")
    for pos, j in enumerate(s.order.tolist()):
        print(f"{pos},{j},{s.completion_times[j]:.6f},{'early' if s.early[j] else 'tardy'}")
    return EXIT_OK


def cmd_bench(args) -> int:
    model = MlpModel.load(args.model) if args.model else None
    if "proposed" in args.methods and model is None:
        raise UsageError("method 'proposed' needs --model")
    config = bench.ExperimentConfig(
        pipeline=bench.PipelineConfig(model, args.alpha, args.gamma, args.beta, args.timeout),
        heuristic_budget=args.heuristic_budget,
        ga=GAParams(generations=args.generations),
        hba=HBAParams(iterations=args.generations),
    )
    records = bench.run_experiment(args.families, args.sizes, args.methods, args.count, args.seed,
                                   config, out_dir=args.out)
    print(bench.aggregate_table(records), end="")
    return EXIT_OK


def cmd_calibrate(args) -> int:
    model = MlpModel.load(args.model)
    _, X, y = load_training_data(args.data)
    report = bench.calibration_report(model, X, y)
    Path(args.out).write_text(report.to_markdown())
    print(f"error rate in [0.45, 0.55]: {report.pooled_error((0.45, 0.55)):.4f}")
    print(f"error rate in [0, 0.05] and [0.95, 1]: {report.pooled_error((0, 0.05), (0.95, 1)):.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tardysched", description="Weighted early-job scheduling with hard deadlines.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write seeded random instances")
    g.add_argument("--family", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    lab = sub.add_parser("label", help="solve instances exactly and write training rows")
    lab.add_argument("--in", dest="inp", required=True)
    lab.add_argument("--time-limit", type=float, default=60.0)
    lab.add_argument("--out", required=True)
    lab.set_defaults(func=cmd_label)

    t = sub.add_parser("train", help="fit the MLP on a training file")
    t.add_argument("--data", required=True)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--epochs", type=int, default=20)
    t.add_argument("--lr", type=float, default=1e-3)
    t.add_argument("--batch-size", type=int, default=256)
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_train)

    s = sub.add_parser("schedule", help="run the pipeline on one instance")
    s.add_argument("--instance", required=True)
    s.add_argument("--model", required=True)
    s.add_argument("--alpha", type=float, default=0.5)
    s.add_argument("--gamma", type=int, default=bench.DEFAULT_GAMMA)
    s.add_argument("--beta", type=float, default=bench.DEFAULT_BETA)
    s.set_defaults(func=cmd_schedule)

    b = sub.add_parser("bench", help="compare methods against exact optima")
    b.add_argument("--families", type=_int_list, required=True)
    b.add_argument("--sizes", type=_int_list, required=True)
    b.add_argument("--methods", type=_str_list, default=list(bench.METHODS))
    b.add_argument("--count", type=int, default=100)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--timeout", type=float, default=300.0, help="exact-solver limit per instance")
    b.add_argument("--out", required=True)
    b.add_argument("--model")
    b.add_argument("--alpha", type=float, default=0.5)
    b.add_argument("--gamma", type=int, default=bench.DEFAULT_GAMMA)
    b.add_argument("--beta", type=float, default=bench.DEFAULT_BETA)
    b.add_argument("--generations", type=int, default=200, help="GA generations and HBA iterations")
    b.add_argument("--heuristic-budget", type=float, default=300.0)
    b.set_defaults(func=cmd_bench)

    c = sub.add_parser("calibrate", help="per-bin error rates of a model on labelled rows")
    c.add_argument("--model", required=True)
    c.add_argument("--data", required=True)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_calibrate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InfeasibleInstanceError, GenerationError) as exc:
        _log(f"infeasible input: {exc}")
        return EXIT_INFEASIBLE
    except InvariantViolation as exc:
        _log(f"internal invariant violated: {exc}")
        return EXIT_INTERNAL
    # ValueError covers ValidationError, TrainingError and malformed JSON
    except (UsageError, ValueError, OSError, KeyError) as exc:
        _log(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
