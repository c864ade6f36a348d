"""Compare the pipeline with the baselines on held-out instances.

    python scripts/benchmark.py --model runs/corpus/model.json --out runs/bench
"""
import argparse

from tardysched.baselines import GAParams, HBAParams
from tardysched.bench import ExperimentConfig, PipelineConfig, aggregate_table, run_experiment
from tardysched.oracle import MlpModel


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model", required=True)
    ap.add_argument("--families", default="1,11,12,13,14,15")
    ap.add_argument("--sizes", default="100")
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--seed", type=int, default=900_000)
    ap.add_argument("--gamma", type=int, default=25)
    ap.add_argument("--ga-generations", type=int, default=10)
    ap.add_argument("--hba-iterations", type=int, default=17)
    ap.add_argument("--out", default="runs/bench")
    args = ap.parse_args()

    config = ExperimentConfig(
        PipelineConfig(MlpModel.load(args.model), gamma=args.gamma, timeout=300.0),
        ga=GAParams(generations=args.ga_generations),
        hba=HBAParams(iterations=args.hba_iterations),
    )
    families = [int(f) for f in args.families.split(",")]
    sizes = [int(n) for n in args.sizes.split(",")]
    records = run_experiment(families, sizes, ["proposed", "rule_based", "ga", "hba"], args.count,
                             args.seed, config, out_dir=args.out,
                             progress=lambda inst: print(inst.meta, flush=True))
    print(aggregate_table(records, by=("method", "family")), end="")


if __name__ == "__main__":
    main()
