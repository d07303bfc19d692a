"""A small ablation plan, end to end.

Writes a rating log, splits it with the CLI, then runs a four-point grid
(two architectures, two learning rates) over two seeds from a JSON plan.
Every (point, seed) pair is an ordinary ``aecf train`` invocation; the
per-epoch curves are folded into one long-format summary CSV.
"""

import csv
import json
from pathlib import Path

from aecf import desk_corpus, generate_ratings, load_plan, run_ablation, write_ratings_csv
from aecf.cli import main as cli_main

OUT = Path(__file__).parent / "out" / "ablation"


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    log = OUT / "ratings.csv"
    write_ratings_csv(generate_ratings(desk_corpus(seed=11, n_users=800,
                                                   n_items=200)), log)
    splits = OUT / "splits"
    status = cli_main(["split", "--input", str(log),
                       "--train-end", "2005-03-31", "--test-start", "2005-04-01",
                       "--output-dir", str(splits)])
    if status != 0:
        raise SystemExit("split failed")

    plan_path = OUT / "plan.json"
    plan_path.write_text(json.dumps({
        "name": "width_vs_lr",
        "dataset": str(splits),
        "output_dir": str(OUT / "runs"),
        "seeds": [0, 1],
        "epochs": 10,
        "grid": [
            {"arch": "n,64,64,n", "lr": 0.005},
            {"arch": "n,64,64,n", "lr": 0.02},
            {"arch": "n,128,128,n", "lr": 0.005},
            {"arch": "n,128,128,n", "lr": 0.02},
        ],
    }, indent=2))

    summary = run_ablation(load_plan(plan_path))
    print(f"summary at {summary}\n")

    # Final-epoch validation RMSE per (config, seed).
    finals = {}
    with open(summary, newline="") as fh:
        for row in csv.DictReader(fh):
            finals[(row["config"], row["seed"])] = row["valid_rmse"]
    print(f"{'config':42s} {'seed':>4s} {'final valid RMSE':>17s}")
    for (config, seed), rmse in sorted(finals.items()):
        print(f"{config:42s} {seed:>4s} {float(rmse):>17.4f}")


if __name__ == "__main__":
    main()
