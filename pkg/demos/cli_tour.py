"""The same pipeline as quickstart.py, driven through the CLI.

Every step calls ``aecf.cli.main`` in-process with the argv a shell user
would type, so the printed commands can be copied to a terminal (with
``aecf`` installed) verbatim.
"""

from pathlib import Path

from aecf import desk_corpus, generate_ratings, write_ratings_csv
from aecf.cli import main

OUT = Path(__file__).parent / "out" / "cli_tour"


def run(argv: list[str]) -> None:
    # Flush so the echoed command precedes the CLI's own stderr notes.
    print("$ aecf " + " ".join(argv), flush=True)
    status = main(argv)
    if status != 0:
        raise SystemExit(f"command failed with exit {status}")


def demo() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    log = OUT / "ratings.csv"
    write_ratings_csv(generate_ratings(desk_corpus(seed=11, n_users=800,
                                                   n_items=200)), log)

    run(["split", "--input", str(log),
         "--train-end", "2005-03-31", "--test-start", "2005-04-01",
         "--valid-fraction", "0.5", "--seed", "0",
         "--output-dir", str(OUT / "splits")])

    run(["train", "--data", str(OUT / "splits" / "train.csv"),
         "--eval-data", str(OUT / "splits" / "valid.csv"),
         "--arch", "n,64,64,128,dp(0.65),64,64,n", "--activation", "selu",
         "--lr", "0.02", "--batch-size", "128", "--epochs", "20",
         "--refeed", "--seed", "0",
         "--checkpoint-dir", str(OUT / "ckpt"),
         "--metrics-out", str(OUT / "metrics.csv")])

    run(["evaluate", "--checkpoint", str(OUT / "ckpt" / "best.ckpt"),
         "--data", str(OUT / "splits" / "train.csv"),
         "--eval-data", str(OUT / "splits" / "test.csv"),
         "--clip-predictions"])

    run(["predict", "--checkpoint", str(OUT / "ckpt" / "best.ckpt"),
         "--data", str(OUT / "splits" / "train.csv"),
         "--users", "u00000,u00001", "--top-k", "3", "--clip-predictions",
         "--out", str(OUT / "recommendations.csv")])

    print(f"artifacts under {OUT}")


if __name__ == "__main__":
    demo()
