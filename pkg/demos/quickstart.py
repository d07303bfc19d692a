"""End-to-end tour of the library API.

Generates a synthetic rating log, time-splits it, trains a small deep
autoencoder with validation tracking, evaluates on the held-out test
set, and round-trips the best model through a checkpoint to produce
top-5 recommendations for one user.
"""

from pathlib import Path

import numpy as np

from aecf import (Activation, TrainConfig, default_split, desk_corpus, evaluate,
                  fit, generate_ratings, parse_architecture, predict_rows,
                  restore_model, save_checkpoint, time_split)

OUT = Path(__file__).parent / "out" / "quickstart"


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)

    cfg = desk_corpus(seed=11, n_users=1500, n_items=300)
    records = generate_ratings(cfg)
    train, test, valid = time_split(records, default_split(cfg, split_seed=5))
    print(f"corpus: {len(records)} ratings -> train {len(train.ratings)}, "
          f"valid {len(valid)}, test {len(test)}")

    spec = parse_architecture("n,128,128,256,dp(0.65),128,128,n",
                              activation=Activation("selu"))
    model = spec.build(train.n_items, seed=0)
    print(f"model: {spec.to_string()} with {model.num_parameters():,} parameters")

    config = TrainConfig(learning_rate=0.02, batch_size=128, epochs=30, seed=0)
    result = fit(model, train, config, valid=valid,
                 metrics_out=OUT / "metrics.csv")
    print(f"best validation RMSE {result.best_valid_rmse:.4f} "
          f"at epoch {result.best_epoch}")

    model.load_parameters(result.best_params)
    print(f"test RMSE {evaluate(model, train, test):.4f}")

    ckpt = OUT / "best.ckpt"
    save_checkpoint(model, ckpt, items=train.item_tokens,
                    meta={"epochs": config.epochs})
    restored, record = restore_model(ckpt)

    user = train.user_tokens[0]
    row = predict_rows(restored, train, np.array([train.user_index[user]]),
                       clip=True)[0]
    top = np.argsort(-row)[:5]
    print(f"top-5 for {user}: "
          + ", ".join(f"{record.items[i]} ({row[i]:.2f})" for i in top))
    print(f"artifacts under {OUT}")


if __name__ == "__main__":
    main()
