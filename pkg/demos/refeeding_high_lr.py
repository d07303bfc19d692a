"""Dense re-feeding makes an aggressive learning rate usable.

Three 30-epoch runs of the same 4-layer selu model: the baseline rate,
five times the baseline, and five times the baseline with one re-feed
update per step.  The hot run alone oscillates and lands above the
baseline; re-feeding's extra dense smoothing step recovers it.
Predictions are clipped to the rating scale at evaluation time.
"""

from aecf import (Activation, DivergenceError, TrainConfig, default_split,
                  desk_corpus, fit, generate_ratings, parse_architecture,
                  time_split)

BASE_LR = 0.01
HOT_LR = 5 * BASE_LR


def main() -> None:
    cfg = desk_corpus(seed=11, n_users=1500, n_items=300)
    train, _, valid = time_split(generate_ratings(cfg),
                                 default_split(cfg, split_seed=5))

    runs = [
        (f"baseline lr={BASE_LR}", BASE_LR, 0),
        (f"hot lr={HOT_LR}", HOT_LR, 0),
        (f"hot lr={HOT_LR} + refeed", HOT_LR, 1),
    ]
    print(f"{'run':24s} {'final valid RMSE':>17s}")
    for label, lr, refeed in runs:
        spec = parse_architecture("n,128,128,128,n", activation=Activation("selu"))
        model = spec.build(train.n_items, seed=0)
        config = TrainConfig(learning_rate=lr, batch_size=128, epochs=30,
                             refeed_count=refeed, seed=0, clip_predictions=True)
        try:
            result = fit(model, train, config, valid=valid)
            print(f"{label:24s} {result.history[-1].valid_rmse:>17.4f}")
        except DivergenceError as exc:
            print(f"{label:24s} {'diverged':>17s} ({exc})")


if __name__ == "__main__":
    main()
