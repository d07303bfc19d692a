"""A linear autoencoder recovers the PCA subspace.

With linear activations and a single width-k coding layer the model is a
rank-k affine map, so on a dense matrix its reconstruction MSE converges
to the rank-k truncated SVD's (the bias terms let it edge a hair below
the pure linear optimum).  This script trains such a model on a noisy
rank-5 matrix and compares against the closed-form SVD value.
"""

import numpy as np

from aecf import (Activation, Batch, SgdMomentum, low_rank_matrix,
                  parse_architecture, train_step)

RANK = 5
STEPS = 8000


def main() -> None:
    m = low_rank_matrix(200, 30, RANK, noise_sd=0.05, seed=7)

    u, s, vt = np.linalg.svd(m, full_matrices=False)
    truncated = (u[:, :RANK] * s[:RANK]) @ vt[:RANK]
    svd_mse = float(np.mean((truncated - m) ** 2))

    spec = parse_architecture(f"n,{RANK},n", activation=Activation("linear"))
    model = spec.build(m.shape[1], seed=0, dtype=np.float64)
    opt = SgdMomentum(model.parameters(), learning_rate=0.3, momentum=0.9)
    rng = np.random.default_rng(0)
    full = Batch.dense(m)
    for step in range(1, STEPS + 1):
        stats = train_step(model, full, opt, rng)
        if step % 1000 == 0:
            print(f"step {step:5d}  mse {stats.mmse:.6f}")

    out, _ = model.forward(full)
    ae_mse = float(np.mean((out - m) ** 2))
    print(f"\nrank-{RANK} SVD optimum : {svd_mse:.6f}")
    print(f"linear autoencoder : {ae_mse:.6f}  ({ae_mse / svd_mse:.4f}x optimum)")


if __name__ == "__main__":
    main()
