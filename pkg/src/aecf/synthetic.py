"""Synthetic rating-log generation for experiments and tests.

Public rating datasets are large and not redistributable, so the
experiment suite runs on a generated corpus with the statistical traits
that matter here: skewed user activity, item popularity, integer ratings
on the 1-5 scale, timestamps spanning a date range, and a latent
structure that is deliberately nonlinear (cluster-genre templates plus a
saturating taste interaction) so that model depth has something to buy.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, replace

import numpy as np

from .data import RatingRecord, SplitSpec

_EPOCH_2005 = int(dt.datetime(2005, 1, 1, tzinfo=dt.timezone.utc).timestamp())
_DAY = 86400


@dataclass(frozen=True)
class SyntheticConfig:
    """Knobs of the rating generator.  Defaults give the desk-scale corpus."""

    n_users: int = 600
    n_items: int = 300
    density: float = 0.10          # mean fraction of the catalog each user rates
    n_clusters: int = 12           # user archetypes
    n_genres: int = 10             # item groups
    cluster_amp: float = 1.6       # weight of the archetype-genre template
    cluster_gain: float = 1.8      # template saturation
    lin_amp: float = 0.35          # smooth bilinear taste term
    nl_amp: float = 0.9            # saturating bilinear taste term
    nl_gain: float = 2.5
    user_bias_sd: float = 0.35
    item_bias_sd: float = 0.25
    noise_sd: float = 0.35
    quantize: bool = True          # snap to whole stars
    n_days: int = 100
    start_epoch: int = _EPOCH_2005
    seed: int = 0

    @property
    def latent_dim(self) -> int:
        return 3

    @property
    def nl_dim(self) -> int:
        return 2


def _items_per_user(cfg: SyntheticConfig, rng: np.random.Generator) -> np.ndarray:
    """Lognormal activity counts clipped into a sane range."""
    mean = max(cfg.density * cfg.n_items, 4.0)
    raw = rng.lognormal(mean=np.log(mean), sigma=0.45, size=cfg.n_users)
    return np.clip(np.rint(raw), 4, cfg.n_items).astype(np.int64)


def generate_ratings(cfg: SyntheticConfig) -> list[RatingRecord]:
    """Draw a full rating log; deterministic in ``cfg.seed``.

    Each user rates a popularity-weighted sample of distinct items, so the
    log is free of duplicate (user, item) pairs.  Timestamps are uniform
    over the corpus date range.
    """
    rng = np.random.default_rng(cfg.seed)

    clusters = rng.integers(0, cfg.n_clusters, cfg.n_users)
    genres = rng.integers(0, cfg.n_genres, cfg.n_items)
    template = cfg.cluster_amp * np.tanh(
        cfg.cluster_gain * rng.standard_normal((cfg.n_clusters, cfg.n_genres)))
    user_bias = cfg.user_bias_sd * rng.standard_normal(cfg.n_users)
    item_bias = cfg.item_bias_sd * rng.standard_normal(cfg.n_items)
    p = rng.standard_normal((cfg.n_users, cfg.latent_dim))
    q = rng.standard_normal((cfg.n_items, cfg.latent_dim)) / np.sqrt(cfg.latent_dim)
    a = rng.standard_normal((cfg.n_users, cfg.nl_dim))
    c = rng.standard_normal((cfg.n_items, cfg.nl_dim)) / np.sqrt(cfg.nl_dim)

    # Popularity-weighted sampling without replacement, via Gumbel top-k.
    popularity = (np.arange(cfg.n_items) + 10.0) ** -0.8
    gumbel = rng.gumbel(size=(cfg.n_users, cfg.n_items))
    order = np.argsort(-(np.log(popularity)[None, :] + gumbel), axis=1)
    counts = _items_per_user(cfg, rng)
    take = np.arange(cfg.n_items)[None, :] < counts[:, None]
    item_idx = order[take]                      # C-order keeps rows contiguous
    user_idx = np.repeat(np.arange(cfg.n_users), counts)

    score = (3.0
             + template[clusters[user_idx], genres[item_idx]]
             + user_bias[user_idx] + item_bias[item_idx]
             + cfg.lin_amp * np.einsum("nd,nd->n", p[user_idx], q[item_idx])
             + cfg.nl_amp * np.tanh(
                 cfg.nl_gain * np.einsum("nd,nd->n", a[user_idx], c[item_idx]))
             + cfg.noise_sd * rng.standard_normal(len(user_idx)))
    if cfg.quantize:
        score = np.rint(score)
    ratings = np.clip(score, 1.0, 5.0)

    span = cfg.n_days * _DAY
    stamps = cfg.start_epoch + rng.integers(0, span, len(user_idx))

    user_tokens = [f"u{i:05d}" for i in range(cfg.n_users)]
    item_tokens = [f"m{i:05d}" for i in range(cfg.n_items)]
    return [RatingRecord(user_tokens[u], item_tokens[i], float(r), int(t))
            for u, i, r, t in zip(user_idx, item_idx, ratings, stamps)]


def default_split(cfg: SyntheticConfig, *, split_seed: int = 0,
                  valid_fraction: float = 0.5) -> SplitSpec:
    """Time split matching the corpus range: first 90% of days train, rest eval."""
    start = dt.datetime.fromtimestamp(cfg.start_epoch, tz=dt.timezone.utc).date()
    train_days = max(int(cfg.n_days * 0.9), 1)
    return SplitSpec(
        train_start=start,
        train_end=start + dt.timedelta(days=train_days - 1),
        test_start=start + dt.timedelta(days=train_days),
        test_end=start + dt.timedelta(days=cfg.n_days - 1),
        valid_fraction=valid_fraction,
        split_seed=split_seed,
    )


def desk_corpus(seed: int = 0, **overrides) -> SyntheticConfig:
    """The tuned desk-scale corpus used by the experiment scripts and tests."""
    return replace(SyntheticConfig(), seed=seed, **overrides)


def low_rank_matrix(n_rows: int, n_cols: int, rank: int, *,
                    noise_sd: float = 0.05, seed: int = 0) -> np.ndarray:
    """Dense zero-mean matrix of exact rank ``rank`` plus Gaussian noise."""
    if rank > min(n_rows, n_cols):
        raise ValueError(f"rank {rank} exceeds min(n_rows, n_cols)")
    rng = np.random.default_rng(seed)
    u, _ = np.linalg.qr(rng.standard_normal((n_rows, rank)))
    v, _ = np.linalg.qr(rng.standard_normal((n_cols, rank)))
    scales = np.linspace(3.0, 1.0, rank) * np.sqrt(n_rows)
    signal = (u * scales) @ v.T
    return signal + noise_sd * rng.standard_normal((n_rows, n_cols))
