import numpy as np
import pytest

from aecf import (SyntheticConfig, default_split, desk_corpus, generate_ratings,
                  low_rank_matrix, partition_records)

SMALL = SyntheticConfig(n_users=120, n_items=60, seed=3)


def test_generation_is_deterministic_in_the_seed():
    a = generate_ratings(SMALL)
    b = generate_ratings(SMALL)
    assert a == b
    c = generate_ratings(SyntheticConfig(n_users=120, n_items=60, seed=4))
    assert a != c


def test_no_duplicate_pairs_and_every_user_active():
    records = generate_ratings(SMALL)
    pairs = [(r.user, r.item) for r in records]
    assert len(pairs) == len(set(pairs))
    users = {r.user for r in records}
    assert users == {f"u{i:05d}" for i in range(120)}
    per_user = {}
    for r in records:
        per_user[r.user] = per_user.get(r.user, 0) + 1
    assert min(per_user.values()) >= 4


def test_ratings_are_whole_stars_in_range():
    records = generate_ratings(SMALL)
    values = np.array([r.rating for r in records])
    assert values.min() >= 1.0 and values.max() <= 5.0
    assert np.all(values == np.rint(values))
    assert len(np.unique(values)) > 2  # uses the scale, not a constant
    smooth = generate_ratings(SyntheticConfig(n_users=50, n_items=40, quantize=False, seed=0))
    sv = np.array([r.rating for r in smooth])
    assert np.any(sv != np.rint(sv))


def test_timestamps_cover_the_configured_range():
    cfg = SMALL
    records = generate_ratings(cfg)
    stamps = np.array([r.timestamp for r in records])
    assert stamps.min() >= cfg.start_epoch
    assert stamps.max() < cfg.start_epoch + cfg.n_days * 86400


def test_default_split_brackets_the_corpus():
    cfg = SMALL
    spec = default_split(cfg, split_seed=9)
    records = generate_ratings(cfg)
    parts = partition_records(records, spec)
    n_eval = len(parts.test) + len(parts.validation) + parts.cold_dropped
    assert len(parts.train) + n_eval == len(records)  # windows tile the range
    assert len(parts.train) > 5 * n_eval  # roughly 90/10 in time
    assert spec.valid_fraction == 0.5 and spec.split_seed == 9


def test_desk_corpus_overrides():
    cfg = desk_corpus(seed=7, n_users=33)
    assert cfg.seed == 7 and cfg.n_users == 33
    assert cfg.n_items == SyntheticConfig().n_items


def test_low_rank_matrix_shape_and_rank():
    clean = low_rank_matrix(50, 20, 4, noise_sd=0.0, seed=1)
    assert clean.shape == (50, 20)
    s = np.linalg.svd(clean, compute_uv=False)
    assert s[3] > 1.0 and s[4] < 1e-10  # exactly rank 4
    noisy = low_rank_matrix(50, 20, 4, noise_sd=0.1, seed=1)
    s2 = np.linalg.svd(noisy, compute_uv=False)
    assert s2[4] > 1e-3
    assert abs(clean.mean()) < 0.5  # centered construction
    with pytest.raises(ValueError):
        low_rank_matrix(10, 5, 6)
