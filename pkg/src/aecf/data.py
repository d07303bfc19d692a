"""Rating-log ingestion, time-based splitting, and mini-batch serving.

Input is a line-oriented log of ``user,item,rating,timestamp`` rows (CSV
or TSV, UTF-8, LF or CRLF).  Timestamps are integer epoch seconds or ISO
dates; ratings live on the 1-5 scale with 0 reserved for "unrated".

The split protocol is temporal: everything inside the training window
becomes the training store, and each rating inside the later testing
window is assigned by a seeded coin flip to the test or validation
subset.  Ratings whose user or item never appears in the training window
are dropped from both eval subsets, since the model can only be fed
training-time vectors.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, TextIO

import numpy as np

from .losses import Batch

_EPOCH_MIN = -(2**62)
_EPOCH_MAX = 2**62
_DAY = 86400


class DataFormatError(ValueError):
    """A rating log line could not be parsed; the message carries the line number."""


@dataclass(frozen=True)
class RatingRecord:
    user: str
    item: str
    rating: float
    timestamp: int  # epoch seconds


def parse_timestamp(text: str) -> int:
    """Epoch seconds from an integer literal or an ISO date/datetime.

    Naive datetimes are taken as UTC; bare dates mean midnight UTC.
    """
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    try:
        parsed = dt.datetime.fromisoformat(text)
    except ValueError:
        try:
            parsed = dt.datetime.combine(dt.date.fromisoformat(text), dt.time())
        except ValueError:
            raise ValueError(f"unparseable timestamp {text!r}") from None
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=dt.timezone.utc)
    return int(parsed.timestamp())


def _iter_lines(source: str | Path | TextIO | Iterable[str]) -> Iterator[str]:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            yield from fh
    else:
        yield from source


def parse_ratings(source: str | Path | TextIO | Iterable[str],
                  fmt: str = "csv") -> list[RatingRecord]:
    """Parse a rating log into records, preserving input order.

    ``source`` may be a path, an open text file, or any iterable of lines.
    Malformed lines raise :class:`DataFormatError` naming the line number.
    """
    if fmt not in ("csv", "tsv"):
        raise ValueError(f"fmt must be 'csv' or 'tsv', got {fmt!r}")
    delim = "," if fmt == "csv" else "\t"
    records: list[RatingRecord] = []
    for lineno, raw in enumerate(_iter_lines(source), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        fields = line.split(delim)
        if len(fields) != 4:
            raise DataFormatError(f"line {lineno}: expected 4 fields, got {len(fields)}")
        user, item = fields[0].strip(), fields[1].strip()
        if not user or not item:
            raise DataFormatError(f"line {lineno}: empty user or item token")
        try:
            rating = float(fields[2])
        except ValueError:
            raise DataFormatError(f"line {lineno}: bad rating {fields[2]!r}") from None
        if not np.isfinite(rating) or not 1.0 <= rating <= 5.0:
            raise DataFormatError(f"line {lineno}: rating {rating} outside [1, 5]")
        try:
            ts = parse_timestamp(fields[3])
        except ValueError as exc:
            raise DataFormatError(f"line {lineno}: {exc}") from None
        records.append(RatingRecord(user, item, rating, ts))
    return records


def write_ratings_csv(records: Iterable[RatingRecord], path: str | Path,
                      fmt: str = "csv") -> None:
    """Write records back out in the canonical parseable form (epoch timestamps)."""
    delim = "," if fmt == "csv" else "\t"
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(f"{r.user}{delim}{r.item}{delim}{r.rating}{delim}{r.timestamp}\n")


def dedup_latest(records: Iterable[RatingRecord]) -> list[RatingRecord]:
    """Collapse duplicate (user, item) pairs, keeping the latest timestamp.

    Timestamp ties go to the later input position.  Survivors keep their
    original relative order.
    """
    best: dict[tuple[str, str], tuple[int, RatingRecord]] = {}
    for pos, rec in enumerate(records):
        key = (rec.user, rec.item)
        old = best.get(key)
        if old is None or rec.timestamp >= old[1].timestamp:
            best[key] = (pos, rec)
    return [rec for _, rec in sorted(best.values(), key=lambda t: t[0])]


# --------------------------------------------------------------------- dataset


class RatingDataset:
    """Immutable indexed store of one split's ratings.

    Users and items get contiguous ids (sorted token order).  Per-user
    ratings are held CSR-style with item ids ascending, alongside their
    timestamps.
    """

    def __init__(self, user_tokens: list[str], item_tokens: list[str],
                 indptr: np.ndarray, item_ids: np.ndarray,
                 ratings: np.ndarray, timestamps: np.ndarray):
        self.user_tokens = user_tokens
        self.item_tokens = item_tokens
        self.user_index = {tok: i for i, tok in enumerate(user_tokens)}
        self.item_index = {tok: i for i, tok in enumerate(item_tokens)}
        self.indptr = indptr
        self.item_ids = item_ids
        self.ratings = ratings
        self.timestamps = timestamps

    @classmethod
    def from_records(cls, records: Iterable[RatingRecord],
                     item_tokens: list[str] | None = None) -> "RatingDataset":
        """Index records into a dataset.

        With ``item_tokens`` the item vocabulary is fixed (checkpoint
        compatibility); records naming items outside it are an error, so
        filter first.
        """
        records = dedup_latest(records)
        if not records:
            raise ValueError("cannot build a dataset from zero records")
        user_tokens = sorted({r.user for r in records})
        if item_tokens is None:
            item_tokens = sorted({r.item for r in records})
        else:
            item_tokens = list(item_tokens)
        user_index = {tok: i for i, tok in enumerate(user_tokens)}
        item_index = {tok: i for i, tok in enumerate(item_tokens)}

        u = np.fromiter((user_index[r.user] for r in records), dtype=np.int64, count=len(records))
        try:
            i = np.fromiter((item_index[r.item] for r in records), dtype=np.int64,
                            count=len(records))
        except KeyError as exc:
            raise ValueError(f"item {exc.args[0]!r} is not in the fixed vocabulary") from None
        v = np.fromiter((r.rating for r in records), dtype=np.float64, count=len(records))
        t = np.fromiter((r.timestamp for r in records), dtype=np.int64, count=len(records))

        order = np.lexsort((i, u))
        u, i, v, t = u[order], i[order], v[order], t[order]
        indptr = np.zeros(len(user_tokens) + 1, dtype=np.int64)
        np.add.at(indptr, u + 1, 1)
        indptr = np.cumsum(indptr)
        return cls(user_tokens, item_tokens, indptr, i, v, t)

    @property
    def n_users(self) -> int:
        return len(self.user_tokens)

    @property
    def n_items(self) -> int:
        return len(self.item_tokens)

    @property
    def n_ratings(self) -> int:
        return int(self.indptr[-1])

    def max_timestamp(self) -> int:
        return int(self.timestamps.max())

    def user_id(self, token: str) -> int:
        try:
            return self.user_index[token]
        except KeyError:
            raise KeyError(f"unknown user {token!r}") from None

    def user_vector(self, user: int) -> tuple[np.ndarray, np.ndarray]:
        """Sparse rating row of one user: (ascending item ids, rating values)."""
        if not 0 <= user < self.n_users:
            raise KeyError(f"unknown user id {user}")
        lo, hi = self.indptr[user], self.indptr[user + 1]
        return self.item_ids[lo:hi], self.ratings[lo:hi]

    def densify(self, users: np.ndarray, dtype=np.float32) -> Batch:
        """Dense rating rows plus mask for the given user ids."""
        users = np.asarray(users, dtype=np.int64)
        counts = (self.indptr[users + 1] - self.indptr[users]).astype(np.int64)
        rows = np.repeat(np.arange(len(users)), counts)
        cols = np.concatenate([self.item_ids[self.indptr[u]:self.indptr[u + 1]] for u in users]) \
            if len(users) else np.zeros(0, dtype=np.int64)
        vals = np.concatenate([self.ratings[self.indptr[u]:self.indptr[u + 1]] for u in users]) \
            if len(users) else np.zeros(0)
        ratings = np.zeros((len(users), self.n_items), dtype=dtype)
        mask = np.zeros((len(users), self.n_items), dtype=dtype)
        ratings[rows, cols] = vals.astype(dtype)
        mask[rows, cols] = 1
        return Batch(ratings=ratings, mask=mask, users=users)


def batch_iterator(train: RatingDataset, batch_size: int,
                   epoch_seed: int, dtype=np.float32) -> Iterator[Batch]:
    """One epoch of shuffled dense batches; every user exactly once.

    The final partial batch is emitted.  Order is a pure function of
    ``epoch_seed``.
    """
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    perm = np.random.default_rng(epoch_seed).permutation(train.n_users)
    for lo in range(0, train.n_users, batch_size):
        yield train.densify(perm[lo:lo + batch_size], dtype=dtype)


# ----------------------------------------------------------------------- split


@dataclass
class EvalSet:
    """Flat (user, item, rating) triples addressed in a training dataset's ids."""

    users: np.ndarray
    items: np.ndarray
    ratings: np.ndarray

    @classmethod
    def from_records(cls, records: list[RatingRecord], train: RatingDataset) -> "EvalSet":
        users = np.fromiter((train.user_index[r.user] for r in records), dtype=np.int64,
                            count=len(records))
        items = np.fromiter((train.item_index[r.item] for r in records), dtype=np.int64,
                            count=len(records))
        ratings = np.fromiter((r.rating for r in records), dtype=np.float64, count=len(records))
        return cls(users, items, ratings)

    def __len__(self) -> int:
        return len(self.ratings)

    @property
    def n_users(self) -> int:
        return len(np.unique(self.users)) if len(self.users) else 0


def _bound_seconds(value, *, end_of_day: bool, default: int) -> int:
    """Normalize a window boundary to an inclusive epoch-second instant."""
    if value is None:
        return default
    if isinstance(value, int):
        return value
    if isinstance(value, dt.datetime):
        if value.tzinfo is None:
            value = value.replace(tzinfo=dt.timezone.utc)
        return int(value.timestamp())
    if isinstance(value, dt.date):
        midnight = int(dt.datetime.combine(value, dt.time(), tzinfo=dt.timezone.utc).timestamp())
        return midnight + _DAY - 1 if end_of_day else midnight
    if isinstance(value, str):
        txt = value.strip()
        try:
            return int(txt)
        except ValueError:
            pass
        try:
            return _bound_seconds(dt.date.fromisoformat(txt), end_of_day=end_of_day,
                                  default=default)
        except ValueError:
            pass
        try:
            return _bound_seconds(dt.datetime.fromisoformat(txt), end_of_day=end_of_day,
                                  default=default)
        except ValueError:
            raise ValueError(f"unparseable boundary {value!r}") from None
    raise TypeError(f"boundary must be None, int, date, datetime or str, got {type(value)}")


@dataclass
class SplitSpec:
    """Time-split configuration.

    Date boundaries are inclusive at day granularity on both ends.
    ``train_start`` / ``test_end`` may be None for open-ended windows.
    Each testing-window rating lands in the validation subset with
    probability ``valid_fraction`` (the protocol value is 0.5).
    """

    train_end: dt.date | int | str
    test_start: dt.date | int | str
    train_start: dt.date | int | str | None = None
    test_end: dt.date | int | str | None = None
    valid_fraction: float = 0.5
    split_seed: int = 0

    def __post_init__(self) -> None:
        if not 0 < self.valid_fraction < 1:
            raise ValueError(f"valid_fraction must be in (0, 1), got {self.valid_fraction}")
        lo, hi = self.train_window()
        tlo, thi = self.test_window()
        if lo > hi or tlo > thi:
            raise ValueError("window start is after window end")
        if hi >= tlo:
            raise ValueError("training window must end strictly before the testing window")

    def train_window(self) -> tuple[int, int]:
        return (_bound_seconds(self.train_start, end_of_day=False, default=_EPOCH_MIN),
                _bound_seconds(self.train_end, end_of_day=True, default=_EPOCH_MAX))

    def test_window(self) -> tuple[int, int]:
        return (_bound_seconds(self.test_start, end_of_day=False, default=_EPOCH_MIN),
                _bound_seconds(self.test_end, end_of_day=True, default=_EPOCH_MAX))


@dataclass
class SplitRecords:
    """Raw record partition plus bookkeeping counts for the manifest."""

    train: list[RatingRecord]
    test: list[RatingRecord]
    validation: list[RatingRecord]
    duplicates_dropped: int = 0
    cold_dropped: int = 0


def partition_records(records: list[RatingRecord], spec: SplitSpec) -> SplitRecords:
    """Partition raw records into train/test/validation record lists.

    Duplicates are collapsed globally (latest timestamp wins) before
    windowing.  Testing-window records are coin-flipped into test or
    validation with the split seed, then cold users/items (absent from the
    training window) are removed from both eval lists.
    """
    deduped = dedup_latest(records)
    dup_dropped = len(records) - len(deduped)

    tr_lo, tr_hi = spec.train_window()
    te_lo, te_hi = spec.test_window()
    train = [r for r in deduped if tr_lo <= r.timestamp <= tr_hi]
    if not train:
        raise ValueError("no ratings fall inside the training window")
    eval_records = [r for r in deduped if te_lo <= r.timestamp <= te_hi]

    rng = np.random.default_rng(spec.split_seed)
    to_valid = rng.random(len(eval_records)) < spec.valid_fraction

    train_users = {r.user for r in train}
    train_items = {r.item for r in train}
    test: list[RatingRecord] = []
    validation: list[RatingRecord] = []
    cold = 0
    for rec, v in zip(eval_records, to_valid):
        if rec.user not in train_users or rec.item not in train_items:
            cold += 1
            continue
        (validation if v else test).append(rec)

    return SplitRecords(train=train, test=test, validation=validation,
                        duplicates_dropped=dup_dropped, cold_dropped=cold)


def time_split(records: list[RatingRecord],
               spec: SplitSpec) -> tuple[RatingDataset, EvalSet, EvalSet]:
    """Split records by time; returns (train dataset, test set, validation set)."""
    parts = partition_records(records, spec)
    train = RatingDataset.from_records(parts.train)
    test = EvalSet.from_records(parts.test, train)
    validation = EvalSet.from_records(parts.validation, train)
    return train, test, validation


def _boundary_repr(value) -> int | str | None:
    if value is None or isinstance(value, int):
        return value
    if isinstance(value, (dt.date, dt.datetime)):
        return value.isoformat()
    return str(value)


def split_manifest(spec: SplitSpec, parts: SplitRecords) -> dict:
    """JSON-ready summary that makes a split reproducible and auditable."""
    def subset_counts(records: list[RatingRecord]) -> dict:
        return {"users": len({r.user for r in records}),
                "items": len({r.item for r in records}),
                "ratings": len(records)}

    return {
        "format": "aecf-split-manifest",
        "version": 1,
        "boundaries": {
            "train_start": _boundary_repr(spec.train_start),
            "train_end": _boundary_repr(spec.train_end),
            "test_start": _boundary_repr(spec.test_start),
            "test_end": _boundary_repr(spec.test_end),
        },
        "valid_fraction": spec.valid_fraction,
        "seed": spec.split_seed,
        "counts": {
            "train": subset_counts(parts.train),
            "test": subset_counts(parts.test),
            "validation": subset_counts(parts.validation),
        },
        "duplicates_dropped": parts.duplicates_dropped,
        "cold_dropped": parts.cold_dropped,
    }
