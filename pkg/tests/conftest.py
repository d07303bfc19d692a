"""Shared fixtures and the acceptance-criteria summary.

Every test marked ``criterionN`` feeds one line of the summary printed
after the run, so the acceptance status is readable at a glance.
"""

import pytest

from aecf import default_split, desk_corpus, generate_ratings, time_split

CRITERIA = {
    1: "gradient correctness against finite differences",
    2: "masked loss matches the double-loop oracle",
    3: "linear shallow autoencoder matches truncated SVD",
    4: "activation trend (elu/selu/lrelu beat sigmoid/relu6)",
    5: "depth trend (6-layer beats 2-layer)",
    6: "coding-layer dropout controls overfitting",
    7: "re-feeding rescues an elevated learning rate",
    8: "re-feed update count and detached target",
    9: "split protocol on a million-record log",
    10: "exact parameter count",
    11: "checkpoint and architecture-string round trips",
}

_RANK = {"passed": 0, "skipped": 1, "failed": 2, "error": 2}


@pytest.fixture(scope="session")
def desk_data():
    """The tuned desk-scale corpus, time-split once per session."""
    cfg = desk_corpus(seed=11, n_users=1500, n_items=300)
    records = generate_ratings(cfg)
    train, test, valid = time_split(records, default_split(cfg, split_seed=5))
    return train, test, valid


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    stats = terminalreporter.stats
    outcome = {}
    for status in ("passed", "skipped", "failed", "error"):
        for report in stats.get(status, []):
            keywords = getattr(report, "keywords", {})
            for n in CRITERIA:
                if f"criterion{n}" in keywords:
                    rank = _RANK[status]
                    if rank >= _RANK.get(outcome.get(n, "passed"), -1):
                        outcome[n] = status
    if not outcome:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for n, label in CRITERIA.items():
        status = outcome.get(n)
        word = {"passed": "PASS", "failed": "FAIL", "error": "FAIL",
                "skipped": "SKIP", None: "NOT RUN"}[status]
        terminalreporter.write_line(f"criterion {n:2d} [{word}] {label}")
