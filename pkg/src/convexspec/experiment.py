"""Batch run over seeded nested pairs.

For every pair the driver records the Neumann ratio table, the Dirichlet
monotonicity check and, per index k, the smallest c for which the net in the
outer domain has at most k points.  Afterwards one common c is searched so the
proof replay succeeds on every pair and every k.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .corpus import ExperimentConfig, generate_nested_pair
from .verify import (
    CheckReport,
    NetTooLarge,
    dirichlet_monotonicity_check,
    dm_ratio,
    replay_dm_proof,
    smallest_sufficient_c,
)

C_GROWTH = 1.01
MAX_C_ROUNDS = 200


@dataclass
class PairResult:
    index: int
    seed: int
    inner: object
    outer: object
    ratio: CheckReport
    dirichlet: CheckReport
    smallest_c: list


@dataclass
class CorpusResult:
    config: ExperimentConfig
    pairs: list
    common_c: float
    replays: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def max_ratio(self) -> float:
        return max(p.ratio.details["max_ratio"] for p in self.pairs)

    @property
    def ratios_finite(self) -> bool:
        return all(p.ratio.passed for p in self.pairs)

    @property
    def dirichlet_violations(self) -> int:
        return sum(p.dirichlet.details["violations"] for p in self.pairs)

    @property
    def identity_holds(self) -> bool:
        return all(r.details["identity_holds"] for r in self.replays)

    @property
    def replays_pass(self) -> bool:
        return len(self.replays) == len(self.pairs) * self.config.kmax and \
            all(r.passed for r in self.replays)

    def ratio_rows(self):
        for p in self.pairs:
            d = p.ratio.details
            for k in range(1, self.config.kmax + 1):
                yield [p.index, p.seed, k, p.ratio.lhs[k - 1], p.ratio.rhs[k - 1], d["ratios"][k - 1],
                       d["uncertainty_outer"][k - 1], d["uncertainty_inner"][k - 1], p.smallest_c[k - 1]]

    RATIO_COLUMNS = ("pair", "seed", "k", "lambda_outer", "lambda_inner", "ratio",
                     "u_outer", "u_inner", "smallest_c")

    def summary(self) -> dict:
        """Run summary; wall-clock time is left out so files are reproducible."""
        return {
            "pairs": len(self.pairs), "kmax": self.config.kmax, "h": self.config.h,
            "max_ratio": self.max_ratio, "ratios_finite": self.ratios_finite,
            "max_smallest_c": max(max(p.smallest_c) for p in self.pairs),
            "common_c": self.common_c, "replays": len(self.replays),
            "replays_pass": self.replays_pass, "identity_holds": self.identity_holds,
            "dirichlet_violations": self.dirichlet_violations,
        }


def pair_seed(config: ExperimentConfig, i: int) -> int:
    return (config.seed + i) % 2 ** 64


def run_pair(config: ExperimentConfig, i: int) -> PairResult:
    seed = pair_seed(config, i)
    inner, outer = generate_nested_pair(seed, config.vertex_range)
    ratio = dm_ratio(inner, outer, config.kmax, config.h)
    dirichlet = dirichlet_monotonicity_check(inner, outer, config.kmax, config.h)
    cs = [smallest_sufficient_c(outer, k, config.h) for k in range(1, config.kmax + 1)]
    return PairResult(i, seed, inner, outer, ratio, dirichlet, cs)


def _replay_all(config: ExperimentConfig, pairs, c: float):
    reports = []
    for p in pairs:
        for k in range(1, config.kmax + 1):
            reports.append(replay_dm_proof(p.inner, p.outer, k, c, config.h)[1])
    return reports


def _run_pair_star(args):
    return run_pair(*args)


def run_corpus(config: ExperimentConfig) -> CorpusResult:
    t0 = time.perf_counter()
    tasks = [(config, i) for i in range(config.pairs)]
    if config.jobs > 1:
        with ProcessPoolExecutor(config.jobs) as pool:
            pairs = list(pool.map(_run_pair_star, tasks))
    else:
        pairs = [run_pair(*t) for t in tasks]
    # net size is not monotone in c, so the largest per-pair value may still
    # fail somewhere; grow it until every replay goes through
    c = max(max(p.smallest_c) for p in pairs)
    for _ in range(MAX_C_ROUNDS):
        try:
            replays = _replay_all(config, pairs, c)
            break
        except NetTooLarge:
            c *= C_GROWTH
    else:
        replays, c = [], math.inf
    return CorpusResult(config, pairs, c, replays, time.perf_counter() - t0)


def ratio_table(result: CorpusResult) -> np.ndarray:
    """(pairs, kmax) array of Neumann ratios."""
    return np.array([p.ratio.details["ratios"] for p in result.pairs])
