"""CRC-gated flip decoding: initial SC pass plus a budget of retry attempts.

Candidates live in a single pool ordered by metric across all flip orders.
Each retry pops the global best, re-runs SC with those decisions inverted,
and on CRC failure inserts the popped set's extensions back into the pool.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .code import PolarCode
from .metrics import EMPTY_FLIP_SET, FlipSet, MetricKind, _rank_extensions
from .sc import ScTrace, ScWorkspace, all_keep, sc_decode


@dataclass(frozen=True)
class DscfConfig:
    """max_order: deepest flip set tried; max_attempts: SC retries after the first."""

    max_order: int
    max_attempts: int
    metric: MetricKind

    def __post_init__(self):
        if self.max_order < 1:
            raise ValueError("max_order must be >= 1")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        betas = getattr(self.metric, "betas", None)
        if betas is not None and len(betas) < self.max_order:
            raise ValueError("metric needs one offset per flip order")


@dataclass
class AttemptRecord:
    flip_set: FlipSet
    crc_pass: bool


@dataclass
class DecodeOutcome:
    u_hat: np.ndarray
    payload_hat: np.ndarray
    crc_pass: bool
    attempts: int
    winning_flip_set: FlipSet | None
    history: list[AttemptRecord]
    final_trace: ScTrace


def build_flip_vector(E, code: PolarCode) -> np.ndarray:
    """Int8 vector with -1 on the flipped positions, +1 elsewhere."""
    indices = E.indices if isinstance(E, FlipSet) else tuple(E)
    if indices and not np.isin(np.asarray(indices), code.info_set).all():
        raise ValueError("flip index on a frozen position")
    return _flip_vector(indices, code.N)


def _flip_vector(indices, N: int) -> np.ndarray:
    t = all_keep(N)
    if indices:
        t[np.asarray(indices)] = -1
    return t


def dscf_decode(code: PolarCode, llrs, cfg: DscfConfig,
                workspace: ScWorkspace | None = None) -> DecodeOutcome:
    ws = workspace or ScWorkspace(code.n)
    trace = sc_decode(code, llrs, None, ws)
    ok = code.check_u(trace.u_hat)
    history = [AttemptRecord(EMPTY_FLIP_SET, ok)]
    attempts = 1
    if ok:
        return _outcome(code, trace, True, attempts, None, history)

    budget = cfg.max_attempts
    scores, cand = _rank_extensions(trace, (), code, cfg.metric, limit=budget)
    pool = [(float(s), (int(c),)) for s, c in zip(scores, cand)]

    while pool and attempts - 1 < budget:
        score, indices = pool.pop(0)
        trace = sc_decode(code, llrs, _flip_vector(indices, code.N), ws)
        attempts += 1
        ok = code.check_u(trace.u_hat)
        history.append(AttemptRecord(FlipSet(indices, score), ok))
        if ok:
            return _outcome(code, trace, True, attempts,
                            FlipSet(indices, score), history)
        cap = budget - (attempts - 1)
        if len(indices) < cfg.max_order and cap > 0:
            s2, c2 = _rank_extensions(trace, indices, code, cfg.metric, limit=cap)
            pool = sorted(pool + [(float(s), indices + (int(c),))
                                  for s, c in zip(s2, c2)])
        del pool[max(cap, 0):]

    return _outcome(code, trace, False, attempts, None, history)


def _outcome(code, trace: ScTrace, ok, attempts, winner, history) -> DecodeOutcome:
    return DecodeOutcome(
        u_hat=trace.u_hat,
        payload_hat=code.extract_payload(trace.u_hat),
        crc_pass=ok,
        attempts=attempts,
        winning_flip_set=winner,
        history=history,
        final_trace=trace,
    )
