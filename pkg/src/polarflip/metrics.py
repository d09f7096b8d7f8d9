"""Flip-set metrics and candidate ranking.

All metrics score a candidate flip set E against the decision LLRs of the
attempt that produced it; smaller is better.  Two families are provided:

* ``alpha-exact`` scales LLR magnitudes multiplicatively before the
  log-domain confidence sum; ``alpha-relu`` is its ReLU simplification,
  which collapses to a plain sum of flipped-bit magnitudes and loses the
  scaling parameter entirely.
* ``beta-exact`` applies an additive offset instead, which survives the
  ReLU simplification (``beta-relu``) and can be trained from data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .code import PolarCode
from .sc import ScTrace


def softplus(x):
    """ln(1 + exp(x)) in the shifted form that never overflows."""
    x = np.asarray(x, dtype=np.float64)
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))


def p_estimate(llr: float) -> float:
    """Confidence that a hard decision at this LLR is correct; in [0.5, 1)."""
    return 1.0 / (1.0 + math.exp(-abs(llr)))


@dataclass(frozen=True)
class AlphaExact:
    alpha: float

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")


@dataclass(frozen=True)
class AlphaRelu:
    pass


@dataclass(frozen=True)
class BetaExact:
    betas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        if not self.betas or any(b <= 0 for b in self.betas):
            raise ValueError("need at least one positive beta per flip order")


@dataclass(frozen=True)
class BetaRelu:
    betas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        if not self.betas or any(b <= 0 for b in self.betas):
            raise ValueError("need at least one positive beta per flip order")


MetricKind = AlphaExact | AlphaRelu | BetaExact | BetaRelu


def parse_metric(spec: str) -> MetricKind:
    """Parse 'alpha-exact:<a>', 'alpha-relu', 'beta-exact:<b1,b2,..>', 'beta-relu:<..>'."""
    head, _, arg = spec.strip().partition(":")
    head = head.lower()
    if head == "alpha-relu":
        if arg:
            raise ValueError("alpha-relu takes no parameter")
        return AlphaRelu()
    if head == "alpha-exact":
        return AlphaExact(float(arg))
    if head in ("beta-exact", "beta-relu"):
        betas = tuple(float(v) for v in arg.split(",") if v)
        return BetaExact(betas) if head == "beta-exact" else BetaRelu(betas)
    raise ValueError(f"unknown metric spec {spec!r}")


def format_metric(kind: MetricKind) -> str:
    if isinstance(kind, AlphaRelu):
        return "alpha-relu"
    if isinstance(kind, AlphaExact):
        return f"alpha-exact:{kind.alpha:g}"
    tag = "beta-exact" if isinstance(kind, BetaExact) else "beta-relu"
    return tag + ":" + ",".join(f"{b:g}" for b in kind.betas)


@dataclass(frozen=True)
class FlipSet:
    """Strictly increasing non-frozen indices to flip, with the set's score."""

    indices: tuple[int, ...]
    metric: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        if any(a >= b for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("flip indices must be strictly increasing")

    @property
    def order(self) -> int:
        return len(self.indices)


EMPTY_FLIP_SET = FlipSet(())


def _flip_terms(trace: ScTrace, E: FlipSet, code: PolarCode):
    if not E.indices:
        raise ValueError("flip metrics are undefined for the empty set")
    idx = np.asarray(E.indices)
    if not np.isin(idx, code.info_set).all():
        raise ValueError("flip set contains a frozen position")
    a_all = np.abs(trace.decision_llrs[code.info_set])
    r = int(np.searchsorted(code.info_set, E.indices[-1], side="right"))
    flipped = np.abs(trace.decision_llrs[idx]).sum()
    return a_all, r, flipped


def q_alpha_exact(trace: ScTrace, E: FlipSet, code: PolarCode, alpha: float) -> float:
    a_all, r, flipped = _flip_terms(trace, E, code)
    return float(softplus(-alpha * a_all[:r]).sum() / alpha + flipped)


def q_alpha_relu(trace: ScTrace, E: FlipSet) -> float:
    if not E.indices:
        raise ValueError("flip metrics are undefined for the empty set")
    return float(np.abs(trace.decision_llrs[np.asarray(E.indices)]).sum())


def q_beta_exact(trace: ScTrace, E: FlipSet, code: PolarCode, beta: float) -> float:
    a_all, r, flipped = _flip_terms(trace, E, code)
    return float(softplus(beta - a_all[:r]).sum() + flipped)


def q_beta_relu(trace: ScTrace, E: FlipSet, code: PolarCode, beta: float) -> float:
    a_all, r, flipped = _flip_terms(trace, E, code)
    head = np.maximum(beta - a_all[:r], 0.0)
    return float(head.sum() + flipped)


def _beta_for_order(kind, order: int) -> float:
    if order > len(kind.betas):
        raise ValueError(
            f"metric carries {len(kind.betas)} offsets but a flip set of order "
            f"{order} was requested"
        )
    return kind.betas[order - 1]


def _rank_extensions(trace: ScTrace, parent_indices: tuple[int, ...],
                     code: PolarCode, metric: MetricKind,
                     limit: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Scores and last-flip indices of all extensions, best first."""
    info = code.info_set
    a_all = np.abs(trace.decision_llrs[info])
    if parent_indices:
        start = int(np.searchsorted(info, parent_indices[-1], side="right"))
        parent_sum = float(np.abs(trace.decision_llrs[np.asarray(parent_indices)]).sum())
    else:
        start = 0
        parent_sum = 0.0
    if start >= info.size:
        empty = np.zeros(0)
        return empty, empty.astype(np.int64)
    order = len(parent_indices) + 1
    tail = a_all[start:]
    if isinstance(metric, AlphaRelu):
        scores = parent_sum + tail
    elif isinstance(metric, AlphaExact):
        prefix = np.cumsum(softplus(-metric.alpha * a_all)) / metric.alpha
        scores = prefix[start:] + parent_sum + tail
    else:
        beta = _beta_for_order(metric, order)
        if isinstance(metric, BetaExact):
            terms = softplus(beta - a_all)
        else:
            terms = np.maximum(beta - a_all, 0.0)
        scores = np.cumsum(terms)[start:] + parent_sum + tail
    cand = info[start:]
    ranked = np.lexsort((cand, scores))
    if limit is not None:
        ranked = ranked[:limit]
    return scores[ranked], cand[ranked]


def select_candidates(trace: ScTrace, parent: FlipSet, code: PolarCode,
                      metric: MetricKind) -> list[FlipSet]:
    """All single-index extensions of parent, best metric first.

    Children extend the parent with a non-frozen index beyond its last flip;
    ties are broken toward the smaller index.  Scores reuse the parent
    attempt's decision LLRs.
    """
    scores, cand = _rank_extensions(trace, parent.indices, code, metric)
    return [
        FlipSet(parent.indices + (int(c),), float(s)) for s, c in zip(scores, cand)
    ]
