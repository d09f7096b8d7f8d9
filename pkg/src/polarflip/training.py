"""Offset training for the additive flip metric.

Ground truth during training is always the all-zero codeword: the metric
reads only LLR magnitudes of the running attempt, so its scores do not depend
on the transmitted word, and a correct flip is simply one that restores a
zero bit.  Each training frame is pushed through a fixed unroll of flip
stages (worst case, one stage per order); a stage that still fails CRC after
flipping contributes a smooth penalty at the first surviving bit error.

The offsets are fitted by per-order coordinate search (grid plus
golden-section refinement) on the empirical loss, which is piecewise constant
in the offsets; the gradient-based learning rate is kept in the config for
provenance, and a finite-difference variant is available for comparison.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ebn0_to_sigma2, frame_rng, transmit
from .code import PolarCode
from .decoder import _flip_vector
from .metrics import BetaExact, BetaRelu, _rank_extensions
from .sc import ScTrace, ScWorkspace, sc_decode

log = logging.getLogger(__name__)

_GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0
# stream offsets so training draws never collide with per-frame noise streams
_BATCH_STREAM = 1 << 62
_INIT_STREAM = (1 << 62) + 1


@dataclass(frozen=True)
class TrainConfig:
    ebn0_points_db: tuple[float, ...] = (2.0, 3.0, 4.0, 5.0)
    samples_per_point: int = 250_000
    epochs: int = 50
    batch_size: int = 256
    beta_init_range: tuple[float, float] = (0.01, 10.0)
    metric_form: str = "exact"          # "exact" or "relu"
    max_order: int = 2
    seed: int = 0
    learning_rate: float = 0.001        # recorded; used only by the "spsa" method
    grid_points: int = 21

    def __post_init__(self):
        if self.metric_form not in ("exact", "relu"):
            raise ValueError("metric_form must be 'exact' or 'relu'")
        lo, hi = self.beta_init_range
        if not 0 < lo < hi:
            raise ValueError("beta_init_range must satisfy 0 < low < high")
        for name in ("samples_per_point", "epochs", "batch_size", "max_order", "grid_points"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")


@dataclass
class LossRecord:
    beta: tuple[float, ...]
    lambda_hat: float
    per_order: tuple[float, ...]


def _metric_kind(form: str, beta):
    betas = tuple(float(b) for b in beta)
    return BetaExact(betas) if form == "exact" else BetaRelu(betas)


def first_error_penalty(llr: float) -> float:
    """Smooth miss penalty: squared confidence that the bit is wrong."""
    if llr > 0:
        e = math.exp(-llr)
        return (e / (1.0 + e)) ** 2
    return 1.0 / (1.0 + math.exp(llr)) ** 2


def make_training_set(code: PolarCode, cfg: TrainConfig):
    """Stream of all-zero-codeword frames over the configured Eb/N0 grid."""
    zero = np.zeros(code.N, dtype=np.uint8)
    idx = 0
    for point in cfg.ebn0_points_db:
        sigma2 = ebn0_to_sigma2(point, code.rate)
        for _ in range(cfg.samples_per_point):
            yield transmit(zero, sigma2, frame_rng(cfg.seed, idx))
            idx += 1


def _unrolled_losses(code: PolarCode, llrs, trace0: ScTrace, ok0: bool,
                     beta, form: str, max_order: int,
                     ws: ScWorkspace) -> tuple[float, ...]:
    kind = _metric_kind(form, beta)
    losses = []
    trace, ok, chain = trace0, ok0, ()
    for _ in range(max_order):
        if ok:
            losses.append(0.0)
            continue
        _, best = _rank_extensions(trace, chain, code, kind, limit=1)
        if best.size == 0:
            log.debug("flip chain exhausted the non-frozen positions")
            losses.append(0.0)
            continue
        chain = chain + (int(best[0]),)
        trace = sc_decode(code, llrs, _flip_vector(chain, code.N), ws)
        ok = code.check_u(trace.u_hat)
        if ok:
            losses.append(0.0)
            continue
        wrong = np.flatnonzero(trace.u_hat[code.info_set])
        if wrong.size == 0:
            log.debug("CRC failed on an error-free estimate; no penalty assigned")
            losses.append(0.0)
            continue
        t_err = int(code.info_set[wrong[0]])
        if chain[-1] >= t_err:
            losses.append(first_error_penalty(float(trace.decision_llrs[t_err])))
        else:
            losses.append(0.0)
    return tuple(losses)


def frame_loss(code: PolarCode, channel_llrs, beta, metric_form: str,
               max_order: int, workspace: ScWorkspace | None = None) -> tuple[float, ...]:
    """Per-order losses of one all-zero-codeword frame for a given offset vector."""
    ws = workspace or ScWorkspace(code.n)
    trace0 = sc_decode(code, channel_llrs, None, ws)
    ok0 = code.check_u(trace0.u_hat)
    return _unrolled_losses(code, channel_llrs, trace0, ok0, beta,
                            metric_form, max_order, ws)


class _TrainingPool:
    """Training frames with the offset-independent first pass precomputed.

    Frames whose initial pass already satisfies the CRC contribute zero loss
    for every offset, so only the failing ones are kept in memory.
    """

    def __init__(self, code: PolarCode, cfg: TrainConfig):
        self.code = code
        self.cfg = cfg
        self.ws = ScWorkspace(code.n)
        self.total = len(cfg.ebn0_points_db) * cfg.samples_per_point
        self.failing: dict[int, tuple[np.ndarray, ScTrace]] = {}
        for idx, frame in enumerate(make_training_set(code, cfg)):
            trace = sc_decode(code, frame, None, self.ws)
            if not code.check_u(trace.u_hat):
                self.failing[idx] = (frame.values, trace)

    def batch_losses(self, indices, beta) -> np.ndarray:
        """(batch, max_order) loss matrix; rows of passing frames are zero."""
        cfg = self.cfg
        out = np.zeros((len(indices), cfg.max_order))
        for row, idx in enumerate(indices):
            hit = self.failing.get(int(idx))
            if hit is None:
                continue
            values, trace0 = hit
            out[row] = _unrolled_losses(self.code, values, trace0, False, beta,
                                        cfg.metric_form, cfg.max_order, self.ws)
        return out


def _golden_min(fun, lo: float, hi: float, xtol: float):
    """Golden-section minimisation tracking the best evaluated point."""
    best_x, best_f = lo, fun(lo)
    for x in (hi,):
        v = fun(x)
        if v < best_f or (v == best_f and x < best_x):
            best_x, best_f = x, v
    c = hi - (hi - lo) / _GOLDEN
    d = lo + (hi - lo) / _GOLDEN
    fc, fd = fun(c), fun(d)
    while abs(c - d) > xtol:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - (hi - lo) / _GOLDEN
            fc = fun(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + (hi - lo) / _GOLDEN
            fd = fun(d)
        for x, v in ((c, fc), (d, fd)):
            if v < best_f or (v == best_f and x < best_x):
                best_x, best_f = x, v
    return best_x, best_f


def train_beta(code: PolarCode, cfg: TrainConfig, method: str = "coordinate"):
    """Fit the per-order offsets; returns (beta, history).

    The coordinate method sweeps each order in turn: a grid over the init
    range picks a bracket, golden-section search refines it to 1e-3, and the
    lowest offset wins ties.  The spsa method is a two-sided finite-difference
    descent using cfg.learning_rate, kept for comparison.
    """
    if not code.check_u(np.zeros(code.N, dtype=np.uint8)):
        raise ValueError(
            "all-zero training needs a CRC that passes on the all-zero word "
            "(zero init and zero final xor)"
        )
    if method not in ("coordinate", "spsa"):
        raise ValueError("method must be 'coordinate' or 'spsa'")
    pool = _TrainingPool(code, cfg)
    lo, hi = cfg.beta_init_range
    init_rng = np.random.Generator(np.random.Philox(key=np.array(
        [cfg.seed, _INIT_STREAM], dtype=np.uint64)))
    beta = init_rng.uniform(lo, hi, size=cfg.max_order)
    batch_rng = np.random.Generator(np.random.Philox(key=np.array(
        [cfg.seed, _BATCH_STREAM], dtype=np.uint64)))

    # epochs are compared on one fixed validation batch so "best" is stable
    val_size = min(4 * cfg.batch_size, pool.total)
    val_batch = batch_rng.choice(pool.total, size=val_size, replace=False)

    history: list[LossRecord] = []
    best_beta = beta.copy()
    best_loss = math.inf
    size = min(cfg.batch_size, pool.total)
    for _ in range(cfg.epochs):
        batch = batch_rng.choice(pool.total, size=size, replace=False)
        if method == "coordinate":
            beta = _coordinate_sweep(pool, batch, beta, lo, hi, cfg.grid_points)
        else:
            beta = _spsa_step(pool, batch, beta, lo, hi, cfg.learning_rate)
        per_order = pool.batch_losses(batch, beta).mean(axis=0)
        lam = float(per_order.sum())
        history.append(LossRecord(tuple(beta), lam, tuple(per_order)))
        if not math.isfinite(lam):
            raise ArithmeticError("training loss is not finite")
        val_loss = float(pool.batch_losses(val_batch, beta).sum()) / val_size
        if val_loss < best_loss:
            best_loss = val_loss
            best_beta = beta.copy()
    return tuple(best_beta), history


def _coordinate_sweep(pool, batch, beta, lo, hi, grid_points):
    beta = beta.copy()
    for k in range(beta.size):
        cache: dict[float, float] = {}

        def fun(b, _k=k):
            if b not in cache:
                trial = beta.copy()
                trial[_k] = b
                cache[b] = float(pool.batch_losses(batch, trial).sum())
            return cache[b]

        grid = np.linspace(lo, hi, grid_points)
        values = [fun(b) for b in grid]
        j = int(np.argmin(values))           # ties resolve to the lowest offset
        b_lo = grid[max(j - 1, 0)]
        b_hi = grid[min(j + 1, grid_points - 1)]
        refined, refined_val = _golden_min(fun, b_lo, b_hi, 1e-3)
        if refined_val < values[j] or (refined_val == values[j] and refined < grid[j]):
            beta[k] = refined
        else:
            beta[k] = grid[j]
    return beta


def _spsa_step(pool, batch, beta, lo, hi, learning_rate, delta=0.05):
    beta = beta.copy()
    for k in range(beta.size):
        up = beta.copy()
        up[k] = min(beta[k] + delta, hi)
        down = beta.copy()
        down[k] = max(beta[k] - delta, lo)
        span = up[k] - down[k]
        if span == 0:
            continue
        grad = (pool.batch_losses(batch, up).sum()
                - pool.batch_losses(batch, down).sum()) / span
        beta[k] = min(max(beta[k] - learning_rate * grad, lo), hi)
    return beta


def write_beta_report(path, cfg: TrainConfig, beta, history, fixture_hash: str) -> None:
    """Key=value report of a training run."""
    final = history[-1] if history else None
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"metric_form={cfg.metric_form}\n")
        for k, b in enumerate(beta, start=1):
            fh.write(f"beta_{k}={b:.6f}\n")
        fh.write(f"final_loss={final.lambda_hat:.10g}\n" if final else "final_loss=nan\n")
        fh.write(f"seed={cfg.seed}\n")
        fh.write(f"code_fixture_sha256={fixture_hash}\n")
