"""Successive cancellation decoding with injectable bit-flip decisions.

The decoder walks the factor graph depth-first, combining LLRs with the
min-sum pair operations f and g and propagating hard partial sums back up.
A flip vector with entries in {-1, +1} inverts the hard decision of selected
non-frozen bits; decision LLRs are recorded for every position so that flip
metrics can be evaluated afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .channel import LlrFrame
from .code import PolarCode

BACKEND = _backend.name


def f(a: float, b: float) -> float:
    """Min-sum LLR combination for a parity constraint; sign of 0 counts as +."""
    m = min(abs(a), abs(b))
    return -m if (a < 0) != (b < 0) else m


def g(a: float, b: float, c: int) -> float:
    """LLR combination once the parity-side bit c is known."""
    return b - a if c else b + a


class ScWorkspace:
    """Scratch arrays for one decoder; one instance per worker, reused per frame."""

    def __init__(self, n: int):
        N = 1 << n
        self.n = n
        self.llr = np.zeros((n + 1, N), dtype=np.float64)
        self.bits = np.zeros((n + 1, N), dtype=np.uint8)
        self.u = np.zeros(N, dtype=np.uint8)
        self.dllr = np.zeros(N, dtype=np.float64)


@dataclass
class ScTrace:
    """Result of one SC pass: hard decisions plus every decision LLR."""

    u_hat: np.ndarray
    decision_llrs: np.ndarray
    flip_vector: np.ndarray


def all_keep(N: int) -> np.ndarray:
    """Flip vector that keeps every decision."""
    return np.ones(N, dtype=np.int8)


def _as_llr_array(llrs) -> np.ndarray:
    values = llrs.values if isinstance(llrs, LlrFrame) else llrs
    return np.ascontiguousarray(values, dtype=np.float64)


def sc_decode(code: PolarCode, llrs, flips: np.ndarray | None = None,
              workspace: ScWorkspace | None = None) -> ScTrace:
    """One SC pass over a frame; flips is an int8 vector in {-1, +1} or None."""
    ch = _as_llr_array(llrs)
    if ch.size != code.N:
        raise ValueError("LLR length mismatch")
    ws = workspace or ScWorkspace(code.n)
    tflip = all_keep(code.N) if flips is None else np.ascontiguousarray(flips, dtype=np.int8)
    _backend.impl.sc_decode(ch, code._frozen_u8, tflip, ws.llr, ws.bits, ws.u, ws.dllr)
    return ScTrace(ws.u.copy(), ws.dllr.copy(), tflip)


def genie_decode(code: PolarCode, llrs, true_u, max_corrections: int,
                 workspace: ScWorkspace | None = None) -> tuple[bool, int]:
    """SC with an oracle that repairs up to max_corrections wrong decisions.

    Success means decoding finished with no unrepaired disagreement against
    the transmitted word; the repair count is returned alongside.
    """
    ch = _as_llr_array(llrs)
    ws = workspace or ScWorkspace(code.n)
    tu = np.ascontiguousarray(true_u, dtype=np.uint8)
    used = _backend.impl.genie_decode(
        ch, code._frozen_u8, tu, int(max_corrections), ws.llr, ws.bits, ws.u, ws.dllr
    )
    if used < 0:
        return False, int(max_corrections)
    return True, int(used)
