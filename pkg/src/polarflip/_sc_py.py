"""Pure-numpy SC inner loops; fallback when the compiled extension is absent.

Must stay bit-for-bit equivalent to _sc_cy: same update order, same min-sum
f, same sign convention (zero LLR decides 0).  tests/test_sc.py asserts the
two backends agree exactly.
"""

from __future__ import annotations

import numpy as np


def _advance(L, B, n, i):
    """Refresh stage LLRs so that L[0, i] is the decision LLR of bit i."""
    if i == 0:
        for s in range(n - 1, -1, -1):
            half = 1 << s
            a = L[s + 1, :half]
            b = L[s + 1, half : 2 * half]
            m = np.minimum(np.abs(a), np.abs(b))
            L[s, :half] = np.where((a < 0) != (b < 0), -m, m)
        return
    t = (i & -i).bit_length() - 1
    half = 1 << t
    a = L[t + 1, i - half : i]
    b = L[t + 1, i : i + half]
    c = B[t, i - half : i]
    L[t, i : i + half] = np.where(c == 1, b - a, b + a)
    for s in range(t - 1, -1, -1):
        half = 1 << s
        a = L[s + 1, i : i + half]
        b = L[s + 1, i + half : i + 2 * half]
        m = np.minimum(np.abs(a), np.abs(b))
        L[s, i : i + half] = np.where((a < 0) != (b < 0), -m, m)


def _propagate(B, n, i):
    """Fold the freshly decided bit into the partial sums."""
    s = 0
    while s < n and (i >> s) & 1:
        half = 1 << s
        base = i - (2 * half - 1)
        B[s + 1, base : base + half] = (
            B[s, base : base + half] ^ B[s, base + half : base + 2 * half]
        )
        B[s + 1, base + half : base + 2 * half] = B[s, base + half : base + 2 * half]
        s += 1


def sc_decode(llr_ch, frozen, tflip, llr_ws, bit_ws, u_out, dllr_out):
    n = llr_ws.shape[0] - 1
    N = llr_ch.shape[0]
    llr_ws[n, :] = llr_ch
    for i in range(N):
        _advance(llr_ws, bit_ws, n, i)
        L = llr_ws[0, i]
        dllr_out[i] = L
        if frozen[i]:
            hard = 0
        else:
            hard = 1 if L < 0 else 0
            if tflip[i] < 0:
                hard ^= 1
        u_out[i] = hard
        bit_ws[0, i] = hard
        _propagate(bit_ws, n, i)


def genie_decode(llr_ch, frozen, true_u, max_corrections, llr_ws, bit_ws, u_out, dllr_out):
    """SC with up to max_corrections oracle-forced decisions.

    Returns the number of corrections used, or -1 if the budget was exceeded
    (decoding then stops early and u_out is not meaningful).
    """
    n = llr_ws.shape[0] - 1
    N = llr_ch.shape[0]
    llr_ws[n, :] = llr_ch
    used = 0
    for i in range(N):
        _advance(llr_ws, bit_ws, n, i)
        L = llr_ws[0, i]
        dllr_out[i] = L
        if frozen[i]:
            hard = 0
        else:
            hard = 1 if L < 0 else 0
            if hard != true_u[i]:
                if used < max_corrections:
                    used += 1
                    hard = true_u[i]
                else:
                    return -1
        u_out[i] = hard
        bit_ws[0, i] = hard
        _propagate(bit_ws, n, i)
    return used
