# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled SC inner loops; same contract and bit-identical results as _sc_py."""

from libc.math cimport fabs


cdef inline double _f(double a, double b) noexcept nogil:
    cdef double ma = fabs(a)
    cdef double mb = fabs(b)
    cdef double m = ma if ma < mb else mb
    if (a < 0) != (b < 0):
        return -m
    return m


cdef inline void _advance(double[:, ::1] L, unsigned char[:, ::1] B,
                          int n, Py_ssize_t i) noexcept nogil:
    cdef Py_ssize_t j, half
    cdef int s, t
    if i == 0:
        for s in range(n - 1, -1, -1):
            half = (<Py_ssize_t>1) << s
            for j in range(half):
                L[s, j] = _f(L[s + 1, j], L[s + 1, j + half])
        return
    t = 0
    while not (i >> t) & 1:
        t += 1
    half = (<Py_ssize_t>1) << t
    for j in range(i, i + half):
        if B[t, j - half]:
            L[t, j] = L[t + 1, j] - L[t + 1, j - half]
        else:
            L[t, j] = L[t + 1, j] + L[t + 1, j - half]
    for s in range(t - 1, -1, -1):
        half = (<Py_ssize_t>1) << s
        for j in range(i, i + half):
            L[s, j] = _f(L[s + 1, j], L[s + 1, j + half])


cdef inline void _propagate(unsigned char[:, ::1] B, int n, Py_ssize_t i) noexcept nogil:
    cdef Py_ssize_t j, half, base
    cdef int s = 0
    while s < n and (i >> s) & 1:
        half = (<Py_ssize_t>1) << s
        base = i - (2 * half - 1)
        for j in range(base, base + half):
            B[s + 1, j] = B[s, j] ^ B[s, j + half]
            B[s + 1, j + half] = B[s, j + half]
        s += 1


def sc_decode(const double[::1] llr_ch, const unsigned char[::1] frozen,
              const signed char[::1] tflip,
              double[:, ::1] llr_ws, unsigned char[:, ::1] bit_ws,
              unsigned char[::1] u_out, double[::1] dllr_out):
    cdef Py_ssize_t N = llr_ch.shape[0]
    cdef int n = <int>llr_ws.shape[0] - 1
    cdef Py_ssize_t i, j
    cdef double L
    cdef unsigned char hard
    with nogil:
        for j in range(N):
            llr_ws[n, j] = llr_ch[j]
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


cdef int _genie_run(const double[::1] llr_ch, const unsigned char[::1] frozen,
                    const unsigned char[::1] true_u, int max_corrections,
                    double[:, ::1] llr_ws, unsigned char[:, ::1] bit_ws,
                    unsigned char[::1] u_out, double[::1] dllr_out) noexcept nogil:
    cdef Py_ssize_t N = llr_ch.shape[0]
    cdef int n = <int>llr_ws.shape[0] - 1
    cdef Py_ssize_t i, j
    cdef double L
    cdef unsigned char hard
    cdef int used = 0
    for j in range(N):
        llr_ws[n, j] = llr_ch[j]
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


def genie_decode(const double[::1] llr_ch, const unsigned char[::1] frozen,
                 const unsigned char[::1] true_u, int max_corrections,
                 double[:, ::1] llr_ws, unsigned char[:, ::1] bit_ws,
                 unsigned char[::1] u_out, double[::1] dllr_out):
    """Returns corrections used, or -1 once the budget would be exceeded."""
    cdef int used
    with nogil:
        used = _genie_run(llr_ch, frozen, true_u, max_corrections,
                          llr_ws, bit_ws, u_out, dllr_out)
    return used
