# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Cython lane for the two hot lattice-sum kernels.

Mirrors the NumPy lane's partial granularity (one partial per leading entry)
so totals folded from partials are scheduling-invariant.  Inner accumulation
uses Neumaier compensation to keep the lanes within tight relative agreement.
"""
from libc.math cimport sin, cos, fabs

import numpy as np


cdef inline double _trig(double tau, long d, double lsq,
                         double* b3, double* c3, bint has_c) nogil:
    cdef long r = d % 3
    if r < 0:
        r += 3
    cdef double out = sin(tau * d) * b3[r]
    if has_c:
        out += cos(tau * d) * c3[r]
    return out * (lsq / d)


def kernel_a_partial(ctx, long k, long m1):
    """Leading-entry partial of the per-mode resonance sum."""
    cdef long w_lo = ctx.w_lo
    cdef long w_hi = ctx.w_hi
    if m1 < w_lo or m1 > w_hi:
        return 0.0
    cdef double[::1] ampsq = ctx.ampsq
    cdef long n = ctx.n
    cdef long m_thr = ctx.m_thr
    cdef long d_thr = ctx.d_thr
    cdef double tau = ctx.tau
    cdef double lsq = ctx.lsq
    cdef double[::1] b3v = ctx.b3
    cdef double[::1] c3v = ctx.c3
    cdef double b3[3]
    cdef double c3[3]
    cdef bint has_c = False
    cdef int i
    for i in range(3):
        b3[i] = b3v[i]
        c3[i] = c3v[i]
        if c3[i] != 0.0:
            has_c = True
    cdef double a1 = ampsq[m1 - w_lo]
    cdef long kk = k * k, m1s = m1 * m1
    cdef long m2, m3, m4, m5, base, d, npass
    cdef double a12, a123, a1234, v
    cdef double total = 0.0, comp = 0.0, t
    with nogil:
        for m2 in range(w_lo, w_hi + 1):
            a12 = a1 * ampsq[m2 - w_lo]
            for m3 in range(w_lo, w_hi + 1):
                a123 = a12 * ampsq[m3 - w_lo]
                base = k - m1 + m2 - m3
                for m4 in range(w_lo, w_hi + 1):
                    m5 = base + m4
                    if m5 < w_lo or m5 > w_hi:
                        continue
                    if m5 - m4 < m_thr and m4 - m5 < m_thr:
                        continue
                    d = kk - m1s + m2 * m2 - m3 * m3 + m4 * m4 - m5 * m5
                    if d < d_thr and -d < d_thr:
                        continue
                    npass = 1  # slots 4-5 already passed
                    if m1 - m2 >= m_thr or m2 - m1 >= m_thr:
                        npass += 1
                    if m1 - m4 >= m_thr or m4 - m1 >= m_thr:
                        npass += 1
                    if m3 - m2 >= m_thr or m2 - m3 >= m_thr:
                        npass += 1
                    if m3 - m4 >= m_thr or m4 - m3 >= m_thr:
                        npass += 1
                    if m5 - m2 >= m_thr or m2 - m5 >= m_thr:
                        npass += 1
                    a1234 = a123 * ampsq[m4 - w_lo]
                    v = (2.0 * npass) * a1234 * ampsq[m5 - w_lo] \
                        * _trig(tau, d, lsq, b3, c3, has_c)
                    # Neumaier compensated accumulation
                    t = total + v
                    if fabs(total) >= fabs(v):
                        comp += (total - t) + v
                    else:
                        comp += (v - t) + total
                    total = t
    return total + comp


def kernel_b_partial(ctx, long m1):
    """Leading-entry partial of the fused mode-weighted sum."""
    cdef long w_lo = ctx.w_lo
    cdef long w_hi = ctx.w_hi
    if ctx.fg_re is None:
        raise ValueError("context was built without a mode-weight table")
    if m1 < w_lo or m1 > w_hi:
        return 0.0 + 0.0j
    cdef double[::1] ampsq = ctx.ampsq
    cdef double[::1] fg_re = ctx.fg_re
    cdef double[::1] fg_im = ctx.fg_im
    cdef long fg_lo = ctx.fg_lo
    cdef long m_thr = ctx.m_thr
    cdef long d_thr = ctx.d_thr
    cdef double tau = ctx.tau
    cdef double lsq = ctx.lsq
    cdef double[::1] b3v = ctx.b3
    cdef double[::1] c3v = ctx.c3
    cdef double b3[3]
    cdef double c3[3]
    cdef bint has_c = False
    cdef int i
    for i in range(3):
        b3[i] = b3v[i]
        c3[i] = c3v[i]
        if c3[i] != 0.0:
            has_c = True
    cdef double a1 = ampsq[m1 - w_lo]
    cdef long m1s = m1 * m1
    cdef long m2, m3, m4, m5, kg, d, npass, b12, b14, b32
    cdef double a12, a123, a1234, base_v, w
    cdef double tot_re = 0.0, comp_re = 0.0
    cdef double tot_im = 0.0, comp_im = 0.0
    cdef double t, v
    with nogil:
        for m2 in range(w_lo, w_hi + 1):
            a12 = a1 * ampsq[m2 - w_lo]
            b12 = 1 if (m1 - m2 >= m_thr or m2 - m1 >= m_thr) else 0
            for m3 in range(w_lo, w_hi + 1):
                a123 = a12 * ampsq[m3 - w_lo]
                b32 = 1 if (m3 - m2 >= m_thr or m2 - m3 >= m_thr) else 0
                for m4 in range(w_lo, w_hi + 1):
                    a1234 = a123 * ampsq[m4 - w_lo]
                    b14 = 1 if (m1 - m4 >= m_thr or m4 - m1 >= m_thr) else 0
                    for m5 in range(w_lo, w_hi + 1):
                        if m5 - m4 < m_thr and m4 - m5 < m_thr:
                            continue
                        kg = m1 - m2 + m3 - m4 + m5
                        d = kg * kg - m1s + m2 * m2 - m3 * m3 + m4 * m4 - m5 * m5
                        if d < d_thr and -d < d_thr:
                            continue
                        npass = 1 + b12 + b32 + b14
                        if m3 - m4 >= m_thr or m4 - m3 >= m_thr:
                            npass += 1
                        if m5 - m2 >= m_thr or m2 - m5 >= m_thr:
                            npass += 1
                        base_v = (2.0 * npass) * a1234 * ampsq[m5 - w_lo] \
                            * _trig(tau, d, lsq, b3, c3, has_c)
                        w = fg_re[kg - fg_lo]
                        if w != 0.0:
                            v = base_v * w
                            t = tot_re + v
                            if fabs(tot_re) >= fabs(v):
                                comp_re += (tot_re - t) + v
                            else:
                                comp_re += (v - t) + tot_re
                            tot_re = t
                        w = fg_im[kg - fg_lo]
                        if w != 0.0:
                            v = base_v * w
                            t = tot_im + v
                            if fabs(tot_im) >= fabs(v):
                                comp_im += (tot_im - t) + v
                            else:
                                comp_im += (v - t) + tot_im
                            tot_im = t
    return complex(tot_re + comp_re, tot_im + comp_im)
