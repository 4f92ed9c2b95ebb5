"""NumPy lane for the two hot lattice-sum kernels.

Kernel A: the per-mode resonance sum — for a fixed output mode ``k``, sum
over admissible 5-tuples of ``n_pass * trig(d) / Delta * prod |a|^2``.

Kernel B: the fused pairing sum — all five entries free, the output mode is
the alternating sum, each term additionally weighted by a per-mode table
(test-function transforms).

Both kernels are partitioned on the leading entry ``m1``: a partial depends
only on the context and ``m1``, so any scheduling of partials followed by the
ordered fold gives bit-identical totals.  Windows are contiguous integer
ranges; admissibility thresholds are integers; the oscillatory weight is
``sin(tau * d) * b[d mod 3] + cos(tau * d) * c[d mod 3]`` times ``lsq / d``
(the dyadic case is ``b = 1, c = 0``).
"""
from __future__ import annotations

import numpy as np

__all__ = ["KernelContext", "kernel_a_partial", "kernel_b_partial"]


class KernelContext:
    """Shared precomputed grids for one (window, weights, thresholds) setup."""

    def __init__(
        self,
        w_lo: int,
        ampsq: np.ndarray,
        m_thr: int,
        d_thr: int,
        tau: float,
        lsq: float,
        b3: np.ndarray,
        c3: np.ndarray,
        fg_re: np.ndarray | None = None,
        fg_im: np.ndarray | None = None,
        fg_lo: int = 0,
    ):
        self.w_lo = int(w_lo)
        self.ampsq = np.asarray(ampsq, dtype=np.float64)
        self.n = len(self.ampsq)
        self.w_hi = self.w_lo + self.n - 1
        self.m_thr = int(m_thr)
        self.d_thr = int(d_thr)
        self.tau = float(tau)
        self.lsq = float(lsq)
        self.b3 = np.asarray(b3, dtype=np.float64)
        self.c3 = np.asarray(c3, dtype=np.float64)
        self.window = np.arange(self.w_lo, self.w_lo + self.n, dtype=np.int64)
        self.fg_re = None if fg_re is None else np.asarray(fg_re, dtype=np.float64)
        self.fg_im = None if fg_im is None else np.asarray(fg_im, dtype=np.float64)
        self.fg_lo = int(fg_lo)
        # 2-d (m3, m4) helpers for kernel A
        w = self.window
        self._sq = (w * w).astype(np.int64)
        self._pass34 = (np.abs(w[:, None] - w[None, :]) >= self.m_thr).astype(np.int64)
        # 3-d (m3, m4, m5) helpers for kernel B
        if self.fg_re is not None:
            g3 = w[:, None, None]
            g4 = w[None, :, None]
            g5 = w[None, None, :]
            self._b_lin = (g3 - g4 + g5).astype(np.int64)
            self._b_quad = (-g3 * g3 + g4 * g4 - g5 * g5).astype(np.int64)
            self._b_amp = (
                self.ampsq[:, None, None]
                * self.ampsq[None, :, None]
                * self.ampsq[None, None, :]
            )
            p34 = self._pass34[:, :, None]
            p54 = (np.abs(g5 - g4) >= self.m_thr).astype(np.int64)
            self._b_pass_3445 = p34 + p54
            self._b_cut45 = np.abs(g5 - g4) >= self.m_thr

    def trig_weight(self, d: np.ndarray) -> np.ndarray:
        """(sin(tau d) b[d%3] + cos(tau d) c[d%3]) * lsq / d on nonzero d."""
        phase = self.tau * d
        r = d % 3
        out = np.sin(phase) * self.b3[r]
        if np.any(self.c3):
            out += np.cos(phase) * self.c3[r]
        return out * (self.lsq / d)


def kernel_a_partial(ctx: KernelContext, k: int, m1: int) -> float:
    """Leading-entry partial of the per-mode resonance sum."""
    if not ctx.w_lo <= m1 <= ctx.w_hi:
        return 0.0
    w = ctx.window
    sq = ctx._sq
    a1 = ctx.ampsq[m1 - ctx.w_lo]
    kk = k * k
    m1s = m1 * m1
    pieces = []
    for i2, m2 in enumerate(w):
        m2 = int(m2)
        base = k - m1 + m2
        M5 = base - w[:, None] + w[None, :]
        inside = (M5 >= ctx.w_lo) & (M5 <= ctx.w_hi)
        cut45 = np.abs(M5 - w[None, :]) >= ctx.m_thr
        d = (kk - m1s + m2 * m2) - sq[:, None] + sq[None, :] - M5 * M5
        valid = inside & cut45 & (np.abs(d) >= ctx.d_thr)
        if not np.any(valid):
            pieces.append(0.0)
            continue
        dv = d[valid]
        m5v = M5[valid]
        # n_pass: 2 * number of (even-slot, odd-slot) pairs passing the cutoff
        b12 = 1 if abs(m1 - m2) >= ctx.m_thr else 0
        b14 = (np.abs(m1 - w) >= ctx.m_thr).astype(np.int64)
        b32 = (np.abs(w - m2) >= ctx.m_thr).astype(np.int64)
        npass_grid = (
            b12
            + b14[None, :]
            + b32[:, None]
            + ctx._pass34
            + (np.abs(M5 - m2) >= ctx.m_thr)
            + cut45
        )
        npv = 2.0 * npass_grid[valid]
        ampv = (
            a1
            * ctx.ampsq[i2]
            * (ctx.ampsq[:, None] * ctx.ampsq[None, :])[valid]
            * ctx.ampsq[m5v - ctx.w_lo]
        )
        pieces.append(float(np.sum(npv * ampv * ctx.trig_weight(dv))))
    return float(np.sum(np.asarray(pieces)))


def kernel_b_partial(ctx: KernelContext, m1: int) -> complex:
    """Leading-entry partial of the fused mode-weighted sum."""
    if ctx.fg_re is None:
        raise ValueError("context was built without a mode-weight table")
    if not ctx.w_lo <= m1 <= ctx.w_hi:
        return 0.0 + 0.0j
    w = ctx.window
    a1 = ctx.ampsq[m1 - ctx.w_lo]
    m1s = m1 * m1
    re_pieces = []
    im_pieces = []
    b14 = (np.abs(m1 - w) >= ctx.m_thr).astype(np.int64)[None, :, None]
    for i2, m2 in enumerate(w):
        m2 = int(m2)
        kg = (m1 - m2) + ctx._b_lin
        d = (kg * kg) + (m2 * m2 - m1s) + ctx._b_quad
        valid = ctx._b_cut45 & (np.abs(d) >= ctx.d_thr)
        if not np.any(valid):
            re_pieces.append(0.0)
            im_pieces.append(0.0)
            continue
        b12 = 1 if abs(m1 - m2) >= ctx.m_thr else 0
        b32 = (np.abs(w - m2) >= ctx.m_thr).astype(np.int64)[:, None, None]
        b52 = (np.abs(w - m2) >= ctx.m_thr).astype(np.int64)[None, None, :]
        npass = b12 + b14 + b32 + b52 + ctx._b_pass_3445
        dv = d[valid]
        kv = kg[valid]
        base = (
            2.0
            * npass[valid]
            * (a1 * ctx.ampsq[i2])
            * ctx._b_amp[valid]
            * ctx.trig_weight(dv)
        )
        fg_idx = kv - ctx.fg_lo
        re_pieces.append(float(np.sum(base * ctx.fg_re[fg_idx])))
        im_pieces.append(float(np.sum(base * ctx.fg_im[fg_idx])))
    return complex(float(np.sum(np.asarray(re_pieces))), float(np.sum(np.asarray(im_pieces))))
