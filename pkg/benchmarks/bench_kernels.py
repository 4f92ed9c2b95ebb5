"""Timing comparison of the two kernel lanes on the hot lattice sums.

Runs the per-leading-entry partials for the fused pairing sum (kernel B) and
the single-mode resonance sum (kernel A) over a ladder of lattice sizes, in
both the pure-NumPy lane and the compiled lane (when built), checks the folded
totals agree to 1e-12 relative (each lane is bitwise deterministic on its own;
across lanes the reduction order differs, so the last bit may too), and
reports wall times and speedups.

Usage:  python3 benchmarks/bench_kernels.py [--sizes 16,24,32] [--repeats 3]
"""
from __future__ import annotations

import argparse
import time
from fractions import Fraction

import numpy as np

from quinturb._kern import pure

try:
    from quinturb._kern import _fast
except ImportError:  # compiled lane not built
    _fast = None

from quinturb.kinetic import (
    EpsilonRegime,
    _exact_phase_tables,
    _fg_table,
    _window_data,
)
from quinturb.lattice import Profile, RegimeParams
from quinturb.util import combine_ordered


def build_context(L: int, rho: float, t) -> tuple:
    profile = Profile("smooth_bump", radius=0.5)
    params = RegimeParams(lattice_size=L, rho=rho, mu=8, nu=1_000_000)
    regime = EpsilonRegime.from_params(L, rho)
    w_lo, ampsq = _window_data(profile, L)
    tau, b3, c3 = _exact_phase_tables(t, regime)
    w_hi = w_lo + len(ampsq) - 1
    k_lo = 3 * w_lo - 2 * w_hi
    k_hi = 3 * w_hi - 2 * w_lo
    fg = _fg_table(profile, profile, L, k_lo, k_hi)
    # the context container is shared between lanes
    ctx = pure.KernelContext(
        w_lo,
        ampsq,
        params.momentum_threshold(),
        params.frequency_threshold(),
        tau,
        float(L * L),
        b3,
        c3,
        fg_re=np.ascontiguousarray(fg.real),
        fg_im=np.ascontiguousarray(fg.imag),
        fg_lo=k_lo,
    )
    leads = list(range(w_lo, w_lo + len(ampsq)))
    return ctx, leads


def time_lane(lane_module, L: int, repeats: int) -> tuple[float, float, complex]:
    """Best-of-``repeats`` wall time for one full B-pass and one A-pass."""
    t = Fraction(1, 2)
    ctx, leads = build_context(L, rho=8.0, t=t)
    best_b = best_a = float("inf")
    total = None
    for _ in range(repeats):
        start = time.perf_counter()
        partials = [lane_module.kernel_b_partial(ctx, m1) for m1 in leads]
        best_b = min(best_b, time.perf_counter() - start)
        folded = complex(combine_ordered(partials))
        if total is None:
            total = folded
        elif folded != total:
            raise AssertionError("lane is not run-to-run deterministic")
        start = time.perf_counter()
        for m1 in leads:
            lane_module.kernel_a_partial(ctx, 0, m1)
        best_a = min(best_a, time.perf_counter() - start)
    return best_b, best_a, total


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="16,24,32")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"{'L':>4} {'lane':>7} {'B-pass [s]':>12} {'A-pass [s]':>12} {'speedup':>9}")
    for L in sizes:
        pure_b, pure_a, pure_total = time_lane(pure, L, args.repeats)
        print(f"{L:>4} {'pure':>7} {pure_b:>12.4f} {pure_a:>12.4f} {'1.00x':>9}")
        if _fast is None:
            continue
        fast_b, fast_a, fast_total = time_lane(_fast, L, args.repeats)
        speed = pure_b / fast_b if fast_b > 0 else float("inf")
        print(f"{L:>4} {'cython':>7} {fast_b:>12.4f} {fast_a:>12.4f} {speed:>8.2f}x")
        gap = abs(fast_total - pure_total)
        if gap > 1e-12 * max(abs(pure_total), 1e-300):
            raise AssertionError(
                f"lane totals differ at L={L}: {pure_total!r} vs {fast_total!r}"
            )
        print(f"{'':>4} {'':>7} cross-lane |diff| = {gap:.3e}")
    if _fast is None:
        print("compiled lane not built; only the pure lane was timed")


if __name__ == "__main__":
    main()
