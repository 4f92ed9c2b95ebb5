"""Shared plumbing: error types, compensated summation, deterministic
partitioned reduction, and counter-based random seeding.

Every large fold in this package follows the same discipline: the work is cut
into partitions of *fixed* granularity (independent of the worker count), each
partition is reduced on its own, and the partial results are combined in a
fixed order with Kahan–Neumaier compensation.  Results are therefore identical
bit for bit no matter how many workers ran the partitions.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

__all__ = [
    "DomainError",
    "ResourceError",
    "NumericalError",
    "NeumaierSum",
    "neumaier_sum",
    "combine_ordered",
    "parallel_map_ordered",
    "chunk_rng",
    "MC_CHUNK",
]


class DomainError(ValueError):
    """Invalid input for an operation (precondition violated)."""


class ResourceError(RuntimeError):
    """A configured resource cap would be exceeded."""


class NumericalError(RuntimeError):
    """A numerical method failed to reach its requested tolerance.

    ``partial_value`` carries the best available estimate.
    """

    def __init__(self, message: str, partial_value: float | None = None):
        super().__init__(message)
        self.partial_value = partial_value


class NeumaierSum:
    """Running compensated sum (Neumaier variant of Kahan summation).

    Tracks real and imaginary parts with separate compensation terms so it can
    absorb complex values; ``value`` returns a float when nothing imaginary was
    ever added.
    """

    __slots__ = ("_sr", "_cr", "_si", "_ci", "_complex")

    def __init__(self) -> None:
        self._sr = 0.0
        self._cr = 0.0
        self._si = 0.0
        self._ci = 0.0
        self._complex = False

    def add(self, x: complex | float) -> None:
        if isinstance(x, complex):
            self._complex = True
            self._sr, self._cr = _neumaier_step(self._sr, self._cr, x.real)
            self._si, self._ci = _neumaier_step(self._si, self._ci, x.imag)
        else:
            self._sr, self._cr = _neumaier_step(self._sr, self._cr, float(x))

    def extend(self, xs: Iterable[complex | float]) -> None:
        for x in xs:
            self.add(x)

    @property
    def value(self) -> complex | float:
        re = self._sr + self._cr
        if self._complex:
            return complex(re, self._si + self._ci)
        return re


def _neumaier_step(s: float, c: float, x: float) -> tuple[float, float]:
    t = s + x
    if abs(s) >= abs(x):
        c += (s - t) + x
    else:
        c += (x - t) + s
    return t, c


def neumaier_sum(xs: Iterable[complex | float]) -> complex | float:
    """Compensated sum of an iterable, in iteration order."""
    acc = NeumaierSum()
    acc.extend(xs)
    return acc.value


def combine_ordered(partials: Sequence[complex | float]) -> complex | float:
    """Fold partial results in index order with compensation.

    This is the one agreed-upon way partial sums are merged, so the final
    value does not depend on how the partials were scheduled.
    """
    return neumaier_sum(partials)


_T = TypeVar("_T")


def parallel_map_ordered(
    fn: Callable[[_T], object],
    items: Sequence[_T],
    workers: int = 1,
) -> list:
    """Map ``fn`` over fixed partitions, returning results in item order.

    ``workers == 1`` runs inline (no pool); larger counts use threads, which
    suits the NumPy/compiled kernels that release the GIL.  The partitioning
    (the ``items`` themselves) must already be worker-count independent.
    """
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


#: Fixed Monte-Carlo chunk size; per-chunk generators depend only on
#: (seed, chunk index), never on the worker layout.
MC_CHUNK = 4096


def chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    """Deterministic generator for one Monte-Carlo chunk.

    Derived from ``(seed, chunk_index)`` alone, so sample ``i`` always comes
    from chunk ``i // MC_CHUNK`` at offset ``i % MC_CHUNK`` regardless of
    scheduling.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(chunk_index),))
    return np.random.default_rng(ss)


@dataclass(frozen=True)
class FitResult:
    """Least-squares slope of log|y| against log x."""

    slope: float
    intercept: float

    @staticmethod
    def loglog(xs: Sequence[float], ys: Sequence[float]) -> "FitResult":
        lx = np.log(np.asarray(xs, dtype=float))
        ly = np.log(np.abs(np.asarray(ys, dtype=float)))
        slope, intercept = np.polyfit(lx, ly, 1)
        return FitResult(float(slope), float(intercept))


def ceil_div_fraction(num: int, mu) -> int:
    """Smallest integer q with q*mu >= num, for positive rational/real mu.

    ``mu = inf`` gives 0 (a vanished cutoff excludes nothing).
    """
    from fractions import Fraction

    if isinstance(mu, float) and math.isinf(mu) and mu > 0:
        return 0
    f = Fraction(mu) if not isinstance(mu, Fraction) else mu
    if f <= 0:
        raise DomainError("cutoff parameter must be positive")
    q = Fraction(num) / f
    return int(math.ceil(q))
