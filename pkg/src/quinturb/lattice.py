"""Lattice momentum enumeration and Gaussian pairing expectations.

Momenta live on the scaled integer lattice: an exact integer ``m`` stands for
the momentum ``m / L``.  All admissibility comparisons (the child-difference
cutoff ``|kbar| >= 1/mu`` and the frequency cutoff ``|Delta| >= 1/nu``) are
done in integer/rational arithmetic: ``|m5 - m4| >= ceil(L/mu)`` and
``|d| >= ceil(L^2/nu)`` with ``d`` the exact numerator of ``Delta`` over
``L^2``.  Floating point enters only through profile amplitudes.
"""
from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import trees as _trees
from .chaos import ComplexGaussianIndexing, pair_expectation, wick_product
from .util import DomainError, ResourceError, ceil_div_fraction

__all__ = [
    "Profile",
    "RegimeParams",
    "MomentumTuple",
    "alternating_sum",
    "delta_numerator",
    "kbar_numerator",
    "enumerate_c_l",
    "enumerate_c_l_fixed_leading",
    "count_c_l",
    "parity_permutations",
    "apply_permutation",
    "passing_permutation_count",
    "enumerate_c_sigma",
    "enumerate_c_tree",
    "enumerate_c_pair",
    "pairing_expectation",
    "tuples_to_csv",
    "DEFAULT_TUPLE_CAP",
]

MomentumTuple = tuple[int, ...]

#: raw-candidate guard for general-arity enumeration (free-leaf grid size)
DEFAULT_TUPLE_CAP = 100_000_000


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Profile:
    """Compactly supported bump on the line; zero outside is *exact*.

    kinds:
      - ``smooth_bump``: height * exp(-1 / (1 - y^2)) on |y| < 1, 0 outside,
      - ``poly_bump``:   height * (1 - y^2)^4 on |y| < 1, 0 outside,
    with ``y = (x - center) / radius``.
    """

    kind: str
    radius: float
    center: float = 0.0
    height: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("smooth_bump", "poly_bump"):
            raise DomainError(f"unknown profile kind {self.kind!r}")
        if not self.radius > 0:
            raise DomainError("profile radius must be positive")

    def evaluate(self, x: float) -> float:
        y = (x - self.center) / self.radius
        if abs(y) >= 1.0:
            return 0.0
        if self.kind == "smooth_bump":
            return self.height * math.exp(-1.0 / (1.0 - y * y))
        return self.height * (1.0 - y * y) ** 4

    def evaluate_array(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        y = (xs - self.center) / self.radius
        inside = np.abs(y) < 1.0
        out = np.zeros_like(y)
        ys = y[inside]
        if self.kind == "smooth_bump":
            out[inside] = self.height * np.exp(-1.0 / (1.0 - ys * ys))
        else:
            out[inside] = self.height * (1.0 - ys * ys) ** 4
        return out

    def support_window(self, lattice_size: int) -> list[int]:
        """Integers ``m`` with a nonzero value at ``m / L`` (exact pruning)."""
        if lattice_size <= 0:
            raise DomainError("lattice size must be positive")
        lo = math.floor(lattice_size * (self.center - self.radius)) - 1
        hi = math.ceil(lattice_size * (self.center + self.radius)) + 1
        return [m for m in range(lo, hi + 1) if self.evaluate(m / lattice_size) != 0.0]

    def fourier(self, xi):
        """Transform ``int f(x) exp(-i x xi) dx`` by fixed Gauss-Legendre
        quadrature over the support (spectrally accurate for these bumps)."""
        x, wf = _quad_table(self)
        xi_arr = np.asarray(xi, dtype=float)
        phase = np.exp(-1j * np.multiply.outer(xi_arr, x))
        out = phase @ wf
        return complex(out) if np.isscalar(xi) or xi_arr.ndim == 0 else out


@lru_cache(maxsize=32)
def _quad_table(profile: Profile) -> tuple[np.ndarray, np.ndarray]:
    # 400 nodes is far past convergence for |xi| up to ~10^3 * radius
    nodes, weights = np.polynomial.legendre.leggauss(400)
    a = profile.center - profile.radius
    b = profile.center + profile.radius
    x = 0.5 * (b - a) * nodes + 0.5 * (b + a)
    w = 0.5 * (b - a) * weights
    return x, w * profile.evaluate_array(x)


# ---------------------------------------------------------------------------
# regime parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegimeParams:
    """Joint scaling parameters for one lattice experiment.

    ``mu`` (momentum-difference cutoff scale) and ``nu`` (frequency cutoff
    scale) may be ints, Fractions or floats; they are used in exact rational
    comparisons.  ``rho`` is the residual oscillation rate; ``alpha`` the
    regime exponent; ``sobolev_index`` the spatial norm index.
    """

    lattice_size: int
    rho: float = 1.0
    mu: object = 1
    nu: object = 1
    alpha: float = 0.5
    sobolev_index: float = 1.0

    def __post_init__(self) -> None:
        if not (isinstance(self.lattice_size, int) and self.lattice_size >= 1):
            raise DomainError("lattice size must be a positive integer")
        if not self.rho >= 1:
            raise DomainError("rho must be >= 1")
        for name in ("mu", "nu"):
            raw = getattr(self, name)
            if isinstance(raw, float) and math.isinf(raw) and raw > 0:
                continue  # vanished cutoff
            if Fraction(raw) < 1:
                raise DomainError(f"{name} must be >= 1")
        if not self.alpha > 0:
            raise DomainError("alpha must be positive")

    def momentum_threshold(self) -> int:
        """Least integer ``q`` with ``q / L >= 1 / mu``."""
        return ceil_div_fraction(self.lattice_size, self.mu)

    def frequency_threshold(self) -> int:
        """Least integer ``q`` with ``q / L^2 >= 1 / nu``."""
        return ceil_div_fraction(self.lattice_size * self.lattice_size, self.nu)


# ---------------------------------------------------------------------------
# arity-5 tuple arithmetic
# ---------------------------------------------------------------------------


def alternating_sum(entries: Sequence[int]) -> int:
    """m1 - m2 + m3 - m4 + ... (odd length ends on +)."""
    out = 0
    for j, m in enumerate(entries):
        out += m if j % 2 == 0 else -m
    return out


def delta_numerator(entries: Sequence[int]) -> int:
    """Exact numerator of the resonance function over L^2 (arity 5):
    k^2 - m1^2 + m2^2 - m3^2 + m4^2 - m5^2 with k the alternating sum."""
    if len(entries) != 5:
        raise DomainError("the resonance numerator is defined for 5-tuples")
    k = alternating_sum(entries)
    out = k * k
    sign = -1
    for m in entries:
        out += sign * m * m
        sign = -sign
    return out


def kbar_numerator(entries: Sequence[int]) -> int:
    """Exact numerator of kbar = k - m1 + m2 - m3 (= m5 - m4) over L."""
    if len(entries) != 5:
        raise DomainError("kbar is defined for 5-tuples")
    return entries[4] - entries[3]


def _admissible5(entries: MomentumTuple, k: int, m_thr: int, d_thr: int) -> bool:
    return (
        alternating_sum(entries) == k
        and abs(entries[4] - entries[3]) >= m_thr
        and abs(delta_numerator(entries)) >= d_thr
    )


# ---------------------------------------------------------------------------
# constrained enumeration (arity 5)
# ---------------------------------------------------------------------------


def enumerate_c_l_fixed_leading(
    k: int,
    m1: int,
    params: RegimeParams,
    support: Profile,
) -> Iterator[MomentumTuple]:
    """Admissible 5-tuples with the given first entry, in lexicographic order.

    This is the unit of parallel partitioning: streams at distinct ``m1`` are
    independent and each is internally ordered.
    """
    window = support.support_window(params.lattice_size)
    wset = set(window)
    if m1 not in wset:
        return
    m_thr = params.momentum_threshold()
    d_thr = params.frequency_threshold()
    for m2 in window:
        for m3 in window:
            base = k - m1 + m2 - m3
            for m4 in window:
                m5 = base + m4
                if m5 not in wset or abs(m5 - m4) < m_thr:
                    continue
                mt = (m1, m2, m3, m4, m5)
                if abs(delta_numerator(mt)) >= d_thr:
                    yield mt


def enumerate_c_l(
    k: int, params: RegimeParams, support: Profile
) -> Iterator[MomentumTuple]:
    """All admissible 5-tuples with alternating sum ``k``, lexicographic on
    the four free entries; ``m5`` is solved from the linear constraint."""
    for m1 in support.support_window(params.lattice_size):
        yield from enumerate_c_l_fixed_leading(k, m1, params, support)


def count_c_l(k: int, params: RegimeParams, support: Profile) -> int:
    """Cardinality of the admissible set (vectorized; equals the stream count).

    For each free pair (m1, m2) the trailing-gap value m5 - m4 is constant in
    (m3, m4), and the resonance numerator is affine in m4, so both cutoffs
    reduce to array comparisons on an (m3, m4) grid.
    """
    window = support.support_window(params.lattice_size)
    if not window:
        return 0
    m_thr = params.momentum_threshold()
    d_thr = params.frequency_threshold()
    w = np.asarray(window, dtype=np.int64)
    lo, hi = int(w.min()), int(w.max())
    member = np.zeros(hi - lo + 1, dtype=bool)
    member[w - lo] = True
    m3g = w[:, None]
    m4g = w[None, :]
    ksq = k * k
    total = 0
    for m1 in window:
        for m2 in window:
            base = k - m1 + m2 - m3g  # = m5 - m4, constant along m4
            m5 = base + m4g
            ok = (m5 >= lo) & (m5 <= hi)
            ok &= member[np.clip(m5 - lo, 0, hi - lo)]
            ok &= np.abs(base) >= m_thr
            delta = ksq - m1 * m1 + m2 * m2 - m3g * m3g + m4g * m4g - m5 * m5
            ok &= np.abs(delta) >= d_thr
            total += int(np.count_nonzero(ok))
    return total


# ---------------------------------------------------------------------------
# parity permutations
# ---------------------------------------------------------------------------


@lru_cache(maxsize=1)
def parity_permutations() -> tuple[tuple[int, ...], ...]:
    """The 12 permutations of positions 1..5 preserving position parity,
    as 0-based source-index tuples (entry ``i`` of the image comes from
    ``perm[i]``), in lexicographic order."""
    odd_slots = (0, 2, 4)
    even_slots = (1, 3)
    out = []
    for podd in permutations(odd_slots):
        for peven in permutations(even_slots):
            perm = [0] * 5
            for slot, src in zip(odd_slots, podd):
                perm[slot] = src
            for slot, src in zip(even_slots, peven):
                perm[slot] = src
            out.append(tuple(perm))
    return tuple(sorted(out))


def apply_permutation(entries: Sequence[int], perm: Sequence[int]) -> MomentumTuple:
    if len(entries) != len(perm):
        raise DomainError("permutation arity mismatch")
    return tuple(entries[p] for p in perm)


def passing_permutation_count(entries: MomentumTuple, m_thr: int) -> int:
    """Number of parity permutations whose image passes the kbar cutoff.

    For a parity permutation only the cutoff ``|m[p4] - m[p3]| >= m_thr``
    can change (window membership, the linear constraint and the resonance
    numerator are invariant); each of the 6 (even-slot, odd-slot) source pairs
    is realized by exactly 2 of the 12 permutations.
    """
    count = 0
    for even_src in (1, 3):
        for odd_src in (0, 2, 4):
            if abs(entries[odd_src] - entries[even_src]) >= m_thr:
                count += 2
    return count


def enumerate_c_sigma(
    k: int,
    sigma: Sequence[int],
    params: RegimeParams,
    support: Profile,
) -> Iterator[MomentumTuple]:
    """5-tuples admissible both as themselves and after applying ``sigma``
    (full independent recheck of the permuted tuple, including the linear
    constraint — not only the parity-invariant parts)."""
    if len(sigma) != 5:
        raise DomainError("sigma must permute 5 positions")
    m_thr = params.momentum_threshold()
    d_thr = params.frequency_threshold()
    for mt in enumerate_c_l(k, params, support):
        if _admissible5(apply_permutation(mt, sigma), k, m_thr, d_thr):
            yield mt


# ---------------------------------------------------------------------------
# general-arity enumeration against a tree
# ---------------------------------------------------------------------------


def _free_leaf_count(tree) -> int:
    return tree.leaf_count - 1


def enumerate_c_tree(
    tree,
    k: int,
    params: RegimeParams,
    support: Profile,
    cap: int = DEFAULT_TUPLE_CAP,
    leading: int | None = None,
) -> Iterator[MomentumTuple]:
    """Admissible leaf labelings of ``tree`` with root momentum ``k``.

    The last leaf is solved from the linear constraint (leaf signs alternate
    in left-to-right order, ending on +); all remaining leaves range over the
    support window in lexicographic order.  Raw grid size is guarded by
    ``cap``.  ``leading`` restricts the first leaf to one value (the unit of
    parallel partitioning).
    """
    window = support.support_window(params.lattice_size)
    wset = set(window)
    free = _free_leaf_count(tree)
    if free < 0:
        return
    first_choices = window if leading is None else [leading]
    if leading is not None and leading not in wset:
        return
    raw = len(first_choices) * len(window) ** max(free - 1, 0)
    if raw > cap:
        raise ResourceError(
            f"candidate grid of {raw} leaf labelings exceeds cap {cap}"
        )
    mu = params.mu
    nu = params.nu

    def rec(prefix: list[int], signed: int) -> Iterator[MomentumTuple]:
        if len(prefix) == free:
            # trailing sign is + (odd leaf count), so m_last = k - signed
            m_last = k - signed
            if m_last in wset:
                mt = tuple(prefix) + (m_last,)
                asg = _trees.LabelAssignment(mt, params.lattice_size)
                if _trees.admissible(tree, asg, k, mu, nu):
                    yield mt
            return
        sign = 1 if len(prefix) % 2 == 0 else -1
        choices = first_choices if not prefix else window
        for m in choices:
            prefix.append(m)
            yield from rec(prefix, signed + sign * m)
            prefix.pop()

    yield from rec([], 0)


def enumerate_c_pair(
    tree1,
    tree2,
    sigma: Sequence[int],
    k: int,
    params: RegimeParams,
    support: Profile,
    cap: int = DEFAULT_TUPLE_CAP,
    leading: int | None = None,
) -> Iterator[MomentumTuple]:
    """Labelings admissible for ``tree1`` whose ``sigma``-image is admissible
    for ``tree2`` (the pairing index set for two-tree covariances)."""
    if len(sigma) != tree2.leaf_count:
        raise DomainError("sigma arity must match the second tree's leaves")
    mu = params.mu
    nu = params.nu
    for mt in enumerate_c_tree(tree1, k, params, support, cap, leading):
        image = apply_permutation(mt, sigma)
        asg = _trees.LabelAssignment(image, params.lattice_size)
        if _trees.admissible(tree2, asg, k, mu, nu):
            yield mt


# ---------------------------------------------------------------------------
# pairing expectations
# ---------------------------------------------------------------------------


def _parity_classes(entries: Sequence[int]) -> Counter:
    return Counter((m, j % 2) for j, m in enumerate(entries))


def pairing_expectation(
    tuple1: Sequence[int],
    tuple2: Sequence[int],
    idx: ComplexGaussianIndexing | None = None,
    method: str = "auto",
) -> complex:
    """E( conj(word(tuple1)) * word(tuple2) ) for the leaf Gaussian words
    (factors conjugated at even positions).

    ``method="auto"``: class-counting closed form — zero unless the two
    tuples have identical (momentum, parity-class) multisets, else the
    product of class-multiplicity factorials.  ``method="chaos"``: build both
    words in the chaos algebra and take the exact coefficient pairing
    (independent oracle; cost grows fast with repeated entries).
    """
    if len(tuple1) != len(tuple2):
        raise DomainError("pairing expectation requires equal arities")
    if method not in ("auto", "fast", "chaos"):
        raise DomainError(f"unknown method {method!r}")
    if method in ("auto", "fast"):
        c1 = _parity_classes(tuple1)
        c2 = _parity_classes(tuple2)
        if c1 != c2:
            return 0.0 + 0.0j
        out = 1.0
        for mult in c1.values():
            out *= math.factorial(mult)
        return complex(out)

    idx = idx or ComplexGaussianIndexing()
    w1 = _leaf_word(tuple(tuple1), idx)
    w2 = _leaf_word(tuple(tuple2), idx)
    k1 = alternating_sum(tuple1)
    k2 = alternating_sum(tuple2)
    return complex(pair_expectation(w1, w2, k1, k2))


def _leaf_word(entries: MomentumTuple, idx: ComplexGaussianIndexing):
    word = None
    for j, m in enumerate(entries):
        factor = idx.gaussian_factor(1, m, conjugate=(j % 2 == 1))
        word = factor if word is None else wick_product(word, factor)
    return word


# ---------------------------------------------------------------------------
# audit output
# ---------------------------------------------------------------------------


def tuples_to_csv(path, stream: Iterable[MomentumTuple]) -> int:
    """Dump a tuple stream as CSV (m1..m5, resonance numerator); returns the
    row count."""
    n = 0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["m1", "m2", "m3", "m4", "m5", "delta_num"])
        for mt in stream:
            writer.writerow(list(mt) + [delta_numerator(mt)])
            n += 1
    return n
