"""Iterated quintic Wick convolutions on the lattice, in closed form.

The order-``n`` iterate is a degree ``4n+1`` chaos expansion whose
coefficients are exact oscillatory polynomials in time
(:class:`~quinturb.oscillatory.OscPoly`); no ODE stepping happens anywhere.
Two independent assemblies of the same object are provided — the direct
recursion (:func:`picard_recursion`) and the diagrammatic sum over labelled
trees (:func:`tree_sum`) — plus exact second-moment machinery and Monte Carlo
estimators used as statistical oracles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from . import trees as _trees
from .chaos import (
    ChaosExpansion,
    ComplexGaussianIndexing,
    MultiIndex,
    sample_chaos_batch,
    sqrt_multinomial,
)
from .lattice import (
    DEFAULT_TUPLE_CAP,
    Profile,
    RegimeParams,
    alternating_sum,
    apply_permutation,
    delta_numerator,
    enumerate_c_l,
    enumerate_c_pair,
    enumerate_c_tree,
    pairing_expectation,
    passing_permutation_count,
)
from .oscillatory import OscPoly, f_tree_symbolic, g_m_symbolic, osc_primitive
from .util import DomainError, NeumaierSum, ResourceError, parallel_map_ordered

__all__ = [
    "PicardState",
    "picard_recursion",
    "tree_sum",
    "mass_v1",
    "mass_derivative_n1",
    "pairing_sum",
    "monte_carlo_mass",
    "monte_carlo_pair",
    "MAX_ORDER",
]

#: hard cap on the iteration order (combinatorial blow-up above)
MAX_ORDER = 2


@dataclass(frozen=True)
class PicardState:
    """One iterate: chaos coefficients (values: OscPoly or complex) plus the
    configuration that produced it."""

    order: int
    coefficients: ChaosExpansion
    params: RegimeParams
    profile: Profile

    def mode_coefficients(self, k: int) -> dict[MultiIndex, object]:
        """Chaos coefficients at one lattice mode."""
        out = {}
        for alpha, modes in self.coefficients.coeffs.items():
            if k in modes:
                out[alpha] = modes[k]
        return out

    def to_document(self) -> dict:
        return {
            "order": self.order,
            "lattice_size": self.params.lattice_size,
            "profile": {
                "kind": self.profile.kind,
                "radius": self.profile.radius,
                "center": self.profile.center,
                "height": self.profile.height,
            },
            "coefficients": self.coefficients.to_document(),
        }


# ---------------------------------------------------------------------------
# the recursion
# ---------------------------------------------------------------------------


def _initial_state(params: RegimeParams, profile: Profile) -> PicardState:
    idx = ComplexGaussianIndexing()
    L = params.lattice_size
    coeffs: dict[MultiIndex, dict[int, object]] = {}
    for m in profile.support_window(L):
        a = profile.evaluate(m / L)
        coeffs[MultiIndex.unit(idx.var_id(0, m))] = {m: a * idx.normalization}
        coeffs[MultiIndex.unit(idx.var_id(1, m))] = {m: 1j * a * idx.normalization}
    return PicardState(0, ChaosExpansion(L, coeffs), params, profile)


def _compositions5(total: int) -> list[tuple[int, ...]]:
    out = []
    for a in range(total + 1):
        for b in range(total - a + 1):
            for c in range(total - a - b + 1):
                for d in range(total - a - b - c + 1):
                    out.append((a, b, c, d, total - a - b - c - d))
    return out


def _wick_fold(slices: Sequence[dict]) -> dict[MultiIndex, object]:
    """Iterated index-level Wick product of fixed-mode slices; pairwise
    sqrt-binomial weights telescope to the full multinomial weight."""
    acc: dict[MultiIndex, object] = {MultiIndex.zero(): 1.0 + 0.0j}
    for s in slices:
        nxt: dict[MultiIndex, object] = {}
        for a0, v0 in acc.items():
            for a1, v1 in s.items():
                al = a0.add(a1)
                w = sqrt_multinomial(al, a1)
                term = (v0 * v1) * w if w != 1.0 else v0 * v1
                nxt[al] = nxt[al] + term if al in nxt else term
        acc = nxt
    return acc


def _next_state(states: list[PicardState], workers: int = 1) -> PicardState:
    """Build the order ``len(states)`` iterate from the lower ones."""
    params = states[0].params
    profile = states[0].profile
    order = len(states)
    L = params.lattice_size
    lsq = L * L
    m_thr = params.momentum_threshold()
    d_thr = params.frequency_threshold()
    scale = -1j / (2.0 * math.pi * L) ** 2
    comps = _compositions5(order - 1)
    mode_sets = [sorted(st.coefficients.mode_set()) for st in states]

    slice_cache: dict[tuple[int, int, bool], dict] = {}

    def slice_of(sub_order: int, m: int, conj: bool) -> dict:
        key = (sub_order, m, conj)
        hit = slice_cache.get(key)
        if hit is not None:
            return hit
        out = {}
        for alpha, modes in states[sub_order].coefficients.coeffs.items():
            v = modes.get(m)
            if v is not None:
                out[alpha] = v.conjugate() if conj else v
        slice_cache[key] = out
        return out

    def partial(m1: int) -> dict[MultiIndex, dict[int, list[OscPoly]]]:
        out: dict[MultiIndex, dict[int, list[OscPoly]]] = {}
        for comp in comps:
            if m1 not in comp_lead[comp]:
                continue
            s1 = slice_of(comp[0], m1, False)
            if not s1:
                continue
            for rest in product(
                mode_sets[comp[1]],
                mode_sets[comp[2]],
                mode_sets[comp[3]],
                mode_sets[comp[4]],
            ):
                mt = (m1,) + rest
                if abs(mt[4] - mt[3]) < m_thr:
                    continue
                d = delta_numerator(mt)
                if abs(d) < d_thr:
                    continue
                slices = [s1]
                for j in range(1, 5):
                    s = slice_of(comp[j], mt[j], j % 2 == 1)
                    if not s:
                        break
                    slices.append(s)
                else:
                    k = alternating_sum(mt)
                    delta = Fraction(d, lsq)
                    for alpha, val in _wick_fold(slices).items():
                        pol = val if isinstance(val, OscPoly) else OscPoly.constant(val)
                        term = osc_primitive(pol, delta) * scale
                        out.setdefault(alpha, {}).setdefault(k, []).append(term)
        return out

    comp_lead = {comp: set(mode_sets[comp[0]]) for comp in comps}
    lead_modes = sorted({m for s in comp_lead.values() for m in s})
    partials = parallel_map_ordered(partial, lead_modes, workers)
    pieces: dict[MultiIndex, dict[int, list[OscPoly]]] = {}
    for part in partials:
        for alpha, modes in part.items():
            slot = pieces.setdefault(alpha, {})
            for k, polys in modes.items():
                slot.setdefault(k, []).extend(polys)
    merged = {
        alpha: {k: OscPoly.merge_many(polys) for k, polys in modes.items()}
        for alpha, modes in pieces.items()
    }
    return PicardState(order, ChaosExpansion(L, merged), params, profile)


_STATE_CACHE: dict[tuple, list[PicardState]] = {}


def picard_recursion(
    n: int, params: RegimeParams, profile: Profile, workers: int = 1
) -> PicardState:
    """The order-``n`` iterate (cached per configuration).

    Order 0 carries the profile amplitude on the degree-1 chaos; each later
    order is the time-integrated quintic Wick convolution of the lower ones
    over the admissible tuple set, with the ``-i`` prefactor and the
    ``1/(2 pi L)^2`` normalization.
    """
    if n < 0:
        raise DomainError("order must be non-negative")
    if n > MAX_ORDER:
        raise ResourceError(f"orders above {MAX_ORDER} are not supported")
    key = (params, profile)
    chain = _STATE_CACHE.setdefault(key, [])
    if not chain:
        chain.append(_initial_state(params, profile))
    while len(chain) <= n:
        chain.append(_next_state(chain, workers))
    return chain[n]


# ---------------------------------------------------------------------------
# the diagrammatic assembly
# ---------------------------------------------------------------------------


def tree_sum(
    n: int,
    k: int,
    params: RegimeParams,
    profile: Profile,
    cap: int = DEFAULT_TUPLE_CAP,
) -> dict[MultiIndex, OscPoly]:
    """Mode-``k`` coefficients assembled tree by tree.

    Sums, over all ``n``-node trees and admissible leaf labelings, the closed
    form amplitude times the leaf profile weights times the leaf Gaussian
    word, scaled by ``(2 pi L)^{-2n}``.  Grouped by (word multiset, frequency
    labels) so each distinct amplitude/word product is formed once.
    """
    if n < 0:
        raise DomainError("order must be non-negative")
    if n > MAX_ORDER:
        raise ResourceError(f"orders above {MAX_ORDER} are not supported")
    L = params.lattice_size
    scale = (1.0 / (2.0 * math.pi * L) ** 2) ** n
    amp_groups: dict[tuple, complex] = {}
    words: dict[tuple, ChaosExpansion] = {}
    fpolys: dict[tuple, OscPoly] = {}

    for tree in _trees.enumerate_trees(n):
        addr_order = [a for a in _trees.node_addresses(tree)]
        for mt in enumerate_c_tree(tree, k, params, profile, cap):
            asg = _trees.LabelAssignment(mt, L)
            om = _trees.omega_labels(tree, asg)
            fkey = (tree, tuple(om.values[a] for a in addr_order))
            if fkey not in fpolys:
                fpolys[fkey] = f_tree_symbolic(tree, asg)
            odd = tuple(sorted(mt[0::2]))
            even = tuple(sorted(mt[1::2]))
            wkey = (odd, even)
            if wkey not in words:
                words[wkey] = _trees.gaussian_word(asg)
            gkey = (wkey, fkey)
            a_w = _trees.amplitude_weight(profile, asg)
            amp_groups[gkey] = amp_groups.get(gkey, 0.0 + 0.0j) + a_w

    pieces: dict[MultiIndex, list[OscPoly]] = {}
    for (wkey, fkey), amp in amp_groups.items():
        poly = fpolys[fkey] * (amp * scale)
        for alpha, modes in words[wkey].coeffs.items():
            c = modes.get(k)
            if c is None:
                continue
            pieces.setdefault(alpha, []).append(poly * c)
    out = {a: OscPoly.merge_many(polys) for a, polys in pieces.items()}
    return {a: p for a, p in out.items() if not p.is_zero()}


# ---------------------------------------------------------------------------
# order-1 second moment, exactly
# ---------------------------------------------------------------------------


def _v1_buckets(k: int, params: RegimeParams, profile: Profile):
    """Group admissible 5-tuples by their (odd, even) entry multisets.

    Within a bucket the resonance numerator, the amplitude product and the
    pairing expectation are constant; only the count and the number of
    cutoff-passing parity images vary.  Returns a list sorted by bucket key:
    ``(d, amp_sq, expectation, count, passing)``.
    """
    L = params.lattice_size
    m_thr = params.momentum_threshold()
    buckets: dict[tuple, list] = {}
    for mt in enumerate_c_l(k, params, profile):
        key = (tuple(sorted(mt[0::2])), tuple(sorted(mt[1::2])))
        slot = buckets.get(key)
        if slot is None:
            amp_sq = 1.0
            for m in mt:
                amp_sq *= profile.evaluate(m / L) ** 2
            expect = pairing_expectation(mt, mt).real
            slot = buckets[key] = [delta_numerator(mt), amp_sq, expect, 0, 0]
        slot[3] += 1
        slot[4] += passing_permutation_count(mt, m_thr)
    return [tuple(buckets[key]) for key in sorted(buckets)]


def _g1_abs_sq(d: int, lsq: int, t: float) -> float:
    """|int_0^t exp(i Delta s) ds|^2 = (2 - 2 cos(Delta t)) / Delta^2."""
    if d == 0:
        return t * t
    delta = d / lsq
    return (2.0 - 2.0 * math.cos(delta * t)) / (delta * delta)


def _sin_ratio(d: int, lsq: int, t: float) -> float:
    """sin(Delta t) / Delta with the resonant limit t at Delta = 0."""
    if d == 0:
        return t
    delta = d / lsq
    return math.sin(delta * t) / delta


def mass_v1(k: int, t: float, params: RegimeParams, profile: Profile) -> float:
    """Exact second moment of the order-1 iterate at mode ``k``."""
    L = params.lattice_size
    lsq = L * L
    norm = 1.0 / (2.0 * math.pi * L) ** 4
    acc = NeumaierSum()
    for d, amp_sq, expect, count, _ in _v1_buckets(k, params, profile):
        acc.add(expect * count * count * amp_sq * _g1_abs_sq(d, lsq, t))
    return norm * float(acc.value)


def mass_derivative_n1(
    k: int,
    t: float,
    params: RegimeParams,
    profile: Profile,
    include_remainder: bool = False,
) -> float:
    """Time derivative of the order-1 second moment at mode ``k``.

    The main term weights each tuple by the number of cutoff-passing parity
    images; with ``include_remainder`` the coincident-momentum corrections are
    added, making the value the exact derivative.
    """
    L = params.lattice_size
    lsq = L * L
    norm = 2.0 / (2.0 * math.pi * L) ** 4
    acc = NeumaierSum()
    for d, amp_sq, expect, count, passing in _v1_buckets(k, params, profile):
        weight = expect * count * count if include_remainder else float(passing)
        acc.add(weight * amp_sq * _sin_ratio(d, lsq, t))
    return norm * float(acc.value)


# ---------------------------------------------------------------------------
# two-tree pairing sums
# ---------------------------------------------------------------------------


def _resolve_extension(tree, phi):
    exts = _trees.linear_extensions(tree)
    if isinstance(phi, int):
        if not 0 <= phi < len(exts):
            raise DomainError(f"extension index {phi} out of range ({len(exts)})")
        return exts[phi]
    phi = tuple(phi)
    if phi not in exts:
        raise DomainError("not a linear extension of this tree")
    return phi


def pairing_sum(
    tree1,
    tree2,
    sigma: Sequence[int],
    phi1,
    phi2,
    k: int,
    t: float,
    params: RegimeParams,
    profile: Profile,
    cap: int = DEFAULT_TUPLE_CAP,
    workers: int = 1,
    normalized: bool = True,
    pair_weight: str = "matching",
) -> complex:
    """Covariance-derivative contribution of one (tree, tree, permutation,
    extension, extension) block.

    Per labeling: ``d/dt [conj(G1) G2]`` of the two chain integrals (in the
    given extension orders), times conj(weight) * permuted weight, times the
    pairing weight.  ``pair_weight="matching"`` counts each permutation as one
    Wick matching (weight 1) so that the full sum over parity permutations
    reproduces the exact covariance derivative; ``"full_expectation"`` uses
    the literal word expectation (over-counts repeated-entry labelings).
    ``normalized`` applies the ``(2 pi L)^{-4n}`` total-sum convention.
    """
    n = tree1.node_count
    if tree2.node_count != n:
        raise DomainError("both trees must have the same node count")
    if n < 1:
        raise DomainError("pairing sums need at least one node")
    if n > MAX_ORDER:
        raise ResourceError(f"orders above {MAX_ORDER} are not supported")
    if pair_weight not in ("matching", "full_expectation"):
        raise DomainError(f"unknown pair_weight {pair_weight!r}")
    ext1 = _resolve_extension(tree1, phi1)
    ext2 = _resolve_extension(tree2, phi2)
    L = params.lattice_size
    lsq = L * L
    window = profile.support_window(L)
    amp = {m: profile.evaluate(m / L) for m in window}

    chain_cache: dict[tuple[int, ...], tuple[complex, complex]] = {}

    def chain_values(freq_ints: tuple[int, ...]) -> tuple[complex, complex]:
        """(G, dG/dt) at time t for the chain with these frequency ints."""
        hit = chain_cache.get(freq_ints)
        if hit is not None:
            return hit
        freqs = [Fraction(d, lsq) for d in freq_ints]
        g = g_m_symbolic(freqs).evaluate(t)
        inner = g_m_symbolic(freqs[:-1]).evaluate(t)
        w_last = float(freqs[-1])
        dg = complex(math.cos(w_last * t), math.sin(w_last * t)) * inner
        out = (g, dg)
        chain_cache[freq_ints] = out
        return out

    def leaf_weight(mt: tuple[int, ...]) -> float:
        # real-valued profiles: the even-slot conjugation is a no-op
        out = 1.0
        for m in mt:
            out *= amp[m]
        return out

    def partial(m1: int) -> complex:
        acc = NeumaierSum()
        for mt in enumerate_c_pair(
            tree1, tree2, sigma, k, params, profile, cap, leading=m1
        ):
            image = apply_permutation(mt, sigma)
            om1 = _trees.omega_labels(tree1, _trees.LabelAssignment(mt, L))
            om2 = _trees.omega_labels(tree2, _trees.LabelAssignment(image, L))
            f1 = tuple(om1.values[a] for a in ext1)
            f2 = tuple(om2.values[a] for a in ext2)
            g1, dg1 = chain_values(f1)
            g2, dg2 = chain_values(f2)
            dt_cov = dg1.conjugate() * g2 + g1.conjugate() * dg2
            if pair_weight == "matching":
                wt = 1.0
            else:
                wt = pairing_expectation(mt, image).real
            acc.add(dt_cov * (leaf_weight(mt) * leaf_weight(image) * wt))
        return complex(acc.value)

    partials = parallel_map_ordered(partial, window, workers)
    total = NeumaierSum()
    for p in partials:
        total.add(p)
    phase = (1j) ** (_trees.sign_exponent(tree1) % 4)
    phase *= (-1j) ** (_trees.sign_exponent(tree2) % 4)
    out = phase * complex(total.value)
    if normalized:
        out *= (2.0 * math.pi * L) ** (-4 * n)
    return out


# ---------------------------------------------------------------------------
# Monte Carlo oracles
# ---------------------------------------------------------------------------


def monte_carlo_mass(
    n: int,
    k: int,
    t: float,
    params: RegimeParams,
    profile: Profile,
    samples: int,
    seed: int,
) -> tuple[float, float]:
    """Empirical mean and standard error of |iterate(k, t)|^2."""
    state = picard_recursion(n, params, profile)
    vals = sample_chaos_batch(state.coefficients, k, samples, seed, t)
    sq = np.abs(vals) ** 2
    est = float(np.mean(sq))
    se = float(np.std(sq, ddof=1) / math.sqrt(samples)) if samples > 1 else math.inf
    return est, se


def monte_carlo_pair(
    n1: int,
    n2: int,
    k: int,
    t: float,
    params: RegimeParams,
    profile: Profile,
    samples: int,
    seed: int,
) -> tuple[complex, float]:
    """Empirical E( conj(iterate_n1(k)) * iterate_n2(k) ) with a shared
    variable layout so both factors see the same draws."""
    s1 = picard_recursion(n1, params, profile)
    s2 = picard_recursion(n2, params, profile)
    layout = sorted(s1.coefficients.variables() | s2.coefficients.variables())
    v1 = sample_chaos_batch(s1.coefficients, k, samples, seed, t, variables=layout)
    v2 = sample_chaos_batch(s2.coefficients, k, samples, seed, t, variables=layout)
    prod_ = np.conj(v1) * v2
    est = complex(np.mean(prod_))
    var = np.var(prod_.real, ddof=1) + np.var(prod_.imag, ddof=1)
    se = float(math.sqrt(var / samples)) if samples > 1 else math.inf
    return est, se
