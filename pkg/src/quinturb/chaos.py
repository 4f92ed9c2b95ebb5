"""Truncated Wiener-chaos algebra over a countable family of real standard
Gaussians.

A chaos element is stored by its coefficients against the orthonormal basis

    xi_alpha = prod_k He_{alpha_k}(xi_k) / sqrt(alpha_k!),

where ``He_n`` are the monic (probabilists') Hermite polynomials and ``alpha``
is a finite-support multi-index.  The Wick product acts on coefficients as a
multinomial-weighted convolution over multi-index splittings; on the spatial
side coefficients live on lattice Fourier modes and multiply by plain
convolution of mode coefficients.

Coefficient values may be plain complex numbers or any object supporting
``+``, ``*``, ``.conjugate()`` and ``.evaluate(t)`` (time-dependent closed
forms from :mod:`quinturb.oscillatory` plug in this way without this module
depending on that one).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .util import DomainError, chunk_rng, MC_CHUNK

__all__ = [
    "MultiIndex",
    "ChaosExpansion",
    "GaussianSample",
    "ComplexGaussianIndexing",
    "hermite_eval",
    "c_alpha",
    "wick_product",
    "sample_chaos",
    "pair_expectation",
    "sobolev_x_norm",
    "truncate_degree",
]


# ---------------------------------------------------------------------------
# multi-indices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MultiIndex:
    """Finite-support map variable-id -> positive multiplicity.

    Stored as a sorted tuple of ``(variable, multiplicity)`` pairs so equal
    maps compare and hash equal.
    """

    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        for var, mult in self.pairs:
            if mult <= 0:
                raise DomainError(f"multiplicity of variable {var} must be positive")
        if list(self.pairs) != sorted(self.pairs):
            object.__setattr__(self, "pairs", tuple(sorted(self.pairs)))

    @staticmethod
    def of(entries: Mapping[int, int]) -> "MultiIndex":
        return MultiIndex(tuple(sorted((v, m) for v, m in entries.items() if m != 0)))

    @staticmethod
    def unit(var: int) -> "MultiIndex":
        return MultiIndex(((var, 1),))

    @staticmethod
    def zero() -> "MultiIndex":
        return MultiIndex(())

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.pairs)

    @property
    def variables(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.pairs)

    def multiplicity(self, var: int) -> int:
        for v, m in self.pairs:
            if v == var:
                return m
        return 0

    def factorial(self) -> int:
        out = 1
        for _, m in self.pairs:
            out *= math.factorial(m)
        return out

    def add(self, other: "MultiIndex") -> "MultiIndex":
        acc = dict(self.pairs)
        for v, m in other.pairs:
            acc[v] = acc.get(v, 0) + m
        return MultiIndex.of(acc)

    def splittings(self) -> Iterator[tuple["MultiIndex", "MultiIndex"]]:
        """All ordered pairs (a, b) with a + b == self."""
        vars_ = [v for v, _ in self.pairs]
        ranges = [range(m + 1) for _, m in self.pairs]
        for picks in product(*ranges):
            a = MultiIndex.of({v: p for v, p in zip(vars_, picks) if p})
            b = MultiIndex.of(
                {v: m - p for (v, m), p in zip(self.pairs, picks) if m - p}
            )
            yield a, b

    def __str__(self) -> str:
        if not self.pairs:
            return "(0)"
        return "+".join(
            (f"{m}e{v}" if m != 1 else f"e{v}") for v, m in self.pairs
        )


def sqrt_multinomial(alpha: MultiIndex, part: MultiIndex) -> float:
    """sqrt of prod_v binom(alpha_v, part_v), computed exactly then rooted."""
    acc = 1
    for v, m in alpha.pairs:
        acc *= math.comb(m, part.multiplicity(v))
    return math.sqrt(acc)


# ---------------------------------------------------------------------------
# the splitting-count recursion
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _c_alpha_mults(mults: tuple[int, ...]) -> int:
    degree = sum(mults)
    if degree == 1:
        return 1
    total = 0
    ranges = [range(m + 1) for m in mults]
    for picks in product(*ranges):
        d1 = sum(picks)
        if d1 == 0 or d1 == degree:
            continue  # empty parts contribute the seed value 0
        left = tuple(sorted(p for p in picks if p))
        right = tuple(sorted(m - p for m, p in zip(mults, picks) if m - p))
        total += _c_alpha_mults(left) * _c_alpha_mults(right)
    return total


def c_alpha(alpha: MultiIndex) -> int:
    """Binary-splitting count: C(a) = sum over a1+a2=a of C(a1) C(a2).

    Seeded with value 0 at the empty index and 1 at every degree-1 index; the
    value depends only on the multiset of multiplicities, which is what the
    memoization keys on.
    """
    if alpha.degree == 0:
        raise DomainError("the splitting count is 0 at the empty index")
    return _c_alpha_mults(tuple(sorted(m for _, m in alpha.pairs)))


# ---------------------------------------------------------------------------
# Hermite polynomials (monic / probabilists' convention)
# ---------------------------------------------------------------------------


def hermite_eval(n: int, x):
    """Monic Hermite polynomial He_n(x) via He_{n+1} = x He_n - n He_{n-1}.

    Accepts scalars or NumPy arrays.
    """
    if n < 0:
        raise DomainError("Hermite order must be non-negative")
    prev = np.ones_like(np.asarray(x, dtype=float)) if not np.isscalar(x) else 1.0
    if n == 0:
        return prev
    cur = np.asarray(x, dtype=float) if not np.isscalar(x) else float(x)
    for k in range(1, n):
        prev, cur = cur, x * cur - k * prev
    return cur


# ---------------------------------------------------------------------------
# chaos expansions
# ---------------------------------------------------------------------------


def _conj_value(v):
    return v.conjugate()


def _value_at(v, t: float) -> complex:
    if hasattr(v, "evaluate"):
        return complex(v.evaluate(t))
    return complex(v)


def _is_zero_value(v) -> bool:
    if hasattr(v, "is_zero"):
        return bool(v.is_zero())
    return v == 0


class ChaosExpansion:
    """Map multi-index -> (map lattice mode -> coefficient).

    Modes are integers ``m`` standing for momenta ``m / L``.  Multi-index keys
    with no nonzero mode coefficient are dropped on construction.
    """

    __slots__ = ("lattice_size", "coeffs")

    def __init__(
        self,
        lattice_size: int,
        coeffs: Mapping[MultiIndex, Mapping[int, object]] | None = None,
    ):
        if lattice_size <= 0:
            raise DomainError("lattice size must be a positive integer")
        self.lattice_size = int(lattice_size)
        cleaned: dict[MultiIndex, dict[int, object]] = {}
        if coeffs:
            for alpha, modes in coeffs.items():
                kept = {m: v for m, v in modes.items() if not _is_zero_value(v)}
                if kept:
                    cleaned[alpha] = kept
        self.coeffs = cleaned

    # -- inspection ---------------------------------------------------------

    def indices(self) -> list[MultiIndex]:
        return list(self.coeffs)

    def degrees(self) -> set[int]:
        return {a.degree for a in self.coeffs}

    def mode_set(self) -> set[int]:
        out: set[int] = set()
        for modes in self.coeffs.values():
            out.update(modes)
        return out

    def coefficient(self, alpha: MultiIndex, mode: int):
        return self.coeffs.get(alpha, {}).get(mode, 0.0)

    def variables(self) -> set[int]:
        out: set[int] = set()
        for a in self.coeffs:
            out.update(a.variables)
        return out

    # -- algebra ------------------------------------------------------------

    def scaled(self, factor) -> "ChaosExpansion":
        return ChaosExpansion(
            self.lattice_size,
            {
                a: {m: factor * v for m, v in modes.items()}
                for a, modes in self.coeffs.items()
            },
        )

    def plus(self, other: "ChaosExpansion") -> "ChaosExpansion":
        if other.lattice_size != self.lattice_size:
            raise DomainError("lattice sizes differ")
        acc: dict[MultiIndex, dict[int, object]] = {
            a: dict(modes) for a, modes in self.coeffs.items()
        }
        for a, modes in other.coeffs.items():
            slot = acc.setdefault(a, {})
            for m, v in modes.items():
                slot[m] = slot[m] + v if m in slot else v
        return ChaosExpansion(self.lattice_size, acc)

    def conjugated(self) -> "ChaosExpansion":
        """Complex conjugate as a random variable (basis elements are real)."""
        return ChaosExpansion(
            self.lattice_size,
            {
                a: {m: _conj_value(v) for m, v in modes.items()}
                for a, modes in self.coeffs.items()
            },
        )

    def at_time(self, t: float) -> "ChaosExpansion":
        """Evaluate time-dependent coefficients, yielding plain complex ones."""
        return ChaosExpansion(
            self.lattice_size,
            {
                a: {m: _value_at(v, t) for m, v in modes.items()}
                for a, modes in self.coeffs.items()
            },
        )

    # -- serialization ------------------------------------------------------

    def to_document(self) -> dict:
        """JSON-compatible document (sorted pair-list indices, [re, im] values)."""
        items = []
        for alpha in sorted(self.coeffs, key=lambda a: a.pairs):
            modes_doc = []
            for m in sorted(self.coeffs[alpha]):
                v = self.coeffs[alpha][m]
                if hasattr(v, "to_document"):
                    modes_doc.append([m, v.to_document()])
                else:
                    c = complex(v)
                    modes_doc.append([m, [c.real, c.imag]])
            items.append([list(map(list, alpha.pairs)), modes_doc])
        return {"lattice_size": self.lattice_size, "coeffs": items}

    @staticmethod
    def from_document(doc: dict) -> "ChaosExpansion":
        from .oscillatory import OscPoly  # deserialization only; no cycle at import

        coeffs: dict[MultiIndex, dict[int, object]] = {}
        for pairs, modes_doc in doc["coeffs"]:
            alpha = MultiIndex(tuple((int(v), int(m)) for v, m in pairs))
            slot: dict[int, object] = {}
            for m, vdoc in modes_doc:
                if isinstance(vdoc, dict):
                    slot[int(m)] = OscPoly.from_document(vdoc)
                else:
                    slot[int(m)] = complex(vdoc[0], vdoc[1])
            coeffs[alpha] = slot
        return ChaosExpansion(int(doc["lattice_size"]), coeffs)


def wick_product(phi: ChaosExpansion, psi: ChaosExpansion) -> ChaosExpansion:
    """Wick product: multinomial-weighted splitting sum, convolving modes.

    The coefficient at ``alpha`` is the sum over ordered splittings
    ``alpha = a1 + a2`` of ``sqrt(alpha!/(a1! a2!)) * phi_{a1} * psi_{a2}``
    with the two mode functions multiplied pointwise in space, i.e. their
    mode coefficients convolved.

    Terms are reduced in an order that depends only on the unordered pair of
    splitting halves, so swapping the operands gives a bitwise-identical
    result (commutativity holds exactly, not just up to rounding).
    """
    if phi.lattice_size != psi.lattice_size:
        raise DomainError("wick_product requires matching lattice sizes")
    groups: dict[MultiIndex, dict[int, dict[tuple, object]]] = {}
    for a1, modes1 in phi.coeffs.items():
        for a2, modes2 in psi.coeffs.items():
            alpha = a1.add(a2)
            weight = sqrt_multinomial(alpha, a1)
            slot = groups.setdefault(alpha, {})
            for m1, v1 in modes1.items():
                for m2, v2 in modes2.items():
                    prod = v1 * v2
                    term = prod if weight == 1.0 else weight * prod
                    half1 = (a1.pairs, m1)
                    half2 = (a2.pairs, m2)
                    key = (half1, half2) if half1 <= half2 else (half2, half1)
                    group = slot.setdefault(m1 + m2, {})
                    group[key] = group[key] + term if key in group else term
    out: dict[MultiIndex, dict[int, object]] = {}
    for alpha, slot in groups.items():
        reduced = {}
        for m, group in slot.items():
            total = None
            for key in sorted(group):
                total = group[key] if total is None else total + group[key]
            reduced[m] = total
        out[alpha] = reduced
    return ChaosExpansion(phi.lattice_size, out)


def truncate_degree(phi: ChaosExpansion, n: int) -> ChaosExpansion:
    """Drop every multi-index of degree above ``n``."""
    return ChaosExpansion(
        phi.lattice_size,
        {a: modes for a, modes in phi.coeffs.items() if a.degree <= n},
    )


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GaussianSample:
    """One realization of the Gaussian family: variable-id -> standard draw."""

    values: Mapping[int, float]
    rng_seed: int

    @staticmethod
    def draw(variables: Iterable[int], rng_seed: int) -> "GaussianSample":
        """Deterministic draws; each variable's value depends only on
        (rng_seed, variable id)."""
        vals = {}
        for var in sorted(set(int(v) for v in variables)):
            ss = np.random.SeedSequence(entropy=int(rng_seed), spawn_key=(var,))
            vals[var] = float(np.random.default_rng(ss).standard_normal())
        return GaussianSample(vals, int(rng_seed))


def basis_eval(alpha: MultiIndex, values: Mapping[int, float]) -> float:
    """xi_alpha at a sample: prod He_m(x_v)/sqrt(m!)."""
    out = 1.0
    for var, mult in alpha.pairs:
        if var not in values:
            raise DomainError(f"sample is missing a draw for variable {var}")
        out *= hermite_eval(mult, values[var]) / math.sqrt(math.factorial(mult))
    return out


def sample_chaos(
    phi: ChaosExpansion, sample: GaussianSample, t: float = 0.0
) -> dict[int, complex]:
    """Evaluate the chaos element at a Gaussian sample, per mode."""
    out: dict[int, complex] = {}
    for alpha, modes in phi.coeffs.items():
        xi = basis_eval(alpha, sample.values)
        if xi == 0.0:
            continue
        for m, v in modes.items():
            out[m] = out.get(m, 0.0 + 0.0j) + _value_at(v, t) * xi
    return out


def sample_chaos_batch(
    phi: ChaosExpansion,
    mode: int,
    n_samples: int,
    seed: int,
    t: float = 0.0,
    variables: Sequence[int] | None = None,
) -> np.ndarray:
    """Vectorized sampling of one mode coefficient over many realizations.

    Sample ``i`` is generated by the chunk generator for ``i // MC_CHUNK``;
    the result is independent of any worker layout by construction.  Passing
    an explicit ``variables`` layout (a superset of the element's own) makes
    draws reusable across different chaos elements under the same seed.
    """
    variables = sorted(phi.variables()) if variables is None else sorted(variables)
    missing = phi.variables() - set(variables)
    if missing:
        raise DomainError(f"variable layout is missing ids {sorted(missing)}")
    var_pos = {v: i for i, v in enumerate(variables)}
    entries = []  # (complex coefficient, [(position, mult), ...])
    for alpha, modes in phi.coeffs.items():
        if mode in modes:
            c = _value_at(modes[mode], t)
            entries.append((c, [(var_pos[v], m) for v, m in alpha.pairs]))
    max_mult = max(
        (m for _, pm in entries for _, m in pm), default=0
    )
    out = np.empty(n_samples, dtype=complex)
    pos = 0
    chunk_index = 0
    while pos < n_samples:
        size = min(MC_CHUNK, n_samples - pos)
        rng = chunk_rng(seed, chunk_index)
        draws = rng.standard_normal((MC_CHUNK, len(variables)))[:size]
        # Hermite tables up to the largest multiplicity in use
        tables = [np.ones_like(draws)]
        if max_mult >= 1:
            tables.append(draws.copy())
        for order in range(1, max_mult):
            tables.append(draws * tables[order] - order * tables[order - 1])
        vals = np.zeros(size, dtype=complex)
        for c, pm in entries:
            term = np.full(size, c, dtype=complex)
            for p, mult in pm:
                term *= tables[mult][:, p] / math.sqrt(math.factorial(mult))
            vals += term
        out[pos : pos + size] = vals
        pos += size
        chunk_index += 1
    return out


# ---------------------------------------------------------------------------
# expectations and norms
# ---------------------------------------------------------------------------


def pair_expectation(
    phi: ChaosExpansion, psi: ChaosExpansion, k: int, k_prime: int
):
    """E( conj(phi-hat(k)) * psi-hat(k') ) = sum_alpha conj(phi_a(k)) psi_a(k').

    Exact by basis orthonormality.  With time-dependent coefficients the
    result is itself a closed-form function of time.
    """
    if phi.lattice_size != psi.lattice_size:
        raise DomainError("pair_expectation requires matching lattice sizes")
    total = None
    for alpha, modes in phi.coeffs.items():
        if k not in modes:
            continue
        other = psi.coeffs.get(alpha)
        if not other or k_prime not in other:
            continue
        term = _conj_value(modes[k]) * other[k_prime]
        total = term if total is None else total + term
    return 0.0 + 0.0j if total is None else total


def sobolev_x_norm(phi: ChaosExpansion, d: float, s: float) -> float:
    """Weighted coefficient norm: sup over alpha of
    ||phi_alpha||_{H^s} / (sqrt(alpha!) C(alpha) d^{|alpha|}),
    with the discrete H^s norm (1/L) sum <m/L>^{2s} |phi_alpha(m)|^2.

    The empty index must carry no coefficient (its splitting count is 0).
    """
    if d <= 0:
        raise DomainError("the radius parameter must be positive")
    L = phi.lattice_size
    best = 0.0
    for alpha, modes in phi.coeffs.items():
        if alpha.degree == 0:
            raise DomainError("constant component present: norm weight undefined")
        acc = 0.0
        for m, v in modes.items():
            x = m / L
            c = _value_at(v, 0.0) if hasattr(v, "evaluate") else complex(v)
            acc += (1.0 + x * x) ** s * abs(c) ** 2
        hs = math.sqrt(acc / L)
        weight = math.sqrt(alpha.factorial()) * c_alpha(alpha) * d**alpha.degree
        best = max(best, hs / weight)
    return best


# ---------------------------------------------------------------------------
# complex Gaussians
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComplexGaussianIndexing:
    """Bijection (component, momentum) -> real-variable id, plus the 1/sqrt(2)
    normalization making E|g|^2 = 1 for g = (xi_{(0,m)} + i xi_{(1,m)})/sqrt(2).
    """

    normalization: float = 1.0 / math.sqrt(2.0)

    @staticmethod
    def var_id(component: int, m: int) -> int:
        if component not in (0, 1):
            raise DomainError("component must be 0 (real) or 1 (imaginary)")
        zig = 2 * m if m >= 0 else -2 * m - 1
        return 2 * zig + component

    @staticmethod
    def inverse(var: int) -> tuple[int, int]:
        component = var & 1
        zig = var >> 1
        m = zig // 2 if zig % 2 == 0 else -(zig + 1) // 2
        return component, m

    def gaussian_factor(
        self, lattice_size: int, m: int, conjugate: bool = False
    ) -> ChaosExpansion:
        """Degree-1 expansion of g_{m} (or its conjugate).

        The spatial mode is ``m`` for a plain factor and ``-m`` for a
        conjugated one (conjugation flips the Fourier frequency), so Wick
        products of factors land at the alternating-sum mode by convolution.
        """
        i_unit = -1.0j if conjugate else 1.0j
        mode = -m if conjugate else m
        return ChaosExpansion(
            lattice_size,
            {
                MultiIndex.unit(self.var_id(0, m)): {mode: self.normalization},
                MultiIndex.unit(self.var_id(1, m)): {mode: i_unit * self.normalization},
            },
        )
